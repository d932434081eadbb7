"""Exact counting sequences for random And/Or trees.

Counts are plain Python ints and exact probabilities are ``Fraction``s.
Floating point only shows up in :func:`rat_asymptotic` and in reports.
"""

from __future__ import annotations

import enum
import math
import threading
from fractions import Fraction
from functools import lru_cache


class ModelTag(str, enum.Enum):
    """The two uniform models: labelled trees (G) or tree classes (E)."""

    G = "G"
    E = "E"

    @classmethod
    def parse(cls, value: "str | ModelTag") -> "ModelTag":
        if isinstance(value, ModelTag):
            return value
        try:
            return cls(str(value).upper())
        except ValueError:
            raise ValueError(f"unknown model {value!r}; expected G or E") from None


def _check_positive(name: str, value: int) -> None:
    if value < 1:
        raise ValueError(f"{name} must be >= 1, got {value}")


def catalan_leaves(n: int) -> int:
    """Number of binary plane trees with ``n`` leaves."""
    _check_positive("n", n)
    return math.comb(2 * n - 2, n - 1) // n


# Rows of the Stirling triangle are expensive at n ~ 2000 (a few MB each), so
# only a handful are kept and new rows are grown from the nearest cached one.
_ROW_CACHE: dict[int, tuple[int, ...]] = {0: (1,)}
_ROW_CACHE_MAX = 8
_ROW_LOCK = threading.Lock()


def _next_row(row: tuple[int, ...]) -> tuple[int, ...]:
    i = len(row)  # row holds {i-1 brace p} for p = 0..i-1
    new = [0] * (i + 1)
    for p in range(1, i):
        new[p] = p * row[p] + row[p - 1]
    new[i] = row[i - 1]
    return tuple(new)


def stirling_row(n: int) -> tuple[int, ...]:
    """Return ``({n brace 0}, ..., {n brace n})``."""
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    with _ROW_LOCK:
        if n in _ROW_CACHE:
            return _ROW_CACHE[n]
        start = max(i for i in _ROW_CACHE if i <= n)
        row = _ROW_CACHE[start]
    for _ in range(start, n):
        row = _next_row(row)
    with _ROW_LOCK:
        _ROW_CACHE[n] = row
        if len(_ROW_CACHE) > _ROW_CACHE_MAX:
            victims = sorted(i for i in _ROW_CACHE if i not in (0, n))
            for i in victims[: len(_ROW_CACHE) - _ROW_CACHE_MAX]:
                del _ROW_CACHE[i]
    return row


def stirling2(n: int, p: int) -> int:
    """Stirling number of the second kind ``{n brace p}``."""
    if n < 0 or p < 0:
        raise ValueError("arguments must be non-negative")
    if p > n:
        return 0
    return stirling_row(n)[p]


def lab(n: int, m: int, model: ModelTag | str) -> int:
    """Number of leaf labellings of ``n`` leaves with at most ``m`` variables.

    Model G counts literal strings, ``(2m)^n``.  Model E counts canonical
    labellings (first-occurrence variable numbering, first occurrence
    positive), ``sum_p {n brace p} 2^(n-p)``.
    """
    _check_positive("n", n)
    _check_positive("m", m)
    model = ModelTag.parse(model)
    if model is ModelTag.G:
        return (2 * m) ** n
    row = stirling_row(n)
    return sum(row[p] << (n - p) for p in range(1, min(m, n) + 1))


def shape_count(n: int) -> int:
    """Connective-labelled shapes of size ``n``: ``2^(n-1) Cat_n``."""
    return catalan_leaves(n) << (n - 1)


def count_trees(n: int, k: int, model: ModelTag | str) -> int:
    """``A_n``: labelled trees (G) or tree classes (E) of size ``n`` over ``k`` variables."""
    _check_positive("n", n)
    _check_positive("k", k)
    return shape_count(n) * lab(n, k, model)


def rat_exact(n: int, k: int, model: ModelTag | str) -> Fraction:
    """``Lab(n-1, k) / Lab(n, k)`` as an exact fraction."""
    if n < 2:
        raise ValueError(f"rat is defined for n >= 2, got {n}")
    _check_positive("k", k)
    return Fraction(lab(n - 1, k, model), lab(n, k, model))


def rat_asymptotic(n: int, k: int, model: ModelTag | str) -> Fraction:
    """Leading-order value of ``rat_n``.

    Model G is exact: ``1/(2k)``.  Model E uses ``1/(2k)`` when
    ``k <= threshold_M(n)`` and ``ln(n)/(2n)`` otherwise; the logarithm is a
    double converted exactly to a fraction (53-bit mantissa, so well inside the
    64-bit budget).
    """
    if n < 2:
        raise ValueError(f"rat is defined for n >= 2, got {n}")
    _check_positive("k", k)
    model = ModelTag.parse(model)
    if model is ModelTag.G or k <= threshold_M(n):
        return Fraction(1, 2 * k)
    return Fraction(math.log(n) / (2 * n))


def a_term(n: int, p: int) -> Fraction:
    """``p^n / (p! 2^p)``, the summand whose mode defines ``M_n``."""
    if not 1 <= p <= n:
        raise ValueError(f"need 1 <= p <= n, got p={p}, n={n}")
    return Fraction(p**n, math.factorial(p) << p)


def _ratio_exceeds_one(n: int, p: int) -> bool:
    # a_{p+1}/a_p = ((p+1)/p)^n / (2(p+1)) > 1  <=>  (p+1)^n > 2 (p+1) p^n
    return (p + 1) ** n > 2 * (p + 1) * p**n


_PHI_MARGIN = 1e-9
_EXACT_LIMIT = 4000


def _ratio_exceeds_one_fast(n: int, p: int) -> bool:
    phi = n * math.log1p(1.0 / p) - math.log(2.0 * p + 2.0)
    if abs(phi) > _PHI_MARGIN:
        return phi > 0
    return _ratio_exceeds_one(n, p)


def threshold_M(n: int) -> int:
    """Mode ``M_n`` of ``p -> a_term(n, p)`` on ``1..n``.

    The ratio ``a_{p+1}/a_p`` is decreasing in ``p`` (log-concavity), so the
    mode is the first ``p`` where the ratio drops to at most 1; an exact tie
    resolves to the smaller index.  The crossing is located by bisection on
    the sign of ``n log(1+1/p) - log(2p+2)``.  Signs within 1e-9 of zero are
    recomputed in integers, and for ``n <= 4000`` the final crossing is always
    confirmed in integers.
    """
    _check_positive("n", n)
    if n == 1:
        return 1
    exceeds = _ratio_exceeds_one_fast
    if exceeds(n, n - 1):
        return n
    lo, hi = 1, n - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if exceeds(n, mid):
            lo = mid + 1
        else:
            hi = mid
    if n <= _EXACT_LIMIT and (
        _ratio_exceeds_one(n, lo) or (lo > 1 and not _ratio_exceeds_one(n, lo - 1))
    ):
        raise ArithmeticError(f"float bisection missed the exact mode crossing at n={n}")
    return lo


def threshold_M_scan(n: int) -> int:
    """Reference mode by a full exact scan over ``a_term(n, 1..n)``."""
    _check_positive("n", n)
    best, best_val = 1, a_term(n, 1)
    for p in range(2, n + 1):
        val = a_term(n, p)
        if val > best_val:
            best, best_val = p, val
    return best


def bonferroni_holds(n: int, p: int) -> bool:
    """Exact check of ``p^n/p! - (p-1)^n/(p-1)! <= {n brace p} <= p^n/p!``."""
    if not 1 <= p <= n:
        raise ValueError(f"need 1 <= p <= n, got p={p}, n={n}")
    # scaled by p!
    scaled = math.factorial(p) * stirling2(n, p)
    upper = p**n
    lower = upper - p * (p - 1) ** n
    return lower <= scaled <= upper


def concentration_window_mass(n: int, k: int, lo: int, hi: int) -> Fraction:
    """Share of ``sum_{p<=k} {n brace p} 2^-p`` carried by ``lo <= p <= hi``."""
    if not 1 <= lo <= hi <= k <= n:
        raise ValueError(f"need 1 <= lo <= hi <= k <= n, got {lo}, {hi}, {k}, {n}")
    row = stirling_row(n)
    # common factor 2^k clears the denominators
    total = sum(row[p] << (k - p) for p in range(1, k + 1))
    window = sum(row[p] << (k - p) for p in range(lo, hi + 1))
    return Fraction(window, total)


def series_I(n_max: int) -> list[int]:
    """Coefficients ``I_1..I_nmax`` of ``I(z) = z + 2 I(z)^2``."""
    _check_positive("n_max", n_max)
    coeffs = [0] * (n_max + 1)
    for n in range(1, n_max + 1):
        acc = sum(coeffs[i] * coeffs[n - i] for i in range(1, n))
        coeffs[n] = (1 if n == 1 else 0) + 2 * acc
    return coeffs[1:]


@lru_cache(maxsize=None)
def falling_factorial(k: int, j: int) -> int:
    out = 1
    for i in range(j):
        out *= k - i
    return out
