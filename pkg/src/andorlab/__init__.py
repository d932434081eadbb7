"""Exact counting, exact distributions and uniform sampling for random And/Or trees
under the generalised model (G) and the quotient model (E)."""

from importlib.metadata import PackageNotFoundError, version as _version

try:
    __version__ = _version("artifact")
except PackageNotFoundError:  # running from a source checkout
    __version__ = "0.1.0"

from .combinatorics import ModelTag, count_trees, lab, rat_exact, threshold_M
from .trees import AndOrTree, Leaf, Literal, Node, format_tree, parse
from .truthtable import TruthTable

__all__ = [
    "AndOrTree", "Leaf", "Literal", "ModelTag", "Node", "TruthTable",
    "count_trees", "format_tree", "lab", "parse", "rat_exact", "threshold_M",
]
