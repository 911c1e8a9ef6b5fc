"""Girth-constrained LDPC parity-check matrix design by branch-and-cut."""

__version__ = "0.1.0"

from .alist import read_alist, write_alist
from .model import DesignSpec
from .peg import modified_peg
from .solver import SolveConfig, SolveReport, certify, solve
from .structure import min_n_bound
from .tanner import TannerGraph, build_graph, degree_deviation, girth

__all__ = [
    "DesignSpec",
    "SolveConfig",
    "SolveReport",
    "TannerGraph",
    "build_graph",
    "certify",
    "degree_deviation",
    "girth",
    "min_n_bound",
    "modified_peg",
    "read_alist",
    "solve",
    "write_alist",
    "__version__",
]
