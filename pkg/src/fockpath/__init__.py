"""Fock-space representations of graphs, k-graphs and categories of paths."""

__version__ = "0.1.0"

from .model import DirectedGraph, Edge, Path  # noqa: E402
from .presentations import CategoryPresentation, KGraphSkeleton, certify  # noqa: E402
from .fock import build_basis  # noqa: E402

__all__ = ["DirectedGraph", "Edge", "Path", "CategoryPresentation", "KGraphSkeleton", "certify", "build_basis", "__version__"]
