"""Quantization-induced topologies and sheaves on finite context posets."""

from ._kernels import BACKEND
from .bridge import ContextPoset, FlatPoset, build_context_poset, galois_report, phi, psi, sharp
from .classical import ObservableSet
from .errors import QuantoposError
from .matrix import StarAlgebra, tolerance
from .poset import FinitePoset, MonotoneMap
from .presheaf import NatTransform, Presheaf, Subobject

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "ContextPoset",
    "FinitePoset",
    "FlatPoset",
    "MonotoneMap",
    "NatTransform",
    "ObservableSet",
    "Presheaf",
    "QuantoposError",
    "StarAlgebra",
    "Subobject",
    "build_context_poset",
    "galois_report",
    "phi",
    "psi",
    "sharp",
    "tolerance",
]
