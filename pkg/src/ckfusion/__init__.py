"""Controlled *-K-fusion frames over the commutative C*-algebra C^d."""

from .algebra import AlgebraDescriptor, AlgebraElement
from .certificate import Certificate, HypothesisResult
from .frames import (
    BoundsReport,
    FrameClass,
    FrameSystem,
    analysis,
    frame_operator,
    optimal_star_bounds,
    reconstruct,
    synthesis,
    verify_membership,
)
from .generate import InstanceSpec, sequence_example_system, generate
from .hilbert_module import ModuleVector, SequenceVector, Submodule
from .io import load_frame, save_frame
from .operators import ModuleOperator

__all__ = [
    "AlgebraDescriptor",
    "AlgebraElement",
    "BoundsReport",
    "Certificate",
    "FrameClass",
    "FrameSystem",
    "HypothesisResult",
    "InstanceSpec",
    "ModuleOperator",
    "ModuleVector",
    "SequenceVector",
    "Submodule",
    "analysis",
    "sequence_example_system",
    "frame_operator",
    "generate",
    "load_frame",
    "optimal_star_bounds",
    "reconstruct",
    "save_frame",
    "synthesis",
    "verify_membership",
]
