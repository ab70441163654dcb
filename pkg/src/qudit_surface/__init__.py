"""Qudit surface codes on two-complexes: fields, chains, Pauli algebra, codes and protocols."""

from __future__ import annotations

from .complex import BUILDERS, Chain, Edge, Face, TwoComplex, dual
from .errors import (
    CapExceededError,
    ComplexError,
    FieldError,
    InconsistentStabilizerError,
    NonCommutingError,
    ParseError,
    PauliError,
    ProtocolError,
    QuditSurfaceError,
)
from .gfarith import FieldCtx, FieldElement, character_sum, discriminant_nonzero
from .homology import HomologySummary, cycle_representative, h1
from .pauli import PauliOp, commutation_phase, symplectic_rank
from .protocols import braid_phase, create_dyon_pair, interferometer, retrieve, store
from .stabilizer import StabilizerCode, code_parameters, global_identities
from .statevec import DenseState, build_hamiltonian, ground_space

__version__ = "0.1.0"

__all__ = [
    "BUILDERS", "Chain", "Edge", "Face", "TwoComplex", "dual",
    "CapExceededError", "ComplexError", "FieldError", "InconsistentStabilizerError",
    "NonCommutingError", "ParseError", "PauliError", "ProtocolError", "QuditSurfaceError",
    "FieldCtx", "FieldElement", "character_sum", "discriminant_nonzero",
    "HomologySummary", "cycle_representative", "h1",
    "PauliOp", "commutation_phase", "symplectic_rank",
    "braid_phase", "create_dyon_pair", "interferometer", "retrieve", "store",
    "StabilizerCode", "code_parameters", "global_identities",
    "DenseState", "build_hamiltonian", "ground_space",
]
