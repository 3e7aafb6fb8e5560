"""Supersymmetric ground states of the Nicolai and Z2 Nicolai chains.

Three routes to the same Poincaré polynomials: brute-force homology of the
supercharge, the closed recurrences, and a homological-perturbation
reduction.  See :mod:`nicolai.cli` for the command-line interface.
"""

__version__ = "0.1.0"

from .errors import (ArithmeticDisagreement, ConfigError, ConstructionError, DivergenceError,
                     DomainError, ModelError, NicolaiError, ResourceError, SiteRangeError)
from .fock import (FockState, Kind, MonomialTerm, OperatorLetter, SignedState, SuperchargeSpec,
                   adjoint, annihilate, apply_letter, apply_supercharge, apply_term, basis_states,
                   check_nilpotent, create, nicolai_supercharge, z2_supercharge)
from .homology import (HomologyReport, differential_matrix, euler_check, ground_state_count,
                       hamiltonian_kernel_dim, homology_dims, homology_report, poincare_polynomial)
from .hpl import (ReducedComplex, Retract, build_retract, decomposition_check, homology_via_hpl,
                  reduced_differential, split_last_term)
from .linalg import FieldSpec, SparseMatrix, kernel_dim, rank
from .poly import PoincarePolynomial, suspend
from .recursion import (RecursionTable, build_table, nicolai_count, nicolai_poly, z2_count,
                        z2_poly)
