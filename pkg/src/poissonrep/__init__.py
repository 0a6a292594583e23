"""Poisson structures on representation spaces of surface groups.

Computes twisted group (co)homology at relator-constrained representation
tuples via free differential calculus, the intersection-pairing Poisson
bracket of invariant functions for arbitrary invariant bilinear forms,
rank stratification scans, mapping-class equivariance checks, and
Hamiltonian twist flows -- for compact matrix groups at desk scale.
"""

__version__ = "0.1.0"

from .fox import (GroupRingElement, Relator, Word, fox_derivative, parse_word,
                  reduce_letters, relator, relator_fox_jacobian, word_str)
from .liegroups import (FormSplit, InvariantForm, MatrixGroup, coadjoint,
                        diagonal_form, group_by_name, identity_form,
                        product_group, so3, split_form, su2, u1, u2)
from .evaluate import eval_group_ring, relator_differential, word_eval
from .repspace import (OrbitType, Representation, conjugate_representation,
                       newton_project, orbit_type, sample_representation,
                       solve_conjugator)
from .homology import CohomologyData, build_complex, cap_pairing, homology_class
from .intersection import (cup_bracket, equivariance_check, fundamental_chain,
                           intersection_pairing, sigma)
from .functions import (Const, InvariantFunction, TraceWord, parse_function,
                        trace_of)
from .bracket import (BracketValue, ambient_bracket, bracket_gram,
                      casimir_residual, differential, jacobi_residual,
                      poisson_bracket)
from .scans import (MappingClass, ScanRecord, dehn_twist, kummer_census,
                    mcg_pullback_check, poisson_rank, probe_family)
from .flows import (FlowState, FlowTrajectory, hamiltonian_vector,
                    integrate_flow)
