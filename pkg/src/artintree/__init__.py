"""artintree: exact computation with finite p-groups.

Polycyclic power-commutator presentations with collection, transfer
(Artin) patterns of maximal subgroups, parametrized maximal-class group
constructors, the p-group generation algorithm with descendant trees,
and pruned tree searches with covers and relation-rank filters.
"""

from .linalg import (
    FpMatrix,
    IntMatrix,
    Subspace,
    abelian_invariants,
    enumerate_subspaces,
    gaussian_binomial,
    nullspace,
    rref,
)
from .pc import (
    Definition,
    InconsistentPresentationError,
    PcGroup,
    PcPresentation,
    Subgroup,
    Quotient,
    consistency_violations,
    parse_presentation,
    print_presentation,
    trivial_group,
)

__version__ = "1.0.0"
