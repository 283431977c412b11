"""Bilateral shorted operators, parallel sums and the minus order.

Dense complex matrices stand in for bounded operators between
finite-dimensional Hilbert spaces; subspaces are orthonormal column bases.
The package computes generalized Schur complements relative to a pair of
subspaces, the parallel sum/subtraction calculus built on them, and the minus
partial order, together with a randomized suite certifying their expected
identities.
"""

from .douglas import ReducedSolution, range_leq, range_residual, reduced_solution
from .errors import (
    BadAuxiliary,
    BadDims,
    ConsistencyError,
    DimensionMismatch,
    EscalationExhausted,
    NotComplementable,
    NotComplementary,
    NotInDA,
    NotPSD,
    NotSummable,
    RangeNotIncluded,
    ShortopsError,
    ZeroOperator,
)
from .genlab import (
    GenConfig,
    SuiteReport,
    gauss,
    gen_complementable,
    gen_da_member,
    gen_subspace,
    gen_with_ranges,
    run_suite,
)
from .geometry import (
    AnglePair,
    Subspace,
    angles,
    oblique_projection,
    ortho_projection,
    subspace_join,
    subspace_meet,
)
from .minusorder import MinusVerdict, in_minus_set, minus_leq
from .numcore import (
    DEFAULT_TOL,
    FundamentalSubspaces,
    Tolerance,
    as_operator,
    fundamental_subspaces,
    opnorm,
    pinv,
    polar,
    rank,
    sqrt_abs,
    sqrt_abs_adjoint,
    sqrt_psd,
)
from .parallel import (
    ConvergenceRecord,
    ParallelSumResult,
    SummabilityReport,
    in_da,
    parallel_subtract,
    parallel_sum,
    recover_shorted,
    shorted_via_limit,
    summability,
)
from .shorting import (
    BlockDecomposition,
    ComplementabilityReport,
    ShortedResult,
    block_decompose,
    complementability,
    schur_compression,
    shorted,
    solve_shorting_direction,
)

__version__ = "0.1.0"
