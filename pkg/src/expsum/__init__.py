"""expsum: Kloosterman-type exponential sums, their cusp-pair
generalizations at congruence levels, and cancellation measurements for
sums over arithmetic progressions and against periodic weights.

All evaluators are exact-integer in their angle arithmetic and use
compensated accumulation, so closed-form identities can be tested at
tolerances proportional to the term count.
"""

from .characters import DirichletCharacter, RationalAngle, char_eval, char_parity, characters_mod
from .cusp_sums import (
    CuspPairSumSpec,
    cor33_infty_margin,
    cor33_rsum_ratio,
    s_gamma01_infty_infty,
    s_infty_rq,
    s_infty_rq_oracle,
    s_infty_rq_rsum,
    s_rq_rq,
    s_rq_rq_oracle,
    s_rq_rq_rsum,
)
from .cusps import (
    CuspData,
    ScalingMatrix,
    allowed_modulus_infty_rq,
    cusp_representatives,
    scaling_matrix,
    stabilizer_generator,
    width,
)
from .errors import (
    DegenerateFit,
    IdentityError,
    InvalidBump,
    NonCoprimeModuli,
    NotInvertible,
    PreconditionViolation,
    TooManyDivisors,
)
from .modular import (
    Factorization,
    carmichael_lambda,
    crt_combine,
    divisors,
    euler_phi,
    factorize,
    is_prime,
    mod_inverse,
    moebius,
    tau,
)
from .progressions import (
    Bump,
    BumpSpec,
    PeriodicFunction,
    ProgressionSpec,
    SumSeries,
    ap_series,
    ap_sum,
    build_bump,
    correlation_series,
    correlation_sum,
    decomposition_check,
    fit_exponent,
    smooth_dyadic_sum,
    thm52_rhs,
    trivial_bound,
    write_series_csv,
    zeta_partial,
)
from .sums import (
    RootOfUnitySum,
    gauss_reduce,
    gauss_sum,
    kloosterman,
    kloosterman_fast,
    t_margin,
    t_sum,
    t_sum_fast,
    weil_margin,
)

__version__ = "0.1.0"
