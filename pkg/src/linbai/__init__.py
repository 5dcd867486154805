"""Best-arm identification for stochastic linear bandits.

Lazy track-and-stop with forced exploration, a Frank-Wolfe allocation
optimizer, a GLLR stopping rule whose threshold does not depend on the number
of arms, a round-robin variant for the unit sphere, and a reproducible
benchmark harness.
"""
from .allocation import (
    Allocation,
    OptimizerResult,
    characteristic_time,
    d_infty,
    kl_bernoulli,
    optimize_allocation,
    psi,
    psi_supergradient,
    sample_complexity_lower_bound,
)
from .baselines import oracle_allocation, run_oracle_tracking, run_static
from .environment import RewardStream
from .estimator import DesignState, empirical_best_arm
from .harness import BenchConfig, bench
from .instance import (
    ArmSet,
    Instance,
    gen_many_arms,
    gen_orthonormal_basis,
    load_instance,
    orthonormal_instance,
    save_instance,
    sphere_instance,
)
from .kernels import BACKEND as KERNEL_BACKEND
from .linalg import SymMatrix, logdet_shifted, min_eigenvalue, rank_one_update, solve_psd
from .lts import (
    LazySchedule,
    StopConfig,
    TrackerState,
    beta_threshold,
    f_threshold,
    gllr_pair,
    maybe_update_allocation,
    next_arm,
    run_lts,
    should_stop,
    stopping_statistic,
)
from .records import RunRecord
from .sphere import (
    SphereConfig,
    epsilon_t,
    round_robin_arm,
    run_sphere,
    sphere_lower_bound,
    sphere_should_stop,
    sphere_stopping_statistic,
)

__version__ = "0.1.0"
