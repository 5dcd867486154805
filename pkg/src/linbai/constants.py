"""Numerical tolerances and limits, centralized so tests can reference them."""

# Symmetry tolerance (absolute) for accepting a matrix as symmetric.
SYMMETRY_ATOL = 1e-10

# Relative eigenvalue cutoff for the pseudo-inverse: eigenvalues below
# PSD_CUTOFF_REL * lambda_max are truncated to zero.
PSD_CUTOFF_REL = 1e-10

# Relative cutoff below which the smallest eigenvalue is reported as exactly 0.
RANK_DEFICIENT_REL = 1e-12

# A weighted design A(w) is treated as singular (objective value 0) when
# lambda_min <= PSI_SINGULAR_REL * lambda_max.
PSI_SINGULAR_REL = 1e-12

# Allocation weights must sum to 1 within this tolerance.
ALLOCATION_SUM_TOL = 1e-12

# Weights above this absolute cutoff count as support, both for reporting
# support sizes and for tracking eligibility.
SUPPORT_CUTOFF = 1e-9

# Minimal inner-product gap between the two best arms for the best arm to
# count as unique.
BEST_ARM_GAP_TOL = 1e-12

# Hard cap on the number of rounds in a single run; reaching it flags the
# run record as incomplete instead of raising.
MAX_ROUNDS = 10**7
