# --- Output / Run Configuration ---
SCHEMA_VERSION = "dmrg-lab/v1"     # Top-level "schema" key written into every JSON result
DEFAULT_SEED = 1234                # Seed used when --seed is not given (all randomness flows from it)
SPECTRUM_EXPORT_LIMIT = 256        # Maximum number of rho eigenvalues written by the CLI

# --- Logging Configuration ---
LOG_LEVEL = "INFO"                                    # Root log level (DEBUG with --verbose)
LOG_FORMAT = "[%(levelname)s] %(name)s: %(message)s"  # Console format, one status line per event

# --- Exit Codes ---
EXIT_OK = 0                        # Success
EXIT_NUMERIC = 1                   # Numeric failure (convergence, contract violation)
EXIT_NOT_CONVERGED = 2             # DMRG ran out of iterations; result still written
EXIT_USAGE = 64                    # Bad flags or guard violation

# --- Numerics Tolerances ---
EIG_TOL = 1e-10                    # Eigen/SVD reconstruction tolerance
RECON_TOL = 1e-9                   # Matrix square-root and Schmidt reconstruction tolerance
SYM_TOL = 1e-12                    # Maximum asymmetry accepted as "symmetric"
PSD_TOL = 1e-12                    # Eigenvalues in [-PSD_TOL, 0) are clamped to zero
TRACE_TOL = 1e-10                  # Unit trace / unit norm tolerance
ORTHO_TOL = 1e-10                  # Orthogonality tolerance for user-supplied rotations
DEGENERACY_TOL = 1e-12             # Eigenvalues closer than this are one multiplet at the cut
ENTROPY_EPS = 1e-14                # Eigenvalues at or below this contribute 0 to -lambda ln lambda

# --- Lanczos Configuration ---
LANCZOS_TOL = 1e-10                # Residual target ||Hv - Ev|| <= tol * max(1, |E|)
LANCZOS_MAX_ITER = 6000            # Maximum number of operator applications per eigenpair
LANCZOS_KRYLOV_DIM = 100           # Krylov space size before an explicit restart
LANCZOS_BREAKDOWN = 1e-13          # Relative beta below which the Krylov space is invariant
LANCZOS_RESTART_KEEP = 4           # Ritz vectors carried over a thick restart

# --- Exact Diagonalization Guards ---
ED_MAX_DIM = 2 ** 16               # d**N above this is refused (desk scale)
ED_DENSE_LIMIT = 1024              # Dense eigensolver up to this dimension, sparse eigsh above
ED_FULL_SPECTRUM_MAX_DIM = 4096    # Largest dimension diagonalized densely when k >= dim - 1

# --- Model Defaults ---
HARMONIC_D_LEVELS = 8              # Default oscillator truncation (number states per site)
HARMONIC_OMEGA = 1.0               # Frequency of the ladder-operator basis

# --- Information Geometry ---
PROB_TOL = 1e-12                   # Normalization tolerance for ProbDist
CLI_PROB_TOL = 1e-9                # Normalization tolerance for distributions given on the CLI
FD_STEP_GRADIENT = 1e-5            # Central-difference step for Fisher matrices
FD_STEP_HESSIAN = 1e-4             # Central-difference step for divergence Hessians

# --- Angular Quantization ---
MASS_FLOOR = 1e-6                  # Replaces mass = 0 (the zero mode makes K singular)
NU_UNENTANGLED = 1e-12             # Symplectic eigenvalues with nu - 1/2 below this are dropped
QUAD_TOL = 1e-10                   # Relative tolerance of the K_{i ell} quadrature
QUAD_ABS_FACTOR = 1e-3             # Absolute tolerance = QUAD_TOL * QUAD_ABS_FACTOR
QUAD_LIMIT = 2000                  # Maximum number of quadrature subintervals
QUAD_DECAY = 40.0                  # Integrand is cut where x (cosh t - 1) exceeds this + ln(1/tol)

# --- Corner Transfer Matrix ---
CTM_MAX_INTERIOR_SPINS = 16        # Guard: L*L interior spins per quadrant
ISING_MAX_SPINS = 25               # Guard for the full-lattice enumeration oracle
CTM_BRUTE_FORCE_MAX_SPINS = 16     # The ctm command cross-checks Z by enumeration up to this size

# --- Command Defaults ---
DMRG_DEFAULTS = {
    "model": "tfim",               # Chain model name
    "g": 1.0,                      # Transverse field (tfim)
    "jz": 1.0,                     # Anisotropy (heisenberg)
    "mass": 1.0,                   # Oscillator mass (harmonic)
    "d_levels": HARMONIC_D_LEVELS, # Oscillator truncation (harmonic)
    "m_max": 20,                   # Retained block states
    "iters": 60,                   # Maximum infinite-DMRG iterations
    "tol": 1e-8,                   # Energy-per-site convergence threshold
    "targets": 1,                  # Number of superblock states in the density matrix
}

ANGULAR_DEFAULTS = {
    "ell": 8.0,                    # Angular frequency of the wave
    "mass": 1.0,                   # Field mass
    "xmin": 0.01,                  # Smallest sample position
    "xmax": 20.0,                  # Largest sample position
    "n": 2000,                     # Number of log-spaced samples
    "sites": 64,                   # Chain length for the half-chain spectrum
    "cut": 32,                     # Number of sites in the kept half
    "modes": 8,                    # Modes used to enumerate rho eigenvalues (capped at the cut)
    "cutoff": 12,                  # Maximum total quanta in the enumeration
}

CTM_DEFAULTS = {
    "L": 1,                        # Spins per semiaxis (origin excluded)
    "beta_j": 0.4,                 # Dimensionless coupling K = beta J
    "boundary": "free",            # Outer rim spins: free or fixed (+1)
}
