"""Configuration constants for the Boussinesq asymptotics toolkit."""

from __future__ import annotations

import math

# --- Kinematics ---
ZETA_MAX: float = 1.0 / math.sqrt(3.0)
UNIT_CIRCLE_RTOL: float = 1e-10
EXP_LOG_MAX: float = 700.0  # largest real exponent handed to exp
K_ZERO_TOL: float = 1e-14
POLE_TOL: float = 1e-12
BRANCH_CUT_TOL: float = 1e-12
SADDLE_PROXIMITY_WARN: float = 0.02
SADDLE_FD_STEP: float = 1e-6

# --- Scattering march ---
VOLTERRA_STEP: float = 0.02
VOLTERRA_TOL: float = 1e-8
VOLTERRA_MAX_HALVINGS: int = 3
VOLTERRA_MIN_STEPS: int = 8
DET_P_MIN: float = 1e-10
S11_MIN: float = 1e-12
QHAT_EXCLUSION: float = 1e-3
LIMIT_SAMPLE_STEPS: tuple[float, float, float] = (4e-3, 2e-3, 1e-3)
GENERIC_LIMIT_MIN: float = 1e-8
ASSUMPTION_III_TOL: float = 1e-10

# --- Spectral grids ---
CIRCLE_NODES_PER_ARC: int = 48
RAY_NODES: int = 32
RAY_K_MAX: float = 8.0
SEGMENT_NODES: int = 16
SEGMENT_MIN_MODULUS: float = 0.2
VANISHING_ORDER_STEPS: tuple[float, ...] = (1e-2, 5e-3, 2.5e-3, 1.25e-3)

# --- Quadrature ---
QUAD_EPSABS: float = 1e-13
QUAD_EPSREL: float = 1e-11
QUAD_LIMIT: int = 4000
NEAR_ARC_DISTANCE: float = 0.05
NEAR_CONTOUR_MIN: float = 1e-10
ARC_SPLINE_NODES: int = 801
LOG_ARG_FLOOR: float = 1e-300

# --- Regularization ---
EPSILON_SCHEDULE: tuple[float, float, float] = (1e-2, 1e-3, 1e-4)
REGULARIZATION_RTOL: float = 1e-6
SIGN_CONDITION_RTOL: float = 1e-8
ENDPOINT_TOL: float = 1e-9

# --- Parabolic cylinder ---
PCF_CROSSOVER: float = 6.0
PCF_OVERLAP: tuple[float, float] = (5.5, 6.5)
PCF_MATCH_TOL: float = 1e-8
PCF_DPS: int = 40
PCF_ASYMPTOTIC_MAX_TERMS: int = 60
PCF_MAX_ORDER: float = 10.0

# --- Model problems ---
CROSS_ANGLE_TOL: float = 1e-12
MODEL_CONSTRAINT_TOL: float = 1e-12
MX_LARGE_Z_RADII: tuple[float, float] = (50.0, 200.0)
PSI_JUMP_POINTS: tuple[float, ...] = (-2.0, -1.0, 1.0, 2.0)

# --- Verification tolerances ---
TOL_SYMMETRY: float = 1e-9
TOL_FACTORIZATION: float = 1e-8
TOL_COEFFICIENT: float = 1e-10
TOL_DETERMINANT: float = 1e-10
TOL_JUMP_RATIO: float = 1e-6
TOL_D10_MODULUS: float = 1e-8
TOL_D20_MODULUS: float = 1e-6
TOL_REPRESENTATION: float = 1e-7
TOL_BETA: float = 1e-12
TOL_GAMMA: float = 1e-12
TOL_PSI_JUMP: float = 1e-7
TOL_MX_JUMP: float = 1e-7
TOL_MX_LARGE_Z: float = 1e-3
TOL_ADMISSIBILITY: float = 1e-9
TOL_AMPLITUDE_IMAG: float = 1e-9
TOL_PHASE_INCREMENT: float = 1e-8
TOL_V1S_REPORT: float = 1e-8
TOL_SADDLE: float = 1e-8
NU_NEGATIVE_TOL: float = 1e-12
JUMP_EXCLUSION_RADIUS: float = 1e-2
BOUNDARY_OFFSET: float = 1e-7
MX_NORMAL_OFFSET: float = 1e-6

# --- Verification sampling ---
VERIFY_ZETAS: tuple[float, ...] = (0.3,)
VERIFY_T_LIST: tuple[float, ...] = (10.0, 100.0, 1000.0)
VERIFY_X: float = 0.3
VERIFY_T: float = 1.0
VERIFY_ARC_POINTS: int = 8
VERIFY_LENS_POINTS: int = 12
VERIFY_CIRCLE_DEG: tuple[float, ...] = (15.0, 40.0, 75.0, 100.0, 140.0, 165.0, 200.0, 255.0, 285.0, 340.0)
VERIFY_RAY_RADII: tuple[float, ...] = (0.5, 2.0)
VERIFY_OFF_CIRCLE: tuple[complex, ...] = (0.5 * 1j + 0.2, -0.3 + 0.4j, 1.7 + 0.9j, -1.6 - 0.5j, 0.4 - 0.7j)
MODEL1_SAMPLE_Q: complex = 0.6 * complex(math.cos(1.1), math.sin(1.1))
MODEL2_SAMPLE_Q: tuple[complex, complex, complex] = (0.3 + 0.2j, 0.25 - 0.1j, 0.35 + 0.15j)
DEFECT_THETA_DEG: float = 40.0
DEFECT_EPS: float = 1e-3

# --- Synthetic spectral families ---
SINGLE_LOBE_HALF_WIDTH_DEG: float = 52.0
SINGLE_LOBE_AMPLITUDE: float = 1.0
TWO_LOBE_SUPPORT_DEG: tuple[tuple[float, float], ...] = ((20.0, 55.0), (121.0, 137.0))
TWO_LOBE_AMPLITUDES: tuple[float, ...] = (0.6, 0.7)
PHASE_SLOPE: float = 0.8
PHASE_WIGGLE: float = 0.3
RAY_BUMP_AMPLITUDE: float = 0.25
RAY_BUMP_RATE: float = 1.0
PERTURBATION_WIDTH_DEG: float = 2.0

# --- Initial-data presets ---
DEFAULT_X_SUPPORT: tuple[float, float] = (-12.0, 12.0)
DEFAULT_N_SAMPLES: int = 1201
TAIL_TOL: float = 1e-10
GAUSSIAN_DEFAULTS: dict[str, float] = {"amplitude": 0.5, "width": 1.0, "velocity": 0.3}
SECH2_DEFAULTS: dict[str, float] = {"amplitude": 0.5, "width": 1.0, "velocity": 0.3}

# --- Asymptotics ---
T_MIN: float = 2.0
DEFAULT_ZETA_INTERVAL: tuple[float, float] = (0.1, 0.5)
DEFAULT_ZETA_COUNT: int = 5
DEFAULT_T_LIST: tuple[float, ...] = (10.0, 100.0, 1000.0)
ERROR_ORDER: str = "ln t / t"
DEFECT_FRACTION_LIMIT: float = 0.10

# --- Output ---
SCHEMA_VERSION: str = "1"
CSV_FLOAT_FORMAT: str = "%.12e"
RESULT_COLUMNS: tuple[str, ...] = (
    "zeta",
    "t",
    "x",
    "u_leading",
    "A1",
    "A2",
    "alpha1",
    "alpha2",
    "nu1",
    "nu_hat2",
)
DEFECT_COLUMNS: tuple[str, ...] = ("zeta", "t", "error", "message")
RESULT_FILENAME: str = "asymptotics.csv"
DEFECT_FILENAME: str = "defects.csv"
META_FILENAME: str = "meta.json"
PLOT_SCRIPT_FILENAME: str = "plot_asymptotics.py"
CACHE_FILENAME: str = "spectral_cache.json"
ASSUMPTION_REPORT_FILENAME: str = "assumptions.json"
VERIFY_REPORT_FILENAME: str = "verification.json"
MODEL_RHP_REPORT_FILENAME: str = "model_rhp.json"
BUNDLE_FILENAME: str = "bundles.json"
