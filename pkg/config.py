"""
Global configuration for the metalens surrogate toolkit.

Module-level defaults live here instead of being scattered across packages.
Every value can be overridden per run through the JSON run config
(see lensctl/runconfig.py); the defaults below are what an empty config gets.
"""

# Run config schema version; bump when a section changes shape.
RUN_CONFIG_SCHEMA_VERSION = 1

DEFAULT_MASTER_SEED = 1337

# Unit cell family (nm). The three presets are derived from these.
CELL_PERIOD_NM = 400.0
CELL_LAYER_COUNT = 10
CELL_HOLE_HEIGHT_NM = 304.0
CELL_SMALL_HOLE_HEIGHT_NM = 61.0
CELL_SPACER_HEIGHT_NM = 140.0
CELL_WIDTH_MIN_NM = 60.0
CELL_WIDTH_MAX_NM = 340.0
N_SILICA = 1.45
N_AIR = 1.0

# Design wavelengths (nm)
WAVELENGTH_BLUE_NM = 405.0
WAVELENGTH_GREEN_NM = 540.0
WAVELENGTH_RED_NM = 810.0

# FDFD defaults
FDFD_PIXELS_PER_PERIOD = 40  # 10 nm on the 400 nm cells, 1 nm on the 40 nm cell
FDFD_PML_WAVELENGTHS = 0.5
FDFD_PML_REFLECTION = 1e-7
FDFD_PML_POWER = 3
FDFD_PADDING_WAVELENGTHS = 1.0
FDFD_MONITOR_WAVELENGTHS = 0.5
FDFD_MIN_HOLE_PIXELS = 2
FDFD_SUBPIXEL = True  # area-averaged permittivity in columns cut by a hole wall
FDFD_RESIDUAL_TOL = 1e-8
FDFD_TOL_ENERGY = 1e-2

# Network / training
NN_INPUT_SIZE = 13
NN_HIDDEN = (256, 256, 256)
NN_TANH_SCALE = 2.0
NN_SIGMA_FLOOR = 1e-6
TRAIN_EPOCHS = 50
TRAIN_BATCH_SIZE = 128
TRAIN_LR0 = 1e-3
TRAIN_DECAY = 0.99
TRAIN_DECAY_START_EPOCH = 10
ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8

# Ensemble
ENSEMBLE_MEMBERS = 5

# Active learning
AL_N_INIT = 2000
AL_OVERSAMPLING = 4
AL_K = 500
AL_ITERATIONS = 9
AL_TEST_SIZE = 2000
AL_MAX_RESAMPLE_ROUNDS = 100

# Chebyshev
CHEB_NODE_CAP = 2**21  # admits 4**10 = 1048576 nodes
CHEB_POINTS_PER_DIM = 3

# Metalens design (µm)
DESIGN_N_CELLS = 10
DESIGN_FOCAL_Y_UM = 60.0
DESIGN_FOCAL_X_UM = {"blue": -10.0, "green": 0.0, "red": 10.0}
DESIGN_LINE_HALF_WIDTH_UM = 20.0
DESIGN_LINE_SAMPLES = 401
DESIGN_STEP = 0.05
DESIGN_ITERATIONS = 200
DESIGN_BETA_START = 10.0
DESIGN_BETA_END = 1e3

# Synthetic oracle constants (SYNTHETIC, not physical).
# t(p) = exp(i*pi*<c, w>) * (0.6 + 0.4*cos(pi*<a, w>)) on normalized widths w.
SYNTHETIC_ORACLE_CONSTANTS = {
    "blue": {
        "c": [0.35, -0.20, 0.15, 0.30, -0.25, 0.10, 0.20, -0.15, 0.25, -0.30],
        "a": [0.30, 0.25, -0.20, 0.15, 0.35, -0.30, 0.10, 0.20, -0.25, 0.15],
    },
    "green": {
        "c": [-0.25, 0.30, 0.20, -0.10, 0.15, 0.35, -0.30, 0.25, -0.20, 0.10],
        "a": [0.20, -0.35, 0.25, 0.30, -0.15, 0.10, 0.25, -0.20, 0.30, -0.10],
    },
    "red": {
        "c": [0.15, 0.25, -0.35, 0.20, 0.30, -0.10, 0.15, 0.30, -0.25, 0.20],
        "a": [-0.25, 0.15, 0.30, -0.20, 0.25, 0.35, -0.15, 0.10, 0.20, 0.30],
    },
}
