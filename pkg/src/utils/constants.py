"""
Constants module for the golden-loss toolkit.

This module defines all tunable constants in one place for easy tuning,
including numeric tolerances, layer geometry, training defaults, and
file-format markers.
"""

# Loss domain
CLAMP_EPSILON = 1e-9  # Angular differences are clamped to [eps, pi/2 - eps]

# Image geometry
IMAGE_SIZE = 28  # Digits are 28x28 grayscale
NUM_CLASSES = 10

# Network geometry (convolution, batch norm, relu, dense, softmax)
CONV_FILTERS = 20
CONV_KERNEL = 5
BN_EPSILON = 1e-5  # Variance floor
BN_MOMENTUM = 0.1  # Weight of the current batch in the running stats

# Training defaults
DEFAULT_EPOCHS = 30
DEFAULT_BATCH_SIZE = 128
DEFAULT_FOLDS = 10
DEFAULT_REPEATS = 1
DEFAULT_SEED = 20200
DEFAULT_ANGLE_RANGE = 45.0  # Degrees, rotations drawn from [-range, range]
MAX_ROTATION_ANGLE = 45.0
DEFAULT_DATASET_SIZE = 10000  # 1000 digits per class
SSE_LEARNING_RATE = 0.01  # The "typical value" for plain gradient descent
SSE_MOMENTUM = 0.9

# Reports
SWEEP_POINTS = 1000
CSV_HEADER = ["loss", "momentum", "eta", "alpha", "epochs", "folds", "fold", "accuracy"]

# Binary containers
CHECKPOINT_MAGIC = b"GLNN"
CHECKPOINT_VERSION = 1
DATASET_MAGIC = b"GLDS"
DATASET_VERSION = 1
IDX_IMAGE_MAGIC = 0x00000803
IDX_LABEL_MAGIC = 0x00000801
GZIP_MAGIC = b"\x1f\x8b"

# Gradient checks
FD_STEP = 1e-6
LAYER_TOLERANCE = 1e-5
NETWORK_TOLERANCE = 1e-4

# Logging
LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"
LOG_LEVEL = "INFO"

# Debug settings
DEBUG_MODE = True  # Assert finite activations after every layer
