"""
Configuration settings for the ReachTAMP toolkit.
Handles environment variables and planner defaults.
"""

import os
import logging
from pathlib import Path
from dotenv import load_dotenv

# Load environment variables
load_dotenv()

# Base directories
BASE_DIR = Path(__file__).resolve().parent.parent
LOGS_DIR = Path(os.getenv('REACHTAMP_LOG_DIR', BASE_DIR / 'logs'))
OUTPUT_DIR = Path(os.getenv('REACHTAMP_OUTPUT_DIR', BASE_DIR / 'results'))

# Logging
LOG_LEVEL = os.getenv('REACHTAMP_LOG_LEVEL', 'INFO').upper()

# Search hyperparameters
K_SS = 2
K_GOAL = 10
EPSILON = 0.5
TERMINATE_PROB = 0.2
DEFAULT_TIMEOUT = 60.0  # seconds
TRIAL_GRACE = 10.0  # seconds on top of the cooperative budget

# Symbolic planner
PLANNER_NODE_BUDGET = 200_000

# Motion planner
MP_STEP = 0.15  # radians
MP_CHECK_RESOLUTION = 0.02
MP_MAX_ITERATIONS = 3000

# Kinematics
IK_MAX_ITERATIONS = 200
IK_RESTARTS = 20
IK_DAMPING = 0.1
IK_POSITION_TOLERANCE = 1e-4  # meters
IK_ANGLE_TOLERANCE = 1e-3  # radians

# Samplers
ATTACHMENT_DRAWS = 50
GOAL_CONFIG_TRIES = 20
TRANSITION_SEEDS = 20

# Collision
CONTACT_MARGIN = 1e-6  # meters

# Benchmarks
DEFAULT_TRIALS = 30
REGION_MARGIN = 0.10
DIRECT_PLAN_ATTEMPTS = 50


def validate_config():
    """
    Validate that the configuration read from the environment is usable.
    """
    from reachtamp.utils.exceptions import ConfigurationError

    if not isinstance(logging.getLevelName(LOG_LEVEL), int):
        raise ConfigurationError(
            f"Invalid REACHTAMP_LOG_LEVEL '{LOG_LEVEL}'. "
            "Use one of DEBUG, INFO, WARNING, ERROR, CRITICAL"
        )
