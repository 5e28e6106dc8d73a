"""
Settings for the tempered project.

Values are read from the environment (and from a ``.env`` file in the working
directory, if present) once at import time. The module doubles as the Django
settings module: the file formats are handled by Django REST framework
serializers, which need a configured Django to build their error messages.
"""
import os
from dotenv import load_dotenv

load_dotenv()

BASE_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


def env_float(name: str, default: float) -> float:
    """
    Reads a float from the environment.

    Args:
        name (str): Environment variable name.
        default (float): Value used when the variable is unset or empty.

    Returns:
        float: The parsed value.
    """
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    return float(raw)


def env_int(name: str, default: int) -> int:
    """
    Reads an integer from the environment.

    Args:
        name (str): Environment variable name.
        default (int): Value used when the variable is unset or empty.

    Returns:
        int: The parsed value.
    """
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    return int(raw)


# Solver
SDP_TOL = env_float("TB_SDP_TOL", 1e-8)
SDP_MAX_ITER = env_int("TB_SDP_MAX_ITER", 200)
SDP_DIVERGENCE_BOUND = env_float("TB_SDP_DIVERGENCE", 1e10)
# a stalled solve may still be certified at this looser tolerance
SDP_ACCEPT_TOL = env_float("TB_SDP_ACCEPT_TOL", 1e-6)
# columns of the Schur complement assembled per batch
SDP_SCHUR_BATCH = env_int("TB_SDP_SCHUR_BATCH", 256)

# Numerical tolerances
HERMITIAN_TOL = 1e-12
STATE_TOL = 1e-10
CHANNEL_TOL = 1e-9
KRAUS_CUTOFF = 1e-12
ANCHOR_RANK_TOL = 1e-9
PRIMAL_DUAL_MATCH_TOL = 1e-6
WITNESS_TOL = 1e-8

# Seesaw defaults
TEMPER_SEED = 0x7E3BE2
SEESAW_RESTARTS = env_int("TB_SEESAW_RESTARTS", 8)
SEESAW_MAX_ROUNDS = env_int("TB_SEESAW_ROUNDS", 20)
SEESAW_INNER_TOL = 1e-8

# Logging
LOG_FILE = os.getenv("TB_LOG_FILE", os.path.join(BASE_DIR, "tempered.log"))
LOG_TO_FILE = os.getenv("TB_LOG_TO_FILE", "False") == "True"
LOG_LEVEL = os.getenv("TB_LOG_LEVEL", "WARNING").upper()

# Tests
RUN_SLOW_TESTS = os.getenv("TB_RUN_SLOW", "False") == "True"

# Django and REST framework
SECRET_KEY = os.getenv("TB_SECRET_KEY", "tempered-cli-only")
DEBUG = False
INSTALLED_APPS = [
    "rest_framework",
]
DATABASES: dict = {}
USE_I18N = False
USE_TZ = True
TIME_ZONE = "UTC"
REST_FRAMEWORK = {
    "STRICT_JSON": True,
    "UNICODE_JSON": True,
}
