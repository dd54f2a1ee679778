import os
from dotenv import load_dotenv

load_dotenv()

# Library-level defaults; the Flask config below reads the same values from the environment.
ORACLE_CAP = 4096
CHOI_CAP = 20000
TOL_EXACT = 1e-12
TOL_SUM = 1e-10
TIE_RTOL = 1e-9


class Config:
    ORACLE_CAP = int(os.getenv("CLONER_ORACLE_CAP", ORACLE_CAP))
    CHOI_CAP = int(os.getenv("CLONER_CHOI_CAP", CHOI_CAP))
    TOL_EXACT = float(os.getenv("CLONER_TOL_EXACT", TOL_EXACT))
    TOL_SUM = float(os.getenv("CLONER_TOL_SUM", TOL_SUM))
    TIE_RTOL = float(os.getenv("CLONER_TIE_RTOL", TIE_RTOL))
    DEFAULT_SEED = int(os.getenv("CLONER_DEFAULT_SEED", 0))
    MAX_SWEEP_K = int(os.getenv("CLONER_MAX_SWEEP_K", 100000))
    LOG_LEVEL = os.getenv("CLONER_LOG_LEVEL", "INFO")
    VERIFY_RATE_LIMIT = os.getenv("CLONER_VERIFY_RATE_LIMIT", "10 per minute")
    RATELIMIT_STORAGE_URI = os.getenv("RATELIMIT_STORAGE_URI", "memory://")
    RATELIMIT_ENABLED = os.getenv("RATELIMIT_ENABLED", "True") == "True"


class TestingConfig(Config):
    TESTING = True
    RATELIMIT_ENABLED = False
    LOG_LEVEL = "WARNING"
