import os

from dotenv import load_dotenv

load_dotenv()

DEFAULT_TOL = float(os.getenv("QH_DEFAULT_TOL", "1e-10"))

# |tr| below this counts as zero for normalizations and ABL denominators
ZERO_THRESHOLD = float(os.getenv("QH_ZERO_THRESHOLD", "1e-12"))

# HM dimension cap for the CLI (total_dim = d**4)
MAX_D = int(os.getenv("QH_MAX_D", "8"))

LOG_LEVEL = os.getenv("QH_LOG_LEVEL", "WARNING").upper()

REPORT_SCHEMA_VERSION = "1.0.0"
SIGNIFICANT_DIGITS = 12
