import os
from pathlib import Path
from dotenv import load_dotenv

load_dotenv()

ROOT_DIR = Path(__file__).resolve().parent.parent
FIXTURES_DIR = Path(os.getenv("SPHERIK_FIXTURES_DIR") or ROOT_DIR / "fixtures")

LOG_LEVEL = os.getenv("SPHERIK_LOG_LEVEL", "WARNING").upper()

# Numeric search layers
TOLERANCE = float(os.getenv("SPHERIK_TOLERANCE") or 1e-9)
SEARCH_RESTARTS = int(os.getenv("SPHERIK_SEARCH_RESTARTS") or 8)
SEARCH_MAXITER = int(os.getenv("SPHERIK_SEARCH_MAXITER") or 400)
RATIONALIZE_DENOMINATOR = int(os.getenv("SPHERIK_RATIONALIZE_DENOMINATOR") or 720)
QUADRATURE_POINTS = int(os.getenv("SPHERIK_QUADRATURE_POINTS") or 4096)
TORIC_ANGLES = int(os.getenv("SPHERIK_TORIC_ANGLES") or 72)
TORIC_OFFSETS = int(os.getenv("SPHERIK_TORIC_OFFSETS") or 19)

# Hilbert oracle
HILBERT_POINT_BUDGET = int(os.getenv("SPHERIK_HILBERT_POINT_BUDGET") or 2_000_000)

# Search-run ledger
DATABASE_URL = os.getenv("SPHERIK_DATABASE_URL", "sqlite:///spherik.db")
RECORD_RUNS = (os.getenv("SPHERIK_RECORD_RUNS") or "").lower() in ("1", "true", "yes")

EXIT_EXISTS = 0
EXIT_NOT_EXISTS = 1
EXIT_INDETERMINATE = 2
EXIT_USAGE = 64
EXIT_INPUT = 65
EXIT_NO_INPUT = 66
EXIT_INTERNAL = 70
