import os
import subprocess
from datetime import datetime


# Parallelism
BTL_MAX_THREADS = max(1, int(os.environ.get("BTL_MAX_THREADS", "4")))

# Linear solver
BTL_CG_RTOL = float(os.environ.get("BTL_CG_RTOL", "1e-11"))
BTL_CG_MAXITER_FACTOR = int(os.environ.get("BTL_CG_MAXITER_FACTOR", "50"))
BTL_RESIDUAL_LIMIT = float(os.environ.get("BTL_RESIDUAL_LIMIT", "1e-10"))
BTL_DENSE_FALLBACK_NODES = int(os.environ.get("BTL_DENSE_FALLBACK_NODES", "200"))
BTL_STEKLOV_RTOL = float(os.environ.get("BTL_STEKLOV_RTOL", "1e-10"))
BTL_STEKLOV_MAX_ITERATIONS = int(os.environ.get("BTL_STEKLOV_MAX_ITERATIONS", "2000"))

# Meshing
BTL_MIN_ANGLE_DEG = float(os.environ.get("BTL_MIN_ANGLE_DEG", "1.0"))
BTL_MAX_LEVEL = int(os.environ.get("BTL_MAX_LEVEL", "8"))
BTL_DEFAULT_SEGMENTS = int(os.environ.get("BTL_DEFAULT_SEGMENTS", "64"))

# Verdict tolerances
BTL_EXACT_TOLERANCE = float(os.environ.get("BTL_EXACT_TOLERANCE", "1e-8"))
BTL_FEM_TOLERANCE = float(os.environ.get("BTL_FEM_TOLERANCE", "0.02"))

# Run log (disabled unless a URL is configured)
BTL_DATABASE_URL = os.environ.get("BTL_DATABASE_URL")


def get_build_number() -> str:
    """Get build number from environment or generate from git/timestamp."""
    env_build = os.environ.get("BUILD_NUMBER")
    if env_build:
        return env_build

    try:
        git_hash = subprocess.check_output(
            ["git", "rev-parse", "--short", "HEAD"],
            stderr=subprocess.DEVNULL
        ).decode("utf-8").strip()
        return f"git-{git_hash}"
    except Exception:
        pass

    return f"build-{datetime.now().strftime('%Y%m%d-%H%M%S')}"


BUILD_NUMBER = get_build_number()
