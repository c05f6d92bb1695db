import os
import sys
from pathlib import Path

# Installed wheels put _lcdiag on sys.path already; in-tree runs find it in
# the CMake build directory.
_build = os.environ.get("LCDIAG_BUILD_DIR", Path(__file__).parents[2] / "build")
if Path(_build).is_dir():
    sys.path.insert(0, str(_build))
