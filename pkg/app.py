# app.py: mealy command line entry point
#
# PRINCIPLES:
# - Library-only: mealy/ holds every computation
# - app.py only forwards argv to mealy.cli.main and returns its exit code
#
# USAGE:
#   python app.py classify basilica
#   python app.py helix lamplighter -k 1 -n 1 --dot helix.dot
#   python app.py status
# =========================================================
from __future__ import annotations

from mealy.cli import main

if __name__ == "__main__":
    raise SystemExit(main())
