"""
Separability CLI entry point

Allows running estimation and verification via:
    python -m src.cli [command] [args]
"""

import sys

from .orchestrator import main

if __name__ == "__main__":
    sys.exit(main())
