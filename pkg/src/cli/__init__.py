"""
Separability-probability command line

Entry Point:
    python -m src.cli estimate --measure hs --points 20000000

Components:
    - orchestrator: argument parsing, run configuration and exit codes
"""

from .orchestrator import main, run_estimate, run_verify

__all__ = ['main', 'run_estimate', 'run_verify']
