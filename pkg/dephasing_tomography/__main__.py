"""
Main entry point for the Dephasing Tomography package.
This allows the package to be run as a module: python -m dephasing_tomography
"""
import sys
from dephasing_tomography.cli import main

if __name__ == "__main__":
    sys.exit(main())
