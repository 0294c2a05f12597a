"""
Allows running the command line interface as ``python -m szm``.
"""
import sys
from szm.cli import main

if __name__ == "__main__":
    sys.exit(main())
