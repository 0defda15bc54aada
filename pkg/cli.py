"""
Launcher for the surgery toolkit.
"""

import sys

from surgery.main import main


if __name__ == "__main__":
    try:
        sys.exit(main())
    except KeyboardInterrupt:
        print("\nStopped!")
        sys.exit(1)
