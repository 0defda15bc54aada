import sys

from surgery.main import main

sys.exit(main())
