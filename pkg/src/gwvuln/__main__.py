import sys

from gwvuln.cli import main

sys.exit(main())
