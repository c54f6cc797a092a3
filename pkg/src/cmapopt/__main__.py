import sys

from cmapopt.cli import main

sys.exit(main())
