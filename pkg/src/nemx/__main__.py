import sys

from nemx.cli import main

sys.exit(main())
