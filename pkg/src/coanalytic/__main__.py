import sys

from coanalytic.cli import main

sys.exit(main())
