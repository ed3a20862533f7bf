"""Allow ``python -m tailcovar``."""

import sys

from tailcovar.cli import main

sys.exit(main())
