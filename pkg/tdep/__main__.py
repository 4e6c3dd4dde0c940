"""Entry point of python -m tdep"""

import sys

from .cli import main

sys.exit(main())
