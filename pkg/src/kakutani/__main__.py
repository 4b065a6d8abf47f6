"""Allows ``python -m kakutani``."""

import sys

from .cli import main

sys.exit(main())
