"""``python3 -m gptaudit``."""

import sys

from .cli import main

sys.exit(main())
