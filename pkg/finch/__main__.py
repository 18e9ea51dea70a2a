"""Entry point for ``python -m finch``"""
import sys

from .cli import main

sys.exit(main())
