#!/usr/bin/env python
import logging
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from src.hermqv.commands import main  # noqa: E402

logger = logging.getLogger(__name__)

if __name__ == "__main__":
    sys.exit(main(prog="run.py"))
