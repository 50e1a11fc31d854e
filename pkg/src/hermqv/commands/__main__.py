import sys

from src.hermqv.commands import main

sys.exit(main(prog="python -m src.hermqv.commands"))
