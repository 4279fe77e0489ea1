"""Command-line entry: python hrrcalc.py <eval|hrr|chi-table|koszul|check> ..."""

import sys

from app.cli import main

if __name__ == '__main__':
    sys.exit(main(sys.argv[1:]))
