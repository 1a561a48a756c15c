import sys

from modules.cli import run

if __name__ == '__main__':
    sys.exit(run.main())
