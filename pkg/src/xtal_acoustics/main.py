import sys

from xtal_acoustics.cli import main


def run():
    """Console entry point for `xtal`."""
    sys.exit(main())


if __name__ == "__main__":
    run()
