#!/usr/bin/env python
"""Command-line utility for the tempered monotones."""


def main():
    """Run the command-line interface."""
    try:
        from commands.cli import cli
    except ImportError as exc:
        raise ImportError(
            "Couldn't import the command line. Are numpy, scipy and click "
            "installed and available on your PYTHONPATH environment variable? "
            "Did you forget to activate a virtual environment?"
        ) from exc
    cli(prog_name="manage.py")


if __name__ == '__main__':
    main()
