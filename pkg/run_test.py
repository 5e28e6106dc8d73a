import os
import sys
import subprocess
import threading
import unittest
from typing import Optional
from logger_config import get_logger

logger = get_logger(__name__, "run_check.log")

APPS = ["linalg", "sdp", "states", "channels", "chmono", "commands"]


def input_with_timeout(prompt: str, timeout: int = 5) -> Optional[str]:
    """
    Prompts the user for input with a time limit.

    Args:
        prompt (str): Message shown to the user.
        timeout (int): Seconds to wait.

    Returns:
        Optional[str]: The answer, or None on timeout.
    """
    result = []

    def timed_input():
        result.append(input(prompt))

    thread = threading.Thread(target=timed_input, daemon=True)
    thread.start()
    thread.join(timeout)

    if result:
        return result[0].strip().lower()
    print("Time is up!")
    return None


def run_check(command: list[str]) -> bool:
    """
    Runs a checker and reports whether it succeeded.

    Args:
        command (list[str]): Command to execute.

    Returns:
        bool: True if it exited without errors.
    """
    try:
        subprocess.run(command, check=True)
        return True
    except (subprocess.CalledProcessError, FileNotFoundError):
        return False


def run_unit_tests(apps: list[str]) -> bool:
    """
    Discovers and runs the ``tests.py`` modules of the given apps.

    Args:
        apps (list[str]): App directories.

    Returns:
        bool: True if every test passed.
    """
    suite = unittest.TestSuite()
    loader = unittest.TestLoader()
    for app in apps:
        suite.addTests(loader.discover(app, pattern="tests.py", top_level_dir=os.getcwd()))
    result = unittest.TextTestRunner(verbosity=2).run(suite)
    if not result.wasSuccessful():
        logger.error("%d failures, %d errors in %s", len(result.failures),
                     len(result.errors), ", ".join(apps))
    return result.wasSuccessful()


def run_linter_or_type_checks(target: str):
    """
    Runs `mypy`, `pyright` and `pylint` in sequence.
    When a check fails, asks the user whether to go on.

    Args:
        target (str): File or app directory to check.
    """
    checkers = [("mypy", ["mypy", target]),
                ("pyright", ["pyright", target]),
                ("pylint", ["pylint", target])]

    for name, command in checkers:
        logger.info("Running %s...", name)
        if not run_check(command):
            logger.error("%s found problems in %s.", name, target)
            response = input_with_timeout("Continue with the next check? (yes/y/1 or no/n/0): ", 5)
            if response not in {"yes", "y", "1"}:
                print("Checks stopped.")
                return


def choose_app_and_run_checks():
    """
    Lets the user pick an app, runs its tests, then the static checks.
    """
    print("Available apps:")
    print("0: all")
    for i, app in enumerate(APPS, 1):
        print(f"{i}: {app}")

    try:
        choice = int(input("Choose an app by number: "))
        if choice < 0 or choice > len(APPS):
            raise ValueError
    except ValueError:
        logger.error("Invalid choice.")
        sys.exit(1)

    apps = APPS if choice == 0 else [APPS[choice - 1]]
    if not run_unit_tests(apps):
        response = input_with_timeout("Tests failed. Run the static checks anyway? "
                                      "(yes/y/1 or no/n/0): ", 5)
        if response not in {"yes", "y", "1"}:
            sys.exit(1)
    for app in apps:
        run_linter_or_type_checks(app)


def main():
    try:
        choose_app_and_run_checks()
    except KeyboardInterrupt:
        logger.error("Interrupted by the user.")
        sys.exit(1)


if __name__ == "__main__":
    main()
