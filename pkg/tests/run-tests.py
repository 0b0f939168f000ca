"""
run-tests.py - Test Runner Script

Convenience wrapper around pytest; extra arguments are passed through.

Usage:
    python tests/run-tests.py              # whole suite, default hypothesis profile
    python tests/run-tests.py --ci         # hypothesis "ci" profile (more examples)
    python tests/run-tests.py -k analysis  # any pytest option
"""

import os
import sys
from pathlib import Path

import pytest


def run_all_tests(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    if "--ci" in argv:
        argv.remove("--ci")
        os.environ["HYPOTHESIS_PROFILE"] = "ci"

    print("\n" + "=" * 60)
    print(" " * 20 + "TEST SUITE")
    print("=" * 60)

    exit_code = pytest.main([str(Path(__file__).parent), *argv])

    print("=" * 60)
    if exit_code == 0:
        print("[PASS] ALL TESTS PASSED")
    else:
        print("[FAIL] SOME TESTS FAILED")
    return int(exit_code)


if __name__ == "__main__":
    sys.exit(run_all_tests())
