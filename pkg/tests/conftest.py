import sys

import pytest


def pytest_configure(config):
    # keeps the plugin manager from loading setuptools entry points
    sys._called_from_test = True


def pytest_unconfigure(config):
    del sys._called_from_test


# argparse under-the-hood
def pytest_addoption(parser):
    parser.addoption(
        "--acceptance",
        action="store_true",
        default=False,
        help="run the desk-scale rate reproductions",
    )


def pytest_collection_modifyitems(config, items):
    if config.getoption("--acceptance"):
        return
    skip = pytest.mark.skip(reason="needs --acceptance")
    for item in items:
        if "acceptance" in item.keywords:
            item.add_marker(skip)
