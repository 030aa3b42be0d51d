"""Module to create the package logger and to set its verbosity from the CLI"""
import logging

LOGGER = logging.getLogger("degroot-influence")
LOGGER.addHandler(logging.NullHandler())


def set_verbosity(verbose=False, quiet=False):
    """debug when verbose, errors only when quiet, info otherwise"""
    logging.basicConfig()
    if verbose:
        LOGGER.setLevel(logging.DEBUG)
    elif quiet:
        LOGGER.setLevel(logging.ERROR)
    else:
        LOGGER.setLevel(logging.INFO)
