"""Miscellaneous utils such as configuration and parallel evaluation
"""

from concurrent.futures import ThreadPoolExecutor
import configparser
import logging
import os


module_logger = logging.getLogger("LSPlus.utils")

try:
    from loky import ProcessPoolExecutor

    LOKY_AVAILABLE = True
    module_logger.debug("Will use package loky to evaluate in parallel.")
except ImportError:
    LOKY_AVAILABLE = False
    module_logger.info("Missing package loky. Falling back to threading.")


DEFAULTS = {
    "jobs": 1,
    "depth": 3,
    "denominator_bound": 10**6,
    "max_scaling_exponent": 64,
}


def lsplusrc():
    """Path to custom configuration

    Define the path to the user custom configuration, such as the default
    number of parallel jobs or the depth budget of the rank-bound engine.

    The default path is at the user's home directory .config/lsplus, but
    that can be modified by defining an environment variable LSPLUS_DIR.

    Example
    -------
    >>> import os.path
    >>> print(os.path.join(lsplusrc(), 'main.ini'))
    /home/user/.config/lsplus/main.ini
    """
    path = os.path.expanduser(os.getenv("LSPLUS_DIR", "~/.config/lsplus"))
    return path


def read_config(filename=None):
    """Read the user configuration over the built-in defaults

    Parameters
    ----------
    filename : str, optional
        An ini file with a section [LSPlus]. Default is main.ini inside
        `lsplusrc()`.

    Returns
    -------
    dict
        The keys of `DEFAULTS`, all integers.

    Examples
    --------
    >>> read_config()["depth"]
    3
    """
    if filename is None:
        filename = os.path.join(lsplusrc(), "main.ini")

    config = dict(DEFAULTS)
    if not os.path.exists(filename):
        module_logger.debug(f"No configuration file at {filename}")
        return config

    module_logger.debug(f"Reading configuration from {filename}")
    parser = configparser.ConfigParser()
    parser.read(filename)
    if parser.has_section("LSPlus"):
        for key in DEFAULTS:
            if parser.has_option("LSPlus", key):
                config[key] = parser.getint("LSPlus", key)
    for key, value in config.items():
        if value < 1:
            raise ValueError(f"Configuration {key} must be positive: {value}")
    return config


def parallel_map(func, items, npes=None):
    """Evaluate a pure function over a list, preserving order

    With more than one process available it uses loky's process pool, and
    falls back to threads when loky is missing. The result never depends on
    `npes`.

    Parameters
    ----------
    func : callable
        A picklable function of a single argument.
    items : iterable
        The arguments.
    npes : int, optional
        Number of maximum parallel jobs. None or 1 runs serially.

    Returns
    -------
    list
        [func(item) for item in items]
    """
    items = list(items)
    if (npes is None) or (npes <= 1) or (len(items) < 2):
        return [func(item) for item in items]

    if LOKY_AVAILABLE:
        module_logger.debug(f"Mapping {len(items)} items with loky ({npes})")
        executor = ProcessPoolExecutor(max_workers=npes)
    else:
        module_logger.debug(
            f"Mapping {len(items)} items with threading ({npes})"
        )
        executor = ThreadPoolExecutor(max_workers=npes)

    with executor:
        return list(executor.map(func, items))
