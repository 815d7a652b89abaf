"""Top-level package for LSPlus, exact LS+ certificates of graphs."""

import os
import sys
import warnings

from .certify import (
    CertificatePackage,
    VerificationReport,
    load_package,
    save_package,
    verify_package,
    verify_rank_certificate,
)
from .graphs import Graph, graph6_decode, graph6_encode
from .polytope import Inequality
from .rankbounds import rank_upper_bound
from .storage import PackageArchive
from .synthesize import assemble_package, uvw_synthesize

from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version(__name__)
except PackageNotFoundError:
    try:
        from .version import version as __version__
    except ImportError:
        raise ImportError(
            "Failed to find (autogenerated) version.py. "
            "This might be because you are installing from GitHub's tarballs, "
            "use the PyPI ones."
        )

# Recent OSX requires this environment variable to run parallel processes
if sys.platform == "darwin":
    if os.environ.get("OBJC_DISABLE_INITIALIZE_FORK_SAFETY") != "YES":
        msg = "You might require OBJC_DISABLE_INITIALIZE_FORK_SAFETY=YES"
        warnings.warn(msg, RuntimeWarning)

__all__ = (
    "CertificatePackage",
    "Graph",
    "Inequality",
    "PackageArchive",
    "VerificationReport",
    "assemble_package",
    "backend",
    "graph6_decode",
    "graph6_encode",
    "load_package",
    "rank_upper_bound",
    "save_package",
    "uvw_synthesize",
    "verify_package",
    "verify_rank_certificate",
)
