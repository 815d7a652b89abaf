"""Store and manage certificate bundles

An archive is a directory of bundles, one sub-directory per package.
"""

import logging
import os
from typing import Optional

import pandas as pd

from .certify import (
    BundleError,
    CertificatePackage,
    load_package,
    package_graph,
    save_package,
    verify_package,
    verify_rank_certificate,
)
from .graphs import Graph
from .polytope import Inequality

# Backends and layouts are reachable from here as well
from .backend import BaseStorage, BundleLayout, FileSystem, InMemory  # noqa


module_logger = logging.getLogger("LSPlus.storage")


class PackageArchive:
    """A collection of certificate bundles in a directory

    Examples
    --------
    >>> archive = PackageArchive("./certificates", create=True)
    >>> archive["stretched_k4"] = pkg
    >>> archive.check("stretched_k4").accepted
    True
    """

    logger = logging.getLogger("LSPlus.storage.PackageArchive")

    def __init__(
        self,
        root: str,
        layout: Optional[BundleLayout] = None,
        create: bool = False,
    ):
        """Initializes PackageArchive

        Parameters
        ----------
        root : str
            Directory holding one sub-directory per bundle.
        layout : BundleLayout, optional
            File naming inside each bundle.
        create : bool, optional
            Create the root directory if missing, otherwise it must exist.
        """
        self.logger.debug(f"Using PackageArchive at: {root}")
        if create:
            os.makedirs(root, exist_ok=True)
        if not os.path.isdir(root):
            self.logger.critical(f"Invalid path for PackageArchive {root}")
            raise FileNotFoundError(root)
        self.root = os.path.abspath(root)
        self.layout = layout if layout is not None else BundleLayout()

    def path(self, name: str) -> str:
        if (not name) or (os.sep in name):
            raise ValueError(f"Invalid bundle name: {name!r}")
        return os.path.join(self.root, name)

    def __contains__(self, name: str):
        try:
            manifest = os.path.join(self.path(name), self.layout.manifest)
        except ValueError:
            return False
        return os.path.exists(manifest)

    def __getitem__(self, name: str) -> CertificatePackage:
        if name not in self:
            self.logger.debug(f"{name} is not in the archive")
            raise KeyError(name)
        return load_package(self.path(name), layout=self.layout)

    def __setitem__(self, name: str, pkg: CertificatePackage):
        self.logger.debug(f"Saving bundle: {name}")
        save_package(pkg, self.path(name), layout=self.layout)

    def __iter__(self):
        for name in sorted(os.listdir(self.root)):
            if name in self:
                yield name

    def check(
        self,
        name: str,
        graph: Optional[Graph] = None,
        inequality: Optional[Inequality] = None,
        npes: Optional[int] = None,
    ):
        """Verify one bundle

        The graph and the inequality default to the ones recorded in the
        manifest. With an inequality the rank certificate is verified,
        otherwise only the package.
        """
        pkg = self[name]
        if graph is None:
            graph = package_graph(pkg)
        if inequality is None:
            inequality = pkg.inequality
        if inequality is None:
            report = verify_package(graph, pkg, npes=npes)
        else:
            report = verify_rank_certificate(graph, inequality, pkg, npes=npes)
        self.logger.info(
            f"{name}: {'accepted' if report.accepted else 'rejected'}"
        )
        return report

    def summary(self, npes: Optional[int] = None) -> pd.DataFrame:
        """One row per bundle: name, level, n, accepted and failure codes

        Bundles that cannot be loaded are listed with their error instead.
        """
        rows = []
        for name in self:
            row = {
                "name": name,
                "level": None,
                "n": None,
                "accepted": False,
                "codes": "",
                "error": None,
            }
            try:
                report = self.check(name, npes=npes)
            except (BundleError, ValueError) as err:
                self.logger.warning(f"Skipping {name}: {err}")
                row["error"] = str(err)
            else:
                row.update(
                    level=report.level,
                    n=self[name].n,
                    accepted=report.accepted,
                    codes=" ".join(c.name for c in report.codes()),
                )
            rows.append(row)
        return pd.DataFrame(
            rows, columns=["name", "level", "n", "accepted", "codes", "error"]
        )
