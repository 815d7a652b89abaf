"""Store and manage certificate matrices

Different backends allow for different ways to keep the integer matrices of
a certificate package. Matrices are keyed by their id, such as ``Y``,
``M1_e_3``, ``M2_e_1_f_2`` or ``UVW_Y_U``.
"""

from abc import ABC
from collections import OrderedDict
from dataclasses import dataclass
import logging
import os
import re

import numpy as np

from ..numerics import as_int_matrix, read_matrix, write_matrix


module_logger = logging.getLogger("LSPlus.backend")

_NATIVE_TAG = re.compile(r"(?P<kind>[ef])_(?P<vertex>[1-9][0-9]*)")
_NUMERIC_TAG = re.compile(r"(?P<number>[1-9][0-9]*)")


def _split_native(text: str):
    """'e_1_f_2' -> ['e_1', 'f_2']"""
    parts = text.split("_")
    if len(parts) % 2:
        raise ValueError(f"Malformed tags: {text}")
    return ["_".join(parts[i : i + 2]) for i in range(0, len(parts), 2)]


class BaseStorage(ABC):
    """Base class for storage backends

    While PackageArchive and the bundle functions know what a certificate
    package is, the backend only stores integer matrices under string keys.
    This is the 'template' for the possible backends.

    See Also
    --------
    LSPlus.backend.FileSystem :
        A storage backend based on CSV files in a directory
    """

    logger = logging.getLogger("LSPlus.backend.BaseStorage")

    def __contains__(self, key):
        self.logger.critical("A bundle requires a backend, see LSPlus.backend")
        raise NotImplementedError("Missing __contains__(), not implemented")

    def __getitem__(self, key):
        self.logger.critical("A bundle requires a backend, see LSPlus.backend")
        raise NotImplementedError("Missing __getitem__ for this Backend")

    def __setitem__(self, key, value):
        self.logger.critical("A bundle requires a backend, see LSPlus.backend")
        raise NotImplementedError("Missing __setitem__ for this Backend")

    def __iter__(self):
        self.logger.critical("A bundle requires a backend, see LSPlus.backend")
        raise NotImplementedError("Missing __iter__ for this Backend")


class FileSystem(BaseStorage):
    """Matrices as CSV files inside a directory

    Each matrix is saved as ``<key>.csv`` at the root directory, one row
    per line with comma separated integers.
    """

    logger = logging.getLogger("LSPlus.backend.FileSystem")

    def __init__(self, root: str, extension: str = ".csv"):
        """Initiate a FileSystem backend

        Parameters
        ----------
        root : str
            Existing directory of a single bundle.
        extension : str, optional
            File extension of the matrices, default ".csv".
        """
        self.logger.debug(f"Using FileSystem as storage at: {root}")

        if not os.path.isdir(root):
            self.logger.critical(f"Invalid path for backend.FileSystem {root}")
            raise FileNotFoundError(root)
        self.root = os.path.abspath(root)
        self.extension = extension

    def __getitem__(self, key):
        filename = self.path(key)
        try:
            self.logger.debug(f"Opening file: {filename}")
            M = read_matrix(filename)
        except FileNotFoundError:
            raise KeyError(key)
        return as_int_matrix(M)

    def __setitem__(self, key, M):
        assert isinstance(M, np.ndarray)
        write_matrix(self.path(key), M)

    def __contains__(self, key: str):
        try:
            filename = self.path(key)
        except ValueError:
            return False
        return os.path.exists(filename)

    def __iter__(self):
        """Keys of every stored matrix, sorted"""
        names = sorted(os.listdir(self.root))
        for name in names:
            if name.endswith(self.extension):
                yield name[: -len(self.extension)]

    def files(self):
        """Every file in the root directory, matrix or not"""
        return sorted(os.listdir(self.root))

    def path(self, key: str):
        """Standard path for the given matrix key

        Examples
        --------
        >>> f = FileSystem('/data/bundle')
        >>> f.path('M1_e_3')
        '/data/bundle/M1_e_3.csv'
        """
        if (not key) or (os.sep in key):
            raise ValueError(f"Invalid matrix key: {key!r}")
        return os.path.join(self.root, f"{key}{self.extension}")


class InMemory(BaseStorage):
    """In memory storage

    Minimalist store, handy to assemble a bundle before deciding where it
    goes.
    """

    logger = logging.getLogger("LSPlus.backend.InMemory")

    def __init__(self):
        self.__data = OrderedDict()

    def __contains__(self, key):
        return key in self.__data

    def __getitem__(self, key):
        return self.__data[key]

    def __setitem__(self, key, M):
        assert isinstance(M, np.ndarray)
        self.__data[key] = M

    def __iter__(self):
        return iter(sorted(self.__data))

    def __len__(self):
        return len(self.__data)


@dataclass(frozen=True)
class BundleLayout:
    """File naming of a certificate bundle

    The native layout names layer matrices after their tags, e.g.
    ``M1_e_3`` and ``M2_e_1_f_2``, with 1-based vertices. A layout with
    ``numeric_tags`` writes a tag t instead, where t <= n stands for e_t
    and t > n for f_(t-n), e.g. ``M1_3`` and ``M2_1_11``. Other datasets
    can be mapped by subclassing and overriding `stem` and `matrix_id`.

    Examples
    --------
    >>> BundleLayout(numeric_tags=True).stem("M1_f_2", n=9)
    'M1_11'
    """

    manifest: str = "manifest.json"
    extension: str = ".csv"
    numeric_tags: bool = False

    def _tag_to_stem(self, tag: str, n: int) -> str:
        m = _NATIVE_TAG.fullmatch(tag)
        if m is None:
            raise ValueError(f"Malformed tag: {tag}")
        if not self.numeric_tags:
            return tag
        vertex = int(m["vertex"])
        return str(vertex if m["kind"] == "e" else n + vertex)

    def _stem_to_tag(self, text: str, n: int) -> str:
        if not self.numeric_tags:
            if _NATIVE_TAG.fullmatch(text) is None:
                raise ValueError(f"Malformed tag: {text}")
            return text
        if _NUMERIC_TAG.fullmatch(text) is None:
            raise ValueError(f"Malformed tag: {text}")
        t = int(text)
        if t > 2 * n:
            raise ValueError(f"Tag {t} out of range for n={n}")
        return f"e_{t}" if t <= n else f"f_{t - n}"

    def _split_tags(self, text: str):
        if self.numeric_tags:
            return text.split("_")
        return _split_native(text)

    def stem(self, matrix_id: str, n: int) -> str:
        """File stem of a native matrix id"""
        if matrix_id == "Y":
            return "Y"
        family, _, rest = matrix_id.partition("_")
        if family not in ("M1", "M2"):
            raise ValueError(f"Unknown matrix id: {matrix_id}")
        tags = _split_native(rest)
        if len(tags) != int(family[1]):
            raise ValueError(f"Unknown matrix id: {matrix_id}")
        return "_".join([family] + [self._tag_to_stem(t, n) for t in tags])

    def matrix_id(self, stem: str, n: int) -> str:
        """Native matrix id of a file stem, ValueError if unknown"""
        if stem == "Y":
            return "Y"
        family, _, rest = stem.partition("_")
        if family not in ("M1", "M2"):
            raise ValueError(f"Unknown matrix file: {stem}")
        tags = self._split_tags(rest)
        if len(tags) != int(family[1]):
            raise ValueError(f"Unknown matrix file: {stem}")
        return "_".join([family] + [self._stem_to_tag(t, n) for t in tags])

    def uvw_stem(self, matrix_id: str, part: str, n: int) -> str:
        assert part in ("U", "V", "W")
        return f"UVW_{self.stem(matrix_id, n)}_{part}"

    def parse(self, stem: str, n: int):
        """Classify a file stem

        Returns
        -------
        tuple
            ("matrix", id) or ("uvw", id, part).

        Raises
        ------
        ValueError
            If the stem is not part of this layout.
        """
        if stem.startswith("UVW_"):
            inner, _, part = stem[4:].rpartition("_")
            if part not in ("U", "V", "W"):
                raise ValueError(f"Unknown certificate file: {stem}")
            return ("uvw", self.matrix_id(inner, n), part)
        return ("matrix", self.matrix_id(stem, n))
