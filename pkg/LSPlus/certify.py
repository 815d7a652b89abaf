"""Exact verification of LS+ certificate packages

A package certifies that Ye_0 lies in the homogenized cone of LS+^level(G)
using integer arithmetic only: cone(FRAC) memberships of the innermost
columns, domination between consecutive layers, and a UVW-certificate
witnessing that each matrix is positive semidefinite.

Vertices are 0-based in the API. Tags and matrix ids (``e_1``, ``M1_f_3``)
use 1-based vertices, as in the bundle files.
"""

import copy
from dataclasses import dataclass, field
import enum
from fractions import Fraction
import json
import logging
import os
from typing import Dict, List, NamedTuple, Optional, Tuple

import numpy as np
import pandas as pd

from .backend import BundleLayout, FileSystem
from .graphs import Graph, graph6_decode, graph6_encode
from .numerics import (
    as_int_matrix,
    is_diag_dominant,
    is_symmetric,
    is_zero,
    mat_mul,
)
from .polytope import (
    Inequality,
    cone_frac_member,
    dominates,
    is_valid_for_stab,
    max_weight_stable_set,
)
from .utils import parallel_map


module_logger = logging.getLogger("LSPlus.certify")


class BundleError(ValueError):
    """A bundle on disk is malformed"""

    pass


class MissingMatrixError(KeyError):
    """A required matrix is not part of the package"""

    pass


class FailureCode(enum.Enum):
    SYMMETRY = 1
    DIAGONAL = 2
    CONE_MEMBERSHIP = 3
    DOMINANCE = 4
    MISSING_MATRIX = 5
    MISSING_UVW = 6
    DIMENSION = 7
    UVW_PRODUCT = 8
    NOT_DIAG_DOMINANT = 9
    INEQ_NOT_VALID = 10
    NO_VIOLATION = 11


@dataclass(frozen=True)
class Failure:
    code: FailureCode
    tag: str
    message: str

    def __str__(self):
        return f"{self.code.name} [{self.tag}]: {self.message}"


class Tag(NamedTuple):
    """e_i or f_i := e_0 - e_i, with a 0-based vertex i"""

    kind: str
    vertex: int

    def __str__(self):
        return f"{self.kind}_{self.vertex + 1}"

    @classmethod
    def parse(cls, text: str):
        kind, _, vertex = text.partition("_")
        if (kind not in ("e", "f")) or (not vertex.isdigit()):
            raise ValueError(f"Malformed tag: {text!r}")
        if int(vertex) < 1:
            raise ValueError(f"Malformed tag: {text!r}")
        return cls(kind, int(vertex) - 1)

    def number(self, n: int) -> int:
        """Numeric encoding: e_i -> i, f_i -> n + i (1-based)"""
        return self.vertex + 1 + (n if self.kind == "f" else 0)

    def column(self, M) -> Tuple[int, ...]:
        """M e_i or M f_i"""
        M = np.asarray(M, dtype=object)
        i = self.vertex + 1
        if self.kind == "e":
            return tuple(M[:, i])
        return tuple(a - b for a, b in zip(M[:, 0], M[:, i]))


def all_tags(n: int) -> List[Tag]:
    return [Tag("e", i) for i in range(n)] + [Tag("f", i) for i in range(n)]


def m1_id(t: Tag) -> str:
    return f"M1_{t}"


def m2_id(t1: Tag, t2: Tag) -> str:
    return f"M2_{t1}_{t2}"


def parse_matrix_id(matrix_id: str):
    """'Y' -> (), 'M1_e_2' -> (Tag,), 'M2_e_1_f_2' -> (Tag, Tag)"""
    if matrix_id == "Y":
        return ()
    family, _, rest = matrix_id.partition("_")
    parts = rest.split("_")
    if (family not in ("M1", "M2")) or (len(parts) != 2 * int(family[1])):
        raise ValueError(f"Malformed matrix id: {matrix_id!r}")
    return tuple(
        Tag.parse("_".join(parts[i : i + 2])) for i in range(0, len(parts), 2)
    )


@dataclass(frozen=True, eq=False)
class UVWCertificate:
    """Integer triple with W^T (U^T U + V) W = k Y"""

    U: np.ndarray
    V: np.ndarray
    W: np.ndarray

    def __post_init__(self):
        for name in ("U", "V", "W"):
            object.__setattr__(self, name, as_int_matrix(getattr(self, name)))

    def product(self):
        """W^T (U^T U + V) W"""
        inner = mat_mul(self.U.T, self.U) + self.V
        return mat_mul(mat_mul(self.W.T, inner), self.W)

    def __eq__(self, other):
        if not isinstance(other, UVWCertificate):
            return NotImplemented
        return all(
            _same(getattr(self, p), getattr(other, p)) for p in ("U", "V", "W")
        )


def _same(A, B) -> bool:
    return (A.shape == B.shape) and all(
        a == b for a, b in zip(A.flat, B.flat)
    )


@dataclass(eq=False)
class CertificatePackage:
    """An LS+ certificate package of level 1, 2 or 3

    Attributes
    ----------
    level : int
    Y : np.ndarray
        (n + 1) x (n + 1) integer matrix.
    M1 : dict
        Tag -> matrix, the layer below Y (levels 2 and 3).
    M2 : dict
        (Tag, Tag) -> matrix (level 3). Absent entries are all zero.
    uvw : dict
        Matrix id -> UVWCertificate.
    """

    level: int
    Y: np.ndarray
    M1: Dict[Tag, np.ndarray] = field(default_factory=dict)
    M2: Dict[Tuple[Tag, Tag], np.ndarray] = field(default_factory=dict)
    uvw: Dict[str, UVWCertificate] = field(default_factory=dict)
    graph6: Optional[str] = None
    inequality: Optional[Inequality] = None

    def __post_init__(self):
        if self.level not in (1, 2, 3):
            raise ValueError(f"Package level must be 1, 2 or 3: {self.level}")
        self.Y = as_int_matrix(self.Y)
        self.M1 = {t: as_int_matrix(M) for t, M in self.M1.items()}
        self.M2 = {t: as_int_matrix(M) for t, M in self.M2.items()}

    @property
    def n(self) -> int:
        return self.Y.shape[0] - 1

    def matrices(self) -> Dict[str, np.ndarray]:
        """Every stored matrix by id: Y, then M1 and M2 in tag order"""
        out = {"Y": self.Y}
        for t in sorted(self.M1):
            out[m1_id(t)] = self.M1[t]
        for t1, t2 in sorted(self.M2):
            out[m2_id(t1, t2)] = self.M2[(t1, t2)]
        return out

    def matrix(self, matrix_id: str) -> np.ndarray:
        tags = parse_matrix_id(matrix_id)
        try:
            if not tags:
                return self.Y
            if len(tags) == 1:
                return self.M1[tags[0]]
            return self.M2[tags]
        except KeyError:
            raise MissingMatrixError(matrix_id)

    def __eq__(self, other):
        if not isinstance(other, CertificatePackage):
            return NotImplemented
        mine, theirs = self.matrices(), other.matrices()
        return (
            (self.level == other.level)
            and (mine.keys() == theirs.keys())
            and all(_same(mine[k], theirs[k]) for k in mine)
            and (self.uvw == other.uvw)
            and (self.graph6 == other.graph6)
            and (self.inequality == other.inequality)
        )


@dataclass
class UVWCheck:
    """Outcome of `verify_uvw`: k on acceptance, else failures"""

    k: Optional[int] = None
    failures: List[Failure] = field(default_factory=list)

    @property
    def accepted(self) -> bool:
        return (self.k is not None) and (not self.failures)


@dataclass
class VerificationReport:
    """Verdict of a package or rank certificate check

    The witness x = (Ye_0 tail) / Y_00 is kept as an integer numerator and
    denominator so it prints the way the matrix reads.
    """

    level: int
    failures: List[Failure] = field(default_factory=list)
    k: Dict[str, int] = field(default_factory=dict)
    exempt: List[str] = field(default_factory=list)
    witness_numerator: Optional[Tuple[int, ...]] = None
    witness_denominator: Optional[int] = None
    inequality: Optional[Inequality] = None
    violation: Optional[Fraction] = None
    ratio_bound: Optional[Fraction] = None

    @property
    def accepted(self) -> bool:
        return not self.failures

    @property
    def witness(self) -> Optional[Tuple[Fraction, ...]]:
        if self.witness_denominator in (None, 0):
            return None
        d = self.witness_denominator
        return tuple(Fraction(v, d) for v in self.witness_numerator)

    @property
    def rank_lower_bound(self) -> Optional[int]:
        """level + 1 when a rank certificate was accepted"""
        if self.accepted and (self.inequality is not None):
            return self.level + 1
        return None

    def sort(self):
        self.failures.sort(key=lambda f: (f.code.value, f.tag, f.message))

    def codes(self) -> List[FailureCode]:
        return [f.code for f in self.failures]

    def summary(self) -> str:
        """Human readable report"""
        lines = [
            f"verdict: {'accept' if self.accepted else 'reject'}",
            f"level: {self.level}",
        ]
        for matrix_id, k in self.k.items():
            lines.append(f"k[{matrix_id}] = {k}")
        if self.exempt:
            exempt = ", ".join(self.exempt)
            lines.append(f"zero matrices without UVW: {exempt}")
        if self.witness_numerator is not None:
            numerator = ", ".join(str(v) for v in self.witness_numerator)
            lines.append(f"witness: ({numerator})/{self.witness_denominator}")
        if self.inequality is not None:
            lines.append(f"inequality: {self.inequality}")
        if self.violation is not None:
            a = self.inequality.a
            value = sum(
                ai * v for ai, v in zip(a, self.witness_numerator)
            )
            relation = ">" if self.violation > 0 else "<="
            lines.append(
                f"violation: {value}/{self.witness_denominator}"
                f" {relation} {self.inequality.beta}"
            )
        if self.ratio_bound is not None:
            lines.append(f"ratio bound: {self.ratio_bound}")
        lines.extend(f"failure: {f}" for f in self.failures)
        return "\n".join(lines)


def verify_uvw(Y, cert: UVWCertificate, tag: str = "Y") -> UVWCheck:
    """Check that (U, V, W) is a UVW-certificate of Y

    Accept iff V is symmetric and diagonally dominant and
    W^T (U^T U + V) W = k Y for a positive integer k. The value of k is
    read from the first nonzero entry of Y in row-major order and then
    confirmed on every entry. For Y = 0 the product must vanish and k = 1.

    Parameters
    ----------
    Y : matrix
        Square symmetric integer matrix.
    cert : UVWCertificate
    tag : str, optional
        Matrix id used in the failures.

    Returns
    -------
    UVWCheck

    Examples
    --------
    >>> I = [[1, 0], [0, 1]]
    >>> verify_uvw(I, UVWCertificate(I, [[0, 0], [0, 0]], I)).k
    1
    """
    Y = as_int_matrix(Y)
    U, V, W = cert.U, cert.V, cert.W
    check = UVWCheck()

    if (Y.ndim != 2) or (Y.shape[0] != Y.shape[1]):
        check.failures.append(
            Failure(FailureCode.DIMENSION, tag, f"Y is not square: {Y.shape}")
        )
        return check
    if not is_symmetric(Y):
        check.failures.append(
            Failure(FailureCode.SYMMETRY, tag, "Y is not symmetric")
        )
        return check
    m = V.shape[0]
    if (
        (V.shape != (m, m))
        or (U.shape[1] != m)
        or (W.shape != (m, Y.shape[0]))
    ):
        check.failures.append(
            Failure(
                FailureCode.DIMENSION,
                tag,
                f"U {U.shape}, V {V.shape}, W {W.shape} for Y {Y.shape}",
            )
        )
        return check

    if not is_diag_dominant(V):
        check.failures.append(
            Failure(
                FailureCode.NOT_DIAG_DOMINANT,
                tag,
                "V is not symmetric and diagonally dominant",
            )
        )

    P = cert.product()
    nonzero = [(idx, v) for idx, v in np.ndenumerate(Y) if v != 0]
    if not nonzero:
        if is_zero(P):
            k = 1
        else:
            k = None
            check.failures.append(
                Failure(FailureCode.UVW_PRODUCT, tag, "Y = 0 but product != 0")
            )
    else:
        idx, y = nonzero[0]
        k = P[idx] // y
        if (k <= 0) or (P[idx] != k * y):
            check.failures.append(
                Failure(
                    FailureCode.UVW_PRODUCT,
                    tag,
                    f"No positive integer k at {idx}: {P[idx]} / {y}",
                )
            )
            k = None
        else:
            bad = [i for i, v in np.ndenumerate(P) if v != k * Y[i]]
            if bad:
                check.failures.append(
                    Failure(
                        FailureCode.UVW_PRODUCT,
                        tag,
                        f"Product differs from {k} Y at {bad[0]}",
                    )
                )
                k = None
    check.k = k
    module_logger.debug(f"verify_uvw[{tag}]: k={k}, {len(check.failures)}")
    return check


def _check_uvw(args):
    tag, M, cert = args
    return tag, verify_uvw(M, cert, tag=tag)


def _structure(report, matrix_id, M):
    """Symmetry and M e_0 = diag(M)"""
    n1 = M.shape[0]
    if not is_symmetric(M):
        report.failures.append(
            Failure(FailureCode.SYMMETRY, matrix_id, "Matrix is not symmetric")
        )
    if any(M[i, 0] != M[i, i] for i in range(n1)):
        report.failures.append(
            Failure(FailureCode.DIAGONAL, matrix_id, "M e_0 differs from diag")
        )


def _cone_columns(report, G, matrix_id, M):
    for t in all_tags(G.n):
        if not cone_frac_member(G, t.column(M)):
            report.failures.append(
                Failure(
                    FailureCode.CONE_MEMBERSHIP,
                    f"{matrix_id}:{t}",
                    f"Column {t} is not in cone(FRAC(G))",
                )
            )


def _dominance(report, upper_id, upper, lower_id, lower, t):
    """upper e_0 must dominate lower t, a zero `upper` stands for 0"""
    n1 = lower.shape[0]
    x1 = tuple(upper[:, 0]) if upper is not None else (0,) * n1
    x2 = t.column(lower)
    if not dominates(x1, x2):
        report.failures.append(
            Failure(
                FailureCode.DOMINANCE,
                f"{upper_id}:{lower_id}",
                f"{upper_id} e_0 does not dominate {lower_id} {t}",
            )
        )


def verify_package(
    G: Graph, pkg: CertificatePackage, npes: Optional[int] = None
) -> VerificationReport:
    """Verify an LS+ certificate package of level 1, 2 or 3

    Checks, in order: symmetry and M e_0 = diag(M) of every matrix;
    cone(FRAC(G)) membership of the columns M e_i, M f_i of the innermost
    layer; domination between consecutive layers; and a UVW-certificate
    for every required matrix. All-zero matrices need no certificate. On
    acceptance, Ye_0 is in cone(LS+^level(G)).

    Parameters
    ----------
    G : Graph
    pkg : CertificatePackage
    npes : int, optional
        Parallel jobs for the UVW checks. The report does not depend on it.

    Returns
    -------
    VerificationReport
        Failures sorted by code, then tag.
    """
    n = G.n
    report = VerificationReport(level=pkg.level)
    shape = (n + 1, n + 1)

    if pkg.Y.shape != shape:
        report.failures.append(
            Failure(
                FailureCode.DIMENSION,
                "Y",
                f"Y has shape {pkg.Y.shape}, expected {shape}",
            )
        )
        return report

    for t in list(pkg.M1) + [t for pair in pkg.M2 for t in pair]:
        if not (0 <= t.vertex < n) or (t.kind not in ("e", "f")):
            raise ValueError(f"Malformed tag {t!r} for n={n}")

    matrices = pkg.matrices()
    for matrix_id in list(matrices):
        M = matrices[matrix_id]
        if M.shape != shape:
            report.failures.append(
                Failure(
                    FailureCode.DIMENSION,
                    matrix_id,
                    f"Shape {M.shape}, expected {shape}",
                )
            )
            del matrices[matrix_id]

    for matrix_id, M in matrices.items():
        _structure(report, matrix_id, M)

    Y = pkg.Y
    if Y[0, 0] != 0:
        report.witness_numerator = tuple(Y[1:, 0])
        report.witness_denominator = Y[0, 0]

    if pkg.level == 1:
        _cone_columns(report, G, "Y", Y)
    else:
        for t in all_tags(n):
            if (m1_id(t) not in matrices) and (t not in pkg.M1):
                report.failures.append(
                    Failure(
                        FailureCode.MISSING_MATRIX,
                        m1_id(t),
                        f"Level {pkg.level} requires Y_{t}",
                    )
                )
        for t in all_tags(n):
            if m1_id(t) not in matrices:
                continue
            M = matrices[m1_id(t)]
            _dominance(report, m1_id(t), M, "Y", Y, t)
            if pkg.level == 2:
                _cone_columns(report, G, m1_id(t), M)
                continue
            for t2 in all_tags(n):
                key = m2_id(t, t2)
                if (t, t2) in pkg.M2 and key not in matrices:
                    continue
                inner = matrices.get(key)
                _dominance(report, key, inner, m1_id(t), M, t2)
                if inner is not None:
                    _cone_columns(report, G, key, inner)

    jobs = []
    for matrix_id, M in matrices.items():
        if not is_symmetric(M):
            # already reported by the structural checks
            continue
        if matrix_id in pkg.uvw:
            jobs.append((matrix_id, M, pkg.uvw[matrix_id]))
        elif is_zero(M):
            report.exempt.append(matrix_id)
        else:
            report.failures.append(
                Failure(
                    FailureCode.MISSING_UVW,
                    matrix_id,
                    "Nonzero matrix without a UVW-certificate",
                )
            )
    for matrix_id, check in parallel_map(_check_uvw, jobs, npes=npes):
        report.failures.extend(check.failures)
        if check.k is not None:
            report.k[matrix_id] = check.k

    report.sort()
    module_logger.info(
        f"Level {pkg.level} package: "
        f"{'accept' if report.accepted else 'reject'}"
        f" ({len(report.failures)} failures)"
    )
    return report


def verify_rank_certificate(
    G: Graph,
    ineq: Inequality,
    pkg: CertificatePackage,
    npes: Optional[int] = None,
) -> VerificationReport:
    """Certify r+(G) >= level + 1 from a package and a violated inequality

    Accept iff the package verifies, a^T x <= beta is valid for STAB(G)
    and (-beta, a^T) Ye_0 > 0, i.e. the witness violates the inequality.
    The report carries the ratio a^T x / max{a^T x : x in STAB(G)}, a lower
    bound on the integrality ratio at this level.
    """
    report = verify_package(G, pkg, npes=npes)
    report.inequality = ineq
    if ineq.n != G.n:
        report.failures.append(
            Failure(
                FailureCode.DIMENSION,
                "inequality",
                f"Inequality over {ineq.n} vertices for n={G.n}",
            )
        )
        report.sort()
        return report

    if not is_valid_for_stab(G, ineq):
        report.failures.append(
            Failure(
                FailureCode.INEQ_NOT_VALID,
                "inequality",
                f"{ineq} is not valid for STAB(G)",
            )
        )

    if pkg.Y.shape == (G.n + 1, G.n + 1):
        report.violation = ineq.violation(tuple(pkg.Y[:, 0]))
        if report.violation <= 0:
            report.failures.append(
                Failure(
                    FailureCode.NO_VIOLATION,
                    "inequality",
                    f"(-beta, a^T) Ye_0 = {report.violation} is not positive",
                )
            )
        if report.witness is not None:
            best, _ = max_weight_stable_set(G, ineq.a)
            if best > 0:
                report.ratio_bound = ineq.evaluate(report.witness) / best
    report.sort()
    return report


def _manifest(pkg: CertificatePackage, layout: BundleLayout):
    n = pkg.n
    ids = list(pkg.matrices())
    if pkg.inequality is None:
        inequality = None
    else:
        inequality = {"a": list(pkg.inequality.a), "beta": pkg.inequality.beta}
    return {
        "level": pkg.level,
        "n": n,
        "graph6": pkg.graph6,
        "inequality": inequality,
        "matrices": [layout.stem(i, n) for i in ids],
        "uvw": [layout.stem(i, n) for i in ids if i in pkg.uvw],
        "tags": {str(t): t.number(n) for t in all_tags(n)},
    }


def save_package(
    pkg: CertificatePackage, path: str, layout: Optional[BundleLayout] = None
):
    """Write a package as a bundle directory

    The directory holds the manifest and one CSV file per matrix, as named
    by the layout.
    """
    if layout is None:
        layout = BundleLayout()
    os.makedirs(path, exist_ok=True)
    store = FileSystem(path, extension=layout.extension)
    n = pkg.n
    for matrix_id, M in pkg.matrices().items():
        store[layout.stem(matrix_id, n)] = M
    for matrix_id, cert in pkg.uvw.items():
        for part in ("U", "V", "W"):
            store[layout.uvw_stem(matrix_id, part, n)] = getattr(cert, part)
    manifest_path = os.path.join(path, layout.manifest)
    with open(manifest_path, "w", encoding="utf-8") as fp:
        json.dump(_manifest(pkg, layout), fp, indent=2)
        fp.write("\n")
    module_logger.info(f"Saved level {pkg.level} package at {path}")


def load_package(
    path: str, layout: Optional[BundleLayout] = None
) -> CertificatePackage:
    """Read a bundle directory written by `save_package`

    Raises
    ------
    BundleError
        Missing manifest, unknown or missing files, duplicate tags,
        malformed CSV or inconsistent dimensions.
    """
    if layout is None:
        layout = BundleLayout()
    module_logger.debug(f"Loading bundle: {path}")
    try:
        store = FileSystem(path, extension=layout.extension)
    except FileNotFoundError:
        raise BundleError(f"Not a bundle directory: {path}")

    manifest_path = os.path.join(store.root, layout.manifest)
    try:
        with open(manifest_path, encoding="utf-8") as fp:
            manifest = json.load(fp)
    except FileNotFoundError:
        raise BundleError(f"Missing manifest: {manifest_path}")
    except json.JSONDecodeError as err:
        raise BundleError(f"Malformed manifest {manifest_path}: {err}")

    try:
        level, n = int(manifest["level"]), int(manifest["n"])
        listed = list(manifest["matrices"])
        listed_uvw = list(manifest.get("uvw", []))
    except (KeyError, TypeError, ValueError) as err:
        raise BundleError(f"Incomplete manifest {manifest_path}: {err}")

    for name in store.files():
        if (name != layout.manifest) and (not name.endswith(layout.extension)):
            raise BundleError(f"Unknown file in bundle: {name}")

    for names in (listed, listed_uvw):
        if len(set(names)) != len(names):
            raise BundleError(f"Duplicate tags in manifest: {manifest_path}")

    matrices, parts = {}, {}
    for stem in store:
        try:
            kind, matrix_id, *part = layout.parse(stem, n)
            parse_matrix_id(matrix_id)
        except ValueError as err:
            raise BundleError(f"Unknown file in bundle: {stem} ({err})")
        if kind == "matrix" and stem not in listed:
            raise BundleError(f"File not in manifest: {stem}")
        try:
            M = store[stem]
        except ValueError as err:
            raise BundleError(str(err))
        if kind == "matrix":
            if matrix_id in matrices:
                raise BundleError(f"Duplicate tag: {matrix_id}")
            if M.shape != (n + 1, n + 1):
                raise BundleError(
                    f"{stem} has shape {M.shape}, expected {(n + 1, n + 1)}"
                )
            matrices[matrix_id] = M
        else:
            parts.setdefault(matrix_id, {})[part[0]] = M

    for stem in listed:
        if layout.matrix_id(stem, n) not in matrices:
            raise BundleError(f"Missing matrix file: {stem}")
    if "Y" not in matrices:
        raise BundleError("Missing matrix file: Y")

    uvw = {}
    for stem in listed_uvw:
        matrix_id = layout.matrix_id(stem, n)
        found = parts.pop(matrix_id, {})
        if sorted(found) != ["U", "V", "W"]:
            raise BundleError(f"Incomplete UVW-certificate of {matrix_id}")
        uvw[matrix_id] = UVWCertificate(found["U"], found["V"], found["W"])
    if parts:
        raise BundleError(f"UVW files not in manifest: {sorted(parts)}")

    M1, M2 = {}, {}
    for matrix_id, M in matrices.items():
        tags = parse_matrix_id(matrix_id)
        if len(tags) == 1:
            M1[tags[0]] = M
        elif len(tags) == 2:
            M2[tags] = M

    inequality = manifest.get("inequality")
    if inequality is not None:
        inequality = Inequality(tuple(inequality["a"]), inequality["beta"])
    graph6 = manifest.get("graph6")
    if graph6 is not None:
        try:
            decoded = graph6_decode(graph6)
        except ValueError as err:
            raise BundleError(f"Malformed graph6 in manifest: {err}")
        if decoded.n != n:
            raise BundleError(f"Graph in manifest does not have n={n}")

    try:
        return CertificatePackage(
            level=level,
            Y=matrices["Y"],
            M1=M1,
            M2=M2,
            uvw=uvw,
            graph6=graph6,
            inequality=inequality,
        )
    except ValueError as err:
        raise BundleError(str(err))


def package_graph(pkg: CertificatePackage) -> Graph:
    """The graph recorded in a package's manifest"""
    if pkg.graph6 is None:
        raise ValueError("The package does not record its graph")
    return graph6_decode(pkg.graph6)


def attach_graph(pkg: CertificatePackage, G: Graph):
    """Record G, as graph6, in the package"""
    if G.n != pkg.n:
        raise ValueError(f"Graph with n={G.n} for a package with n={pkg.n}")
    pkg.graph6 = graph6_encode(G)
    return pkg


def _mutate(pkg: CertificatePackage, rng):
    """Copy of pkg with one entry moved by +-1, symmetric where it matters"""
    targets = [(matrix_id, None) for matrix_id in pkg.matrices()]
    targets += [(m, part) for m in sorted(pkg.uvw) for part in "UVW"]
    matrix_id, part = targets[int(rng.integers(len(targets)))]
    mutant = copy.deepcopy(pkg)
    if part is None:
        M, label = mutant.matrix(matrix_id), matrix_id
    else:
        M, label = getattr(mutant.uvw[matrix_id], part), f"UVW_{matrix_id}"
        label = f"{label}_{part}"
    i = int(rng.integers(M.shape[0]))
    j = int(rng.integers(M.shape[1]))
    delta = int(rng.choice([-1, 1]))
    M[i, j] += delta
    if (part in (None, "V")) and (i != j):
        M[j, i] += delta
    return mutant, f"{label}[{i + 1},{j + 1}]{delta:+d}"


def _fuzz_check(args):
    G, mutant, ineq = args
    if ineq is None:
        return verify_package(G, mutant)
    return verify_rank_certificate(G, ineq, mutant)


def fuzz_package(
    G: Graph,
    pkg: CertificatePackage,
    rounds: int,
    seed: int,
    inequality: Optional[Inequality] = None,
    npes: Optional[int] = None,
) -> pd.DataFrame:
    """Verify `rounds` single-entry mutations of a package

    Every mutation moves one entry of a layer matrix or of a certificate
    by +-1, mirrored across the diagonal for the symmetric ones. The same
    seed always gives the same mutations.

    Returns
    -------
    pd.DataFrame
        Columns round, change, accepted and codes.
    """
    rng = np.random.default_rng(seed)
    mutants = [_mutate(pkg, rng) for _ in range(rounds)]
    reports = parallel_map(
        _fuzz_check, [(G, m, inequality) for m, _ in mutants], npes=npes
    )
    table = pd.DataFrame(
        {
            "round": range(1, rounds + 1),
            "change": [change for _, change in mutants],
            "accepted": [r.accepted for r in reports],
            "codes": [" ".join(c.name for c in r.codes()) for r in reports],
        }
    )
    module_logger.info(
        f"{int(table['accepted'].eq(False).sum())} of {rounds} mutations"
        " rejected"
    )
    return table
