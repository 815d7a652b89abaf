"""Build integer UVW-certificates and certificate packages

The constructive side of the certificates: an exact positive semidefinite
integer matrix Y is written as W^T (U^T U + V) W = k Y with V diagonally
dominant, all in integers. Numeric matrices from an external solver are
brought in with `rationalize`.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
import logging
from math import isqrt, lcm
from typing import Dict, Iterable, Optional

import numpy as np
import pandas as pd

from .certify import (
    CertificatePackage,
    FailureCode,
    Tag,
    UVWCertificate,
    all_tags,
    attach_graph,
    verify_package,
    verify_uvw,
)
from .graphs import Graph
from .numerics import (
    as_int_matrix,
    as_rat_matrix,
    identity,
    inverse,
    is_diag_dominant,
    is_positive_definite,
    is_symmetric,
    is_zero,
    ldl_decomposition,
    mat_mul,
    rational_rank,
    zeros,
)
from .utils import DEFAULTS, parallel_map


module_logger = logging.getLogger("LSPlus.synthesize")


class SynthesisError(ValueError):
    """A certificate could not be built

    Attributes
    ----------
    code : str
        NOT_PSD, DENOMINATOR_BOUND, VERIFICATION when a synthesized
        certificate fails its own check, or the name of the failed
        structural condition, such as DOMINANCE.
    """

    def __init__(self, message: str, code: str):
        super().__init__(message)
        self.code = code


@dataclass(frozen=True)
class SynthesisOptions:
    """Knobs of rationalization and UVW synthesis

    Parameters
    ----------
    denominator_bound : int
        Largest denominator of rationalized entries and of the truncated
        Cholesky factor.
    slack : Fraction
        Fraction of the eigenvalue bound moved to the diagonal of V.
    max_scaling_exponent : int
        The truncation denominators tried are 2**e for e up to this.
    """

    denominator_bound: int = DEFAULTS["denominator_bound"]
    slack: Fraction = Fraction(1, 2)
    max_scaling_exponent: int = DEFAULTS["max_scaling_exponent"]

    def __post_init__(self):
        object.__setattr__(self, "slack", Fraction(self.slack))
        if self.denominator_bound < 1:
            raise ValueError("denominator_bound must be positive")
        if self.max_scaling_exponent < 1:
            raise ValueError("max_scaling_exponent must be positive")
        if not (0 < self.slack < 1):
            raise ValueError(f"slack must be in (0, 1): {self.slack}")

    @classmethod
    def from_config(cls, config: dict):
        """Options from a `utils.read_config` dictionary"""
        return cls(
            denominator_bound=config["denominator_bound"],
            max_scaling_exponent=config["max_scaling_exponent"],
        )


def rationalize(M, opts: Optional[SynthesisOptions] = None, symmetric=True):
    """Best rational approximation of a floating matrix

    Each entry becomes the closest fraction with denominator at most
    ``opts.denominator_bound``. A square matrix is first symmetrized by
    averaging M and M^T exactly.

    Raises
    ------
    ValueError
        NaN or infinite entries, or a non-square matrix to symmetrize.

    Examples
    --------
    >>> rationalize([[0.333333]], SynthesisOptions(denominator_bound=10))
    array([[Fraction(1, 3)]], dtype=object)
    """
    if opts is None:
        opts = SynthesisOptions()
    M = np.asarray(M, dtype=float)
    if M.ndim != 2:
        raise ValueError(f"Expected a 2-D matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError("Cannot rationalize NaN or infinite entries")
    R = as_rat_matrix(M)
    if symmetric:
        if M.shape[0] != M.shape[1]:
            raise ValueError(f"Cannot symmetrize shape {M.shape}")
        R = (R + R.T) / 2
    out = np.empty(R.shape, dtype=object)
    for idx, v in np.ndenumerate(R):
        out[idx] = Fraction(v).limit_denominator(opts.denominator_bound)
    return out


def read_float_matrix(path):
    """Read a CSV of decimal literals as a float array"""
    module_logger.debug(f"Reading numeric matrix: {path}")
    try:
        frame = pd.read_csv(path, header=None, index_col=False)
    except pd.errors.EmptyDataError:
        return np.empty((0, 0))
    except pd.errors.ParserError as err:
        raise ValueError(f"Malformed CSV matrix {path}: {err}")
    try:
        return frame.to_numpy(dtype=float)
    except ValueError as err:
        raise ValueError(f"Not a numeric matrix {path}: {err}")


def _denominator_lcm(M) -> int:
    return reduce(lcm, (Fraction(v).denominator for v in M.flat), 1)


def _principal_support(Y):
    """Greedy index set S with Y[S, S] nonsingular and of rank(Y)"""
    S = []
    for i in range(Y.shape[0]):
        trial = S + [i]
        if rational_rank(Y[np.ix_(trial, trial)]) == len(trial):
            S = trial
    return S


def _eigenvalue_bound(Yp):
    """Rational 0 < t <= least eigenvalue of a positive definite Yp

    Bisection on the positive definiteness of Yp - t I, from [0, min diag],
    until the bracket is within a quarter of its lower end.
    """
    d = Yp.shape[0]
    lo, hi = Fraction(0), min(Fraction(Yp[i, i]) for i in range(d))
    for _ in range(256):
        if (lo > 0) and (hi - lo <= lo / 4):
            break
        mid = (lo + hi) / 2
        if is_positive_definite(Yp - mid * as_rat_matrix(identity(d))):
            lo = mid
        else:
            hi = mid
    return lo


def _truncated_factor(L, D, q):
    """U_1 with U_1^T U_1 ~ L diag(D) L^T, entries with denominator q"""
    d = len(D)
    U = zeros(d, d)
    for k in range(d):
        for i in range(k, d):
            x = L[i, k]
            if x == 0:
                continue
            square = x * x * D[k] * q * q
            root = isqrt(square.numerator // square.denominator)
            U[k, i] = Fraction(root if x > 0 else -root, q)
    return U


def uvw_synthesize(Y, opts: Optional[SynthesisOptions] = None):
    """An integer UVW-certificate of a positive semidefinite integer Y

    The zero matrix gets U = V = 0 and W = I. Otherwise a nonsingular
    principal submatrix Y' of full rank gives Y = W_1^T Y' W_1 over the
    rationals. A lower bound t on the least eigenvalue of Y' is found by
    bisection, and the LDL^T factor of Y' - slack t I is truncated to
    denominator q = 2**e, for growing e, until V_1 = Y' - U_1^T U_1 is
    diagonally dominant. Denominators are then cleared.

    Parameters
    ----------
    Y : matrix
        Symmetric integer matrix.
    opts : SynthesisOptions, optional

    Returns
    -------
    UVWCertificate
        Accepted by `verify_uvw`, with k = a^2 c^2 for the scaling
        factors a of (U, V) and c of W.

    Raises
    ------
    SynthesisError
        NOT_PSD if Y is not positive semidefinite, DENOMINATOR_BOUND if
        no allowed truncation works.
    """
    if opts is None:
        opts = SynthesisOptions()
    Y = as_int_matrix(Y)
    if not is_symmetric(Y):
        raise SynthesisError("Y is not symmetric", code="SYMMETRY")
    n = Y.shape[0]
    if is_zero(Y):
        return UVWCertificate(zeros(1, n), zeros(n, n), identity(n))
    if any(Y[i, i] < 0 for i in range(n)):
        raise SynthesisError("Negative diagonal entry", code="NOT_PSD")

    S = _principal_support(Y)
    Yp = Y[np.ix_(S, S)]
    W1 = mat_mul(inverse(Yp), as_rat_matrix(Y[S, :]))
    if not all(
        a == b for a, b in zip(mat_mul(mat_mul(W1.T, Yp), W1).flat, Y.flat)
    ):
        raise SynthesisError(
            f"Y is not determined by its principal submatrix {S}",
            code="NOT_PSD",
        )
    if not is_positive_definite(Yp):
        raise SynthesisError(
            f"Principal submatrix {S} is not positive definite",
            code="NOT_PSD",
        )

    t = _eigenvalue_bound(Yp)
    if t <= 0:
        raise SynthesisError("No positive eigenvalue bound", code="NOT_PSD")
    d = len(S)
    shifted = as_rat_matrix(Yp) - opts.slack * t * as_rat_matrix(identity(d))
    L, D = ldl_decomposition(shifted)
    module_logger.debug(f"Rank {d}, eigenvalue bound {t}")

    for e in range(opts.max_scaling_exponent + 1):
        q = 2**e
        if q > opts.denominator_bound:
            break
        U1 = _truncated_factor(L, D, q)
        V1 = as_rat_matrix(Yp) - mat_mul(U1.T, U1)
        if is_diag_dominant(V1):
            break
    else:
        q = None
    if (q is None) or (q > opts.denominator_bound):
        raise SynthesisError(
            "No truncation within the denominator bound"
            f" {opts.denominator_bound}, try a larger bound",
            code="DENOMINATOR_BOUND",
        )

    a = lcm(_denominator_lcm(U1), _denominator_lcm(V1))
    c = _denominator_lcm(W1)
    cert = UVWCertificate(
        as_int_matrix(U1 * a), as_int_matrix(V1 * a * a), as_int_matrix(W1 * c)
    )
    check = verify_uvw(Y, cert)
    if not (check.accepted and (check.k == a * a * c * c)):
        raise SynthesisError(
            f"Synthesized certificate does not verify: {check.failures}",
            code="VERIFICATION",
        )
    module_logger.debug(f"UVW-certificate with q={q}, k={check.k}")
    return cert


def _synthesize_one(args):
    matrix_id, M, opts = args
    return matrix_id, uvw_synthesize(M, opts)


def _as_tag(t):
    return t if isinstance(t, Tag) else Tag.parse(t)


def assemble_package(
    G: Graph,
    level: int,
    Y,
    M1: Optional[Dict] = None,
    M2: Optional[Dict] = None,
    opts: Optional[SynthesisOptions] = None,
    npes: Optional[int] = None,
) -> CertificatePackage:
    """A verified package from integer layer matrices

    The structural conditions (symmetry, diagonal, cone membership,
    domination) are checked first and every nonzero matrix then gets a
    synthesized UVW-certificate.

    Parameters
    ----------
    G : Graph
    level : int
        1, 2 or 3.
    Y : matrix
    M1 : dict, optional
        Tag (or "e_1" style string) -> matrix, required for level >= 2.
    M2 : dict, optional
        (tag, tag) -> matrix for level 3; absent pairs are zero.

    Raises
    ------
    SynthesisError
        With the code of the first failed structural condition, or the
        code of a failed synthesis.
    """
    if opts is None:
        opts = SynthesisOptions()
    pkg = CertificatePackage(
        level=level,
        Y=Y,
        M1={_as_tag(t): M for t, M in (M1 or {}).items()},
        M2={
            (_as_tag(t1), _as_tag(t2)): M
            for (t1, t2), M in (M2 or {}).items()
        },
    )
    attach_graph(pkg, G)

    report = verify_package(G, pkg)
    structural = [
        f for f in report.failures if f.code != FailureCode.MISSING_UVW
    ]
    if structural:
        first = structural[0]
        raise SynthesisError(str(first), code=first.code.name)

    jobs = [
        (matrix_id, M, opts)
        for matrix_id, M in pkg.matrices().items()
        if not is_zero(M)
    ]
    for matrix_id, cert in parallel_map(_synthesize_one, jobs, npes=npes):
        pkg.uvw[matrix_id] = cert

    report = verify_package(G, pkg)
    if not report.accepted:
        first = report.failures[0]
        raise SynthesisError(
            f"Assembled package does not verify: {first}",
            code=first.code.name,
        )
    module_logger.info(
        f"Assembled level {level} package with {len(pkg.uvw)} certificates"
    )
    return pkg


def _agrees(t: Tag, S) -> bool:
    return (t.vertex in S) == (t.kind == "e")


def integral_package(
    G: Graph, S: Iterable[int], level: int = 1
) -> CertificatePackage:
    """The package of a stable set's homogenized incidence vector

    With x = (1, chi_S) and Y = x x^T, the layer matrix of a tag is Y when
    the tag agrees with S (e_i with i in S, f_i with i not in S) and zero
    otherwise. Every nonzero matrix carries U = x^T, V = 0, W = I.

    Raises
    ------
    ValueError
        If S is not a stable set of G.
    """
    S = set(S)
    if any(not (0 <= v < G.n) for v in S):
        raise ValueError(f"Vertices out of range: {sorted(S)}")
    if any(G.has_edge(i, j) for i in S for j in S if i < j):
        raise ValueError(f"Not a stable set: {sorted(S)}")

    n = G.n
    x = [1] + [int(i in S) for i in range(n)]
    Y = as_int_matrix(np.outer(np.array(x, dtype=object), x))
    Z = zeros(n + 1, n + 1)

    M1, M2 = {}, {}
    if level >= 2:
        for t in all_tags(n):
            M1[t] = Y.copy() if _agrees(t, S) else Z.copy()
    if level == 3:
        for t1 in all_tags(n):
            for t2 in all_tags(n):
                if _agrees(t1, S) and _agrees(t2, S):
                    M2[(t1, t2)] = Y.copy()

    pkg = CertificatePackage(level=level, Y=Y, M1=M1, M2=M2)
    cert = UVWCertificate([x], zeros(n + 1, n + 1), identity(n + 1))
    for matrix_id, M in pkg.matrices().items():
        if not is_zero(M):
            pkg.uvw[matrix_id] = cert
    return attach_graph(pkg, G)
