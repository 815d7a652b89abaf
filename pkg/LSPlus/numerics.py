"""Exact integer and rational linear algebra

Matrices are numpy arrays with ``dtype=object`` holding Python ``int`` (an
IntMatrix) or ``fractions.Fraction`` (a RatMatrix) entries, so arithmetic is
arbitrary precision and never silently overflows. Fractions are always kept
in lowest terms with a positive denominator.
"""

from fractions import Fraction
import logging
import numbers

import numpy as np
import pandas as pd


module_logger = logging.getLogger("LSPlus.numerics")


class InfeasibleError(ValueError):
    """The linear program has no feasible point"""

    pass


class _Unbounded:
    def __repr__(self):
        return "UNBOUNDED"


UNBOUNDED = _Unbounded()


def _to_int(value):
    if isinstance(value, bool):
        raise ValueError(f"Expected an integer, got {value!r}")
    if isinstance(value, numbers.Integral):
        return int(value)
    if isinstance(value, Fraction) and value.denominator == 1:
        return int(value.numerator)
    if isinstance(value, str):
        return int(value.strip())
    raise ValueError(f"Expected an integer, got {value!r}")


def _to_fraction(value):
    if isinstance(value, bool):
        raise ValueError(f"Expected a rational, got {value!r}")
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, (numbers.Rational, float)):
        return Fraction(value)
    if isinstance(value, numbers.Integral):
        return Fraction(int(value))
    raise ValueError(f"Expected a rational, got {value!r}")


def _as_2d(rows):
    M = np.array(rows, dtype=object)
    if M.size == 0:
        shape = M.shape if M.ndim == 2 else (0, 0)
        return np.empty(shape, dtype=object)
    if M.ndim != 2:
        raise ValueError(f"Expected a 2-D matrix, got shape {M.shape}")
    return M


def as_int_matrix(rows):
    """Convert a nested sequence into an IntMatrix

    Parameters
    ----------
    rows : sequence of sequences, or array
        Integer entries. Fractions with unit denominator are accepted.

    Returns
    -------
    np.ndarray
        An object array of Python integers.

    Examples
    --------
    >>> as_int_matrix([[1, 2], [3, 4]]).shape
    (2, 2)
    """
    M = _as_2d(rows)
    out = np.empty(M.shape, dtype=object)
    for idx, value in np.ndenumerate(M):
        out[idx] = _to_int(value)
    return out


def as_rat_matrix(rows):
    """Convert a nested sequence into a RatMatrix of normalized Fractions"""
    M = _as_2d(rows)
    out = np.empty(M.shape, dtype=object)
    for idx, value in np.ndenumerate(M):
        out[idx] = _to_fraction(value)
    return out


def as_rat_vector(values):
    """A RatVector as a tuple of normalized Fractions"""
    return tuple(_to_fraction(v) for v in values)


def identity(n):
    """The n x n identity IntMatrix"""
    M = zeros(n, n)
    for i in range(n):
        M[i, i] = 1
    return M


def zeros(rows, cols):
    """An all-zero IntMatrix"""
    M = np.empty((rows, cols), dtype=object)
    M.fill(0)
    return M


def is_zero(M):
    """True if every entry of M is zero"""
    return all(v == 0 for v in np.asarray(M, dtype=object).flat)


def is_symmetric(M):
    """True if M is square and equal to its transpose"""
    M = np.asarray(M, dtype=object)
    if (M.ndim != 2) or (M.shape[0] != M.shape[1]):
        return False
    n = M.shape[0]
    return all(M[i, j] == M[j, i] for i in range(n) for j in range(i + 1, n))


def mat_mul(A, B):
    """Exact matrix product

    Parameters
    ----------
    A, B : np.ndarray
        Integer or rational object matrices with A.cols == B.rows.

    Returns
    -------
    np.ndarray
        The product, with no rounding.

    Examples
    --------
    >>> mat_mul(as_int_matrix([[1, 2], [3, 4]]), as_int_matrix([[0], [1]]))
    array([[2],
           [4]], dtype=object)
    """
    A = np.asarray(A, dtype=object)
    B = np.asarray(B, dtype=object)
    if (A.ndim != 2) or (B.ndim != 2):
        raise ValueError("mat_mul requires 2-D matrices")
    if A.shape[1] != B.shape[0]:
        raise ValueError(
            f"Dimension mismatch: {A.shape} cannot multiply {B.shape}"
        )
    if A.shape[1] == 0:
        return zeros(A.shape[0], B.shape[1])
    return A.dot(B)


def is_diag_dominant(V):
    """Check that V is symmetric and diagonally dominant

    That is, for every row i the sum of the absolute values of the
    off-diagonal entries is at most V[i, i].

    Parameters
    ----------
    V : np.ndarray
        Square integer or rational matrix.

    Returns
    -------
    bool
        False, with a debug message, for non-square input.
    """
    V = np.asarray(V, dtype=object)
    if (V.ndim != 2) or (V.shape[0] != V.shape[1]):
        module_logger.debug(f"is_diag_dominant: non-square shape {V.shape}")
        return False
    if not is_symmetric(V):
        module_logger.debug("is_diag_dominant: matrix is not symmetric")
        return False
    n = V.shape[0]
    for i in range(n):
        off = sum(abs(V[i, j]) for j in range(n) if j != i)
        if off > V[i, i]:
            module_logger.debug(
                f"is_diag_dominant: row {i} has {off} > {V[i, i]}"
            )
            return False
    return True


def row_echelon(M):
    """Row echelon form over the rationals

    Returns
    -------
    rows : list of list of Fraction
        The echelon rows (a copy, M is untouched).
    pivots : list of int
        Pivot column of each nonzero row.
    """
    rows = [[_to_fraction(v) for v in row] for row in np.asarray(M).tolist()]
    pivots = []
    if len(rows) == 0:
        return rows, pivots
    n_rows, n_cols = len(rows), len(rows[0])
    r = 0
    for c in range(n_cols):
        for i in range(r, n_rows):
            if rows[i][c] != 0:
                break
        else:
            continue
        rows[r], rows[i] = rows[i], rows[r]
        p = rows[r][c]
        for i in range(r + 1, n_rows):
            f = rows[i][c]
            if f == 0:
                continue
            f = f / p
            rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == n_rows:
            break
    return rows, pivots


def rational_rank(M):
    """Rank over the rationals by exact Gaussian elimination

    Examples
    --------
    >>> rational_rank([[1, 2], [2, 4]])
    1
    """
    M = np.asarray(M, dtype=object)
    if M.size == 0:
        return 0
    _, pivots = row_echelon(M)
    return len(pivots)


def determinant(M):
    """Exact determinant of a square matrix"""
    M = np.asarray(M, dtype=object)
    if (M.ndim != 2) or (M.shape[0] != M.shape[1]):
        raise ValueError(f"determinant requires a square matrix: {M.shape}")
    n = M.shape[0]
    rows = [[_to_fraction(v) for v in row] for row in M.tolist()]
    det = Fraction(1)
    for c in range(n):
        for i in range(c, n):
            if rows[i][c] != 0:
                break
        else:
            return Fraction(0)
        if i != c:
            rows[c], rows[i] = rows[i], rows[c]
            det = -det
        p = rows[c][c]
        det *= p
        for i in range(c + 1, n):
            f = rows[i][c]
            if f != 0:
                f = f / p
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[c])]
    return det


def inverse(M):
    """Exact inverse by Gauss-Jordan elimination

    Raises
    ------
    ValueError
        If M is singular or not square.
    """
    M = np.asarray(M, dtype=object)
    if (M.ndim != 2) or (M.shape[0] != M.shape[1]):
        raise ValueError(f"inverse requires a square matrix: {M.shape}")
    n = M.shape[0]
    rows = [
        [_to_fraction(v) for v in row]
        + [Fraction(int(i == j)) for j in range(n)]
        for i, row in enumerate(M.tolist())
    ]
    for c in range(n):
        for i in range(c, n):
            if rows[i][c] != 0:
                break
        else:
            raise ValueError("Singular matrix")
        rows[c], rows[i] = rows[i], rows[c]
        p = rows[c][c]
        rows[c] = [v / p for v in rows[c]]
        for i in range(n):
            if (i != c) and (rows[i][c] != 0):
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[c])]
    return as_rat_matrix([row[n:] for row in rows])


def ldl_decomposition(M):
    """Exact LDL^T decomposition of a symmetric matrix, without pivoting

    Returns
    -------
    L : np.ndarray
        Unit lower triangular RatMatrix.
    D : list of Fraction
        The pivots.

    Raises
    ------
    ValueError
        When a zero pivot is met before the last row.
    """
    M = as_rat_matrix(M)
    n = M.shape[0]
    L = as_rat_matrix(identity(n))
    D = []
    for j in range(n):
        d = M[j, j] - sum(L[j, k] ** 2 * D[k] for k in range(j))
        D.append(d)
        if j == n - 1:
            break
        if d == 0:
            raise ValueError(f"Zero pivot at row {j}")
        for i in range(j + 1, n):
            s = M[i, j] - sum(L[i, k] * L[j, k] * D[k] for k in range(j))
            L[i, j] = s / d
    return L, D


def is_positive_definite(M):
    """True if all LDL^T pivots of the symmetric matrix M are positive"""
    M = as_rat_matrix(M)
    n = M.shape[0]
    L = [[Fraction(0)] * n for _ in range(n)]
    D = []
    for j in range(n):
        d = M[j, j] - sum(L[j][k] ** 2 * D[k] for k in range(j))
        if d <= 0:
            return False
        D.append(d)
        for i in range(j + 1, n):
            s = M[i, j] - sum(L[i][k] * L[j][k] * D[k] for k in range(j))
            L[i][j] = s / d
    return True


def _pivot(T, basis, r, c):
    p = T[r][c]
    T[r] = [v / p for v in T[r]]
    for i, row in enumerate(T):
        if (i != r) and (row[c] != 0):
            f = row[c]
            T[i] = [a - f * b for a, b in zip(row, T[r])]
    basis[r] = c


def _bland(T, basis, cost, allowed):
    """Maximize cost over tableau rows [A | b] with Bland's rule"""
    ncols = len(cost)
    while True:
        in_basis = set(basis)
        entering = None
        for j in range(ncols):
            if (not allowed[j]) or (j in in_basis):
                continue
            rc = cost[j] - sum(
                cost[basis[i]] * T[i][j] for i in range(len(T))
            )
            if rc > 0:
                entering = j
                break
        if entering is None:
            return "optimal"

        leaving, best = None, None
        for i, row in enumerate(T):
            if row[entering] > 0:
                key = (row[-1] / row[entering], basis[i])
                if (best is None) or (key < best):
                    best, leaving = key, i
        if leaving is None:
            return "unbounded"
        module_logger.debug(f"Pivot: column {entering} enters at {leaving}")
        _pivot(T, basis, leaving, entering)


def lp_max_exact(constraints, objective):
    """Maximize a linear objective exactly with a rational simplex

    Solves max c^T x subject to a^T x <= b for every (a, b) in
    `constraints`, with x free. Bounds such as 0 <= x <= 1 are given as
    ordinary constraints. A two-phase tableau method with Bland's rule is
    used, so the pivot sequence and the result are reproducible.

    Parameters
    ----------
    constraints : list of (sequence, number)
        Each pair (a, b) means a^T x <= b.
    objective : sequence
        The vector c.

    Returns
    -------
    Fraction or UNBOUNDED
        The optimal value, or the sentinel `UNBOUNDED`.

    Raises
    ------
    InfeasibleError
        If no x satisfies the constraints.

    Examples
    --------
    >>> lp_max_exact([([1], 1), ([-1], 0)], [1])
    Fraction(1, 1)
    """
    c = [_to_fraction(v) for v in objective]
    n = len(c)
    system = []
    for a, b in constraints:
        a = [_to_fraction(v) for v in a]
        if len(a) != n:
            raise ValueError(
                f"Constraint of dimension {len(a)} for objective {n}"
            )
        system.append((a, _to_fraction(b)))
    m = len(system)
    nvar = 2 * n + m

    artificial = [i for i, (a, b) in enumerate(system) if b < 0]
    na = len(artificial)
    T, basis = [], []
    for i, (a, b) in enumerate(system):
        slack = [Fraction(0)] * m
        slack[i] = Fraction(1)
        row = a + [-v for v in a] + slack
        extra = [Fraction(0)] * na
        if b < 0:
            row = [-v for v in row]
            b = -b
            k = artificial.index(i)
            extra[k] = Fraction(1)
            basis.append(nvar + k)
        else:
            basis.append(2 * n + i)
        T.append(row + extra + [b])

    ncols = nvar + na
    if na > 0:
        module_logger.debug(f"Phase 1 with {na} artificial variables")
        cost = [Fraction(0)] * nvar + [Fraction(-1)] * na
        _bland(T, basis, cost, [True] * ncols)
        value = sum(cost[basis[i]] * T[i][-1] for i in range(m))
        if value < 0:
            raise InfeasibleError("The constraints have no feasible point")
        for i in range(m):
            if basis[i] >= nvar:
                for j in range(nvar):
                    if T[i][j] != 0:
                        _pivot(T, basis, i, j)
                        break

    cost = c + [-v for v in c] + [Fraction(0)] * (m + na)
    allowed = [True] * nvar + [False] * na
    if _bland(T, basis, cost, allowed) == "unbounded":
        return UNBOUNDED
    return sum((cost[basis[i]] * T[i][-1] for i in range(m)), Fraction(0))


def parse_number(text):
    """Parse an integer or a rational p/q from text"""
    text = text.strip()
    if "/" in text:
        return Fraction(text)
    return int(text)


def read_matrix(path):
    """Read a CSV matrix

    One row per line, integer or p/q entries separated by commas, no
    header, UTF-8, LF or CRLF line endings, no trailing comma.

    Raises
    ------
    ValueError
        Ragged rows, empty cells or entries that are not numbers.
    """
    module_logger.debug(f"Reading matrix: {path}")
    try:
        frame = pd.read_csv(
            path,
            header=None,
            index_col=False,
            dtype=str,
            keep_default_na=False,
            skip_blank_lines=True,
            encoding="utf-8",
        )
    except pd.errors.EmptyDataError:
        return zeros(0, 0)
    except pd.errors.ParserError as err:
        raise ValueError(f"Malformed CSV matrix {path}: {err}")

    rows = []
    for values in frame.itertuples(index=False, name=None):
        row = []
        for v in values:
            if (not isinstance(v, str)) or (v.strip() == ""):
                raise ValueError(f"Empty cell in CSV matrix {path}")
            try:
                row.append(parse_number(v))
            except ValueError:
                raise ValueError(f"Not a number in {path}: {v!r}")
        rows.append(row)
    return _as_2d(rows)


def write_matrix(path, M):
    """Write a matrix in the CSV format read by `read_matrix`"""
    module_logger.debug(f"Writing matrix: {path}")
    M = np.asarray(M, dtype=object)
    frame = pd.DataFrame([[str(v) for v in row] for row in M.tolist()])
    frame.to_csv(path, header=False, index=False, lineterminator="\n")
