"""Stable set polytope STAB(G) and its fractional relaxation FRAC(G)

Points of the homogenized cones are tuples of n + 1 exact rationals with the
homogenizing coordinate first. Inequalities a^T x <= beta have integer
coefficients over the vertices of a graph.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd
import logging
from typing import List, Sequence, Tuple

from .graphs import Graph, _bits, _popcount
from .numerics import as_rat_vector, lp_max_exact, rational_rank


module_logger = logging.getLogger("LSPlus.polytope")

ConePoint = Tuple[Fraction, ...]


@dataclass(frozen=True)
class Inequality:
    """a^T x <= beta with integer a and beta

    Examples
    --------
    >>> Inequality((1, 1, 1), 1).support()
    [0, 1, 2]
    """

    a: Tuple[int, ...]
    beta: int

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(int(v) for v in self.a))
        object.__setattr__(self, "beta", int(self.beta))

    @property
    def n(self) -> int:
        return len(self.a)

    @classmethod
    def ones(cls, n: int, beta: int):
        """The rank inequality e^T x <= beta"""
        return cls((1,) * n, beta)

    def support(self) -> List[int]:
        return [i for i, v in enumerate(self.a) if v != 0]

    @property
    def is_full_support(self) -> bool:
        return all(v != 0 for v in self.a)

    @property
    def is_nonnegativity(self) -> bool:
        """True for -x_i <= 0"""
        return (
            (self.beta == 0)
            and (sorted(self.a)[:1] == [-1])
            and (sum(abs(v) for v in self.a) == 1)
        )

    def evaluate(self, x: Sequence) -> Fraction:
        """a^T x, exactly"""
        if len(x) != self.n:
            raise ValueError(f"Expected {self.n} coordinates, got {len(x)}")
        terms = (ai * Fraction(xi) for ai, xi in zip(self.a, x))
        return sum(terms, Fraction(0))

    def violation(self, y: Sequence) -> Fraction:
        """(-beta, a^T) y for a homogenized point y"""
        y = as_rat_vector(y)
        return -self.beta * y[0] + self.evaluate(y[1:])

    def normalized(self):
        """Scaled to coprime integer coefficients"""
        g = reduce(gcd, self.a, abs(self.beta))
        if g <= 1:
            return self
        return Inequality(tuple(v // g for v in self.a), self.beta // g)

    def to_row(self) -> List[int]:
        return list(self.a) + [self.beta]

    @classmethod
    def from_row(cls, row: Sequence[int]):
        """Inverse of `to_row`: coefficients followed by beta"""
        row = [int(v) for v in row]
        if len(row) < 1:
            raise ValueError("An inequality row needs at least beta")
        return cls(tuple(row[:-1]), row[-1])

    def __str__(self):
        terms = " + ".join(
            (f"x{i + 1}" if v == 1 else f"{v}*x{i + 1}")
            for i, v in enumerate(self.a)
            if v != 0
        )
        return f"{terms or '0'} <= {self.beta}"


def _stable_masks(G: Graph):
    """All stable sets as bitmasks, in no particular order"""
    out = []

    def branch(chosen, candidates):
        if candidates == 0:
            out.append(chosen)
            return
        v = (candidates & -candidates).bit_length() - 1
        bit = 1 << v
        branch(chosen, candidates & ~bit)
        branch(chosen | bit, candidates & ~bit & ~G.adjacency[v])

    branch(0, G.vertex_mask)
    return out


def _sorted_masks(masks):
    return sorted(masks, key=lambda m: (_popcount(m), list(_bits(m))))


def enumerate_stable_sets(G: Graph) -> List[Tuple[int, ...]]:
    """Incidence vectors of all stable sets, by size then lexicographic

    Examples
    --------
    >>> len(enumerate_stable_sets(Graph.complete(3)))
    4
    """
    return [
        tuple((m >> i) & 1 for i in range(G.n))
        for m in _sorted_masks(_stable_masks(G))
    ]


def format_stable_set(chi: Sequence[int]) -> str:
    """Bitstring line of an incidence vector"""
    return "".join(str(int(v)) for v in chi)


def max_weight_stable_set(
    G: Graph, weights: Sequence
) -> Tuple[Fraction, List[int]]:
    """Maximum weight stable set by branch and bound

    Vertices with nonpositive weight never improve a solution and are left
    out. The bound is the sum of the heaviest weight over a greedy clique
    cover of the candidates.

    Returns
    -------
    value : Fraction
    vertices : list of int
    """
    if len(weights) != G.n:
        raise ValueError(f"Expected {G.n} weights, got {len(weights)}")
    w = [Fraction(v) for v in weights]
    adjacency = G.adjacency
    best = [Fraction(0), 0]

    def bound(P):
        total = Fraction(0)
        while P:
            v = (P & -P).bit_length() - 1
            clique, heaviest = 1 << v, w[v]
            common = adjacency[v] & P
            while common:
                u = (common & -common).bit_length() - 1
                clique |= 1 << u
                heaviest = max(heaviest, w[u])
                common &= adjacency[u]
            total += heaviest
            P &= ~clique
        return total

    def expand(value, chosen, P):
        if value > best[0]:
            best[0], best[1] = value, chosen
        if P == 0 or value + bound(P) <= best[0]:
            return
        v = (P & -P).bit_length() - 1
        bit = 1 << v
        expand(value + w[v], chosen | bit, P & ~bit & ~adjacency[v])
        expand(value, chosen, P & ~bit)

    positive = sum(1 << i for i in range(G.n) if w[i] > 0)
    expand(Fraction(0), 0, positive)
    return best[0], list(_bits(best[1]))


def is_valid_for_stab(G: Graph, ineq: Inequality) -> bool:
    """True iff a^T chi_S <= beta for every stable set S"""
    if ineq.n != G.n:
        raise ValueError(f"Inequality over {ineq.n} vertices for n={G.n}")
    value, _ = max_weight_stable_set(G, ineq.a)
    return value <= ineq.beta


def tight_stable_sets(G: Graph, ineq: Inequality) -> List[int]:
    """Stable sets, as bitmasks, satisfying the inequality with equality"""
    return [
        m
        for m in _sorted_masks(_stable_masks(G))
        if sum(ineq.a[i] for i in _bits(m)) == ineq.beta
    ]


def is_facet(G: Graph, ineq: Inequality) -> bool:
    """True iff the valid inequality induces a facet of STAB(G)

    STAB(G) is full dimensional, so this holds iff the homogenized tight
    incidence vectors have rank n.

    Raises
    ------
    ValueError
        If the inequality is not valid for STAB(G).
    """
    if not is_valid_for_stab(G, ineq):
        raise ValueError(f"{ineq} is not valid for STAB(G)")
    rows = [
        [1] + [(m >> i) & 1 for i in range(G.n)]
        for m in tight_stable_sets(G, ineq)
    ]
    if len(rows) < G.n:
        return False
    return rational_rank(rows) == G.n


def _normalize_ray(r):
    g = reduce(gcd, r, 0)
    if g > 1:
        return tuple(v // g for v in r)
    return tuple(r)


def enumerate_facets(G: Graph) -> List[Inequality]:
    """All facets of STAB(G) by double description

    The homogenized incidence vectors (1, chi_S) are inserted in the order
    of `enumerate_stable_sets`. A ray (beta, -a) of the dual cone stands
    for a^T x <= beta. The start is the simplex spanned by the empty set
    and the singletons, whose facets are x_i >= 0 and e^T x <= 1.

    Returns
    -------
    list of Inequality
        Coprime integer facets, nonnegativity constraints first.
    """
    n = G.n
    d = n + 1
    points = [
        (1,) + tuple((m >> i) & 1 for i in range(n))
        for m in _sorted_masks(_stable_masks(G))
    ]
    if n == 0:
        return []

    rays = [(1,) + (-1,) * n] + [
        (0,) + tuple(int(i == j) for j in range(n)) for i in range(n)
    ]
    # zero set of each ray over the points inserted so far
    zeros = [sum(1 << k for k in range(1, n + 1))] + [
        sum(1 << k for k in range(n + 1) if k != i + 1) for i in range(n)
    ]

    for k in range(n + 1, len(points)):
        p = points[k]
        values = [sum(a * b for a, b in zip(r, p)) for r in rays]
        plus = [i for i, v in enumerate(values) if v > 0]
        minus = [i for i, v in enumerate(values) if v < 0]
        if not minus:
            zeros = [
                z | (1 << k) if values[i] == 0 else z
                for i, z in enumerate(zeros)
            ]
            continue

        new_rays, new_zeros = [], []
        for i, v in enumerate(values):
            if v >= 0:
                new_rays.append(rays[i])
                new_zeros.append(zeros[i] | (1 << k) if v == 0 else zeros[i])
        for i in plus:
            for j in minus:
                common = zeros[i] & zeros[j]
                if _popcount(common) < d - 2:
                    continue
                if any(
                    (zeros[m] & common) == common
                    for m in range(len(rays))
                    if m not in (i, j)
                ):
                    continue
                r = tuple(
                    values[i] * b - values[j] * a
                    for a, b in zip(rays[i], rays[j])
                )
                new_rays.append(_normalize_ray(r))
                new_zeros.append(common | (1 << k))
        rays, zeros = new_rays, new_zeros
        module_logger.debug(f"Inserted point {k}: {len(rays)} rays")

    facets = [Inequality(tuple(-v for v in r[1:]), r[0]) for r in rays]
    facets = sorted(
        set(facets),
        key=lambda f: (
            not f.is_nonnegativity,
            len(f.support()),
            [-v for v in f.a],
            f.beta,
        ),
    )
    module_logger.debug(f"{len(facets)} facets for {G}")
    return facets


def full_support_facets(G: Graph) -> List[Inequality]:
    """Facets with a > 0 on every vertex"""
    return [f for f in enumerate_facets(G) if all(v > 0 for v in f.a)]


def homogenize(x: Sequence) -> ConePoint:
    """(1, x)"""
    return (Fraction(1),) + as_rat_vector(x)


def witness(y: Sequence) -> Tuple[Fraction, ...]:
    """The point x with y = y_0 (1, x)"""
    y = as_rat_vector(y)
    if y[0] == 0:
        raise ValueError("A cone point with y_0 = 0 has no witness")
    return tuple(v / y[0] for v in y[1:])


def cone_frac_member(G: Graph, y: Sequence) -> bool:
    """True iff y lies in the homogenized cone of FRAC(G)

    Examples
    --------
    >>> cone_frac_member(Graph.complete(2), (1, 1, 1))
    False
    """
    y = as_rat_vector(y)
    if len(y) != G.n + 1:
        raise ValueError(f"Expected {G.n + 1} coordinates, got {len(y)}")
    if all(v == 0 for v in y):
        return True
    y0 = y[0]
    if y0 <= 0:
        return False
    if any((v < 0) or (v > y0) for v in y[1:]):
        return False
    return all(y[i + 1] + y[j + 1] <= y0 for i, j in G.edges())


def dominates(x1: Sequence, x2: Sequence) -> bool:
    """True iff x1 dominates x2

    Both are zero, or x1_0 > 0, x2_0 >= 0 and x2_0 x1 >= x1_0 x2
    componentwise.
    """
    x1, x2 = as_rat_vector(x1), as_rat_vector(x2)
    if len(x1) != len(x2):
        raise ValueError("Points of different dimensions")
    if all(v == 0 for v in x1) and all(v == 0 for v in x2):
        return True
    if (x1[0] <= 0) or (x2[0] < 0):
        return False
    return all(x2[0] * a >= x1[0] * b for a, b in zip(x1, x2))


def frac_constraints(G: Graph):
    """FRAC(G) as (a, b) pairs meaning a^T x <= b"""
    n = G.n

    def unit(i, s):
        return tuple(s if j == i else 0 for j in range(n))

    constraints = [(unit(i, -1), 0) for i in range(n)]
    constraints += [(unit(i, 1), 1) for i in range(n)]
    constraints += [
        (tuple(int(k in (i, j)) for k in range(n)), 1) for i, j in G.edges()
    ]
    return constraints


def frac_lp_max(G: Graph, c: Sequence) -> Fraction:
    """max c^T x over FRAC(G), exactly"""
    return lp_max_exact(frac_constraints(G), c)
