"""Search for candidate l-minimal graphs

The pipeline grows (l-1)-minimal seeds into 3l-vertex candidates by joining
a new vertex and properly 2-stretching it, pairs every candidate with its
full-support facets, keeps the pairs that are minimal under edge
containment, and expands certified graphs into their edge-subgraph
closure. Stretched cliques, the graphs obtained from K_n by 2-stretching
some of its vertices, are enumerated here as well.

Every stage returns its result sorted by canonical form, so that identical
inputs give identical stage files.
"""

from dataclasses import dataclass
from itertools import combinations
import logging
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import pandas as pd

from .graphs import (
    Graph,
    StretchSpec,
    StretchedCliqueSpec,
    canonical_form,
    canonical_order,
    clique_number,
    delete_edges,
    graph6_decode,
    graph6_encode,
    join_vertex,
    max_clique,
    stretch_vertex,
)
from .polytope import (
    Inequality,
    full_support_facets,
    is_facet,
    is_valid_for_stab,
    max_weight_stable_set,
)
from .utils import parallel_map


module_logger = logging.getLogger("LSPlus.search")

# Largest graph handed to the full facet enumeration by default
FULL_ENUMERATION_LIMIT = 10

JOIN_MODES = ("any", "all")


@dataclass(frozen=True)
class Provenance:
    """How a candidate was built from its seed

    Attributes
    ----------
    seed : str
        Canonical graph6 of the seed.
    join : tuple of int
        Seed vertices joined to the new vertex, in the seed's canonical
        labelling.
    stretch : StretchSpec
        The proper 2-stretching of the new vertex.
    """

    seed: str
    join: Tuple[int, ...]
    stretch: StretchSpec

    def to_record(self) -> Dict[str, str]:
        """Text fields, with 1-based vertices"""
        return {
            "seed": self.seed,
            "join": " ".join(str(v + 1) for v in self.join),
            "parts": "|".join(
                " ".join(str(v + 1) for v in sorted(p))
                for p in self.stretch.parts
            ),
        }

    @classmethod
    def from_record(cls, seed: str, join: str, parts: str):
        """Inverse of `to_record`"""
        n0 = graph6_decode(seed).n
        vertices = tuple(int(v) - 1 for v in join.split())
        spec = StretchSpec(
            n0,
            tuple(
                frozenset(int(v) - 1 for v in p.split())
                for p in parts.split("|")
            ),
        )
        return cls(seed, vertices, spec)


@dataclass(frozen=True)
class CandidatePair:
    """A candidate graph with one of its full-support facets"""

    graph: Graph
    inequality: Inequality
    provenance: Optional[Provenance] = None

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def key(self) -> Tuple[int, Tuple[int, ...], int]:
        return (self.graph.n, self.inequality.a, self.inequality.beta)

    @property
    def edge_mask(self) -> int:
        return edge_mask(self.graph)


def edge_mask(G: Graph) -> int:
    """Edge set as a bitmask, bit i * n + j for the edge (i, j), i < j"""
    return sum(1 << (i * G.n + j) for i, j in G.edges())


def _two_part_covers(neighbors: Sequence[int], proper: bool = True):
    """Unordered pairs (A1, A2) with A1 | A2 equal to the neighborhood

    A proper pair has both parts nonempty and strictly smaller than the
    neighborhood.
    """
    s = len(neighbors)
    full = (1 << s) - 1

    def part(m):
        return frozenset(neighbors[k] for k in range(s) if (m >> k) & 1)

    for m1 in range(full + 1):
        rest = full ^ m1
        sub = m1
        while True:
            m2 = rest | sub
            if m2 >= m1:
                if (not proper) or ((m1 != full) and (m2 != full)):
                    yield (part(m1), part(m2))
            if sub == 0:
                break
            sub = (sub - 1) & m1


def _join_sets(n0: int, join_mode: str):
    if join_mode == "all":
        return [tuple(range(n0))]
    return [
        S for size in range(1, n0 + 1) for S in combinations(range(n0), size)
    ]


def _stretch_join(args):
    """Candidates from one seed joined to one vertex set"""
    seed, seed_form, S = args
    n0 = seed.n
    H = join_vertex(seed, S)
    found = []
    for parts in _two_part_covers(list(S)):
        spec = StretchSpec(n0, parts)
        G = stretch_vertex(H, spec)
        found.append((canonical_form(G), G, Provenance(seed_form, S, spec)))
    return found


def generate_stretch_candidates(
    seeds: Sequence[Graph],
    ell: int,
    join_mode: str = "any",
    provenance: bool = False,
    npes: Optional[int] = None,
):
    """Candidate l-minimal graphs grown from (l-1)-minimal seeds

    A new vertex w is joined to a nonempty set of seed vertices (every set
    with join_mode "any", only the whole seed with "all") and then
    properly 2-stretched. Candidates keep the construction labelling: the
    seed in its canonical order, then w as v_0 and the new v_1 and v_2.

    Parameters
    ----------
    seeds : sequence of Graph
        Graphs on 3 (ell - 1) vertices.
    ell : int
        Target rank, at least 2.
    join_mode : {"any", "all"}
    provenance : bool, optional
        If True return (Graph, Provenance) tuples.
    npes : int, optional
        Parallel jobs.

    Returns
    -------
    list
        Non-isomorphic candidates sorted by canonical form. The first
        construction found is kept for each isomorphism class.

    Examples
    --------
    >>> len(generate_stretch_candidates([Graph.complete(3)], 2)) > 0
    True
    """
    if ell < 2:
        raise ValueError(f"Candidates need ell >= 2, got {ell}")
    if join_mode not in JOIN_MODES:
        raise ValueError(f"join_mode must be one of {JOIN_MODES}")
    n0 = 3 * (ell - 1)
    tasks = []
    for seed in seeds:
        if seed.n != n0:
            raise ValueError(
                f"Seeds for ell={ell} have {n0} vertices, got {seed.n}"
            )
        seed = seed.relabel(canonical_order(seed))
        seed_form = graph6_encode(seed)
        tasks.extend((seed, seed_form, S) for S in _join_sets(n0, join_mode))

    module_logger.debug(f"Stretching {len(tasks)} joined seeds")
    found = {}
    for chunk in parallel_map(_stretch_join, tasks, npes=npes):
        for form, G, prov in chunk:
            found.setdefault(form, (G, prov))
    module_logger.info(
        f"{len(found)} non-isomorphic candidates on {n0 + 3} vertices"
    )
    if provenance:
        return [found[form] for form in sorted(found)]
    return [found[form][0] for form in sorted(found)]


def candidate_facets(G: Graph, max_twos: int = 1) -> List[Inequality]:
    """Full-support facets among {1, 2}-coefficient inequalities

    Tests e^T x <= alpha(G) and every vector of ones with at most
    `max_twos` coefficients raised to 2, with beta the weighted stability
    number. Exact at any size, but only finds facets of this shape.
    """
    facets = []
    for size in range(max_twos + 1):
        for T in combinations(range(G.n), size):
            a = tuple(2 if i in T else 1 for i in range(G.n))
            beta, _ = max_weight_stable_set(G, a)
            ineq = Inequality(a, int(beta))
            if is_facet(G, ineq):
                facets.append(ineq)
    return facets


def _default_facets(G: Graph) -> List[Inequality]:
    if G.n <= FULL_ENUMERATION_LIMIT:
        return full_support_facets(G)
    return candidate_facets(G)


def _pairs_of(args):
    G, prov, source = args
    return [
        CandidatePair(G, f, prov)
        for f in source(G)
        if all(v > 0 for v in f.a)
    ]


def facet_pair_extraction(
    graphs,
    facet_source: Optional[Callable[[Graph], List[Inequality]]] = None,
    npes: Optional[int] = None,
) -> List[CandidatePair]:
    """One pair per candidate graph and full-support facet

    Parameters
    ----------
    graphs : iterable
        Graphs, or (Graph, Provenance) tuples.
    facet_source : callable, optional
        Facets of a graph. Default is the full enumeration up to
        FULL_ENUMERATION_LIMIT vertices and `candidate_facets` beyond.
        It must be picklable to run in parallel.
    npes : int, optional
    """
    if facet_source is None:
        facet_source = _default_facets
    tasks = []
    for item in graphs:
        G, prov = item if isinstance(item, tuple) else (item, None)
        tasks.append((G, prov, facet_source))
    chunks = parallel_map(_pairs_of, tasks, npes=npes)
    pairs = [p for chunk in chunks for p in chunk]

    counts = pd.Series(
        [graph6_encode(p.graph) for p in pairs], dtype=object
    ).value_counts()
    module_logger.info(
        f"{len(pairs)} pairs from {len(tasks)} graphs,"
        f" {int((counts > 1).sum())} graphs with several facets"
    )
    return pairs


class PartialOrderIndex:
    """Pairs ordered by edge containment for a shared inequality

    (G, a) <= (G', a') when both have the same vertex count and inequality
    in the construction labelling and E(G) is a subset of E(G').
    """

    logger = logging.getLogger("LSPlus.search.PartialOrderIndex")

    def __init__(self, pairs: Sequence[CandidatePair] = ()):
        self._groups: Dict[tuple, List[Tuple[int, CandidatePair]]] = {}
        for pair in pairs:
            self.add(pair)

    def __len__(self):
        return sum(len(g) for g in self._groups.values())

    def add(self, pair: CandidatePair):
        self._groups.setdefault(pair.key, []).append((pair.edge_mask, pair))

    @staticmethod
    def leq(p: CandidatePair, q: CandidatePair) -> bool:
        return (p.key == q.key) and (p.edge_mask & ~q.edge_mask) == 0

    def minimal(self) -> List[CandidatePair]:
        """Pairs with no strictly smaller pair, first of any duplicates"""
        result = []
        for key in sorted(self._groups):
            members = self._groups[key]
            seen = set()
            for m, pair in members:
                if m in seen:
                    continue
                seen.add(m)
                if any((o != m) and (o & ~m) == 0 for o, _ in members):
                    continue
                result.append(pair)
        self.logger.debug(f"{len(result)} minimal out of {len(self)} pairs")
        return result


def minimal_elements(pairs: Sequence[CandidatePair]) -> List[CandidatePair]:
    """Antichain of the pairs minimal under edge containment

    If a^T x <= beta survives l - 1 rounds of LS+ on G, it does so on
    every supergraph G' carrying the same facet, so only minimal pairs need
    a certificate.
    """
    return PartialOrderIndex(pairs).minimal()


def _coefficient_cells(ineq: Inequality):
    groups: Dict[int, List[int]] = {}
    for i, v in enumerate(ineq.a):
        groups.setdefault(v, []).append(i)
    return [groups[v] for v in sorted(groups)]


def edge_subgraph_closure(G: Graph, ineq: Inequality) -> List[Graph]:
    """Edge subgraphs of G on which the inequality stays valid

    Deleting edges only adds stable sets, so the search prunes at the first
    invalid subgraph. Subgraphs are explored up to isomorphisms preserving
    the coefficients and reported up to isomorphism, in G's labelling.

    Raises
    ------
    ValueError
        If the inequality is not valid for STAB(G).
    """
    if not is_valid_for_stab(G, ineq):
        raise ValueError(f"{ineq} is not valid for STAB(G)")
    cells = _coefficient_cells(ineq)
    seen = {canonical_form(G, cells)}
    found = {canonical_form(G): G}
    stack = [G]
    while stack:
        H = stack.pop()
        for edge in H.edges():
            K = delete_edges(H, [edge])
            key = canonical_form(K, cells)
            if key in seen:
                continue
            seen.add(key)
            if is_valid_for_stab(K, ineq):
                stack.append(K)
                found.setdefault(canonical_form(K), K)
    return [found[form] for form in sorted(found)]


def _closure_task(args):
    G, ineq = args
    return [(canonical_form(H), H) for H in edge_subgraph_closure(G, ineq)]


def merge_closures(items, npes: Optional[int] = None) -> List[Graph]:
    """Union of the closures of (graph, inequality) items, up to isomorphism"""
    found = {}
    for chunk in parallel_map(_closure_task, list(items), npes=npes):
        for form, H in chunk:
            found.setdefault(form, H)
    module_logger.info(f"Closure holds {len(found)} non-isomorphic graphs")
    return [found[form] for form in sorted(found)]


def _state_cells(spec: StretchedCliqueSpec, d: int):
    """Colouring that keeps roles fixed while stretching the next vertices"""
    stretched = set(spec.D)
    future = [[j] for j in range(d) if j not in stretched]
    never = [list(range(d, spec.n))]
    v0 = [[spec.associated[i][0] for i in spec.D]]
    outer = [[v for i in spec.D for v in spec.associated[i][1:]]]
    return future + never + v0 + outer


def _hat_possible(spec: StretchedCliqueSpec, d: int) -> bool:
    """No stretched pair, present or future, already has two cross edges"""
    for i, j in combinations(range(d), 2):
        if (i in spec.D) and (spec.cross_edges(i, j) > 1):
            return False
    return True


def _expand_state(args):
    spec, j, d, hat, proper = args
    G = spec.graph
    found = []
    for parts in _two_part_covers(G.neighbors(j), proper=proper):
        H = stretch_vertex(G, StretchSpec(j, parts))
        associated = dict(spec.associated)
        associated[j] = (j, G.n, G.n + 1)
        child = StretchedCliqueSpec(
            n=spec.n,
            D=spec.D + (j,),
            graph=H,
            associated=associated,
            parts={**spec.parts, j: parts},
        )
        if hat and not _hat_possible(child, d):
            continue
        found.append((canonical_form(H, _state_cells(child, d)), child))
    return found


def generate_stretched_cliques(
    n: int,
    d: int,
    hat: bool = False,
    sparse: bool = False,
    max_omega: Optional[int] = None,
    min_omega: Optional[int] = None,
    facet_only: bool = False,
    proper: bool = True,
    npes: Optional[int] = None,
) -> List[StretchedCliqueSpec]:
    """Graphs obtained from K_n by 2-stretching the vertices 0, ..., d - 1

    Parameters
    ----------
    n, d : int
        Clique size and number of stretched vertices, 0 <= d <= n.
    hat : bool, optional
        Keep only members with exactly one cross edge between every two
        stretched vertices.
    sparse : bool, optional
        Keep only members with n (n - 1) / 2 + 2 d edges.
    max_omega, min_omega : int, optional
        Bounds on the clique number.
    facet_only : bool, optional
        Keep only members where e^T x <= d + 1 is a facet of STAB(G).
    proper : bool, optional
        Restrict every stretching to proper ones, default True.
    npes : int, optional

    Returns
    -------
    list of StretchedCliqueSpec
        Non-isomorphic members sorted by canonical form.
    """
    if n < 3:
        raise ValueError(f"Stretched cliques need n >= 3, got {n}")
    if not (0 <= d <= n):
        raise ValueError(f"Cannot stretch {d} vertices of K_{n}")

    states = [
        StretchedCliqueSpec(
            n=n,
            D=(),
            graph=Graph.complete(n),
            associated={i: (i,) for i in range(n)},
            parts={},
        )
    ]
    for j in range(d):
        tasks = [(s, j, d, hat, proper) for s in states]
        unique = {}
        for chunk in parallel_map(_expand_state, tasks, npes=npes):
            for key, child in chunk:
                unique.setdefault(key, child)
        states = [unique[key] for key in sorted(unique)]
        module_logger.debug(f"{len(states)} states after stretching {j}")

    members = {}
    for spec in states:
        G = spec.graph
        if sparse and not spec.is_sparse():
            continue
        if hat and not spec.is_hat():
            continue
        omega = clique_number(G)
        if (max_omega is not None) and (omega > max_omega):
            continue
        if (min_omega is not None) and (omega < min_omega):
            continue
        if facet_only and not is_facet(G, Inequality.ones(G.n, d + 1)):
            continue
        members.setdefault(canonical_form(G), spec)
    module_logger.info(f"{len(members)} stretched cliques for n={n}, d={d}")
    return [members[form] for form in sorted(members)]


def sparse_reduction(spec: StretchedCliqueSpec) -> StretchedCliqueSpec:
    """Sparse edge subgraph with the same clique number

    Keeps a single edge between the vertices associated with every two
    original vertices, preferring one inside a fixed maximum clique. The
    stretching parts are not carried over.

    Raises
    ------
    ValueError
        If the clique number is below 3.
    """
    G = spec.graph
    K = set(max_clique(G))
    if len(K) < 3:
        raise ValueError("The reduction needs a clique of size 3")
    origin = {v: i for i, group in spec.associated.items() for v in group}
    kept = []
    between: Dict[Tuple[int, int], List[Tuple[int, int]]] = {}
    for u, w in G.edges():
        i, j = sorted((origin[u], origin[w]))
        if i == j:
            kept.append((u, w))
        else:
            between.setdefault((i, j), []).append((u, w))
    for key in sorted(between):
        edges = between[key]
        inside = [e for e in edges if (e[0] in K) and (e[1] in K)]
        kept.append((inside or edges)[0])
    return StretchedCliqueSpec(
        n=spec.n,
        D=spec.D,
        graph=Graph.from_edges(G.n, kept),
        associated=dict(spec.associated),
        parts={},
    )


def write_graphs(path: str, graphs):
    """One graph6 string per line"""
    with open(path, "w") as fp:
        for item in graphs:
            G = item[0] if isinstance(item, tuple) else item
            fp.write(graph6_encode(G) + "\n")


def read_graphs(path: str) -> List[Graph]:
    """Graphs of a stage file, skipping blank lines

    Raises
    ------
    Graph6Error
        On a malformed line.
    """
    with open(path) as fp:
        return [graph6_decode(line) for line in fp if line.strip()]


PAIR_COLUMNS = ["graph6", "a", "beta", "seed", "join", "parts"]


def write_pairs(path: str, pairs: Sequence[CandidatePair]):
    """Pairs as CSV: graph6, space separated a, beta and the provenance"""
    rows = []
    for p in pairs:
        row = {
            "graph6": graph6_encode(p.graph),
            "a": " ".join(str(v) for v in p.inequality.a),
            "beta": p.inequality.beta,
            "seed": "",
            "join": "",
            "parts": "",
        }
        if p.provenance is not None:
            row.update(p.provenance.to_record())
        rows.append(row)
    pd.DataFrame(rows, columns=PAIR_COLUMNS).to_csv(path, index=False)


def read_pairs(path: str) -> List[CandidatePair]:
    """Inverse of `write_pairs`

    Raises
    ------
    ValueError
        On a missing column or an inequality that does not fit its graph.
    """
    table = pd.read_csv(path, dtype=str, keep_default_na=False)
    missing = set(PAIR_COLUMNS) - set(table.columns)
    if missing:
        raise ValueError(f"Missing columns in {path}: {sorted(missing)}")
    pairs = []
    for row in table.itertuples(index=False):
        G = graph6_decode(row.graph6)
        ineq = Inequality(tuple(int(v) for v in row.a.split()), int(row.beta))
        if ineq.n != G.n:
            raise ValueError(f"Inequality {ineq} does not fit {row.graph6}")
        prov = None
        if row.seed:
            prov = Provenance.from_record(row.seed, row.join, row.parts)
        pairs.append(CandidatePair(G, ineq, prov))
    return pairs
