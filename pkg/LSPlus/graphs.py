"""Simple undirected graphs and the operations used to build and bound them

A Graph is an immutable value on the vertex set {0, ..., n-1}, stored as one
adjacency bitmask per vertex. Text formats (graph6, edge lists) and the
command line use 1-based labels; everything in Python is 0-based.
"""

from dataclasses import dataclass, field
from itertools import combinations
import logging
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import networkx as nx


module_logger = logging.getLogger("LSPlus.graphs")

MAX_VERTICES = 62
GRAPH6_HEADER = ">>graph6<<"


class Graph6Error(ValueError):
    """Malformed graph6 string, or a graph outside the short format"""

    pass


def _popcount(x: int) -> int:
    return bin(x).count("1")


def _bits(x: int):
    """Indices of the set bits of x, increasing"""
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


def _mask(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


class Graph:
    """A simple undirected graph on vertices 0..n-1

    Parameters
    ----------
    n : int
        Number of vertices, at most 62.
    adjacency : sequence of int
        Bit rows: bit j of adjacency[i] is set iff {i, j} is an edge.

    Examples
    --------
    >>> G = Graph.from_edges(3, [(0, 1), (1, 2), (0, 2)])
    >>> G.num_edges
    3
    """

    __slots__ = ("n", "adjacency")

    def __init__(self, n: int, adjacency: Sequence[int]):
        if (n < 0) or (n > MAX_VERTICES):
            raise ValueError(f"Graph must have 0 to {MAX_VERTICES} vertices")
        adjacency = tuple(int(row) for row in adjacency)
        if len(adjacency) != n:
            raise ValueError(f"Expected {n} adjacency rows")
        full = (1 << n) - 1
        for i, row in enumerate(adjacency):
            if row & ~full:
                raise ValueError(f"Vertex {i} is adjacent to a missing vertex")
            if (row >> i) & 1:
                raise ValueError(f"Self-loop at vertex {i}")
            for j in _bits(row):
                if not (adjacency[j] >> i) & 1:
                    raise ValueError(f"Asymmetric adjacency at ({i}, {j})")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "adjacency", adjacency)

    def __setattr__(self, name, value):
        raise AttributeError("Graph is immutable")

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (self.n == other.n) and (self.adjacency == other.adjacency)

    def __hash__(self):
        return hash((self.n, self.adjacency))

    def __repr__(self):
        return f"Graph(n={self.n}, edges={self.num_edges})"

    def __reduce__(self):
        return (Graph, (self.n, self.adjacency))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Tuple[int, int]]):
        """Build a graph from 0-based edge pairs"""
        rows = [0] * n
        for i, j in edges:
            if i == j:
                raise ValueError(f"Self-loop at vertex {i}")
            if not ((0 <= i < n) and (0 <= j < n)):
                raise ValueError(f"Edge ({i}, {j}) outside of {n} vertices")
            rows[i] |= 1 << j
            rows[j] |= 1 << i
        return cls(n, rows)

    @classmethod
    def empty(cls, n: int = 0):
        return cls(n, [0] * n)

    @classmethod
    def complete(cls, n: int):
        full = (1 << n) - 1
        return cls(n, [full & ~(1 << i) for i in range(n)])

    @classmethod
    def cycle(cls, n: int):
        return cls.from_edges(n, [(i, (i + 1) % n) for i in range(n)])

    @classmethod
    def path(cls, n: int):
        return cls.from_edges(n, [(i, i + 1) for i in range(n - 1)])

    @classmethod
    def from_networkx(cls, H):
        """Convert a networkx graph, relabelling nodes in their order"""
        index = {v: i for i, v in enumerate(H.nodes())}
        return cls.from_edges(
            len(index), [(index[u], index[v]) for u, v in H.edges()]
        )

    def to_networkx(self):
        H = nx.Graph()
        H.add_nodes_from(range(self.n))
        H.add_edges_from(self.edges())
        return H

    @property
    def num_edges(self) -> int:
        return sum(_popcount(row) for row in self.adjacency) // 2

    @property
    def vertex_mask(self) -> int:
        return (1 << self.n) - 1

    def has_edge(self, i: int, j: int) -> bool:
        return bool((self.adjacency[i] >> j) & 1)

    def edges(self) -> List[Tuple[int, int]]:
        """Edges (i, j) with i < j in lexicographic order"""
        return [
            (i, j)
            for i in range(self.n)
            for j in _bits(self.adjacency[i])
            if i < j
        ]

    def neighbors(self, v: int) -> List[int]:
        self._check_vertex(v)
        return list(_bits(self.adjacency[v]))

    def degree(self, v: int) -> int:
        self._check_vertex(v)
        return _popcount(self.adjacency[v])

    def degrees(self) -> List[int]:
        return [_popcount(row) for row in self.adjacency]

    def min_degree(self) -> int:
        return min(self.degrees(), default=0)

    def is_regular(self) -> bool:
        return len(set(self.degrees())) <= 1

    def complement(self):
        full = self.vertex_mask
        return Graph(
            self.n,
            [full & ~row & ~(1 << i) for i, row in enumerate(self.adjacency)],
        )

    def relabel(self, order: Sequence[int]):
        """Graph whose vertex k is the old vertex order[k]"""
        if sorted(order) != list(range(self.n)):
            raise ValueError("order must be a permutation of the vertices")
        position = {v: k for k, v in enumerate(order)}
        rows = []
        for v in order:
            rows.append(_mask(position[u] for u in _bits(self.adjacency[v])))
        return Graph(self.n, rows)

    def _check_vertex(self, v):
        if not (0 <= v < self.n):
            raise ValueError(f"Invalid vertex {v} for a graph on {self.n}")


def _strip_header(s: str) -> str:
    s = s.strip()
    if s.startswith(GRAPH6_HEADER):
        s = s[len(GRAPH6_HEADER) :]
    return s


def graph6_decode(s: str) -> Graph:
    """Decode a short-form graph6 string

    Parameters
    ----------
    s : str
        graph6 text, optionally prefixed by the ">>graph6<<" header.

    Raises
    ------
    Graph6Error
        Byte outside of [63, 126], wrong length or nonzero padding.

    Examples
    --------
    >>> graph6_decode("Bw").num_edges
    3
    """
    s = _strip_header(s)
    if len(s) == 0:
        raise Graph6Error("Empty graph6 string")
    for c in s:
        if not (63 <= ord(c) <= 126):
            raise Graph6Error(f"Invalid graph6 byte {c!r}")
    n = ord(s[0]) - 63
    if n > MAX_VERTICES:
        raise Graph6Error("Only graphs with up to 62 vertices are supported")
    nbits = n * (n - 1) // 2
    expected = 1 + (nbits + 5) // 6
    if len(s) != expected:
        raise Graph6Error(
            f"graph6 for {n} vertices needs {expected} bytes, got {len(s)}"
        )
    padding = 6 * (expected - 1) - nbits
    if padding and ((ord(s[-1]) - 63) & ((1 << padding) - 1)):
        raise Graph6Error("Nonzero padding bits in graph6 string")

    H = nx.from_graph6_bytes(s.encode("ascii"))
    return Graph.from_edges(n, H.edges())


def graph6_encode(G: Graph) -> str:
    """Encode G, in its current labelling, as a short-form graph6 string

    Examples
    --------
    >>> graph6_encode(Graph.complete(3))
    'Bw'
    """
    if G.n > MAX_VERTICES:
        raise Graph6Error("Only graphs with up to 62 vertices are supported")
    data = nx.to_graph6_bytes(G.to_networkx(), header=False)
    return data.decode("ascii").strip()


def parse_edge_list(text: str, n: Optional[int] = None) -> Graph:
    """Parse the human edge-list format

    One edge "i j" per line with 1-based labels. Blank lines and anything
    after '#' are ignored. Without `n` the vertex count is the largest label.
    """
    edges = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.replace(",", " ").split()
        if len(fields) != 2:
            raise ValueError(f"Line {lineno}: expected 'i j', got {line!r}")
        i, j = (int(f) for f in fields)
        if (i < 1) or (j < 1):
            raise ValueError(f"Line {lineno}: labels are 1-based")
        edges.append((i - 1, j - 1))
    if n is None:
        n = max((max(e) + 1 for e in edges), default=0)
    return Graph.from_edges(n, edges)


def format_edge_list(G: Graph) -> str:
    """The edge list of G, 1-based, one edge per line"""
    return "".join(f"{i + 1} {j + 1}\n" for i, j in G.edges())


def circulant(n: int, offsets: Iterable[int]) -> Graph:
    """Circulant graph on n vertices

    {i, j} is an edge iff (j - i) mod n or (i - j) mod n is one of the
    offsets. Offsets equivalent to 0 are ignored.
    """
    S = {s % n for s in offsets} if n > 0 else set()
    S.discard(0)
    edges = [
        (i, j)
        for i in range(n)
        for j in range(i + 1, n)
        if ((j - i) % n in S) or ((i - j) % n in S)
    ]
    return Graph.from_edges(n, edges)


def double_circulant(n, inner0, inner1, cross) -> Graph:
    """Two circulant copies of [n] joined by circulant cross edges

    Vertex i of the first copy is i and of the second copy is n + i.
    {i, n + j} is an edge iff (j - i) mod n lies in cross or in -cross.
    """
    cross = {s % n for s in cross} | {(-s) % n for s in cross}
    edges = [(i, j) for i, j in circulant(n, inner0).edges()]
    edges += [(n + i, n + j) for i, j in circulant(n, inner1).edges()]
    edges += [
        (i, n + j) for i in range(n) for j in range(n) if (j - i) % n in cross
    ]
    return Graph.from_edges(2 * n, edges)


def induced_subgraph(G: Graph, S: Iterable[int]) -> Graph:
    """G[S], relabelled compactly in increasing vertex order"""
    keep = sorted(set(S))
    for v in keep:
        G._check_vertex(v)
    position = {v: k for k, v in enumerate(keep)}
    rows = [
        _mask(position[u] for u in _bits(G.adjacency[v]) if u in position)
        for v in keep
    ]
    return Graph(len(keep), rows)


def delete_vertices(G: Graph, S: Iterable[int]) -> Graph:
    """G - S"""
    S = set(S)
    for v in S:
        G._check_vertex(v)
    return induced_subgraph(G, [v for v in range(G.n) if v not in S])


def destroy_vertex(G: Graph, v: int) -> Graph:
    """G minus v and its whole neighborhood"""
    G._check_vertex(v)
    return delete_vertices(G, [v] + G.neighbors(v))


def join_vertex(G: Graph, S: Iterable[int]) -> Graph:
    """Add a new vertex n adjacent exactly to S"""
    S = set(S)
    for v in S:
        G._check_vertex(v)
    edges = G.edges() + [(v, G.n) for v in S]
    return Graph.from_edges(G.n + 1, edges)


def delete_edges(G: Graph, edges: Iterable[Tuple[int, int]]) -> Graph:
    """Edge subgraph of G on the same vertices"""
    rows = list(G.adjacency)
    for i, j in edges:
        if not G.has_edge(i, j):
            raise ValueError(f"({i}, {j}) is not an edge")
        rows[i] &= ~(1 << j)
        rows[j] &= ~(1 << i)
    return Graph(G.n, rows)


@dataclass(frozen=True)
class StretchSpec:
    """Stretching of `vertex` with parts A_1..A_k of its neighborhood

    The stretched vertex keeps its index as v_0, and v_1..v_k are appended
    as vertices n, ..., n + k - 1.
    """

    vertex: int
    parts: Tuple[FrozenSet[int], ...]

    def __post_init__(self):
        object.__setattr__(
            self, "parts", tuple(frozenset(p) for p in self.parts)
        )

    @property
    def k(self) -> int:
        return len(self.parts)

    def covers(self, G: Graph) -> bool:
        nbrs = set(G.neighbors(self.vertex))
        union = set().union(*self.parts) if self.parts else set()
        return (union == nbrs) and all(p <= nbrs for p in self.parts)

    def is_proper(self, G: Graph) -> bool:
        """Every part is nonempty and strictly inside the neighborhood"""
        nbrs = set(G.neighbors(self.vertex))
        return self.covers(G) and all(
            (len(p) > 0) and (p < nbrs) for p in self.parts
        )


def stretch_vertex(G: Graph, spec: StretchSpec) -> Graph:
    """Replace v by v_0, ..., v_k

    v_j is adjacent to v_0 and to A_j for j in 1..k, v_0 only to v_1..v_k.

    Raises
    ------
    ValueError
        If the parts do not cover the neighborhood of v.
    """
    v = spec.vertex
    G._check_vertex(v)
    if not spec.covers(G):
        raise ValueError(
            f"Parts {[sorted(p) for p in spec.parts]} do not cover "
            f"the neighborhood {G.neighbors(v)} of vertex {v}"
        )
    n = G.n
    edges = [(i, j) for i, j in G.edges() if v not in (i, j)]
    for j, part in enumerate(spec.parts):
        vj = n + j
        edges.append((v, vj))
        edges.extend((u, vj) for u in part)
    return Graph.from_edges(n + spec.k, edges)


def is_connected(G: Graph) -> bool:
    return len(connected_components(G)) <= 1


def connected_components(G: Graph, within: Optional[int] = None):
    """Vertex masks of the components of G[within], by smallest vertex"""
    remaining = G.vertex_mask if within is None else within
    components = []
    while remaining:
        low = remaining & -remaining
        comp, frontier = low, low
        while frontier:
            reach = 0
            for u in _bits(frontier):
                reach |= G.adjacency[u]
            frontier = reach & remaining & ~comp
            comp |= frontier
        components.append(comp)
        remaining &= ~comp
    return components


def is_bipartite(G: Graph) -> bool:
    """BFS two-colouring"""
    color = {}
    for s in range(G.n):
        if s in color:
            continue
        color[s] = 0
        queue = [s]
        while queue:
            u = queue.pop()
            for w in _bits(G.adjacency[u]):
                if w not in color:
                    color[w] = 1 - color[u]
                    queue.append(w)
                elif color[w] == color[u]:
                    return False
    return True


def _colour_order(adjacency, P):
    """Greedy colouring of the candidate set used as a clique bound"""
    order, colours = [], []
    colour = 0
    uncoloured = P
    while uncoloured:
        colour += 1
        Q = uncoloured
        while Q:
            v = (Q & -Q).bit_length() - 1
            Q &= ~adjacency[v] & ~(1 << v)
            uncoloured &= ~(1 << v)
            order.append(v)
            colours.append(colour)
    return order, colours


def max_clique(G: Graph) -> List[int]:
    """A maximum clique by branch and bound over bit rows"""
    adjacency = G.adjacency
    best = [0, 0]

    def expand(size, clique, P):
        order, colours = _colour_order(adjacency, P)
        for v, c in zip(reversed(order), reversed(colours)):
            if size + c <= best[0]:
                return
            bit = 1 << v
            Q = P & adjacency[v]
            if Q:
                expand(size + 1, clique | bit, Q)
            elif size + 1 > best[0]:
                best[0], best[1] = size + 1, clique | bit
            P &= ~bit

    if G.n > 0:
        expand(0, 0, G.vertex_mask)
    return list(_bits(best[1]))


def clique_number(G: Graph) -> int:
    return len(max_clique(G))


def stability_number(G: Graph) -> int:
    return clique_number(G.complement())


def _has_odd_hole(G: Graph) -> bool:
    adjacency = G.adjacency

    def extend(start, last, length, blocked):
        # blocked holds the path and the neighbours of its interior vertices
        for u in _bits(adjacency[last] & ~blocked):
            if u <= start:
                continue
            if (adjacency[u] >> start) & 1:
                if (length + 1 >= 5) and ((length + 1) % 2 == 1):
                    return True
                continue
            closed = blocked | adjacency[last] | (1 << u)
            if extend(start, u, length + 1, closed):
                return True
        return False

    for s in range(G.n):
        for p1 in _bits(adjacency[s]):
            if (p1 > s) and extend(s, p1, 2, (1 << s) | (1 << p1)):
                return True
    return False


def is_perfect_small(G: Graph) -> bool:
    """No odd hole and no odd antihole of length at least 5

    Induced cycles are enumerated explicitly from their smallest vertex, so
    this is meant for the small graphs met by the rank-bound engine.
    """
    return not (_has_odd_hole(G) or _has_odd_hole(G.complement()))


def _refine(G: Graph, cells: List[List[int]]) -> List[List[int]]:
    """Equitable refinement of an ordered partition"""
    changed = True
    while changed:
        changed = False
        masks = [_mask(c) for c in cells]
        refined = []
        for cell in cells:
            if len(cell) == 1:
                refined.append(cell)
                continue
            signature = {
                v: tuple(_popcount(G.adjacency[v] & m) for m in masks)
                for v in cell
            }
            groups = sorted(set(signature.values()))
            if len(groups) > 1:
                changed = True
                for g in groups:
                    refined.append([v for v in cell if signature[v] == g])
            else:
                refined.append(cell)
        cells = refined
    return cells


def _leaf_key(G: Graph, order: Sequence[int]):
    n = G.n
    position = {v: k for k, v in enumerate(order)}
    return tuple(
        sum(1 << (n - 1 - position[u]) for u in _bits(G.adjacency[v]))
        for v in order
    )


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        a, b = self.find(a), self.find(b)
        if a != b:
            self.parent[max(a, b)] = min(a, b)


def canonical_order(G: Graph, cells: Optional[Sequence[Iterable[int]]] = None):
    """Canonical vertex order of G by refinement and individualization

    Parameters
    ----------
    G : Graph
    cells : sequence of vertex collections, optional
        An ordered partition (colouring) that the labelling must respect.

    Returns
    -------
    list of int
        order[k] is the vertex receiving canonical label k.
    """
    if cells is None:
        cells = [list(range(G.n))] if G.n else []
    else:
        cells = [sorted(c) for c in cells if len(c) > 0]
        if sorted(v for c in cells for v in c) != list(range(G.n)):
            raise ValueError("cells must partition the vertices")

    best = {"key": None, "order": None}
    automorphisms = []

    def orbits_fixing(fixed):
        uf = _UnionFind(G.n)
        for perm in automorphisms:
            if all(perm[v] == v for v in fixed):
                for v in range(G.n):
                    uf.union(v, perm[v])
        return uf

    def search(cells, fixed):
        cells = _refine(G, cells)
        for idx, cell in enumerate(cells):
            if len(cell) > 1:
                break
        else:
            order = [c[0] for c in cells]
            key = _leaf_key(G, order)
            if (best["key"] is None) or (key > best["key"]):
                best["key"], best["order"] = key, order
            elif key == best["key"]:
                perm = [0] * G.n
                for a, b in zip(best["order"], order):
                    perm[a] = b
                automorphisms.append(perm)
            return

        explored = []
        for v in cell:
            if explored:
                uf = orbits_fixing(fixed)
                if any(uf.find(v) == uf.find(w) for w in explored):
                    continue
            rest = [w for w in cell if w != v]
            search(cells[:idx] + [[v], rest] + cells[idx + 1 :], fixed + [v])
            explored.append(v)

    search(cells, [])
    return best["order"] if best["order"] is not None else []


def canonical_form(G: Graph, cells=None) -> str:
    """Canonical label: graph6 of the canonically relabelled graph

    With `cells` the label also records the cell sizes, so coloured forms
    only match graphs coloured the same way.

    Examples
    --------
    >>> canonical_form(Graph.path(3)) == canonical_form(
    ...     Graph.from_edges(3, [(0, 2), (1, 2)]))
    True
    """
    order = canonical_order(G, cells)
    label = graph6_encode(G.relabel(order))
    if cells is not None:
        sizes = ",".join(str(len(c)) for c in cells if len(c) > 0)
        label = f"{label}|{sizes}"
    return label


def isomorphic(G: Graph, H: Graph) -> bool:
    if (G.n != H.n) or (G.num_edges != H.num_edges):
        return False
    if sorted(G.degrees()) != sorted(H.degrees()):
        return False
    return canonical_form(G) == canonical_form(H)


def rooted_form(G: Graph, v: int) -> str:
    """Canonical form of G with v individualized"""
    return canonical_form(G, [[v], [u for u in range(G.n) if u != v]])


def automorphism_orbits(G: Graph) -> List[List[int]]:
    """Vertex orbits of the automorphism group, by smallest vertex"""
    groups: Dict[str, List[int]] = {}
    for v in range(G.n):
        groups.setdefault(rooted_form(G, v), []).append(v)
    return sorted(groups.values())


def is_vertex_transitive(G: Graph) -> bool:
    """True if every vertex has the same rooted canonical form"""
    if G.n <= 1:
        return True
    if not G.is_regular():
        return False
    first = rooted_form(G, 0)
    return all(rooted_form(G, v) == first for v in range(1, G.n))


def cliques_by_size(G: Graph, max_size: Optional[int] = None):
    """All nonempty cliques, by size then lexicographically"""
    level = [(v,) for v in range(G.n)]
    size = 1
    while level and ((max_size is None) or (size <= max_size)):
        yield from level
        following = []
        for clique in level:
            common = G.vertex_mask
            for u in clique:
                common &= G.adjacency[u]
            following.extend(
                clique + (w,) for w in _bits(common) if w > clique[-1]
            )
        level = following
        size += 1


def has_cut_clique(G: Graph):
    """Find a clique whose removal disconnects G

    Returns
    -------
    tuple or None
        (K, S1, S2) as sorted vertex lists, with S1 the component of
        G - K holding its smallest vertex and S2 the rest, for the
        smallest K (lexicographic among equals). K is empty when G is
        already disconnected.
    """
    candidates = [()] + list(cliques_by_size(G))
    for K in candidates:
        within = G.vertex_mask & ~_mask(K)
        components = connected_components(G, within)
        if len(components) > 1:
            S1 = components[0]
            S2 = within & ~S1
            return (list(K), list(_bits(S1)), list(_bits(S2)))
    return None


@dataclass(frozen=True)
class StretchedCliqueSpec:
    """A graph obtained from K_n by 2-stretching the vertices in D

    `associated[i]` lists the vertices of `graph` associated with original
    vertex i: (i,) when i is not stretched, (i_0, i_1, i_2) otherwise.
    `parts[i]` holds the two parts used when i was stretched, in the
    labelling of the graph at that moment.
    """

    n: int
    D: Tuple[int, ...]
    graph: Graph
    associated: Dict[int, Tuple[int, ...]] = field(hash=False)
    parts: Dict[int, Tuple[FrozenSet[int], FrozenSet[int]]] = field(
        hash=False, default_factory=dict
    )

    @property
    def d(self) -> int:
        return len(self.D)

    def cross_edges(self, i: int, j: int) -> int:
        """Number of edges between vertices associated with i and j"""
        return sum(
            1
            for u in self.associated[i]
            for w in self.associated[j]
            if self.graph.has_edge(u, w)
        )

    def is_hat(self) -> bool:
        """Exactly one cross edge between every two stretched vertices"""
        return all(
            self.cross_edges(i, j) == 1 for i, j in combinations(self.D, 2)
        )

    def is_sparse(self) -> bool:
        return self.graph.num_edges == self.n * (self.n - 1) // 2 + 2 * self.d
