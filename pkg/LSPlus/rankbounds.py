"""Upper bounds on the LS+-rank by combinatorial rules

The engine combines axioms (bipartite graphs have rank 0, perfect graphs
rank at most 1, and every graph rank at most floor(n / 3)) with three
recursive rules: decomposition along a cut clique, destruction
(max over i of r(G - i - N(i)) + 1) and deletion (min over i of
r(G - i) + 1). Each bound comes with a ProofTrace of the argument.
"""

from dataclasses import dataclass, field
import enum
from fractions import Fraction
import logging
from typing import Dict, List, NamedTuple, Optional, Tuple

import pandas as pd

from .graphs import (
    Graph,
    canonical_form,
    delete_vertices,
    destroy_vertex,
    graph6_decode,
    has_cut_clique,
    induced_subgraph,
    is_bipartite,
    is_perfect_small,
    isomorphic,
    parse_edge_list,
)
from .polytope import frac_lp_max
from .utils import parallel_map


module_logger = logging.getLogger("LSPlus.rankbounds")

DEFAULT_DEPTH = 3


class Rule(enum.Enum):
    EMPTY = "EMPTY"
    BIPARTITE = "BIPARTITE"
    PERFECT = "PERFECT"
    THIRD = "THIRD"
    MIN_DEGREE_NOT_MINIMAL = "MIN_DEGREE_NOT_MINIMAL"
    SMALL_NOT_MINIMAL = "SMALL_NOT_MINIMAL"
    KNOWN = "KNOWN"
    CUT_CLIQUE = "CUT_CLIQUE"
    DESTRUCTION = "DESTRUCTION"
    DELETION = "DELETION"


AXIOMS = (
    Rule.EMPTY,
    Rule.BIPARTITE,
    Rule.PERFECT,
    Rule.THIRD,
    Rule.MIN_DEGREE_NOT_MINIMAL,
    Rule.SMALL_NOT_MINIMAL,
    Rule.KNOWN,
)


def two_minimal_graphs() -> List[Graph]:
    """The two 6-vertex graphs of LS+-rank 2"""
    return [
        parse_edge_list("1 2\n2 3\n3 1\n4 5\n5 6\n4 3\n6 1\n6 2"),
        parse_edge_list("1 2\n2 3\n3 1\n4 5\n5 6\n4 2\n4 3\n6 1\n6 2"),
    ]


@dataclass(frozen=True)
class ProofTrace:
    """One rule application and the traces it relies on

    `graph6` is the canonical form of the graph the bound is about.
    """

    rule: Rule
    graph6: str
    n: int
    bound: int
    children: Tuple["ProofTrace", ...] = ()
    note: str = ""

    def nodes(self):
        yield self
        for child in self.children:
            yield from child.nodes()

    def render(self, indent: int = 0) -> str:
        """Indented, human readable trace"""
        note = f" ({self.note})" if self.note else ""
        lines = [
            f"{'  ' * indent}{self.rule.value}: r+ <= {self.bound}"
            f" on n={self.n} [{self.graph6}]{note}"
        ]
        for child in self.children:
            lines.append(child.render(indent + 1))
        return "\n".join(lines)

    def replay(self, known: Optional[Dict[str, int]] = None) -> bool:
        """Re-derive every bound of the trace from its rule"""
        G = graph6_decode(self.graph6)
        if canonical_form(G) != self.graph6:
            return False
        if not all(child.replay(known) for child in self.children):
            return False
        forms = {child.graph6 for child in self.children}
        bounds = [child.bound for child in self.children]
        rule = self.rule

        if rule in AXIOMS:
            return _axiom_bound(G, rule, self.graph6, known) == self.bound
        if rule == Rule.CUT_CLIQUE:
            split = has_cut_clique(G)
            if (split is None) or (len(bounds) != 2):
                return False
            K, S1, S2 = split
            expected = {
                canonical_form(induced_subgraph(G, S1 + K)),
                canonical_form(induced_subgraph(G, S2 + K)),
            }
            return (forms == expected) and (self.bound == max(bounds))
        if rule == Rule.DESTRUCTION:
            expected = {
                canonical_form(destroy_vertex(G, i)) for i in range(G.n)
            }
            return (forms == expected) and (self.bound == max(bounds) + 1)
        if rule == Rule.DELETION:
            expected = {
                canonical_form(delete_vertices(G, [i])) for i in range(G.n)
            }
            return (
                (len(bounds) == 1)
                and forms <= expected
                and (self.bound == bounds[0] + 1)
            )
        return False


def _axiom_bound(G, rule, form, known):
    """Bound given by an axiom, or None when it does not apply"""
    n = G.n
    if rule == Rule.EMPTY:
        return 0 if n == 0 else None
    if rule == Rule.BIPARTITE:
        return 0 if is_bipartite(G) else None
    if rule == Rule.PERFECT:
        return 1 if is_perfect_small(G) else None
    if rule == Rule.THIRD:
        return n // 3
    if rule == Rule.MIN_DEGREE_NOT_MINIMAL:
        # graphs on 3l vertices and rank l have a vertex of degree 2
        if (n % 3 == 0) and (n >= 6) and (G.min_degree() >= 3):
            return n // 3 - 1
        return None
    if rule == Rule.SMALL_NOT_MINIMAL:
        if (n == 6) and not any(isomorphic(G, H) for H in _TWO_MINIMAL):
            return 1
        return None
    if rule == Rule.KNOWN:
        if known is None:
            return None
        return known.get(form)
    raise ValueError(f"{rule} is not an axiom")


_TWO_MINIMAL = two_minimal_graphs()


class RankBoundEngine:
    """Least rank upper bound derivable within a depth budget

    Destruction and deletion spend one unit of depth, cut cliques are
    free. Results are memoized on (canonical form, depth).

    Examples
    --------
    >>> engine = RankBoundEngine()
    >>> engine.bound(Graph.complete(3))[0]
    1
    """

    logger = logging.getLogger("LSPlus.rankbounds.RankBoundEngine")

    def __init__(self, depth: int = DEFAULT_DEPTH, known=None):
        """
        Parameters
        ----------
        depth : int
            Budget of nested destruction/deletion steps.
        known : dict, optional
            Caller supplied bounds, keyed by Graph or graph6 string.
        """
        if depth < 0:
            raise ValueError(f"Depth budget must be non-negative: {depth}")
        self.depth = depth
        self.known = {}
        for key, value in (known or {}).items():
            G = graph6_decode(key) if isinstance(key, str) else key
            self.known[canonical_form(G)] = int(value)
        self._memo: Dict[Tuple[str, int], ProofTrace] = {}

    def bound(self, G: Graph, depth: Optional[int] = None):
        """(bound, ProofTrace) for G"""
        if depth is None:
            depth = self.depth
        trace = self._bound(G, depth)
        return trace.bound, trace

    def _bound(self, G: Graph, depth: int) -> ProofTrace:
        form = canonical_form(G)
        key = (form, depth)
        if key in self._memo:
            return self._memo[key]

        best = None
        for rule in AXIOMS:
            b = _axiom_bound(G, rule, form, self.known)
            if (b is not None) and ((best is None) or (b < best.bound)):
                best = ProofTrace(rule, form, G.n, b)
        # non-bipartite graphs have rank at least 1
        floor = 0 if best.rule in (Rule.EMPTY, Rule.BIPARTITE) else 1

        if best.bound > floor:
            split = has_cut_clique(G)
            if split is not None:
                K, S1, S2 = split
                parts = [
                    self._bound(induced_subgraph(G, S + K), depth)
                    for S in (S1, S2)
                ]
                b = max(p.bound for p in parts)
                if b < best.bound:
                    note = "K={" + ",".join(str(v + 1) for v in K) + "}"
                    best = ProofTrace(
                        Rule.CUT_CLIQUE, form, G.n, b, tuple(parts), note
                    )

        if (best.bound > floor) and (depth > 0):
            children, worst = {}, -1
            for i in range(G.n):
                child = self._bound(destroy_vertex(G, i), depth - 1)
                children.setdefault(child.graph6, child)
                worst = max(worst, child.bound)
                if worst + 1 >= best.bound:
                    break
            else:
                best = ProofTrace(
                    Rule.DESTRUCTION,
                    form,
                    G.n,
                    worst + 1,
                    tuple(children[k] for k in sorted(children)),
                )

        if (best.bound > floor + 1) and (depth > 0):
            for i in range(G.n):
                child = self._bound(delete_vertices(G, [i]), depth - 1)
                if child.bound + 1 < best.bound:
                    best = ProofTrace(
                        Rule.DELETION,
                        form,
                        G.n,
                        child.bound + 1,
                        (child,),
                        f"delete {i + 1}",
                    )
                if best.bound <= floor + 1:
                    break

        self._memo[key] = best
        self.logger.debug(
            f"n={G.n} depth={depth}: {best.rule.value} <= {best.bound}"
        )
        return best


def rank_upper_bound(G: Graph, depth: int = DEFAULT_DEPTH, known=None):
    """Least upper bound on r+(G) derivable by the rules

    Returns
    -------
    bound : int
    trace : ProofTrace
    """
    return RankBoundEngine(depth=depth, known=known).bound(G)


def vt_degree_filter(n: int, ell: int) -> range:
    """Degrees k a k-regular vertex-transitive graph of rank ell may have

    A vertex-transitive graph on n vertices with LS+-rank ell >= 2 has
    3 <= k <= n + 2 - 3 ell.

    Examples
    --------
    >>> list(vt_degree_filter(8, 2))
    [3, 4]
    """
    if ell < 2:
        raise ValueError(f"The degree filter needs ell >= 2, got {ell}")
    return range(3, n + 2 - 3 * ell + 1)


def _classify_row(args):
    index, text, ell, depth, known = args
    row = {
        "index": index,
        "graph6": text.strip(),
        "n": None,
        "degree": None,
        "bound": None,
        "rule": None,
        "open": None,
        "degree_admissible": None,
        "error": None,
        "trace": None,
    }
    try:
        G = graph6_decode(text)
    except ValueError as err:
        row["error"] = str(err)
        return row
    bound, trace = RankBoundEngine(depth=depth, known=known).bound(G)
    row.update(
        n=G.n,
        degree=G.degree(0) if (G.n and G.is_regular()) else None,
        bound=bound,
        rule=trace.rule.value,
        open=bound >= ell,
        trace=trace,
    )
    if (row["degree"] is not None) and (ell >= 2):
        row["degree_admissible"] = row["degree"] in vt_degree_filter(G.n, ell)
    return row


def classify_vt_candidates(
    catalog, ell: int, depth: int = DEFAULT_DEPTH, known=None, npes=None
) -> pd.DataFrame:
    """Best rule-derived bound of every graph in a catalog

    Parameters
    ----------
    catalog : iterable of str
        graph6 strings. Unparseable entries are reported in the error
        column, not raised.
    ell : int
        A graph is `open` when its bound does not exclude rank ell.
    depth : int, optional
    known : dict, optional
        Caller supplied bounds, as for RankBoundEngine.
    npes : int, optional
        Parallel jobs.

    Returns
    -------
    pd.DataFrame
        Columns index (1-based), graph6, n, degree, bound, rule, open,
        degree_admissible, error and trace (a ProofTrace).
    """
    items = [
        (i + 1, s, ell, depth, known)
        for i, s in enumerate(catalog)
        if s.strip()
    ]
    rows = parallel_map(_classify_row, items, npes=npes)
    for row in rows:
        if row["error"] is not None:
            module_logger.warning(
                f"Catalog entry {row['index']} skipped: {row['error']}"
            )
    table = pd.DataFrame(
        rows,
        columns=[
            "index",
            "graph6",
            "n",
            "degree",
            "bound",
            "rule",
            "open",
            "degree_admissible",
            "error",
            "trace",
        ],
    )
    module_logger.info(
        f"Classified {len(table)} graphs,"
        f" {int(table['open'].eq(True).sum())} open"
    )
    return table


def rule_summary(table: pd.DataFrame) -> pd.Series:
    """Number of graphs settled by each rule"""
    return table["rule"].dropna().value_counts().sort_index()


class AlphaBound(NamedTuple):
    bound: Fraction
    case: str


def alpha_ls1_bound(G: Graph) -> AlphaBound:
    """Upper bound on the LS+ stability number from the minimum degree

    With every degree at least k, alpha_LS+(G) <= n - k. When moreover
    max{e^T x : x in FRAC(G - i - N(i))} <= |V(G - i - N(i))| / 2 for
    every vertex i, alpha_LS+(G) <= (n - k + 1) / 2. The tighter one is
    returned, with case "i" or "ii".
    """
    n, k = G.n, G.min_degree()
    best = AlphaBound(Fraction(n - k), "i")
    if n == 0:
        return best
    for i in range(G.n):
        H = destroy_vertex(G, i)
        if frac_lp_max(H, [1] * H.n) > Fraction(H.n, 2):
            return best
    second = Fraction(n - k + 1, 2)
    if second < best.bound:
        return AlphaBound(second, "ii")
    return best


@dataclass
class RankInterval:
    """lower <= r+(G) <= upper, with the reasons"""

    lower: int = 0
    upper: Optional[int] = None
    sources: List[str] = field(default_factory=list)

    def __post_init__(self):
        self._check()

    def _check(self):
        if (self.upper is not None) and (self.lower > self.upper):
            raise ValueError(
                f"Inconsistent rank bounds: {self.lower} > {self.upper}"
            )

    def tighten_lower(self, bound: int, source: str):
        if bound > self.lower:
            self.lower = bound
            self.sources.append(f"lower {bound}: {source}")
            self._check()

    def tighten_upper(self, bound: int, source: str):
        if (self.upper is None) or (bound < self.upper):
            self.upper = bound
            self.sources.append(f"upper {bound}: {source}")
            self._check()

    @property
    def exact(self) -> bool:
        return self.lower == self.upper


def rank_interval(
    G: Graph, report=None, depth: int = DEFAULT_DEPTH, known=None
) -> RankInterval:
    """Combine a verified rank certificate with the rule-derived bound

    Parameters
    ----------
    report : VerificationReport, optional
        An accepted rank certificate gives r+(G) >= level + 1.
    """
    interval = RankInterval()
    if not is_bipartite(G):
        interval.tighten_lower(1, "not bipartite")
    if (report is not None) and (report.rank_lower_bound is not None):
        interval.tighten_lower(
            report.rank_lower_bound, f"level {report.level} certificate"
        )
    bound, trace = rank_upper_bound(G, depth=depth, known=known)
    interval.tighten_upper(bound, trace.rule.value)
    return interval
