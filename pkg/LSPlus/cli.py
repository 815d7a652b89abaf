"""Console script for LSPlus.

Exit codes: 0 on success or acceptance, 1 on a rejection or negative
verdict, 2 on usage errors and malformed input.
"""
import functools
import logging
from math import lcm
import os
import sys

import click

from .backend import BundleLayout, FileSystem
from .certify import (
    BundleError,
    fuzz_package,
    load_package,
    package_graph,
    save_package,
    verify_package,
    verify_rank_certificate,
    verify_uvw,
)
from .graphs import (
    Graph6Error,
    canonical_form,
    circulant,
    clique_number,
    delete_vertices,
    destroy_vertex,
    format_edge_list,
    graph6_decode,
    graph6_encode,
    is_bipartite,
    is_perfect_small,
    is_vertex_transitive,
    parse_edge_list,
    stability_number,
)
from .numerics import as_int_matrix
from .polytope import (
    Inequality,
    enumerate_facets,
    enumerate_stable_sets,
    format_stable_set,
    is_facet,
    is_valid_for_stab,
)
from .rankbounds import (
    classify_vt_candidates,
    rank_upper_bound,
    rule_summary,
    two_minimal_graphs,
)
from .search import (
    edge_subgraph_closure,
    facet_pair_extraction,
    generate_stretch_candidates,
    generate_stretched_cliques,
    merge_closures,
    minimal_elements,
    read_graphs,
    read_pairs,
    write_graphs,
    write_pairs,
)
from .synthesize import (
    SynthesisError,
    SynthesisOptions,
    assemble_package,
    integral_package,
    rationalize,
    read_float_matrix,
    uvw_synthesize,
)
from .utils import read_config


module_logger = logging.getLogger("LSPlus.cli")

MALFORMED = (BundleError, Graph6Error, ValueError, FileNotFoundError)


def malformed_input(func):
    """Report malformed input and exit with 2"""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except MALFORMED as err:
            click.echo(f"Error: {err}", err=True)
            click.get_current_context().exit(2)

    return wrapper


def echo_config(ctx):
    """One line with everything needed to repeat the run"""
    command = " ".join(ctx.command_path.split()[1:])
    params = dict(ctx.find_root().obj)
    params.update(ctx.params)
    settings = " ".join(f"{k}={params[k]}" for k in sorted(params))
    click.echo(f"# {command} {settings}")


def parse_vertices(text: str):
    """'1,3 4' -> [0, 2, 3]"""
    vertices = [int(v) - 1 for v in text.replace(",", " ").split()]
    if any(v < 0 for v in vertices):
        raise ValueError(f"Vertices are 1-based: {text}")
    return vertices


def parse_inequality(coefficients: str, beta: int) -> Inequality:
    return Inequality(
        tuple(int(v) for v in coefficients.replace(",", " ").split()), beta
    )


def jobs(ctx) -> int:
    return ctx.find_root().obj["jobs"]


@click.group()
@click.option(
    "-v", "--verbose", count=True, help="More log messages, repeatable"
)
@click.option(
    "--jobs",
    "njobs",
    type=click.IntRange(min=1),
    default=None,
    help="Parallel jobs, default from the configuration",
)
@click.option(
    "--config",
    "config_file",
    type=click.Path(dir_okay=False),
    default=None,
    help="Configuration file, default main.ini at LSPLUS_DIR",
)
@click.pass_context
def main(ctx, verbose, njobs, config_file):
    """Console script for LSPlus."""
    logging.basicConfig(
        level=max(logging.WARNING - 10 * verbose, logging.DEBUG),
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        config = read_config(config_file)
    except ValueError as err:
        raise click.BadParameter(str(err), param_hint="--config")
    if njobs is not None:
        config["jobs"] = njobs
    ctx.obj = config


@main.group(name="graph")
def graph_group():
    """graph6 and edge-list tools"""
    pass


@graph_group.command(name="decode")
@click.argument("graph6")
@click.pass_context
@malformed_input
def cli_decode(ctx, graph6):
    """Print the vertex count and the 1-based edges"""
    echo_config(ctx)
    G = graph6_decode(graph6)
    click.echo(f"n = {G.n}")
    click.echo(f"m = {G.num_edges}")
    click.echo(format_edge_list(G), nl=False)
    return 0


@graph_group.command(name="encode")
@click.argument("edges", type=click.File("r"))
@click.option("-n", "n", type=click.IntRange(min=0), default=None)
@click.pass_context
@malformed_input
def cli_encode(ctx, edges, n):
    """graph6 of a 1-based edge list file ('-' for stdin)"""
    echo_config(ctx)
    click.echo(graph6_encode(parse_edge_list(edges.read(), n=n)))
    return 0


@graph_group.command(name="canon")
@click.argument("graph6")
@click.pass_context
@malformed_input
def cli_canon(ctx, graph6):
    """Canonical graph6, equal for isomorphic graphs"""
    echo_config(ctx)
    click.echo(canonical_form(graph6_decode(graph6)))
    return 0


@graph_group.command(name="destroy")
@click.argument("graph6")
@click.argument("vertex", type=click.IntRange(min=1))
@click.pass_context
@malformed_input
def cli_destroy(ctx, graph6, vertex):
    """Remove a vertex and its neighborhood"""
    echo_config(ctx)
    G = graph6_decode(graph6)
    click.echo(graph6_encode(destroy_vertex(G, vertex - 1)))
    return 0


@graph_group.command(name="delete")
@click.argument("graph6")
@click.argument("vertices")
@click.pass_context
@malformed_input
def cli_delete(ctx, graph6, vertices):
    """Remove the comma separated vertices"""
    echo_config(ctx)
    G = graph6_decode(graph6)
    click.echo(graph6_encode(delete_vertices(G, parse_vertices(vertices))))
    return 0


@graph_group.command(name="circulant")
@click.argument("n", type=click.IntRange(min=0))
@click.argument("offsets")
@click.pass_context
@malformed_input
def cli_circulant(ctx, n, offsets):
    """Circulant graph C_n with comma separated offsets"""
    echo_config(ctx)
    S = [int(s) for s in offsets.replace(",", " ").split()]
    click.echo(graph6_encode(circulant(n, S)))
    return 0


@graph_group.command(name="info")
@click.argument("graph6")
@click.pass_context
@malformed_input
def cli_info(ctx, graph6):
    """Basic invariants"""
    echo_config(ctx)
    G = graph6_decode(graph6)
    click.echo(f"n = {G.n}")
    click.echo(f"m = {G.num_edges}")
    click.echo(f"degrees = {' '.join(str(d) for d in G.degrees())}")
    click.echo(f"alpha = {stability_number(G)}")
    click.echo(f"omega = {clique_number(G)}")
    click.echo(f"bipartite = {is_bipartite(G)}")
    click.echo(f"perfect = {is_perfect_small(G)}")
    click.echo(f"vertex transitive = {is_vertex_transitive(G)}")
    return 0


@main.group(name="polytope")
def polytope_group():
    """STAB(G) tools"""
    pass


@polytope_group.command(name="stable-sets")
@click.argument("graph6")
@click.pass_context
@malformed_input
def cli_stable_sets(ctx, graph6):
    """Incidence vectors of every stable set"""
    echo_config(ctx)
    for chi in enumerate_stable_sets(graph6_decode(graph6)):
        click.echo(format_stable_set(chi))
    return 0


@polytope_group.command(name="facets")
@click.argument("graph6")
@click.option(
    "--full-support", is_flag=True, help="Only facets with a > 0"
)
@click.pass_context
@malformed_input
def cli_facets(ctx, graph6, full_support):
    """Every facet a^T x <= beta of STAB(G)"""
    echo_config(ctx)
    for ineq in enumerate_facets(graph6_decode(graph6)):
        if full_support and not all(v > 0 for v in ineq.a):
            continue
        click.echo(str(ineq))
    return 0


@polytope_group.command(name="valid")
@click.argument("graph6")
@click.option("--a", "coefficients", required=True, help="e.g. 2,1,1,1")
@click.option("--beta", type=click.INT, required=True)
@click.pass_context
@malformed_input
def cli_valid(ctx, graph6, coefficients, beta):
    """Exit 0 if a^T x <= beta is valid for STAB(G), 1 otherwise"""
    echo_config(ctx)
    G = graph6_decode(graph6)
    ineq = parse_inequality(coefficients, beta)
    if not is_valid_for_stab(G, ineq):
        click.echo(f"not valid: {ineq}")
        ctx.exit(1)
    click.echo(f"valid: {ineq}")
    click.echo(f"facet: {is_facet(G, ineq)}")
    return 0


@main.group(name="cert")
def cert_group():
    """Verify and build certificate packages"""
    pass


def _layout(numeric_tags):
    return BundleLayout(numeric_tags=numeric_tags)


@cert_group.command(name="verify")
@click.argument("bundle", type=click.Path())
@click.option(
    "--graph", "graph6", default=None, help="graph6, default from manifest"
)
@click.option(
    "--numeric-tags", is_flag=True, help="Layer files named M1_<t>"
)
@click.pass_context
@malformed_input
def cli_verify(ctx, bundle, graph6, numeric_tags):
    """Verify a bundle, and its rank certificate if it has an inequality"""
    echo_config(ctx)
    pkg = load_package(bundle, layout=_layout(numeric_tags))
    G = graph6_decode(graph6) if graph6 else package_graph(pkg)
    if pkg.inequality is None:
        report = verify_package(G, pkg, npes=jobs(ctx))
    else:
        report = verify_rank_certificate(
            G, pkg.inequality, pkg, npes=jobs(ctx)
        )
    click.echo(report.summary())
    if not report.accepted:
        ctx.exit(1)
    return 0


@cert_group.command(name="synth")
@click.option("--graph", "graph6", default=None, help="graph6 of G")
@click.option(
    "--matrix",
    type=click.Path(exists=True, dir_okay=False),
    default=None,
    help="CSV of Y, decimals are rationalized",
)
@click.option(
    "--stable-set", default=None, help="Build the package of this set"
)
@click.option("--level", type=click.IntRange(1, 3), default=1)
@click.option("--output", type=click.Path(), required=True)
@click.option("--numeric-tags", is_flag=True)
@click.pass_context
@malformed_input
def cli_synth(ctx, graph6, matrix, stable_set, level, output, numeric_tags):
    """Synthesize UVW-certificates or a whole bundle

    With --stable-set the integral package of that set is written. With
    --matrix and --graph a level 1 package of Y is assembled, and with
    --matrix alone only its UVW-certificate.
    """
    echo_config(ctx)
    config = ctx.find_root().obj
    opts = SynthesisOptions.from_config(config)
    layout = _layout(numeric_tags)

    if stable_set is not None:
        if graph6 is None:
            raise click.UsageError("--stable-set requires --graph")
        G = graph6_decode(graph6)
        pkg = integral_package(G, parse_vertices(stable_set), level=level)
        save_package(pkg, output, layout=layout)
        click.echo(f"saved level {level} package at {output}")
        return 0

    if matrix is None:
        raise click.UsageError("Give --matrix or --stable-set")
    R = rationalize(read_float_matrix(matrix), opts)
    scale = lcm(1, *(v.denominator for v in R.flat))
    Y = as_int_matrix(R * scale)
    try:
        if graph6 is None:
            cert = uvw_synthesize(Y, opts)
            os.makedirs(output, exist_ok=True)
            pkg = None
        else:
            pkg = assemble_package(
                graph6_decode(graph6), 1, Y, opts=opts, npes=jobs(ctx)
            )
    except SynthesisError as err:
        click.echo(f"synthesis failed ({err.code}): {err}")
        ctx.exit(1)

    if scale != 1:
        click.echo(f"Y scaled by {scale}")
    if pkg is None:
        store = FileSystem(output, extension=layout.extension)
        for part in ("U", "V", "W"):
            store[layout.uvw_stem("Y", part, Y.shape[0] - 1)] = getattr(
                cert, part
            )
        click.echo(f"k = {verify_uvw(Y, cert).k}")
    else:
        save_package(pkg, output, layout=layout)
        click.echo(f"saved level 1 package at {output}")
    return 0


@cert_group.command(name="fuzz")
@click.argument("bundle", type=click.Path())
@click.option("--seed", type=click.INT, required=True)
@click.option("--rounds", type=click.IntRange(min=0), default=20)
@click.option("--graph", "graph6", default=None)
@click.option("--numeric-tags", is_flag=True)
@click.pass_context
@malformed_input
def cli_fuzz(ctx, bundle, seed, rounds, graph6, numeric_tags):
    """Verify random single-entry mutations of a bundle"""
    echo_config(ctx)
    pkg = load_package(bundle, layout=_layout(numeric_tags))
    G = graph6_decode(graph6) if graph6 else package_graph(pkg)
    table = fuzz_package(
        G, pkg, rounds, seed, inequality=pkg.inequality, npes=jobs(ctx)
    )
    for row in table.itertuples(index=False):
        verdict = "accept" if row.accepted else "reject"
        click.echo(f"{row.round} {row.change} {verdict} {row.codes}".strip())
    rejected = int(table["accepted"].eq(False).sum())
    click.echo(f"rejected {rejected} of {rounds}")
    return 0


@main.group(name="rank")
def rank_group():
    """Upper bounds on the LS+-rank"""
    pass


@rank_group.command(name="bound")
@click.argument("graph6", required=False)
@click.option(
    "--catalog",
    type=click.Path(exists=True, dir_okay=False),
    default=None,
    help="File with one graph6 per line",
)
@click.option("--ell", type=click.IntRange(min=1), default=None)
@click.option("--depth", type=click.IntRange(min=0), default=None)
@click.option("--trace", is_flag=True, help="Print the proof trace")
@click.option("--output", type=click.Path(), default=None, help="CSV table")
@click.pass_context
@malformed_input
def cli_bound(ctx, graph6, catalog, ell, depth, trace, output):
    """Rule-derived bound of a graph, or of every graph in a catalog

    With --ell the exit code is 1 when some graph stays open, i.e. its
    bound does not exclude rank ell.
    """
    echo_config(ctx)
    if depth is None:
        depth = ctx.find_root().obj["depth"]
    if (graph6 is None) == (catalog is None):
        raise click.UsageError("Give either GRAPH6 or --catalog")

    if graph6 is not None:
        bound, proof = rank_upper_bound(graph6_decode(graph6), depth=depth)
        click.echo(f"bound: {bound} ({proof.rule.value})")
        if trace:
            click.echo(proof.render())
        if (ell is not None) and (bound >= ell):
            ctx.exit(1)
        return 0

    with open(catalog) as fp:
        lines = fp.read().splitlines()
    table = classify_vt_candidates(
        lines, ell=ell or 1, depth=depth, npes=jobs(ctx)
    )
    for row in table.itertuples(index=False):
        if row.error is not None:
            click.echo(f"{row.index} {row.graph6} error: {row.error}")
            continue
        flag = " open" if (ell is not None) and row.open else ""
        click.echo(
            f"{row.index} {row.graph6} {row.bound} {row.rule}{flag}"
        )
        if trace:
            click.echo(row.trace.render(indent=1))
    for rule, count in rule_summary(table).items():
        click.echo(f"# {rule}: {count}")
    if output is not None:
        table.drop(columns=["trace"]).to_csv(output, index=False)
    if (ell is not None) and table["open"].eq(True).any():
        ctx.exit(1)
    return 0


@main.group(name="search")
def search_group():
    """Candidate pipeline stages"""
    pass


def _seeds(ell, seeds_file):
    if seeds_file is not None:
        return read_graphs(seeds_file)
    if ell == 2:
        return [graph6_decode("Bw")]
    if ell == 3:
        return two_minimal_graphs()
    raise click.UsageError(f"--seeds is required for ell={ell}")


def _emit_graphs(graphs, output):
    if output is None:
        for G in graphs:
            click.echo(graph6_encode(G))
    else:
        write_graphs(output, graphs)


@search_group.command(name="candidates")
@click.option("--ell", type=click.IntRange(min=2), required=True)
@click.option(
    "--seeds",
    "seeds_file",
    type=click.Path(exists=True, dir_okay=False),
    default=None,
    help="graph6 seeds, default the known (ell - 1)-minimal graphs",
)
@click.option(
    "--join-mode", type=click.Choice(["any", "all"]), default="any"
)
@click.option("--output", type=click.Path(), default=None)
@click.pass_context
@malformed_input
def cli_candidates(ctx, ell, seeds_file, join_mode, output):
    """Join a vertex to a seed and properly 2-stretch it"""
    echo_config(ctx)
    graphs = generate_stretch_candidates(
        _seeds(ell, seeds_file), ell, join_mode=join_mode, npes=jobs(ctx)
    )
    click.echo(f"# {len(graphs)} candidates")
    _emit_graphs(graphs, output)
    return 0


@search_group.command(name="pairs")
@click.argument("graphs", type=click.Path(exists=True, dir_okay=False))
@click.option("--output", type=click.Path(), required=True)
@click.pass_context
@malformed_input
def cli_pairs(ctx, graphs, output):
    """Pair each graph with its full-support facets"""
    echo_config(ctx)
    pairs = facet_pair_extraction(read_graphs(graphs), npes=jobs(ctx))
    write_pairs(output, pairs)
    click.echo(f"# {len(pairs)} pairs")
    return 0


@search_group.command(name="minimal")
@click.argument("pairs", type=click.Path(exists=True, dir_okay=False))
@click.option("--output", type=click.Path(), required=True)
@click.pass_context
@malformed_input
def cli_minimal(ctx, pairs, output):
    """Keep the pairs minimal under edge containment"""
    echo_config(ctx)
    kept = minimal_elements(read_pairs(pairs))
    write_pairs(output, kept)
    click.echo(f"# {len(kept)} minimal pairs")
    return 0


@search_group.command(name="closure")
@click.argument("pairs", type=click.Path(exists=True, dir_okay=False))
@click.option("--output", type=click.Path(), default=None)
@click.pass_context
@malformed_input
def cli_closure(ctx, pairs, output):
    """Edge subgraphs keeping each pair's inequality valid, merged"""
    echo_config(ctx)
    items = [(p.graph, p.inequality) for p in read_pairs(pairs)]
    if len(items) == 1:
        graphs = edge_subgraph_closure(*items[0])
    else:
        graphs = merge_closures(items, npes=jobs(ctx))
    click.echo(f"# {len(graphs)} graphs")
    _emit_graphs(graphs, output)
    return 0


@search_group.command(name="cliques")
@click.argument("n", type=click.IntRange(min=3))
@click.argument("d", type=click.IntRange(min=0))
@click.option("--hat", is_flag=True, help="One cross edge per stretched pair")
@click.option("--sparse", is_flag=True, help="n(n-1)/2 + 2d edges only")
@click.option("--max-omega", type=click.IntRange(min=1), default=None)
@click.option("--min-omega", type=click.IntRange(min=1), default=None)
@click.option(
    "--facet-only", is_flag=True, help="e^T x <= d + 1 must be a facet"
)
@click.option("--output", type=click.Path(), default=None)
@click.pass_context
@malformed_input
def cli_cliques(
    ctx, n, d, hat, sparse, max_omega, min_omega, facet_only, output
):
    """Stretched cliques from K_n with d stretched vertices"""
    echo_config(ctx)
    specs = generate_stretched_cliques(
        n,
        d,
        hat=hat,
        sparse=sparse,
        max_omega=max_omega,
        min_omega=min_omega,
        facet_only=facet_only,
        npes=jobs(ctx),
    )
    click.echo(f"# {len(specs)} stretched cliques")
    _emit_graphs([s.graph for s in specs], output)
    return 0


if __name__ == "__main__":
    sys.exit(main())  # pragma: no cover
