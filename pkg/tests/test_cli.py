#!/usr/bin/env python

"""Tests for the `LSPlus` console script"""

from click.testing import CliRunner
import pytest

from LSPlus.certify import save_package
from LSPlus.cli import main
from LSPlus.graphs import (
    Graph,
    canonical_form,
    graph6_decode,
    graph6_encode,
)


@pytest.fixture
def runner(tmpdir, monkeypatch):
    """Isolated from any user configuration"""
    monkeypatch.setenv("LSPLUS_DIR", str(tmpdir.join("config")))
    return CliRunner()


def test_help(runner):
    result = runner.invoke(main, ["--help"])
    assert result.exit_code == 0
    for group in ("graph", "polytope", "cert", "rank", "search"):
        assert group in result.output


def test_config_echo(runner):
    result = runner.invoke(main, ["graph", "decode", "Bw"])
    assert result.exit_code == 0
    first = result.output.splitlines()[0]
    assert first.startswith("# graph decode ")
    assert "graph6=Bw" in first
    assert "depth=3" in first
    assert "jobs=1" in first


def test_config_file(runner, tmpdir):
    config = tmpdir.join("main.ini")
    config.write("[LSPlus]\njobs = 3\n")
    result = runner.invoke(
        main, ["--config", str(config), "graph", "decode", "Bw"]
    )
    assert "jobs=3" in result.output.splitlines()[0]
    result = runner.invoke(
        main,
        ["--jobs", "2", "--config", str(config), "graph", "decode", "?"],
    )
    assert "jobs=2" in result.output.splitlines()[0]


def test_bad_config(runner, tmpdir):
    config = tmpdir.join("main.ini")
    config.write("[LSPlus]\ndepth = 0\n")
    result = runner.invoke(
        main, ["--config", str(config), "graph", "decode", "Bw"]
    )
    assert result.exit_code == 2


def test_decode(runner):
    result = runner.invoke(main, ["graph", "decode", "Bw"])
    assert result.output.splitlines()[1:] == [
        "n = 3",
        "m = 3",
        "1 2",
        "1 3",
        "2 3",
    ]


def test_decode_empty(runner):
    result = runner.invoke(main, ["graph", "decode", "?"])
    assert result.exit_code == 0
    assert "n = 0" in result.output


@pytest.mark.parametrize("graph6", ["B", "Bx", "B w"])
def test_decode_malformed(runner, graph6):
    result = runner.invoke(main, ["graph", "decode", graph6])
    assert result.exit_code == 2


def test_encode(runner, tmpdir):
    edges = tmpdir.join("k3.txt")
    edges.write("# triangle\n1 2\n2 3\n3 1\n")
    result = runner.invoke(main, ["graph", "encode", str(edges)])
    assert result.exit_code == 0
    assert result.output.splitlines()[-1] == "Bw"

    result = runner.invoke(main, ["graph", "encode", "-"], input="1 2 3\n")
    assert result.exit_code == 2


def test_circulant_and_info(runner):
    result = runner.invoke(main, ["graph", "circulant", "5", "1"])
    C5 = graph6_encode(Graph.cycle(5))
    assert result.output.splitlines()[-1] == C5

    result = runner.invoke(main, ["graph", "info", C5])
    assert result.exit_code == 0
    lines = result.output.splitlines()
    assert "alpha = 2" in lines
    assert "omega = 2" in lines
    assert "perfect = False" in lines
    assert "vertex transitive = True" in lines


def test_destroy_and_delete(runner):
    C5 = graph6_encode(Graph.cycle(5))
    P2 = graph6_encode(Graph.path(2))
    result = runner.invoke(main, ["graph", "destroy", C5, "1"])
    assert result.output.splitlines()[-1] == P2
    result = runner.invoke(main, ["graph", "delete", C5, "1,2"])
    assert result.output.splitlines()[-1] == graph6_encode(Graph.path(3))
    result = runner.invoke(main, ["graph", "delete", C5, "0"])
    assert result.exit_code == 2


def test_stable_sets(runner):
    result = runner.invoke(main, ["polytope", "stable-sets", "Bw"])
    assert result.exit_code == 0
    assert len(result.output.splitlines()) == 1 + 4


def test_facets(runner):
    C5 = graph6_encode(Graph.cycle(5))
    args = ["polytope", "facets", C5, "--full-support"]
    result = runner.invoke(main, args)
    assert result.output.splitlines()[1:] == [
        "x1 + x2 + x3 + x4 + x5 <= 2"
    ]


def test_valid(runner, stretched_k4):
    G = graph6_encode(stretched_k4)
    args = ["polytope", "valid", G, "--a", "2,1,1,1,1,1,1"]
    result = runner.invoke(main, args + ["--beta", "3"])
    assert result.exit_code == 0
    assert "facet: True" in result.output
    result = runner.invoke(main, args + ["--beta", "2"])
    assert result.exit_code == 1
    result = runner.invoke(main, args[:-1] + ["1,1", "--beta", "3"])
    assert result.exit_code == 2


def test_cert_verify(runner, tmpdir, k4_package):
    bundle = str(tmpdir.join("bundle"))
    save_package(k4_package, bundle)
    result = runner.invoke(main, ["cert", "verify", bundle])
    assert result.exit_code == 0
    assert "verdict: accept" in result.output
    assert "violation: 230/76 > 3" in result.output


def test_cert_verify_reject(runner, tmpdir, k4_package):
    k4_package.Y[1, 1] += 1
    bundle = str(tmpdir.join("bundle"))
    save_package(k4_package, bundle)
    result = runner.invoke(main, ["cert", "verify", bundle])
    assert result.exit_code == 1
    assert "verdict: reject" in result.output


def test_cert_verify_missing(runner, tmpdir):
    result = runner.invoke(
        main, ["cert", "verify", str(tmpdir.join("nowhere"))]
    )
    assert result.exit_code == 2


def test_cert_synth_stable_set(runner, tmpdir, stretched_k4):
    bundle = str(tmpdir.join("integral"))
    G = graph6_encode(stretched_k4)
    result = runner.invoke(
        main,
        ["cert", "synth", "--graph", G, "--stable-set", "2,3",
         "--level", "2", "--output", bundle],
    )
    assert result.exit_code == 0
    result = runner.invoke(main, ["cert", "verify", bundle])
    assert result.exit_code == 0


def test_cert_synth_matrix(runner, tmpdir):
    matrix = tmpdir.join("Y.csv")
    matrix.write("1,0.5\n0.5,0.5\n")
    output = str(tmpdir.join("uvw"))
    result = runner.invoke(
        main, ["cert", "synth", "--matrix", str(matrix), "--output", output]
    )
    assert result.exit_code == 0
    assert "Y scaled by 2" in result.output
    assert sorted(p.basename for p in tmpdir.join("uvw").listdir()) == [
        "UVW_Y_U.csv",
        "UVW_Y_V.csv",
        "UVW_Y_W.csv",
    ]


def test_cert_synth_not_psd(runner, tmpdir):
    matrix = tmpdir.join("Y.csv")
    matrix.write("1,2\n2,1\n")
    result = runner.invoke(
        main,
        ["cert", "synth", "--matrix", str(matrix), "--output",
         str(tmpdir.join("out"))],
    )
    assert result.exit_code == 1
    assert "NOT_PSD" in result.output


def test_cert_synth_usage(runner, tmpdir):
    result = runner.invoke(
        main, ["cert", "synth", "--output", str(tmpdir.join("out"))]
    )
    assert result.exit_code == 2


def test_cert_fuzz(runner, tmpdir, k4_package):
    bundle = str(tmpdir.join("bundle"))
    save_package(k4_package, bundle)
    args = ["cert", "fuzz", bundle, "--seed", "7", "--rounds", "4"]
    first = runner.invoke(main, args)
    assert first.exit_code == 0
    assert first.output.splitlines()[-1].startswith("rejected ")
    assert runner.invoke(main, args).output == first.output


def test_rank_bound(runner, stretched_k4):
    G = graph6_encode(stretched_k4)
    result = runner.invoke(main, ["rank", "bound", G, "--trace"])
    assert result.exit_code == 0
    assert result.output.splitlines()[1].startswith("bound: 2 ")
    result = runner.invoke(main, ["rank", "bound", G, "--ell", "2"])
    assert result.exit_code == 1
    result = runner.invoke(main, ["rank", "bound", G, "--ell", "3"])
    assert result.exit_code == 0


def test_rank_bound_usage(runner):
    assert runner.invoke(main, ["rank", "bound"]).exit_code == 2


def test_rank_bound_catalog(runner, tmpdir, two_minimal):
    catalog = tmpdir.join("catalog.g6")
    entries = [graph6_encode(G) for G in two_minimal] + ["Bw", "B"]
    catalog.write("\n".join(entries) + "\n")
    output = str(tmpdir.join("table.csv"))
    result = runner.invoke(
        main,
        ["rank", "bound", "--catalog", str(catalog), "--ell", "2",
         "--output", output],
    )
    assert result.exit_code == 1
    lines = result.output.splitlines()
    assert lines[1].endswith(" open")
    assert not lines[3].endswith(" open")
    assert "error" in lines[4]
    assert tmpdir.join("table.csv").check()


def test_search_candidates(runner, tmpdir, two_minimal):
    output = str(tmpdir.join("candidates.g6"))
    result = runner.invoke(
        main, ["search", "candidates", "--ell", "2", "--output", output]
    )
    assert result.exit_code == 0
    found = tmpdir.join("candidates.g6").read().split()
    assert sorted(canonical_form(graph6_decode(s)) for s in found) == sorted(
        canonical_form(G) for G in two_minimal
    )
    result = runner.invoke(main, ["search", "candidates", "--ell", "4"])
    assert result.exit_code == 2


def test_search_pairs_minimal_closure(runner, tmpdir):
    graphs = tmpdir.join("c5.g6")
    graphs.write(graph6_encode(Graph.cycle(5)) + "\n")
    pairs = str(tmpdir.join("pairs.txt"))
    result = runner.invoke(
        main, ["search", "pairs", str(graphs), "--output", pairs]
    )
    assert result.exit_code == 0
    assert "# 1 pairs" in result.output

    kept = str(tmpdir.join("minimal.txt"))
    result = runner.invoke(
        main, ["search", "minimal", pairs, "--output", kept]
    )
    assert "# 1 minimal pairs" in result.output

    result = runner.invoke(main, ["search", "closure", kept])
    assert result.exit_code == 0
    lines = result.output.splitlines()
    assert lines[1] == "# 1 graphs"
    assert canonical_form(graph6_decode(lines[2])) == canonical_form(
        Graph.cycle(5)
    )


def test_search_cliques(runner):
    result = runner.invoke(main, ["search", "cliques", "4", "1"])
    assert result.exit_code == 0
    assert "# 2 stretched cliques" in result.output
    assert len(result.output.splitlines()) == 2 + 2
    assert runner.invoke(main, ["search", "cliques", "4", "5"]).exit_code == 2
