#!/usr/bin/env python

"""Tests for `LSPlus.certify`, the certificate verifier"""

from fractions import Fraction
import json
import os

import numpy as np
import pytest

from LSPlus.backend import BundleLayout
from LSPlus.certify import (
    BundleError,
    CertificatePackage,
    FailureCode,
    MissingMatrixError,
    Tag,
    UVWCertificate,
    all_tags,
    attach_graph,
    fuzz_package,
    load_package,
    package_graph,
    parse_matrix_id,
    save_package,
    verify_package,
    verify_rank_certificate,
    verify_uvw,
)
from LSPlus.graphs import Graph
from LSPlus.numerics import as_int_matrix, identity, zeros
from LSPlus.polytope import Inequality, enumerate_stable_sets
from LSPlus.synthesize import integral_package

from .known_graphs import (
    K4_CERT_K,
    K4_CERT_U,
    K4_CERT_V,
    K4_CERT_W,
    K4_CERT_Y,
    STRETCHED_K4_INEQUALITY,
)


def test_tags():
    t = Tag.parse("f_2")
    assert t == Tag("f", 1)
    assert str(t) == "f_2"
    assert t.number(9) == 11
    assert Tag("e", 2).number(9) == 3
    assert len(all_tags(4)) == 8
    for text in ("e_0", "g_1", "e1", "e_x"):
        with pytest.raises(ValueError):
            Tag.parse(text)


def test_tag_columns():
    M = [[3, 1], [1, 1]]
    assert Tag("e", 0).column(M) == (1, 1)
    assert Tag("f", 0).column(M) == (2, 0)


def test_parse_matrix_id():
    assert parse_matrix_id("Y") == ()
    assert parse_matrix_id("M1_e_2") == (Tag("e", 1),)
    assert parse_matrix_id("M2_e_1_f_2") == (Tag("e", 0), Tag("f", 1))
    for text in ("M1_e_1_f_2", "M3_e_1", "X", "M2_e_1"):
        with pytest.raises(ValueError):
            parse_matrix_id(text)


def test_uvw_of_the_stretched_clique(k4_uvw):
    check = verify_uvw(K4_CERT_Y, k4_uvw)
    assert check.accepted
    assert check.k == K4_CERT_K


def test_uvw_identity():
    I2 = identity(2)
    assert verify_uvw(I2, UVWCertificate(I2, zeros(2, 2), I2)).k == 1


def test_uvw_zero_matrix():
    Z = zeros(3, 3)
    check = verify_uvw(Z, UVWCertificate(zeros(1, 3), Z, identity(3)))
    assert check.accepted
    assert check.k == 1
    check = verify_uvw(Z, UVWCertificate(identity(3), Z, identity(3)))
    assert not check.accepted
    assert [f.code for f in check.failures] == [FailureCode.UVW_PRODUCT]


def test_uvw_wrong_product():
    V = as_int_matrix(K4_CERT_V)
    V[1, 2] = V[2, 1] = -18
    check = verify_uvw(K4_CERT_Y, UVWCertificate(K4_CERT_U, V, K4_CERT_W))
    assert not check.accepted
    assert FailureCode.UVW_PRODUCT in [f.code for f in check.failures]


def test_uvw_not_diagonally_dominant():
    """Moving 64 from V to U^T U keeps the product"""
    U = [list(r) for r in K4_CERT_U]
    U.append([8, 0, 0, 0, 0, 0, 0])
    V = as_int_matrix(K4_CERT_V)
    V[0, 0] = 121
    check = verify_uvw(K4_CERT_Y, UVWCertificate(U, V, K4_CERT_W))
    codes = [f.code for f in check.failures]
    assert codes == [FailureCode.NOT_DIAG_DOMINANT]
    assert check.k == K4_CERT_K
    assert not check.accepted


def test_uvw_dimension():
    cert = UVWCertificate(K4_CERT_U, K4_CERT_V, identity(7))
    check = verify_uvw(K4_CERT_Y, cert)
    assert [f.code for f in check.failures] == [FailureCode.DIMENSION]
    assert check.k is None


def test_uvw_asymmetric_matrix():
    I2 = identity(2)
    check = verify_uvw([[1, 1], [0, 1]], UVWCertificate(I2, zeros(2, 2), I2))
    assert [f.code for f in check.failures] == [FailureCode.SYMMETRY]
    assert check.k is None
    assert not check.accepted


def test_package_level_1(stretched_k4, k4_package):
    report = verify_package(stretched_k4, k4_package)
    assert report.accepted
    assert report.k == {"Y": K4_CERT_K}
    assert report.witness_denominator == 76
    assert report.witness[0] == Fraction(25, 76)
    assert report.rank_lower_bound is None


def test_rank_certificate(stretched_k4, k4_package):
    report = verify_rank_certificate(
        stretched_k4, STRETCHED_K4_INEQUALITY, k4_package
    )
    assert report.accepted
    assert report.rank_lower_bound == 2
    assert report.violation == 2
    assert report.ratio_bound == Fraction(115, 114)
    summary = report.summary()
    assert "verdict: accept" in summary
    assert f"k[Y] = {K4_CERT_K}" in summary
    assert "witness: (25, 40, 40, 40, 20, 20, 20)/76" in summary
    assert "violation: 230/76 > 3" in summary


def test_rank_certificate_invalid_inequality(stretched_k4, k4_package):
    report = verify_rank_certificate(
        stretched_k4, Inequality.ones(7, 2), k4_package
    )
    assert report.codes() == [FailureCode.INEQ_NOT_VALID]
    assert report.rank_lower_bound is None


def test_rank_certificate_no_violation(stretched_k4):
    pkg = integral_package(stretched_k4, [0])
    report = verify_rank_certificate(
        stretched_k4, STRETCHED_K4_INEQUALITY, pkg
    )
    assert report.codes() == [FailureCode.NO_VIOLATION]
    assert report.violation == -1


def test_rank_certificate_dimension(stretched_k4, k4_package):
    report = verify_rank_certificate(
        stretched_k4, Inequality.ones(6, 2), k4_package
    )
    assert FailureCode.DIMENSION in report.codes()


def test_asymmetric_matrix(stretched_k4, k4_package):
    k4_package.Y[0, 1] += 1
    report = verify_package(stretched_k4, k4_package)
    assert FailureCode.SYMMETRY in report.codes()
    assert report.codes().count(FailureCode.SYMMETRY) == 1
    assert FailureCode.UVW_PRODUCT not in report.codes()


def test_diagonal_differs_from_first_column(stretched_k4, k4_package):
    k4_package.Y[1, 1] += 1
    report = verify_package(stretched_k4, k4_package)
    assert FailureCode.DIAGONAL in report.codes()


def test_column_outside_frac(stretched_k4, k4_package):
    """Raising Y_02 leaves the column Y f_2 outside FRAC"""
    k4_package.Y[2, 0] = k4_package.Y[0, 2] = 70
    k4_package.Y[2, 2] = 70
    report = verify_package(stretched_k4, k4_package)
    assert FailureCode.CONE_MEMBERSHIP in report.codes()


def test_missing_uvw(stretched_k4, k4_package):
    k4_package.uvw.clear()
    report = verify_package(stretched_k4, k4_package)
    assert report.codes() == [FailureCode.MISSING_UVW]


def test_wrong_dimension(k4_package):
    report = verify_package(Graph.cycle(5), k4_package)
    assert report.codes() == [FailureCode.DIMENSION]


def test_failures_are_sorted(stretched_k4, k4_package):
    k4_package.Y[1, 1] += 1
    k4_package.Y[0, 1] += 1
    report = verify_package(stretched_k4, k4_package)
    values = [c.value for c in report.codes()]
    assert values == sorted(values)


def test_integral_packages(stretched_k4):
    for level in (1, 2):
        pkg = integral_package(stretched_k4, [1, 2, 3], level=level)
        report = verify_package(stretched_k4, pkg)
        assert report.accepted
        assert set(report.k.values()) == {1}
    assert "M1_f_2" in report.exempt
    assert "M1_e_2" in report.k


def test_integral_package_level_3():
    C5 = Graph.cycle(5)
    pkg = integral_package(C5, [0, 2], level=3)
    assert len(pkg.M2) == 25
    report = verify_package(C5, pkg)
    assert report.accepted


def test_integral_package_rejects_edges(stretched_k4):
    with pytest.raises(ValueError):
        integral_package(stretched_k4, [0, 1])


def test_level_2_wrapper(stretched_k4, k4_level2):
    report = verify_package(stretched_k4, k4_level2)
    assert report.accepted
    assert report.k["Y"] == 1
    assert report.k["M1_f_3"] == K4_CERT_K


def test_level_2_domination(stretched_k4, k4_level2):
    """Y f_1 = e_0 needs a nonzero layer matrix"""
    k4_level2.M1[Tag("f", 0)] = zeros(8, 8)
    del k4_level2.uvw["M1_f_1"]
    report = verify_package(stretched_k4, k4_level2)
    assert report.codes() == [FailureCode.DOMINANCE]
    assert "M1_f_1" in report.exempt


def random_graph(rng, n):
    edges = [
        (i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < 0.4
    ]
    return Graph.from_edges(n, edges)


@pytest.mark.parametrize("seed", range(10))
def test_integral_packages_of_random_graphs(seed):
    """Packages of stable sets are accepted at every level"""
    rng = np.random.default_rng(seed)
    G = random_graph(rng, int(rng.integers(2, 8)))
    stable_sets = enumerate_stable_sets(G)
    chi = stable_sets[int(rng.integers(len(stable_sets)))]
    S = [i for i, v in enumerate(chi) if v]
    for level in (1, 2, 3):
        report = verify_package(G, integral_package(G, S, level=level))
        assert report.accepted, report.failures


def test_level_2_missing_matrix(stretched_k4):
    pkg = integral_package(stretched_k4, [1, 2, 3], level=2)
    del pkg.M1[Tag("f", 0)]
    report = verify_package(stretched_k4, pkg)
    assert FailureCode.MISSING_MATRIX in report.codes()
    with pytest.raises(MissingMatrixError):
        pkg.matrix("M1_f_1")


def test_malformed_tag(stretched_k4):
    pkg = integral_package(stretched_k4, [1], level=2)
    pkg.M1[Tag("e", 9)] = pkg.Y.copy()
    with pytest.raises(ValueError):
        verify_package(stretched_k4, pkg)


def test_package_level_range():
    with pytest.raises(ValueError):
        CertificatePackage(level=4, Y=identity(2))


def test_attach_graph(stretched_k4, k4_package):
    assert package_graph(k4_package) == stretched_k4
    with pytest.raises(ValueError):
        attach_graph(k4_package, Graph.cycle(5))


def test_parallel_report_is_identical(stretched_k4):
    pkg = integral_package(stretched_k4, [4, 5], level=2)
    serial = verify_package(stretched_k4, pkg)
    parallel = verify_package(stretched_k4, pkg, npes=2)
    assert serial.failures == parallel.failures
    assert serial.k == parallel.k


def test_bundle_round_trip(tmpdir, k4_package):
    path = str(tmpdir.join("bundle"))
    save_package(k4_package, path)
    assert os.path.exists(os.path.join(path, "UVW_Y_V.csv"))
    pkg = load_package(path)
    assert pkg == k4_package
    assert pkg.inequality == STRETCHED_K4_INEQUALITY


def test_bundle_numeric_tags(tmpdir, stretched_k4):
    layout = BundleLayout(numeric_tags=True)
    pkg = integral_package(stretched_k4, [1, 2, 3], level=2)
    path = str(tmpdir.join("level2"))
    save_package(pkg, path, layout=layout)
    assert os.path.exists(os.path.join(path, "M1_9.csv"))
    assert os.path.exists(os.path.join(path, "UVW_M1_2_W.csv"))
    assert load_package(path, layout=layout) == pkg
    with pytest.raises(BundleError):
        load_package(path)


def test_bundle_manifest(tmpdir, k4_package):
    path = str(tmpdir.join("bundle"))
    save_package(k4_package, path)
    with open(os.path.join(path, "manifest.json")) as fp:
        manifest = json.load(fp)
    assert manifest["level"] == 1
    assert manifest["n"] == 7
    assert manifest["matrices"] == ["Y"]
    assert manifest["inequality"] == {"a": [2, 1, 1, 1, 1, 1, 1], "beta": 3}
    assert manifest["tags"]["f_1"] == 8


def test_bundle_missing_manifest(tmpdir, k4_package):
    path = str(tmpdir.join("bundle"))
    save_package(k4_package, path)
    os.remove(os.path.join(path, "manifest.json"))
    with pytest.raises(BundleError):
        load_package(path)
    with pytest.raises(BundleError):
        load_package(str(tmpdir.join("nowhere")))


def test_bundle_unknown_file(tmpdir, k4_package):
    path = str(tmpdir.join("bundle"))
    save_package(k4_package, path)
    tmpdir.join("bundle", "notes.txt").write("hello")
    with pytest.raises(BundleError):
        load_package(path)


def test_bundle_malformed_csv(tmpdir, k4_package):
    path = str(tmpdir.join("bundle"))
    save_package(k4_package, path)
    tmpdir.join("bundle", "Y.csv").write("1,2\n3,x\n")
    with pytest.raises(BundleError):
        load_package(path)


def test_bundle_missing_uvw_part(tmpdir, k4_package):
    path = str(tmpdir.join("bundle"))
    save_package(k4_package, path)
    os.remove(os.path.join(path, "UVW_Y_W.csv"))
    with pytest.raises(BundleError):
        load_package(path)


def test_fuzz_is_reproducible(stretched_k4, k4_package):
    first = fuzz_package(
        stretched_k4, k4_package, rounds=6, seed=3,
        inequality=STRETCHED_K4_INEQUALITY,
    )
    second = fuzz_package(
        stretched_k4, k4_package, rounds=6, seed=3,
        inequality=STRETCHED_K4_INEQUALITY,
    )
    assert list(first.columns) == ["round", "change", "accepted", "codes"]
    assert len(first) == 6
    assert first.equals(second)
    assert (first["codes"] == "").equals(first["accepted"])


def test_fuzz_layer_mutations_are_rejected(stretched_k4, k4_package):
    table = fuzz_package(stretched_k4, k4_package, rounds=20, seed=0)
    changed_y = table[table["change"].str.startswith("Y[")]
    assert not changed_y["accepted"].any()
    # the original is untouched
    assert verify_package(stretched_k4, k4_package).accepted
    assert np.array_equal(
        k4_package.Y.astype(int), np.array(K4_CERT_Y, dtype=int)
    )
