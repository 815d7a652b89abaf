#!/usr/bin/env python

"""Tests for `LSPlus.storage` and the backends"""

import os
import pickle

import numpy as np
import pytest

from LSPlus.backend import BaseStorage, BundleLayout, FileSystem, InMemory
from LSPlus.certify import FailureCode
from LSPlus.numerics import as_int_matrix, identity
from LSPlus.storage import PackageArchive
from LSPlus.synthesize import integral_package

from .known_graphs import STRETCHED_K4_INEQUALITY


def test_layout_native():
    layout = BundleLayout()
    assert layout.stem("Y", 7) == "Y"
    assert layout.stem("M2_e_1_f_2", 7) == "M2_e_1_f_2"
    assert layout.matrix_id("M1_f_3", 7) == "M1_f_3"
    assert layout.uvw_stem("M1_e_2", "V", 7) == "UVW_M1_e_2_V"
    assert layout.parse("UVW_M1_e_2_V", 7) == ("uvw", "M1_e_2", "V")
    assert layout.parse("M1_e_2", 7) == ("matrix", "M1_e_2")


def test_layout_numeric_tags():
    layout = BundleLayout(numeric_tags=True)
    assert layout.stem("M1_f_2", n=9) == "M1_11"
    assert layout.stem("M2_e_1_f_9", n=9) == "M2_1_18"
    assert layout.matrix_id("M2_1_18", n=9) == "M2_e_1_f_9"
    with pytest.raises(ValueError):
        layout.matrix_id("M1_19", n=9)


@pytest.mark.parametrize(
    "stem", ["X", "M1", "M1_e_1_e_2", "M3_e_1", "M1_g_1", "UVW_Y_Q"]
)
def test_layout_unknown(stem):
    with pytest.raises(ValueError):
        BundleLayout().parse(stem, 7)


def test_base_storage():
    db = BaseStorage()
    with pytest.raises(NotImplementedError):
        "Y" in db
    with pytest.raises(NotImplementedError):
        db["Y"]


def test_filesystem(tmpdir):
    db = FileSystem(str(tmpdir))
    M = as_int_matrix([[2, -1], [-1, 2]])
    db["Y"] = M
    assert "Y" in db
    assert "M1_e_1" not in db
    assert "bad/key" not in db
    assert list(db) == ["Y"]
    assert np.array_equal(db["Y"].astype(int), M.astype(int))
    with pytest.raises(KeyError):
        db["M1_e_1"]


def test_filesystem_path():
    db = FileSystem(os.getcwd())
    assert db.path("M1_e_3") == os.path.join(os.getcwd(), "M1_e_3.csv")
    with pytest.raises(ValueError):
        db.path("")


def test_filesystem_missing_root(tmpdir):
    with pytest.raises(FileNotFoundError):
        FileSystem(str(tmpdir.join("missing")))


def test_inmemory():
    db = InMemory()
    db["Y"] = identity(3)
    db["M1_e_1"] = identity(3)
    assert "Y" in db
    assert len(db) == 2
    assert list(db) == ["M1_e_1", "Y"]


def test_package_is_serializable(k4_package):
    """Packages travel between processes"""
    pkg = pickle.loads(pickle.dumps(k4_package))
    assert pkg == k4_package


def test_archive(tmpdir, stretched_k4, k4_package):
    archive = PackageArchive(str(tmpdir.join("archive")), create=True)
    archive["stretched_k4"] = k4_package
    archive["integral"] = integral_package(stretched_k4, [1, 2], level=2)

    assert "stretched_k4" in archive
    assert "missing" not in archive
    assert "a/b" not in archive
    assert list(archive) == ["integral", "stretched_k4"]
    assert archive["stretched_k4"] == k4_package
    with pytest.raises(KeyError):
        archive["missing"]

    report = archive.check("stretched_k4")
    assert report.accepted
    assert report.rank_lower_bound == 2
    assert archive.check("integral").accepted
    report = archive.check("integral", inequality=STRETCHED_K4_INEQUALITY)
    assert report.codes() == [FailureCode.NO_VIOLATION]


def test_archive_summary(tmpdir, k4_package):
    archive = PackageArchive(str(tmpdir), create=True)
    archive["good"] = k4_package
    k4_package.Y[1, 1] += 1
    archive["bad"] = k4_package
    os.makedirs(str(tmpdir.join("broken")))
    tmpdir.join("broken", "manifest.json").write("{")

    table = archive.summary()
    assert list(table["name"]) == ["bad", "broken", "good"]
    table = table.set_index("name")
    assert table.loc["good", "accepted"]
    assert not table.loc["bad", "accepted"]
    assert "DIAGONAL" in table.loc["bad", "codes"]
    assert table.loc["broken", "error"] is not None
    assert table.loc["good", "n"] == 7


def test_archive_numeric_layout(tmpdir, stretched_k4):
    layout = BundleLayout(numeric_tags=True)
    archive = PackageArchive(str(tmpdir), layout=layout)
    archive["level2"] = integral_package(stretched_k4, [0], level=2)
    assert os.path.exists(str(tmpdir.join("level2", "M1_8.csv")))
    assert archive.check("level2").accepted


def test_archive_missing_root(tmpdir):
    with pytest.raises(FileNotFoundError):
        PackageArchive(str(tmpdir.join("nowhere")))
    with pytest.raises(ValueError):
        PackageArchive(str(tmpdir)).path("")
