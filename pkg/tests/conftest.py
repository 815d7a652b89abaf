"""Shared fixtures for the LSPlus tests"""

import pytest

from LSPlus.certify import (
    CertificatePackage,
    UVWCertificate,
    all_tags,
    attach_graph,
    m1_id,
)
from LSPlus.numerics import as_int_matrix, identity, zeros

from .known_graphs import (
    K4_CERT_U,
    K4_CERT_V,
    K4_CERT_W,
    K4_CERT_Y,
    STRETCHED_K4,
    STRETCHED_K4_INEQUALITY,
    TWO_MINIMAL,
    from_pairs,
)


@pytest.fixture
def stretched_k4():
    return from_pairs(STRETCHED_K4)


@pytest.fixture
def two_minimal():
    return [from_pairs(s) for s in TWO_MINIMAL]


@pytest.fixture
def k4_uvw():
    return UVWCertificate(K4_CERT_U, K4_CERT_V, K4_CERT_W)


@pytest.fixture
def k4_package(stretched_k4, k4_uvw):
    """Level 1 package violating 2 x_1 + x_2 + ... + x_7 <= 3"""
    pkg = CertificatePackage(
        level=1,
        Y=K4_CERT_Y,
        uvw={"Y": k4_uvw},
        inequality=STRETCHED_K4_INEQUALITY,
    )
    return attach_graph(pkg, stretched_k4)


@pytest.fixture
def k4_level2(stretched_k4, k4_uvw):
    """Level 2 package over e_0 e_0^T with the level 1 matrix as every layer"""
    n = stretched_k4.n
    outer = zeros(n + 1, n + 1)
    outer[0, 0] = 1
    M1 = {t: as_int_matrix(K4_CERT_Y) for t in all_tags(n)}
    pkg = CertificatePackage(level=2, Y=outer, M1=M1)
    W = zeros(1, n + 1)
    W[0, 0] = 1
    pkg.uvw["Y"] = UVWCertificate(identity(1), zeros(1, 1), W)
    for t in M1:
        pkg.uvw[m1_id(t)] = k4_uvw
    return attach_graph(pkg, stretched_k4)
