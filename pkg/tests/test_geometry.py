import numpy as np
import pytest

from shortops import (
    DimensionMismatch,
    NotComplementary,
    Subspace,
    angles,
    oblique_projection,
    ortho_projection,
    subspace_join,
    subspace_meet,
)
from shortops.genlab import gen_subspace


def span(*vectors):
    cols = np.array(vectors, dtype=np.complex128).T
    return Subspace.from_spanning(cols)


def test_subspace_validation():
    with pytest.raises(ValueError):
        Subspace(2, np.array([[1.0, 1.0], [0.0, 0.0]]))  # not orthonormal
    with pytest.raises(DimensionMismatch):
        Subspace(3, np.eye(2))
    S = Subspace.from_projection(np.diag([1.0, 0.0]))
    assert S.dim == 1
    with pytest.raises(ValueError):
        Subspace.from_projection(np.array([[1.0, 1.0], [0.0, 0.0]]))


def test_ortho_projection_examples():
    P = ortho_projection(span([1, 1]))
    assert np.allclose(P, [[0.5, 0.5], [0.5, 0.5]])
    assert np.allclose(ortho_projection(Subspace.full(3)), np.eye(3))
    assert np.allclose(ortho_projection(Subspace.trivial(3)), np.zeros((3, 3)))


def test_oblique_projection_examples():
    Q = oblique_projection(span([1, 0]), span([1, 1]))
    assert np.allclose(Q, [[1.0, -1.0], [0.0, 0.0]])
    # orthogonal complementary pair reduces to the orthogonal projection
    R = span([1, 0, 0], [0, 1, 0])
    N = span([0, 0, 1])
    assert np.allclose(oblique_projection(R, N), ortho_projection(R))
    with pytest.raises(NotComplementary):
        oblique_projection(span([1, 0]), span([1, 0]))


def test_meet_join_examples():
    e = np.eye(3)
    M = span(e[0], e[1])
    N = span(e[1], e[2])
    meet = subspace_meet(M, N)
    assert meet.dim == 1
    assert meet.contains(np.array([[0.0], [1.0], [0.0]]))
    assert subspace_join(M, N).dim == 3

    assert subspace_meet(M, M).equals(M)
    assert subspace_join(M, M).equals(M)

    perp = span(e[2])
    assert subspace_meet(M, perp).dim == 0
    with pytest.raises(DimensionMismatch):
        subspace_meet(M, Subspace.full(4))


def test_de_morgan_duality():
    rng = np.random.default_rng(9)
    for _ in range(100):
        n = int(rng.integers(1, 9))
        M = gen_subspace(n, int(rng.integers(0, n + 1)), rng)
        N = gen_subspace(n, int(rng.integers(0, n + 1)), rng)
        lhs = subspace_meet(M, N).complement()
        rhs = subspace_join(M.complement(), N.complement())
        assert lhs.equals(rhs)


def test_angle_examples():
    ap = angles(span([1, 0]), span([1, 1]))
    assert ap.dixmier_cos == pytest.approx(1 / np.sqrt(2), abs=1e-12)
    assert ap.friedrichs_cos == pytest.approx(1 / np.sqrt(2), abs=1e-12)

    same = span([1, 0])
    ap = angles(same, same)
    assert ap.dixmier_cos == pytest.approx(1.0, abs=1e-12)
    assert ap.friedrichs_cos == 0.0  # empty sup once the intersection is removed

    e = np.eye(3)
    M = span(e[0], e[1])
    N = span(e[0], (e[1] + e[2]) / np.sqrt(2))
    ap = angles(M, N)
    assert ap.dixmier_cos == pytest.approx(1.0, abs=1e-12)
    assert ap.friedrichs_cos == pytest.approx(1 / np.sqrt(2), abs=1e-10)


def test_angles_trivial_subspace_convention():
    ap = angles(Subspace.trivial(3), Subspace.full(3))
    assert ap.dixmier_cos == 0.0
    assert ap.friedrichs_cos == 0.0


def test_friedrichs_dominated_by_dixmier_when_intersection_trivial():
    rng = np.random.default_rng(4)
    for _ in range(200):
        n = int(rng.integers(2, 9))
        M = gen_subspace(n, int(rng.integers(0, n + 1)), rng)
        N = gen_subspace(n, int(rng.integers(0, n + 1)), rng)
        if subspace_meet(M, N).dim:
            continue
        ap = angles(M, N)
        assert abs(ap.friedrichs_cos - ap.dixmier_cos) <= 1e-9


def test_oblique_projection_range_and_nullspace():
    rng = np.random.default_rng(42)
    for _ in range(100):
        n = int(rng.integers(2, 8))
        k = int(rng.integers(0, n + 1))
        R = gen_subspace(n, k, rng)
        N = gen_subspace(n, n - k, rng)
        if angles(R, N).dixmier_cos >= 1 - 1e-6:
            continue
        Q = oblique_projection(R, N)
        scale = max(1.0, np.linalg.norm(Q, 2)) ** 2 if Q.size else 1.0
        assert np.linalg.norm(Q @ Q - Q) <= 1e-9 * scale
        assert Subspace.range_of(Q).equals(R) or k == 0
        assert np.linalg.norm(Q @ N.basis) <= 1e-9 * scale
