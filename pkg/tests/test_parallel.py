import numpy as np
import pytest

from shortops import (
    BadAuxiliary,
    DimensionMismatch,
    NotInDA,
    NotSummable,
    Subspace,
    in_da,
    opnorm,
    parallel_subtract,
    parallel_sum,
    recover_shorted,
    shorted,
    shorted_via_limit,
    summability,
)
from shortops.genlab import gauss, gen_da_member, trial_rng


def e1_subspace(n):
    return Subspace(n, np.eye(n, dtype=np.complex128)[:, :1])


def test_summability_examples():
    assert summability([[1.0]], [[1.0]]).strongly
    report = summability(np.diag([1.0, 0.0]), np.diag([-1.0, 0.0]))
    assert not report.strongly and not report.weakly
    assert summability(np.diag([1.0, 0.0]), np.diag([0.0, 1.0])).strongly
    with pytest.raises(DimensionMismatch):
        summability(np.eye(2), np.eye(3))


def test_parallel_sum_examples():
    res = parallel_sum([[2.0]], [[2.0]])
    assert np.allclose(res.sum, [[1.0]])
    assert res.max_route_disagreement <= 1e-12

    res = parallel_sum(np.diag([1.0, 0.0]), np.diag([0.0, 1.0]))
    assert np.allclose(res.sum, 0.0)

    rng = np.random.default_rng(1)
    A = rng.standard_normal((3, 4)) + 1j * rng.standard_normal((3, 4))
    res = parallel_sum(A, A)
    assert np.allclose(res.sum, A / 2)


def test_parallel_sum_routes_exposed():
    A = np.array([[2.0, 1.0], [1.0, 1.0]])
    B = np.diag([3.0, 1.0])
    res = parallel_sum(A, B)
    for route in (res.route_pinv, res.route_reduced, res.route_block):
        assert opnorm(route - res.sum) <= 1e-9 * max(opnorm(A), opnorm(B))
    assert np.allclose(res.sum, res.route_block)


def test_parallel_sum_not_summable():
    with pytest.raises(NotSummable) as info:
        parallel_sum(np.diag([1.0, 0.0]), np.diag([-1.0, 0.0]))
    assert info.value.report.defects.a_range > 0.1


def test_in_da_examples():
    assert in_da([[1.0]], [[2.0]])
    A = np.array([[1.0, 0.0], [0.0, 2.0]])
    assert not in_da(A, A)
    assert in_da(2 * A, A)


def test_parallel_subtract_examples():
    assert np.allclose(parallel_subtract([[1.0]], [[2.0]]), [[2.0]])

    rng = np.random.default_rng(3)
    A = rng.standard_normal((3, 3))
    X = parallel_subtract(2 * A, A)
    assert np.allclose(X, -2 * A)
    assert np.allclose(parallel_sum(A, X).sum, 2 * A)

    with pytest.raises(NotInDA):
        parallel_subtract(A, A)


def test_parallel_subtract_round_trip_random():
    rng = trial_rng(61, 0, 0)
    for _ in range(50):
        m, n = [int(v) for v in rng.integers(2, 6, size=2)]
        r = int(rng.integers(1, min(m, n) + 1))
        A = gauss(rng, m, r) @ gauss(rng, r, n)
        C = gen_da_member(A, rng)
        X = parallel_subtract(C, A)
        assert opnorm(parallel_sum(A, X).sum - C) <= 1e-8 * max(opnorm(C), 1.0)


def test_shorted_via_limit_closed_form():
    A = np.array([[2.0, 1.0], [1.0, 1.0]])
    S = T = e1_subspace(2)
    B = np.diag([1.0, 0.0])
    record = shorted_via_limit(A, S, T, B, schedule=[1, 2, 4, 8, 9, 16])
    assert record.schedule == [1, 2, 4, 8, 9, 16]
    for n, err in zip(record.schedule, record.errors):
        assert err == pytest.approx(1.0 / (n + 1), abs=1e-12)
    # the n = 9 entry matches the worked value 0.9 exactly
    res = parallel_sum(A, 9 * B)
    assert np.allclose(res.sum, [[0.9, 0.0], [0.0, 0.0]], atol=1e-12)


def test_shorted_via_limit_full_space():
    rng = np.random.default_rng(5)
    A = rng.standard_normal((3, 3)) + 4 * np.eye(3)
    S = T = Subspace.full(3)
    record = shorted_via_limit(A, S, T, np.eye(3), schedule=[1, 4, 16, 64])
    assert all(e1 >= e2 for e1, e2 in zip(record.errors, record.errors[1:]))
    assert record.errors[-1] < record.errors[0]


def test_shorted_via_limit_bad_auxiliary():
    A = np.array([[2.0, 1.0], [1.0, 1.0]])
    S = T = e1_subspace(2)
    with pytest.raises(BadAuxiliary):
        shorted_via_limit(A, S, T, np.eye(2))


def test_recover_shorted_examples():
    A = np.array([[2.0, 1.0], [1.0, 1.0]])
    S = T = e1_subspace(2)
    L = np.diag([1.0, 0.0])
    got = recover_shorted(A, S, T, L, 10)
    assert np.allclose(got, [[1.0, 0.0], [0.0, 0.0]], atol=1e-9)

    rng = np.random.default_rng(2)
    M = rng.standard_normal((3, 3)) + 4 * np.eye(3)
    got = recover_shorted(M, Subspace.full(3), Subspace.full(3), np.eye(3), 1)
    assert np.allclose(got, M, atol=1e-9)

    D = np.diag([2.0, 3.0])
    got = recover_shorted(D, e1_subspace(2), e1_subspace(2), L, 8)
    assert np.allclose(got, np.diag([2.0, 0.0]), atol=1e-9)


def test_commutativity_and_rank_random():
    rng = trial_rng(71, 1, 0)
    from shortops import subspace_meet, rank

    for _ in range(40):
        m, n = [int(v) for v in rng.integers(2, 6, size=2)]
        r = int(rng.integers(1, min(m, n) + 1))
        total = gauss(rng, m, r) @ gauss(rng, r, n)
        U, s, Vh = np.linalg.svd(total)
        A = (U[:, :r] @ gauss(rng, r, r)) @ Vh[:r]
        B = total - A
        if not summability(A, B).strongly:
            continue
        left = parallel_sum(A, B).sum
        right = parallel_sum(B, A).sum
        assert opnorm(left - right) <= 1e-9 * max(opnorm(A), opnorm(B), 1.0)
        meet = subspace_meet(Subspace.range_of(A), Subspace.range_of(B))
        got_rank = sum(
            np.linalg.svd(left, compute_uv=False)
            > 1e-10 * max(m, n) * max(opnorm(A), opnorm(B))
        )
        assert got_rank == meet.dim
