import numpy as np
import pytest

from stochgram.direct import cons_fim_direct, obs_fim_direct
from stochgram.linalg import HorizonError, rel_err
from stochgram.recursive import measurement_info
from stochgram.system import TimeVaryingLinearSystem, lift_lti
from stochgram.trajectory import (
    MAX_DENSE_SIZE,
    assemble_trajectory_fim,
    block_inverse_info,
    corner_check,
    intermediate_components,
    intermediate_state_info,
)

from conftest import random_family, random_ltv, scalar_lti


def unit(N):
    return lift_lti(scalar_lti(), N)


def test_unit_scalar_assembly():
    np.testing.assert_array_equal(assemble_trajectory_fim(unit(1), 2).matrix, [[2, -1], [-1, 2]])
    np.testing.assert_array_equal(
        assemble_trajectory_fim(unit(2), 3).matrix, [[2, -1, 0], [-1, 3, -1], [0, -1, 2]]
    )


def test_unit_scalar_corners():
    inv = np.linalg.inv(assemble_trajectory_fim(unit(1), 2).matrix)
    assert inv[0, 0] == pytest.approx(2 / 3) and inv[1, 1] == pytest.approx(2 / 3)
    report = corner_check(unit(1), 2)
    assert report.passed


def test_unit_scalar_intermediate():
    assert intermediate_state_info(unit(2), 3, 1).matrix[0, 0] == pytest.approx(2.0, abs=1e-12)
    assert block_inverse_info(unit(2), 3, 1)[0, 0] == pytest.approx(2.0, abs=1e-12)


def test_assembly_symmetric_and_block_tridiagonal(rng):
    sys = random_ltv(rng, n=2, p=1, N=5)
    fim = assemble_trajectory_fim(sys, 6)
    np.testing.assert_array_equal(fim.matrix, fim.matrix.T)
    for i in range(6):
        for j in range(6):
            if abs(i - j) > 1:
                assert not fim.block(i, j).any()


def test_window_limits():
    with pytest.raises(HorizonError):
        assemble_trajectory_fim(unit(2), 1)
    with pytest.raises(HorizonError):
        assemble_trajectory_fim(unit(2), 4)
    with pytest.raises(HorizonError):
        intermediate_state_info(unit(2), 3, 3)
    with pytest.raises(ValueError):
        assemble_trajectory_fim(lift_lti(scalar_lti(q=None), 2), 2)


def test_dense_cap_reported_not_raised():
    report = corner_check(unit(MAX_DENSE_SIZE + 1), MAX_DENSE_SIZE + 2)
    assert not report.passed and "capped" in report.message


def test_dynamics_only_information_is_singular():
    sys = lift_lti(scalar_lti(c=0.0), 1)
    np.testing.assert_array_equal(assemble_trajectory_fim(sys, 2).matrix, [[1, -1], [-1, 1]])
    report = corner_check(sys, 2)
    assert not report.passed and "trajectory information matrix" in report.message


def test_underdetermined_window_reported():
    rng = np.random.default_rng(53)
    sys = random_ltv(rng, n=3, p=1, N=3)
    report = corner_check(sys, 2)
    assert not report.passed and report.message


def test_corners_and_blocks_on_random_family():
    for sys in random_family(51, 40):
        for w in range(2, min(sys.horizon + 1, 8) + 1):
            if w * sys.meas_dim < sys.state_dim:
                continue  # fewer scalar measurements than states: nothing to invert
            assert corner_check(sys, w).passed
            for k in range(w):
                a = intermediate_state_info(sys, w, k).matrix
                assert rel_err(a, block_inverse_info(sys, w, k)) <= 1e-7


def test_boundary_states_reduce_to_gramians():
    for sys in random_family(52, 20):
        w = sys.horizon + 1
        np.testing.assert_allclose(
            intermediate_state_info(sys, w, 0).matrix, obs_fim_direct(sys, w).matrix, rtol=1e-8, atol=1e-10
        )
        np.testing.assert_allclose(
            intermediate_state_info(sys, w, w - 1).matrix, cons_fim_direct(sys, w).matrix, rtol=1e-8, atol=1e-10
        )


def test_components_add_up(rng):
    sys = random_ltv(rng, n=2, p=2, N=4)
    parts = intermediate_components(sys, 5, 2)
    np.testing.assert_allclose(parts.total.matrix, parts.obs + parts.cons - parts.measurement, atol=1e-12)
    np.testing.assert_allclose(parts.measurement, measurement_info(sys.c[2], sys.r[2]))


def test_huge_noise_decouples_states(rng):
    n, p, N = 2, 2, 3
    sys = TimeVaryingLinearSystem(
        phi=[np.eye(n)] * N, c=[np.eye(p)] * (N + 1), q=[1e12 * np.eye(n)] * N, r=[np.eye(p)] * (N + 1)
    )
    report = corner_check(sys, N + 1)
    assert report.passed
    np.testing.assert_allclose(report.blocks["top_left"], np.eye(n), atol=1e-9)
    np.testing.assert_allclose(report.blocks["bottom_right"], np.eye(n), atol=1e-9)


def test_interior_information_exceeds_ends(fig1):
    sys = lift_lti(fig1, 20)
    totals = [intermediate_state_info(sys, 21, k).matrix[0, 0] for k in range(21)]
    assert totals[10] > totals[0] and totals[10] > totals[20]
