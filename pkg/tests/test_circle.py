import numpy as np
import pytest

from kdlab.circle import (
    BandLimitedOperator,
    circle_is_classical,
    circle_kd_eval,
    circle_negativity_search,
    geometric_hs_norm_sq,
    geometric_state,
    geometric_weights,
)
from kdlab.errors import NotHermitianError, PreconditionError


def _random_band_state(K, rng):
    n = 2 * K + 1
    x = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    m = x @ x.conj().T
    return BandLimitedOperator(K, m / np.trace(m).real)


def _vacuum(K):
    d = np.zeros(2 * K + 1)
    d[K] = 1.0
    return BandLimitedOperator.from_diagonal(K, d)


def _two_mode_plus(K):
    # (|0> + |1>)(<0| + <1|)/2
    c = np.zeros((2 * K + 1, 2 * K + 1))
    c[np.ix_([K, K + 1], [K, K + 1])] = 0.5
    return BandLimitedOperator(K, c)


def test_vacuum_table_is_flat():
    op = _vacuum(3)
    for theta in np.linspace(0.0, 2 * np.pi, 9):
        z = np.exp(1j * theta)
        assert circle_kd_eval(op, 0, z) == pytest.approx(1.0, abs=1e-14)
        for m in (-3, -1, 1, 2):
            assert circle_kd_eval(op, m, z) == pytest.approx(0.0, abs=1e-14)


def test_two_mode_state_table_values():
    op = _two_mode_plus(4)
    assert circle_kd_eval(op, 0, 1j) == pytest.approx(0.5 + 0.5j, abs=1e-14)
    # KD(z, 0) = (1 + z)/2 and KD(z, 1) = (1 + 1/z)/2
    for theta in np.linspace(0.1, 6.0, 7):
        z = np.exp(1j * theta)
        assert circle_kd_eval(op, 0, z) == pytest.approx((1 + z) / 2, abs=1e-13)
        assert circle_kd_eval(op, 1, z) == pytest.approx((1 + 1 / z) / 2, abs=1e-13)


def test_two_mode_state_worst_imag():
    op = _two_mode_plus(4)
    result = circle_negativity_search(op, 64)
    assert result.max_abs_imag == pytest.approx(0.5, abs=1e-12)
    assert result.imag_mode in (0, 1)
    assert abs(np.sin(result.imag_angle)) == pytest.approx(1.0, abs=1e-9)
    assert not circle_is_classical(op).is_classical


def test_diagonal_mixture_is_classical():
    K = 6
    d = np.zeros(2 * K + 1)
    d[K] = 0.3
    d[K + 5] = 0.7
    op = BandLimitedOperator.from_diagonal(K, d)
    for theta in np.linspace(0.0, 6.0, 5):
        z = np.exp(1j * theta)
        assert circle_kd_eval(op, 0, z) == pytest.approx(0.3, abs=1e-14)
        assert circle_kd_eval(op, 5, z) == pytest.approx(0.7, abs=1e-14)
        assert circle_kd_eval(op, -2, z) == pytest.approx(0.0, abs=1e-14)
    assert circle_is_classical(op).is_classical
    assert circle_negativity_search(op, 64).violation <= 1e-12


def test_diagonal_states_flat_at_any_grid():
    rng = np.random.default_rng(181)
    for K in (1, 3, 6):
        diag = np.abs(rng.normal(size=2 * K + 1))
        diag /= diag.sum()
        op = BandLimitedOperator.from_diagonal(K, diag)
        for grid in (4 * K + 4, 4 * K + 5, 128):
            assert circle_negativity_search(op, grid).violation <= 1e-12


def test_random_non_diagonal_states_violate():
    rng = np.random.default_rng(191)
    for _ in range(25):
        K = int(rng.integers(1, 6))
        op = _random_band_state(K, rng)
        off = op.coeffs - np.diag(np.diag(op.coeffs))
        assert np.max(np.abs(off)) > 1e-3
        result = circle_negativity_search(op, 1024)
        assert result.violation > 1e-6
        assert not circle_is_classical(op).is_classical


def test_classicality_agrees_with_search():
    rng = np.random.default_rng(193)
    for _ in range(20):
        K = int(rng.integers(1, 5))
        if rng.random() < 0.5:
            diag = np.abs(rng.normal(size=2 * K + 1))
            op = BandLimitedOperator.from_diagonal(K, diag / diag.sum())
        else:
            op = _random_band_state(K, rng)
        verdict = circle_is_classical(op, tol=1e-9).is_classical
        search = circle_negativity_search(op, 1024).violation <= 1e-9
        assert verdict == search


def test_grid_size_precondition():
    op = _vacuum(5)
    with pytest.raises(PreconditionError):
        circle_negativity_search(op, 4 * 5 + 3)
    circle_negativity_search(op, 4 * 5 + 4)


def test_eval_preconditions():
    op = _vacuum(2)
    with pytest.raises(PreconditionError):
        circle_kd_eval(op, 3, 1.0)
    with pytest.raises(PreconditionError):
        circle_kd_eval(op, 0, 1.1)
    with pytest.raises(PreconditionError):
        BandLimitedOperator.from_diagonal(2, np.ones(4))
    with pytest.raises(PreconditionError):
        op.coefficient(3, 0)


def test_classicality_requires_hermitian():
    c = np.zeros((3, 3))
    c[0, 2] = 1.0
    with pytest.raises(NotHermitianError):
        circle_is_classical(BandLimitedOperator(1, c))


def test_hs_norm_dual_route():
    # Frobenius norm of the coefficients equals the phase-space L2 norm
    rng = np.random.default_rng(197)
    K = 4
    op = _random_band_state(K, rng)
    grid = 512
    angles = 2 * np.pi * np.arange(grid) / grid
    total = 0.0
    for m in range(-K, K + 1):
        values = np.array([circle_kd_eval(op, m, np.exp(1j * t)) for t in angles])
        total += np.mean(np.abs(values) ** 2)
    assert np.sqrt(total) == pytest.approx(op.hs_norm(), abs=1e-12)


def test_operator_accessors():
    op = _two_mode_plus(2)
    assert op.coefficient(0, 1) == pytest.approx(0.5)
    assert op.coefficient(-2, 2) == 0.0
    assert op.trace() == pytest.approx(1.0)
    assert op.is_hermitian()
    assert op.adjoint().coeffs == pytest.approx(op.coeffs.conj().T)
    assert op.hs_norm() == pytest.approx(1.0)


def test_geometric_state_is_classical():
    state = geometric_state(0.3, 12)
    assert circle_is_classical(state).is_classical
    assert state.trace() == pytest.approx(1.0, abs=1e-12)
    assert circle_negativity_search(state, 64).violation <= 1e-12


def test_geometric_norm_routes_agree():
    for decay, K in ((0.5, 8), (0.1, 30), (1.0, 3)):
        assert geometric_state(decay, K).hs_norm() ** 2 == pytest.approx(
            geometric_hs_norm_sq(decay, K), abs=1e-14
        )


def test_geometric_norm_limit():
    # the truncated states approach the closed-form squared norm, which
    # goes to zero as the decay flattens
    a = 0.01
    expected = (1 - np.exp(-a)) / (1 + np.exp(-a))
    assert geometric_hs_norm_sq(a, 2000) == pytest.approx(expected, abs=1e-4)
    assert expected < 0.006


def test_geometric_weights_preconditions():
    with pytest.raises(PreconditionError):
        geometric_weights(0.0, 5)
    with pytest.raises(PreconditionError):
        geometric_weights(-1.0, 5)


def test_band_limited_json_roundtrip():
    rng = np.random.default_rng(199)
    op = _random_band_state(3, rng)
    back = BandLimitedOperator.from_json(op.to_json())
    assert back.K == 3
    assert np.max(np.abs(back.coeffs - op.coeffs)) == 0.0


def test_search_report_locations():
    op = _two_mode_plus(1)
    blob = circle_negativity_search(op, 64).to_json()
    z = blob["imag_location"]["z"]
    assert z["re"] ** 2 + z["im"] ** 2 == pytest.approx(1.0, abs=1e-12)
    assert blob["violation"] == pytest.approx(0.5, abs=1e-9)
    assert blob["grid_size"] == 64
