"""Projection polynomials, multipliers, filter classification and the center."""

import numpy as np
import pytest
from hypothesis import given, strategies as st

from gsis.errors import NegativeBaseFractionalPower, NotShiftInvariant, SeparationFailure
from gsis.filters import (
    GENERAL,
    POLYNOMIAL,
    SHIFT_INVARIANT,
    barycentric_weights,
    basis_invariance_check,
    center_witness,
    classify_filter,
    fractional_shift,
    projection_polynomials,
    pseudo_inverse_shift,
    random_si_filter,
    si_decompose,
    spectral_multiplier,
)
from gsis.shifts import validate_shifts
from gsis.spectral import decompose
from gsis.tolerances import ToleranceConfig

import fixtures

seeds = st.integers(0, 2**32 - 1)


def _k4():
    return fixtures.get("K4")


def test_single_frequency_polynomial_is_one():
    sd = decompose(validate_shifts([2.0 * np.eye(3)]))
    pp = projection_polynomials(sd)
    assert sd.M == 1 and np.array_equal(pp.coefficients(0), [1.0])
    assert np.array_equal(pp.matrix(0, np.eye(3)), np.eye(3))


def test_complete_graph_lagrange_polynomials():
    sd = _k4()
    pp = projection_polynomials(sd)
    # d = 1, so a = +-1; fix the sign so the nodes are {0, 4/3}
    s = float(np.sign(pp.a[0]))
    assert np.allclose(s * pp.nodes, [0.0, 4 / 3], atol=1e-13)
    assert np.allclose(pp.coefficients(0) * [s, 1], [-0.75, 1.0], atol=1e-13)
    assert np.allclose(pp.coefficients(1) * [s, 1], [0.75, 0.0], atol=1e-13)
    T = sd.shifts.combination(pp.a)
    assert np.allclose(pp.matrix(0, T), np.full((4, 4), 0.25), atol=1e-13)


@pytest.mark.parametrize("name", fixtures.fixture_names())
def test_polynomials_reproduce_projections(name):
    sd = fixtures.get(name)
    pp = projection_polynomials(sd, seed=3)
    assert abs(np.linalg.norm(pp.a) - 1.0) <= 1e-15
    assert len(set(np.round(pp.nodes, 12))) == sd.M
    T = sd.shifts.combination(pp.a)
    for m in range(sd.M):
        assert np.max(np.abs(pp.matrix(m, T) - sd.projections[m])) <= 1e-7
        vals = pp.evaluate(m, pp.nodes)
        assert np.array_equal(vals, (np.arange(sd.M) == m).astype(float))


def test_barycentric_matches_coefficients():
    pp = projection_polynomials(fixtures.get("C(9,{1, 3})"))
    t = np.linspace(-0.3, 2.2, 7)
    for m in range(pp.M):
        assert np.allclose(pp.evaluate(m, t), np.polyval(pp.coefficients(m), t), atol=1e-8)


def test_weights_of_two_nodes():
    assert np.allclose(barycentric_weights([0.0, 2.0]), [-0.5, 0.5])


def test_separation_failure():
    sd = fixtures.get("C(8,{1, 2})")
    with pytest.raises(SeparationFailure):
        projection_polynomials(sd, tol=ToleranceConfig(separation=1e3))


def test_multiplier_identities():
    sd = fixtures.get("C(8,{1, 2})")
    one = spectral_multiplier(sd, lambda m: 1.0)
    assert np.max(np.abs(one.matrix - np.eye(sd.N))) <= 1e-12
    for l in range(sd.d):
        h = spectral_multiplier(sd, sd.frequencies[:, l]).matrix
        assert np.max(np.abs(h - sd.shifts.shifts[l])) <= 1e-10
    k4 = _k4()
    assert np.allclose(spectral_multiplier(k4, [1, 0]).matrix, 0.25, atol=1e-14)
    with pytest.raises(ValueError):
        spectral_multiplier(k4, [1.0])


@given(seeds)
def test_polynomial_filters_commute(seed):
    rng = np.random.default_rng(seed)
    sd = fixtures.get(fixtures.fixture_names()[seed % len(fixtures.fixture_names())])
    f = spectral_multiplier(sd, rng.standard_normal(sd.M)).matrix
    g = spectral_multiplier(sd, rng.standard_normal(sd.M)).matrix
    assert np.max(np.abs(f @ g - g @ f)) <= 1e-10 * max(1.0, np.abs(f).max() * np.abs(g).max())


def test_fractional_and_pseudo_inverse():
    sd = fixtures.get("C(5,{1})")
    half = fractional_shift(sd, 0, 0.5).matrix
    assert np.max(np.abs(half @ half - sd.shifts.shifts[0])) <= 1e-12
    s = sd.shifts.shifts[0]
    pinv = pseudo_inverse_shift(sd, 0).matrix
    assert np.max(np.abs(pinv - np.linalg.pinv(s))) <= 1e-10
    sq = fractional_shift(sd, 0, 2).matrix
    assert np.max(np.abs(sq - s @ s)) <= 1e-12


def test_negative_base_fractional_power():
    sd = fixtures.get("random0")
    l = int(np.argmax(np.any(sd.frequencies < -1e-6, axis=0)))
    with pytest.raises(NegativeBaseFractionalPower):
        fractional_shift(sd, l, 0.5)


def test_classify_examples():
    sd = _k4()
    s = sd.shifts.shifts[0]
    f = classify_filter(sd, s)
    assert f.tag == POLYNOMIAL and np.allclose(f.mu, [0.0, 4 / 3], atol=1e-12)
    f = classify_filter(sd, np.eye(4))
    assert f.tag == POLYNOMIAL and np.allclose(f.mu, [1.0, 1.0])
    rng = np.random.default_rng(0)
    p2 = sd.projections[1]
    h = p2 @ rng.standard_normal((4, 4)) @ p2
    assert classify_filter(sd, h).tag == SHIFT_INVARIANT
    assert classify_filter(sd, rng.standard_normal((4, 4))).tag == GENERAL


def test_si_decompose():
    sd = _k4()
    blocks, res = si_decompose(sd, np.eye(4))
    assert res <= 1e-15 and all(np.allclose(b, p) for b, p in zip(blocks, sd.projections))
    blocks, _ = si_decompose(sd, sd.shifts.shifts[0])
    for b, p, g in zip(blocks, sd.projections, sd.frequencies[:, 0]):
        assert np.allclose(b, g * p, atol=1e-13)
    with pytest.raises(NotShiftInvariant):
        si_decompose(sd, np.random.default_rng(1).standard_normal((4, 4)))


@pytest.mark.parametrize("name", fixtures.fixture_names())
def test_random_si_filter_round_trip(name):
    sd = fixtures.get(name)
    h = random_si_filter(sd, np.random.default_rng(9))
    blocks, res = si_decompose(sd, h)
    assert res <= 1e-10
    assert classify_filter(sd, h).tag in (POLYNOMIAL, SHIFT_INVARIANT)


def test_center_witness():
    sd = _k4()
    assert center_witness(sd, sd.shifts.shifts[0]) is None
    b = sd.basis(1)
    c, s = np.cos(0.7), np.sin(0.7)
    rot = np.array([[c, -s, 0], [s, c, 0], [0, 0, 1.0]])
    h = b @ rot @ b.T
    g = center_witness(sd, h, seed=4)
    assert g is not None and np.max(np.abs(h @ g - g @ h)) > 1e-6
    assert classify_filter(sd, g).tag != GENERAL
    with pytest.raises(NotShiftInvariant):
        center_witness(sd, np.random.default_rng(2).standard_normal((4, 4)))


@pytest.mark.parametrize("seed", range(5))
def test_distinct_spectrum_center_is_everything(seed):
    sd = fixtures.get(f"random{seed}")
    assert sd.M == sd.N
    h = random_si_filter(sd, np.random.default_rng(seed))
    assert classify_filter(sd, h).tag == POLYNOMIAL
    assert center_witness(sd, h) is None


def test_basis_invariance():
    sd = _k4()
    assert basis_invariance_check(sd, np.eye(4))["max_deviation"] <= 1e-14
    rep = basis_invariance_check(sd, sd.shifts.shifts[0])
    assert rep["max_deviation"] <= 1e-9 and rep["invariant"]
    p2 = sd.projections[1]
    h = p2 @ np.random.default_rng(5).standard_normal((4, 4)) @ p2
    rep = basis_invariance_check(sd, h)
    assert rep["max_deviation"] > 1e-6 and not rep["invariant"]
