"""Fibers, generated spaces, frame bounds and operators, duals, Bessel and Riesz bounds."""

import functools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from gsis.errors import NotNormalized, ZeroGenerator, ZeroSpace
from gsis.fgsis import (
    a_matrix,
    bessel_bound,
    dual_frame,
    fibers,
    frame_bounds,
    frame_operator,
    frame_operator_commutator,
    frame_operator_si_test,
    frame_report,
    frame_sum,
    generate_space,
    length_and_minimal_generators,
    riesz_check,
    verify_generators,
)
from gsis.filters import commutator_norm, projection_polynomials
from gsis.shifts import validate_shifts
from gsis.spaces import analyze_space
from gsis.special import CirculantSpec, circulant_shifts
from gsis.spectral import decompose

import fixtures
import oracles

seeds = st.integers(0, 2**32 - 1)


def _k4s():
    """K4 with its shifts scaled by 0.7: gamma = {0, 14/15}."""
    return fixtures.get("K4").scaled(0.7)


@functools.lru_cache(maxsize=None)
def _toy_single():
    """d = 1, M = 1, gamma = 0 (the zero shift on R^3)."""
    return decompose(validate_shifts([np.zeros((3, 3))]))


@functools.lru_cache(maxsize=None)
def _toy_three():
    """d = 1, M = 3 on R^3 with gamma = (-0.5, 0.2, 0.6)."""
    q = np.linalg.qr(np.random.default_rng(12).standard_normal((3, 3)))[0]
    s = (q * np.array([-0.5, 0.2, 0.6])) @ q.T
    return decompose(validate_shifts([(s + s.T) / 2]))


@functools.lru_cache(maxsize=None)
def _c8():
    return decompose(circulant_shifts(CirculantSpec(8, (1,))))


# ---------------------------------------------------------------- fibers and generation


def test_fibers_of_constant_on_complete_graph():
    fs = fibers(fixtures.get("K4"), np.ones(4))
    assert np.allclose(fs.fibers[0][:, 0], 1.0, atol=1e-14)
    assert np.max(np.abs(fs.fibers[1])) <= 1e-14
    assert fs.ranks == (1, 0)


def test_identity_generators_count_multiplicities():
    sd = fixtures.get("C(12,{3, 4})")
    assert fibers(sd, np.eye(sd.N)).ranks == sd.multiplicities


@given(seeds)
def test_fiber_ranks_agree_with_independent_rank(seed):
    sd = _c8()
    phi = np.random.default_rng(seed).standard_normal((sd.N, 2))
    fs = fibers(sd, phi)
    for m, p in enumerate(sd.projections):
        assert fs.ranks[m] == np.linalg.matrix_rank(p @ phi, tol=1e-9 * np.linalg.norm(phi, 2))


def test_zero_generator_rejected():
    with pytest.raises(ZeroGenerator):
        fibers(fixtures.get("K4"), np.zeros((4, 2)))
    with pytest.raises(ZeroGenerator):
        fibers(fixtures.get("K4"), np.zeros((4, 0)))


def test_generated_space_examples():
    sd = fixtures.get("K4")
    u, dist = generate_space(sd, np.ones(4))
    assert u.dim == 1 and u.spectrum == (0,) and dist <= 1e-8
    u, _ = generate_space(sd, np.random.default_rng(0).standard_normal((4, 4)))
    assert u.dim == 4


@pytest.mark.parametrize("seed", range(5))
def test_principal_generator_on_distinct_spectrum(seed):
    sd = fixtures.get(f"random{seed}")
    phi = np.random.default_rng(seed).standard_normal(sd.N)
    u, dist = generate_space(sd, phi)
    # direct span of S_1^k phi
    s = sd.shifts.shifts[0]
    cols = [phi]
    for _ in range(sd.N - 1):
        cols.append(s @ cols[-1])
    direct = np.linalg.matrix_rank(np.array(cols).T / np.linalg.norm(np.array(cols), axis=1))
    assert u.dim == sd.N == direct and dist <= 1e-8


@given(seeds)
def test_fiber_rank_is_dimension_function(seed):
    rng = np.random.default_rng(seed)
    sd = fixtures.get(("K10", "C(9,{1, 3})", "C(12,{3, 4})", "random6")[seed % 4])
    phi = rng.standard_normal((sd.N, int(rng.integers(1, 4))))
    if seed % 2:
        # confine the generators to a few frequencies
        keep = [m for m in range(sd.M) if rng.random() < 0.5] or [0]
        phi = sum(sd.projections[m] for m in keep) @ phi
        phi = phi[:, np.linalg.norm(phi, axis=0) > 1e-12]
        if phi.shape[1] == 0:
            return
    u, dist = generate_space(sd, phi)
    assert dist <= 1e-8
    assert u.dim_fn == fibers(sd, phi).ranks


def test_length_examples():
    sd = fixtures.get("K4")
    L, phi = length_and_minimal_generators(analyze_space(sd, np.eye(4)))
    assert L == 3 and phi.shape == (4, 3)
    w = analyze_space(sd, sd.basis(1))
    L, phi = length_and_minimal_generators(w)
    assert L == 3 and verify_generators(w, phi) <= 1e-8
    sd = fixtures.get("random1")
    whole = analyze_space(sd, np.eye(sd.N))
    L, phi = length_and_minimal_generators(whole)
    assert L == 1 and verify_generators(whole, phi) <= 1e-8


@given(seeds)
def test_minimal_generators_regenerate(seed):
    sd = fixtures.get(("K10", "C(8,{1, 2})", "C(12,{3, 4})")[seed % 3])
    u = analyze_space(sd, np.hstack(fixtures.random_gsis_ranges(sd, np.random.default_rng(seed))))
    L, phi = length_and_minimal_generators(u)
    assert L == max(u.dim_fn)
    assert verify_generators(u, phi) <= 1e-8


def test_zero_space_warns():
    sd = fixtures.get("K4")
    u = analyze_space(sd, np.zeros((4, 0)))
    with pytest.warns(ZeroSpace):
        L, phi = length_and_minimal_generators(u)
    assert L == 0 and phi.shape == (4, 0)


# ---------------------------------------------------------------- frames


def test_orthonormal_singleton_toy():
    sd = _toy_single()
    e1 = np.eye(3)[:, 0]
    fb = frame_bounds(sd, e1)
    assert np.array_equal(fb.a_matrix, [[1.0]]) and fb.lower == fb.upper == 1.0
    assert frame_sum(fibers(sd, e1), 2.5 * e1) == pytest.approx(6.25, rel=1e-15)
    assert np.allclose(frame_operator(sd, e1), np.outer(e1, e1), atol=1e-15)
    assert bessel_bound(sd, e1) == pytest.approx(1.0, rel=1e-15)


def test_scaled_complete_graph_a_matrix():
    sd = _k4s()
    g = 0.7 * 4 / 3
    expect = np.array([[1.0, 1.0], [1.0, 1.0 / (1.0 - g * g)]])
    assert np.allclose(a_matrix(sd), expect, rtol=1e-14)


def test_unnormalized_shifts_rejected():
    sd = fixtures.get("K4")
    for fn in (frame_bounds, frame_operator, bessel_bound, dual_frame):
        with pytest.raises(NotNormalized):
            fn(sd, np.ones(4))


@pytest.mark.parametrize("seed", range(4))
def test_frame_sandwich_against_truncated_sum(seed):
    sd = _k4s()
    rng = np.random.default_rng(seed)
    phi = rng.standard_normal((4, 1 + seed % 2))
    fs = fibers(sd, phi)
    fb = frame_bounds(sd, fs)
    for _ in range(25):
        x = sum(f @ rng.standard_normal(fs.r) for f in fs.fibers)
        nx = x @ x
        closed = frame_sum(fs, x)
        trunc = oracles.truncated_frame_sum(sd.shifts.shifts, phi, x, 600)
        assert abs(closed - trunc) <= 1e-10 * max(1.0, closed)
        assert fb.lower * nx * (1 - 1e-12) <= closed <= fb.upper * nx * (1 + 1e-12)


@pytest.mark.parametrize("name", fixtures.fixture_names())
def test_a_matrix_is_nonsingular(name):
    sd = fixtures.scaled(fixtures.get(name))
    s = np.linalg.svd(a_matrix(sd), compute_uv=False)
    assert s[-1] > 0.0


def test_frame_operator_against_truncation():
    sd = _k4s()
    phi = np.ones((4, 1)) / 2
    closed = frame_operator(sd, phi)
    trunc = oracles.truncated_frame_operator(sd.shifts.shifts, phi, 60)
    # 1 is an eigenvector with gamma = 0, so every higher power vanishes
    assert np.max(np.abs(closed - trunc)) <= 1e-8
    assert np.allclose(closed, 0.25, atol=1e-15)


@pytest.mark.parametrize("name", ["K4", "K10", "C(5,{1})", "C(8,{1, 2})", "random0", "random9"])
def test_frame_operator_truncation_tail_bound(name):
    sd = fixtures.scaled(fixtures.get(name))
    phi = np.random.default_rng(1).standard_normal((sd.N, 2))
    closed = frame_operator(sd, phi)
    rho = float(np.max(sd.frequencies ** 2))
    upper = frame_bounds(sd, phi).upper
    K = 80 if sd.d == 1 else 40
    for horizon in (10, 25, K):
        trunc = oracles.truncated_frame_operator(sd.shifts.shifts, phi, horizon)
        assert np.max(np.abs(closed - trunc)) <= upper * rho ** horizon / (1 - rho) + 1e-12
        # the finite closed form is the same truncation
        assert np.max(np.abs(frame_operator(sd, phi, horizon + 1) - trunc)) <= 1e-10 * max(1.0, upper)
    assert np.array_equal(closed, closed.T) or np.max(np.abs(closed - closed.T)) <= 1e-14


def test_operator_si_examples():
    sd = _k4s()
    x = np.array([1.0, -2.0, 0.5, 3.0])
    assert frame_operator_si_test(fibers(sd, np.ones(4)))
    phi = np.column_stack([np.ones(4), x - x.mean()])
    assert frame_operator_si_test(fibers(sd, phi))
    generic = np.random.default_rng(3).standard_normal((4, 2))
    fs = fibers(sd, generic)
    assert not frame_operator_si_test(fs)
    assert frame_operator_commutator(sd, fs) > 1e-6


@given(seeds)
def test_operator_si_matches_commutator(seed):
    rng = np.random.default_rng(seed)
    name = fixtures.fixture_names()[seed % len(fixtures.fixture_names())]
    sd = fixtures.scaled(fixtures.get(name))
    r = int(rng.integers(1, 4))
    phi = rng.standard_normal((sd.N, r))
    if seed % 3 == 0:
        # one frequency per generator makes the fibers orthogonal across m
        ms = rng.integers(0, sd.M, size=r)
        phi = np.column_stack([sd.projections[m] @ phi[:, j] for j, m in enumerate(ms)])
        phi = phi[:, np.linalg.norm(phi, axis=0) > 1e-12]
        if phi.shape[1] == 0:
            return
    fs = fibers(sd, phi)
    op = frame_operator(sd, fs)
    direct = commutator_norm(sd, op) <= 1e-9 * max(1.0, np.abs(op).max()) * sd.N
    assert frame_operator_si_test(fs) == direct


# ---------------------------------------------------------------- duals


def test_dual_examples_on_complete_graph():
    sd = _k4s()
    d = dual_frame(sd, np.ones(4))
    assert d.exists and d.reconstruction_residual <= 1e-8
    phi = np.column_stack([np.ones(4), np.random.default_rng(0).standard_normal((4, 2))])
    d = dual_frame(sd, phi)
    assert d.exists and d.reconstruction_residual <= 1e-8
    x = np.array([1.0, 2.0, 0.0, 0.5])
    d = dual_frame(sd, x)
    assert not d.exists and d.dual is None
    assert generate_space(sd, x)[0].dim == 2 > 1


@given(seeds)
def test_dual_reconstruction_against_truncated_sum(seed):
    rng = np.random.default_rng(seed)
    sd = fixtures.scaled(fixtures.get(("K4", "K10", "C(5,{1})", "C(9,{1, 3})")[seed % 4]))
    # generators with an X(m)-direct structure: one frequency per generator
    r = int(rng.integers(1, 4))
    ms = rng.integers(0, sd.M, size=r)
    phi = np.column_stack([sd.projections[m] @ rng.standard_normal(sd.N) for m in ms])
    d = dual_frame(sd, phi)
    assert d.exists
    assert generate_space(sd, phi)[0].dim <= r
    x = sum(sd.projections[m] @ phi @ rng.standard_normal(r) for m in range(sd.M))
    horizon = int(math.ceil(math.log(1e-15) / math.log(float(np.max(sd.frequencies ** 2)))))
    y = oracles.truncated_mixed_apply(sd.shifts.shifts, phi, d.dual, x, min(horizon, 2000))
    assert np.linalg.norm(y - x) <= 1e-8 * max(1.0, np.linalg.norm(x))


@given(seeds)
def test_existence_implies_small_space(seed):
    rng = np.random.default_rng(seed)
    sd = fixtures.scaled(fixtures.get(fixtures.fixture_names()[seed % len(fixtures.fixture_names())]))
    phi = rng.standard_normal((sd.N, int(rng.integers(1, 4))))
    d = dual_frame(sd, phi)
    if d.exists:
        assert generate_space(sd, phi)[0].dim <= phi.shape[1]
        assert d.reconstruction_residual <= 1e-8


# ---------------------------------------------------------------- Bessel and Riesz


def test_bessel_against_truncated_synthesis():
    sd = _k4s()
    phi = np.random.default_rng(4).standard_normal((4, 1))
    bound = bessel_bound(sd, phi)
    rng = np.random.default_rng(0)
    orbit = np.column_stack(list(oracles.shift_orbit(sd.shifts.shifts, phi, 150)))
    for _ in range(50):
        c = rng.standard_normal(orbit.shape[1])
        assert np.linalg.norm(orbit @ c) <= bound * np.linalg.norm(c) * (1 + 1e-12)


def test_bessel_constant_on_scaled_complete_graph():
    sd = _k4s()
    assert bessel_bound(sd, np.ones(4) / 2) == pytest.approx(1.0, rel=1e-14)


def test_bessel_shrinks_when_shifts_shrink():
    sd = fixtures.scaled(fixtures.get("C(8,{1, 2})"))
    phi = np.random.default_rng(2).standard_normal((sd.N, 2))
    assert bessel_bound(sd.scaled(0.5), phi) < bessel_bound(sd, phi)


def test_riesz_examples():
    sd = fixtures.get("K4")
    x = np.array([1.0, 2.0, 0.0, 0.5])
    rep = riesz_check(sd, x)
    assert rep.is_riesz and rep.ranks == (1, 1)
    assert rep.lower <= rep.gram_min * (1 + 1e-12) and rep.gram_max <= rep.upper * (1 + 1e-12)
    rep = riesz_check(sd, np.ones(4))
    assert not rep.is_riesz and rep.ranks == (1, 0) and rep.lower is None


@given(seeds)
def test_riesz_bounds_on_three_frequency_toy(seed):
    sd = _toy_three()
    phi = np.random.default_rng(seed).standard_normal(3)
    rep = riesz_check(sd, phi, seed=seed % 7)
    if not rep.is_riesz:
        return
    T = sd.shifts.combination(projection_polynomials(sd, seed % 7).a)
    fam = np.column_stack([np.linalg.matrix_power(T, k) @ phi for k in range(sd.M)])
    lo, hi = oracles.gram_singular_range(fam)
    assert rep.lower <= lo * (1 + 1e-9) and hi <= rep.upper * (1 + 1e-9)


def test_frame_report_fields():
    rep = frame_report(_k4s(), np.ones(4))
    assert rep["dual_exists"] and rep["operator_si"]
    assert rep["fiber_ranks"] == [1, 0]
    g2 = (0.7 * 4 / 3) ** 2
    sv = np.linalg.svd([[1.0, 1.0], [1.0, 1.0 / (1.0 - g2)]], compute_uv=False)
    # the only kept fiber is 1 itself, with squared norm 4
    assert rep["lower_bound"] == pytest.approx(4 * sv[-1], rel=1e-12)
    assert rep["upper_bound"] == pytest.approx(4 * sv[0], rel=1e-12)
    # on span{1} the frame sum is <x, 1>^2 = 4 |x|^2
    assert rep["lower_bound"] <= 4.0 <= rep["upper_bound"]
