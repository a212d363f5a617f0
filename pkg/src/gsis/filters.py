"""Polynomial and shift-invariant filters on a spectral decomposition."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .errors import (
    NegativeBaseFractionalPower,
    NotShiftInvariant,
    SeparationFailure,
    WitnessSearchExhausted,
)
from .linalg import max_abs, random_orthogonal
from .shifts import random_unit_vector
from .spectral import SpectralDecomposition
from .tolerances import DEFAULT, ToleranceConfig

POLYNOMIAL = "polynomial"
SHIFT_INVARIANT = "shift_invariant"
GENERAL = "general"


@dataclass(frozen=True)
class Filter:
    matrix: np.ndarray
    tag: str
    mu: Optional[tuple] = None
    residuals: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "tag": self.tag,
            "mu": list(self.mu) if self.mu is not None else None,
            "residuals": dict(self.residuals),
        }


# ---------------------------------------------------------------- interpolation


def barycentric_weights(nodes) -> np.ndarray:
    nodes = np.asarray(nodes, dtype=float)
    w = np.ones(len(nodes))
    for m in range(len(nodes)):
        for k in range(len(nodes)):
            if k != m:
                w[m] /= nodes[m] - nodes[k]
    return w


def interpolation_condition(nodes) -> float:
    """Largest |p_m'(mu_n)| over the Lagrange basis, times the node spread.

    This is how strongly p_m(T) reacts to a perturbation of T.
    """
    nodes = np.asarray(nodes, dtype=float)
    if len(nodes) < 2:
        return 0.0
    w = barycentric_weights(nodes)
    diff = nodes[None, :] - nodes[:, None]  # [m, n] = mu_n - mu_m
    np.fill_diagonal(diff, np.inf)
    ratio = np.abs(w[:, None] / w[None, :] / diff)
    return float(ratio.max() * (nodes.max() - nodes.min()))


def separating_vector(sd: SpectralDecomposition, seed: int, tol: ToleranceConfig = DEFAULT):
    """Unit vector a such that the numbers a . gamma(m) are pairwise distinct.

    32 seeded directions are drawn; among those whose nodes are separated by
    more than ``tol.separation`` the best-conditioned one is returned.
    """
    rng = np.random.default_rng(seed)
    best = None
    best_gap = 0.0
    for _ in range(32):
        a = random_unit_vector(rng, sd.d)
        mu = sd.frequencies @ a
        gap = float(np.min(np.diff(np.sort(mu)))) if sd.M > 1 else math.inf
        best_gap = max(best_gap, gap)
        if gap <= tol.separation:
            continue
        score = interpolation_condition(mu)
        if best is None or score < best[0]:
            best = (score, a, mu)
        if sd.d == 1 or sd.M == 1:
            break
    if best is None:
        raise SeparationFailure(
            f"no separating direction found in 32 draws (best node gap {best_gap:.3e})",
            best_gap=best_gap,
        )
    return best[1], best[2]


def _leja_order(nodes: np.ndarray) -> list:
    """Leja ordering of nodes; keeps partial products in a product form bounded."""
    idx = list(range(len(nodes)))
    if not idx:
        return idx
    first = int(np.argmax(np.abs(nodes)))
    order = [first]
    rest = [i for i in idx if i != first]
    while rest:
        scores = [np.prod([abs(nodes[i] - nodes[j]) for j in order]) for i in rest]
        k = rest[int(np.argmax(scores))]
        order.append(k)
        rest.remove(k)
    return order


@dataclass(frozen=True)
class ProjectionPolynomials:
    """Lagrange polynomials p_m on nodes mu(m) with P_m = p_m(sum_l a_l S_l)."""

    a: np.ndarray
    nodes: np.ndarray
    weights: np.ndarray  # barycentric weights

    @property
    def M(self) -> int:
        return len(self.nodes)

    def coefficients(self, m: int) -> np.ndarray:
        """Monomial coefficients of p_m, highest degree first."""
        others = np.delete(self.nodes, m)
        return self.weights[m] * np.poly(others) if others.size else np.array([1.0])

    def evaluate(self, m: int, t) -> np.ndarray:
        """p_m at scalar points, via the barycentric formula."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.empty_like(t)
        for i, ti in enumerate(t):
            diff = ti - self.nodes
            hit = np.flatnonzero(diff == 0.0)
            if hit.size:
                out[i] = 1.0 if hit[0] == m else 0.0
                continue
            terms = self.weights / diff
            out[i] = terms[m] / terms.sum()
        return out

    def matrix(self, m: int, T: np.ndarray) -> np.ndarray:
        """p_m(T) for a matrix argument, as a Leja-ordered product of factors."""
        n = T.shape[0]
        others = [k for k in range(self.M) if k != m]
        out = np.eye(n)
        sub = self.nodes[others]
        for i in _leja_order(sub):
            c = sub[i]
            out = (T @ out - c * out) / (self.nodes[m] - c)
        return out


def projection_polynomials(
    sd: SpectralDecomposition, seed: int = 0, tol: ToleranceConfig = DEFAULT
) -> ProjectionPolynomials:
    a, mu = separating_vector(sd, seed, tol)
    return ProjectionPolynomials(a, mu, barycentric_weights(mu))


# ---------------------------------------------------------------- multipliers


def spectral_multiplier(sd: SpectralDecomposition, f: Union[Sequence, Callable]) -> Filter:
    """H = sum_m f(m) P_m for values given per frequency index (or a callable of m)."""
    vals = [float(f(m)) for m in range(sd.M)] if callable(f) else [float(v) for v in f]
    if len(vals) != sd.M:
        raise ValueError(f"need {sd.M} multiplier values, got {len(vals)}")
    h = sum(v * p for v, p in zip(vals, sd.projections))
    return Filter(np.asarray(h), POLYNOMIAL, tuple(vals))


def fractional_shift(sd: SpectralDecomposition, l: int, t: float) -> Filter:
    """S_l^t through its spectral values (l is 0-based)."""
    integer = float(t) == int(t)
    vals = []
    for m, x in enumerate(sd.frequencies[:, l]):
        if abs(x) <= sd.tol_group:
            x = 0.0
        if x < 0 and not integer:
            raise NegativeBaseFractionalPower(
                f"gamma_{l + 1}({m + 1}) = {x:.6g} < 0 has no real power {t}"
            )
        if x == 0.0 and t < 0:
            raise ZeroDivisionError(f"gamma_{l + 1}({m + 1}) = 0 has no negative power")
        vals.append(x ** int(t) if integer else x ** t)
    return spectral_multiplier(sd, vals)


def pseudo_inverse_shift(sd: SpectralDecomposition, l: int) -> Filter:
    g = sd.frequencies[:, l]
    return spectral_multiplier(sd, [0.0 if abs(x) <= sd.tol_group else 1.0 / x for x in g])


# ---------------------------------------------------------------- classification


def _scale(sd: SpectralDecomposition, h: np.ndarray) -> float:
    return (1.0 + max_abs(h)) * (1.0 + sd.shifts.scale) * sd.N


def commutator_norm(sd: SpectralDecomposition, h: np.ndarray) -> float:
    return max(max_abs(h @ s - s @ h) for s in sd.shifts.shifts)


def classify_filter(
    sd: SpectralDecomposition, H, tol: ToleranceConfig = DEFAULT
) -> Filter:
    """Tag H as polynomial (with its multipliers), shift-invariant, or general."""
    h = np.asarray(H, dtype=float)
    if h.shape != (sd.N, sd.N):
        from .errors import DimensionMismatch

        raise DimensionMismatch(f"filter has shape {h.shape}, expected ({sd.N}, {sd.N})")
    thr = tol.check * _scale(sd, h)
    mu = []
    poly_res = 0.0
    for p, k in zip(sd.projections, sd.multiplicities):
        ph = p @ h
        hp = h @ p
        mu_m = float(np.trace(ph @ p)) / k
        mu.append(mu_m)
        poly_res = max(poly_res, max_abs(ph - mu_m * p), max_abs(hp - mu_m * p))
    comm = commutator_norm(sd, h)
    residuals = {"polynomial": poly_res, "commutator": comm, "threshold": thr}
    if poly_res <= thr:
        return Filter(h, POLYNOMIAL, tuple(mu), residuals)
    if comm <= thr:
        return Filter(h, SHIFT_INVARIANT, None, residuals)
    return Filter(h, GENERAL, None, residuals)


def is_shift_invariant(sd, H, tol: ToleranceConfig = DEFAULT) -> bool:
    return classify_filter(sd, H, tol).tag != GENERAL


def si_decompose(sd: SpectralDecomposition, H, tol: ToleranceConfig = DEFAULT):
    """Blocks P_m H P_m of a shift-invariant H and the reassembly residual."""
    f = classify_filter(sd, H, tol)
    if f.tag == GENERAL:
        raise NotShiftInvariant(
            f"filter does not commute with the shifts (residual {f.residuals['commutator']:.3e})",
            residual=f.residuals["commutator"],
        )
    h = f.matrix
    blocks = [p @ h @ p for p in sd.projections]
    residual = max_abs(h - sum(blocks))
    return blocks, residual


def random_si_filter(sd: SpectralDecomposition, rng: np.random.Generator) -> np.ndarray:
    """sum_m B_m G_m B_m^T with B_m an orthonormal basis of W_m and Gaussian k_m x k_m G_m.

    Same law as sum_m P_m G P_m for an N x N Gaussian G, at the cost of one product.
    """
    bases = [sd.basis(m) for m in range(sd.M)]
    u = np.hstack(bases)
    core = np.zeros((sd.N, sd.N))
    start = 0
    for b in bases:
        k = b.shape[1]
        core[start:start + k, start:start + k] = rng.standard_normal((k, k))
        start += k
    return u @ core @ u.T


def center_witness(
    sd: SpectralDecomposition, H, seed: int = 0, tol: ToleranceConfig = DEFAULT
) -> Optional[np.ndarray]:
    """None if H is polynomial, else an SI filter that fails to commute with H."""
    f = classify_filter(sd, H, tol)
    if f.tag == GENERAL:
        raise NotShiftInvariant("center_witness needs a shift-invariant filter")
    if f.tag == POLYNOMIAL:
        return None
    h = f.matrix
    thr = tol.check * _scale(sd, h)
    best = 0.0
    for k in range(16):
        g = random_si_filter(sd, np.random.default_rng([seed, k]))
        r = max_abs(h @ g - g @ h)
        if r > thr:
            return g
        best = max(best, r)
    raise WitnessSearchExhausted(
        f"16 random shift-invariant filters all commute with H (best residual {best:.3e})",
        best_residual=best,
    )


def basis_invariance_check(
    sd: SpectralDecomposition, H, trials: int = 8, seed: int = 0, tol: ToleranceConfig = DEFAULT
) -> dict:
    """Max change of U^T H U across randomly re-chosen joint eigenbases."""
    h = np.asarray(H, dtype=float)
    rng = np.random.default_rng(seed)
    bases = [sd.basis(m) for m in range(sd.M)]
    ref = np.hstack(bases)
    ref_h = ref.T @ h @ ref
    dev = 0.0
    for _ in range(trials):
        cols = []
        for b in bases:
            q = random_orthogonal(rng, b.shape[1])
            signs = rng.choice([-1.0, 1.0], size=b.shape[1])
            cols.append((b @ q) * signs)
        u = np.hstack(cols)
        dev = max(dev, max_abs(u.T @ h @ u - ref_h))
    thr = tol.check * _scale(sd, h)
    return {"max_deviation": dev, "trials": trials, "invariant": dev <= thr, "threshold": thr}
