"""Shift-invariant signal subspaces: range/dimension functions and operations."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import (
    DecompositionMismatch,
    NotNormalized,
    NotShiftInvariant,
    RangeEscape,
)
from .filters import (
    GENERAL,
    Filter,
    classify_filter,
    random_si_filter,
    separating_vector,
    spectral_multiplier,
)
from .linalg import containment_residual, max_abs, null_space, orth, subspace_distance
from .spectral import SpectralDecomposition
from .tolerances import DEFAULT, ToleranceConfig


@dataclass(frozen=True)
class Subspace:
    basis: np.ndarray  # N x k, orthonormal columns

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @property
    def n(self) -> int:
        return self.basis.shape[0]

    @classmethod
    def span(cls, vectors, tol: ToleranceConfig = DEFAULT) -> "Subspace":
        return cls(orth(vectors, tol.rank))

    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.T

    def distance(self, other: "Subspace") -> float:
        return subspace_distance(self.basis, other.basis)

    def contains(self, vectors, tol: ToleranceConfig = DEFAULT) -> bool:
        v = np.asarray(vectors, dtype=float)
        if v.ndim == 1:
            v = v[:, None]
        scale = max(1.0, float(np.max(np.linalg.norm(v, axis=0)))) if v.size else 1.0
        return containment_residual(self.basis, v) <= tol.dist * scale


@dataclass(frozen=True)
class Gsis:
    sd: SpectralDecomposition
    space: Subspace
    range_fn: tuple  # per m, orthonormal basis (N x k_m) of U intersected with W_m
    dim_fn: tuple
    si_residual: float

    @property
    def dim(self) -> int:
        return self.space.dim

    @property
    def spectrum(self) -> tuple:
        return tuple(m for m, k in enumerate(self.dim_fn) if k > 0)

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "dim_fn": list(self.dim_fn),
            "spectrum": [m + 1 for m in self.spectrum],
            "shift_invariant": True,
            "si_residual": self.si_residual,
        }


def shift_invariance_residual(sd: SpectralDecomposition, basis: np.ndarray):
    """(worst shift index, largest distance of S_l v from span(basis))."""
    worst = (0, 0.0)
    for l, s in enumerate(sd.shifts.shifts):
        r = containment_residual(basis, s @ basis) if basis.shape[1] else 0.0
        if r > worst[1]:
            worst = (l, r)
    return worst


def _si_threshold(sd: SpectralDecomposition, tol: ToleranceConfig) -> float:
    return tol.dist * (1.0 + sd.shifts.scale)


def analyze_space(sd: SpectralDecomposition, V, tol: ToleranceConfig = DEFAULT) -> Gsis:
    """Range and dimension functions of a subspace, which must be shift-invariant.

    ``V`` is a Subspace or a matrix whose columns span the subspace.
    """
    if not isinstance(V, Subspace):
        V = Subspace.span(np.asarray(V, dtype=float), tol)
    if V.n != sd.N:
        from .errors import DimensionMismatch

        raise DimensionMismatch(f"subspace lives in R^{V.n}, decomposition in R^{sd.N}")
    b = V.basis
    l, res = shift_invariance_residual(sd, b)
    if res > _si_threshold(sd, tol):
        raise NotShiftInvariant(
            f"shift {l + 1} moves the subspace by {res:.3e}", shift=l + 1, residual=res
        )
    ranges = tuple(orth(p @ b, tol.rank, scale=1.0) for p in sd.projections)
    dims = tuple(r.shape[1] for r in ranges)
    if sum(dims) != V.dim:
        raise NotShiftInvariant(
            f"range function dimensions sum to {sum(dims)}, subspace has dimension {V.dim}",
            residual=res,
        )
    return Gsis(sd, V, ranges, dims, res)


def is_gsis(sd: SpectralDecomposition, V, tol: ToleranceConfig = DEFAULT) -> bool:
    try:
        analyze_space(sd, V, tol)
    except NotShiftInvariant:
        return False
    return True


def from_range_function(sd: SpectralDecomposition, ranges: Sequence, tol=DEFAULT) -> Gsis:
    """GSIS assembled from per-frequency subspaces (each a basis inside W_m)."""
    cols = [np.asarray(r, dtype=float).reshape(sd.N, -1) for r in ranges]
    basis = np.hstack(cols) if cols else np.zeros((sd.N, 0))
    return analyze_space(sd, Subspace(orth(basis, tol.rank, scale=1.0)), tol)


def bandlimited_space(sd: SpectralDecomposition, omega: Sequence[int], tol=DEFAULT) -> Gsis:
    """B_Omega: the sum of the eigenspaces W_m, m in omega (0-based)."""
    return from_range_function(sd, [sd.basis(m) for m in sorted(set(omega))], tol)


def _check_same(u1: Gsis, u2: Gsis):
    if not u1.sd.same_as(u2.sd):
        raise DecompositionMismatch("spaces were analyzed against different decompositions")


def gsis_sum(u1: Gsis, u2: Gsis, tol: ToleranceConfig = DEFAULT) -> Gsis:
    _check_same(u1, u2)
    basis = orth(np.hstack([u1.space.basis, u2.space.basis]), tol.rank, scale=1.0)
    return analyze_space(u1.sd, Subspace(basis), tol)


def _intersect_bases(b1: np.ndarray, b2: np.ndarray, tol: ToleranceConfig) -> np.ndarray:
    if b1.shape[1] == 0 or b2.shape[1] == 0:
        return np.zeros((b1.shape[0], 0))
    # x = b1 c1 = b2 c2  <=>  [b1, -b2] [c1; c2] = 0
    ns = null_space(np.hstack([b1, -b2]), tol.rank, scale=1.0)
    return orth(b1 @ ns[: b1.shape[1]], tol.rank, scale=1.0)


def gsis_intersect(u1: Gsis, u2: Gsis, tol: ToleranceConfig = DEFAULT) -> Gsis:
    """Intersection, assembled frequency by frequency."""
    _check_same(u1, u2)
    ranges = [_intersect_bases(a, b, tol) for a, b in zip(u1.range_fn, u2.range_fn)]
    return from_range_function(u1.sd, ranges, tol)


def gsis_complement(u: Gsis, tol: ToleranceConfig = DEFAULT) -> Gsis:
    basis = null_space(u.space.basis.T, tol.rank, scale=1.0) if u.dim else np.eye(u.sd.N)
    return analyze_space(u.sd, Subspace(basis), tol)


def si_projection_filter(u: Gsis, tol: ToleranceConfig = DEFAULT):
    """(H, G): H the orthogonal projection onto U built per frequency, G = I - H."""
    n = u.sd.N
    h = sum((r @ r.T for r in u.range_fn), np.zeros((n, n)))
    g = np.eye(n) - h
    return classify_filter(u.sd, h, tol), classify_filter(u.sd, g, tol)


def bandlimited_test(u: Gsis) -> Optional[tuple]:
    """The band Omega (0-based) if every U cap W_m is {0} or W_m, else None."""
    omega = []
    for m, (k, mult) in enumerate(zip(u.dim_fn, u.sd.multiplicities)):
        if k == mult:
            omega.append(m)
        elif k != 0:
            return None
    return tuple(omega)


def super_si_probe(
    u: Gsis, probes: int = 200, seed: int = 0, tol: ToleranceConfig = DEFAULT
) -> bool:
    """True when U is mapped into itself by every one of ``probes`` random SI filters."""
    b = u.space.basis
    if b.shape[1] == 0:
        return True
    for k in range(probes):
        g = random_si_filter(u.sd, np.random.default_rng([seed, k]))
        scale = max(1.0, float(np.linalg.norm(g, 2)))
        if containment_residual(b, g @ b) > tol.dist * scale * 10:
            return False
    return True


def maximal_invariant_subspace(u: Gsis, tol: ToleranceConfig = DEFAULT) -> Gsis:
    """S_1 ... S_d U, the largest subspace W of U with S_l W = W for every l."""
    v = u.space.basis
    for s in u.sd.shifts.shifts:
        v = s @ v
    scale = max(1.0, u.sd.shifts.scale) ** u.sd.d
    return analyze_space(u.sd, Subspace(orth(v, tol.rank, scale=scale)), tol)


def shifted_equality_test(u: Gsis, tol: ToleranceConfig = DEFAULT) -> bool:
    """S_1 ... S_d U == U, decided from the dimension function."""
    prods = np.prod(u.sd.frequencies, axis=1)
    thr = u.sd.tol_group * max(1.0, float(np.max(np.abs(u.sd.frequencies)))) ** (u.sd.d - 1)
    return all(k == 0 for k, p in zip(u.dim_fn, prods) if abs(p) <= thr)


def shifted_equality_direct(u: Gsis, tol: ToleranceConfig = DEFAULT) -> bool:
    return maximal_invariant_subspace(u, tol).space.distance(u.space) <= tol.dist


def normalize_shifts(sd: SpectralDecomposition, margin: float = 0.01):
    """Scale every shift by (1 - margin) / max_m |gamma(m)|; returns (sd, factor)."""
    top = float(np.max(sd.norms()))
    if top == 0.0:
        return sd, 1.0
    factor = (1.0 - margin) / top
    return sd.scaled(factor), factor


@dataclass(frozen=True)
class BeurlingResult:
    a: np.ndarray
    roots: tuple  # mu(m) for m outside omega
    filter: Filter
    range_distance: float


def blaschke_values(nodes: np.ndarray, roots: Sequence[float]) -> np.ndarray:
    out = np.ones_like(nodes)
    for c in roots:
        out = out * (nodes - c) / (1.0 - c * nodes)
    return out


def beurling_factorization(
    sd: SpectralDecomposition, omega: Sequence[int], seed: int = 0, tol: ToleranceConfig = DEFAULT
) -> BeurlingResult:
    """Blaschke-product filter whose range is the bandlimited space B_omega."""
    norms = sd.norms()
    if np.any(norms >= 1.0):
        m = int(np.argmax(norms))
        raise NotNormalized(
            f"|gamma({m + 1})| = {norms[m]:.6g} >= 1; rescale the shifts first",
            frequency=m + 1,
        )
    omega = sorted(set(int(m) for m in omega))
    if any(m < 0 or m >= sd.M for m in omega):
        from .errors import BandOutOfRange

        raise BandOutOfRange(f"band {omega} outside 0..{sd.M - 1}")
    a, mu = separating_vector(sd, seed, tol)
    roots = tuple(float(mu[m]) for m in range(sd.M) if m not in omega)
    vals = blaschke_values(mu, roots)
    flt = spectral_multiplier(sd, vals)
    rng_basis = orth(flt.matrix, tol.rank, scale=1.0)
    target = bandlimited_space(sd, omega, tol).space.basis
    return BeurlingResult(a, roots, flt, subspace_distance(rng_basis, target))


def si_operator_analysis(
    sd: SpectralDecomposition, u1: Gsis, u2: Gsis, T, tol: ToleranceConfig = DEFAULT
) -> dict:
    """Surjectivity, injectivity and isometry of an SI map U1 -> U2, per frequency."""
    _check_same(u1, u2)
    t = np.asarray(T, dtype=float)
    f = classify_filter(sd, t, tol)
    if f.tag == GENERAL:
        raise NotShiftInvariant(
            f"operator commutator residual {f.residuals['commutator']:.3e}",
            residual=f.residuals["commutator"],
        )
    img = t @ u1.space.basis
    esc = containment_residual(u2.space.basis, img) if img.size else 0.0
    scale = max(1.0, float(np.linalg.norm(t, 2)))
    if esc > tol.dist * scale:
        raise RangeEscape(f"T maps U1 outside U2 (residual {esc:.3e})", residual=esc)
    sv_tol = tol.rank * scale
    per_m = []
    for m, p in enumerate(sd.projections):
        j1, j2 = u1.range_fn[m], u2.range_fn[m]
        block = j2.T @ (p @ t @ p) @ j1
        s = np.linalg.svd(block, compute_uv=False) if block.size else np.zeros(0)
        r = int(np.sum(s > sv_tol))
        per_m.append(
            {
                "m": m + 1,
                "dim_in": j1.shape[1],
                "dim_out": j2.shape[1],
                "rank": r,
                "surjective": r == j2.shape[1],
                "injective": r == j1.shape[1],
                "isometric": r == j1.shape[1] and bool(np.all(np.abs(s - 1.0) <= tol.dist * 100)),
                "singular_values": s,
            }
        )
    whole = u2.space.basis.T @ t @ u1.space.basis
    s = np.linalg.svd(whole, compute_uv=False) if whole.size else np.zeros(0)
    r = int(np.sum(s > sv_tol))
    direct = {
        "surjective": r == u2.dim,
        "injective": r == u1.dim,
        "isometric": r == u1.dim and bool(np.all(np.abs(s - 1.0) <= tol.dist * 100)),
    }
    return {
        "per_m": per_m,
        "surjective": all(x["surjective"] for x in per_m),
        "injective": all(x["injective"] for x in per_m),
        "isometric": all(x["isometric"] for x in per_m),
        "direct": direct,
    }
