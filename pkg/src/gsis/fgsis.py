"""Finitely generated shift-invariant spaces: fibers, frames, duals, Riesz bases.

All sums over shift exponents alpha in Z_+^d are evaluated in closed form
through the geometric factors prod_l (1 - gamma_l(m) gamma_l(m'))^-1.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import (
    NotNormalized,
    ReconstructionResidualExceeded,
    ZeroGenerator,
    ZeroSpace,
)
from .filters import classify_filter, commutator_norm, projection_polynomials
from .linalg import max_abs, orth, subspace_distance
from .spaces import Gsis, Subspace, analyze_space
from .spectral import SpectralDecomposition
from .tolerances import DEFAULT, ToleranceConfig


def _generators(sd: SpectralDecomposition, phi) -> np.ndarray:
    phi = np.asarray(phi, dtype=float)
    if phi.ndim == 1:
        phi = phi[:, None]
    if phi.ndim != 2 or phi.shape[0] != sd.N:
        from .errors import DimensionMismatch

        raise DimensionMismatch(f"generators have shape {phi.shape}, expected ({sd.N}, r)")
    norms = np.linalg.norm(phi, axis=0)
    if phi.shape[1] == 0 or np.any(norms == 0.0):
        bad = [j + 1 for j, x in enumerate(norms) if x == 0.0]
        raise ZeroGenerator(f"generator(s) {bad} are zero" if bad else "empty generator family")
    return phi


@dataclass(frozen=True)
class FiberSet:
    sd: SpectralDecomposition
    phi: np.ndarray  # N x r
    fibers: tuple  # F(m) = P_m phi, N x r
    grams: tuple  # C(m) = F(m)^T F(m), r x r
    x_spaces: tuple  # orthonormal basis (r x k_m) of X(m) = range C(m)
    singular_values: tuple  # kept singular values of F(m), descending
    cutoff: float

    @property
    def r(self) -> int:
        return self.phi.shape[1]

    @property
    def ranks(self) -> tuple:
        return tuple(x.shape[1] for x in self.x_spaces)

    def gram_pinv(self, m: int) -> np.ndarray:
        """C(m)^+ from the SVD of F(m), with the same rank decision as X(m)."""
        v = self.x_spaces[m]
        s = self.singular_values[m]
        return (v / s ** 2) @ v.T if s.size else np.zeros((self.r, self.r))


def fibers(sd: SpectralDecomposition, phi, tol: ToleranceConfig = DEFAULT) -> FiberSet:
    phi = _generators(sd, phi)
    cutoff = tol.rank * float(np.linalg.norm(phi, 2))
    fs, cs, xs, svs = [], [], [], []
    for p in sd.projections:
        f = p @ phi
        _, s, vt = np.linalg.svd(f, full_matrices=False)
        k = int(np.sum(s > cutoff))
        fs.append(f)
        cs.append(f.T @ f)
        xs.append(vt[:k].T.copy())
        svs.append(s[:k].copy())
    return FiberSet(sd, phi, tuple(fs), tuple(cs), tuple(xs), tuple(svs), cutoff)


def _krylov_basis(T: np.ndarray, phi: np.ndarray, steps: int, rel: float) -> np.ndarray:
    """Orthonormal basis of span{T^k phi_j : 0 <= k < steps} by block Arnoldi."""
    scale = max(1.0, float(np.linalg.norm(T, 2)))
    basis = np.zeros((T.shape[0], 0))
    block = phi / np.linalg.norm(phi, axis=0)
    for _ in range(steps):
        new = []
        for v in block.T:
            w = v.copy()
            for _ in range(2):  # reorthogonalize twice
                w = w - basis @ (basis.T @ w)
                for q in new:
                    w = w - q * (q @ w)
            nrm = np.linalg.norm(w)
            if nrm > rel * scale:
                new.append(w / nrm)
        if not new:
            break
        q = np.array(new).T
        basis = np.hstack([basis, q])
        block = T @ q
    return basis


def generate_space(
    sd: SpectralDecomposition, phi, seed: int = 0, tol: ToleranceConfig = DEFAULT
):
    """S(phi): span of T^k phi_j for k < M with T = sum_l a_l S_l.

    Returns ``(gsis, fiber_distance)`` where the distance compares the Krylov
    span with the span of all fiber columns.
    """
    phi = _generators(sd, phi)
    pp = projection_polynomials(sd, seed, tol)
    T = sd.shifts.combination(pp.a)
    kb = _krylov_basis(T, phi, sd.M, 1e-10)
    fs = fibers(sd, phi, tol)
    fiber_cols = np.hstack([orth(f, tol.rank, scale=fs.cutoff / tol.rank) for f in fs.fibers])
    dist = subspace_distance(orth(kb, tol.rank, scale=1.0), orth(fiber_cols, tol.rank, scale=1.0))
    return analyze_space(sd, Subspace(orth(kb, tol.rank, scale=1.0)), tol), dist


def length_and_minimal_generators(u: Gsis, seed: int = 0, tol: ToleranceConfig = DEFAULT):
    """Length L = max dim_fn and L generators phi_j = sum_m e_{m,j} spanning U."""
    L = max(u.dim_fn) if u.dim_fn else 0
    if L == 0:
        warnings.warn("zero space: length 0, empty generator family", ZeroSpace, stacklevel=2)
        return 0, np.zeros((u.sd.N, 0))
    phi = np.zeros((u.sd.N, L))
    for r in u.range_fn:
        phi[:, : r.shape[1]] += r
    return L, phi


def verify_generators(u: Gsis, phi, seed: int = 0, tol: ToleranceConfig = DEFAULT) -> float:
    """Distance between S(phi) and U."""
    g, _ = generate_space(u.sd, phi, seed, tol)
    return g.space.distance(u.space)


# ---------------------------------------------------------------- frames


def require_normalized(sd: SpectralDecomposition):
    g = np.abs(sd.frequencies)
    if np.any(g >= 1.0):
        m, l = np.unravel_index(int(np.argmax(g)), g.shape)
        raise NotNormalized(
            f"|gamma_{l + 1}({m + 1})| = {g[m, l]:.6g} >= 1; scale the shifts below 1",
            frequency=int(m) + 1,
        )


def a_matrix(sd: SpectralDecomposition, horizon: Optional[int] = None) -> np.ndarray:
    """A[m, m'] = prod_l sum_{k < horizon} (gamma_l(m) gamma_l(m'))^k.

    ``horizon=None`` is the infinite sum prod_l (1 - gamma_l(m) gamma_l(m'))^-1.
    """
    g = sd.frequencies
    prod = g[:, None, :] * g[None, :, :]  # M x M x d
    if horizon is None:
        require_normalized(sd)
        return np.prod(1.0 / (1.0 - prod), axis=2)
    k = np.arange(int(horizon))
    return np.prod(np.sum(prod[..., None] ** k, axis=-1), axis=2)


def fiber_coefficients(fs: FiberSet, x) -> np.ndarray:
    """c[j, m] = <x_hat(m), phi_hat_j(m)>."""
    x = np.asarray(x, dtype=float)
    return np.array([f.T @ (p @ x) for f, p in zip(fs.fibers, fs.sd.projections)]).T


def frame_sum(fs: FiberSet, x, horizon: Optional[int] = None) -> float:
    """sum_j sum_alpha <x, S^alpha phi_j>^2 in closed form."""
    a = a_matrix(fs.sd, horizon)
    c = fiber_coefficients(fs, x)
    return float(np.einsum("jm,mk,jk->", c, a, c))


@dataclass(frozen=True)
class FrameBounds:
    a_matrix: np.ndarray
    lower: float
    upper: float


def frame_bounds(
    sd: SpectralDecomposition, phi, horizon: Optional[int] = None, tol: ToleranceConfig = DEFAULT
) -> FrameBounds:
    """Frame bounds on S(phi): extreme singular values of A times extreme fiber energies."""
    fs = phi if isinstance(phi, FiberSet) else fibers(sd, phi, tol)
    a = a_matrix(sd, horizon)
    sa = np.linalg.svd(a, compute_uv=False)
    kept = [s for s in fs.singular_values if s.size]
    lo = float(sa[-1]) * min(float(s[-1]) ** 2 for s in kept)
    hi = float(sa[0]) * max(float(s[0]) ** 2 for s in kept)
    return FrameBounds(a, lo, hi)


def frame_operator(
    sd: SpectralDecomposition, phi, horizon: Optional[int] = None, tol: ToleranceConfig = DEFAULT
) -> np.ndarray:
    """S = sum_{m,m'} A[m,m'] F(m) F(m')^T."""
    fs = phi if isinstance(phi, FiberSet) else fibers(sd, phi, tol)
    a = a_matrix(sd, horizon)
    out = np.zeros((sd.N, sd.N))
    for m, fm in enumerate(fs.fibers):
        for k, fk in enumerate(fs.fibers):
            out += a[m, k] * (fm @ fk.T)
    return out


def frame_operator_si_test(fs: FiberSet, tol: ToleranceConfig = DEFAULT) -> bool:
    """Frame operator commutes with the shifts iff C(m) C(m') = 0 for m != m'."""
    scale = max((max_abs(c) for c in fs.grams), default=0.0)
    thr = tol.check * max(scale, 1e-300) ** 2 * fs.r
    for m, cm in enumerate(fs.grams):
        for k in range(m + 1, len(fs.grams)):
            if max_abs(cm @ fs.grams[k]) > thr:
                return False
    return True


def frame_operator_commutator(sd: SpectralDecomposition, fs: FiberSet) -> float:
    return commutator_norm(sd, frame_operator(sd, fs))


# ---------------------------------------------------------------- duals


@dataclass(frozen=True)
class DualFrame:
    exists: bool
    dual: Optional[np.ndarray]  # N x r dual generators
    sum_of_dims: int
    dim_of_sum: int
    b_residual: float = 0.0  # worst violation of B(m)B(m') = 0 and B(m)^2 = pi(m) B(m)
    reconstruction_residual: float = 0.0
    dual_fibers: Optional[tuple] = None

    def to_dict(self) -> dict:
        out = {
            "exists": self.exists,
            "sum_of_dims": self.sum_of_dims,
            "dim_of_sum": self.dim_of_sum,
            "b_residual": self.b_residual,
            "reconstruction_residual": self.reconstruction_residual,
        }
        if self.dual is not None:
            out["dual_generators"] = self.dual
        return out


def oblique_projections(x_spaces, r: int, tol: ToleranceConfig = DEFAULT) -> list:
    """Q_m with range X(m) and kernel containing every other X(m').

    The bases of the X(m) are completed to a basis of R^r by unit vectors in
    index order (skipping dependent ones); rows of the inverse basis matrix
    give the dual system.
    """
    cols = [x for x in x_spaces if x.shape[1]]
    w = np.hstack(cols) if cols else np.zeros((r, 0))
    for i in range(r):
        if w.shape[1] == r:
            break
        cand = np.hstack([w, np.eye(r)[:, [i]]])
        if np.linalg.matrix_rank(cand, tol=tol.rank * max(1.0, np.linalg.norm(cand, 2))) > w.shape[1]:
            w = cand
    winv = np.linalg.inv(w)
    qs, start = [], 0
    for x in x_spaces:
        k = x.shape[1]
        qs.append(w[:, start:start + k] @ winv[start:start + k, :])
        start += k
    return qs


def mixed_frame_operator(sd, fs: FiberSet, dual_fibers) -> np.ndarray:
    """R = sum_{m,m'} A[m,m'] F(m) Fdual(m')^T, so R x = sum_i sum_alpha <x, S^a dual_i> S^a phi_i."""
    a = a_matrix(sd)
    out = np.zeros((sd.N, sd.N))
    for m, fm in enumerate(fs.fibers):
        for k, gk in enumerate(dual_fibers):
            out += a[m, k] * (fm @ gk.T)
    return out


def dual_frame(
    sd: SpectralDecomposition,
    phi,
    seed: int = 0,
    checks: int = 20,
    tol: ToleranceConfig = DEFAULT,
) -> DualFrame:
    """Shift-invariant dual generators, when the sum of the X(m) is direct."""
    require_normalized(sd)
    fs = phi if isinstance(phi, FiberSet) else fibers(sd, phi, tol)
    r = fs.r
    sum_dims = sum(fs.ranks)
    stacked = [x for x in fs.x_spaces if x.shape[1]]
    dim_sum = orth(np.hstack(stacked), tol.rank, scale=1.0).shape[1] if stacked else 0
    if sum_dims != dim_sum:
        return DualFrame(False, None, sum_dims, dim_sum)
    if sum_dims > r:
        raise AssertionError("a direct sum inside R^r cannot exceed dimension r")
    qs = oblique_projections(fs.x_spaces, r, tol)
    pis = np.prod(1.0 - sd.frequencies ** 2, axis=1)
    ds = [pis[m] * fs.gram_pinv(m) @ qs[m] for m in range(sd.M)]
    dual_fibers = tuple(fs.fibers[m] @ ds[m] for m in range(sd.M))
    dual = sum(dual_fibers)

    # characterization: B(m) = C(m) D(m)
    bs = [fs.grams[m] @ ds[m] for m in range(sd.M)]
    bscale = max(1.0, max(max_abs(b) for b in bs))
    b_res = 0.0
    for m in range(sd.M):
        b_res = max(b_res, max_abs(bs[m] @ bs[m] - pis[m] * bs[m]))
        for k in range(sd.M):
            if k != m:
                b_res = max(b_res, max_abs(bs[m] @ bs[k]))
    b_res /= bscale

    # reconstruction on random elements of S(phi)
    rmat = mixed_frame_operator(sd, fs, dual_fibers)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(checks):
        x = sum(f @ rng.standard_normal(r) for f in fs.fibers)
        nx = np.linalg.norm(x)
        if nx == 0.0:
            continue
        worst = max(worst, float(np.linalg.norm(rmat @ x - x) / nx))
    if worst > tol.reconstruction:
        raise ReconstructionResidualExceeded(
            f"dual frame reconstruction residual {worst:.3e}", residual=worst
        )
    return DualFrame(True, dual, sum_dims, dim_sum, b_res, worst, dual_fibers)


def bessel_bound(sd: SpectralDecomposition, phi, tol: ToleranceConfig = DEFAULT) -> float:
    """Synthesis bound: |sum c_{alpha,j} S^alpha phi_j| <= B |c|."""
    require_normalized(sd)
    fs = phi if isinstance(phi, FiberSet) else fibers(sd, phi, tol)
    pis = np.prod(1.0 - sd.frequencies ** 2, axis=1)
    top = [float(s[0]) ** 2 if s.size else 0.0 for s in fs.singular_values]
    return float(np.sqrt(sum(t / p for t, p in zip(top, pis))))


# ---------------------------------------------------------------- Riesz


@dataclass(frozen=True)
class RieszReport:
    is_riesz: bool
    ranks: tuple
    lower: Optional[float] = None
    upper: Optional[float] = None
    gram_min: Optional[float] = None  # sqrt of extreme Gram eigenvalues
    gram_max: Optional[float] = None

    def to_dict(self) -> dict:
        return {
            "is_riesz": self.is_riesz,
            "ranks": list(self.ranks),
            "lower": self.lower,
            "upper": self.upper,
            "gram_sqrt_min": self.gram_min,
            "gram_sqrt_max": self.gram_max,
        }


def krylov_family(sd: SpectralDecomposition, phi, a) -> np.ndarray:
    """Columns T^k phi_j, k = 0..M-1 (k-major), with T = sum_l a_l S_l."""
    T = sd.shifts.combination(a)
    cols = []
    cur = np.asarray(phi, dtype=float)
    for _ in range(sd.M):
        cols.append(cur)
        cur = T @ cur
    return np.hstack(cols)


def riesz_check(
    sd: SpectralDecomposition, phi, seed: int = 0, tol: ToleranceConfig = DEFAULT
) -> RieszReport:
    """Riesz basis test for {T^k phi_j} and Vandermonde-based Riesz bounds."""
    fs = phi if isinstance(phi, FiberSet) else fibers(sd, phi, tol)
    ranks = fs.ranks
    if any(k != fs.r for k in ranks):
        return RieszReport(False, ranks)
    pp = projection_polynomials(sd, seed, tol)
    v = np.vander(pp.nodes, sd.M, increasing=True)
    sv = np.linalg.svd(v, compute_uv=False)
    r0 = min(float(s[-1]) for s in fs.singular_values)
    r1 = max(float(s[0]) for s in fs.singular_values)
    fam = krylov_family(sd, fs.phi, pp.a)
    ev = np.linalg.eigvalsh(fam.T @ fam)
    return RieszReport(
        True,
        ranks,
        float(sv[-1]) * r0,
        float(sv[0]) * r1,
        float(np.sqrt(max(ev[0], 0.0))),
        float(np.sqrt(ev[-1])),
    )


def frame_report(
    sd: SpectralDecomposition, phi, seed: int = 0, horizon=None, tol: ToleranceConfig = DEFAULT
) -> dict:
    """Everything the frame analysis offers, as one JSON-ready dictionary."""
    fs = fibers(sd, phi, tol)
    fb = frame_bounds(sd, fs, horizon, tol)
    op = frame_operator(sd, fs, horizon, tol)
    du = dual_frame(sd, fs, seed, tol=tol)
    out = {
        "A": fb.a_matrix,
        "lower_bound": fb.lower,
        "upper_bound": fb.upper,
        "operator_si": frame_operator_si_test(fs, tol),
        "operator_commutator": commutator_norm(sd, op),
        "operator_tag": classify_filter(sd, op, tol).tag,
        "dual_exists": du.exists,
        "bessel_bound": bessel_bound(sd, fs, tol),
        "fiber_ranks": list(fs.ranks),
        "dual": du.to_dict(),
    }
    return out
