"""Shift-invariant reproducing kernels on graph signal spaces.

An inner product is kept as one SPD Gram matrix per frequency block: for each
m, an orthonormal basis B_m of H_m (a subspace of W_m) and g_m = B_m^T G_m B_m.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np

from .errors import EmptyBand, NotPositiveDefinite, NotShiftInvariant, RangeEscape
from .filters import GENERAL, Filter, classify_filter
from .linalg import containment_residual, orth
from .spaces import Gsis, Subspace, analyze_space, bandlimited_space
from .spectral import SpectralDecomposition
from .tolerances import DEFAULT, ToleranceConfig


@dataclass(frozen=True)
class Sigrkhs:
    sd: SpectralDecomposition
    space: Gsis
    bases: tuple  # per m, N x k_m orthonormal basis of H_m
    grams: tuple  # per m, k_m x k_m SPD
    kernel: Filter

    @property
    def standard(self) -> bool:
        return all(np.allclose(g, np.eye(g.shape[0]), atol=0, rtol=0) for g in self.grams)

    def inner(self, x, y) -> float:
        """<x, y>_H = sum_m x_hat(m)^T G_m y_hat(m) for x, y in H."""
        total = 0.0
        for b, g in zip(self.bases, self.grams):
            if b.shape[1]:
                total += float((b.T @ x) @ g @ (b.T @ y))
        return total

    def norm(self, x) -> float:
        return float(np.sqrt(max(self.inner(x, x), 0.0)))

    def reproducing_residual(self) -> float:
        """max over basis signals x of H and vertices v of |<x, K(., v)>_H - x(v)|."""
        k = self.kernel.matrix
        worst = 0.0
        for b in self.bases:
            for x in b.T:
                vals = np.array([self.inner(x, k[:, v]) for v in range(self.sd.N)])
                worst = max(worst, float(np.max(np.abs(vals - x))))
        return worst


def _kernel_from_blocks(sd, bases, grams, tol) -> Filter:
    n = sd.N
    k = np.zeros((n, n))
    for b, g in zip(bases, grams):
        if b.shape[1]:
            k += b @ np.linalg.solve(g, b.T)
    return classify_filter(sd, (k + k.T) / 2.0, tol)


def kernel_from_gsis(u: Gsis, tol: ToleranceConfig = DEFAULT) -> Sigrkhs:
    """Kernel of a GSIS under the standard inner product: the projection onto U."""
    grams = tuple(np.eye(r.shape[1]) for r in u.range_fn)
    kern = _kernel_from_blocks(u.sd, u.range_fn, grams, tol)
    return Sigrkhs(u.sd, u, tuple(u.range_fn), grams, kern)


def subspace_kernel(sd: SpectralDecomposition, V, tol: ToleranceConfig = DEFAULT) -> Filter:
    """Reproducing kernel of any subspace under the standard inner product, classified."""
    b = V.basis if isinstance(V, Subspace) else orth(V, tol.rank)
    return classify_filter(sd, b @ b.T, tol)


def bandlimited_kernel(
    sd: SpectralDecomposition, omega: Sequence[int], tol: ToleranceConfig = DEFAULT
) -> Sigrkhs:
    omega = sorted(set(int(m) for m in omega))
    if not omega:
        warnings.warn("empty band: the kernel is zero", EmptyBand, stacklevel=2)
    u = bandlimited_space(sd, omega, tol)
    bases = tuple(sd.basis(m) if m in omega else np.zeros((sd.N, 0)) for m in range(sd.M))
    grams = tuple(np.eye(b.shape[1]) for b in bases)
    k = sum((sd.projections[m] for m in omega), np.zeros((sd.N, sd.N)))
    return Sigrkhs(sd, u, bases, grams, classify_filter(sd, k, tol))


def inner_product_assemble(
    sd: SpectralDecomposition, blocks: Mapping, tol: ToleranceConfig = DEFAULT
) -> Sigrkhs:
    """Assemble H = sum of H_m with per-block inner products.

    ``blocks`` maps a 0-based frequency index to either a positive scalar, an
    N x N operator G_m (only its action on H_m matters), or a dict with keys
    ``basis`` (columns inside W_m; default all of W_m) and ``G`` (scalar, N x N
    operator, or k x k matrix in the coordinates of ``basis``).
    """
    bases, grams = [], []
    for m in range(sd.M):
        spec = blocks.get(m)
        if spec is None:
            bases.append(np.zeros((sd.N, 0)))
            grams.append(np.zeros((0, 0)))
            continue
        if isinstance(spec, dict):
            basis = spec.get("basis")
            gspec = spec.get("G", 1.0)
        else:
            basis, gspec = None, spec
        if basis is None:
            b = sd.basis(m)
        else:
            b = orth(np.asarray(basis, dtype=float).reshape(sd.N, -1), tol.rank)
            if containment_residual(sd.basis(m), b) > tol.dist:
                raise RangeEscape(f"block {m + 1} basis is not inside W_{m + 1}")
        k = b.shape[1]
        g = np.asarray(gspec, dtype=float)
        if g.ndim == 0:
            g = float(g) * np.eye(k)
        elif g.shape == (sd.N, sd.N):
            g = b.T @ g @ b
        elif g.shape != (k, k):
            from .errors import DimensionMismatch

            raise DimensionMismatch(f"block {m + 1} Gram has shape {g.shape}")
        if np.max(np.abs(g - g.T), initial=0.0) > tol.check * max(1.0, np.max(np.abs(g), initial=0.0)):
            raise NotPositiveDefinite(f"block {m + 1} Gram matrix is not symmetric")
        g = (g + g.T) / 2.0
        if k and np.linalg.eigvalsh(g)[0] <= 0.0:
            raise NotPositiveDefinite(f"block {m + 1} Gram matrix is not positive definite")
        bases.append(b)
        grams.append(g)
    nonempty = [b for b in bases if b.shape[1]]
    space = analyze_space(
        sd, Subspace(np.hstack(nonempty) if nonempty else np.zeros((sd.N, 0))), tol
    )
    kern = _kernel_from_blocks(sd, bases, grams, tol)
    return Sigrkhs(sd, space, tuple(bases), tuple(grams), kern)


def isometry_check(h1: Sigrkhs, h2: Sigrkhs, T, tol: ToleranceConfig = DEFAULT) -> dict:
    """Block-by-block isometry test of an SI map between two SIGRKHSs."""
    sd = h1.sd
    t = np.asarray(T, dtype=float)
    f = classify_filter(sd, t, tol)
    if f.tag == GENERAL:
        raise NotShiftInvariant(
            f"operator commutator residual {f.residuals['commutator']:.3e}",
            residual=f.residuals["commutator"],
        )
    scale = max(1.0, float(np.linalg.norm(t, 2)))
    img = t @ h1.space.space.basis
    if img.size and containment_residual(h2.space.space.basis, img) > tol.dist * scale:
        raise RangeEscape("T maps H1 outside H2")
    per_m, top = [], 0.0
    for m, p in enumerate(sd.projections):
        b1, g1, b2, g2 = h1.bases[m], h1.grams[m], h2.bases[m], h2.grams[m]
        if b1.shape[1] == 0:
            per_m.append({"m": m + 1, "isometric": True, "singular_values": []})
            continue
        l1 = np.linalg.cholesky(g1)
        block = b2.T @ (p @ t @ p) @ b1  # coordinates in b2 of T applied to b1
        if b2.shape[1]:
            l2 = np.linalg.cholesky(g2)
            op = l2.T @ block @ np.linalg.inv(l1.T)
            s = np.linalg.svd(op, compute_uv=False)
            s = np.concatenate([s, np.zeros(max(0, b1.shape[1] - s.size))])
        else:
            s = np.zeros(b1.shape[1])
        iso = bool(np.all(np.abs(s - 1.0) <= 1e3 * tol.check * scale))
        top = max(top, float(s.max()) if s.size else 0.0)
        per_m.append({"m": m + 1, "isometric": iso, "singular_values": s})
    return {"isometric": all(x["isometric"] for x in per_m), "per_m": per_m, "norm": top}
