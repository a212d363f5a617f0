"""Dense linear algebra helpers: Jacobi eigensolver and subspace arithmetic."""

from __future__ import annotations

import math

import numpy as np

from .errors import ConvergenceFailure


def max_abs(a) -> float:
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


def _off_norm(a) -> float:
    return float(np.linalg.norm(a - np.diag(a.diagonal())))


def jacobi_eigh(a, max_sweeps: int = 100, eps: float | None = None):
    """Cyclic Jacobi eigensolver for a real symmetric matrix.

    Returns ``(w, v)`` with ``a @ v == v @ diag(w)``; columns of ``v`` are
    sorted by ascending eigenvalue.
    """
    a = np.array(a, dtype=float)
    n = a.shape[0]
    v = np.eye(n)
    if n == 1:
        return a.diagonal().copy(), v
    eps = n * np.finfo(float).eps if eps is None else eps
    scale = np.linalg.norm(a)
    if scale == 0.0:
        return np.zeros(n), v
    skip = 1e-3 * np.finfo(float).eps * scale / n
    for _ in range(max_sweeps):
        off = _off_norm(a)
        if off <= eps * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= skip:
                    continue
                # rotation annihilating a[p, q]
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, tau) / (abs(tau) + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                ap = a[:, p].copy()
                aq = a[:, q]
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                rp = a[p, :].copy()
                rq = a[q, :]
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
                vp = v[:, p].copy()
                vq = v[:, q]
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    else:
        off = _off_norm(a)
        if off > 1e3 * eps * scale:
            raise ConvergenceFailure(
                f"Jacobi sweep cap {max_sweeps} reached, off-diagonal norm {off:.3e}",
                residual=off,
            )
    w = a.diagonal().copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def orth(a, rel: float = 1e-9, scale: float | None = None) -> np.ndarray:
    """Orthonormal basis of the column span of ``a``.

    Singular values below ``rel * scale`` are dropped; ``scale`` defaults to
    the largest singular value of ``a``.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim == 1:
        a = a[:, None]
    if a.shape[1] == 0:
        return np.zeros((a.shape[0], 0))
    u, s, _ = np.linalg.svd(a, full_matrices=False)
    ref = (s[0] if s.size else 0.0) if scale is None else scale
    if ref <= 0.0:
        return np.zeros((a.shape[0], 0))
    k = int(np.sum(s > rel * ref))
    return u[:, :k].copy()


def null_space(a, rel: float = 1e-9, scale: float | None = None) -> np.ndarray:
    """Orthonormal basis of the null space of ``a``."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    n = a.shape[1]
    if a.shape[0] == 0:
        return np.eye(n)
    _, s, vt = np.linalg.svd(a, full_matrices=True)
    ref = (s[0] if s.size else 0.0) if scale is None else scale
    k = int(np.sum(s > rel * ref)) if ref > 0 else 0
    return vt[k:].T.copy()


def rank(a, rel: float = 1e-9, scale: float | None = None) -> int:
    return orth(a, rel, scale).shape[1]


def subspace_distance(b1, b2) -> float:
    """Sine of the largest principal angle; 1.0 when dimensions differ.

    Both arguments are orthonormal bases.
    """
    b1 = np.asarray(b1)
    b2 = np.asarray(b2)
    if b1.shape[1] != b2.shape[1]:
        return 1.0
    if b1.shape[1] == 0:
        return 0.0
    r = b2 - b1 @ (b1.T @ b2)
    return float(min(1.0, np.linalg.norm(r, 2)))


def containment_residual(basis_outer, vectors) -> float:
    """Largest 2-norm of the component of any column outside span(basis)."""
    vectors = np.asarray(vectors)
    if vectors.size == 0:
        return 0.0
    r = vectors - basis_outer @ (basis_outer.T @ vectors)
    return float(np.max(np.linalg.norm(r, axis=0)))


def random_orthogonal(rng: np.random.Generator, k: int) -> np.ndarray:
    if k == 0:
        return np.zeros((0, 0))
    q, r = np.linalg.qr(rng.standard_normal((k, k)))
    return q * np.sign(np.where(np.diag(r) == 0, 1.0, np.diag(r)))
