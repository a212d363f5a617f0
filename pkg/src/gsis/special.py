"""Closed forms for complete graphs and circulant graphs."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvalidSpec, PartitionBlowup
from .linalg import max_abs
from .shifts import Graph, JointEigen, ShiftSet, _frozen, standard_shifts
from .spectral import SpectralDecomposition, build_decomposition
from .tolerances import DEFAULT, ToleranceConfig


# ---------------------------------------------------------------- complete graphs


def helmert_basis(n: int) -> np.ndarray:
    """Orthonormal basis with first column 1/sqrt(n) and the rest orthogonal to 1."""
    h = np.zeros((n, n))
    h[:, 0] = 1.0 / math.sqrt(n)
    for k in range(1, n):
        c = 1.0 / math.sqrt(k * (k + 1))
        h[:k, k] = c
        h[k, k] = -k * c
    return h


def complete_graph_shifts(n: int) -> ShiftSet:
    return standard_shifts(Graph.complete(n), "sym_laplacian")


def complete_graph_decomposition(n: int, tol: ToleranceConfig = DEFAULT) -> SpectralDecomposition:
    """K_N with its normalized Laplacian: gamma = {0, N/(N-1)}, P_1 = 11^T/N."""
    if n < 2:
        raise InvalidSpec(f"complete graph needs N >= 2, got {n}")
    shifts = complete_graph_shifts(n)
    u = helmert_basis(n)
    lam = np.full((1, n), n / (n - 1.0))
    lam[0, 0] = 0.0
    s = shifts.shifts[0]
    residual = max_abs(s - (u * lam[0]) @ u.T)
    je = JointEigen(_frozen(u), _frozen(lam), residual, max_abs(u.T @ u - np.eye(n)), shifts)
    p1 = np.full((n, n), 1.0 / n)
    groups = tuple([0] + [1] * (n - 1))
    return SpectralDecomposition(
        _frozen(np.array([[0.0], [n / (n - 1.0)]])),
        (_frozen(p1), _frozen(np.eye(n) - p1)),
        (1, n - 1),
        groups,
        je,
        tol.group_abs(n / (n - 1.0)),
    )


def complete_graph_frame_predicates(n: int, phi, tol: ToleranceConfig = DEFAULT) -> dict:
    """Dual existence and frame-operator invariance on K_N from column means alone."""
    phi = np.asarray(phi, dtype=float)
    if phi.ndim == 1:
        phi = phi[:, None]
    if phi.shape[0] != n:
        from .errors import DimensionMismatch

        raise DimensionMismatch(f"generators have {phi.shape[0]} rows, expected {n}")
    scale = max(1.0, max_abs(phi))
    means = phi.mean(axis=0)
    ones = np.ones(n)
    coef, *_ = np.linalg.lstsq(phi, ones, rcond=None)
    ones_in_span = np.linalg.norm(phi @ coef - ones) <= tol.dist * math.sqrt(n) * scale
    means_zero = bool(np.all(np.abs(means) <= tol.dist * scale))
    lhs = phi @ means
    rhs = float(means @ means) * ones
    operator_si = bool(max_abs(lhs - rhs) <= tol.dist * scale * scale * phi.shape[1])
    return {"dual_exists": bool(ones_in_span or means_zero), "operator_si": operator_si}


# ---------------------------------------------------------------- circulant graphs


@dataclass(frozen=True)
class CirculantSpec:
    n: int
    q: tuple

    def __post_init__(self):
        q = tuple(int(x) for x in self.q)
        object.__setattr__(self, "q", q)
        if self.n < 2:
            raise InvalidSpec(f"N must be at least 2, got {self.n}")
        if not q:
            raise InvalidSpec("at least one generator offset is required")
        if any(b <= a for a, b in zip(q, q[1:])):
            raise InvalidSpec(f"offsets must be strictly increasing, got {q}")
        if q[0] < 1 or 2 * q[-1] > self.n:
            raise InvalidSpec(f"offsets must lie in [1, N/2], got {q}")
        if math.gcd(self.n, *q) != 1:
            raise InvalidSpec(f"gcd of N and the offsets is {math.gcd(self.n, *q)}, must be 1")

    @property
    def d(self) -> int:
        return len(self.q)

    @property
    def thetas(self) -> np.ndarray:
        return 2.0 * math.pi * np.array(self.q) / self.n


def circulant_shift_matrices(spec: CirculantSpec) -> list:
    """S_l = I - (Pi^q + Pi^-q)/2 with Pi the cyclic permutation."""
    n = spec.n
    eye = np.eye(n)
    out = []
    for q in spec.q:
        fwd = np.roll(eye, q, axis=1)
        out.append(eye - (fwd + fwd.T) / 2.0)
    return out


def circulant_shifts(spec: CirculantSpec) -> ShiftSet:
    graphs = [Graph.circulant(spec.n, [q]) for q in spec.q]
    return standard_shifts(graphs, "sym_laplacian")


def circulant_eigenbasis(spec: CirculantSpec):
    """Closed-form U (cosine/sine columns) and the frequency index k of each column."""
    n = spec.n
    j = np.arange(n)
    cols, ks = [np.full(n, 1.0 / math.sqrt(n))], [0]
    for k in range(1, (n - 1) // 2 + 1):
        cols.append(math.sqrt(2.0 / n) * np.cos(2.0 * math.pi * k * j / n))
        cols.append(math.sqrt(2.0 / n) * np.sin(2.0 * math.pi * k * j / n))
        ks += [k, k]
    if n % 2 == 0:
        cols.append((-1.0) ** j / math.sqrt(n))
        ks.append(n // 2)
    return np.array(cols).T, ks


@dataclass(frozen=True)
class CirculantDecomposition:
    sd: SpectralDecomposition
    je: JointEigen
    # wavenumber-order frequency list (k = 0, 1, ..., with repeated values merged at
    # their first occurrence) mapped to the global frequency index
    permutation: tuple


def circulant_decomposition(spec: CirculantSpec, tol: ToleranceConfig = DEFAULT):
    shifts = circulant_shifts(spec)
    u, ks = circulant_eigenbasis(spec)
    lam = np.array([[1.0 - math.cos(k * th) for k in ks] for th in spec.thetas])
    residual = max(max_abs(s - (u * lam[i]) @ u.T) for i, s in enumerate(shifts.shifts))
    je = JointEigen(
        _frozen(u), _frozen(lam), residual, max_abs(u.T @ u - np.eye(spec.n)), shifts
    )
    sd = build_decomposition(je, tol=tol)
    perm = []
    for n_idx in range(spec.n):
        m = sd.grouping[n_idx]
        if m not in perm:
            perm.append(m)
    return CirculantDecomposition(sd, je, tuple(perm))


def _collision_possible(n: int, a: int, b: int) -> bool:
    """Is there 1 <= k1 < k2 <= K with a | k1 + k2 and b | k2 - k1, K = floor((N-1)/2)?"""
    kmax = (n - 1) // 2
    for s in range(a, 2 * kmax, a):
        for t in range(b, kmax, b):
            if (s - t) % 2 == 0 and s - t >= 2 and s + t <= 2 * kmax:
                return True
    return False


def circulant_distinct_spectrum(spec: CirculantSpec) -> bool:
    """Are lambda(1), lambda(2k), 1 <= k <= (N-1)/2 (and lambda(N) for even N) distinct?

    cos(k1 theta) = cos(k2 theta) iff q (k1 + k2) = 0 or q (k1 - k2) = 0 mod N.
    For every split Q = Q1 + Q2 of the offsets into those two cases, a collision
    needs N / gcd(N, Q1) to divide k1 + k2 and N / gcd(N, Q2) to divide k1 - k2.
    """
    if spec.d > 20:
        raise PartitionBlowup(f"{2 ** spec.d - 2} partitions for d = {spec.d}")
    n, q = spec.n, spec.q
    for mask in range(1, 2 ** spec.d - 1):
        q1 = [x for i, x in enumerate(q) if mask >> i & 1]
        q2 = [x for i, x in enumerate(q) if not mask >> i & 1]
        a = n // math.gcd(n, *q1)
        b = n // math.gcd(n, *q2)
        if _collision_possible(n, a, b):
            return False
    return True
