"""Joint spectral decomposition of the identity and the graph Fourier transform."""

from __future__ import annotations

import functools
import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import (
    AmbiguousClustering,
    BandOutOfRange,
    DimensionMismatch,
    ZeroCutoffFrequency,
)
from .linalg import max_abs
from .shifts import JointEigen, ShiftSet, _frozen
from .tolerances import DEFAULT, ToleranceConfig


@dataclass(frozen=True)
class SpectralDecomposition:
    frequencies: np.ndarray  # M x d, row m is gamma(m)
    projections: tuple  # M matrices N x N
    multiplicities: tuple
    grouping: tuple  # eigen-index n -> frequency index m
    source: JointEigen
    tol_group: float

    @property
    def M(self) -> int:
        return len(self.projections)

    @property
    def N(self) -> int:
        return self.projections[0].shape[0]

    @property
    def d(self) -> int:
        return self.frequencies.shape[1]

    @property
    def shifts(self) -> ShiftSet:
        return self.source.shifts

    def basis(self, m: int) -> np.ndarray:
        """Orthonormal basis of the eigenspace W_m (columns of U in cluster m)."""
        idx = [n for n, g in enumerate(self.grouping) if g == m]
        return self.source.u_basis[:, idx]

    def norms(self) -> np.ndarray:
        return np.linalg.norm(self.frequencies, axis=1)

    def scaled(self, factor: float) -> "SpectralDecomposition":
        """Decomposition of the shifts multiplied by ``factor``."""
        return SpectralDecomposition(
            _frozen(factor * self.frequencies),
            self.projections,
            self.multiplicities,
            self.grouping,
            self.source.scaled(factor),
            abs(factor) * self.tol_group,
        )

    def same_as(self, other: "SpectralDecomposition") -> bool:
        if self is other:
            return True
        if self.M != other.M or self.N != other.N or self.d != other.d:
            return False
        if max_abs(self.frequencies - other.frequencies) > max(self.tol_group, other.tol_group):
            return False
        return all(max_abs(p - q) <= 1e-8 for p, q in zip(self.projections, other.projections))

    def to_dict(self, with_projections: bool = True) -> dict:
        out = {
            "M": self.M,
            "N": self.N,
            "d": self.d,
            "frequencies": self.frequencies,
            "multiplicities": list(self.multiplicities),
        }
        if with_projections:
            out["projections"] = [p for p in self.projections]
        return out


def _frequency_order(gammas: list, tol: float) -> list:
    """Indices sorted by norm, ties (within tol) broken lexicographically."""

    def cmp(i, j):
        ni, nj = np.linalg.norm(gammas[i]), np.linalg.norm(gammas[j])
        if abs(ni - nj) > tol:
            return -1 if ni < nj else 1
        for a, b in zip(gammas[i], gammas[j]):
            if abs(a - b) > tol:
                return -1 if a < b else 1
        return 0

    return sorted(range(len(gammas)), key=functools.cmp_to_key(cmp))


def build_decomposition(
    je: JointEigen, tol_group: Optional[float] = None, tol: ToleranceConfig = DEFAULT
) -> SpectralDecomposition:
    """Cluster joint eigenvalues into distinct frequencies and form projections."""
    lam = np.asarray(je.eigenvalues)
    d, n = lam.shape
    if tol_group is None:
        tol_group = tol.group_abs(max_abs(lam))

    # pairwise sup-distance between joint eigenvalue columns
    dist = np.max(np.abs(lam[:, :, None] - lam[:, None, :]), axis=0)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if dist[i, j] <= tol_group:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[max(ri, rj)] = min(ri, rj)
    roots = sorted({find(i) for i in range(n)})
    members = {r: [i for i in range(n) if find(i) == r] for r in roots}

    # clusters must be well separated from each other
    for a_i, ra in enumerate(roots):
        for rb in roots[a_i + 1:]:
            gap = dist[np.ix_(members[ra], members[rb])].min()
            if gap <= 10.0 * tol_group:
                raise AmbiguousClustering(
                    f"two frequency clusters are {gap:.3e} apart, within 10 x tol_group "
                    f"({tol_group:.3e}); choose a different grouping tolerance",
                    gap=float(gap),
                )

    gammas = [lam[:, members[r]].mean(axis=1) for r in roots]
    order = _frequency_order(gammas, tol_group)
    u = je.u_basis
    projections, mults, freqs = [], [], []
    grouping = [0] * n
    for m, k in enumerate(order):
        idx = members[roots[k]]
        cols = u[:, idx]
        projections.append(_frozen(cols @ cols.T))
        mults.append(len(idx))
        freqs.append(gammas[k])
        for i in idx:
            grouping[i] = m
    return SpectralDecomposition(
        _frozen(np.array(freqs).reshape(len(freqs), d)),
        tuple(projections),
        tuple(mults),
        tuple(grouping),
        je,
        float(tol_group),
    )


@dataclass(frozen=True)
class GftSignal:
    components: np.ndarray  # M x N, row m is x_hat(m)
    sd: SpectralDecomposition

    def energies(self) -> np.ndarray:
        return np.sum(self.components ** 2, axis=1)


def _as_signal(sd: SpectralDecomposition, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.shape[0] != sd.N:
        raise DimensionMismatch(f"signal has shape {x.shape}, expected ({sd.N},)")
    return x


def gft(sd: SpectralDecomposition, x) -> GftSignal:
    x = _as_signal(sd, x)
    comps = np.array([p @ x for p in sd.projections])
    return GftSignal(comps, sd)


def igft(X: GftSignal) -> np.ndarray:
    comps = np.asarray(X.components, dtype=float)
    if comps.ndim != 2 or comps.shape != (X.sd.M, X.sd.N):
        raise DimensionMismatch(
            f"components have shape {comps.shape}, expected ({X.sd.M}, {X.sd.N})"
        )
    return comps.sum(axis=0)


@dataclass(frozen=True)
class LowpassResult:
    x_k: np.ndarray
    bound: float
    actual_err: float


def lowpass(sd: SpectralDecomposition, x, K: int) -> LowpassResult:
    """Keep the K lowest frequencies; report the a-priori and actual errors."""
    x = _as_signal(sd, x)
    if not 1 <= K <= sd.M:
        raise BandOutOfRange(f"K={K} outside [1, {sd.M}]")
    comps = gft(sd, x).components
    x_k = comps[:K].sum(axis=0)
    err = float(np.linalg.norm(x - x_k))
    if K == sd.M:
        return LowpassResult(x_k, 0.0, err)
    cutoff = float(np.linalg.norm(sd.frequencies[K]))
    energy = math.sqrt(sum(float(np.sum((s @ x) ** 2)) for s in sd.shifts.shifts))
    if cutoff <= sd.tol_group:
        warnings.warn(
            f"frequency {K + 1} has zero norm; the error bound is infinite",
            ZeroCutoffFrequency,
            stacklevel=2,
        )
        return LowpassResult(x_k, math.inf, err)
    return LowpassResult(x_k, energy / cutoff, err)


def decompose(shifts: ShiftSet, seed: int = 0, tol: ToleranceConfig = DEFAULT):
    """Shortcut: joint eigendecomposition followed by clustering."""
    from .shifts import joint_eigendecomposition

    return build_decomposition(joint_eigendecomposition(shifts, tol, seed), tol=tol)


def export_decomposition(sd: SpectralDecomposition) -> dict:
    """Everything needed to rebuild ``sd`` without another eigensolve."""
    je = sd.source
    return {
        "M": sd.M,
        "N": sd.N,
        "d": sd.d,
        "frequencies": sd.frequencies,
        "multiplicities": list(sd.multiplicities),
        "grouping": list(sd.grouping),
        "tol_group": sd.tol_group,
        "shifts": list(sd.shifts.shifts),
        "u_basis": je.u_basis,
        "eigenvalues": je.eigenvalues,
        "residual": je.residual,
        "orth_residual": je.orth_residual,
        "seed": je.seed,
    }


def import_decomposition(data: dict) -> SpectralDecomposition:
    u = np.asarray(data["u_basis"], dtype=float)
    lam = np.asarray(data["eigenvalues"], dtype=float).reshape(int(data["d"]), -1)
    shifts = ShiftSet(tuple(_frozen(np.asarray(s, dtype=float)) for s in data["shifts"]))
    je = JointEigen(
        _frozen(u), _frozen(lam), float(data["residual"]), float(data["orth_residual"]),
        shifts, data.get("seed"),
    )
    grouping = tuple(int(g) for g in data["grouping"])
    m_count = int(data["M"])
    projections = []
    for m in range(m_count):
        cols = u[:, [n for n, g in enumerate(grouping) if g == m]]
        projections.append(_frozen(cols @ cols.T))
    freqs = np.asarray(data["frequencies"], dtype=float).reshape(m_count, int(data["d"]))
    return SpectralDecomposition(
        _frozen(freqs),
        tuple(projections),
        tuple(int(k) for k in data["multiplicities"]),
        grouping,
        je,
        float(data["tol_group"]),
    )
