"""Graphs, commuting shift families, and their joint diagonalization."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    EmptyShiftSet,
    InvalidGraph,
    IsolatedVertex,
    NotCommuting,
    NotSymmetric,
    SupportViolation,
    ConvergenceFailure,
)
from .linalg import jacobi_eigh, max_abs
from .tolerances import DEFAULT, ToleranceConfig

KINDS = ("adjacency", "laplacian", "sym_laplacian")


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Graph:
    """Simple undirected weighted graph on vertices 0..N-1."""

    n_vertices: int
    edges: dict = field(default_factory=dict)  # (u, v) with u < v -> weight

    def __post_init__(self):
        if self.n_vertices < 2:
            raise InvalidGraph(f"a graph needs at least 2 vertices, got {self.n_vertices}")
        for (u, v), w in self.edges.items():
            if u == v:
                raise InvalidGraph(f"self-loop at vertex {u}")
            if not (0 <= u < v < self.n_vertices):
                raise InvalidGraph(f"bad edge ({u}, {v})")
            if w < 0 or not np.isfinite(w):
                raise InvalidGraph(f"edge ({u}, {v}) has weight {w}")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable) -> "Graph":
        store = {}
        for e in edges:
            u, v = int(e[0]), int(e[1])
            w = float(e[2]) if len(e) > 2 else 1.0
            if u == v:
                raise InvalidGraph(f"self-loop at vertex {u}")
            key = (min(u, v), max(u, v))
            if key in store:
                raise InvalidGraph(f"edge {key} listed twice")
            store[key] = w
        return cls(n, store)

    @classmethod
    def complete(cls, n: int) -> "Graph":
        return cls.from_edges(n, [(u, v) for u in range(n) for v in range(u + 1, n)])

    @classmethod
    def circulant(cls, n: int, offsets: Sequence[int]) -> "Graph":
        edges = set()
        for q in offsets:
            for u in range(n):
                v = (u + q) % n
                if u != v:
                    edges.add((min(u, v), max(u, v)))
        return cls.from_edges(n, sorted(edges))

    def weight_matrix(self) -> np.ndarray:
        w = np.zeros((self.n_vertices, self.n_vertices))
        for (u, v), x in self.edges.items():
            w[u, v] = w[v, u] = x
        return w

    def support_mask(self) -> np.ndarray:
        mask = np.eye(self.n_vertices, dtype=bool)
        for u, v in self.edges:
            mask[u, v] = mask[v, u] = True
        return mask

    def union(self, other: "Graph") -> "Graph":
        if other.n_vertices != self.n_vertices:
            raise DimensionMismatch("graphs have different vertex counts")
        edges = dict(self.edges)
        for key, w in other.edges.items():
            edges[key] = edges.get(key, 0.0) + w
        return Graph(self.n_vertices, edges)


@dataclass(frozen=True)
class ShiftSet:
    shifts: tuple
    graph: Optional[Graph] = None

    @property
    def d(self) -> int:
        return len(self.shifts)

    @property
    def n(self) -> int:
        return self.shifts[0].shape[0]

    @property
    def scale(self) -> float:
        return max(max_abs(s) for s in self.shifts)

    def combination(self, a) -> np.ndarray:
        return sum(float(c) * s for c, s in zip(a, self.shifts))

    def scaled(self, factor: float) -> "ShiftSet":
        return ShiftSet(tuple(_frozen(factor * s) for s in self.shifts), self.graph)


@dataclass(frozen=True)
class JointEigen:
    u_basis: np.ndarray  # N x N, columns are joint eigenvectors
    eigenvalues: np.ndarray  # d x N
    residual: float
    orth_residual: float
    shifts: ShiftSet
    seed: Optional[int] = None

    def scaled(self, factor: float) -> "JointEigen":
        return JointEigen(
            self.u_basis,
            _frozen(factor * self.eigenvalues),
            abs(factor) * self.residual,
            self.orth_residual,
            self.shifts.scaled(factor),
            self.seed,
        )


def commutator_residual(a, b) -> float:
    return max_abs(a @ b - b @ a)


def validate_shifts(
    matrices: Sequence, graph: Optional[Graph] = None, tol: ToleranceConfig = DEFAULT
) -> ShiftSet:
    """Check symmetry, commutativity and graph support of a shift family."""
    mats = [np.asarray(m, dtype=float) for m in matrices]
    if not mats:
        raise EmptyShiftSet("at least one shift is required")
    n = mats[0].shape[0] if mats[0].ndim == 2 else -1
    for i, m in enumerate(mats):
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] != n:
            raise DimensionMismatch(
                f"shift {i + 1} has shape {m.shape}, expected square matrices of one size"
            )
    if n < 2:
        raise DimensionMismatch(f"need N >= 2, got {n}")
    if graph is not None and graph.n_vertices != n:
        raise DimensionMismatch(f"graph has {graph.n_vertices} vertices, shifts are {n} x {n}")
    for i, m in enumerate(mats):
        if not np.all(np.isfinite(m)):
            raise DimensionMismatch(f"shift {i + 1} has non-finite entries")
    scale = max(max_abs(m) for m in mats)
    tol_sym = tol.sym_abs(scale)
    out = []
    for i, m in enumerate(mats):
        asym = max_abs(m - m.T)
        if asym > tol_sym:
            raise NotSymmetric(
                f"shift {i + 1} asymmetry {asym:.3e} exceeds {tol_sym:.3e}",
                shift=i + 1,
                residual=asym,
            )
        out.append((m + m.T) / 2.0)
    if graph is not None:
        outside = ~graph.support_mask()
        for i, m in enumerate(out):
            bad = np.abs(m[outside])
            if bad.size and bad.max() > tol_sym:
                idx = np.argwhere(outside & (np.abs(m) > tol_sym))[0]
                raise SupportViolation(
                    f"shift {i + 1} has entry {m[idx[0], idx[1]]:.3e} at non-edge "
                    f"({idx[0]}, {idx[1]})",
                    shift=i + 1,
                    position=(int(idx[0]), int(idx[1])),
                )
    tol_comm = tol.comm_abs(scale)
    worst = (0.0, None)
    for i in range(len(out)):
        for j in range(i + 1, len(out)):
            r = commutator_residual(out[i], out[j])
            if r > worst[0]:
                worst = (r, (i + 1, j + 1))
    if worst[0] > tol_comm:
        raise NotCommuting(
            f"shifts {worst[1][0]} and {worst[1][1]} do not commute "
            f"(residual {worst[0]:.3e} > {tol_comm:.3e})",
            pair=worst[1],
            residual=worst[0],
        )
    return ShiftSet(tuple(_frozen(m) for m in out), graph)


def shift_matrix(graph: Graph, kind: str) -> np.ndarray:
    if kind not in KINDS:
        raise ValueError(f"unknown shift kind '{kind}', choose from {KINDS}")
    w = graph.weight_matrix()
    if kind == "adjacency":
        return w
    deg = w.sum(axis=1)
    lap = np.diag(deg) - w
    if kind == "laplacian":
        return lap
    if np.any(deg <= 0):
        v = int(np.argmin(deg))
        raise IsolatedVertex(f"vertex {v} has zero degree", vertex=v)
    s = 1.0 / np.sqrt(deg)
    return s[:, None] * lap * s[None, :]


def standard_shifts(graph, kind="sym_laplacian", tol: ToleranceConfig = DEFAULT) -> ShiftSet:
    """Build named shifts.

    ``graph`` may be one graph or a list of graphs on a common vertex set (one
    shift per graph); ``kind`` is a single kind or one kind per shift.
    """
    graphs = list(graph) if isinstance(graph, (list, tuple)) else [graph]
    kinds = [kind] if isinstance(kind, str) else list(kind)
    if len(graphs) == 1 and len(kinds) > 1:
        graphs = graphs * len(kinds)
    if len(kinds) == 1 and len(graphs) > 1:
        kinds = kinds * len(graphs)
    if len(kinds) != len(graphs):
        raise DimensionMismatch("number of kinds and graphs differ")
    mats = [shift_matrix(g, k) for g, k in zip(graphs, kinds)]
    support = graphs[0]
    for g in graphs[1:]:
        support = support.union(g)
    return validate_shifts(mats, support, tol)


def _clusters_1d(values: np.ndarray, tol: float) -> list:
    """Split sorted positions into runs whose consecutive gaps are <= tol."""
    order = np.argsort(values, kind="stable")
    runs, cur = [], [order[0]]
    for a, b in zip(order[:-1], order[1:]):
        if values[b] - values[a] <= tol:
            cur.append(b)
        else:
            runs.append(cur)
            cur = [b]
    runs.append(cur)
    return runs


def random_unit_vector(rng: np.random.Generator, d: int) -> np.ndarray:
    while True:
        a = rng.standard_normal(d)
        nrm = np.linalg.norm(a)
        if nrm > 1e-12:
            return a / nrm


def joint_eigendecomposition(
    shifts: ShiftSet, tol: ToleranceConfig = DEFAULT, seed: int = 0
) -> JointEigen:
    """Orthogonal U diagonalizing every shift at once.

    A random combination T of the shifts is diagonalized first; any cluster of
    (numerically) repeated eigenvalues of T is then refined by diagonalizing
    each shift restricted to that cluster.
    """
    rng = np.random.default_rng(seed)
    a = random_unit_vector(rng, shifts.d)
    t = shifts.combination(a)
    t = (t + t.T) / 2.0
    w, u = jacobi_eigh(t, tol.max_sweeps)
    scale = shifts.scale
    split_tol = 1e-8 * (1.0 + max_abs(w))

    # refine clusters shift by shift
    groups = [list(g) for g in _clusters_1d(w, split_tol)]
    for s in shifts.shifts:
        refined = []
        for g in groups:
            if len(g) == 1:
                refined.append(g)
                continue
            cols = u[:, g]
            block = cols.T @ s @ cols
            block = (block + block.T) / 2.0
            bw, bv = jacobi_eigh(block, tol.max_sweeps)
            u[:, g] = cols @ bv
            lam_tol = 1e-8 * (1.0 + max_abs(s))
            for sub in _clusters_1d(bw, lam_tol):
                refined.append([g[i] for i in sub])
        groups = refined

    lam = np.array([np.einsum("ij,ij->j", u, s @ u) for s in shifts.shifts])
    order = np.argsort(a @ lam, kind="stable")
    u = u[:, order]
    lam = lam[:, order]
    residual = max(max_abs(s - (u * lam[i]) @ u.T) for i, s in enumerate(shifts.shifts))
    orth_res = max_abs(u.T @ u - np.eye(shifts.n))
    if residual > tol.eig_abs(scale) or orth_res > tol.orth:
        raise ConvergenceFailure(
            f"joint diagonalization residual {residual:.3e}, orthogonality {orth_res:.3e}",
            residual=residual,
        )
    return JointEigen(_frozen(u), _frozen(lam), residual, orth_res, shifts, seed)
