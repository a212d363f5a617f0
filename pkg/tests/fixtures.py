"""Shared test fixtures: complete graphs, circulants and random commuting pairs."""

from __future__ import annotations

import functools

import numpy as np

from gsis.shifts import validate_shifts
from gsis.special import CirculantSpec, complete_graph_shifts, circulant_shifts
from gsis.spectral import decompose

COMPLETE_N = (2, 4, 10)
CIRCULANTS = ((5, (1,)), (8, (1, 2)), (12, (3, 4)), (9, (1, 3)))
RANDOM_SEEDS = tuple(range(20))


def random_commuting_pair(seed: int):
    """S1 = R and S2 = c0 I + c1 R + c2 R^2 for a random symmetric R.

    R has well-spread eigenvalues: jittered equispaced points in [-1, 1].
    """
    rng = np.random.default_rng([2024, seed])
    n = int(rng.integers(4, 25))
    lam = np.sort(-1.0 + 2.0 * (np.arange(n) + 0.5 + 0.35 * rng.uniform(-1, 1, n)) / n)
    q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    r = (q * lam) @ q.T
    r = (r + r.T) / 2.0
    c = rng.standard_normal(3)
    s2 = c[0] * np.eye(n) + c[1] * r + c[2] * (r @ r)
    return [r, (s2 + s2.T) / 2.0]


@functools.lru_cache(maxsize=None)
def shift_sets():
    """Named ShiftSets for every fixture, in a fixed order."""
    out = []
    for n in COMPLETE_N:
        out.append((f"K{n}", complete_graph_shifts(n)))
    for n, q in CIRCULANTS:
        out.append((f"C({n},{set(q)})", circulant_shifts(CirculantSpec(n, q))))
    for s in RANDOM_SEEDS:
        out.append((f"random{s}", validate_shifts(random_commuting_pair(s))))
    return tuple(out)


@functools.lru_cache(maxsize=None)
def decompositions(seed: int = 0):
    """(name, sd) for every fixture through the generic eigensolver path."""
    return tuple((name, decompose(sh, seed=seed)) for name, sh in shift_sets())


def fixture_names():
    return [name for name, _ in shift_sets()]


def get(name: str, seed: int = 0):
    return dict(decompositions(seed))[name]


def scale_for_frames(sd, target: float = 0.7, ceiling: float = 0.95) -> float:
    """``target``, unless that leaves some |gamma| above ``ceiling``; then scale to max |gamma| = target.

    The ceiling keeps truncated shift sums in the oracles convergent in a few hundred terms.
    """
    top = float(np.max(np.abs(sd.frequencies)))
    return target if target * top <= ceiling else target / top


def scaled(sd, target: float = 0.7):
    return sd.scaled(scale_for_frames(sd, target))


def random_gsis_ranges(sd, rng, full_prob: float = 0.35):
    """Per-m random subspaces of W_m; each block is empty, full or partial."""
    ranges = []
    for m in range(sd.M):
        b = sd.basis(m)
        k = b.shape[1]
        u = rng.random()
        if u < full_prob:
            dim = k
        elif u < 2 * full_prob:
            dim = 0
        else:
            dim = int(rng.integers(0, k + 1))
        q, _ = np.linalg.qr(rng.standard_normal((k, k))) if k else (np.zeros((0, 0)), None)
        ranges.append(b @ q[:, :dim])
    if all(r.shape[1] == 0 for r in ranges):
        m = int(rng.integers(sd.M))
        ranges[m] = sd.basis(m)
    return ranges
