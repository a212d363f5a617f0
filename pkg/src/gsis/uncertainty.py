"""Uncertainty principles linking vertex supports and frequency supports.

Vertex sets Y and frequency sets Omega are 0-based here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import AlphaNotBelowOne, DimensionMismatch, EmptySet, ZeroSignal
from .spectral import SpectralDecomposition, gft

# alpha >= 1 is decided with this slack; tight cases sum N terms of 1/N
ALPHA_SLACK = 1e-10
SUPPORT_FLOOR = 1e-12


def delta_energies(sd: SpectralDecomposition) -> np.ndarray:
    """M x N array of ||delta_v_hat(m)||^2 = P_m[v, v]."""
    return np.array([np.diag(p) for p in sd.projections])


@dataclass(frozen=True)
class SpatialFourierPair:
    sd: SpectralDecomposition
    y_set: tuple
    omega_set: tuple
    alpha: float
    dim_omega: int

    def to_dict(self) -> dict:
        return {
            "Y": list(self.y_set),
            "Omega": [m + 1 for m in self.omega_set],
            "alpha": self.alpha,
            "dim_omega": self.dim_omega,
        }


def _index_set(values, bound: int, what: str) -> tuple:
    out = tuple(sorted(set(int(v) for v in values)))
    if not out:
        raise EmptySet(f"{what} is empty")
    if out[0] < 0 or out[-1] >= bound:
        raise DimensionMismatch(f"{what} index out of range 0..{bound - 1}: {list(out)}")
    return out


def alpha(sd: SpectralDecomposition, Y: Sequence[int], Omega: Sequence[int]) -> SpatialFourierPair:
    y = _index_set(Y, sd.N, "vertex set Y")
    om = _index_set(Omega, sd.M, "frequency set Omega")
    e = delta_energies(sd)
    a = math.sqrt(max(float(e[np.ix_(om, y)].sum()), 0.0))
    return SpatialFourierPair(sd, y, om, a, int(sum(sd.multiplicities[m] for m in om)))


def _off_energy(x, y_set, n) -> float:
    mask = np.ones(n, dtype=bool)
    mask[list(y_set)] = False
    return float(np.linalg.norm(x[mask]))


def _off_fourier(sd, x, omega) -> float:
    comp = gft(sd, x).energies()
    mask = np.ones(sd.M, dtype=bool)
    mask[list(omega)] = False
    return float(np.sqrt(comp[mask].sum()))


def annihilation_bound(pair: SpatialFourierPair, x) -> dict:
    """Both sides of ||x|| <= C1 ||x_hat off Omega|| + C2 ||x off Y||."""
    a = pair.alpha
    if a >= 1.0:
        raise AlphaNotBelowOne(f"alpha(Y, Omega) = {a:.6g} is not below 1", alpha=a)
    sd = pair.sd
    x = np.asarray(x, dtype=float).reshape(-1)
    c1 = 1.0 / (1.0 - a)
    c2 = math.sqrt(max(pair.dim_omega - a * a, 0.0)) / (1.0 - a)
    lhs = float(np.linalg.norm(x))
    rhs = c1 * _off_fourier(sd, x, pair.omega_set) + c2 * _off_energy(x, pair.y_set, sd.N)
    holds = lhs <= rhs * (1.0 + 1e-12) + 1e-12 * lhs
    return {"C1": c1, "C2": c2, "lhs": lhs, "rhs": rhs, "holds": bool(holds)}


def _nonzero(x) -> np.ndarray:
    x = np.asarray(x, dtype=float).reshape(-1)
    if not np.any(x):
        raise ZeroSignal("the signal is zero")
    return x


def concentration(x, Y: Sequence[int]) -> float:
    """Smallest eps with x eps-concentrated on Y."""
    x = _nonzero(x)
    y = _index_set(Y, x.size, "vertex set Y")
    return _off_energy(x, y, x.size) / float(np.linalg.norm(x))


def concentration_fourier(sd: SpectralDecomposition, x, Omega: Sequence[int]) -> float:
    x = _nonzero(x)
    om = _index_set(Omega, sd.M, "frequency set Omega")
    return _off_fourier(sd, x, om) / float(np.linalg.norm(x))


def donoho_stark_check(pair: SpatialFourierPair, eps_t: float, eps_f: float) -> bool:
    """alpha(Y, Omega) >= 1 - eps_T - sqrt(dim Omega) eps_F."""
    return pair.alpha >= 1.0 - eps_t - math.sqrt(pair.dim_omega) * eps_f - ALPHA_SLACK


def supports(sd: SpectralDecomposition, x):
    x = _nonzero(x)
    floor = SUPPORT_FLOOR * float(np.linalg.norm(x))
    supp_x = tuple(int(v) for v in np.flatnonzero(np.abs(x) > floor))
    norms = np.sqrt(gft(sd, x).energies())
    supp_f = tuple(int(m) for m in np.flatnonzero(norms > floor))
    return supp_x, supp_f


def support_uncertainty(sd: SpectralDecomposition, x) -> dict:
    supp_x, supp_f = supports(sd, x)
    pair = alpha(sd, supp_x, supp_f)
    return {
        "supp_x": list(supp_x),
        "supp_x_hat": [m + 1 for m in supp_f],
        "alpha_supports": pair.alpha,
        "product": len(supp_x) * pair.dim_omega,
        "holds": pair.alpha >= 1.0 - ALPHA_SLACK,
    }


def _min_vertices(energy: np.ndarray) -> int:
    """Fewest vertices whose energies reach 1, or 0 if even all of them do not."""
    csum = np.cumsum(np.sort(energy)[::-1])
    hit = np.flatnonzero(csum >= 1.0 - ALPHA_SLACK)
    return int(hit[0]) + 1 if hit.size else 0


def coherence_norms(
    sd: SpectralDecomposition, exhaustive_limit: int = 2**24, samples: int = 4096, seed: int = 0
) -> dict:
    """Suprema ||P||_*, ||P||_** and the coherence ||P||_inf.

    For a fixed Omega the smallest Y with alpha >= 1 takes the vertices of largest
    energy, so only frequency subsets need enumerating. When 2^M N exceeds
    ``exhaustive_limit``, ``samples`` random subsets give lower bounds instead.
    """
    e = delta_energies(sd)
    mults = np.array(sd.multiplicities)
    p_inf = math.sqrt(float(e.max()))
    exact = (2 ** sd.M) * sd.N <= exhaustive_limit
    if exact:
        subsets = [[m for m in range(sd.M) if mask >> m & 1] for mask in range(1, 2**sd.M)]
    else:
        rng = np.random.default_rng(seed)
        rows = rng.random((samples, sd.M)) < 0.5
        subsets = [list(range(sd.M))] + [list(np.flatnonzero(r)) for r in rows if r.any()]
    best1 = best2 = 0.0
    for om in subsets:
        k = _min_vertices(e[om].sum(axis=0))
        if k == 0:
            continue
        best1 = max(best1, 1.0 / math.sqrt(k * int(mults[om].sum())))
        best2 = max(best2, 1.0 / math.sqrt(k * len(om)))
    return {
        "p_star": best1,
        "p_star2": best2,
        "p_inf": p_inf,
        "lower_bound_only": not exact,
        "subsets_examined": len(subsets),
    }
