"""Numerical tolerance policy.

Relative tolerances are stored; absolute thresholds are derived from the
scale of the data at hand (largest shift entry, largest eigenvalue, ...).
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, fields, replace

ENV_VAR = "GSIS_TOL_OVERRIDE"


@dataclass(frozen=True)
class ToleranceConfig:
    sym: float = 1e-10  # asymmetry, times (1 + max |S|)
    comm: float = 1e-10  # commutator, times (1 + max |S|)
    eig: float = 1e-9  # diagonalization residual, times (1 + max |S|)
    orth: float = 1e-10  # |U^T U - I|
    group: float = 1e-8  # eigenvalue clustering, times (1 + max |lambda|)
    rank: float = 1e-9  # singular value cutoff relative to the largest
    dist: float = 1e-8  # principal-angle distance for subspace equality
    pinv: float = 1e-10  # pseudo-inverse cutoff
    check: float = 1e-9  # generic residual checks, relative
    separation: float = 1e-10  # minimum gap between interpolation nodes
    support: float = 1e-12  # support floor relative to the signal norm
    reconstruction: float = 1e-8  # dual frame reconstruction residual
    max_sweeps: int = 100  # Jacobi sweep cap

    def sym_abs(self, scale: float) -> float:
        return self.sym * (1.0 + scale)

    def comm_abs(self, scale: float) -> float:
        return self.comm * (1.0 + scale)

    def eig_abs(self, scale: float) -> float:
        return self.eig * (1.0 + scale)

    def group_abs(self, lam_scale: float) -> float:
        return self.group * (1.0 + lam_scale)

    def updated(self, mapping: dict) -> "ToleranceConfig":
        known = {f.name: f.type for f in fields(self)}
        clean = {}
        for key, value in mapping.items():
            if key not in known:
                raise KeyError(f"unknown tolerance '{key}'")
            clean[key] = int(value) if key == "max_sweeps" else float(value)
        return replace(self, **clean)

    @classmethod
    def from_env(cls, environ=None) -> "ToleranceConfig":
        environ = os.environ if environ is None else environ
        raw = environ.get(ENV_VAR)
        base = cls()
        if not raw:
            return base
        return base.updated(json.loads(raw))


DEFAULT = ToleranceConfig()
