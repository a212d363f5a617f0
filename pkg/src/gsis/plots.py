"""Optional matplotlib figures for CLI reports (needs the ``plot`` extra)."""

from __future__ import annotations

import numpy as np


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def spectrum_figure(sd, path) -> None:
    """Joint frequencies: gamma_1 against gamma_2 (or against m when d = 1)."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(5, 4))
    g = sd.frequencies
    size = 30.0 * np.array(sd.multiplicities)
    if sd.d == 1:
        ax.scatter(np.arange(1, sd.M + 1), g[:, 0], s=size)
        ax.set_xlabel("frequency index m")
        ax.set_ylabel("gamma(m)")
    else:
        ax.scatter(g[:, 0], g[:, 1], s=size)
        for m, (a, b) in enumerate(g[:, :2], 1):
            ax.annotate(str(m), (a, b), textcoords="offset points", xytext=(4, 4))
        ax.set_xlabel("gamma_1")
        ax.set_ylabel("gamma_2")
    ax.set_title(f"N={sd.N}, M={sd.M} (marker size ~ multiplicity)")
    fig.tight_layout()
    fig.savefig(path, metadata={"Software": None})
    plt.close(fig)


def energy_figure(energies, path, title="GFT energy per frequency") -> None:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(5, 3.5))
    e = np.asarray(energies, dtype=float)
    ax.bar(np.arange(1, e.size + 1), e)
    ax.set_xlabel("frequency index m")
    ax.set_ylabel("||x_hat(m)||^2")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, metadata={"Software": None})
    plt.close(fig)


def matrix_figure(a, path, title="") -> None:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(4.5, 4))
    im = ax.imshow(np.asarray(a, dtype=float), cmap="viridis")
    fig.colorbar(im, ax=ax)
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, metadata={"Software": None})
    plt.close(fig)
