"""PNG figures written next to the CSV/NDJSON outputs."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def _save(fig, path) -> Path:
    path = Path(path)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return path


def _floor(v):
    return np.maximum(np.abs(np.asarray(v, dtype=float)), 1e-18)


def plot_drift(records: list, path) -> Path:
    """Relative drift of each monitored quantity against time (log scale)."""
    fig, ax = plt.subplots(figsize=(6, 4))
    t = [r["t"] for r in records]
    keys = sorted({k for r in records for k in r.get("drift", {})})
    for k in keys:
        ax.semilogy(t, _floor([r["drift"].get(k, np.nan) for r in records]), label=k)
    ax.set_xlabel("t")
    ax.set_ylabel("relative drift")
    if keys:
        ax.legend()
    return _save(fig, path)


def plot_zcr(records: list, path) -> Path:
    fig, ax = plt.subplots(figsize=(6, 4))
    t = [r["t"] for r in records]
    lams = list(records[0].get("zcr", {})) if records else []
    for lam in lams:
        ax.semilogy(t, _floor([r["zcr"][lam] for r in records]), label=f"lambda={lam}")
    for row in ("r3", "r2"):
        if records and "constraints" in records[0]:
            ax.semilogy(t, _floor([r["constraints"][row] for r in records]), "--", label=row)
    ax.set_xlabel("t")
    ax.set_ylabel("max residual")
    if lams:
        ax.legend(fontsize=8)
    return _save(fig, path)


def plot_filament(points, path, title: str = "") -> Path:
    pts = np.asarray(points)
    fig = plt.figure(figsize=(5, 5))
    ax = fig.add_subplot(projection="3d")
    ax.plot(pts[:, 0], pts[:, 1], pts[:, 2], lw=1.5)
    ax.scatter(*pts[0], color="k", s=12)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_zlabel("z")
    if title:
        ax.set_title(title)
    return _save(fig, path)


def plot_riccati(s, rhos: dict, path) -> Path:
    fig, ax = plt.subplots(figsize=(6, 4))
    for name, r in rhos.items():
        ax.plot(s, np.real(r), label=name)
    ax.set_xlabel("s")
    ax.set_ylabel("density (real part)")
    ax.legend()
    return _save(fig, path)


def plot_verify(records: list, path) -> Path:
    """Worst residual per lambda and per constraint row across the verification run."""
    fig, ax = plt.subplots(figsize=(6, 4))
    labels, vals = [], []
    if records:
        for lam in records[0]["zcr"]:
            labels.append(f"zcr {lam}")
            vals.append(max(r["zcr"][lam] for r in records))
        for row in ("r4", "r3", "r2"):
            labels.append(row)
            vals.append(max(r["constraints"][row] for r in records))
    ax.bar(range(len(vals)), _floor(vals), log=True)
    ax.set_xticks(range(len(vals)), labels, rotation=45, ha="right", fontsize=8)
    ax.set_ylabel("max residual")
    return _save(fig, path)
