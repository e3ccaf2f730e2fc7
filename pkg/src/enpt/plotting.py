"""Figure rendering for sweep, level, and benchmark reports.

Each function takes the rows produced by the corresponding engine and
writes a PNG next to the CSV it accompanies.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

_METHOD_LABEL = {
    "iterative": "iterative",
    "rspt": "RSPT",
    "bwpt_sc": "BWPT (self-consistent)",
    "bwpt_prior": "BWPT (prior order)",
    "qd_iterative": "QD iterative",
    "qd_second": "QD 2nd order",
    "bwpt_naive": "BWPT (nested sums)",
}


def plot_sweep(rows, path):
    """Relative error against the strength, one curve per (method, order)."""
    series = {}
    for r in rows:
        if r.error or r.rel_error is None:
            continue
        series.setdefault((r.method, r.order_or_k), []).append((r.lam, r.rel_error))
    fig, ax = plt.subplots(figsize=(7, 5))
    for (method, k), pts in sorted(series.items()):
        pts.sort()
        xs = [p[0] for p in pts]
        ys = [max(p[1], 1e-17) for p in pts]
        ax.semilogy(xs, ys, label=f"{_METHOD_LABEL.get(method, method)} k={k}")
    first = rows[0] if rows else None
    title = f"{first.system}, {first.partition} partitioning" if first else "sweep"
    ax.set_xlabel(r"perturbation strength $\lambda$")
    ax.set_ylabel("relative error")
    ax.set_title(title)
    ax.legend(fontsize=8)
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_levels(rows, path):
    """Level diagram: energy of each retained state against the strength."""
    series = {}
    for r in rows:
        series.setdefault(r.n, []).append((r.lam, r.energy))
    fig, ax = plt.subplots(figsize=(7, 5))
    for n, pts in sorted(series.items()):
        pts.sort()
        ax.plot([p[0] for p in pts], [p[1] for p in pts], label=f"n={n}")
    ax.set_xlabel(r"perturbation strength $\lambda$")
    ax.set_ylabel("energy")
    ax.set_title("box energy levels")
    ax.axhline(0.0, color="k", linewidth=0.5)
    ax.legend(fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_bench(rows, path):
    """Per-order cost: incremental cycle time and nested-sum totals."""
    fig, ax = plt.subplots(figsize=(7, 5))
    for method in sorted({r.method for r in rows}):
        pts = sorted(
            (r.order_or_k, r.incremental_time_ns if method == "iterative"
             else r.wall_time_ns)
            for r in rows if r.method == method
        )
        label = _METHOD_LABEL.get(method, method)
        if method == "iterative":
            label += " (per-cycle)"
        ax.semilogy(
            [p[0] for p in pts], [max(p[1], 1) for p in pts],
            marker="o", label=label,
        )
    ax.set_xlabel("order k")
    ax.set_ylabel("time (ns)")
    ax.set_title(f"per-order cost, basis size {rows[0].n_basis}" if rows else "cost")
    ax.legend(fontsize=8)
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
