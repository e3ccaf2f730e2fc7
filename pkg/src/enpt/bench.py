"""Cost benchmark: per-cycle time of the denominator-refreshing iteration
against the literal nested-sum BWPT evaluation, order by order.

The iteration spends one matrix-vector product per extra order, so its
incremental cost should stay flat; the nested sums grow a power of the
basis size per order.  Timings use the monotonic clock, medians over a
fixed repeat count, sequential execution, with a warmup pass excluded.
"""

import csv
import time
from dataclasses import dataclass

import numpy as np

from . import nondegen
from .partition import EPSTEIN_NESBET, partition
from .systems import build_harmonic_oscillator

BENCH_HEADER = "method,order_or_k,n_basis,wall_time_ns,incremental_time_ns,repeats"


@dataclass
class BenchRow:
    method: str
    order_or_k: int
    n_basis: int
    wall_time_ns: int
    incremental_time_ns: int
    repeats: int


def benchmark_order_scaling(
    n_basis=200, k_max=16, bw_orders=(2, 3, 4), repeats=5, lam=1.0, target=0
):
    """Medians of per-order cost for the iteration and naive BWPT.

    For the iteration, order_or_k = k labels the cycle that upgrades the
    energy from order k-1 to order k; incremental_time_ns is the median
    cost of that single cycle and wall_time_ns the median cumulative cost
    of reaching order k.  For naive BWPT, wall_time_ns is the median cost
    of the single-evaluation chain up to the given order; order 5 costs
    O(n_basis^4) in pure Python and is left out of the defaults.
    """
    if repeats < 5:
        raise ValueError(f"at least 5 repetitions required, got {repeats}")
    if k_max < 2:
        raise ValueError(f"k_max must be at least 2, got {k_max}")
    sys = build_harmonic_oscillator(n_basis, lam)
    p = partition(sys, EPSTEIN_NESBET)
    rows = []

    iterations = k_max - 1
    nondegen.iterative_pt(p, target, k_max=iterations, tol=0.0)  # warmup
    per_iter = np.empty((repeats, iterations), dtype=np.int64)
    for r in range(repeats):
        trace = nondegen.iterative_pt(p, target, k_max=iterations, tol=0.0)
        per_iter[r] = trace.per_iteration_ns
    cumulative = np.cumsum(per_iter, axis=1)
    med_inc = np.median(per_iter, axis=0)
    med_cum = np.median(cumulative, axis=0)
    for k in range(2, k_max + 1):
        j = k - 2
        rows.append(BenchRow(
            method="iterative",
            order_or_k=k,
            n_basis=n_basis,
            wall_time_ns=int(med_cum[j]),
            incremental_time_ns=int(med_inc[j]),
            repeats=repeats,
        ))

    orders = tuple(sorted(set(int(o) for o in bw_orders)))
    if orders:
        nondegen.bwpt(
            p, target, orders[0],
            strategy=nondegen.PRIOR_ORDER, evaluator=nondegen.NAIVE,
        )  # warmup
        chain_ns = {o: [] for o in orders}
        for _ in range(repeats):
            for o in orders:
                t0 = time.perf_counter_ns()
                nondegen.bwpt(
                    p, target, o,
                    strategy=nondegen.PRIOR_ORDER, evaluator=nondegen.NAIVE,
                )
                chain_ns[o].append(time.perf_counter_ns() - t0)
        prev_med = 0
        for o in orders:
            med = int(np.median(chain_ns[o]))
            rows.append(BenchRow(
                method="bwpt_naive",
                order_or_k=o,
                n_basis=n_basis,
                wall_time_ns=med,
                incremental_time_ns=max(med - prev_med, 0),
                repeats=repeats,
            ))
            prev_med = med
    return rows


def write_bench_csv(rows, fh):
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(BENCH_HEADER.split(","))
    for r in rows:
        writer.writerow([
            r.method, r.order_or_k, r.n_basis,
            r.wall_time_ns, r.incremental_time_ns, r.repeats,
        ])
