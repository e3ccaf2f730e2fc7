"""Strength sweeps: every (strength, method, order) combination becomes one
CSV row carrying the computed energy, the reference, and both error measures.

Row failures (small denominators, non-convergence, unsupported orders) are
recorded in the row's error column instead of aborting the sweep.  All
numeric output is deterministic for a fixed configuration; only the timing
column varies between runs.
"""

import csv
import time
from dataclasses import dataclass, field

import numpy as np

from . import nondegen, quasidegen
from .errors import EnptError
from .partition import EPSTEIN_NESBET, STANDARD, partition
from .reference import dense_eigensolve, reference_energy
from .systems import build_cosine_box, build_harmonic_oscillator

SWEEP_HEADER = (
    "lambda,system,partition,method,order_or_k,energy,reference,"
    "abs_error,rel_error,iterations,wall_time_ns,error"
)
LEVELS_HEADER = "lambda,n,energy"

METHODS = ("iterative", "rspt", "bwpt_sc", "bwpt_prior", "qd_iterative", "qd_second")
SYSTEMS = ("oscillator", "box")
PARTITIONS = ("en", "standard")

_SCHEME_BY_NAME = {"en": EPSTEIN_NESBET, "standard": STANDARD}
_ZERO_REFERENCE = 1e-12


def default_lambda_grid(system):
    if system == "oscillator":
        return tuple(np.linspace(0.0, 5.0, 51))
    return tuple(np.linspace(-10.0, 50.0, 121))


def default_n_basis(system):
    return 80 if system == "oscillator" else 60


def first_state_label(system):
    return 0 if system == "oscillator" else 1


def build_system(system, n_basis, lam):
    if system == "oscillator":
        return build_harmonic_oscillator(n_basis, lam)
    if system == "box":
        return build_cosine_box(n_basis, lam)
    raise ValueError(f"unknown system {system!r}; expected one of {SYSTEMS}")


@dataclass(frozen=True)
class SweepConfig:
    system: str = "oscillator"
    partition: str = "en"
    methods: tuple = ("iterative",)
    orders: tuple = (2, 4, 6)
    lambdas: tuple | None = None
    n_basis: int | None = None
    target: int | None = None  # array slot
    model_space: tuple | None = None  # array slots
    ratio_threshold: float = 10.0
    tol: float = 1e-12
    k_max: int = 200

    def resolved(self):
        lambdas = self.lambdas
        if lambdas is None:
            lambdas = default_lambda_grid(self.system)
        n_basis = self.n_basis or default_n_basis(self.system)
        target = 0 if self.target is None else self.target
        return lambdas, n_basis, target


@dataclass
class SweepRow:
    lam: float
    system: str
    partition: str
    method: str
    order_or_k: int
    energy: float | None = None
    reference: float | None = None
    abs_error: float | None = None
    rel_error: float | None = None
    iterations: int | None = None
    wall_time_ns: int = 0
    error: str = ""


def _validate(cfg: SweepConfig):
    if cfg.system not in SYSTEMS:
        raise ValueError(f"unknown system {cfg.system!r}; expected one of {SYSTEMS}")
    if cfg.partition not in PARTITIONS:
        raise ValueError(
            f"unknown partition {cfg.partition!r}; expected one of {PARTITIONS}"
        )
    for m in cfg.methods:
        if m not in METHODS:
            raise ValueError(f"unknown method {m!r}; expected one of {METHODS}")
    for k in cfg.orders:
        if int(k) < 2:
            raise ValueError(f"orders must be >= 2, got {k}")
    lambdas, n_basis, target = cfg.resolved()
    if not lambdas:
        raise ValueError("empty strength grid")
    if target < 0 or target >= n_basis:
        raise ValueError(f"target slot {target} outside basis of size {n_basis}")
    if cfg.model_space is not None:
        for i in cfg.model_space:
            if i < 0 or i >= n_basis:
                raise ValueError(f"model-space slot {i} outside basis of {n_basis}")


def _model_space(cfg, p, target):
    if cfg.model_space is not None:
        return tuple(sorted(set(cfg.model_space)))
    return quasidegen.select_model_space(p, target, cfg.ratio_threshold)


def _solve(cfg, p, method, k, target):
    """Returns (energy, iterations-or-None); raises on row failure."""
    if method == "iterative":
        trace = nondegen.iterative_pt(p, target, k_max=k - 1, tol=0.0)
        return trace.energy(k), trace.iterations_used
    if method == "rspt":
        series = nondegen.rspt(p, target, order=k)
        return series.energy, None
    if method == "bwpt_sc":
        energy = nondegen.bwpt(
            p, target, k,
            strategy=nondegen.SELF_CONSISTENT,
            evaluator=nondegen.MATVEC,
            tol=cfg.tol,
            max_iter=cfg.k_max,
        )
        return energy, None
    if method == "bwpt_prior":
        energy = nondegen.bwpt(
            p, target, k,
            strategy=nondegen.PRIOR_ORDER,
            evaluator=nondegen.MATVEC,
        )
        return energy, k - 1
    if method in ("qd_second", "qd_iterative"):
        space = _model_space(cfg, p, target)
        setup = quasidegen.build_model_space(p, space, target)
        if method == "qd_second":
            return quasidegen.qd_second_order(setup), None
        trace = quasidegen.qd_iterate(setup, k_max=k - 1, tol=0.0)
        return trace.energy(k), trace.iterations_used
    raise ValueError(f"unknown method {method!r}")


def run_sweep(cfg: SweepConfig):
    """One row per (strength, method, order); qd_second emits one row per strength."""
    _validate(cfg)
    lambdas, n_basis, target = cfg.resolved()
    scheme = _SCHEME_BY_NAME[cfg.partition]
    rows = []
    for lam in lambdas:
        lam = float(lam)
        sys = build_system(cfg.system, n_basis, lam)
        p = partition(sys, scheme)
        ref = reference_energy(sys, target)
        for method in cfg.methods:
            orders = (2,) if method == "qd_second" else tuple(int(k) for k in cfg.orders)
            for k in orders:
                row = SweepRow(
                    lam=lam,
                    system=cfg.system,
                    partition=cfg.partition,
                    method=method,
                    order_or_k=k,
                )
                t0 = time.perf_counter_ns()
                try:
                    energy, iterations = _solve(cfg, p, method, k, target)
                except (EnptError, ValueError) as exc:
                    row.error = str(exc)
                else:
                    row.energy = energy
                    row.reference = ref
                    row.abs_error = abs(energy - ref)
                    if abs(ref) > _ZERO_REFERENCE:
                        row.rel_error = row.abs_error / abs(ref)
                    row.iterations = iterations
                row.wall_time_ns = time.perf_counter_ns() - t0
                rows.append(row)
    return rows


@dataclass
class LevelRow:
    lam: float
    n: int  # state label (1-based for the box)
    energy: float


def run_levels(lambdas, n_levels=4, n_basis=60):
    """Dense-diagonalization levels of the box for each strength."""
    if n_levels < 1:
        raise ValueError(f"n_levels must be positive, got {n_levels}")
    if n_levels > n_basis:
        raise ValueError(f"cannot report {n_levels} levels from a basis of {n_basis}")
    rows = []
    for lam in lambdas:
        lam = float(lam)
        sys = build_cosine_box(n_basis, lam)
        spec = dense_eigensolve(sys.e0, lam * sys.v, keep_vectors=False)
        for i in range(n_levels):
            rows.append(LevelRow(lam, i + 1, float(spec.eigenvalues[i])))
    return rows


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def write_sweep_csv(rows, fh):
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(SWEEP_HEADER.split(","))
    for r in rows:
        writer.writerow([
            _fmt(r.lam), r.system, r.partition, r.method, _fmt(r.order_or_k),
            _fmt(r.energy), _fmt(r.reference), _fmt(r.abs_error), _fmt(r.rel_error),
            _fmt(r.iterations), _fmt(r.wall_time_ns), r.error,
        ])


def read_sweep_csv(fh):
    reader = csv.reader(fh)
    header = next(reader)
    if header != SWEEP_HEADER.split(","):
        raise ValueError(f"unexpected sweep header: {header}")
    rows = []
    for rec in reader:
        (lam, system, part, method, k, energy, ref, abs_e, rel_e,
         iters, wall, error) = rec
        rows.append(SweepRow(
            lam=float(lam),
            system=system,
            partition=part,
            method=method,
            order_or_k=int(k),
            energy=float(energy) if energy else None,
            reference=float(ref) if ref else None,
            abs_error=float(abs_e) if abs_e else None,
            rel_error=float(rel_e) if rel_e else None,
            iterations=int(iters) if iters else None,
            wall_time_ns=int(wall) if wall else 0,
            error=error,
        ))
    return rows


def write_levels_csv(rows, fh):
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(LEVELS_HEADER.split(","))
    for r in rows:
        writer.writerow([_fmt(r.lam), _fmt(r.n), _fmt(r.energy)])
