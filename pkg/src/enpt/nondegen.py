"""Nondegenerate solvers: order-by-order RSPT, truncated-series BWPT, and
the fixed-point iteration that refreshes the energy denominators.

All three work off the partition-agnostic pair (d, w).  Conventions used
throughout: the strength lam is already folded into w; the target-state
amplitude is pinned to 1 and every other amplitude is a ratio against it;
superscript order k labels an energy correct through the k-th power of
the coupling, not the k-th correction.
"""

import time
from dataclasses import dataclass

import numpy as np

from .errors import NonConvergenceError, SmallDenominatorError
from .partition import PartitionedSystem

SELF_CONSISTENT = "self_consistent"
PRIOR_ORDER = "prior_order"

NAIVE = "naive"
MATVEC = "matvec"


@dataclass(frozen=True)
class EnergySeries:
    """Order-by-order RSPT output.

    e1 is the first-order energy (diagonal energy plus any diagonal
    coupling); e2..e4 are the corrections with the coupling strength
    already inside; cumulative holds the partial sums through orders
    2..order.
    """

    n: int
    e1: float
    e2: float
    e3: float | None
    e4: float | None
    cumulative: tuple

    @property
    def energy(self):
        return self.cumulative[-1]


@dataclass(frozen=True)
class IterationTrace:
    """Record of the denominator-refreshing iteration.

    energies[k-1] holds the order-k energy; use energy(k) for the
    1-based view.  coefficients holds the final amplitude ratios over
    the non-target states, in ascending slot order.
    """

    n: int
    energies: tuple
    coefficients: np.ndarray
    residual_norm: float
    converged: bool
    iterations_used: int
    per_iteration_ns: tuple

    def energy(self, k):
        if k < 1 or k > len(self.energies):
            raise IndexError(f"order {k} not recorded (have 1..{len(self.energies)})")
        return self.energies[k - 1]


def _check_state(p, n):
    if n < 0 or n >= p.n_basis:
        raise ValueError(f"slot {n} outside basis of size {p.n_basis}")


def _check_gaps(d, n, guard):
    gaps = np.abs(d[n] - d)
    gaps[n] = np.inf
    m = int(np.argmin(gaps))
    if gaps[m] < guard:
        raise SmallDenominatorError(n, m, gaps[m], guard)


def _rs_recursion(p, n, order):
    """Amplitude and energy corrections order by order.

    Exact relations with the target amplitude pinned to 1:

        E_n = d_n + w_nn + sum_{m != n} w_nm c_mn
        c_ln = (E_n - d_l)^{-1} sum_m w_lm c_mn        (l != n)

    Expanding both in powers of w with unperturbed-denominator
    resolvents gives

        c[k]_l = (sum_m w_lm c[k-1]_m - sum_{j=1..k-1} E[j] c[k-j]_l)
                 / (d_n - d_l)
        E[k]   = w_nn            (k = 1)
        E[k]   = sum_m w_nm c[k-1]_m                    (k >= 2)

    which reduces to the familiar Epstein-Nesbet expressions when w has
    a zero diagonal.
    """
    d, w = p.d, p.w
    guard = p.denominator_guard()
    _check_gaps(d, n, guard)
    gaps = d[n] - d
    mask = np.ones(p.n_basis, dtype=bool)
    mask[n] = False

    c0 = np.zeros(p.n_basis)
    c0[n] = 1.0
    cs = [c0]
    e_corr = [None, float(w[n, n])]  # e_corr[k] for k >= 1
    for k in range(1, order):
        rhs = w @ cs[k - 1]
        for j in range(1, k):
            rhs = rhs - e_corr[j] * cs[k - j]
        ck = np.zeros(p.n_basis)
        ck[mask] = rhs[mask] / gaps[mask]
        cs.append(ck)
        e_corr.append(float(w[n] @ ck))
    return cs, e_corr


def rspt(p: PartitionedSystem, n, order=4):
    """Rayleigh-Schrodinger energy through the requested order (2..4)."""
    _check_state(p, n)
    if order not in (2, 3, 4):
        raise ValueError(f"rspt supports orders 2..4, got {order}")
    _, e_corr = _rs_recursion(p, n, order)
    e1 = float(p.d[n]) + e_corr[1]
    cumulative = []
    total = e1
    for k in range(2, order + 1):
        total += e_corr[k]
        cumulative.append(total)
    return EnergySeries(
        n=n,
        e1=e1,
        e2=e_corr[2],
        e3=e_corr[3] if order >= 3 else None,
        e4=e_corr[4] if order >= 4 else None,
        cumulative=tuple(cumulative),
    )


def rspt_coefficients(p: PartitionedSystem, n, order=4):
    """Per-order amplitude vectors c[1]..c[order-1] (target slot zero)."""
    _check_state(p, n)
    if order not in (2, 3, 4):
        raise ValueError(f"rspt supports orders 2..4, got {order}")
    cs, _ = _rs_recursion(p, n, order)
    return cs[1:]


def _resolvent(d, n, energy, guard):
    res = np.empty(len(d))
    for m in range(len(d)):
        if m == n:
            res[m] = 0.0
            continue
        gap = energy - d[m]
        if abs(gap) < guard:
            raise SmallDenominatorError(n, m, abs(gap), guard)
        res[m] = 1.0 / gap
    return res


def bw_series_rhs(p: PartitionedSystem, n, order, energy, evaluator=MATVEC):
    """Right-hand side of the truncated self-energy series at a trial energy.

    The order-k term carries k coupling factors and k-1 resolvent factors
    evaluated at the trial energy; the series is truncated after the
    term with `order` coupling factors.

    Two interchangeable evaluators are kept: ``naive`` spells the nested
    sums out as explicit loops (order-k term costs O(N^(k-1)), which is
    the point of the cost benchmark), ``matvec`` accumulates the same
    terms with repeated matrix-vector products at O(N^2) each.
    """
    _check_state(p, n)
    if not 2 <= order <= 5:
        raise ValueError(f"bwpt supports orders 2..5, got {order}")
    if evaluator == NAIVE:
        return _bw_rhs_naive(p, n, order, energy)
    if evaluator == MATVEC:
        return _bw_rhs_matvec(p, n, order, energy)
    raise ValueError(f"unknown evaluator {evaluator!r}")


def _bw_rhs_naive(p, n, order, energy):
    guard = p.denominator_guard()
    d = p.d.tolist()
    w = p.w.tolist()
    others = [m for m in range(p.n_basis) if m != n]
    res = [0.0] * p.n_basis
    for m in others:
        gap = energy - d[m]
        if abs(gap) < guard:
            raise SmallDenominatorError(n, m, abs(gap), guard)
        res[m] = 1.0 / gap
    wn = w[n]
    total = d[n] + wn[n]
    s = 0.0
    for a in others:
        s += wn[a] * w[a][n] * res[a]
    total += s
    if order >= 3:
        s = 0.0
        for a in others:
            wa = w[a]
            fa = wn[a] * res[a]
            for b in others:
                s += fa * wa[b] * w[b][n] * res[b]
        total += s
    if order >= 4:
        s = 0.0
        for a in others:
            wa = w[a]
            fa = wn[a] * res[a]
            for b in others:
                wb = w[b]
                fb = fa * wa[b] * res[b]
                for c in others:
                    s += fb * wb[c] * w[c][n] * res[c]
        total += s
    if order >= 5:
        s = 0.0
        for a in others:
            wa = w[a]
            fa = wn[a] * res[a]
            for b in others:
                wb = w[b]
                fb = fa * wa[b] * res[b]
                for c in others:
                    wc = w[c]
                    fc = fb * wb[c] * res[c]
                    for e in others:
                        s += fc * wc[e] * w[e][n] * res[e]
        total += s
    return total


def _bw_rhs_matvec(p, n, order, energy):
    guard = p.denominator_guard()
    res = _resolvent(p.d, n, energy, guard)
    mask = np.ones(p.n_basis, dtype=bool)
    mask[n] = False
    r = res[mask]
    w_qn = p.w[mask, n]
    w_nq = p.w[n, mask]
    w_qq = p.w[np.ix_(mask, mask)]
    t = r * w_qn
    total = float(p.d[n]) + float(p.w[n, n]) + float(w_nq @ t)
    for _ in range(3, order + 1):
        t = r * (w_qq @ t)
        total += float(w_nq @ t)
    return total


def bwpt(
    p: PartitionedSystem,
    n,
    order,
    strategy=SELF_CONSISTENT,
    evaluator=NAIVE,
    tol=1e-12,
    max_iter=200,
):
    """Brillouin-Wigner energy from the series truncated at the given order.

    ``self_consistent`` solves E = rhs(E) by damped fixed-point iteration
    started at the diagonal energy, falling back to root bracketing
    between the adjacent diagonal energies; either way the root returned
    is the one that connects continuously to the unperturbed limit.
    ``prior_order`` instead chains single evaluations, feeding each order's
    result into the next truncation's right-hand side.
    """
    _check_state(p, n)
    if not 2 <= order <= 5:
        raise ValueError(f"bwpt supports orders 2..5, got {order}")
    if strategy == PRIOR_ORDER:
        energy = float(p.d[n]) + float(p.w[n, n])
        for k in range(2, order + 1):
            energy = bw_series_rhs(p, n, k, energy, evaluator)
        return energy
    if strategy != SELF_CONSISTENT:
        raise ValueError(f"unknown strategy {strategy!r}")

    energy = float(p.d[n])
    prev_delta = None
    for _ in range(max_iter):
        try:
            new = bw_series_rhs(p, n, order, energy, evaluator)
        except SmallDenominatorError:
            break
        delta = new - energy
        if abs(delta) < tol:
            return new
        if (
            prev_delta is not None
            and delta * prev_delta < 0.0
            and abs(delta) >= abs(prev_delta)
        ):
            energy = 0.5 * (energy + new)
        else:
            energy = new
        prev_delta = delta
    return _bw_bracket(p, n, order, evaluator, tol)


def _bw_bracket(p, n, order, evaluator, tol, samples=513):
    """Bisection fallback inside the gap around the diagonal energy."""
    d = p.d
    center = float(d[n])
    span = float(np.max(d) - np.min(d)) + 1.0
    below = d[d < center]
    above = d[d > center]
    lo = float(np.max(below)) if below.size else center - span
    hi = float(np.min(above)) if above.size else center + span
    pad = 1e-6 * (hi - lo)
    grid = np.linspace(lo + pad, hi - pad, samples)

    def f(energy):
        return bw_series_rhs(p, n, order, energy, evaluator) - energy

    vals = np.full(samples, np.nan)
    for i, x in enumerate(grid):
        try:
            vals[i] = f(float(x))
        except SmallDenominatorError:
            continue
    best = None
    for i in range(samples - 1):
        if np.isnan(vals[i]) or np.isnan(vals[i + 1]):
            continue
        if vals[i] == 0.0:
            return float(grid[i])
        if vals[i] * vals[i + 1] < 0.0:
            mid = 0.5 * (grid[i] + grid[i + 1])
            if best is None or abs(mid - center) < abs(best[2] - center):
                best = (float(grid[i]), float(grid[i + 1]), mid)
    if best is None:
        raise NonConvergenceError(
            f"no self-consistent root found near slot {n} at order {order}"
        )
    a, b, _ = best
    fa = f(a)
    for _ in range(200):
        mid = 0.5 * (a + b)
        fm = f(mid)
        if fm == 0.0 or (b - a) < max(tol, 1e-15 * max(1.0, abs(mid))):
            return mid
        if fa * fm < 0.0:
            b = mid
        else:
            a, fa = mid, fm
    return 0.5 * (a + b)


def iterative_pt(p: PartitionedSystem, n, k_max=200, tol=1e-12):
    """Fixed-point iteration with refreshed energy denominators.

    Starting from zero non-target amplitudes and the first-order energy,
    each cycle rebuilds the amplitudes from one matrix-vector product
    with the current energy in the denominators, then updates the energy;
    the order-k result costs k-1 such products.  Stops early once the
    energy settles within tol; running out of cycles flags
    converged=False rather than raising.
    """
    _check_state(p, n)
    if k_max < 1:
        raise ValueError(f"k_max must be positive, got {k_max}")
    d, w = p.d, p.w
    guard = p.denominator_guard()
    mask = np.ones(p.n_basis, dtype=bool)
    mask[n] = False

    c = np.zeros(p.n_basis)
    c[n] = 1.0
    energy = float(d[n]) + float(w[n, n])
    energies = [energy]
    per_iter = []
    converged = False
    iterations = 0
    for _ in range(k_max):
        t0 = time.perf_counter_ns()
        rhs = w @ c
        denom = energy - d
        gaps = np.abs(denom)
        gaps[n] = np.inf
        m_bad = int(np.argmin(gaps))
        if gaps[m_bad] < guard:
            raise SmallDenominatorError(n, m_bad, gaps[m_bad], guard)
        c[mask] = rhs[mask] / denom[mask]
        new = float(d[n]) + float(w[n] @ c)
        per_iter.append(time.perf_counter_ns() - t0)
        energies.append(new)
        iterations += 1
        if abs(new - energy) < tol:
            energy = new
            converged = True
            break
        energy = new

    coeffs = np.delete(c, n)
    resid = residual_norm(p, n, coeffs, energy)
    return IterationTrace(
        n=n,
        energies=tuple(energies),
        coefficients=coeffs,
        residual_norm=resid,
        converged=converged,
        iterations_used=iterations,
        per_iteration_ns=tuple(per_iter),
    )


def residual_norm(p: PartitionedSystem, n, coeffs, energy):
    """Euclidean norm of (H - E) c with the target amplitude pinned to 1.

    coeffs runs over the non-target slots in ascending order; zero iff
    (energy, c) is an exact eigenpair of the truncated Hamiltonian.
    """
    _check_state(p, n)
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.size != p.n_basis - 1:
        raise ValueError(
            f"expected {p.n_basis - 1} amplitudes for the non-target slots, "
            f"got {coeffs.size}"
        )
    full = np.insert(coeffs, n, 1.0)
    r = p.d * full + p.w @ full - energy * full
    return float(np.linalg.norm(r))
