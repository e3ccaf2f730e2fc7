"""Quasi-degenerate treatment: diagonalize a small model space exactly,
rotate the couplings, then iterate against the remaining states.

When several diagonal energies sit close together the nondegenerate
denominators blow up; the cure is to pick those states as a model space,
diagonalize that block to get rotated reference states with no direct
mixing among them, and run the same style of iteration with the
transformed couplings.  Only Epstein-Nesbet partitioning is accepted:
the construction relies on the couplings having no diagonal part.
"""

from dataclasses import dataclass

import numpy as np

from .errors import SmallDenominatorError, TargetAmbiguousError
from .partition import EPSTEIN_NESBET, PartitionedSystem
from .reference import jacobi_eigh

_TIE_TOL = 1e-9


@dataclass(frozen=True)
class QdSetup:
    """Rotated model space ready for iteration.

    rotation columns are the block eigenvectors (ascending eigenvalue
    order, dominant component made nonnegative); script_e are the block
    eigenvalues; vbar[j, m] couples rotated state j to complement slot m
    with the strength already folded in; n_local is the rotated column
    that carries the target state.
    """

    indices: tuple
    rotation: np.ndarray
    script_e: np.ndarray
    vbar: np.ndarray
    complement: tuple
    n_local: int
    part: PartitionedSystem


@dataclass(frozen=True)
class QdIterationTrace:
    energies: tuple
    outer_coeffs: np.ndarray
    inner_coeffs: np.ndarray
    converged: bool
    iterations_used: int
    residual_norm: float

    def energy(self, k):
        if k < 1 or k > len(self.energies):
            raise IndexError(f"order {k} not recorded (have 1..{len(self.energies)})")
        return self.energies[k - 1]


def build_model_space(p: PartitionedSystem, indices, target):
    """Diagonalize the block spanned by `indices` and rotate the couplings."""
    if p.scheme != EPSTEIN_NESBET:
        raise ValueError(
            "model-space construction requires Epstein-Nesbet partitioning"
        )
    idx = tuple(sorted(set(int(i) for i in indices)))
    if len(idx) != len(tuple(indices)):
        raise ValueError(f"model-space indices must be unique, got {indices}")
    if not idx:
        raise ValueError("model space must contain at least one state")
    if any(i < 0 or i >= p.n_basis for i in idx):
        raise ValueError(f"model-space indices {idx} outside basis of {p.n_basis}")
    if len(idx) >= p.n_basis:
        raise ValueError("model space must leave a nonempty complement")
    if target not in idx:
        raise ValueError(f"target {target} not in model space {idx}")

    block = p.hamiltonian()[np.ix_(idx, idx)]
    evals, vecs = jacobi_eigh(block)
    for j in range(len(idx)):
        dom = int(np.argmax(np.abs(vecs[:, j])))
        if vecs[dom, j] < 0:
            vecs[:, j] = -vecs[:, j]

    t_pos = idx.index(target)
    scores = np.abs(vecs[t_pos, :])
    if len(idx) > 1:
        top = np.sort(scores)[::-1]
        if top[0] - top[1] < _TIE_TOL:
            raise TargetAmbiguousError(
                f"columns tie on the target-{target} coefficient "
                f"({top[0]:.12f} vs {top[1]:.12f})"
            )
    n_local = int(np.argmax(scores))

    complement = tuple(m for m in range(p.n_basis) if m not in idx)
    vbar = vecs.T @ p.w[np.ix_(idx, complement)]
    vecs.setflags(write=False)
    evals.setflags(write=False)
    vbar.setflags(write=False)
    return QdSetup(idx, vecs, evals, vbar, complement, n_local, p)


def qd_second_order(setup: QdSetup):
    """Closed second-order energy from the rotated reference state.

    The couplings stored in the setup already carry the strength, so no
    further power of it appears here; at zero strength this collapses to
    the zeroth-order energy of the target state.
    """
    p = setup.part
    guard = p.denominator_guard()
    e_ref = float(setup.script_e[setup.n_local])
    d_comp = p.d[list(setup.complement)]
    gaps = e_ref - d_comp
    worst = int(np.argmin(np.abs(gaps)))
    if abs(gaps[worst]) < guard:
        raise SmallDenominatorError(
            setup.indices[setup.n_local], setup.complement[worst],
            abs(gaps[worst]), guard,
        )
    row = setup.vbar[setup.n_local]
    return e_ref + float(np.sum(row * row / gaps))


def qd_iterate(setup: QdSetup, k_max=200, tol=1e-12):
    """Three-step recursion over complement and model-space amplitudes.

    Per cycle, with the current energy in the denominators: complement
    amplitudes from the rotated couplings plus the complement block,
    model-space amplitudes from the rotated couplings against the
    previous complement amplitudes, then the energy update.  Both
    amplitude updates consume the previous cycle's amplitudes, so the
    first cycle reproduces the closed second-order energy.
    """
    if k_max < 1:
        raise ValueError(f"k_max must be positive, got {k_max}")
    p = setup.part
    guard = p.denominator_guard()
    comp = list(setup.complement)
    d_comp = p.d[comp]
    w_cc = p.w[np.ix_(comp, comp)]
    vb = setup.vbar
    n_loc = setup.n_local
    d_model = len(setup.indices)
    mask_in = np.ones(d_model, dtype=bool)
    mask_in[n_loc] = False

    c_out = np.zeros(len(comp))
    c_in = np.zeros(d_model)
    c_in[n_loc] = 1.0
    energy = float(setup.script_e[n_loc])
    energies = [energy]
    converged = False
    iterations = 0
    for _ in range(k_max):
        gaps_out = energy - d_comp
        worst = int(np.argmin(np.abs(gaps_out)))
        if abs(gaps_out[worst]) < guard:
            raise SmallDenominatorError(
                setup.indices[n_loc], comp[worst], abs(gaps_out[worst]), guard
            )
        gaps_in = energy - setup.script_e
        if d_model > 1:
            worst_in = int(np.argmin(np.abs(gaps_in[mask_in])))
            worst_in = np.flatnonzero(mask_in)[worst_in]
            if abs(gaps_in[worst_in]) < guard:
                raise SmallDenominatorError(
                    setup.indices[n_loc], setup.indices[worst_in],
                    abs(gaps_in[worst_in]), guard,
                )
        rhs_out = vb.T @ c_in + w_cc @ c_out
        rhs_in = vb @ c_out
        c_out = rhs_out / gaps_out
        new_in = np.zeros(d_model)
        new_in[n_loc] = 1.0
        new_in[mask_in] = rhs_in[mask_in] / gaps_in[mask_in]
        c_in = new_in
        new = float(setup.script_e[n_loc]) + float(vb[n_loc] @ c_out)
        energies.append(new)
        iterations += 1
        if abs(new - energy) < tol:
            energy = new
            converged = True
            break
        energy = new

    resid = _qd_residual(setup, c_in, c_out, energy)
    return QdIterationTrace(
        energies=tuple(energies),
        outer_coeffs=c_out,
        inner_coeffs=np.delete(c_in, n_loc),
        converged=converged,
        iterations_used=iterations,
        residual_norm=resid,
    )


def _qd_residual(setup, c_in, c_out, energy):
    """Residual of the assembled amplitude vector in the original basis."""
    p = setup.part
    full = np.zeros(p.n_basis)
    full[list(setup.indices)] = setup.rotation @ c_in
    full[list(setup.complement)] = c_out
    r = p.d * full + p.w @ full - energy * full
    return float(np.linalg.norm(r))


def select_model_space(p: PartitionedSystem, n, ratio_threshold=10.0):
    """States whose gap to the target is not safely larger than the coupling.

    Returns {n} plus every m with |d_m - d_n| < ratio_threshold * |w_nm|,
    using the diagonal energy as the stand-in for the perturbed energy.
    """
    if ratio_threshold <= 1.0:
        raise ValueError(f"ratio_threshold must exceed 1, got {ratio_threshold}")
    if n < 0 or n >= p.n_basis:
        raise ValueError(f"slot {n} outside basis of size {p.n_basis}")
    gaps = np.abs(p.d - p.d[n])
    couplings = ratio_threshold * np.abs(p.w[:, n])
    picked = set(np.flatnonzero(gaps < couplings).tolist())
    picked.add(int(n))
    return tuple(sorted(picked))
