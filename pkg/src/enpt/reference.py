"""Ground-truth energies: closed forms and a dense symmetric eigensolver.

The oscillator has the closed-form spectrum sqrt(1+lam) * (n + 1/2); the
box is referenced against a full diagonalization of the truncated
Hamiltonian built in a basis twice the size of the one under test, so the
reference's own truncation error stays subdominant.

The eigensolver is a cyclic Jacobi iteration written here rather than
taken from a linear-algebra package: it is the oracle everything else is
checked against, and at the matrix sizes in play (a few hundred) its cost
is irrelevant.
"""

import functools
from dataclasses import dataclass

import numpy as np

from .errors import EigensolverError
from .systems import COSINE_BOX, OSCILLATOR, ModelSystem, build_cosine_box

CLOSED_FORM = "closed_form"
DENSE_DIAG = "dense_diag"


@dataclass(frozen=True)
class ReferenceSpectrum:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray | None
    source: str


def exact_oscillator_energy(n, lam):
    """sqrt(1 + lam) * (n + 1/2); defined for lam > -1."""
    if lam <= -1.0:
        raise ValueError(f"lam must exceed -1, got {lam}")
    if n < 0:
        raise ValueError(f"state label must be nonnegative, got {n}")
    return float(np.sqrt(1.0 + lam) * (n + 0.5))


def oscillator_reference_spectrum(count, lam):
    """Closed-form spectrum packaged like an eigensolver result."""
    vals = np.array([exact_oscillator_energy(k, lam) for k in range(count)])
    vals.setflags(write=False)
    return ReferenceSpectrum(vals, None, CLOSED_FORM)


def jacobi_eigh(a, rel_tol=1e-13, max_sweeps=100):
    """Eigenvalues and eigenvectors of a real symmetric matrix.

    Cyclic Jacobi sweeps; returns eigenvalues in ascending order and the
    matching orthonormal eigenvector columns.  Raises EigensolverError if
    the off-diagonal norm has not collapsed after max_sweeps sweeps.
    """
    a = np.array(a, dtype=float, copy=True)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("matrix must be square")
    vv = np.eye(n)
    if n == 1:
        return a.ravel().copy(), vv
    scale = float(np.linalg.norm(a))
    if scale == 0.0:
        return np.zeros(n), vv
    target = rel_tol * scale
    skip = target / n
    off = _off_norm(a)
    for _ in range(max_sweeps):
        if off <= target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= skip:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = np.sign(theta) / (abs(theta) + np.sqrt(1.0 + theta * theta))
                if theta == 0.0:
                    t = 1.0
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                app_new = a[p, p] - t * apq
                aqq_new = a[q, q] + t * apq
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                a[p, p] = app_new
                a[q, q] = aqq_new
                a[p, q] = a[q, p] = 0.0
                vp = vv[:, p].copy()
                vq = vv[:, q].copy()
                vv[:, p] = c * vp - s * vq
                vv[:, q] = s * vp + c * vq
        off = _off_norm(a)
    else:
        raise EigensolverError(max_sweeps, off)
    evals = np.diag(a).copy()
    order = np.argsort(evals, kind="stable")
    return evals[order], vv[:, order]


def _off_norm(a):
    return float(np.sqrt(2.0 * np.sum(np.triu(a, 1) ** 2)))


def dense_eigensolve(d, w, keep_vectors=True):
    """Full spectrum of diag(d) + w for real symmetric w.

    The eigen-residual ||H v - e v|| is checked against 1e-10 * ||H||
    before the result is returned.
    """
    d = np.asarray(d, dtype=float)
    w = np.asarray(w, dtype=float)
    if w.shape != (d.size, d.size):
        raise ValueError("w must be square and match the diagonal length")
    asym = float(np.max(np.abs(w - w.T))) if w.size else 0.0
    if asym > 1e-13 * (1.0 + float(np.max(np.abs(w))) if w.size else 1.0):
        raise ValueError(f"w is not symmetric (max asymmetry {asym:.3e})")
    h = np.diag(d) + w
    evals, vecs = jacobi_eigh(h)
    h_norm = float(np.linalg.norm(h))
    resid = float(np.max(np.abs(h @ vecs - vecs * evals[None, :])))
    if h_norm > 0 and resid > 1e-10 * h_norm:
        raise EigensolverError(0, resid)
    evals.setflags(write=False)
    if keep_vectors:
        vecs.setflags(write=False)
        return ReferenceSpectrum(evals, vecs, DENSE_DIAG)
    return ReferenceSpectrum(evals, None, DENSE_DIAG)


@functools.lru_cache(maxsize=256)
def _box_reference_eigenvalues(n_basis, lam):
    # reference basis doubled relative to the solver under test
    sys = build_cosine_box(2 * n_basis, lam)
    spec = dense_eigensolve(sys.e0, lam * sys.v, keep_vectors=False)
    return spec.eigenvalues


def reference_energy(sys: ModelSystem, n):
    """Ground-truth energy for array slot n of the given system."""
    if n < 0 or n >= sys.n_basis:
        raise ValueError(f"slot {n} outside basis of size {sys.n_basis}")
    if sys.kind == OSCILLATOR:
        return exact_oscillator_energy(n, sys.lam)
    if sys.kind == COSINE_BOX:
        return float(_box_reference_eigenvalues(sys.n_basis, sys.lam)[n])
    raise ValueError(f"unknown system kind {sys.kind!r}")
