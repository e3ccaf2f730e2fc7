"""Splitting of the Hamiltonian into diagonal energies plus residual coupling.

Both schemes are expressed through the same pair (d, w) so the solvers can
stay scheme-agnostic:

* ``epstein_nesbet``: d absorbs the full diagonal e0 + lam*diag(v), leaving
  w = lam*v with an exactly zero diagonal.
* ``standard``: d = e0 and w = lam*v, diagonal included.

In both cases diag(d) + w reconstructs the truncated Hamiltonian and w
carries the strength lam.
"""

from dataclasses import dataclass

import numpy as np

from .systems import ModelSystem

EPSTEIN_NESBET = "epstein_nesbet"
STANDARD = "standard"

_SCHEMES = (EPSTEIN_NESBET, STANDARD)


@dataclass(frozen=True)
class PartitionedSystem:
    scheme: str
    d: np.ndarray
    w: np.ndarray
    lam: float
    n_basis: int

    def hamiltonian(self):
        return np.diag(self.d) + self.w

    def denominator_guard(self):
        """Degeneracy guard: 1e-10 times the largest diagonal energy."""
        return 1e-10 * float(np.max(np.abs(self.d)))


def partition(sys: ModelSystem, scheme=EPSTEIN_NESBET):
    """Split a model system under the requested scheme."""
    if scheme not in _SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}; expected one of {_SCHEMES}")
    if scheme == EPSTEIN_NESBET:
        d = sys.e0 + sys.lam * np.diag(sys.v)
        w = sys.lam * sys.v
        np.fill_diagonal(w, 0.0)
    else:
        d = sys.e0.copy()
        w = sys.lam * sys.v
    d.setflags(write=False)
    w.setflags(write=False)
    return PartitionedSystem(scheme, d, w, sys.lam, sys.n_basis)
