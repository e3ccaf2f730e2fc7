"""Truncated-basis model systems: zeroth-order spectra plus coupling matrices.

Two one-dimensional systems are supported, both in dimensionless units
(hbar = mass = omega = box length = 1):

* ``oscillator``  -- harmonic oscillator with an extra x^2/2 coupling term;
  states labelled 0, 1, 2, ...
* ``cosine_box``  -- infinite well on [-1/2, 1/2] with a cos(pi*x) coupling;
  states labelled 1, 2, 3, ...

Array slot ``i`` always holds the state with label ``i + first_index``.
A panel-refined Gauss-Legendre quadrature of the defining integrals is
provided as an independent check on the closed-form matrix elements.
"""

from dataclasses import dataclass

import numpy as np

from .errors import QuadratureError

OSCILLATOR = "oscillator"
COSINE_BOX = "cosine_box"

_KINDS = (OSCILLATOR, COSINE_BOX)

# Gaussian tail of the highest retained oscillator state is < 1e-30 here.
_OSC_DOMAIN = 12.0


@dataclass(frozen=True)
class ModelSystem:
    """Zeroth-order energies and the coupling matrix in that basis.

    ``v`` holds the bare matrix elements of the coupling operator; the
    strength ``lam`` is kept separate so partitioning can fold it in.
    """

    kind: str
    n_basis: int
    e0: np.ndarray
    v: np.ndarray
    lam: float

    @property
    def first_index(self):
        """State label stored in array slot 0."""
        return 1 if self.kind == COSINE_BOX else 0

    def hamiltonian(self):
        """Dense truncated Hamiltonian diag(e0) + lam * v."""
        return np.diag(self.e0) + self.lam * self.v


def _freeze(sys):
    sys.e0.setflags(write=False)
    sys.v.setflags(write=False)
    return sys


def build_harmonic_oscillator(n_basis, lam=1.0):
    """Oscillator with coupling x^2/2 in its own eigenbasis.

    Zeroth-order energies are m + 1/2.  The coupling matrix is
    tridiagonal in steps of two: diagonal (2m+1)/4 and
    sqrt((m+1)(m+2))/4 two slots off the diagonal.

    Requires n_basis >= 4 and lam > -1 (the perturbed spectrum is real
    only for lam > -1).
    """
    if n_basis < 4:
        raise ValueError(f"n_basis must be at least 4, got {n_basis}")
    if lam <= -1.0:
        raise ValueError(f"lam must exceed -1, got {lam}")
    m = np.arange(n_basis)
    e0 = m + 0.5
    v = np.zeros((n_basis, n_basis))
    np.fill_diagonal(v, (2 * m + 1) / 4.0)
    i = np.arange(n_basis - 2)
    v[i, i + 2] = np.sqrt((i + 1) * (i + 2)) / 4.0
    v[i + 2, i] = v[i, i + 2]
    return _freeze(ModelSystem(OSCILLATOR, n_basis, e0, v, float(lam)))


def build_cosine_box(n_basis, lam=1.0):
    """Infinite well on [-1/2, 1/2] with coupling cos(pi*x).

    States are labelled from 1 (slot i holds state i+1), with zeroth-order
    energies n^2 pi^2 / 2.  In the shifted coordinate u = x + 1/2 the
    coupling element is 2 * int_0^1 sin(m pi u) sin(n pi u) sin(pi u) du,
    which vanishes for odd m+n and otherwise equals
    (2/pi) * (1/(1-(m-n)^2) - 1/(1-(m+n)^2)).
    """
    if n_basis < 4:
        raise ValueError(f"n_basis must be at least 4, got {n_basis}")
    q = np.arange(1, n_basis + 1)
    e0 = q.astype(float) ** 2 * np.pi**2 / 2.0
    qq, rr = np.meshgrid(q, q, indexing="ij")
    tot = qq + rr
    dif = qq - rr
    v = np.zeros((n_basis, n_basis))
    even = tot % 2 == 0
    v[even] = (2.0 / np.pi) * (
        1.0 / (1 - dif[even] ** 2) - 1.0 / (1 - tot[even] ** 2)
    )
    return _freeze(ModelSystem(COSINE_BOX, n_basis, e0, v, float(lam)))


def _oscillator_wavefunction(k, x):
    """Normalized oscillator eigenfunction via the stable two-term recurrence."""
    h_prev = np.pi**-0.25 * np.exp(-0.5 * x**2)
    if k == 0:
        return h_prev
    h = np.sqrt(2.0) * x * h_prev
    for j in range(2, k + 1):
        h, h_prev = np.sqrt(2.0 / j) * x * h - np.sqrt((j - 1) / j) * h_prev, h
    return h


def _box_wavefunction(k, x):
    return np.sqrt(2.0) * np.sin(k * np.pi * (x + 0.5))


_GAUSS_ORDER = 24
_GAUSS_NODES, _GAUSS_WEIGHTS = np.polynomial.legendre.leggauss(_GAUSS_ORDER)


def _panel_gauss(f, a, b, abs_tol=1e-13, max_panels=4096):
    """Fixed-order Gauss-Legendre with panel doubling until estimates settle."""
    prev = None
    panels = 2
    while panels <= max_panels:
        edges = np.linspace(a, b, panels + 1)
        mid = 0.5 * (edges[:-1] + edges[1:])
        half = 0.5 * (edges[1:] - edges[:-1])
        x = mid[:, None] + half[:, None] * _GAUSS_NODES[None, :]
        val = float(np.sum(half[:, None] * _GAUSS_WEIGHTS[None, :] * f(x)))
        if prev is not None and abs(val - prev) < abs_tol:
            return val
        prev = val
        panels *= 2
    raise QuadratureError(
        f"quadrature did not settle below {abs_tol:.1e} within {max_panels} panels"
    )


def quadrature_matrix_element(kind, m, n):
    """Coupling matrix element <m|V|n> by direct numerical integration.

    Independent of the closed forms used by the builders; absolute error
    is below 1e-12 for the state labels of interest (<= a few tens).
    """
    if kind == OSCILLATOR:
        if m < 0 or n < 0:
            raise ValueError("oscillator labels start at 0")
        f = lambda x: (
            _oscillator_wavefunction(m, x)
            * 0.5 * x**2
            * _oscillator_wavefunction(n, x)
        )
        return _panel_gauss(f, -_OSC_DOMAIN, _OSC_DOMAIN)
    if kind == COSINE_BOX:
        if m < 1 or n < 1:
            raise ValueError("box labels start at 1")
        f = lambda x: (
            _box_wavefunction(m, x) * np.cos(np.pi * x) * _box_wavefunction(n, x)
        )
        return _panel_gauss(f, -0.5, 0.5)
    raise ValueError(f"unknown system kind {kind!r}; expected one of {_KINDS}")
