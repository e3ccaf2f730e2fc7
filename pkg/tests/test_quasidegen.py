"""Model-space construction and the quasi-degenerate recursion."""

import numpy as np
import pytest

from enpt import (
    EPSTEIN_NESBET,
    STANDARD,
    PartitionedSystem,
    SmallDenominatorError,
    TargetAmbiguousError,
    build_cosine_box,
    build_harmonic_oscillator,
    build_model_space,
    dense_eigensolve,
    iterative_pt,
    partition,
    qd_iterate,
    qd_second_order,
    select_model_space,
)


def en_oscillator(n_basis=40, lam=1.0):
    return partition(build_harmonic_oscillator(n_basis, lam), EPSTEIN_NESBET)


def analytic_two_state():
    """Closed-form diagonalization of the {0,2} block at unit strength."""
    energy = 2.25 - np.sqrt(2.375)
    w02 = np.sqrt(2.0) / 4.0
    col = np.array([w02, energy - 0.75])
    col /= np.linalg.norm(col)
    return energy, col


def test_model_space_block_diagonalization():
    setup = build_model_space(en_oscillator(), (0, 2), 0)
    energy, col = analytic_two_state()
    assert setup.script_e[0] == pytest.approx(energy, abs=1e-13)
    assert setup.script_e[1] == pytest.approx(4.5 - energy, abs=1e-13)
    assert setup.script_e[0] == pytest.approx(0.7088965, abs=1e-7)
    assert setup.script_e[1] == pytest.approx(3.7911035, abs=1e-7)
    assert np.allclose(setup.rotation[:, 0], col, atol=1e-12)
    assert np.allclose(setup.rotation[:, 0], [0.993310, -0.115477], atol=1e-5)
    assert setup.n_local == 0


def test_model_space_invariants():
    p = en_oscillator()
    setup = build_model_space(p, (0, 2), 0)
    r = setup.rotation
    assert np.max(np.abs(r.T @ r - np.eye(2))) < 1e-12
    block = p.hamiltonian()[np.ix_([0, 2], [0, 2])]
    diag = r.T @ block @ r
    assert np.max(np.abs(diag - np.diag(setup.script_e))) < 1e-12
    # no direct mixing left among the rotated states
    assert abs(diag[0, 1]) < 1e-12


def test_transformed_coupling_value():
    setup = build_model_space(en_oscillator(), (0, 2), 0)
    _, col = analytic_two_state()
    slot4 = setup.complement.index(4)
    expected = col[1] * np.sqrt(12.0) / 4.0
    assert setup.vbar[0, slot4] == pytest.approx(expected, abs=1e-12)
    assert setup.vbar[0, slot4] == pytest.approx(-0.1000074, abs=1e-5)


def test_singleton_model_space_is_trivial():
    p = en_oscillator()
    setup = build_model_space(p, (3,), 3)
    assert setup.rotation.shape == (1, 1)
    assert setup.rotation[0, 0] == 1.0
    assert setup.script_e[0] == p.d[3]
    expected = np.delete(p.w[3], 3)
    assert np.array_equal(setup.vbar[0], expected)


def test_qd_second_order_value():
    setup = build_model_space(en_oscillator(), (0, 2), 0)
    assert qd_second_order(setup) == pytest.approx(0.7072409, abs=1e-6)
    # hand arithmetic over the only coupled complement state
    energy, col = analytic_two_state()
    vbar04 = col[1] * np.sqrt(12.0) / 4.0
    expected = energy + vbar04**2 / (energy - 6.75)
    assert qd_second_order(setup) == pytest.approx(expected, abs=1e-13)


def test_qd_second_order_zero_strength():
    sys = build_cosine_box(12, 0.0)
    p = partition(sys, EPSTEIN_NESBET)
    setup = build_model_space(p, (0, 2), 0)
    assert qd_second_order(setup) == sys.e0[0]


def test_qd_second_order_singleton_equals_iterate2():
    p = en_oscillator(lam=2.0)
    setup = build_model_space(p, (1,), 1)
    trace = iterative_pt(p, 1, k_max=1, tol=0.0)
    assert qd_second_order(setup) == pytest.approx(trace.energy(2), abs=1e-13)


def test_qd_iterate_second_order_consistency():
    setup = build_model_space(en_oscillator(), (0, 2), 0)
    trace = qd_iterate(setup, k_max=1, tol=0.0)
    assert trace.energy(1) == setup.script_e[0]
    assert trace.energy(2) == pytest.approx(qd_second_order(setup), abs=1e-13)


def test_qd_iterate_converges_to_eigenvalue():
    p = en_oscillator(n_basis=80, lam=1.0)
    setup = build_model_space(p, (0, 2), 0)
    trace = qd_iterate(setup, k_max=300, tol=1e-13)
    assert trace.converged
    assert trace.residual_norm < 1e-8
    spec = dense_eigensolve(p.d, p.w, keep_vectors=False)
    assert np.min(np.abs(spec.eigenvalues - trace.energies[-1])) < 1e-8


def test_qd_singleton_reduces_to_nondegenerate_trace():
    rng = np.random.default_rng(2024)
    for _ in range(6):
        if rng.uniform() < 0.5:
            sys = build_harmonic_oscillator(24, float(rng.uniform(-0.9, 5.0)))
        else:
            sys = build_cosine_box(24, float(rng.uniform(-5.0, 20.0)))
        n = int(rng.integers(0, 6))
        p = partition(sys, EPSTEIN_NESBET)
        setup = build_model_space(p, (n,), n)
        qd = qd_iterate(setup, k_max=12, tol=0.0)
        plain = iterative_pt(p, n, k_max=12, tol=0.0)
        assert len(qd.energies) == len(plain.energies)
        for a, b in zip(qd.energies, plain.energies):
            assert a == pytest.approx(b, abs=1e-13)


def test_select_model_space_examples():
    p = en_oscillator(lam=0.1)
    assert select_model_space(p, 0, 10.0) == (0,)
    pb = partition(build_cosine_box(60, 40.0), EPSTEIN_NESBET)
    picked = select_model_space(pb, 0, 10.0)
    assert 2 in picked  # slot 2 holds box state 3
    sys0 = build_cosine_box(20, 0.0)
    p0 = partition(sys0, EPSTEIN_NESBET)
    assert select_model_space(p0, 4, 10.0) == (4,)


def test_select_model_space_validation():
    p = en_oscillator()
    with pytest.raises(ValueError):
        select_model_space(p, 0, 1.0)
    with pytest.raises(ValueError):
        select_model_space(p, 99, 10.0)


def test_standard_scheme_rejected():
    p = partition(build_harmonic_oscillator(10, 1.0), STANDARD)
    with pytest.raises(ValueError):
        build_model_space(p, (0, 2), 0)


def test_target_ambiguity_detected():
    # equal diagonals with symmetric coupling split 50/50 over both columns
    d = np.array([1.0, 1.0, 5.0, 7.0])
    w = np.zeros((4, 4))
    w[0, 1] = w[1, 0] = 0.3
    w[0, 2] = w[2, 0] = 0.1
    p = PartitionedSystem(EPSTEIN_NESBET, d, w, 1.0, 4)
    with pytest.raises(TargetAmbiguousError):
        build_model_space(p, (0, 1), 0)


def test_model_space_validation():
    p = en_oscillator()
    with pytest.raises(ValueError):
        build_model_space(p, (0, 2), 1)
    with pytest.raises(ValueError):
        build_model_space(p, (0, 0, 2), 0)
    with pytest.raises(ValueError):
        build_model_space(p, tuple(range(p.n_basis)), 0)
    with pytest.raises(ValueError):
        build_model_space(p, (), 0)


def test_qd_small_denominator_raised():
    # complement state parked right at the rotated reference energy
    d = np.array([0.75, 3.75, 0.7088964992577])
    w = np.zeros((3, 3))
    w[0, 1] = w[1, 0] = np.sqrt(2.0) / 4.0
    w[0, 2] = w[2, 0] = 0.2
    p = PartitionedSystem(EPSTEIN_NESBET, d, w, 1.0, 3)
    setup = build_model_space(p, (0, 1), 0)
    with pytest.raises(SmallDenominatorError):
        qd_second_order(setup)
