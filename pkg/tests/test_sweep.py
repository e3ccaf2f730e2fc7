"""Sweep engine: row values, CSV round-trip, determinism, level diagrams."""

import io

import numpy as np
import pytest

from enpt.sweep import (
    LEVELS_HEADER,
    SWEEP_HEADER,
    SweepConfig,
    read_sweep_csv,
    run_levels,
    run_sweep,
    write_levels_csv,
    write_sweep_csv,
)


def test_sweep_iterative_order2_row():
    cfg = SweepConfig(methods=("iterative",), orders=(2,), lambdas=(1.0,))
    rows = run_sweep(cfg)
    assert len(rows) == 1
    r = rows[0]
    assert r.error == ""
    assert r.energy == pytest.approx(0.70833333, abs=1e-8)
    assert r.reference == pytest.approx(np.sqrt(2.0) / 2.0, rel=1e-15)
    assert r.rel_error == pytest.approx(1.735e-3, abs=1e-6)
    assert r.iterations == 1


def test_sweep_zero_strength_all_methods_exact():
    cfg = SweepConfig(
        system="box",
        methods=("iterative", "rspt", "bwpt_sc", "bwpt_prior", "qd_iterative", "qd_second"),
        orders=(2, 3),
        lambdas=(0.0,),
        n_basis=16,
    )
    rows = run_sweep(cfg)
    assert all(r.error == "" for r in rows)
    assert all(r.rel_error == 0.0 for r in rows)
    assert all(r.abs_error == 0.0 for r in rows)


def test_sweep_standard_partition_rspt_row():
    cfg = SweepConfig(
        partition="standard", methods=("rspt",), orders=(2,), lambdas=(2.0,)
    )
    rows = run_sweep(cfg)
    r = rows[0]
    assert r.energy == pytest.approx(0.75, abs=1e-12)
    assert r.rel_error == pytest.approx(1.340e-1, abs=1e-4)


def test_sweep_row_error_recorded_not_raised():
    # unsupported order for rspt fails that row only
    cfg = SweepConfig(methods=("rspt", "iterative"), orders=(6,), lambdas=(1.0,))
    rows = run_sweep(cfg)
    assert len(rows) == 2
    by_method = {r.method: r for r in rows}
    assert by_method["rspt"].error != ""
    assert by_method["rspt"].energy is None
    assert by_method["iterative"].error == ""


def test_sweep_qd_methods_use_model_space():
    cfg = SweepConfig(
        methods=("qd_second",), orders=(2,), lambdas=(1.0,), model_space=(0, 2)
    )
    rows = run_sweep(cfg)
    assert rows[0].energy == pytest.approx(0.7072409, abs=1e-6)


def test_sweep_qd_under_standard_partition_fails_rows():
    cfg = SweepConfig(
        partition="standard", methods=("qd_second",), orders=(2,),
        lambdas=(1.0, 2.0), model_space=(0, 2),
    )
    rows = run_sweep(cfg)
    assert rows and all(r.error != "" for r in rows)


def test_sweep_monotone_accuracy_in_even_orders():
    cfg = SweepConfig(methods=("iterative",), orders=(2, 4, 6), lambdas=(1.0,))
    rows = {r.order_or_k: r for r in run_sweep(cfg)}
    assert rows[6].rel_error < rows[4].rel_error < rows[2].rel_error


def test_sweep_determinism_excluding_timing():
    cfg = SweepConfig(
        system="box", methods=("iterative", "rspt"), orders=(2, 3),
        lambdas=tuple(np.linspace(-2.0, 8.0, 5)), n_basis=20,
    )
    a = run_sweep(cfg)
    b = run_sweep(cfg)
    for ra, rb in zip(a, b):
        assert (ra.lam, ra.method, ra.order_or_k) == (rb.lam, rb.method, rb.order_or_k)
        assert ra.energy == rb.energy
        assert ra.reference == rb.reference
        assert ra.abs_error == rb.abs_error
        assert ra.rel_error == rb.rel_error
        assert ra.iterations == rb.iterations
        assert ra.error == rb.error


def test_csv_header_and_round_trip():
    cfg = SweepConfig(
        methods=("iterative", "rspt"), orders=(2, 4), lambdas=(0.0, 1.0, 2.5),
        n_basis=20,
    )
    rows = run_sweep(cfg)
    buf = io.StringIO()
    write_sweep_csv(rows, buf)
    text = buf.getvalue()
    assert text.splitlines()[0] == SWEEP_HEADER
    parsed = read_sweep_csv(io.StringIO(text))
    assert len(parsed) == len(rows)
    for orig, back in zip(rows, parsed):
        assert back.lam == orig.lam
        assert back.method == orig.method
        assert back.order_or_k == orig.order_or_k
        assert back.energy == orig.energy  # 17 significant digits round-trip
        assert back.reference == orig.reference
        assert back.abs_error == orig.abs_error
        assert back.rel_error == orig.rel_error
        assert back.iterations == orig.iterations
        assert back.error == orig.error


def test_csv_blank_rel_error_near_zero_reference():
    from enpt.sweep import SweepRow

    row = SweepRow(
        lam=1.0, system="box", partition="en", method="iterative", order_or_k=2,
        energy=1e-13, reference=5e-13, abs_error=4e-13, rel_error=None,
        iterations=1, wall_time_ns=10,
    )
    buf = io.StringIO()
    write_sweep_csv([row], buf)
    fields = buf.getvalue().splitlines()[1].split(",")
    assert fields[8] == ""  # rel_error column
    parsed = read_sweep_csv(io.StringIO(buf.getvalue()))
    assert parsed[0].rel_error is None


def test_sweep_config_validation():
    with pytest.raises(ValueError):
        run_sweep(SweepConfig(system="ring"))
    with pytest.raises(ValueError):
        run_sweep(SweepConfig(methods=("variational",), lambdas=(1.0,)))
    with pytest.raises(ValueError):
        run_sweep(SweepConfig(orders=(1,), lambdas=(1.0,)))
    with pytest.raises(ValueError):
        run_sweep(SweepConfig(lambdas=(1.0,), target=500))


def test_levels_zero_strength():
    rows = run_levels((0.0,), n_levels=4, n_basis=24)
    expected = np.arange(1, 5) ** 2 * np.pi**2 / 2.0
    assert [r.n for r in rows] == [1, 2, 3, 4]
    for r, e in zip(rows, expected):
        assert r.energy == pytest.approx(e, rel=1e-12)


def test_levels_ground_state_crosses_zero_at_negative_strength():
    rows = run_levels(tuple(np.linspace(-10.0, 0.0, 11)), n_levels=1, n_basis=30)
    energies = [r.energy for r in rows]
    assert min(energies) < 0.0 < max(energies)


def test_levels_near_degenerate_pair_tightens():
    rows = run_levels((40.0,), n_levels=3, n_basis=60)
    e1, e2, e3 = (r.energy for r in rows)
    assert (e2 - e1) < 0.3 * (e3 - e1)


def test_levels_csv_format():
    rows = run_levels((0.0, 1.0), n_levels=2, n_basis=16)
    buf = io.StringIO()
    write_levels_csv(rows, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == LEVELS_HEADER
    assert len(lines) == 1 + len(rows)


def test_levels_validation():
    with pytest.raises(ValueError):
        run_levels((1.0,), n_levels=0)
    with pytest.raises(ValueError):
        run_levels((1.0,), n_levels=50, n_basis=10)
