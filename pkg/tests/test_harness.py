import os

import numpy as np
import pytest

from lindsim.formulas import Method
from lindsim.harness import (
    ConfigError,
    ExperimentSpec,
    SweepRecord,
    fit_order,
    load_experiment,
    resolve_model,
    run_sweep,
    table1_report,
    validate_all,
    write_sweep_csv,
)

CONFIG = """
[experiment]
model = amp_damp gamma=1.0
methods = s1_det s2_det qdrift
t = 1.0
n_grid = 4 8 16
seed = 42
outputs = {out}
"""


@pytest.fixture
def spec(tmp_path):
    path = tmp_path / "exp.ini"
    path.write_text(CONFIG.format(out=tmp_path / "out"))
    return load_experiment(path)


def test_spec_validation():
    with pytest.raises(ConfigError, match="exactly one"):
        ExperimentSpec(model="amp_damp", methods=(Method.S1_DET,), t=1.0, seed=0)
    with pytest.raises(ConfigError, match="exactly one"):
        ExperimentSpec(model="amp_damp", methods=(Method.S1_DET,), t=1.0,
                       n_grid=(4,), epsilon_grid=(0.1,), seed=0)
    with pytest.raises(ConfigError, match="monotone"):
        ExperimentSpec(model="amp_damp", methods=(Method.S1_DET,), t=1.0,
                       n_grid=(8, 4, 16), seed=0)
    with pytest.raises(ConfigError, match="positive"):
        ExperimentSpec(model="amp_damp", methods=(Method.S1_DET,), t=-1.0,
                       n_grid=(4,), seed=0)
    with pytest.raises(ConfigError, match="initial_state"):
        ExperimentSpec(model="amp_damp", methods=(Method.S1_DET,), t=1.0,
                       n_grid=(4,), seed=0, initial_state="plasma")


def test_load_experiment_and_model(spec):
    assert spec.methods == (Method.S1_DET, Method.S2_DET, Method.QDRIFT)
    assert spec.n_grid == (4, 8, 16)
    assert spec.trajectories == 1024  # default
    gen = resolve_model(spec)
    assert gen.dim == 2 and gen.m_total == 2


def test_load_experiment_errors(tmp_path):
    path = tmp_path / "bad.ini"
    path.write_text("[experiment]\nmodel = amp_damp\nmethods = warp\nt = 1\nn_grid = 4\nseed = 0\n")
    with pytest.raises(ConfigError, match="unknown method"):
        load_experiment(path)
    path.write_text("[experiment]\nmodel = amp_damp\nt = 1\nn_grid = 4\nseed = 0\n")
    with pytest.raises(ConfigError, match="missing mandatory key 'methods'"):
        load_experiment(path)
    with pytest.raises(ConfigError, match="cannot read"):
        load_experiment(tmp_path / "absent.ini")


def test_model_from_generator_file(tmp_path):
    gen_path = tmp_path / "model.gen"
    gen_path.write_text(
        "dim 2\nhamiltonian 0,0 0,0 0,0 0,0\njump\nmatrix 0,0 1,0 0,0 0,0\nrate 0.5\nend\n")
    spec = ExperimentSpec(model=f"file {gen_path}", methods=(Method.S1_DET,),
                          t=1.0, n_grid=(4,), seed=0)
    gen = resolve_model(spec)
    assert gen.terms[0][1] == 0.5


def test_run_sweep_records_and_bounds(spec):
    records = run_sweep(spec, write_files=False)
    assert len(records) == 9
    assert all(r.status == "ok" for r in records)
    for r in records:
        assert r.epsilon_empirical <= r.epsilon_bound
        assert r.trace_dist <= r.epsilon_empirical / 2 + 1e-12
        assert r.gates_cs > 0
    qd = [r for r in records if r.method == Method.QDRIFT]
    assert all(r.gates_qf == 4 * r.n for r in qd)  # (3M-2)N with M=2
    s1 = [r for r in records if r.method == Method.S1_DET]
    assert all(r.gates_qf is None for r in s1)


def test_run_sweep_error_halving_on_noncommuting_model():
    # per-doubling ratios need noncommuting terms; the damped-qubit builtins
    # have exactly commuting term superoperators and zero Trotter error
    spec = ExperimentSpec(model="random d=2 m=3 seed=7",
                          methods=(Method.S1_DET, Method.S2_DET), t=1.0,
                          n_grid=(4, 8, 16), seed=42)
    records = run_sweep(spec, write_files=False)
    by = {(r.method, r.n): r.epsilon_empirical for r in records}
    for n in (4, 8):
        assert 2.0 * 0.8 <= by[(Method.S1_DET, n)] / by[(Method.S1_DET, 2 * n)] <= 2.0 * 1.2
        assert 4.0 * 0.8 <= by[(Method.S2_DET, n)] / by[(Method.S2_DET, 2 * n)] <= 4.0 * 1.2


def test_damped_qubit_product_formulas_are_exact(spec):
    # amp_damp's commutator term and dissipator commute as superoperators,
    # so the product formulas reproduce the exact channel to solver noise
    # (the rate-weighted mixture is not a product and keeps its 1/N error)
    records = run_sweep(spec, write_files=False)
    for r in records:
        if r.method in (Method.S1_DET, Method.S2_DET):
            assert r.epsilon_empirical < 1e-8
        else:
            assert r.epsilon_empirical <= r.epsilon_bound


def test_run_sweep_writes_deterministic_csv(tmp_path):
    outs = []
    for name in ("a", "b"):
        path = tmp_path / f"{name}.ini"
        path.write_text(CONFIG.format(out=tmp_path / name))
        run_sweep(load_experiment(path))
        with open(tmp_path / name / "sweep.csv", encoding="utf-8") as fh:
            outs.append(fh.read())
        assert (tmp_path / name / "sweep_s1_det.dat").exists()
        assert (tmp_path / name / "sweep.gp").exists()

    def strip_wall_time(text):
        rows = [line.split(",") for line in text.strip().split("\n")]
        assert rows[0] == ["method", "n", "epsilon_bound", "epsilon_empirical",
                           "trace_dist", "gates_cs", "gates_qf", "status", "wall_time_ms"]
        return [row[:8] for row in rows]

    assert strip_wall_time(outs[0]) == strip_wall_time(outs[1])
    assert "\r" not in outs[0]


def test_run_sweep_epsilon_grid(tmp_path):
    spec = ExperimentSpec(model="amp_damp", methods=(Method.S1_DET,), t=1.0,
                          epsilon_grid=(0.5, 0.25), seed=0,
                          outputs=str(tmp_path / "out"))
    records = run_sweep(spec, write_files=False)
    assert [r.n for r in records] == sorted(r.n for r in records)
    for r in records:
        assert r.epsilon_empirical <= r.epsilon_bound


def test_run_sweep_sampled_mode_has_stat_err(tmp_path):
    spec = ExperimentSpec(model="amp_damp", methods=(Method.QDRIFT,), t=1.0,
                          n_grid=(4, 8), seed=1, trajectories=64,
                          sampled=True, outputs=str(tmp_path / "out"))
    records = run_sweep(spec)
    assert all(r.stat_err is not None and r.stat_err >= 0 for r in records)
    with open(tmp_path / "out" / "sweep.csv", encoding="utf-8") as fh:
        header = fh.readline().strip()
    assert header.endswith(",stat_err")
    # sampled records satisfy the bound within 3 sigma
    for r in records:
        assert r.epsilon_empirical <= r.epsilon_bound + 3 * r.stat_err


def test_run_sweep_records_failures_and_continues(tmp_path):
    # M = 8 exceeds the exact-mixture cap: the s2_ran record errors, rest run
    spec = ExperimentSpec(model="random d=2 m=8 seed=1",
                          methods=(Method.S2_RAN, Method.S1_DET), t=1.0,
                          n_grid=(4,), seed=0, outputs=str(tmp_path / "out"))
    records = run_sweep(spec, write_files=False)
    by_method = {r.method: r for r in records}
    assert by_method[Method.S2_RAN].status.startswith("error:")
    assert by_method[Method.S1_DET].status == "ok"


def test_worker_cap_env(tmp_path, monkeypatch, spec):
    monkeypatch.setenv("LINDBLAD_RAND_THREADS", "1")
    records = run_sweep(spec, write_files=False)
    assert all(r.status == "ok" for r in records)
    monkeypatch.setenv("LINDBLAD_RAND_THREADS", "zebra")
    with pytest.raises(ConfigError, match="LINDBLAD_RAND_THREADS"):
        run_sweep(spec, write_files=False)


def test_fit_order_exact_synthetic():
    records = [
        SweepRecord(method=Method.S2_DET, n=n, epsilon_bound=1.0,
                    epsilon_empirical=5.0 / n**2, trace_dist=0.0, gates_cs=1,
                    gates_qf=None, status="ok", wall_time_ms=0)
        for n in (4, 8, 16, 32)
    ]
    slopes = fit_order(records)
    assert slopes[Method.S2_DET] == pytest.approx(-2.0, abs=1e-9)


def test_fit_order_needs_three_points():
    records = [
        SweepRecord(method=Method.S1_DET, n=n, epsilon_bound=1.0,
                    epsilon_empirical=1.0 / n, trace_dist=0.0, gates_cs=1,
                    gates_qf=None, status="ok", wall_time_ms=0)
        for n in (4, 8)
    ]
    with pytest.raises(ValueError, match="at least 3"):
        fit_order(records)


def test_table1_report_worked_example():
    report = table1_report(m=2, t=1.0, lam=1.0, gamma=2.0, omega=1.0, eps=0.1)
    lines = report.splitlines()
    first_order = next(l for l in lines if l.startswith("First-order deterministic"))
    assert "O((tΛ)²M³/ε)" in first_order
    assert first_order.split()[-2:] == ["40", "80"]
    qd_cs = next(l for l in lines if l.startswith("QDRIFT (CS)"))
    n, gates = qd_cs.split()[-2:]
    assert n == gates  # no M factor on the classical-sampling route
    assert "infeasible (M!)" in next(l for l in lines if "randomised (QF)" in l and "Second" in l)


def test_validate_suite_selection():
    report = validate_all(seed=0, suite="identities")
    assert report.passed
    assert {r.suite for r in report.results} == {"identities"}
    with pytest.raises(ConfigError, match="unknown suite"):
        validate_all(suite="everything")


def test_validation_report_csv(tmp_path):
    report = validate_all(seed=0, suite="identities")
    path = report.write_csv(tmp_path / "report.csv")
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().strip().split("\n")
    assert lines[0] == "suite,check,passed,detail"
    assert len(lines) == len(report.results) + 1
