import json

import numpy as np
import pytest

import hyperfree as hf


def small_config(**keys):
    keys.setdefault("refinements", 0)
    keys.setdefault("timings", False)
    return hf.config(**keys)


def test_presets():
    names = hf.preset_names()
    assert "2d-p2" in names and "3d-p4" in names
    c = hf.preset("3d-p4")
    assert (c.dim, c.p, c.refinements) == (3, 4, 0)
    assert c.n_dofs == 3 * 17**3
    with pytest.raises(hf.ConfigError):
        hf.preset("4d-p1")


def test_config_errors():
    with pytest.raises(hf.ConfigError):
        hf.config(polynomial_degree=2)
    with pytest.raises(hf.ConfigError):
        hf.config(p=3, q=2)
    c = hf.config(p=3, q=2, reduced_quadrature=True)
    assert c.n_q_points_1d == 2
    with pytest.raises(hf.IoError):
        hf.load_config("/nonexistent/config.json")


def test_mv_benchmark():
    records = []
    for s in ["scalar", "tensor2", "tensor4", "matrix_based"]:
        records.append(hf.run_mv_benchmark(small_config(strategy=s)))
    assert all(r.kind == "mv" and r.flops_per_apply > 0 for r in records)
    assert all(r.mv_seconds == 0 for r in records)
    memory = [r.memory_bytes for r in records]
    assert memory == sorted(memory) and len(set(memory)) == 4
    assert hf.run_mv_benchmark(small_config(strategy="scalar")) == records[0]

    csv = hf.results_csv(records).splitlines()
    assert len(csv) == 5
    parsed = hf.parse_results_json(hf.results_json(records))
    assert parsed == records
    assert json.loads(hf.results_json(records))[3]["strategy"] == "matrix_based"


def test_solve():
    c = small_config(load_steps=2)
    run = hf.run_solver_benchmark(c)
    record = run["record"]
    assert record.converged and record.kind == "solve"
    assert run["u"].shape == (c.n_dofs,)
    assert np.abs(run["u"]).max() > 0
    assert {r["step"] for r in run["log"]} == {1, 2}
    assert run["newton_log_csv"].startswith("step,iteration,load_fraction")

    c.load_scale = 0.0
    assert np.abs(hf.run_solver_benchmark(c)["u"]).max() == 0


def test_checks():
    assert hf.verification_groups() == list(range(1, 10))
    checks = hf.run_checks(4)
    assert checks and all(c.passed for c in checks)
    assert hf.checks_csv(checks).startswith("group,check,value,relation,threshold,status")


def test_material():
    p = hf.NeoHookean.from_poisson(0.4225e6, 0.3)
    assert p.lam == pytest.approx(2 * p.mu * 0.3 / 0.4)
    for dim in (2, 3):
        I = np.eye(dim)
        assert hf.strain_energy(I, p) == pytest.approx(0, abs=1e-9)
        assert np.allclose(hf.second_pk_stress(I, p), 0, atol=1e-9)

        rng = np.random.default_rng(dim)
        F = I + 0.1 * rng.standard_normal((dim, dim))
        C = F.T @ F
        tau = hf.kirchhoff_stress(F, p)
        assert np.allclose(tau, F @ hf.second_pk_stress(C, p) @ F.T, rtol=1e-12, atol=1e-6)

        # S = 2 dpsi/dC by central differences
        h, S = 1e-6, hf.second_pk_stress(C, p)
        for i in range(dim):
            for j in range(dim):
                E = np.zeros((dim, dim))
                E[i, j] += 0.5 * h
                E[j, i] += 0.5 * h
                fd = (hf.strain_energy(C + E, p) - hf.strain_energy(C - E, p)) / (2 * h)
                assert 2 * fd == pytest.approx(S[i, j], rel=1e-6, abs=1e-3)

        g = rng.standard_normal((dim, dim))
        g = 0.5 * (g + g.T)
        assert np.allclose(hf.tangent_action(g, 1.0, p), 2 * p.mu * g + 2 * p.lam * np.trace(g) * I)

    with pytest.raises(ValueError):
        hf.strain_energy(np.eye(4), p)
