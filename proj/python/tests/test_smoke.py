import math
import os

import numpy as np
import pytest

import qjump


def decay_state():
    psi = np.array([math.sqrt(0.4), math.sqrt(0.6)], dtype=complex)
    return np.outer(psi, psi.conj())


def test_catalog_lists_the_four_models():
    names = {m["name"] for m in qjump.catalog()["models"]}
    assert names == {"damped_ho", "qbm", "colldec", "measure_fb"}


def test_build_model_resolves_defaults():
    sys, params = qjump.build_model("damped_ho", omega=2.0, gamma=1.0, n_th=0.0, fock_dim=12)
    assert sys.dim == 12
    assert sys.num_jumps == 1
    assert params["fock_dim"] == 12
    a = sys.jump(0)
    assert abs(a[0, 1] - 1.0) < 1e-12


def test_errors_carry_the_code():
    with pytest.raises(qjump.QJumpError) as info:
        qjump.build_model("no_such_model")
    assert info.value.args[0] == "Config"


def test_propagate_preserves_trace():
    sys, _ = qjump.build_model("two_level", gamma_down=1.0, gamma_up=0.3, omega=1.0)
    res = qjump.propagate(sys, decay_state(), 1.0, 1e-3)
    assert abs(res["traces"][-1] - 1.0) < 1e-9
    assert res["final_state"].shape == (2, 2)


def test_expansion_converges_to_the_reference():
    sys, _ = qjump.build_model("two_level", gamma_down=1.0, gamma_up=0.3, omega=1.0)
    rho0 = decay_state()
    exact = qjump.propagate(sys, rho0, 1.0, 1e-3)["final_state"]
    est = qjump.estimate_expansion(sys, qjump.Strategy.optimal(), rho0, 1.0, n_samples=400, max_order=4, seed=3)
    w = est.cumulative_weights()
    assert all(b >= a for a, b in zip(w, w[1:]))
    assert qjump.truncated_fidelity(exact, est, 4) > 0.99
    assert est.max_order == 4


def test_fixed_strategy_by_name():
    sys, _ = qjump.build_model("two_level", gamma_down=1.0, gamma_up=0.0, omega=0.0)
    s = qjump.strategy("fixed", sys, alphas=[[0.2, -0.1]])
    assert s.name == "fixed"


def test_run_config_dict(tmp_path):
    config = {
        "name": "py_smoke",
        "model": {"name": "two_level", "params": {"gamma_down": 1.0, "gamma_up": 0.2, "omega": 1.0}},
        "initial_state": {"kind": "fock", "levels": [0, 1]},
        "tau": 1.0,
        "strategies": [{"name": "optimal"}, {"name": "no_shift"}],
        "sampler": {"n_samples": 200, "max_order": 3, "seed": 4, "dt": 0.01},
        "reference": {"dt": 0.001},
        "output": {"dir": str(tmp_path / "cfg")},
    }
    out = qjump.run(config, output_dir=str(tmp_path / "run"))
    assert out["output_dir"] == str(tmp_path / "run")
    assert {r["strategy"] for r in out["reports"]} == {"optimal", "no_shift"}
    assert (tmp_path / "run" / "manifest.json").exists()
    again = qjump.run(config, output_dir=str(tmp_path / "again"), workers=3)
    assert (tmp_path / "run" / "report_optimal.csv").read_bytes() == (
        tmp_path / "again" / "report_optimal.csv").read_bytes()


def test_bundled_config_parses():
    config_dir = os.environ.get("QJUMP_CONFIG_DIR")
    if not config_dir:
        pytest.skip("QJUMP_CONFIG_DIR not set")
    with pytest.raises(qjump.QJumpError):
        qjump.run(os.path.join(config_dir, "missing.cfg"))
