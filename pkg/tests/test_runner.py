import json

import numpy as np
import pytest

from stacool.errors import AccuracyError
from stacool.harness import runner
from stacool.harness.config import build_config
from stacool.harness.scenarios import standard_scenario

pytestmark = pytest.mark.filterwarnings("ignore::stacool.harness.config.PolicyWarning")


def small(**kw):
    values = {"protocol": "vitanov", "mode": "sta", "grid_points": 200}
    values.update(kw)
    return build_config(values)


def test_run_writes_versioned_files(tmp_path):
    out = runner.run(small(), tmp_path, stem="v", drives=True)
    assert set(out.files) == {"timeseries", "summary", "drives"}
    cols, data = runner.read_csv(out.files["timeseries"])
    assert tuple(cols) == runner.TIMESERIES_COLUMNS
    assert data.shape == (200, 9)
    np.testing.assert_allclose(data[:, 3], out.result.Pb, rtol=1e-11)
    cols, data = runner.read_csv(out.files["drives"])
    assert tuple(cols) == runner.DRIVE_COLUMNS and data.shape == (200, 5)
    summary = runner.load_summary(out.files["summary"])
    assert summary["mode"] == "sta" and summary["pb_final"] == out.result.pb_final


def test_repeated_runs_give_identical_bytes(tmp_path):
    a = runner.run(small(), tmp_path / "a", stem="x", drives=True)
    b = runner.run(small(), tmp_path / "b", stem="x", drives=True)
    for kind in a.files:
        assert a.files[kind].read_bytes() == b.files[kind].read_bytes()


def test_read_csv_rejects_foreign_files(tmp_path):
    p = tmp_path / "x.csv"
    p.write_text("# something else\n1,2\n")
    with pytest.raises(ValueError):
        runner.read_csv(p)
    p.write_text("# stacool timeseries schema v99\n# t\n1\n")
    with pytest.raises(ValueError, match="v99"):
        runner.read_csv(p)


def test_integration_errors_carry_the_scenario(monkeypatch):
    from stacool.dynamics import simulate as sim

    def boom(*a, **k):
        raise AccuracyError("step budget exhausted", t=3.0)

    monkeypatch.setattr(runner, "integrate", boom)
    with pytest.raises(AccuracyError, match="vitanov-sta"):
        runner.simulate(small())
    assert sim.integrate is not boom


@pytest.mark.parametrize("workers", [1, 2])
def test_sweep_zero_detuning_equals_single_run(workers):
    cfg = small()
    single = runner.simulate(cfg)
    sweep = runner.sweep_detuning(cfg, [-0.1, 0.0, 0.1], workers=workers)
    label = cfg.label
    assert sweep.pb_final[label][1] == single.pb_final
    assert sweep.pb_min[label][1] == single.pb_min


def test_sweep_shares_one_grid(tmp_path):
    cfgs = [small(), small(protocol="gaussian")]
    sweep = runner.sweep_detuning(cfgs, [0.0, 0.05], workers=1)
    assert sweep.labels == ["vitanov-sta", "gaussian-sta"]
    assert all(v.shape == (2,) for v in sweep.pb_final.values())
    cols, data = runner.read_csv(runner.write_sweep(tmp_path / "s.csv", sweep))
    assert cols[0] == "delta" and data.shape == (2, 5)


def test_sweep_rejects_nonfinite_grid():
    with pytest.raises(ValueError):
        runner.sweep_detuning(small(), [0.0, np.nan])


def test_default_detuning_grid():
    d = runner.default_deltas()
    assert d.size == 41 and d[0] == -0.2 and d[-1] == 0.2 and d[20] == 0.0


def test_report_speedup_for_a_pair():
    slow = runner.run(standard_scenario("gaussian", "stirap", grid_points=200)).summary
    fast = runner.run(standard_scenario("gaussian", "sta", grid_points=200)).summary
    text, table = runner.report([slow, fast])
    runs = json.loads(text)["runs"]
    assert "speedup" not in runs[0]
    assert runs[1]["speedup"] == pytest.approx(110, rel=0.1)
    assert "gaussian-sta" in table


def test_report_single_run_has_no_speedup():
    s = runner.run(small()).summary
    text, _ = runner.report([s])
    assert "speedup" not in json.loads(text)["runs"][0]
    with pytest.raises(ValueError):
        runner.report([])


def test_report_is_deterministic():
    s = runner.run(small()).summary
    assert runner.report([s]) == runner.report([dict(s)])


def test_adiabatic_drives_have_no_omega1():
    pair = runner.reconstruct(standard_scenario("vitanov", "stirap"), t_eval=np.linspace(0, 50, 6))
    assert pair.Omega1 is None
