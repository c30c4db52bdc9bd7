import json
import math

import numpy as np
import pytest

from qslbounds.cli import (
    CSV_COLUMNS,
    SweepConfig,
    emit,
    main,
    parse_rows,
    run_jc_sweep,
    run_rabi_demo,
)
from qslbounds.errors import ConfigInvalid
from qslbounds.rates import FLAG_AMPLITUDE_GUARD

SMALL = SweepConfig(gamma0_min=0.01, gamma0_max=100.0, gamma0_count=10, steps=800)


@pytest.fixture(scope="module")
def small_rows():
    return run_jc_sweep(SMALL)


class TestSweepConfig:
    def test_defaults_valid(self):
        cfg = SweepConfig().validate()
        assert cfg.gamma0_count == 60
        assert cfg.tau == 1.0

    def test_from_dict_full(self):
        cfg = SweepConfig.from_dict(
            {
                "lambda": 2.0,
                "omega0": 1.5,
                "tau": 0.7,
                "gamma0_grid": {"min": 0.1, "max": 10.0, "count": 5},
                "dimension_for_bound": 3,
                "steps": 500,
                "include_additive": False,
                "seed": 7,
                "constants": {"hbar": 1.0, "k_B": 2.0},
            }
        )
        assert cfg.lam == 2.0 and cfg.gamma0_count == 5 and cfg.k_b == 2.0
        assert not cfg.include_additive

    def test_rejects_unknown_keys(self):
        with pytest.raises(ConfigInvalid):
            SweepConfig.from_dict({"lambda": 1.0, "gamma_grid": {}})

    def test_rejects_bad_grid(self):
        with pytest.raises(ConfigInvalid):
            SweepConfig(gamma0_min=2.0, gamma0_max=1.0).validate()
        with pytest.raises(ConfigInvalid):
            SweepConfig(gamma0_count=1).validate()


class TestRunJcSweep:
    def test_minimal_grid_two_rows(self):
        cfg = SweepConfig(gamma0_min=0.1, gamma0_max=0.2, gamma0_count=2, steps=200)
        rows = run_jc_sweep(cfg)
        assert len(rows) == 2
        assert rows[0].gamma0 == pytest.approx(0.1)
        assert rows[1].gamma0 == pytest.approx(0.2)

    def test_rows_in_grid_order(self, small_rows):
        gammas = [r.gamma0 for r in small_rows]
        assert gammas == sorted(gammas)
        assert len(small_rows) == 10

    def test_unflagged_rows_satisfy_bound(self, small_rows):
        checked = 0
        for row in small_rows:
            if row.flags:
                continue
            checked += 1
            assert row.info_rate_exact <= row.bound_micro_with_additive + 1e-9
        assert checked >= 5

    def test_deep_non_markovian_rows_flagged_not_fabricated(self, small_rows):
        flagged = [r for r in small_rows if r.flags]
        assert flagged, "windows containing an amplitude zero must be flagged"
        for row in flagged:
            assert FLAG_AMPLITUDE_GUARD in row.flags
            assert math.isnan(row.info_rate_exact)
            assert math.isnan(row.ell)

    def test_embedded_method_covers_all_rows(self):
        # Steps sized so the per-step error stays inside the clipping
        # window where the exact solution touches the PSD boundary.
        cfg = SweepConfig(gamma0_min=0.01, gamma0_max=100.0, gamma0_count=6,
                          steps=2500, method="embedded")
        rows = run_jc_sweep(cfg)
        assert all(not r.flags for r in rows)
        assert all(r.info_rate_exact <= r.bound_micro_with_additive + 1e-9 for r in rows)

    def test_worker_count_does_not_change_rows(self):
        cfg = SweepConfig(gamma0_min=0.05, gamma0_max=5.0, gamma0_count=4, steps=300)
        a = run_jc_sweep(cfg, workers=1)
        b = run_jc_sweep(cfg, workers=2)
        assert a == b


class TestEmit:
    def test_rejects_empty(self, tmp_path):
        with pytest.raises(ConfigInvalid):
            emit([], "csv", str(tmp_path / "x.csv"))

    def test_csv_round_trip(self, small_rows, tmp_path):
        path = tmp_path / "sweep.csv"
        emit(small_rows, "csv", str(path))
        parsed = parse_rows(str(path))
        assert len(parsed) == len(small_rows)
        for rec, row in zip(parsed, small_rows):
            assert rec["gamma0"] == pytest.approx(row.gamma0, rel=1e-12)
            if not row.flags:
                assert rec["info_rate_exact"] == pytest.approx(row.info_rate_exact, rel=1e-12)
                assert rec["flags"] == ""
            else:
                assert rec["flags"] == "|".join(row.flags)

    def test_csv_header(self, small_rows, tmp_path):
        path = tmp_path / "sweep.csv"
        emit(small_rows, "csv", str(path))
        header = path.read_text().splitlines()[0]
        assert header == ",".join(CSV_COLUMNS)
        assert header.split(",") == list(CSV_COLUMNS)

    def test_json_matches_csv_keys(self, small_rows, tmp_path):
        path = tmp_path / "sweep.json"
        emit(small_rows, "json", str(path))
        data = json.loads(path.read_text())
        assert len(data) == len(small_rows)
        assert set(data[0]) == set(CSV_COLUMNS)
        flagged = [d for d in data if d["flags"]]
        assert all(d["info_rate_exact"] is None for d in flagged)

    def test_byte_identical_reruns(self, tmp_path):
        cfg = SweepConfig(gamma0_min=0.05, gamma0_max=2.0, gamma0_count=3, steps=300)
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        emit(run_jc_sweep(cfg), "csv", str(p1))
        emit(run_jc_sweep(cfg), "csv", str(p2))
        assert p1.read_bytes() == p2.read_bytes()


class TestRabiDemo:
    def test_pi_pulse_marginal_qsl(self):
        rec = run_rabi_demo(omega=1.0, tau=math.pi, steps=20000, c1=1.0, c2=0.0)
        assert rec["tau_qsl_x"] == pytest.approx(math.pi, abs=1e-6)
        assert rec["tau_qsl"] == pytest.approx(2.0, abs=1e-6)

    def test_full_period_no_information_change(self):
        rec = run_rabi_demo(omega=1.0, tau=2 * math.pi, steps=8000, c1=1.0, c2=0.0)
        assert abs(rec["delta_S_x_nats"]) < 1e-8
        assert rec["delta_H_nats"] == pytest.approx(0.0, abs=1e-8)

    def test_entropy_constant_along_run(self):
        rec = run_rabi_demo(omega=1.0, tau=1.3, steps=2000, c1=1.0, c2=0.0)
        assert rec["delta_H_nats"] == pytest.approx(0.0, abs=1e-8)

    def test_rejects_bad_config(self):
        with pytest.raises(ConfigInvalid):
            run_rabi_demo(omega=-1.0, tau=1.0, steps=100, c1=1.0, c2=0.0)


class TestMainExitCodes:
    def test_success_bounds(self, capsys):
        assert main(["bounds", "--bekenstein-energy", "1.0", "--pendry-power", "1.0"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["bekenstein_bits_per_time"] == pytest.approx(4.532360141827194, abs=1e-9)
        assert payload["pendry_bits_per_time"] == pytest.approx(1.4763483667636275, abs=1e-9)

    def test_config_error_is_exit_1(self, capsys):
        assert main(["jc-sweep", "--gamma0-count", "1"]) == 1
        assert main(["bounds"]) == 1
        assert main(["no-such-command"]) == 1

    def test_runtime_error_is_exit_2(self, capsys):
        assert main(["gibbs", "--diag", "0,1", "--energy", "0.0"]) == 2

    def test_gibbs_two_level(self, capsys):
        assert main(["gibbs", "--diag", "0,1", "--energy", "0.25"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["beta"] == pytest.approx(math.log(3.0), abs=1e-9)
        assert payload["E"] == pytest.approx(0.25, rel=1e-9)

    def test_gibbs_oscillator(self, capsys):
        assert main(["gibbs", "--oscillator-homega", "1.0", "--levels", "64", "--energy", "1.0"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["beta"] == pytest.approx(math.log(3.0), abs=1e-8)

    def test_sweep_writes_csv(self, tmp_path, capsys):
        out = tmp_path / "rows.csv"
        code = main([
            "jc-sweep", "--gamma0-min", "0.1", "--gamma0-max", "1.0",
            "--gamma0-count", "2", "--steps", "200", "--out", str(out),
        ])
        assert code == 0
        assert out.read_text().splitlines()[0] == ",".join(CSV_COLUMNS)

    def test_config_file_with_overrides(self, tmp_path):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps({
            "lambda": 1.0,
            "gamma0_grid": {"min": 0.1, "max": 1.0, "count": 2},
            "steps": 200,
        }))
        out = tmp_path / "rows.csv"
        code = main(["jc-sweep", "--config", str(cfg_path), "--gamma0-count", "3",
                     "--out", str(out)])
        assert code == 0
        assert len(out.read_text().splitlines()) == 4

    def test_bounds_config_sets_hbar(self, tmp_path, capsys):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps({"constants": {"hbar": 2.0}}))
        assert main(["bounds", "--config", str(cfg_path), "--bekenstein-energy", "1.0"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["hbar"] == 2.0
        assert payload["bekenstein_bits_per_time"] == pytest.approx(4.532360141827194 / 2, abs=1e-9)

    def test_rabi_demo_json(self, tmp_path):
        out = tmp_path / "rabi.json"
        assert main(["rabi-demo", "--omega", "1.0", "--tau", "3.14159", "--steps",
                     "500", "--out", str(out)]) == 0
        rec = json.loads(out.read_text())
        assert "bound_shannon" in rec and "tau_qsl_x" in rec
