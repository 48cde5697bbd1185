import csv
import json
import os

import pytest
import yaml

from movant.channel import build_channel
from movant.errors import ConfigError
from movant.harness.cli import main
from movant.harness.config import Scheme, load_config, parse_config
from movant.harness.experiments import (RESULT_COLUMNS, SeedCell, rate_or_zero, read_results,
                                        run_experiment, summarize)

SMALL = {
    "experiment": "sumrate_sweep",
    "seeds": [3, 1],
    "snr_db": [0, 5, 10],
    "scenario": {"n_users": 2, "n_paths": 4, "wavelength": 0.1},
    "array": {"n_elements": 2, "region_wavelengths": [2, 2, 1], "local_grid": [1, 2, 1],
              "fpa": {"rows": 1, "cols": 2, "spacing_wavelengths": 0.5}},
    "optimizer": {"budget": 8},
    "schemes": [
        {"architecture": "fpa", "pattern": "omni"},
        {"architecture": "local", "pattern": "omni"},
        {"architecture": "global", "pattern": "omni"},
        {"architecture": "global", "pattern": "omni", "rotation": True},
        {"architecture": "fpa", "pattern": "dir38901"},
        {"architecture": "global", "pattern": "dir38901"},
        {"architecture": "global", "pattern": "dir38901", "rotation": True},
    ],
}


def small(tmp_path, name="run", **over):
    data = json.loads(json.dumps(SMALL))
    data.update(over)
    data["output"] = str(tmp_path / name)
    return parse_config(data, "small.yaml")


def rows_without_wall(path):
    with open(path) as fh:
        return [r[:-1] for r in csv.reader(fh)]


@pytest.fixture(scope="module")
def sweep(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("sweep")
    out = run_experiment(small(tmp))
    return tmp / "run", out


def test_shipped_configs_validate():
    for name in ("default", "quantization", "phase_center"):
        cfg = load_config(name)
        assert cfg.experiment in ("sumrate_sweep", "quantization_study", "phase_center_study")
    cfg = load_config("default")
    assert len(cfg.seeds) == 20 and cfg.reference_snr_db == 5.0
    assert len(cfg.schemes) == 8


@pytest.mark.parametrize("patch, field", [
    ({"optimizer": {"budget": 0}}, "optimizer.budget"),
    ({"optimizer": {"budgt": 5}}, "optimizer.budgt"),
    ({"snr_db": [5, 0]}, "snr_db"),
    ({"scenario": {"n_users": 3, "wavelength": 0.1}}, "scenario.n_users"),
    ({"array": {"n_elements": 2, "local_grid": [1, 3, 1],
                "fpa": {"rows": 1, "cols": 2}}}, "array.local_grid"),
    ({"schemes": [{"architecture": "sliding", "pattern": "omni"}]}, "schemes[0].architecture"),
    ({"seeds": {"start": 0, "count": 0}}, "seeds"),
    ({"colour": "blue"}, "colour"),
])
def test_config_errors_name_the_field(tmp_path, patch, field):
    data = json.loads(json.dumps(SMALL))
    data.update(patch)
    with pytest.raises(ConfigError) as info:
        parse_config(data, "bad.yaml")
    msg = str(info.value)
    assert msg.startswith("bad.yaml: ") and field in msg


def test_override_and_digest(tmp_path):
    cfg = small(tmp_path)
    one = cfg.with_overrides(7, str(tmp_path / "x"))
    assert one.seeds == (7,) and one.output == str(tmp_path / "x")
    assert cfg.digest() == small(tmp_path).digest()
    assert cfg.digest() != one.digest()


def test_sweep_outputs(sweep):
    root, out = sweep
    rows = read_results(root / "results.csv")
    assert len(rows) == 7 * 3 * 2
    with open(root / "results.csv") as fh:
        assert next(csv.reader(fh)) == RESULT_COLUMNS
    # canonical order: scheme, then SNR, then seed as listed in the config
    assert [r["seed"] for r in rows[:6]] == [3, 1, 3, 1, 3, 1]
    assert [r["snr_db"] for r in rows[:6]] == [0, 0, 5, 5, 10, 10]
    manifest = json.loads((root / "manifest.json").read_text())
    assert manifest["status"] == "complete"
    assert all(v == "complete" for v in manifest["cells"].values())
    assert (root / "scenarios" / "seed_003.json").exists()
    assert (root / "layouts" / "global-omni-rot_seed_001.json").exists()
    assert (root / "traces" / "local-omni_seed_003.csv").exists()
    assert not (root / "traces" / "fpa-omni_seed_003.csv").exists()
    assert set(out["summary"]) >= {"reference_snr_db", "omni_global_vs_fpa", "table"}


def test_sweep_invariants(sweep):
    rows = read_results(sweep[0] / "results.csv")
    by = {(r["scheme"], r["pattern"], r["rotation"], r["snr_db"], r["seed"]): r for r in rows}
    for r in rows:
        if r["scheme"] == "fpa":
            assert r["evaluations"] == "0"
        elif r["rotation"] == "true":
            assert r["evaluations"] == "16"
        else:
            assert r["evaluations"] == "8"
    for snr in (0.0, 5.0, 10.0):
        for seed in (1, 3):
            a = by[("global", "omni", "true", snr, seed)]["sum_rate_bps_hz"]
            b = by[("global", "omni", "false", snr, seed)]["sum_rate_bps_hz"]
            assert abs(a - b) <= 1e-9
    for seed in (1, 3):
        rot = by[("global", "dir38901", "true", 5.0, seed)]["sum_rate_bps_hz"]
        move = by[("global", "dir38901", "false", 5.0, seed)]["sum_rate_bps_hz"]
        assert rot >= move
    # each scheme's rate grows with SNR on a fixed layout
    for seed in (1, 3):
        r = [by[("local", "omni", "false", s, seed)]["sum_rate_bps_hz"] for s in (0.0, 5.0, 10.0)]
        assert r == sorted(r)


def test_nested_warm_starts(tmp_path):
    cfg = small(tmp_path)
    cell = SeedCell(cfg, 1)

    def rate(sol):
        return rate_or_zero(build_channel(sol.layout, cell.scenario), cell.snr_ref)

    fpa = cell.solve(Scheme("fpa", "omni"))
    local = cell.solve(Scheme("local", "omni"))
    glob = cell.solve(Scheme("global", "omni"))
    assert fpa.evaluations == 0
    assert rate(local) >= rate(fpa) and rate(glob) >= rate(local)
    # the global run evaluates the fixed and local layouts first
    g = cell.specs[("global", False)]
    assert glob.result.params[0] == pytest.approx(g.encode(fpa.layout))
    assert glob.result.params[1] == pytest.approx(g.encode(local.layout))
    assert cell.solve(Scheme("global", "omni")) is glob


def test_sweep_is_deterministic(tmp_path, sweep):
    cfg = small(tmp_path, "again")
    run_experiment(cfg)
    assert rows_without_wall(tmp_path / "again" / "results.csv") == rows_without_wall(sweep[0] / "results.csv")


def test_threads_match_serial(tmp_path, sweep):
    run_experiment(small(tmp_path, "par"), threads=2)
    assert rows_without_wall(tmp_path / "par" / "results.csv") == rows_without_wall(sweep[0] / "results.csv")


def test_summarize_round_trip(tmp_path, sweep):
    s = summarize(sweep[0] / "results.csv", out_dir=tmp_path)
    assert s["reference_snr_db"] == 5.0
    fpa = [t for t in s["table"] if t["scheme"] == "fpa"]
    assert all(t["ratio_to_fpa"] == pytest.approx(1.0) for t in fpa)
    assert all(t["n"] == 2 for t in s["table"])
    with open(tmp_path / "summary.csv") as fh:
        assert len(list(csv.reader(fh))) == 1 + 7 * 3
    j = json.loads((tmp_path / "summary.json").read_text())
    assert j["omni_global_vs_fpa"]["reference_gain_percent"] == 220.0
    assert j["omni_global_vs_fpa"]["seeds"] == 2


def test_summarize_rejects_bad_columns(tmp_path):
    p = tmp_path / "r.csv"
    p.write_text("a,b\n1,2\n")
    with pytest.raises(ValueError):
        summarize(p)


def test_quantization_reuses_layouts(tmp_path, sweep):
    data = dict(json.loads(json.dumps(SMALL)), experiment="quantization_study",
                output=str(tmp_path / "q"), quantization={"layouts_from": str(sweep[0])})
    data.pop("schemes")
    out = run_experiment(parse_config(data, "q.yaml"))
    assert out["seeds"] == 2 and out["pitch_m"] == pytest.approx(0.1 / 6)
    with open(tmp_path / "q" / "quantization.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert [r["evaluations"] for r in rows] == ["0", "0"]
    res = read_results(sweep[0] / "results.csv")
    cont = {r["seed"]: r["sum_rate_bps_hz"] for r in res
            if r["scheme"] == "global" and r["pattern"] == "omni" and r["rotation"] == "false" and r["snr_db"] == 5}
    for r in rows:
        assert float(r["continuous_bps_hz"]) == pytest.approx(cont[int(r["seed"])], rel=1e-9)
        assert float(r["max_shift_m"]) <= 0.1 / 12 + 1e-12


def test_phase_center_experiment(tmp_path):
    cfg = parse_config({"experiment": "phase_center_study", "output": str(tmp_path / "pc"),
                        "phase_center": {"targets_wavelengths": [0.8]}}, "pc.yaml")
    out = run_experiment(cfg)
    assert out["setups"][0]["meets_thresholds"]
    assert (tmp_path / "pc" / "cuts" / "dual_mode_dpc_0.8.csv").exists()
    assert (tmp_path / "pc" / "displacement_curve.csv").exists()
    assert json.loads((tmp_path / "pc" / "manifest.json").read_text())["seeds"] == []


def test_cli_validate_and_errors(tmp_path, capsys):
    assert main(["validate", "default"]) == 0
    assert "20 seeds" in capsys.readouterr().out
    bad = tmp_path / "bad.yaml"
    bad.write_text(yaml.safe_dump({"experiment": "sumrate_sweep", "schemes": []}))
    assert main(["validate", str(bad)]) == 2
    assert "schemes" in capsys.readouterr().err
    assert main(["validate", str(tmp_path / "missing.yaml")]) == 2
    garbage = tmp_path / "g.yaml"
    garbage.write_text("a: [1,\n")
    assert main(["validate", str(garbage)]) == 2
    with pytest.raises(SystemExit):
        main(["--threads", "0", "validate", "default"])


def test_cli_run_small(tmp_path, capsys):
    cfgp = tmp_path / "s.yaml"
    data = dict(SMALL, output=str(tmp_path / "ignored"))
    cfgp.write_text(yaml.safe_dump(data))
    out = tmp_path / "cli"
    assert main(["run", str(cfgp), "-q", "--seed", "1", "--out", str(out)]) == 0
    assert "results:" in capsys.readouterr().out
    assert len(read_results(out / "results.csv")) == 7 * 3
    assert not (tmp_path / "ignored").exists()
    assert main(["summarize", str(out / "results.csv")]) == 0
    assert "global-omni-rot" in capsys.readouterr().out


def test_cli_pattern(tmp_path, capsys):
    assert main(["pattern", "dir38901", "--step", "90"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "phi_deg,gain_dBi"
    # +-90 deg sits inside the 30 dB cap: 8 - 12 (90/65)^2
    assert lines[1:] == ["-90,-15.0059172", "0,8", "90,-15.0059172", "180,-22"]
    f = tmp_path / "el.csv"
    assert main(["pattern", "omni", "--cut", "elevation", "--step", "45", "--out", str(f)]) == 0
    assert f.read_text().splitlines()[1] == "0,0"
    with pytest.raises(SystemExit):
        main(["pattern", "tabulated"])
    assert main(["pattern", "tabulated", "--table", str(tmp_path / "nope.csv")]) == 1


def test_cli_phasecenter(tmp_path, capsys):
    assert main(["phasecenter", "--out", str(tmp_path / "pc")]) == 0
    out = capsys.readouterr().out
    assert out.count("ok") == 2
    assert os.path.exists(tmp_path / "pc" / "similarity.json")
    assert main(["phasecenter", "default"]) == 2
