"""Config parsing, on-disk formats, determinism, CLI exit codes."""

import json
import os

import numpy as np
import pytest

from relaxns import cli, plots
from relaxns.artifacts import (ENERGY_HEADER, SNAPSHOT_HEADER, RunConfig, fmt,
                               read_energy_csv, read_snapshot_csv,
                               write_run_artifact)
from relaxns.core import FluidParams, Grid1D
from relaxns.experiments import execute


def _config(**kw):
    base = dict(solver="relaxed", params=FluidParams(tau=0.1), n=65,
                t_end=0.2, ic_family="well-prepared-sine", ic_delta=0.02)
    base.update(kw)
    return RunConfig(**base)


def _write_config(path, **kw):
    with open(path, "w") as fh:
        json.dump(_config(**kw).to_dict(), fh)
    return str(path)


# ---------------------------------------------------------------- config

def test_config_dict_round_trip():
    cfg = _config(params=FluidParams(a=1.3, gamma=2.2, mu=0.7, tau=0.05, epsilon=0.1),
                  n=129, cfl=0.3, record_every=5, seed=7)
    back = RunConfig.from_dict(cfg.to_dict())
    assert back == cfg


def test_config_rejects_unknown_keys():
    good = _config().to_dict()
    for poison in (
            {**good, "solvr": "relaxed"},
            {**good, "params": {**good["params"], "zeta": 1.0}},
            {**good, "ic": {**good["ic"], "shape": "sine"}},
    ):
        with pytest.raises(ValueError):
            RunConfig.from_dict(poison)


def test_config_validation_errors():
    with pytest.raises(ValueError):
        _config(solver="spectral")
    with pytest.raises(ValueError):
        _config(ic_family="gaussian")
    with pytest.raises(ValueError):
        _config(forcing="random")
    with pytest.raises(ValueError):
        _config(cfl=0.0)
    with pytest.raises(ValueError):
        _config(cfl=1.5)
    with pytest.raises(ValueError):
        _config(record_every=0)
    with pytest.raises(ValueError):
        _config(ic_family="custom-table")  # no path
    with pytest.raises(ValueError):
        _config(t_end=-1.0)
    with pytest.raises(ValueError):
        _config(ic_delta=-0.1)


def test_fmt_round_trips_binary():
    for x in (1 / 3, np.pi, 1e-17, 0.1 + 0.2, -7.25, 123456.7890123456789, 0.0):
        assert float(fmt(x)) == x


# ---------------------------------------------------------------- files

def test_run_artifact_files_round_trip(tmp_path):
    cfg = _config(record_every=4)
    art = execute(cfg)
    write_run_artifact(art, Grid1D(cfg.n), str(tmp_path))

    snap_path = tmp_path / "snapshots.csv"
    assert snap_path.read_text().splitlines()[0] == SNAPSHOT_HEADER
    states, x = read_snapshot_csv(str(snap_path))
    assert len(states) == len(art.states)
    assert np.array_equal(x, Grid1D(cfg.n).x)
    for got, want in zip(states, art.states):
        assert got.t == want.t
        assert np.array_equal(got.v, want.v)
        assert np.array_equal(got.u, want.u)
        assert np.array_equal(got.S, want.S)

    energy_path = tmp_path / "energy.csv"
    assert energy_path.read_text().splitlines()[0] == ENERGY_HEADER
    table = read_energy_csv(str(energy_path))
    assert np.array_equal(table["t"], np.array([e.t for e in art.energy]))
    assert np.array_equal(table["e_phys"], np.array([e.e_phys for e in art.energy]))

    meta = json.loads((tmp_path / "meta.json").read_text())
    assert meta["status"] == "completed"
    assert meta["config"] == cfg.to_dict()


def test_identical_configs_identical_bytes(tmp_path):
    dirs = []
    for name in ("a", "b"):
        d = tmp_path / name
        d.mkdir()
        art = execute(_config())
        write_run_artifact(art, Grid1D(65), str(d))
        plots.plot_energy_decay(art.energy, str(d / "energy.svg"))
        dirs.append(d)
    for fname in ("snapshots.csv", "energy.csv", "energy.svg"):
        a = (dirs[0] / fname).read_bytes()
        b = (dirs[1] / fname).read_bytes()
        assert a == b, f"{fname} differs between identical runs"
        assert len(a) > 0


# ---------------------------------------------------------------- CLI

def test_cli_run_then_report(tmp_path, capsys):
    cfg_path = _write_config(tmp_path / "cfg.json")
    out = tmp_path / "out"
    assert cli.main(["run", "--config", cfg_path, "--out", str(out), "--quiet"]) == 0
    for fname in ("snapshots.csv", "energy.csv", "meta.json",
                  "energy.svg", "snapshots.svg"):
        assert (out / fname).exists(), fname
    assert capsys.readouterr().out == ""

    assert cli.main(["report", "--dir", str(out)]) == 0
    text = capsys.readouterr().out
    assert "mass drift" in text and "monotone decay" in text


def test_cli_run_abort_exit_code(tmp_path):
    # strong compression drives v to the positivity floor
    ic_path = tmp_path / "ic.csv"
    g = Grid1D(65)
    with open(ic_path, "w") as fh:
        fh.write("x,v,u,S\n")
        for i in range(g.n):
            fh.write(f"{float(g.x[i])!r},1.0,{float(-20 * np.sin(np.pi * g.x[i]))!r},0.0\n")
    cfg_path = _write_config(tmp_path / "cfg.json", ic_family="custom-table",
                             ic_path=str(ic_path), t_end=2.0)
    rc = cli.main(["run", "--config", cfg_path, "--out", str(tmp_path / "out"), "--quiet"])
    assert rc == cli.EXIT_ABORT


def test_cli_rejects_bad_config(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"solver": "nope"}))
    with pytest.raises(SystemExit) as exc:
        cli.main(["run", "--config", str(bad), "--out", str(tmp_path / "o")])
    assert exc.value.code == cli.EXIT_INVALID


def test_cli_mms_quick(tmp_path):
    out = tmp_path / "out"
    rc = cli.main(["mms", "--solver", "relaxed", "--base-n", "33", "--levels", "2",
                   "--t-end", "0.2", "--out", str(out), "--quiet"])
    assert rc == 0
    payload = json.loads((out / "convergence.json").read_text())
    assert payload["verdict"] == "PASS"
    assert (out / "convergence.svg").exists()


def test_cli_tau_sweep_quick(tmp_path):
    cfg_path = _write_config(tmp_path / "cfg.json", t_end=0.4, ic_delta=0.01)
    out = tmp_path / "out"
    rc = cli.main(["tau-sweep", "--config", cfg_path, "--taus", "0.1,0.03",
                   "--out", str(out), "--quiet"])
    assert rc == 0
    payload = json.loads((out / "tau_sweep.json").read_text())
    assert payload["verdict"] == "PASS"
    assert len(payload["rows"]) == 2


def test_cli_eps_sweep_needs_reference(tmp_path):
    cfg_path = _write_config(tmp_path / "cfg.json")
    rc = cli.main(["eps-sweep", "--config", cfg_path, "--epsilons", "0.2,0.1",
                   "--out", str(tmp_path / "out"), "--quiet"])
    assert rc == cli.EXIT_INVALID


def test_cli_bounded_with_apriori(tmp_path):
    cfg_path = _write_config(tmp_path / "cfg.json", t_end=5.0, ic_delta=0.01)
    out = tmp_path / "out"
    rc = cli.main(["bounded", "--config", cfg_path, "--deltas", "0.005,0.01,0.02",
                   "--out", str(out), "--quiet"])
    assert rc == 0
    payload = json.loads((out / "bounded.json").read_text())
    assert payload["verdict"] == "PASS"
    assert payload["apriori"]["verdict"] == "PASS"


def test_cli_check_ic(tmp_path, capsys):
    cfg_path = _write_config(tmp_path / "cfg.json")
    assert cli.main(["check-ic", "--config", cfg_path]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["u_left"] == 0.0 and report["u_right"] == 0.0


def test_cli_report_missing_dir(tmp_path):
    rc = cli.main(["report", "--dir", str(tmp_path / "nothing")])
    assert rc == cli.EXIT_INVALID
