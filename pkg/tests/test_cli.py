import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from digirabi.cli import main
from digirabi.config import EXPERIMENTS
from digirabi.export import read_density_json, read_grid_csv, write_wigner_dataset_csv
from digirabi.hilbert import SpaceSpec, coherent_state
from digirabi.measure import wigner_grid
from digirabi.predistort import KernelTrace, read_trace_csv, step_form, write_trace_csv

CONFIGS = Path(__file__).resolve().parents[1] / "configs"

SMALL = ["--override", "sweep.omega_ratio=0.8, 2.4", "--override", "plan.n_steps=6"]


def test_list_experiments(capsys):
    assert main(["list-experiments"]) == 0
    out = capsys.readouterr().out
    for name in EXPERIMENTS:
        assert name in out


def test_validate_prints_hash(capsys):
    assert main(["validate", "--config", str(CONFIGS / "parity_chevron.ini")]) == 0
    rec = json.loads(capsys.readouterr().out)
    assert len(rec["config_hash"]) == 64
    assert rec["physics"]["g"] == 1.95


def test_config_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.ini"
    bad.write_text("[experiment]\nname = parity_chevron\n[physics]\nwhat = 1\n")
    assert main(["validate", "--config", str(bad)]) == 2
    assert "physics.what" in capsys.readouterr().err
    assert main(["run", "--config", str(CONFIGS / "parity_chevron.ini"), "--out", str(tmp_path),
                 "--workers", "0"]) == 2


def test_numerical_error_exit_code(tmp_path, capsys):
    p = tmp_path / "step.csv"
    write_trace_csv(KernelTrace(1.0, np.array([0.0, 0.5, 1.0, 1.0])), p)
    assert main(["predistort", str(p), "--out", str(tmp_path / "k.csv")]) == 3
    assert "numerical failure" in capsys.readouterr().err


def test_run_writes_grids_and_sidecars(tmp_path):
    out = tmp_path / "o"
    assert main(["run", "--config", str(CONFIGS / "parity_chevron.ini"), "--out", str(out), *SMALL]) == 0
    csvs = sorted(out.glob("*.csv"))
    assert csvs
    for c in csvs:
        side = json.loads(c.with_suffix(".json").read_text())
        assert {"units", "provenance", "config_hash", "code_version"} <= set(side)
        rows, cols, grid, _ = read_grid_csv(c)
        assert grid.shape == (7, 2)
        assert np.all((grid >= -1e-9) & (grid <= 1 + 1e-9))


def test_reruns_are_byte_identical_across_workers(tmp_path):
    args = ["run", "--config", str(CONFIGS / "photon_chevron.ini"), *SMALL,
            "--override", "meter.shots=200", "--seed", "11"]
    assert main([*args, "--out", str(tmp_path / "a"), "--workers", "1"]) == 0
    assert main([*args, "--out", str(tmp_path / "b"), "--workers", "2"]) == 0
    fa = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert fa == sorted(p.name for p in (tmp_path / "b").iterdir())
    for name in fa:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    # a different seed changes the sampled meter readout
    assert main([*args[:-1], "12", "--out", str(tmp_path / "c")]) == 0
    assert any((tmp_path / "a" / n).read_bytes() != (tmp_path / "c" / n).read_bytes() for n in fa)


def test_reconstruct_subcommand(tmp_path):
    xs = np.linspace(-2.5, 2.5, 11)
    alphas = (xs[None, :] + 1j * xs[:, None]).ravel()
    vals = wigner_grid(coherent_state(0.7, SpaceSpec(20)), alphas)
    data = write_wigner_dataset_csv(tmp_path / "d.csv", alphas, vals)
    out = tmp_path / "rho.json"
    assert main(["reconstruct", str(data), "--out", str(out), "--n-trunc", "6"]) == 0
    rho = read_density_json(out)
    target = coherent_state(0.7, SpaceSpec(6)).data
    assert np.vdot(target, rho @ target).real > 0.999
    assert main(["reconstruct", str(tmp_path / "missing.csv"), "--out", str(out)]) == 2


def test_predistort_subcommand(tmp_path):
    t = np.arange(3000.0)
    trace = tmp_path / "step.csv"
    write_trace_csv(KernelTrace(1.0, step_form("exp_approach", {"alpha": 0.015, "tau": 670.0}, t)), trace)
    out = tmp_path / "kernel.csv"
    assert main(["predistort", str(trace), "--out", str(out), "--fit", "exp_approach"]) == 0
    meta = json.loads(out.with_suffix(".json").read_text())
    assert meta["flatness"] < 1e-9
    assert meta["fit"]["params"]["tau"] == pytest.approx(670, rel=1e-3)
    assert len(read_trace_csv(out)) == 3000


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "digirabi", "list-experiments"], capture_output=True, text=True)
    assert r.returncode == 0 and "jc_chevron" in r.stdout
