"""End-to-end command-line runs: files, exit codes, determinism."""

import os

import numpy as np
import pytest

from roitomo import cli, fileio


def run_cli(args):
    return cli.main(args)


def write_cfg(path, text):
    path.write_text(text)
    return str(path)


BASE = """
grid.n=2
grid.size=64
grid.extent=1.0
grid.pad=2
phantom.kind=gaussian
phantom.sigma=0.15
phantom.amplitude=1.0
lineset.angles=60
lineset.offsets=96
"""


def test_phantom_command(tmp_path):
    cfg = write_cfg(tmp_path / "c.cfg", BASE + f"out.dir={tmp_path}/run\n")
    assert run_cli(["phantom", "--config", cfg]) == 0
    assert (tmp_path / "run" / "phantom.roif").exists()
    assert (tmp_path / "run" / "phantom.pgm").exists()
    assert (tmp_path / "run" / "config.resolved").exists()
    assert (tmp_path / "run" / "versions.txt").exists()


def test_phantom_patch_writes_annihilator(tmp_path):
    cfg = write_cfg(
        tmp_path / "c.cfg",
        "grid.size=64\nphantom.kind=admissible_patch\nphantom.rule=harmonic\n"
        "phantom.degree=3\nphantom.plateau_radius=0.45\nphantom.support_radius=0.7\n"
        f"phantom.v_radius=0.2\nout.dir={tmp_path}/run\n",
    )
    assert run_cli(["phantom", "--config", cfg]) == 0
    op = fileio.read_polyop(tmp_path / "run" / "annihilator.polyop")
    assert op.order == 2


def test_forward_zero_phantom(tmp_path):
    cfg = write_cfg(
        tmp_path / "c.cfg",
        BASE.replace("phantom.amplitude=1.0", "phantom.amplitude=0.0")
        + f"out.dir={tmp_path}/run\n",
    )
    assert run_cli(["forward", "--config", cfg]) == 0
    sino = fileio.read_sinogram(tmp_path / "run" / "sinogram.csv")
    assert not sino.values.any()


def test_forward_deterministic(tmp_path):
    cfg1 = write_cfg(tmp_path / "c1.cfg", BASE + f"out.dir={tmp_path}/r1\n")
    cfg2 = write_cfg(tmp_path / "c2.cfg", BASE + f"out.dir={tmp_path}/r2\n")
    assert run_cli(["forward", "--config", cfg1]) == 0
    assert run_cli(["forward", "--config", cfg2]) == 0
    for name in ("sinogram.csv", "lineset.csv", "sinogram.pgm"):
        a = (tmp_path / "r1" / name).read_bytes()
        b = (tmp_path / "r2" / name).read_bytes()
        assert a == b, name


def test_reconstruct_full_roundtrip(tmp_path):
    cfg = write_cfg(tmp_path / "fw.cfg", BASE + f"out.dir={tmp_path}/fw\n")
    assert run_cli(["forward", "--config", cfg]) == 0
    rcfg = write_cfg(
        tmp_path / "rc.cfg",
        BASE
        + f"out.dir={tmp_path}/rc\nsolver.mode=full\n"
        + f"data.sinogram={tmp_path}/fw/sinogram.csv\n"
        + f"truth.field={tmp_path}/fw/phantom.roif\n",
    )
    assert run_cli(["reconstruct", "--config", rcfg]) == 0
    report = dict(
        line.split("=", 1)
        for line in (tmp_path / "rc" / "report.txt").read_text().splitlines()
    )
    assert float(report["rel_error"]) < 0.05
    assert (tmp_path / "rc" / "error.pgm").exists()


def test_reconstruct_partial_needs_prior(tmp_path):
    cfg = write_cfg(
        tmp_path / "bad.cfg",
        BASE
        + f"out.dir={tmp_path}/bad\nsolver.mode=partial\nsolver.lambda_prior=1.0\n"
        + f"data.sinogram={tmp_path}/nowhere.csv\nroi.radius=0.35\nv.radius=0.2\n",
    )
    assert run_cli(["reconstruct", "--config", cfg]) == 2


def test_unknown_key_rejected(tmp_path):
    cfg = write_cfg(tmp_path / "bad.cfg", "grid.bogus=1\nout.dir=x\n")
    assert run_cli(["forward", "--config", cfg]) == 2


def test_command_mismatch_rejected(tmp_path):
    cfg = write_cfg(tmp_path / "c.cfg", BASE + f"command=forward\nout.dir={tmp_path}/x\n")
    assert run_cli(["phantom", "--config", cfg]) == 2


def test_geometry_error_exit_code(tmp_path):
    cfg = write_cfg(
        tmp_path / "geo.cfg",
        "grid.size=64\nphantom.kind=gaussian\nphantom.center=0.9,0.0\n"
        f"phantom.sigma=0.2\nout.dir={tmp_path}/geo\n",
    )
    assert run_cli(["phantom", "--config", cfg]) == 3


def test_missing_config_file(tmp_path):
    assert run_cli(["forward", "--config", str(tmp_path / "none.cfg")]) == 2


def test_probe_command(tmp_path):
    cfg = write_cfg(
        tmp_path / "p.cfg",
        "grid.size=64\nlineset.angles=90\nlineset.offsets=96\n"
        f"roi.center=0.0,0.0\nroi.radius=0.3\nprobe.iters=6\nout.dir={tmp_path}/probe\n",
    )
    assert run_cli(["probe", "--config", cfg]) == 0
    report = dict(
        line.split("=", 1)
        for line in (tmp_path / "probe" / "report.txt").read_text().splitlines()
    )
    assert float(report["rayleigh_normalized"]) < 1e-3
    assert int(report["support_violation"]) == 0


def test_verify_command_small(tmp_path):
    cfg = write_cfg(
        tmp_path / "v.cfg",
        "grid.size=96\nlineset.angles=120\nlineset.offsets=144\n"
        f"out.dir={tmp_path}/verify\n",
    )
    code = run_cli(["verify", "--config", cfg])
    report = (tmp_path / "verify" / "verify.txt").read_text()
    assert code == 0, report
    assert "adjoint_scalar" in report


def test_out_flag_overrides(tmp_path):
    cfg = write_cfg(tmp_path / "c.cfg", BASE + f"out.dir={tmp_path}/ignored\n")
    assert run_cli(["phantom", "--config", cfg, "--out", str(tmp_path / "flag")]) == 0
    assert (tmp_path / "flag" / "phantom.roif").exists()
    assert not (tmp_path / "ignored").exists()
