"""Command-line interface: simulate/train/inspect round trips."""

import csv
import os

import pytest

from uavflow.cli import main


def test_simulate_writes_outputs(tmp_path, capsys):
    out = tmp_path / "results"
    rc = main(
        [
            "simulate", "--desk-scale", "--policy", "heuristic",
            "--seed", "0", "--runs", "2", "--out", str(out),
        ]
    )
    assert rc == 0
    assert (out / "summary.csv").exists()
    assert (out / "summary.json").exists()
    assert (out / "curves.csv").exists()
    assert "eta_pack" in capsys.readouterr().out


def test_simulate_sweep_and_load(tmp_path):
    out = tmp_path / "sweep"
    rc = main(
        [
            "simulate", "--desk-scale", "--policy", "greedy", "--load", "high",
            "--sweep", "n=2..3", "--runs", "1", "--out", str(out),
        ]
    )
    assert rc == 0
    with open(out / "summary.csv") as fh:
        rows = list(csv.reader(fh))
    scenarios = {r[0] for r in rows[1:]}
    assert scenarios == {"load-high-n2", "load-high-n3"}


def test_simulate_determinism(tmp_path):
    outs = []
    for name in ("a", "b"):
        out = tmp_path / name
        main(
            [
                "simulate", "--desk-scale", "--policy", "heuristic",
                "--seed", "3", "--runs", "2", "--out", str(out),
            ]
        )
        outs.append(out)
    assert (outs[0] / "summary.csv").read_bytes() == (outs[1] / "summary.csv").read_bytes()


def test_simulate_with_config_file(tmp_path):
    cfg_file = tmp_path / "small.cfg"
    cfg_file.write_text(
        "num_uavs = 4\nhorizon = 1.0\nmax_neighbors = 2\n"
    )
    out = tmp_path / "cfg-run"
    rc = main(
        [
            "simulate", "--config", str(cfg_file), "--policy", "heuristic",
            "--runs", "1", "--out", str(out),
        ]
    )
    assert rc == 0
    assert (out / "summary.csv").exists()


def test_train_and_inspect_and_simulate_checkpoint(tmp_path, capsys):
    cfg_file = tmp_path / "tiny.cfg"
    cfg_file.write_text("num_uavs = 4\nhorizon = 1.0\nmax_neighbors = 2\n")
    out = tmp_path / "train-out"
    rc = main(
        [
            "train", "--config", str(cfg_file), "--episodes", "2",
            "--seed", "0", "--out", str(out),
        ]
    )
    assert rc == 0
    ckpt = out / "checkpoint.pt"
    assert ckpt.exists()
    curve = out / "training_curve.csv"
    with open(curve) as fh:
        rows = list(csv.reader(fh))
    assert rows[0][0] == "episode"
    assert len(rows) == 3

    rc = main(["inspect-checkpoint", str(ckpt)])
    assert rc == 0
    text = capsys.readouterr().out
    assert "trained episodes: 2" in text
    assert "actor parameters" in text

    sim_out = tmp_path / "sim-ckpt"
    rc = main(
        [
            "simulate", "--config", str(cfg_file), "--policy", "ippo-dm",
            "--checkpoint", str(ckpt), "--runs", "1", "--out", str(sim_out),
        ]
    )
    assert rc == 0
    assert (sim_out / "summary.csv").exists()


def test_ippo_without_checkpoint_fails(tmp_path):
    with pytest.raises(ValueError, match="checkpoint"):
        main(
            [
                "simulate", "--desk-scale", "--policy", "ippo-dm",
                "--runs", "1", "--out", str(tmp_path / "x"),
            ]
        )


def test_unknown_subcommand_exits():
    with pytest.raises(SystemExit):
        main(["frobnicate"])
