#!/usr/bin/env python3
"""
Tests for the command-line interface and its subcommands.
"""
import json
import os

import pytest

import config
from dephasing_tomography.cli import TomographyCLI
from dephasing_tomography.subcommands import simulate
from dephasing_tomography.subcommands._common import exit_code_for, resolve_config
from dephasing_tomography.utils.csv_utils import read_dataset_csv, read_table_csv
from dephasing_tomography.utils.exceptions import (
    ConfigurationError,
    DataFormatError,
    DegenerateUpdateError,
    ResourceNotFoundError,
    SingularMatrixError,
    ValidationError,
)
from tests.conftest import cli_args

SIMULATE_CONFIG = {
    "model": {"kind": "ou", "T2": 1.0, "tau_c": 0.5},
    "schedule": {"times": [0.2, 0.6, 1.5, 3.0], "shots": [500, 500, 500, 500]},
    "seed": 7
}


def load(path):
    with open(path) as f:
        return json.load(f)


def run(*argv):
    return TomographyCLI().run(list(argv))


class TestCLI:
    """
    Test cases for the CLI entry point.
    """

    def test_cli_initialization(self):
        """
        Test that every subcommand is discovered.
        """
        cli = TomographyCLI()
        assert set(cli.subcommands) == set(config.COMMANDS)

    def test_version(self, capsys):
        """
        Test the version flag.
        """
        assert run("--version") == 0
        assert "Dephasing Tomography" in capsys.readouterr().out

    def test_no_subcommand(self, capsys):
        """
        Test that no subcommand prints help and fails.
        """
        assert run() == 1
        assert "usage" in capsys.readouterr().out

    def test_config_required(self):
        """
        Test that --config is mandatory.
        """
        with pytest.raises(SystemExit):
            run("simulate")


class TestExitCodes:
    """
    Test cases for the exit-code mapping.
    """

    @pytest.mark.parametrize("error, code", [
        (ValidationError("bad"), 2),
        (ConfigurationError("bad"), 2),
        (DataFormatError("bad"), 3),
        (ResourceNotFoundError("config", "x.json"), 3),
        (OSError("disk"), 3),
        (SingularMatrixError(), 4),
        (DegenerateUpdateError("stuck"), 4),
        (RuntimeError("boom"), 1),
    ])
    def test_mapping(self, error, code):
        """
        Test every error class against its exit code.
        """
        assert exit_code_for(error) == code

    def test_seed_override(self):
        """
        Test that --seed replaces the config seed.
        """
        resolved = resolve_config({"seed": 3}, [], seed=11)
        assert resolved["seed"] == 11
        assert resolve_config({}, [])["seed"] == 0

    @pytest.mark.parametrize("seed", [None, "abc", -1, 2 ** 64])
    def test_invalid_seed(self, seed):
        """
        Test that invalid config seeds are rejected.
        """
        with pytest.raises(ValidationError):
            resolve_config({"seed": seed}, [])


class TestSimulate:
    """
    Test cases for the 'simulate' subcommand.
    """

    def test_simulate(self, write_config, temp_output_dir):
        """
        Test that simulate writes the record and its sidecar to the default directory.
        """
        assert run("simulate", "--config", write_config(SIMULATE_CONFIG)) == 0
        output_dir = config.get_command_output_dir("simulate", 7)
        data = read_dataset_csv(os.path.join(output_dir, "dataset.csv"))
        assert len(data) == 4
        assert data.total_shots == 2000
        sidecar = load(os.path.join(output_dir, "dataset.json"))
        assert sidecar["provenance"]["seed"] == 7
        assert sidecar["provenance"]["command"] == "simulate"
        assert len(sidecar["provenance"]["config_hash"]) == 64

    def test_replay_is_byte_identical(self, write_config, temp_output_dir):
        """
        Test that the same config and seed reproduce the same file.
        """
        path = write_config(SIMULATE_CONFIG)
        first, second = (os.path.join(temp_output_dir, name) for name in ("a", "b"))
        assert run("simulate", "--config", path, "--out", first) == 0
        assert run("simulate", "--config", path, "--out", second) == 0
        with open(os.path.join(first, "dataset.csv"), "rb") as a, open(os.path.join(second, "dataset.csv"), "rb") as b:
            assert a.read() == b.read()

    def test_seed_flag(self, write_config, temp_output_dir):
        """
        Test that --seed picks the output directory and the stream.
        """
        path = write_config(SIMULATE_CONFIG)
        assert run("simulate", "--config", path, "--seed", "99") == 0
        sidecar = load(os.path.join(config.get_command_output_dir("simulate", 99), "dataset.json"))
        assert sidecar["provenance"]["seed"] == 99

    def test_total_shots_split(self, write_config, temp_output_dir):
        """
        Test the total_shots form of the schedule.
        """
        document = dict(SIMULATE_CONFIG, schedule={"times": [0.5, 1.0, 2.0], "total_shots": 100})
        out = os.path.join(temp_output_dir, "split")
        assert simulate.main(cli_args(write_config(document), out=out)) == 0
        assert read_dataset_csv(os.path.join(out, "dataset.csv")).shots.tolist() == [34, 33, 33]

    @pytest.mark.parametrize("schedule", [
        {"times": [0.5, 0.2], "shots": [10, 10]},
        {"times": [0.0, 0.2], "shots": [10, 10]},
        {"times": [0.5], "shots": [10], "total_shots": 10},
        {"times": [0.5], "shots": [0]},
    ])
    def test_invalid_schedule(self, write_config, temp_output_dir, schedule):
        """
        Test that invalid schedules exit with the validation code.
        """
        document = dict(SIMULATE_CONFIG, schedule=schedule)
        assert run("simulate", "--config", write_config(document)) == 2

    def test_unknown_key(self, write_config, temp_output_dir):
        """
        Test that unknown top-level keys exit with the validation code.
        """
        assert run("simulate", "--config", write_config(dict(SIMULATE_CONFIG, shots=5))) == 2

    def test_invalid_model(self, write_config, temp_output_dir):
        """
        Test that an out-of-domain model exits with the validation code.
        """
        document = dict(SIMULATE_CONFIG, model={"kind": "ou", "T2": -1.0, "tau_c": 0.5})
        assert run("simulate", "--config", write_config(document)) == 2

    def test_missing_config(self, temp_output_dir):
        """
        Test that a missing config file exits with the I/O code.
        """
        assert run("simulate", "--config", os.path.join(temp_output_dir, "absent.json")) == 3

    def test_malformed_config(self, temp_output_dir):
        """
        Test that invalid JSON exits with the I/O code.
        """
        path = os.path.join(temp_output_dir, "broken.json")
        with open(path, "w") as f:
            f.write("{\"model\": ")
        assert run("simulate", "--config", path) == 3


class TestFit:
    """
    Test cases for the 'fit' subcommand.
    """

    def simulate_into(self, write_config, temp_output_dir):
        out = os.path.join(os.path.dirname(temp_output_dir), "sim")
        assert run("simulate", "--config", write_config(SIMULATE_CONFIG, "simulate.json"), "--out", out) == 0
        return out

    def test_fit_round_trip(self, write_config, temp_output_dir):
        """
        Test fitting a simulated record given by a path relative to the config.
        """
        self.simulate_into(write_config, temp_output_dir)
        document = {"data": "sim/dataset.csv", "family": "ou", "fit": {"initial_guess": [1.0, 0.5]}}
        out = os.path.join(temp_output_dir, "fit")
        assert run("fit", "--config", write_config(document), "--out", out) == 0
        report = load(os.path.join(out, "estimate.json"))
        estimate = report["estimate"]
        assert estimate["kind"] == "OrnsteinUhlenbeck"
        assert estimate["theta_hat"]["T2"] == pytest.approx(1.0, rel=0.2)
        assert estimate["converged"]
        assert report["data"]["total_shots"] == 2000

    def test_fit_with_bounds(self, write_config, temp_output_dir):
        """
        Test an NLL fit with an explicit box.
        """
        self.simulate_into(write_config, temp_output_dir)
        document = {
            "data": "sim/dataset.csv",
            "family": "ou",
            "fit": {"bounds": {"low": [0.1, 0.05], "high": [10.0, 5.0]}, "cost_kind": "nll", "restarts": 4}
        }
        out = os.path.join(temp_output_dir, "fit")
        assert run("fit", "--config", write_config(document), "--out", out) == 0
        assert load(os.path.join(out, "estimate.json"))["estimate"]["cost_kind"] == "nll"

    def test_corrupted_data(self, write_config, temp_output_dir):
        """
        Test that a corrupted record exits with the I/O code.
        """
        with open(os.path.join(os.path.dirname(temp_output_dir), "bad.csv"), "w") as f:
            f.write("t,shots,count0\n0.5,10,eleven\n")
        document = {"data": "bad.csv", "family": "white", "fit": {"initial_guess": [1.0]}}
        assert run("fit", "--config", write_config(document)) == 3

    def test_too_few_times(self, write_config, temp_output_dir):
        """
        Test that fewer distinct times than parameters exits with the validation code.
        """
        with open(os.path.join(os.path.dirname(temp_output_dir), "one.csv"), "w") as f:
            f.write("t,shots,count0\n0.5,100,80\n")
        document = {"data": "one.csv", "family": "ou", "fit": {"initial_guess": [1.0, 0.5]}}
        assert run("fit", "--config", write_config(document)) == 2

    def test_unknown_fit_key(self, write_config, temp_output_dir):
        """
        Test that unknown keys of the fit block are rejected.
        """
        self.simulate_into(write_config, temp_output_dir)
        document = {"data": "sim/dataset.csv", "family": "ou", "fit": {"initial_guess": [1.0, 0.5], "tol": 1}}
        assert run("fit", "--config", write_config(document)) == 2


class TestOptimalTimes:
    """
    Test cases for the 'optimal-times' subcommand.
    """

    def test_single_model(self, write_config, temp_output_dir):
        """
        Test optimal times of an Ornstein-Uhlenbeck model.
        """
        document = {"model": {"kind": "ou", "T2": 1.0, "tau_c": 0.5}}
        out = os.path.join(temp_output_dir, "opt")
        assert run("optimal-times", "--config", write_config(document), "--out", out) == 0
        report = load(os.path.join(out, "optimal_times.json"))
        assert report["times"] == pytest.approx([0.56, 1.99], abs=0.02)
        assert report["det_metric_per_shot"] > 0.0
        header, rows = read_table_csv(os.path.join(out, "optimal_times.csv"))
        assert header == ["t1", "t2"]

    def test_sweep(self, write_config, temp_output_dir):
        """
        Test the sweep form of the command.
        """
        document = {"sweep": {"ratios": [0.5, 1.0, 2.0]}}
        out = os.path.join(temp_output_dir, "opt")
        assert run("optimal-times", "--config", write_config(document), "--out", out, "--threads", "2") == 0
        header, rows = read_table_csv(os.path.join(out, "optimal_times.csv"))
        assert header == ["ratio", "t1", "t2", "status"]
        assert len(rows) == 3

    def test_too_few_times(self, write_config, temp_output_dir):
        """
        Test that k below the parameter count exits with the validation code.
        """
        document = {"model": {"kind": "ou", "T2": 1.0, "tau_c": 0.5}, "k": 1}
        assert run("optimal-times", "--config", write_config(document)) == 2

    def test_model_and_sweep(self, write_config, temp_output_dir):
        """
        Test that model and sweep are mutually exclusive.
        """
        document = {"model": {"kind": "white", "T2": 1.0}, "sweep": {"ratios": [1.0]}}
        assert run("optimal-times", "--config", write_config(document)) == 2


class TestBayes:
    """
    Test cases for the 'bayes' subcommand.
    """

    def test_small_run(self, write_config, temp_output_dir):
        """
        Test that the trace has one row per step.
        """
        document = {
            "truth": {"kind": "white", "T2": 1.0},
            "protocol": {"particles": 200, "steps": 5, "shots_per_step": 20, "grid_points": 10},
            "seed": 3
        }
        out = os.path.join(temp_output_dir, "bayes")
        assert run("bayes", "--config", write_config(document), "--out", out) == 0
        header, rows = read_table_csv(os.path.join(out, "trace.csv"))
        assert header[:4] == ["step", "t", "shots", "count0"]
        assert len(rows) == 5
        report = load(os.path.join(out, "trace.json"))
        assert report["trace"]["total_shots"] == 100
        assert len(report["final_mean"]) == 1

    def test_protocol_seed_rejected(self, write_config, temp_output_dir):
        """
        Test that the protocol block cannot set the seed.
        """
        document = {"truth": {"kind": "white", "T2": 1.0}, "protocol": {"seed": 5}}
        assert run("bayes", "--config", write_config(document)) == 2

    def test_timescale_truth(self, write_config, temp_output_dir):
        """
        Test a displaced-Lorentzian truth given by its timescales.
        """
        document = {
            "truth": {"kind": "dl", "T2": 1.0, "tau_c": 1.0, "delta_c": 1.0},
            "protocol": {"particles": 200, "steps": 2, "shots_per_step": 20, "grid_points": 8}
        }
        out = os.path.join(temp_output_dir, "bayes")
        assert run("bayes", "--config", write_config(document), "--out", out) == 0
        assert load(os.path.join(out, "trace.json"))["truth"]["kind"] == "DisplacedLorentzian"


class TestCompare:
    """
    Test cases for the 'compare' subcommand.
    """

    def test_small_compare(self, write_config, temp_output_dir, capsys):
        """
        Test that the report carries r and r^2.
        """
        document = {
            "truth": {"kind": "white", "T2": 1.0},
            "n_shot": 400,
            "frequentist_runs": 20,
            "bayesian_runs": 2,
            "protocol": {"particles": 200, "grid_points": 10, "shots_per_step": 50}
        }
        out = os.path.join(temp_output_dir, "compare")
        assert run("compare", "--config", write_config(document), "--out", out) == 0
        report = load(os.path.join(out, "report.json"))["reports"]["bayesian"]
        assert report["r_squared"] == pytest.approx(report["r"] ** 2)
        assert "r = " in capsys.readouterr().out

    def test_invalid_mode(self, write_config, temp_output_dir):
        """
        Test that unknown modes exit with the validation code.
        """
        document = {"truth": {"kind": "white", "T2": 1.0}, "n_shot": 400, "mode": "everything"}
        assert run("compare", "--config", write_config(document)) == 2


class TestNonMarkov:
    """
    Test cases for the 'nonmarkov' subcommand.
    """

    def test_single_model(self, write_config, temp_output_dir):
        """
        Test the measures of a strongly non-Markovian model.
        """
        document = {"model": {"kind": "dl", "g2n": 1.0, "kappa": 0.5, "delta_c": 5.0}}
        out = os.path.join(temp_output_dir, "nm")
        assert run("nonmarkov", "--config", write_config(document), "--out", out) == 0
        report = load(os.path.join(out, "nonmarkov.json"))
        assert report["n_cp"] > 0.0
        assert report["n_td"] > 0.0
        assert len(report["windows"]) >= 1

    def test_sweep_with_boundary(self, write_config, temp_output_dir):
        """
        Test the sweep and the Markovian boundary tables.
        """
        document = {
            "sweep": {"tau_values": [2.0], "delta_values": [1.0, 5.0]},
            "boundary": {"kappas": [1.0, 2.0]}
        }
        out = os.path.join(temp_output_dir, "nm")
        assert run("nonmarkov", "--config", write_config(document), "--out", out) == 0
        _, rows = read_table_csv(os.path.join(out, "nonmarkov.csv"))
        # delta_c = kappa sits below the boundary
        assert float(rows[0]["n_cp"]) == 0.0
        assert float(rows[1]["n_cp"]) > 0.0
        _, boundary = read_table_csv(os.path.join(out, "boundary.csv"))
        for row in boundary:
            assert float(row["ratio"]) == pytest.approx(1.82, rel=0.02)

    def test_markovian_model(self, write_config, temp_output_dir):
        """
        Test that an Ornstein-Uhlenbeck model has no negative-rate window.
        """
        document = {"model": {"kind": "ou", "T2": 1.0, "tau_c": 0.5}}
        out = os.path.join(temp_output_dir, "nm")
        assert run("nonmarkov", "--config", write_config(document), "--out", out) == 0
        report = load(os.path.join(out, "nonmarkov.json"))
        assert report["n_cp"] == 0.0
        assert report["windows"] == []
