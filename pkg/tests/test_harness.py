"""Tests for experiment configs, runs, persistence, comparison and plots."""

import json

import numpy as np
import pandas as pd
import pytest
from pydantic import ValidationError

import edgekit.harness as harness
from edgekit._routes.base import THREADS_ENV, BaseRoute, resolve_threads
from edgekit.exceptions import ExperimentError, InvalidParameterError, UndecidedPathError
from edgekit.harness import (
    HermiteExperiment,
    LaguerreExperiment,
    PainleveExperiment,
    RiccatiCdfExperiment,
    SaoExperiment,
    TailExperiment,
    compare,
    manifest_path,
    parse_config,
    plot_output,
    run_experiment,
    survival_path,
)
from edgekit.randkit import GENERATOR_FAMILY

# =============================================================================
# Test Fixtures
# =============================================================================

GRID = {"lambda_min": -4.0, "lambda_max": 6.0, "points": 11}


@pytest.fixture
def hermite_config(tmp_path):
    return HermiteExperiment(n=50, beta=2.0, k=2, samples=20, seed=1, out=tmp_path / "h.csv", **GRID)


@pytest.fixture
def hermite_run(hermite_config):
    return run_experiment(hermite_config, threads=1)


@pytest.fixture
def painleve_run(tmp_path):
    return run_experiment(PainleveExperiment(beta=2, out=tmp_path / "f2.csv", **GRID))


class FlakyRoute(BaseRoute):
    """Route whose every fifth stream is undecided."""

    name = "flaky"

    def _draw(self, stream):
        if stream.stream_id % 5 == 0:
            raise UndecidedPathError(0.0, 60.0, 0)
        return np.array([float(stream.stream_id)])


# =============================================================================
# Config Tests
# =============================================================================


class TestConfigs:
    """Validation of experiment configs."""

    def test_parse_dispatches_on_method(self, tmp_path):
        cfg = parse_config({"method": "sao", "beta": 2.0, "h": 0.05, "out": str(tmp_path / "s.csv")})
        assert isinstance(cfg, SaoExperiment)
        assert cfg.x_max == 15.0

    def test_parse_laguerre(self, tmp_path):
        cfg = parse_config(
            {"method": "laguerre", "n": 10, "kappa": 12.0, "beta": 1.0, "out": str(tmp_path / "l.csv")}
        )
        assert isinstance(cfg, LaguerreExperiment)

    def test_unknown_method(self, tmp_path):
        with pytest.raises(ValidationError):
            parse_config({"method": "wishart", "out": str(tmp_path / "x.csv")})

    def test_zero_samples(self, tmp_path):
        with pytest.raises(ValidationError):
            HermiteExperiment(n=10, beta=2.0, samples=0, out=tmp_path / "h.csv")

    def test_k_above_n(self, tmp_path):
        with pytest.raises(ValidationError):
            HermiteExperiment(n=3, beta=2.0, k=4, out=tmp_path / "h.csv")

    def test_kappa_too_small(self, tmp_path):
        with pytest.raises(ValidationError):
            LaguerreExperiment(n=10, kappa=8.0, beta=2.0, out=tmp_path / "l.csv")

    def test_empty_grid(self, tmp_path):
        with pytest.raises(ValidationError):
            RiccatiCdfExperiment(beta=2.0, lambda_min=1.0, lambda_max=1.0, out=tmp_path / "r.csv")

    def test_painleve_beta_restricted(self, tmp_path):
        with pytest.raises(ValidationError):
            PainleveExperiment(beta=3, out=tmp_path / "f.csv")

    def test_tail_points_positive(self, tmp_path):
        with pytest.raises(ValidationError):
            TailExperiment(beta=2.0, side="right", a=[1.0, 0.0], out=tmp_path / "t.csv")

    def test_extra_fields_rejected(self, tmp_path):
        with pytest.raises(ValidationError):
            HermiteExperiment(n=10, beta=2.0, out=tmp_path / "h.csv", colour="red")

    def test_nested_riccati_config(self, tmp_path):
        cfg = parse_config(
            {"method": "riccati", "beta": 2.0, "config": {"cap": 500.0}, "out": str(tmp_path / "r.csv")}
        )
        assert cfg.config.blow_threshold == -500.0


class TestThreads:
    """Worker-count resolution."""

    def test_explicit_value(self):
        assert resolve_threads(3) == 3

    def test_environment(self, monkeypatch):
        monkeypatch.setenv(THREADS_ENV, "2")
        assert resolve_threads() == 2

    @pytest.mark.parametrize("raw", ["abc", "0"])
    def test_bad_environment(self, monkeypatch, raw):
        monkeypatch.setenv(THREADS_ENV, raw)
        with pytest.raises(InvalidParameterError):
            resolve_threads()

    def test_manifest_records_environment(self, monkeypatch, hermite_config):
        monkeypatch.setenv(THREADS_ENV, "2")
        assert run_experiment(hermite_config).manifest.threads == 2


# =============================================================================
# Run Tests
# =============================================================================


class TestEdgeRuns:
    """Edge-sample runs and their files."""

    def test_files_written(self, hermite_config, hermite_run):
        out = hermite_config.out
        assert hermite_run.paths == [out, survival_path(out), manifest_path(out)]
        frame = pd.read_csv(out)
        assert list(frame.columns) == ["value_0", "value_1"]
        assert len(frame) == 20
        assert np.all(frame["value_1"] >= frame["value_0"])
        survival = pd.read_csv(survival_path(out))
        assert list(survival.columns) == ["lambda", "survival", "stderr"]
        assert len(survival) == 11

    def test_manifest(self, hermite_config, hermite_run):
        manifest = json.loads(manifest_path(hermite_config.out).read_text())
        assert manifest["method"] == "hermite"
        assert manifest["master_seed"] == 1
        assert manifest["generator_family"] == GENERATOR_FAMILY
        assert manifest["parameters"]["n"] == 50
        assert manifest["samples"] == 20
        assert manifest["summary"]["undecided"] == 0
        assert hermite_run.estimate.manifest is hermite_run.manifest

    def test_rerun_is_byte_identical(self, hermite_config, hermite_run, tmp_path):
        again = hermite_config.model_copy(update={"out": tmp_path / "again.csv"})
        run_experiment(again, threads=1)
        assert (tmp_path / "again.csv").read_bytes() == hermite_config.out.read_bytes()

    def test_thread_count_invariant(self, hermite_config, hermite_run, tmp_path):
        parallel = hermite_config.model_copy(update={"out": tmp_path / "par.csv"})
        run_experiment(parallel, threads=3)
        assert (tmp_path / "par.csv").read_bytes() == hermite_config.out.read_bytes()

    def test_laguerre_run(self, tmp_path):
        cfg = LaguerreExperiment(
            n=20, kappa=30.0, beta=1.0, samples=10, seed=2, out=tmp_path / "l.csv", **GRID
        )
        result = run_experiment(cfg, threads=1)
        assert result.draws.shape == (10, 1)
        assert result.manifest.summary["route"]["kappa"] == 30.0

    def test_sao_run(self, tmp_path):
        cfg = SaoExperiment(beta=2.0, h=0.05, k=2, samples=5, seed=3, out=tmp_path / "s.csv", **GRID)
        result = run_experiment(cfg, threads=1)
        assert result.draws.shape == (5, 2)
        assert result.estimate.method == "sao"

    def test_undecided_draws_counted(self, monkeypatch, hermite_config):
        monkeypatch.setattr(harness, "_edge_route", lambda config: FlakyRoute(k=1))
        result = run_experiment(hermite_config, threads=1)
        assert result.estimate.undecided == 4
        assert result.estimate.flagged
        assert len(result.frame) == 16
        assert result.manifest.summary["undecided"] == 4


class TestOtherRuns:
    """Riccati, Painleve and tail runs."""

    def test_riccati_run(self, tmp_path):
        cfg = RiccatiCdfExperiment(beta=2.0, samples=10, seed=2, out=tmp_path / "r.csv", **GRID)
        result = run_experiment(cfg, threads=1)
        frame = pd.read_csv(cfg.out)
        assert list(frame.columns) == ["lambda", "survival", "stderr"]
        assert np.all(np.diff(frame["survival"]) <= 0)
        assert not survival_path(cfg.out).exists()
        assert result.manifest.summary["flagged"] is False

    def test_painleve_run(self, painleve_run):
        frame = painleve_run.frame
        at_zero = frame.loc[np.isclose(frame["lambda"], 0.0), "survival"].item()
        assert at_zero == pytest.approx(0.9694, abs=1e-3)
        assert np.all(frame["stderr"] == 0)
        assert painleve_run.manifest.samples == 0

    def test_painleve_beta4_default_grid(self, tmp_path):
        result = run_experiment(PainleveExperiment(beta=4, out=tmp_path / "f4.csv"))
        survival = result.frame["survival"].to_numpy()
        assert survival[0] == pytest.approx(1.0, abs=1e-6)
        assert survival[-1] == 0.0
        assert np.all(np.diff(survival) <= 0)

    def test_tail_run(self, tmp_path):
        cfg = TailExperiment(
            beta=2.0, side="right", a=[0.5, 1.0, 2.0], samples=20, seed=3, out=tmp_path / "t.csv"
        )
        result = run_experiment(cfg, threads=1)
        frame = pd.read_csv(cfg.out)
        assert list(frame.columns) == [
            "a", "probability", "stderr", "ci_lo", "ci_hi", "hits", "trials"
        ]
        assert np.all(frame["ci_lo"] <= frame["probability"])
        assert np.all(frame["probability"] <= frame["ci_hi"])
        assert np.all(frame["trials"] == 20)
        assert result.manifest.summary["predicted_slope"] == pytest.approx(-4.0 / 3.0)

    def test_failure_removes_partial_files(self, monkeypatch, hermite_config):
        def broken(out):
            raise OSError("disk full")

        monkeypatch.setattr(harness, "manifest_path", broken)
        with pytest.raises(ExperimentError, match="disk full"):
            run_experiment(hermite_config, threads=1)
        assert not hermite_config.out.exists()
        assert not survival_path(hermite_config.out).exists()


# =============================================================================
# Compare and Plot Tests
# =============================================================================


class TestCompare:
    """Tests for compare and ComparisonReport."""

    def test_two_sample_files(self, hermite_config, hermite_run, tmp_path):
        other = hermite_config.model_copy(update={"seed": 9, "out": tmp_path / "h9.csv"})
        run_experiment(other, threads=1)
        report = compare(hermite_config.out, other.out)
        assert 0.0 <= report.ks <= 1.0
        assert report.z_scores is None
        assert report.format().startswith("KS distance: ")

    def test_same_file_is_zero(self, hermite_config, hermite_run):
        assert compare(hermite_config.out, hermite_config.out).ks == 0.0

    def test_sample_against_reference(self, hermite_config, hermite_run, painleve_run):
        report = compare(hermite_config.out, painleve_run.paths[0])
        assert len(report.z_scores) == 11
        assert report.moments_a["count"] == 20
        assert report.moments_b is None
        assert "z" in report.format()

    def test_reference_against_itself(self, painleve_run):
        path = painleve_run.paths[0]
        report = compare(path, path)
        assert report.ks == 0.0
        assert np.all(report.z_scores["z"] == 0.0)

    def test_grid_mismatch(self, painleve_run, tmp_path):
        other = run_experiment(
            PainleveExperiment(beta=2, lambda_min=-3.0, lambda_max=3.0, points=7, out=tmp_path / "o.csv")
        )
        with pytest.raises(InvalidParameterError, match="grids differ"):
            compare(painleve_run.paths[0], other.paths[0])

    def test_unknown_file(self, tmp_path, painleve_run):
        path = tmp_path / "junk.csv"
        path.write_text("x,y\n1,2\n")
        with pytest.raises(InvalidParameterError):
            compare(path, painleve_run.paths[0])


class TestPlot:
    """Tests for plot_output."""

    def test_cdf_plot(self, painleve_run, tmp_path):
        out = plot_output(painleve_run.paths[0], tmp_path / "f2.png")
        assert out.read_bytes()[:4] == b"\x89PNG"

    def test_sample_plot(self, hermite_config, hermite_run, tmp_path):
        out = plot_output(hermite_config.out, tmp_path / "h.png")
        assert out.exists()
