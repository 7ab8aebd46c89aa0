"""Experiment orchestration: configs, parallel runs, persistence, comparison and plots.

Every experiment is a pure function of its config: sample ``i`` always
draws from stream ``i`` of the master seed, so outputs are byte-identical
across reruns and worker counts.

Examples:
    >>> from edgekit.harness import HermiteExperiment, run_experiment
    >>> cfg = HermiteExperiment(n=1000, beta=2.0, k=2, samples=200, seed=1, out="h.csv")
    >>> result = run_experiment(cfg)
    >>> result.estimate.to_frame().head()
"""

from __future__ import annotations

import datetime as dt
import logging
import os
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Annotated, Any, Literal

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, field_validator, model_validator

from edgekit._routes.base import BaseRoute, resolve_threads, stack_draws
from edgekit._routes.ensemble import EnsembleRoute
from edgekit._routes.sao import SaoRoute
from edgekit.airyop import DEFAULT_X_MAX
from edgekit.ensembles import HermiteSpec, LaguerreSpec
from edgekit.exceptions import EdgekitError, ExperimentError, InvalidParameterError
from edgekit.painleve import (
    BETA4_SHIFT,
    SUPPORT_MARGIN,
    get_reference_solution,
    reference_survival,
)
from edgekit.randkit import GENERATOR_FAMILY
from edgekit.riccati import RiccatiConfig, estimate_cdf, tail_counts
from edgekit.stats import (
    CdfEstimate,
    TailEstimate,
    empirical_survival,
    fit_tail_exponent,
    ks_distance,
    sample_moments,
    tail_prediction,
)

logger = logging.getLogger(__name__)

__all__ = [
    "FLOAT_FORMAT",
    "HermiteExperiment",
    "LaguerreExperiment",
    "SaoExperiment",
    "RiccatiCdfExperiment",
    "PainleveExperiment",
    "TailExperiment",
    "ExperimentConfig",
    "RunManifest",
    "RunOutput",
    "ComparisonReport",
    "parse_config",
    "run_experiment",
    "manifest_path",
    "read_output",
    "compare",
    "plot_output",
]

FLOAT_FORMAT = "%.17g"
DEFAULT_SAMPLES = 10_000
DEFAULT_TAIL_SAMPLES = 1_000_000


# =============================================================================
# Experiment configs
# =============================================================================


class _Experiment(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    out: Path
    seed: int = Field(0, ge=0)


class _SampledExperiment(_Experiment):
    samples: int = Field(DEFAULT_SAMPLES, ge=1)


class _GridMixin(BaseModel):
    lambda_min: float = -6.0
    lambda_max: float = 8.0
    points: int = Field(141, ge=2)

    @model_validator(mode="after")
    def _check_grid(self):
        if not self.lambda_min < self.lambda_max:
            raise ValueError("lambda_min must be below lambda_max")
        return self

    @property
    def lambda_grid(self) -> np.ndarray:
        return np.linspace(self.lambda_min, self.lambda_max, self.points)


class HermiteExperiment(_SampledExperiment, _GridMixin):
    """Scaled top-k eigenvalues of the beta-Hermite model."""

    method: Literal["hermite"] = "hermite"
    n: int = Field(ge=1)
    beta: float = Field(gt=0)
    k: int = Field(1, ge=1)

    @model_validator(mode="after")
    def _check_k(self) -> HermiteExperiment:
        if self.k > self.n:
            raise ValueError(f"k={self.k} exceeds n={self.n}")
        return self


class LaguerreExperiment(HermiteExperiment):
    """Scaled top-k eigenvalues of the beta-Laguerre model."""

    method: Literal["laguerre"] = "laguerre"  # type: ignore[assignment]
    kappa: float

    @model_validator(mode="after")
    def _check_kappa(self) -> LaguerreExperiment:
        if not self.kappa > self.n - 1:
            raise ValueError(f"kappa={self.kappa} must exceed n - 1 = {self.n - 1}")
        return self


class SaoExperiment(_SampledExperiment, _GridMixin):
    """Lowest k eigenvalues of the discretized stochastic Airy operator."""

    method: Literal["sao"] = "sao"
    beta: float = Field(gt=0)
    h: float = Field(gt=0)
    x_max: float = Field(DEFAULT_X_MAX, gt=0)
    k: int = Field(1, ge=1)
    split: Literal["diagonal", "hermite"] = "diagonal"


class RiccatiCdfExperiment(_SampledExperiment, _GridMixin):
    """Riccati estimate of ``P(Lambda_index > lambda)`` on a grid."""

    method: Literal["riccati"] = "riccati"
    beta: float = Field(gt=0)
    index: int = Field(0, ge=0)
    config: RiccatiConfig = Field(default_factory=RiccatiConfig)


class PainleveExperiment(_Experiment, _GridMixin):
    """Reference survival ``P(Lambda_0 > lambda) = F_beta(-lambda)`` from Painleve II."""

    method: Literal["painleve"] = "painleve"
    beta: Literal[1, 2, 4]
    table: Path | None = None


class TailExperiment(_Experiment):
    """Riccati tail probabilities of TW_beta at several points."""

    method: Literal["tails"] = "tails"
    beta: float = Field(gt=0)
    side: Literal["right", "left"]
    a: list[float] = Field(min_length=1)
    samples: int = Field(DEFAULT_TAIL_SAMPLES, ge=1)
    config: RiccatiConfig = Field(default_factory=RiccatiConfig)

    @field_validator("a")
    @classmethod
    def _positive(cls, value: list[float]) -> list[float]:
        if any(not a > 0 for a in value):
            raise ValueError("tail points must be > 0")
        return value


ExperimentConfig = Annotated[
    HermiteExperiment
    | LaguerreExperiment
    | SaoExperiment
    | RiccatiCdfExperiment
    | PainleveExperiment
    | TailExperiment,
    Field(discriminator="method"),
]

_CONFIG_ADAPTER: TypeAdapter[ExperimentConfig] = TypeAdapter(ExperimentConfig)


def parse_config(data: dict[str, Any]) -> ExperimentConfig:
    """Validate a plain mapping (``method`` selects the experiment type)."""
    return _CONFIG_ADAPTER.validate_python(data)


# =============================================================================
# Manifest and outputs
# =============================================================================


class RunManifest(BaseModel):
    """Everything needed to reproduce a run's numbers, written as a JSON sidecar."""

    model_config = ConfigDict(extra="forbid")

    method: str
    master_seed: int
    generator_family: str = GENERATOR_FAMILY
    parameters: dict[str, Any]
    samples: int
    threads: int
    started_at: str
    wall_clock_seconds: float
    software_version: str
    outputs: list[str] = Field(default_factory=list)
    summary: dict[str, Any] = Field(default_factory=dict)


@dataclass
class RunOutput:
    """Result of :func:`run_experiment`."""

    frame: pd.DataFrame
    manifest: RunManifest | None = None
    estimate: CdfEstimate | None = None
    draws: np.ndarray | None = None
    paths: list[Path] = field(default_factory=list)


def manifest_path(out: str | Path) -> Path:
    """Sidecar path ``<out>.manifest.json``."""
    out = Path(out)
    return out.with_name(out.name + ".manifest.json")


def survival_path(out: str | Path) -> Path:
    """Sidecar path of the survival estimate of an edge-sample run."""
    out = Path(out)
    return out.with_name(f"{out.stem}.survival{out.suffix or '.csv'}")


def _estimate_frame(estimate: CdfEstimate) -> pd.DataFrame:
    return estimate.to_frame()


def _draws_frame(values: np.ndarray) -> pd.DataFrame:
    return pd.DataFrame(values, columns=[f"value_{j}" for j in range(values.shape[1])])


def _write_csv(frame: pd.DataFrame, path: Path) -> None:
    tmp = path.with_name(path.name + ".tmp")
    try:
        frame.to_csv(tmp, index=False, float_format=FLOAT_FORMAT)
        os.replace(tmp, path)
    finally:
        tmp.unlink(missing_ok=True)


def read_output(path: str | Path) -> pd.DataFrame:
    """Read a CSV written by :func:`run_experiment`."""
    return pd.read_csv(path)


# =============================================================================
# Runs
# =============================================================================


def _edge_route(config: HermiteExperiment | SaoExperiment) -> BaseRoute:
    if isinstance(config, LaguerreExperiment):
        return EnsembleRoute(LaguerreSpec(config.n, config.kappa, config.beta), config.k)
    if isinstance(config, HermiteExperiment):
        return EnsembleRoute(HermiteSpec(config.n, config.beta), config.k)
    return SaoRoute(config.beta, config.h, config.x_max, config.k, config.split)


def _run_edge(config, threads: int) -> tuple[RunOutput, dict[str, Any]]:
    route = _edge_route(config)
    values, undecided = stack_draws(route.draw_many(config.samples, config.seed, threads), route.k)
    survival, stderr = empirical_survival(values[:, 0], config.lambda_grid)
    estimate = CdfEstimate(
        config.lambda_grid, survival, stderr, config.samples, config.method, config.beta, undecided
    )
    frame = _draws_frame(values)
    output = RunOutput(frame=frame, estimate=estimate, draws=values)
    return output, {"route": route.params(), "undecided": undecided}


def _run_riccati(config: RiccatiCdfExperiment, threads: int) -> tuple[RunOutput, dict[str, Any]]:
    estimate = estimate_cdf(
        config.beta, config.lambda_grid, config.samples, config.config, config.seed,
        index=config.index, threads=threads,
    )
    summary = {"undecided": estimate.undecided, "flagged": estimate.flagged}
    output = RunOutput(frame=_estimate_frame(estimate), estimate=estimate)
    return output, summary


def _run_painleve(config: PainleveExperiment) -> tuple[RunOutput, dict[str, Any]]:
    sol = get_reference_solution(table=config.table)
    grid = config.lambda_grid
    # P(Lambda_0 > lam) = F(-lam) needs -lam inside the solved range
    shift = BETA4_SHIFT if config.beta == 4 else 1.0
    lam_max = -(sol.s_min + SUPPORT_MARGIN) / shift
    inside = grid <= lam_max
    survival = np.zeros_like(grid)
    survival[inside] = reference_survival(config.beta, grid[inside], sol)
    if not inside.all():
        logger.info("survival set to 0 above lambda=%.3f (beyond the solved range)", lam_max)
    # Quadrature noise at the 1e-16 level must not break monotonicity
    survival = np.minimum.accumulate(survival)
    estimate = CdfEstimate(grid, survival, np.zeros_like(grid), 0, "painleve", config.beta)
    output = RunOutput(frame=_estimate_frame(estimate), estimate=estimate)
    return output, {"s_min": sol.s_min, "s_max": sol.s_max, "step": sol.step}


def _run_tails(config: TailExperiment, threads: int) -> tuple[RunOutput, dict[str, Any]]:
    a = np.asarray(config.a, dtype=float)
    hits, undecided = tail_counts(
        config.beta, a, config.side, config.samples, config.config, config.seed, threads
    )
    trials = config.samples - undecided
    if trials == 0:
        raise EdgekitError("every tail path was undecided")
    estimates = [TailEstimate.from_counts(a_i, int(h_i), trials) for a_i, h_i in zip(a, hits)]
    frame = pd.DataFrame([e.to_row() for e in estimates])
    summary: dict[str, Any] = {
        "undecided": undecided,
        "predicted_slope": tail_prediction(config.beta, config.side),
    }
    positive = frame["hits"] > 0
    if positive.sum() >= 3:
        slope, r2 = fit_tail_exponent(
            frame.loc[positive, "a"].to_numpy(), np.log(frame.loc[positive, "probability"]), config.side
        )
        summary.update(fitted_slope=slope, r2=r2)
        logger.info(
            "%s tail slope %.4f (r2=%.3f), leading-order prediction %.4f",
            config.side, slope, r2, summary["predicted_slope"],
        )
    zero = frame.loc[~positive, "a"].tolist()
    if zero:
        logger.warning("no tail hits at a=%s; estimates are 0 with one-sided intervals", zero)
        summary["zero_hit_points"] = zero
    return RunOutput(frame=frame), summary


def _dispatch(config, threads: int) -> tuple[RunOutput, dict[str, Any]]:
    if isinstance(config, (HermiteExperiment, SaoExperiment)):
        return _run_edge(config, threads)
    if isinstance(config, RiccatiCdfExperiment):
        return _run_riccati(config, threads)
    if isinstance(config, PainleveExperiment):
        return _run_painleve(config)
    if isinstance(config, TailExperiment):
        return _run_tails(config, threads)
    raise InvalidParameterError("config", type(config).__name__, "unknown experiment type")


def run_experiment(config: ExperimentConfig, threads: int | None = None) -> RunOutput:
    """Run one experiment and persist its CSV output plus the JSON manifest.

    Edge-sample runs (hermite, laguerre, sao) write one row per draw with
    columns ``value_0..value_{k-1}`` and, next to it, the survival
    estimate of ``value_0``. CDF runs write ``lambda,survival,stderr``.
    Tail runs write ``a,probability,stderr,ci_lo,ci_hi,hits,trials``.

    Raises:
        ExperimentError: If any draw fails; files of the run are removed.
    """
    from edgekit import __version__

    n_threads = resolve_threads(threads)
    out = Path(config.out)
    started = dt.datetime.now(dt.timezone.utc).isoformat(timespec="seconds")
    t0 = time.perf_counter()
    logger.info("Starting %s run: seed=%d threads=%d", config.method, config.seed, n_threads)
    written: list[Path] = []
    try:
        output, summary = _dispatch(config, n_threads)
        out.parent.mkdir(parents=True, exist_ok=True)
        _write_csv(output.frame, out)
        written.append(out)
        if output.draws is not None and output.estimate is not None:
            side = survival_path(out)
            _write_csv(_estimate_frame(output.estimate), side)
            written.append(side)
        manifest = RunManifest(
            method=config.method,
            master_seed=config.seed,
            parameters=config.model_dump(mode="json"),
            samples=getattr(config, "samples", 0),
            threads=n_threads,
            started_at=started,
            wall_clock_seconds=round(time.perf_counter() - t0, 3),
            software_version=__version__,
            outputs=[str(p) for p in written],
            summary=summary,
        )
        sidecar = manifest_path(out)
        sidecar.write_text(manifest.model_dump_json(indent=2))
        written.append(sidecar)
    except Exception as e:
        for path in written:
            path.unlink(missing_ok=True)
        raise ExperimentError(config.method, str(e)) from e

    if output.estimate is not None:
        object.__setattr__(output.estimate, "manifest", manifest)
    output.manifest = manifest
    output.paths = written
    logger.info("Finished %s run in %.1fs -> %s", config.method, manifest.wall_clock_seconds, out)
    return output


# =============================================================================
# Comparison and plots
# =============================================================================


@dataclass
class ComparisonReport:
    """KS distance, per-point z-scores and moment summaries of two outputs."""

    ks: float
    z_scores: pd.DataFrame | None
    moments_a: dict[str, Any] | None
    moments_b: dict[str, Any] | None

    def format(self) -> str:
        lines = [f"KS distance: {self.ks:.6f}"]
        for label, moments in (("a", self.moments_a), ("b", self.moments_b)):
            if moments:
                lines.append(
                    f"{label}: count={moments['count']} mean={moments['mean']:.6f} "
                    f"sd={moments['sd']:.6f} skewness={moments['skewness']:.4f}"
                )
        if self.z_scores is not None:
            lines.append(self.z_scores.to_string(index=False, float_format=lambda v: f"{v:.4f}"))
        return "\n".join(lines)


def _is_draws(frame: pd.DataFrame) -> bool:
    return "value_0" in frame.columns


def _is_cdf(frame: pd.DataFrame) -> bool:
    return {"lambda", "survival", "stderr"} <= set(frame.columns)


def _z_scores(grid, sa, ea, sb, eb) -> pd.DataFrame:
    se = np.sqrt(np.asarray(ea) ** 2 + np.asarray(eb) ** 2)
    diff = np.asarray(sa) - np.asarray(sb)
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(se > 0, diff / se, np.where(diff == 0, 0.0, np.inf * np.sign(diff)))
    return pd.DataFrame({"lambda": grid, "survival_a": sa, "survival_b": sb, "z": z})


def compare(path_a: str | Path, path_b: str | Path) -> ComparisonReport:
    """Compare two run outputs.

    Two edge-sample files give the two-sample KS distance of ``value_0``.
    CDF files (or a sample file against a CDF file) are compared on the
    CDF grid: the reported distance is the largest survival gap and each
    grid point gets a z-score.
    """
    a, b = read_output(path_a), read_output(path_b)
    for path, frame in ((path_a, a), (path_b, b)):
        if not (_is_draws(frame) or _is_cdf(frame)):
            raise InvalidParameterError("path", str(path), "not an edge-sample or CDF output")
    moments_a = sample_moments(a["value_0"]) if _is_draws(a) else None
    moments_b = sample_moments(b["value_0"]) if _is_draws(b) else None

    if _is_draws(a) and _is_draws(b):
        return ComparisonReport(ks_distance(a["value_0"], b["value_0"]), None, moments_a, moments_b)

    if _is_draws(b):
        grid = a["lambda"].to_numpy()
        sa, ea = a["survival"].to_numpy(), a["stderr"].to_numpy()
        sb, eb = empirical_survival(b["value_0"].to_numpy(), grid)
    elif _is_draws(a):
        grid = b["lambda"].to_numpy()
        sa, ea = empirical_survival(a["value_0"].to_numpy(), grid)
        sb, eb = b["survival"].to_numpy(), b["stderr"].to_numpy()
    else:
        grid = a["lambda"].to_numpy()
        if len(grid) != len(b) or not np.allclose(grid, b["lambda"].to_numpy()):
            raise InvalidParameterError("path_b", str(path_b), "CDF grids differ")
        sa, ea = a["survival"].to_numpy(), a["stderr"].to_numpy()
        sb, eb = b["survival"].to_numpy(), b["stderr"].to_numpy()
    z = _z_scores(grid, sa, ea, sb, eb)
    return ComparisonReport(float(np.max(np.abs(sa - sb))), z, moments_a, moments_b)


def plot_output(in_path: str | Path, out_path: str | Path) -> Path:
    """Save a static plot of a CDF output (or of the survival of ``value_0``)."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    frame = read_output(in_path)
    if _is_draws(frame):
        values = np.sort(frame["value_0"].to_numpy())
        grid = np.linspace(values[0], values[-1], 200)
        survival, stderr = empirical_survival(values, grid)
    elif _is_cdf(frame):
        grid = frame["lambda"].to_numpy()
        survival, stderr = frame["survival"].to_numpy(), frame["stderr"].to_numpy()
    else:
        raise InvalidParameterError("in_path", str(in_path), "not an edge-sample or CDF output")

    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(grid, survival, drawstyle="steps-post", color="C0")
    if np.any(stderr > 0):
        ax.fill_between(grid, survival - 2 * stderr, survival + 2 * stderr, alpha=0.25, color="C0", step="post")
    ax.set_xlabel("lambda")
    ax.set_ylabel("P(Lambda_0 > lambda)")
    ax.set_ylim(-0.02, 1.02)
    ax.set_title(Path(in_path).name)
    fig.tight_layout()
    out_path = Path(out_path)
    fig.savefig(out_path)
    plt.close(fig)
    return out_path
