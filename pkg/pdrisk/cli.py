"""Typer CLI for the pdrisk application."""

import logging
import math
import os
from pathlib import Path
from typing import Any, Optional

import numpy as np
import typer
import yaml
from pydantic import ValidationError

from . import get_version, utils
from .config import (
    AppSettings,
    EstimatorConfig,
    ExperimentConfig,
    NormalModelConfig,
    SmnModelConfig,
    load_experiment,
    load_settings,
)
from .densities import DivergentMomentError, PointMass, mixing_from_spec, normal, student_t
from .estimators import Identity, LinearShrink
from .metrics import L2Integrated, l1_distance, l2_general_distance, l2_normal_distance
from .reporting import console as console_report
from .reporting import formats, schema
from .risk import (
    NormalModel,
    k0_threshold,
    l1_baranchik_bound,
    l2_dual_mixture_bound,
    risk_qc_ax_normal,
    smn_risk_qc,
    threshold_ka,
)
from .sim import (
    BoundaryDecayError,
    UnsupportedCombinationError,
    dominance_scan,
    mc_risk,
    quadrature_loss_oracle,
    resolve_seed,
    shifted,
    standard_mu_grid,
)
from .verification import SUITES, SuiteOptions, run_suite

logger = logging.getLogger(__name__)


def _configure_logging() -> None:
    level_name = os.getenv("PDRISK_LOG_LEVEL", "INFO").upper()
    level = getattr(logging, level_name, logging.INFO)
    root_logger = logging.getLogger()
    if not root_logger.handlers:
        logging.basicConfig(
            level=level,
            format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        )
    root_logger.setLevel(level)


app = typer.Typer(help="Risk of predictive density estimators: closed forms, thresholds and Monte Carlo dominance")


def _version_callback(value: bool) -> None:
    if value:
        typer.echo(f"pdrisk {get_version()}")
        raise typer.Exit()


@app.callback()
def main(
    ctx: typer.Context,
    seed: Optional[int] = typer.Option(None, "--seed", help="Base seed for every random stream"),
    threads: Optional[int] = typer.Option(None, "--threads", help="Worker threads for Monte Carlo chunks"),
    fmt: Optional[str] = typer.Option(None, "--format", help="Report format (csv or json)"),
    out: Optional[Path] = typer.Option(None, "--out", help="Write the report here instead of stdout"),
    config: Optional[Path] = typer.Option(None, "--config", help="Settings file (YAML or JSON)"),
    version: Optional[bool] = typer.Option(
        None, "--version", callback=_version_callback, is_eager=True, help="Print the version and exit"
    ),
) -> None:
    """Shared options; resolved into settings once per run."""

    _configure_logging()
    overrides = {"seed": seed, "threads": threads, "output_format": fmt, "out_path": out}
    try:
        settings = load_settings(config, overrides)
    except ValidationError as exc:
        raise typer.BadParameter(str(exc)) from exc
    ctx.obj = {"settings": settings, "format": fmt}


def _settings(ctx: typer.Context) -> AppSettings:
    return ctx.obj["settings"]


def _echo_config(data: dict[str, Any]) -> None:
    typer.echo(f"config: {utils.json_dumps(data)}", err=True)


def _emit(records: list[dict[str, Any]], columns: list[str], fmt: str, out: Optional[Path]) -> None:
    text = formats.export_table(records, columns=columns, fmt=fmt, out=out)
    if text is not None:
        typer.echo(text, nl=False)
    else:
        logger.info("Report written path=%s rows=%s", out, len(records))


def _load_scenario(ctx: typer.Context, scenario: Path) -> tuple[ExperimentConfig, str, Optional[Path]]:
    settings = _settings(ctx)
    try:
        cfg = load_experiment(scenario)
    except (OSError, ValueError, yaml.YAMLError) as exc:
        raise typer.BadParameter(f"cannot load {scenario}: {exc}") from exc
    seed = resolve_seed(settings.seed if settings.seed is not None else cfg.seed)
    fmt = ctx.obj["format"] or cfg.output_format
    out = settings.out_path or cfg.output_path
    cfg = cfg.model_copy(update={"seed": seed, "output_format": fmt, "output_path": out})
    _echo_config(cfg.to_spec())
    return cfg, fmt, out


def _closed_form(cfg: ExperimentConfig, est: EstimatorConfig, mu: np.ndarray) -> Optional[float]:
    """Exact L2 risk when the model and estimator admit one."""

    if not isinstance(cfg.loss, L2Integrated):
        return None
    model = cfg.model
    if isinstance(model, NormalModelConfig):
        if isinstance(est.location, Identity):
            a = 1.0
        elif isinstance(est.location, LinearShrink) and np.all(np.asarray(est.location.offset) == 0.0):
            a = est.location.a
        else:
            return None
        m = NormalModel(p=model.p, var_x=model.var_x, var_y=model.var_y)
        c2 = est.c2 if est.base == "plugin" else est.c2 * (model.var_x + model.var_y) / model.var_y
        return risk_qc_ax_normal(m, a, c2, float(mu @ mu))
    if isinstance(model, SmnModelConfig) and est.base == "plugin" and isinstance(est.location, Identity):
        try:
            return smn_risk_qc(model.g, model.h, model.p, math.sqrt(est.c2))
        except DivergentMomentError as exc:
            logger.warning("No closed-form risk estimator=%s reason=%s", est.label, exc)
    return None


def _grid(cfg: ExperimentConfig) -> list[np.ndarray]:
    points = cfg.grid_points()
    return points if points is not None else standard_mu_grid(cfg.model.p)


@app.command()
def risk(
    ctx: typer.Context,
    scenario: Path = typer.Argument(..., help="Experiment config (JSON or YAML)"),
) -> None:
    """Closed-form and Monte Carlo risk of each estimator over the mu-grid."""

    cfg, fmt, out = _load_scenario(ctx, scenario)
    settings = _settings(ctx)
    model = cfg.model.sim_model()
    rows = []
    for est_cfg in cfg.estimators:
        est = est_cfg.build(model)
        for idx, mu in enumerate(_grid(cfg)):
            try:
                estimate = mc_risk(model, est, cfg.loss, mu, cfg.n, cfg.seed + idx, threads=settings.threads)
            except UnsupportedCombinationError as exc:
                raise typer.BadParameter(str(exc)) from exc
            rows.append(
                {
                    "scenario": cfg.name,
                    "estimator": est_cfg.label,
                    "loss": cfg.loss.kind,
                    "mu_norm": float(np.linalg.norm(mu)),
                    "mu": list(estimate.mu),
                    "closed_form": _closed_form(cfg, est_cfg, mu),
                    "mc_risk": estimate.mean,
                    "se": estimate.se,
                    "n": estimate.n,
                    "seed": estimate.seed,
                }
            )
    _emit(rows, schema.RISK_COLUMNS, fmt, out)


@app.command()
def threshold(
    ctx: typer.Context,
    p: int = typer.Option(..., "--p", help="Dimension"),
    r: float = typer.Option(1.0, "--r", help="Variance ratio var_x / var_y"),
    a: float = typer.Option(1.0, "--a", help="Shrink factor of the location aX"),
    equation: str = typer.Option("k", "--equation", help="k (against c2 = 1) or k0 (against the unbiased c2)"),
) -> None:
    """Dominance cutoff for scale expansion in the normal model."""

    settings = _settings(ctx)
    _echo_config({"p": p, "r": r, "a": a, "equation": equation})
    try:
        if equation == "k":
            report = threshold_ka(p, r, a)
        elif equation == "k0":
            report = k0_threshold(p, r)
        else:
            raise typer.BadParameter(f"unknown equation {equation!r}; choose k or k0")
    except ValueError as exc:
        raise typer.BadParameter(str(exc)) from exc
    p0 = report.context.get("p0")
    typer.echo(f"{equation}(p={p}, r={r:g}, a={a:g}) = {report.describe()}")
    if not report.infinite:
        typer.echo(f"residual={report.residual:.3e} bracket={report.bracket} p0={p0:.6f}")
    if settings.out_path is not None:
        row = {
            "equation_id": report.equation_id,
            "p": p,
            "r": r,
            "a": a,
            "value": report.value,
            "display": report.describe(),
            "residual": report.residual,
            "p0": p0,
            "bracket": list(report.bracket) if report.bracket else None,
        }
        _emit([row], schema.THRESHOLD_COLUMNS, settings.output_format, settings.out_path)


@app.command()
def dominance(
    ctx: typer.Context,
    scenario: Path = typer.Argument(..., help="Experiment config with at least two estimators"),
) -> None:
    """Paired Monte Carlo comparison of the first estimator against each of the others."""

    cfg, fmt, out = _load_scenario(ctx, scenario)
    if len(cfg.estimators) < 2:
        raise typer.BadParameter("dominance needs at least two estimators")
    settings = _settings(ctx)
    model = cfg.model.sim_model()
    first = cfg.estimators[0].build(model)
    rows = []
    for other_cfg in cfg.estimators[1:]:
        try:
            report = dominance_scan(
                first, other_cfg.build(model), cfg.loss, model, _grid(cfg), n=cfg.n, seed=cfg.seed, threads=settings.threads
            )
        except UnsupportedCombinationError as exc:
            raise typer.BadParameter(str(exc)) from exc
        if report.verdict == "inconclusive":
            logger.warning("Inconclusive scan estimator1=%s estimator2=%s", report.estimator1, report.estimator2)
        typer.echo(f"verdict: {report.estimator1} vs {report.estimator2}: {report.verdict}", err=True)
        for point in report.points:
            rows.append(
                {
                    "scenario": cfg.name,
                    "estimator1": report.estimator1,
                    "estimator2": report.estimator2,
                    "loss": report.loss_id,
                    "mu_norm": float(np.linalg.norm(point.mu)),
                    "mu": list(point.mu),
                    "risk1": point.risk1,
                    "risk2": point.risk2,
                    "diff": point.diff,
                    "se": point.se,
                    "verdict": point.verdict,
                }
            )
    _emit(rows, schema.DOMINANCE_COLUMNS, fmt, out)


@app.command()
def distance(
    ctx: typer.Context,
    p: int = typer.Option(1, "--p", help="Dimension"),
    delta: float = typer.Option(1.0, "--delta", help="Separation of the two locations"),
    loss: str = typer.Option("l2", "--loss", help="l2 or l1"),
    family: str = typer.Option("normal", "--family", help="normal or student"),
    scale: float = typer.Option(1.0, "--scale", help="Scale of the second density (l2 only)"),
    nu: float = typer.Option(5.0, "--nu", help="Degrees of freedom for the student family"),
    oracle: bool = typer.Option(True, "--oracle/--no-oracle", help="Cross-check against grid quadrature (p <= 2)"),
) -> None:
    """Integrated L2 or L1 distance between two shifted densities."""

    settings = _settings(ctx)
    _echo_config({"p": p, "delta": delta, "loss": loss, "family": family, "scale": scale, "nu": nu})
    if family not in ("normal", "student"):
        raise typer.BadParameter(f"unknown family {family!r}")
    if loss not in ("l2", "l1"):
        raise typer.BadParameter(f"unknown loss {loss!r}")
    if loss == "l1" and scale != 1.0:
        raise typer.BadParameter("the L1 identity needs two densities of the same shape (--scale 1)")
    try:
        q = normal(p) if family == "normal" else student_t(p, nu)
        f = normal(p, scale * scale) if family == "normal" else student_t(p, nu, scale)
    except ValidationError as exc:
        raise typer.BadParameter(str(exc)) from exc
    offset = np.zeros(p)
    offset[0] = delta
    if loss == "l2":
        value = l2_normal_distance(0.0, q.variance, offset, f.variance, p) if family == "normal" else l2_general_distance(f, q, offset)
    else:
        value = l1_distance(q, delta)
    check = None
    if oracle and p <= 2:
        radius = 18.0 * max(scale, 1.0) if family == "normal" else (80.0 if p == 1 else 40.0) * max(scale, 1.0)
        step = 0.01 if p == 1 else 0.05
        try:
            check = quadrature_loss_oracle(
                shifted(q), shifted(f, offset), 2 if loss == "l2" else 1, p,
                centre=offset / 2, step=step, radius=radius, boundary_tol=1e-8,
            )
        except BoundaryDecayError as exc:
            logger.warning("Oracle skipped reason=%s", exc)
    row = {"loss": loss, "family": family, "p": p, "delta": delta, "value": float(value), "oracle": check}
    _emit([row], schema.DISTANCE_COLUMNS, settings.output_format, settings.out_path)


def _parse_law(text: Optional[str], option: str):
    if text is None:
        return PointMass(value=1.0)
    try:
        return mixing_from_spec(utils.json_loads(text))
    except ValueError as exc:
        raise typer.BadParameter(f"{option}: {exc}") from exc


@app.command()
def bounds(
    ctx: typer.Context,
    p: int = typer.Option(..., "--p", help="Dimension"),
    g: Optional[str] = typer.Option(None, "--g", help='Mixing law of X as JSON, e.g. {"kind": "gamma", "shape": 3}'),
    h: Optional[str] = typer.Option(None, "--h", help="Mixing law of Y as JSON"),
    loss: str = typer.Option("l2", "--loss", help="l2 or l1"),
    n: Optional[int] = typer.Option(None, "--n", help="Importance sample size"),
) -> None:
    """Largest Baranchik multiplier for which the plug-in improves on its reference."""

    settings = _settings(ctx)
    law_g, law_h = _parse_law(g, "--g"), _parse_law(h, "--h")
    seed = resolve_seed(settings.seed)
    size = n or settings.n_scalar
    _echo_config({"p": p, "g": law_g.to_spec(), "h": law_h.to_spec(), "loss": loss, "n": size, "seed": seed})
    if loss not in ("l2", "l1"):
        raise typer.BadParameter(f"unknown loss {loss!r}")
    compute = l2_dual_mixture_bound if loss == "l2" else l1_baranchik_bound
    try:
        report = compute(law_g, law_h, p, n=size, seed=seed, threads=settings.threads)
    except (ValueError, ArithmeticError) as exc:
        raise typer.BadParameter(str(exc)) from exc
    _emit([report.model_dump()], schema.BOUND_COLUMNS, settings.output_format, settings.out_path)


@app.command()
def verify(
    ctx: typer.Context,
    suite: str = typer.Argument("all", help=f"One of {', '.join([*SUITES, 'all'])}"),
) -> None:
    """Run an acceptance suite; exit status 1 when any check fails."""

    settings = _settings(ctx)
    if suite != "all" and suite not in SUITES:
        raise typer.BadParameter(f"unknown suite {suite!r}")
    opts = SuiteOptions(
        seed=resolve_seed(settings.seed), threads=settings.threads, n_scalar=settings.n_scalar, n_scan=settings.n_scan
    )
    _echo_config({"suite": suite, **settings.model_dump(mode="json"), "seed": opts.seed})
    results = run_suite(suite, opts)
    _emit([result.model_dump() for result in results], schema.CHECK_COLUMNS, settings.output_format, settings.out_path)
    console_report.render_checks(results)
    failed = [result for result in results if not result.passed]
    if failed:
        logger.error("Verification failed suite=%s failed=%s total=%s", suite, len(failed), len(results))
        raise typer.Exit(code=1)


if __name__ == "__main__":  # pragma: no cover
    app()
