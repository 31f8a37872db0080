"""Command-line front-end.

Four subcommands: ``simulate`` exports a single trajectory, ``converge``
runs a strong-error study, ``ruin`` estimates expected ruin times, and
``analytic`` reports the closed-form ruin constants.  Tables are written
as CSV (comma separator, LF line endings, floats with 17 significant
digits so files round-trip bitwise), summaries as JSON, and each report
also renders a figure next to its delimited output unless ``--no-plot``
is given.

Exit codes: 0 success, 1 validation error, 2 runtime or numerical error.
"""

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .analytic import (
    RuinModelInputs,
    REFERENCE_CONSTANTS,
    make_analytics,
    matches_reference,
)
from .ctmc import GeneratorMatrix, stationary_distribution, validate_generator
from .drivers import make_stream
from .errors import (
    ConfigInvalid,
    IoFailure,
    JumpSwitchError,
    RUNTIME_ERRORS,
    VALIDATION_ERRORS,
)
from .mc import StudyConfig, convergence_study, ruin_study
from .models import (
    GeometricLevyParams,
    SurplusParams,
    gl_coefficients,
    gl_exact_path,
    realize_gl_drivers,
    realize_surplus_drivers,
    surplus_coefficients,
)
from .scheme import simulate_path

_GL_KEYS = {"model", "Q", "mu", "sigma", "g", "lambda", "y0", "initial_regime"}
_SURPLUS_KEYS = {"model", "Q", "lambda_per_regime", "claim_mean", "u", "initial_regime"}


@dataclass(frozen=True)
class ModelConfig:
    kind: str
    generator: GeneratorMatrix
    params: GeometricLevyParams | SurplusParams


def _fmt(value) -> str:
    return f"{float(value):.17g}"


def _require_number(doc: dict, key: str) -> float:
    value = doc.get(key)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigInvalid(f"config key '{key}' must be a number, got {value!r}")
    return float(value)


def _require_int(doc: dict, key: str) -> int:
    value = doc.get(key)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigInvalid(f"config key '{key}' must be an integer, got {value!r}")
    return value


def _require_number_list(doc: dict, key: str, length: int) -> tuple[float, ...]:
    value = doc.get(key)
    if not isinstance(value, list) or len(value) != length:
        raise ConfigInvalid(
            f"config key '{key}' must be a list of {length} numbers, got {value!r}"
        )
    out = []
    for item in value:
        if isinstance(item, bool) or not isinstance(item, (int, float)):
            raise ConfigInvalid(f"config key '{key}' contains non-number {item!r}")
        out.append(float(item))
    return tuple(out)


def load_config(path) -> ModelConfig:
    """Parse and validate a model configuration file (strict schema)."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigInvalid(f"cannot read config {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigInvalid(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigInvalid("config root must be a JSON object")

    model = doc.get("model")
    if model == "geometric_levy":
        allowed = _GL_KEYS
    elif model == "surplus":
        allowed = _SURPLUS_KEYS
    else:
        raise ConfigInvalid(
            f"config key 'model' must be 'geometric_levy' or 'surplus', got {model!r}"
        )
    unknown = sorted(set(doc) - allowed)
    if unknown:
        raise ConfigInvalid(f"unknown config key '{unknown[0]}'")
    missing = sorted(allowed - set(doc))
    if missing:
        raise ConfigInvalid(f"missing config key '{missing[0]}'")

    q_raw = doc["Q"]
    if not isinstance(q_raw, list):
        raise ConfigInvalid(f"config key 'Q' must be a matrix, got {q_raw!r}")
    try:
        generator = validate_generator(np.asarray(q_raw, dtype=float))
    except ValueError as exc:
        raise ConfigInvalid(f"config key 'Q' is malformed: {exc}") from exc
    n = generator.n_regimes

    initial_regime = _require_int(doc, "initial_regime")
    if not 0 <= initial_regime < n:
        raise ConfigInvalid(
            f"config key 'initial_regime' must lie in 0..{n - 1}, got {initial_regime}"
        )

    try:
        if model == "geometric_levy":
            params = GeometricLevyParams(
                drift=_require_number_list(doc, "mu", n),
                volatility=_require_number_list(doc, "sigma", n),
                jump_factor=_require_number_list(doc, "g", n),
                jump_intensity=_require_number(doc, "lambda"),
                y0=_require_number(doc, "y0"),
                initial_regime=initial_regime,
            )
        else:
            params = SurplusParams(
                claim_intensity=_require_number_list(doc, "lambda_per_regime", n),
                claim_mean=_require_number(doc, "claim_mean"),
                initial_reserve=_require_number(doc, "u"),
                initial_regime=initial_regime,
            )
    except ValueError as exc:
        raise ConfigInvalid(f"invalid model parameters: {exc}") from exc
    return ModelConfig(kind=model, generator=generator, params=params)


def _write_text(path: Path, text: str) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def _write_csv(path: Path, header, rows) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(row) for row in rows)
    _write_text(path, "\n".join(lines) + "\n")


def _json_safe(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def _write_json(path: Path, doc: dict) -> None:
    _write_text(path, json.dumps(doc, indent=2) + "\n")


def _sibling(out: Path, suffix: str) -> Path:
    sib = out.with_suffix(suffix)
    if sib == out:
        sib = out.with_name(out.name + suffix)
    return sib


def _parse_float_list(text: str, flag: str) -> tuple[float, ...]:
    try:
        values = tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError as exc:
        raise ConfigInvalid(f"flag {flag} expects comma-separated numbers: {exc}") from exc
    if not values:
        raise ConfigInvalid(f"flag {flag} expects at least one number")
    return values


def cmd_simulate(args) -> int:
    config = load_config(args.config)
    stream = make_stream(args.seed)
    if config.kind == "geometric_levy":
        realization = realize_gl_drivers(
            config.generator, config.params, args.T, args.delta, stream
        )
        path = simulate_path(gl_coefficients(config.params), realization, config.params.y0)
        exact = gl_exact_path(config.params, realization)
    else:
        realization = realize_surplus_drivers(
            config.generator, config.params, args.T, args.delta, stream
        )
        path = simulate_path(
            surplus_coefficients(config.params), realization, config.params.initial_reserve
        )
        exact = None

    header = ["t", "regime", "X", "is_jump", "X_pre_jump"]
    if exact is not None:
        header.append("y_exact")
    flags = path.grid.jump_flags
    rows = []
    for k, t in enumerate(path.grid.points):
        row = [
            _fmt(t),
            str(int(path.regimes[k])),
            _fmt(path.states[k]),
            "1" if flags[k] else "0",
            _fmt(path.pre_jump_states[k]) if flags[k] else "",
        ]
        if exact is not None:
            row.append(_fmt(exact.states[k]))
        rows.append(row)

    out = Path(args.out)
    _write_csv(out, header, rows)
    if not args.no_plot:
        from . import plotting

        plotting.save_trajectory_figure(path, exact, _sibling(out, ".png"))
    print(f"wrote {len(rows)} rows to {out}")
    return 0


def cmd_converge(args) -> int:
    config = load_config(args.config)
    if config.kind != "geometric_levy":
        raise ConfigInvalid("converge requires a geometric_levy config (exact oracle needed)")
    deltas = _parse_float_list(args.deltas, "--deltas")
    cfg = StudyConfig(
        generator=config.generator,
        params=config.params,
        deltas=deltas,
        replications=args.reps,
        horizon=args.T,
        master_seed=args.seed,
        workers=args.threads,
    )
    table = convergence_study(cfg)

    out = Path(args.out)
    _write_csv(
        out,
        ["delta", "mean_sup_sq_error", "stderr", "reps"],
        [
            [_fmt(r.delta), _fmt(r.mean_sup_sq_error), _fmt(r.stderr), str(r.replications)]
            for r in table.rows
        ],
    )
    summary = {
        "slope": _json_safe(table.fit.slope),
        "slope_stderr": _json_safe(table.fit.slope_stderr),
        "intercept": _json_safe(table.fit.intercept),
        "intercept_stderr": _json_safe(table.fit.intercept_stderr),
        "replications": args.reps,
        "horizon": args.T,
        "seed": args.seed,
    }
    _write_json(_sibling(out, ".json"), summary)
    if not args.no_plot:
        from . import plotting

        plotting.save_convergence_figure(table, _sibling(out, ".png"))
    slope = table.fit.slope
    print(f"wrote {len(table.rows)} rows to {out} (fitted slope {slope:.4f})")
    return 0


def cmd_ruin(args) -> int:
    config = load_config(args.config)
    if config.kind != "surplus":
        raise ConfigInvalid("ruin requires a surplus config")
    reserves = _parse_float_list(args.u, "--u")
    cfg = StudyConfig(
        generator=config.generator,
        params=config.params,
        deltas=(args.delta,),
        replications=args.reps,
        horizon=args.T,
        master_seed=args.seed,
        workers=args.threads,
    )
    table = ruin_study(cfg, reserves)

    out = Path(args.out)
    _write_csv(
        out,
        ["u", "xi1_exact_printed", "xi1_exact_solver", "xi1_sim", "stderr"],
        [
            [
                _fmt(r.reserve),
                _fmt(r.exact_reference),
                _fmt(r.exact_solver),
                _fmt(r.simulated_mean),
                _fmt(r.stderr),
            ]
            for r in table.rows
        ],
    )
    if not args.no_plot:
        from . import plotting

        plotting.save_ruin_figure(table, _sibling(out, ".png"))
    print(f"wrote {len(table.rows)} rows to {out}")
    return 0


def cmd_analytic(args) -> int:
    config = load_config(args.config)
    if config.kind != "surplus":
        raise ConfigInvalid("analytic requires a surplus config")
    if config.generator.n_regimes != 2:
        raise ConfigInvalid("analytic requires exactly two regimes")
    pi = stationary_distribution(config.generator)
    rates = config.generator.rates
    inputs = RuinModelInputs(
        switch_rates=(float(rates[0, 1]), float(rates[1, 0])),
        claim_intensities=tuple(config.params.claim_intensity),
        claim_mean=config.params.claim_mean,
    )
    analytics = make_analytics(inputs)

    report = {
        "pi": [float(p) for p in pi],
        "eta": analytics.claim_load,
        "rho": analytics.premium_margin,
        "k": analytics.exponent,
        "D": analytics.exp_ratio,
        "A1": analytics.const_state1,
        "B": analytics.exp_coeff,
        "A2": analytics.const_state2,
        "residuals": {
            "cubic": analytics.cubic_residual,
            "linear_system": analytics.system_residual,
        },
    }
    if matches_reference(inputs):
        report["reference_constants"] = dict(REFERENCE_CONSTANTS)
    _write_json(Path(args.out), report)
    print(f"wrote analytic report to {args.out}")
    return 0


class _Parser(argparse.ArgumentParser):
    """Argument parser whose usage errors exit with the validation code."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _seed(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("expected a positive integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="jumpswitch",
        description="Jump-adapted Euler simulation of regime-switching jump diffusions",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(sp):
        sp.add_argument("--config", required=True, help="model configuration JSON")
        sp.add_argument("--seed", type=_seed, default=0, help="master seed (default 0)")
        sp.add_argument("--out", required=True, help="output path")
        sp.add_argument(
            "--threads",
            type=_positive_int,
            default=os.cpu_count() or 1,
            help="worker processes (default: machine width); output is identical at any setting",
        )

    sp = sub.add_parser("simulate", help="export one trajectory as CSV (plus figure)")
    add_common(sp)
    sp.add_argument("--delta", type=float, required=True, help="nominal step size")
    sp.add_argument("--T", type=float, required=True, help="time horizon")
    sp.add_argument("--no-plot", action="store_true", help="skip figure rendering")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("converge", help="strong-error study across step sizes")
    add_common(sp)
    sp.add_argument("--deltas", required=True, help="comma-separated step sizes")
    sp.add_argument("--reps", type=_positive_int, required=True, help="replications per step")
    sp.add_argument("--T", type=float, required=True, help="time horizon")
    sp.add_argument("--no-plot", action="store_true", help="skip figure rendering")
    sp.set_defaults(func=cmd_converge)

    sp = sub.add_parser("ruin", help="expected ruin times across reserves")
    add_common(sp)
    sp.add_argument("--u", required=True, help="comma-separated initial reserves")
    sp.add_argument("--delta", type=float, required=True, help="nominal step size")
    sp.add_argument("--T", type=float, required=True, help="truncation horizon")
    sp.add_argument("--reps", type=_positive_int, required=True, help="replications per reserve")
    sp.add_argument("--no-plot", action="store_true", help="skip figure rendering")
    sp.set_defaults(func=cmd_ruin)

    sp = sub.add_parser("analytic", help="closed-form ruin constants as JSON")
    add_common(sp)
    sp.set_defaults(func=cmd_analytic)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except VALIDATION_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except RUNTIME_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except JumpSwitchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
