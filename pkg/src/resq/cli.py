"""Command-line front end: config ingestion, rate/trajectory/bound reports.

Config files are flat ``key = value`` text with ``#`` comments.  Outputs
are a CSV trajectory (17 significant digits) and a JSON summary; both are
byte-deterministic for identical configs.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .dynamics import DensityMatrix, evolve
from .entanglement import (
    InitialStateParams,
    concurrence,
    initial_state,
    numerical_death_time,
    survival_time_bound,
    death_time_bound,
)
from .errors import DegeneracyError, DomainError, PreconditionError, ResqError
from .resonance import ModelConfig, rates, resonance_table
from .spectral import FormFactor, quad_rtol

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_PRECONDITION = 3
EXIT_OUTPUT = 4


class ConfigParseError(ResqError):
    def __init__(self, message, line=None, field_name=None):
        prefix = []
        if line is not None:
            prefix.append(f"line {line}")
        if field_name is not None:
            prefix.append(f"field {field_name!r}")
        where = ", ".join(prefix)
        super().__init__(f"{where}: {message}" if where else message)
        self.line = line
        self.field_name = field_name


_COUPLINGS = ("lambda1", "lambda2", "kappa1", "kappa2", "mu1", "mu2", "nu1", "nu2")
_FF_NAMES = ("g", "f", "g1", "g2", "f1", "f2")


@dataclass
class RunConfig:
    model: ModelConfig
    initial_params: InitialStateParams | None = None
    initial_matrix: np.ndarray | None = None
    t_max: float | None = None
    steps: int = 200
    spacing: str = "linear"
    trajectory_path: str = "trajectory.csv"
    summary_path: str = "summary.json"
    plotdata_path: str = "plotdata.csv"
    c_a: float = 1.0
    c_b: float = 1.0
    kappa0: float = 1.0
    echo: dict = field(default_factory=dict)


def _parse_lines(text: str) -> dict[str, tuple[str, int]]:
    entries: dict[str, tuple[str, int]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigParseError("expected 'key = value'", line=lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        if not key or not value:
            raise ConfigParseError("empty key or value", line=lineno)
        if key in entries:
            raise ConfigParseError(f"duplicate key {key!r}", line=lineno)
        entries[key] = (value, lineno)
    return entries


def _take_float(entries, key, default=None):
    if key not in entries:
        if default is None:
            raise ConfigParseError("missing required key", field_name=key)
        return default
    value, lineno = entries.pop(key)
    try:
        return float(value)
    except ValueError:
        raise ConfigParseError(f"not a number: {value!r}", line=lineno, field_name=key) from None


def _take_int(entries, key, default):
    if key not in entries:
        return default
    value, lineno = entries.pop(key)
    try:
        return int(value)
    except ValueError:
        raise ConfigParseError(f"not an integer: {value!r}", line=lineno, field_name=key) from None


def _take_str(entries, key, default):
    if key not in entries:
        return default
    value, _ = entries.pop(key)
    return value


def _take_form_factor(entries, name) -> FormFactor | None:
    keys = {axis: f"formfactor.{name}.{axis}" for axis in ("p", "m", "w")}
    present = [k for k in keys.values() if k in entries]
    if not present:
        return None
    if len(present) != 3:
        missing = sorted(set(keys.values()) - set(present))
        raise ConfigParseError("incomplete form factor", field_name=missing[0])
    p = _take_float(entries, keys["p"])
    m = _take_int(entries, keys["m"], None)
    w = _take_float(entries, keys["w"])
    try:
        return FormFactor(p, m, w)
    except DomainError as exc:
        raise ConfigParseError(str(exc), field_name=keys["p"]) from None


def parse_run_config(text: str) -> RunConfig:
    """Parse config text; structural problems raise ConfigParseError."""
    entries = _parse_lines(text)

    b1 = _take_float(entries, "B1")
    b2 = _take_float(entries, "B2")
    beta = _take_float(entries, "beta")
    couplings = {name: _take_float(entries, name, 0.0) for name in _COUPLINGS}

    ffs = {name: _take_form_factor(entries, name) for name in _FF_NAMES}
    if ffs["g"] is None:
        ffs["g"] = FormFactor(-0.5, 2, 1.0)
    if ffs["f"] is None:
        ffs["f"] = FormFactor(-0.5, 2, 1.0)

    initial_params = None
    initial_matrix = None
    amp_keys = ["initial.a1_re", "initial.a1_im", "initial.a2_re", "initial.a2_im"]
    if any(k in entries for k in amp_keys):
        a1 = complex(
            _take_float(entries, "initial.a1_re", 0.0), _take_float(entries, "initial.a1_im", 0.0)
        )
        a2 = complex(
            _take_float(entries, "initial.a2_re", 0.0), _take_float(entries, "initial.a2_im", 0.0)
        )
        try:
            initial_params = InitialStateParams(a1, a2)
        except DomainError as exc:
            raise ConfigParseError(str(exc), field_name="initial.a1_re") from None
    elif any(key.startswith("initial.rho.") for key in entries):
        matrix = np.zeros((4, 4), dtype=complex)
        for k in range(1, 5):
            for l in range(1, 5):
                re = _take_float(entries, f"initial.rho.{k}{l}.re", 0.0)
                im = _take_float(entries, f"initial.rho.{k}{l}.im", 0.0)
                matrix[k - 1, l - 1] = complex(re, im)
        initial_matrix = matrix

    t_max = _take_float(entries, "time.t_max", math.nan)
    t_max = None if math.isnan(t_max) else t_max
    steps = _take_int(entries, "time.steps", 200)
    spacing = _take_str(entries, "time.spacing", "linear")
    if spacing not in ("linear", "log"):
        raise ConfigParseError(
            f"spacing must be 'linear' or 'log', got {spacing!r}", field_name="time.spacing"
        )
    if steps < 2:
        raise ConfigParseError(f"steps must be >= 2, got {steps}", field_name="time.steps")
    if t_max is not None and t_max <= 0.0:
        raise ConfigParseError(f"t_max must be positive, got {t_max}", field_name="time.t_max")

    run = dict(
        t_max=t_max,
        steps=steps,
        spacing=spacing,
        trajectory_path=_take_str(entries, "output.trajectory", "trajectory.csv"),
        summary_path=_take_str(entries, "output.summary", "summary.json"),
        plotdata_path=_take_str(entries, "output.plotdata", "plotdata.csv"),
        c_a=_take_float(entries, "constants.C_A", 1.0),
        c_b=_take_float(entries, "constants.C_B", 1.0),
        kappa0=_take_float(entries, "constants.kappa0", 1.0),
    )
    for path_key in ("trajectory_path", "summary_path", "plotdata_path"):
        if not run[path_key]:
            raise ConfigParseError("output path must be nonempty", field_name=path_key)

    if entries:
        key = sorted(entries)[0]
        raise ConfigParseError("unknown key", line=entries[key][1], field_name=key)

    # model invariants (non-degeneracy etc.) are precondition errors, not
    # parse errors; let ConfigError propagate to the exit-3 handler
    model = ModelConfig(B1=b1, B2=b2, beta=beta, **couplings, **{n: ffs[n] for n in _FF_NAMES})

    cfg = RunConfig(
        model=model, initial_params=initial_params, initial_matrix=initial_matrix, **run
    )
    cfg.echo = _echo_dict(cfg)
    return cfg


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def _echo_dict(cfg: RunConfig) -> dict[str, str]:
    echo: dict[str, str] = {
        "B1": _fmt(cfg.model.B1),
        "B2": _fmt(cfg.model.B2),
        "beta": _fmt(cfg.model.beta),
    }
    for name in _COUPLINGS:
        echo[name] = _fmt(getattr(cfg.model, name))
    for name in _FF_NAMES:
        ff = getattr(cfg.model, name)
        echo[f"formfactor.{name}.p"] = _fmt(ff.power)
        echo[f"formfactor.{name}.m"] = str(ff.decay)
        echo[f"formfactor.{name}.w"] = _fmt(ff.angular_weight)
    if cfg.initial_params is not None:
        echo["initial.a1_re"] = _fmt(cfg.initial_params.a1.real)
        echo["initial.a1_im"] = _fmt(cfg.initial_params.a1.imag)
        echo["initial.a2_re"] = _fmt(cfg.initial_params.a2.real)
        echo["initial.a2_im"] = _fmt(cfg.initial_params.a2.imag)
    if cfg.initial_matrix is not None:
        for k in range(1, 5):
            for l in range(1, 5):
                entry = cfg.initial_matrix[k - 1, l - 1]
                echo[f"initial.rho.{k}{l}.re"] = _fmt(entry.real)
                echo[f"initial.rho.{k}{l}.im"] = _fmt(entry.imag)
    if cfg.t_max is not None:
        echo["time.t_max"] = _fmt(cfg.t_max)
    echo["time.steps"] = str(cfg.steps)
    echo["time.spacing"] = cfg.spacing
    echo["output.trajectory"] = cfg.trajectory_path
    echo["output.summary"] = cfg.summary_path
    echo["output.plotdata"] = cfg.plotdata_path
    echo["constants.C_A"] = _fmt(cfg.c_a)
    echo["constants.C_B"] = _fmt(cfg.c_b)
    echo["constants.kappa0"] = _fmt(cfg.kappa0)
    return echo


def config_text_from_echo(echo: dict[str, str]) -> str:
    """Regenerate a parseable config file from a summary's config echo."""
    return "".join(f"{key} = {value}\n" for key, value in sorted(echo.items()))


def _complex_pair(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def _rates_payload(cfg: RunConfig):
    report = rates(cfg.model)
    return {
        "gamma_th": report.gamma_th,
        "gamma_dec_2": report.gamma_dec_2,
        "gamma_dec_3": report.gamma_dec_3,
        "gamma_dec_4": report.gamma_dec_4,
        "gamma_dec_5": report.gamma_dec_5,
        "Y2": report.Y2,
        "Y3": report.Y3,
        "delta2": report.delta2,
        "delta3": report.delta3,
        "delta4": report.delta4,
        "delta5": report.delta5,
        "delta_plus": report.delta_plus,
        "delta_minus": report.delta_minus,
    }


def _resonances_payload(cfg: RunConfig):
    table = resonance_table(cfg.model)
    payload = []
    for index in range(1, 6):
        for datum in table.data(index):
            payload.append(
                {
                    "energy_index": datum.energy.index,
                    "energy": float(datum.energy.value),
                    "multiplicity": datum.energy.multiplicity,
                    "branch": datum.branch,
                    "delta": _complex_pair(datum.delta),
                    "eta": [_complex_pair(z) for z in datum.eta],
                    "eta_tilde": [_complex_pair(z) for z in datum.eta_tilde],
                }
            )
    return payload


def _base_summary(cfg: RunConfig) -> dict:
    return {
        "library": {"name": "resq", "version": __version__},
        "quadrature": {"rel_tol": quad_rtol()},
        "config": cfg.echo,
    }


def _jsonify(obj):
    if isinstance(obj, dict):
        return {k: _jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonify(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return obj


def _write_json(path: str, payload: dict):
    text = json.dumps(_jsonify(payload), sort_keys=True, indent=2) + "\n"
    try:
        with open(path, "w") as handle:
            handle.write(text)
    except OSError as exc:
        raise _OutputError(f"cannot write {path}: {exc}") from exc


class _OutputError(ResqError):
    pass


def _time_grid(cfg: RunConfig) -> np.ndarray:
    if cfg.t_max is None:
        raise PreconditionError("time.t_max is required for this command")
    if cfg.spacing == "linear":
        return np.linspace(0.0, cfg.t_max, cfg.steps)
    # log grid: t = 0 then six decades up to t_max
    tail = np.geomspace(cfg.t_max * 1e-6, cfg.t_max, cfg.steps - 1)
    return np.concatenate([[0.0], tail])


def _initial_density(cfg: RunConfig) -> DensityMatrix:
    if cfg.initial_params is not None:
        return initial_state(cfg.initial_params)
    if cfg.initial_matrix is not None:
        return DensityMatrix(cfg.initial_matrix)
    raise PreconditionError("config supplies no initial state")


def cmd_rates(cfg: RunConfig) -> dict:
    summary = _base_summary(cfg)
    summary["rates"] = _rates_payload(cfg)
    summary["resonances"] = _resonances_payload(cfg)
    _write_json(cfg.summary_path, summary)
    return summary


def cmd_evolve(cfg: RunConfig) -> dict:
    rho0 = _initial_density(cfg)
    table = resonance_table(cfg.model)
    grid = _time_grid(cfg)

    rows = []
    for t in grid:
        rho_t = evolve(rho0, float(t), table)
        pops = rho_t.populations
        alpha = rho_t.alpha
        report = concurrence(rho_t)
        rows.append((t, *pops, alpha.real, alpha.imag, report.D, report.C))

    header = "t,x1,x2,x3,x4,re_alpha,im_alpha,D,C"
    lines = [header] + [",".join(_fmt(v) for v in row) for row in rows]
    text = "\n".join(lines) + "\n"
    for path in (cfg.trajectory_path, cfg.plotdata_path):
        try:
            with open(path, "w", newline="") as handle:
                handle.write(text)
        except OSError as exc:
            raise _OutputError(f"cannot write {path}: {exc}") from exc

    death = numerical_death_time(
        cfg.model, rho0, t_max=float(grid[-1]), grid_n=max(cfg.steps, 200), table=table
    )
    summary = _base_summary(cfg)
    summary["empirical_death_time"] = death
    summary["resonances"] = _resonances_payload(cfg)
    summary["rates"] = _rates_payload(cfg) if cfg.model.s10_prime else None
    _write_json(cfg.summary_path, summary)
    return summary


def cmd_bounds(cfg: RunConfig) -> dict:
    if cfg.initial_params is None:
        raise PreconditionError("bounds requires the amplitude initial state (initial.a1/a2)")
    p = cfg.initial_params.p
    t_a = death_time_bound(cfg.model, p, cfg.c_a, cfg.kappa0)
    t_b = survival_time_bound(cfg.model, p, cfg.c_b, cfg.kappa0)

    rho0 = initial_state(cfg.initial_params)
    report = rates(cfg.model)
    relax = 1.0 / min(report.delta2, report.delta3)
    t_max = cfg.t_max if cfg.t_max is not None else 2.0 * t_a + 30.0 * relax
    death = numerical_death_time(cfg.model, rho0, t_max=t_max, grid_n=max(cfg.steps, 400))

    summary = _base_summary(cfg)
    summary["rates"] = _rates_payload(cfg)
    summary["bounds"] = {
        "t_A": t_a,
        "t_B": t_b,
        "C_A": cfg.c_a,
        "C_B": cfg.c_b,
        "kappa0": cfg.kappa0,
        "varkappa": cfg.model.varkappa,
        "p": p,
    }
    summary["empirical_death_time"] = death
    summary["ordering"] = {
        "t_B_le_t0": death is not None and t_b <= death,
        "t0_le_t_A": death is not None and death <= t_a,
    }
    _write_json(cfg.summary_path, summary)
    return summary


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="resq",
        description="Two-qubit resonance dynamics: rates, trajectories, entanglement bounds",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in (
        ("rates", "decoherence/thermalization rates and resonance data"),
        ("evolve", "density-matrix trajectory with concurrence columns"),
        ("bounds", "entanglement death/survival time bounds"),
    ):
        cmd = sub.add_parser(name, help=helptext)
        cmd.add_argument("--config", required=True, help="path to key=value config file")
        cmd.add_argument("--out-dir", default=None, help="directory for output files")
        cmd.add_argument("--t-max", type=float, default=None, help="override time.t_max")
        cmd.add_argument("--steps", type=int, default=None, help="override time.steps")
        cmd.add_argument(
            "--log-grid", action="store_true", help="use logarithmic time spacing"
        )
    return parser


def _apply_overrides(cfg: RunConfig, args) -> RunConfig:
    if args.t_max is not None:
        cfg.t_max = args.t_max
    if args.steps is not None:
        if args.steps < 2:
            raise ConfigParseError(f"steps must be >= 2, got {args.steps}", field_name="--steps")
        cfg.steps = args.steps
    if args.log_grid:
        cfg.spacing = "log"
    if args.out_dir is not None:
        import os

        for attr in ("trajectory_path", "summary_path", "plotdata_path"):
            path = getattr(cfg, attr)
            if not os.path.isabs(path):
                setattr(cfg, attr, os.path.join(args.out_dir, path))
    cfg.echo = _echo_dict(cfg)
    return cfg


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        with open(args.config) as handle:
            text = handle.read()
    except OSError as exc:
        print(f"resq: cannot read config: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        cfg = parse_run_config(text)
        cfg = _apply_overrides(cfg, args)
    except ConfigParseError as exc:
        print(f"resq: config parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (DomainError, PreconditionError, DegeneracyError) as exc:
        print(f"resq: precondition violated: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION

    command = {"rates": cmd_rates, "evolve": cmd_evolve, "bounds": cmd_bounds}[args.command]
    try:
        command(cfg)
    except _OutputError as exc:
        print(f"resq: {exc}", file=sys.stderr)
        return EXIT_OUTPUT
    except (DomainError, PreconditionError, DegeneracyError) as exc:
        print(f"resq: precondition violated: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    print(cfg.summary_path)
    return EXIT_OK


def console_main():
    sys.exit(main())


if __name__ == "__main__":
    console_main()
