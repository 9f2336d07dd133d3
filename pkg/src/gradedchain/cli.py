"""Command-line front end: parameter sweeps and verification runs with CSV/JSON output.

Exit codes: 0 success, 1 a verification tolerance was exceeded, 2 invalid input.
CSV files start with a header line followed by the rows; parameters and summary
values come after the rows as ``# key=value`` lines, so ``comment="#"`` readers
skip them.  Numbers are written with 17 significant digits.  JSON output holds
``command``, ``config``, ``columns``, ``results`` (one object per row) and
``summary``.
"""
from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .chain import ChainSpec, dispersion, verify_spectrum
from .continuum import (
    INFINITE,
    PERIODIC,
    ContinuumSpec,
    DiscretizationLadder,
    continuum_greens,
    continuum_mode_density,
    density_convergence,
    dispersion_convergence,
    greens_convergence,
)
from .density import homogeneous_density, normalization_integral, sample_density
from .errors import BandEdgeSingularity, GradedChainError, UnsupportedMode
from .greens import Regime, closed_form_values, greens_ring, index_distance
from .oracle import greens_dense_inverse, greens_spectral_sum, hamiltonian_force_check
from .timedomain import (
    InitialConditions,
    evolve,
    evolve_velocity,
    fit_modal_coefficients,
    total_energy,
)

OUTPUT_DIR_ENV = "GRADEDCHAIN_OUTPUT_DIR"
COMMANDS = ("spectrum", "greens", "density", "continuum", "evolve", "verify")

RESULT_SCHEMA = {
    "type": "object",
    "required": ["command", "config", "columns", "results", "summary"],
    "properties": {
        "command": {"enum": list(COMMANDS)},
        "config": {"type": "object"},
        "columns": {"type": "array", "items": {"type": "string"}},
        "results": {"type": "array", "items": {"type": "object"}},
        "summary": {"type": "object"},
    },
}


@dataclass
class RunConfig:
    command: str
    params: dict
    output: str | None = None
    fmt: str = "csv"
    seed: int = 0


@dataclass
class RunResult:
    columns: list[str]
    rows: list[list]
    summary: dict = field(default_factory=dict)
    exit_code: int = 0


class InputError(ValueError):
    """Raised for configuration problems; mapped to exit code 2."""


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def _json_value(value):
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, (list, tuple)):
        return [_json_value(v) for v in value]
    return value


def render(config: RunConfig, result: RunResult) -> str:
    if config.fmt == "json":
        doc = {
            "command": config.command,
            "config": {k: _json_value(v)
                       for k, v in sorted({**config.params, "seed": config.seed}.items())},
            "columns": result.columns,
            "results": [
                {c: _json_value(v) for c, v in zip(result.columns, row)} for row in result.rows
            ],
            "summary": {k: _json_value(v) for k, v in result.summary.items()},
        }
        return json.dumps(doc, indent=2, allow_nan=False) + "\n"
    buf = io.StringIO()
    buf.write(",".join(result.columns) + "\n")
    for row in result.rows:
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    buf.write(f"# gradedchain {__version__} {config.command}\n")
    buf.write(f"# seed={config.seed}\n")
    for key, value in sorted(config.params.items()):
        if isinstance(value, (list, tuple)):
            value = " ".join(_fmt(v) for v in value)
        buf.write(f"# {key}={_fmt(value)}\n")
    for key, value in result.summary.items():
        buf.write(f"# {key}={_fmt(value)}\n")
    return buf.getvalue()


def _chain(p: dict) -> ChainSpec:
    try:
        return ChainSpec(n=p["n"], xi=p["xi"], omega0=p["omega0"], m0=p["m0"])
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def _grid(p: dict) -> np.ndarray:
    if p.get("omega") is not None:
        values = np.asarray(p["omega"], dtype=float)
        if values.size == 0 or np.any(values < 0):
            raise InputError("omega: values must be non-negative and non-empty")
        return values
    lo, hi, count = p["omega_min"], p["omega_max"], p["count"]
    if count < 1:
        raise InputError(f"count must be >= 1, got {count}")
    if lo < 0 or hi < lo:
        raise InputError(f"omega_min/omega_max must satisfy 0 <= min <= max, got {lo}, {hi}")
    if p["spacing"] == "log":
        if lo <= 0:
            raise InputError("omega_min must be > 0 for log spacing")
        return np.geomspace(lo, hi, count)
    return np.linspace(lo, hi, count)


def run_spectrum(config: RunConfig) -> RunResult:
    spec = _chain(config.params)
    res = dispersion(spec)
    rows = [[m, k, w] for m, (k, w) in enumerate(zip(res.wavenumbers, res.frequencies))]
    summary = {
        "omega_min": float(res.frequencies.min()),
        "omega_max": float(res.frequencies.max()),
        "band_lower": spec.lower_edge,
        "band_debye": spec.debye,
    }
    return RunResult(["m", "k", "omega"], rows, summary)


def _ring_distance(n: int, p: int, q: int) -> int:
    d = abs(p - q) % n
    return min(d, n - d)


def run_greens(config: RunConfig) -> RunResult:
    p = config.params
    spec = _chain(p)
    pi, qi = p["p"], p["q"]
    if not (0 <= pi < spec.n and 0 <= qi < spec.n):
        raise InputError(f"p, q must lie in [0, {spec.n - 1}], got {pi}, {qi}")
    omegas = _grid(p)
    d = _ring_distance(spec.n, pi, qi)
    true_factor = spec.xi ** (-(pi - qi)) if p["true"] else None
    columns = ["omega", "regime", "re_g", "im_g"]
    if p["true"]:
        columns += ["re_true", "im_true"]
    if p["verify"]:
        columns += ["re_oracle", "im_oracle", "deviation"]
    rows = []
    worst_out, worst_in = 0.0, 0.0
    for w in omegas:
        try:
            vals, regime = closed_form_values(spec, float(w), d)
        except BandEdgeSingularity:
            width = len(columns) - 2
            rows.append([w, "singular"] + [math.nan] * width)
            continue
        g = complex(vals)
        row = [w, regime.value, g.real, g.imag]
        if p["true"]:
            row += [(g * true_factor).real, (g * true_factor).imag]
        if p["verify"]:
            if regime is Regime.IN_BAND:
                eps = 3.0 * (spec.debye - spec.lower_edge) / spec.n
            else:
                eps = 0.0
            ref = greens_spectral_sum(spec, float(w), eps, pi, qi)
            dev = abs(g - ref) / abs(g)
            if regime is Regime.IN_BAND:
                worst_in = max(worst_in, dev)
            else:
                worst_out = max(worst_out, dev)
            row += [ref.real, ref.imag, dev]
        rows.append(row)
    summary = {}
    code = 0
    if p["verify"]:
        summary["max_deviation_out_of_band"] = worst_out
        summary["max_deviation_in_band"] = worst_in
        passed = worst_out <= p["tol"]
        if p["inband_tol"] is not None:
            passed = passed and worst_in <= p["inband_tol"]
        summary["verified"] = passed
        code = 0 if passed else 1
    return RunResult(columns, rows, summary, code)


def run_density(config: RunConfig) -> RunResult:
    p = config.params
    spec = _chain(p)
    try:
        curve = sample_density(spec, count=p["count"], margin=p["margin"], spacing=p["spacing"])
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    columns = ["omega", "rho"]
    rows = [[w, r] for w, r in zip(curve.omegas, curve.rho)]
    if spec.homogeneous:
        columns.append("rho_homogeneous")
        hom = homogeneous_density(spec.n, spec.omega0, curve.omegas)
        rows = [row + [h] for row, h in zip(rows, hom)]
    integral = normalization_integral(spec)
    summary = {"integral": integral, "deviation": integral - spec.n,
               "band_lower": spec.lower_edge, "band_debye": spec.debye}
    code = 0
    if p["tol"] is not None and abs(integral - spec.n) > p["tol"]:
        code = 1
    return RunResult(columns, rows, summary, code)


def run_continuum(config: RunConfig) -> RunResult:
    p = config.params
    try:
        cspec = ContinuumSpec(length=p["length"], beta=p["beta"], big_omega=p["big_omega"],
                              rho0=p["rho0"])
        ladder = DiscretizationLadder(cspec, tuple(p["sizes"]))
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    x = p["x"]
    omegas = _grid(p)
    if p["mode"] == PERIODIC and np.any(omegas >= cspec.lower_edge):
        raise InputError(
            "mode=periodic is unsupported for omega >= beta*Omega (in-band image sum diverges)"
        )
    columns = ["table", "quantity", "h", "error", "order", "omega", "re_g", "im_g", "rho"]
    rows = []
    gf_omega = p["ladder_omega"]
    tables = [dispersion_convergence(ladder, p["mode_index"])]
    try:
        tables.append(greens_convergence(ladder, gf_omega, x))
        if gf_omega > cspec.lower_edge:
            tables.append(density_convergence(ladder, gf_omega))
    except BandEdgeSingularity as exc:
        raise InputError(f"ladder_omega: {exc}") from exc
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    min_order = math.inf
    for table in tables:
        orders = [math.nan] + list(table.orders)
        for h, err, order in zip(table.h_values, table.errors, orders):
            rows.append(["convergence", table.quantity, h, err, order] + [math.nan] * 4)
        min_order = min(min_order, float(np.min(table.orders)))
    for w in omegas:
        try:
            g = complex(continuum_greens(cspec, float(w), x, mode=p["mode"]))
            rho = continuum_mode_density(cspec, float(w))
            rows.append(["sample", "greens", math.nan, math.nan,
                         math.nan, w, g.real, g.imag, rho])
        except BandEdgeSingularity:
            rows.append(["sample", "singular"] + [math.nan] * 3 + [w] + [math.nan] * 3)
    summary = {"min_observed_order": min_order}
    code = 0
    if p["min_order"] is not None and min_order < p["min_order"]:
        code = 1
    return RunResult(columns, rows, summary, code)


def _initial_conditions(spec: ChainSpec, p: dict, seed: int) -> InitialConditions:
    n = spec.n
    pos = np.arange(n)
    scale = spec.xi ** (-pos.astype(float))
    if p["ic_file"]:
        data = json.loads(Path(p["ic_file"]).read_text(encoding="utf-8"))
        try:
            return InitialConditions(data["u0"], data["v0"])
        except (KeyError, ValueError) as exc:
            raise InputError(f"ic_file: {exc}") from exc
    preset = p["preset"]
    amp = p["amplitude"]
    if preset == "single-mode":
        m = p["mode_index"] % n
        if m == 0 or 2 * m == n:
            y = np.cos(2 * np.pi * m * pos / n) / math.sqrt(n)
        else:
            y = math.sqrt(2.0 / n) * np.cos(2 * np.pi * m * pos / n)
        return InitialConditions(amp * scale * y, np.zeros(n))
    if preset == "pulse":
        u0 = np.zeros(n)
        u0[n // 2] = amp
        return InitialConditions(u0, np.zeros(n))
    if preset == "random":
        rng = np.random.default_rng(seed)
        return InitialConditions(amp * rng.standard_normal(n), amp * rng.standard_normal(n))
    raise InputError(f"preset: unknown preset {preset!r}")


def run_evolve(config: RunConfig) -> RunResult:
    p = config.params
    spec = _chain(p)
    ic = _initial_conditions(spec, p, config.seed)
    if ic.u0.shape != (spec.n,):
        raise InputError(f"ic_file: expected {spec.n} displacements, got {ic.u0.shape[0]}")
    if p["steps"] < 1 or p["t_max"] <= 0:
        raise InputError("steps must be >= 1 and t_max > 0")
    coeffs = fit_modal_coefficients(spec, ic)
    times = np.linspace(0.0, p["t_max"], p["steps"] + 1)
    u = evolve(spec, coeffs, times)
    v = evolve_velocity(spec, coeffs, times)
    energy = np.array([total_energy(spec, a, b) for a, b in zip(u, v)])
    columns = ["t"] + [f"u_{i}" for i in range(spec.n)] + ["energy"]
    rows = [[t] + list(ui) + [e] for t, ui, e in zip(times, u, energy)]
    e0 = energy[0]
    drift = float(np.max(np.abs(energy - e0)) / abs(e0)) if e0 != 0 else float(np.max(np.abs(energy)))
    summary = {"energy_drift": drift}
    if not spec.homogeneous:
        shifted = evolve(spec, coeffs, times, p=np.arange(spec.n) + spec.n)
        summary["scaling_relation_error"] = float(
            np.max(np.abs(shifted - spec.xi ** (-spec.n) * u)) / max(np.max(np.abs(u)), 1e-300)
        )
    code = 0 if drift <= p["tol"] else 1
    summary["passed"] = code == 0
    return RunResult(columns, rows, summary, code)


def run_verify(config: RunConfig) -> RunResult:
    p = config.params
    spec = _chain(p)
    tol = p["tol"]
    rows = []

    rep = verify_spectrum(spec, tol=max(tol, 1e-9), check=False)
    rows.append(["spectrum_vs_dense", rep.max_rel_deviation, rep.tol, rep.passed])

    lo, hi = spec.lower_edge, spec.debye
    probes = [2.0 * hi, 1.1 * hi, 0.5 * (lo + hi) + 1e-3 * (hi - lo)]
    probes += [0.0, 0.9 * lo] if lo > 0 else []
    dist = index_distance(spec.n)
    worst = 0.0
    for w in probes:
        try:
            ring = greens_ring(spec, w, dist)
            dense = greens_dense_inverse(spec, w, 0.0)
        except GradedChainError:
            continue
        worst = max(worst, float(np.max(np.abs(ring - dense)) / np.max(np.abs(dense))))
    rows.append(["greens_ring_vs_dense", worst, tol, worst <= tol])

    integral = normalization_integral(spec)
    rows.append(["density_normalization", abs(integral - spec.n), 1e-8,
                 abs(integral - spec.n) <= 1e-8])

    if spec.n <= 64 and (spec.n - 1) * abs(math.log(spec.xi)) < 300:
        u = np.random.default_rng(config.seed).standard_normal(spec.n)
        force = hamiltonian_force_check(spec, u, check=False)
        rows.append(["hamiltonian_force", force.max_rel_error, force.tol, force.passed])

    passed = all(r[-1] for r in rows)
    return RunResult(["check", "value", "tol", "passed"], rows, {"passed": passed},
                     0 if passed else 1)


RUNNERS = {
    "spectrum": run_spectrum,
    "greens": run_greens,
    "density": run_density,
    "continuum": run_continuum,
    "evolve": run_evolve,
    "verify": run_verify,
}


def _add_common(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--format", dest="fmt", choices=("csv", "json"), default="csv")
    sp.add_argument("--output", "-o", default=None,
                    help=f"output file (default stdout); relative paths go under ${OUTPUT_DIR_ENV}")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--config", default=None, help="JSON file with option defaults")


def _add_chain(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--n", type=int, default=64)
    sp.add_argument("--xi", type=float, default=2.0)
    sp.add_argument("--omega0", type=float, default=1.0)
    sp.add_argument("--m0", type=float, default=1.0)


def _add_grid(sp: argparse.ArgumentParser, lo=0.0, hi=4.0, count=41) -> None:
    sp.add_argument("--omega-min", type=float, default=lo)
    sp.add_argument("--omega-max", type=float, default=hi)
    sp.add_argument("--count", type=int, default=count)
    sp.add_argument("--spacing", choices=("linear", "log"), default="linear")
    sp.add_argument("--omega", type=float, nargs="+", default=None,
                    help="explicit frequencies; overrides the grid")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gradedchain", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("spectrum", help="Bloch eigenfrequencies (m, k, omega)")
    _add_chain(sp)
    _add_common(sp)

    sp = sub.add_parser("greens", help="closed-form Green's function over a frequency sweep")
    _add_chain(sp)
    _add_grid(sp)
    sp.add_argument("--p", type=int, default=0)
    sp.add_argument("--q", type=int, default=0)
    sp.add_argument("--true", action="store_true", help="add true-displacement columns")
    sp.add_argument("--verify", action="store_true", help="compare with the finite-n spectral sum")
    sp.add_argument("--tol", type=float, default=1e-8, help="tolerance for out-of-band rows")
    sp.add_argument("--inband-tol", type=float, default=None,
                    help="optional tolerance for in-band rows (broadened oracle)")
    _add_common(sp)

    sp = sub.add_parser("density", help="mode density samples and normalisation")
    _add_chain(sp)
    sp.add_argument("--count", type=int, default=200)
    sp.add_argument("--margin", type=float, default=None)
    sp.add_argument("--spacing", choices=("linear", "log"), default="linear")
    sp.add_argument("--tol", type=float, default=None, help="fail if |integral - n| exceeds this")
    _add_common(sp)

    sp = sub.add_parser("continuum", help="continuum limit: ladder convergence and samples")
    sp.add_argument("--length", type=float, default=1.0)
    sp.add_argument("--beta", type=float, default=1.0)
    sp.add_argument("--big-omega", type=float, default=1.0)
    sp.add_argument("--rho0", type=float, default=1.0)
    sp.add_argument("--sizes", type=int, nargs="+", default=[64, 128, 256, 512])
    sp.add_argument("--x", type=float, default=0.25)
    sp.add_argument("--ladder-omega", type=float, default=0.5)
    sp.add_argument("--mode-index", type=int, default=1)
    sp.add_argument("--mode", choices=(INFINITE, PERIODIC), default=INFINITE)
    sp.add_argument("--min-order", type=float, default=None,
                    help="fail if an observed convergence order falls below this")
    _add_grid(sp, 0.0, 4.0, 41)
    _add_common(sp)

    sp = sub.add_parser("evolve", help="modal time evolution with energy column")
    _add_chain(sp)
    sp.add_argument("--preset", choices=("single-mode", "pulse", "random"), default="single-mode")
    sp.add_argument("--ic-file", default=None, help='JSON file {"u0": [...], "v0": [...]}')
    sp.add_argument("--mode-index", type=int, default=1)
    sp.add_argument("--amplitude", type=float, default=1.0)
    sp.add_argument("--t-max", type=float, default=50.0)
    sp.add_argument("--steps", type=int, default=200)
    sp.add_argument("--tol", type=float, default=1e-9, help="allowed relative energy drift")
    _add_common(sp)

    sp = sub.add_parser("verify", help="run the oracle cross-checks for one chain")
    _add_chain(sp)
    sp.add_argument("--tol", type=float, default=1e-8)
    _add_common(sp)
    return parser


def _apply_config_file(parser: argparse.ArgumentParser, argv: list[str]) -> None:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("command", nargs="?")
    pre.add_argument("--config", default=None)
    known, _ = pre.parse_known_args(argv)
    if not known.config or known.command not in COMMANDS:
        return
    data = json.loads(Path(known.config).read_text(encoding="utf-8"))
    if "config" in data and isinstance(data["config"], dict):
        data = data["config"]
    subparsers = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    subparsers.choices[known.command].set_defaults(**{k.replace("-", "_"): v
                                                      for k, v in data.items()})


def parse_config(argv: list[str] | None = None) -> RunConfig:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    _apply_config_file(parser, argv)
    ns = vars(parser.parse_args(argv))
    command = ns.pop("command")
    output = ns.pop("output")
    fmt = ns.pop("fmt")
    seed = ns.pop("seed")
    ns.pop("config", None)
    return RunConfig(command=command, params=ns, output=output, fmt=fmt, seed=seed)


def _resolve_output(path: str) -> Path:
    out = Path(path)
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not out.is_absolute():
        out = Path(base) / out
    return out


def main(argv: list[str] | None = None) -> int:
    config = parse_config(argv)
    try:
        result = RUNNERS[config.command](config)
    except (InputError, UnsupportedMode) as exc:
        print(f"gradedchain {config.command}: error: {exc}", file=sys.stderr)
        return 2
    except GradedChainError as exc:
        print(f"gradedchain {config.command}: error: {exc}", file=sys.stderr)
        return 2
    text = render(config, result)
    if config.output:
        out = _resolve_output(config.output)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return result.exit_code


if __name__ == "__main__":
    raise SystemExit(main())
