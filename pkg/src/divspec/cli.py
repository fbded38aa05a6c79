"""Config-driven command line front end.

Subcommands
-----------
spectrum   solve one scenario, write the eigenvalue spectrum as CSV
sweep      vary one parameter of a base scenario, write omega per point
doppler    tabulate the Doppler power density of a PAS
plot       emit a matplotlib script rendering a previously written CSV

Configs are JSON; angles are degrees and lengths wavelengths there (the
library API itself is radians).  Output CSVs are byte-deterministic for a
fixed config: floats are printed with 17 significant digits and newline
endings are always ``\\n``.

Exit codes: 0 success, 2 configuration error, 3 numerical error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import __version__
from .aperture import (
    ArcPiece,
    Circle,
    DiscreteArray,
    Disk,
    LinePiece,
    ParallelLines,
    PiecewiseCurve,
    Rectangle,
    Segment,
    centering_transform,
    enclosing_radius,
)
from .pas import DopplerSpec, IsotropicPas, TabulatedPas, UniformPas, VonMisesPas, doppler_spectrum
from .operators import build_truncated_operator
from .specfun import truncation_order
from .spectrum import (
    discrete_correlation,
    discrete_diversity,
    nystrom_oracle,
    omega_corrected,
    solve_spectrum,
)

__all__ = ["main", "ConfigError"]

_RAD = math.pi / 180.0


class ConfigError(ValueError):
    """Invalid or incomplete configuration; message names the field."""


def _fmt(value) -> str:
    return format(float(value), ".17g")


def _require(cfg: dict, field: str, path: str):
    if field not in cfg:
        raise ConfigError(f"{path}.{field}: missing required field")
    return cfg[field]


def _load_config(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}")


def _read_two_column_csv(path: str, what: str) -> np.ndarray:
    try:
        data = np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
    except OSError:
        raise ConfigError(f"{what}: file not found: {path}")
    except ValueError as exc:
        raise ConfigError(f"{what}: cannot parse {path}: {exc}")
    if data.shape[1] != 2:
        raise ConfigError(f"{what}: {path} must have exactly two columns")
    return data


def make_aperture(cfg: dict, path: str = "aperture"):
    kind = str(_require(cfg, "kind", path)).lower()
    try:
        if kind == "segment":
            return Segment(
                length=float(_require(cfg, "length", path)),
                angle=float(cfg.get("angle_deg", 0.0)) * _RAD,
                center=tuple(cfg.get("center", (0.0, 0.0))),
            )
        if kind == "circle":
            return Circle(
                radius=float(_require(cfg, "radius", path)),
                center=tuple(cfg.get("center", (0.0, 0.0))),
            )
        if kind == "disk":
            return Disk(
                radius=float(_require(cfg, "radius", path)),
                center=tuple(cfg.get("center", (0.0, 0.0))),
            )
        if kind == "rectangle":
            return Rectangle(
                width=float(_require(cfg, "width", path)),
                height=float(_require(cfg, "height", path)),
                angle=float(cfg.get("angle_deg", 0.0)) * _RAD,
                center=tuple(cfg.get("center", (0.0, 0.0))),
            )
        if kind == "parallel_lines":
            return ParallelLines(
                count=int(_require(cfg, "count", path)),
                length=float(_require(cfg, "length", path)),
                span=float(_require(cfg, "span", path)),
                angle=float(cfg.get("angle_deg", 0.0)) * _RAD,
                center=tuple(cfg.get("center", (0.0, 0.0))),
            )
        if kind == "piecewise_curve":
            pieces = []
            for i, piece in enumerate(_require(cfg, "pieces", path)):
                ppath = f"{path}.pieces[{i}]"
                ptype = str(_require(piece, "type", ppath)).lower()
                if ptype == "line":
                    pieces.append(
                        LinePiece(
                            tuple(_require(piece, "start", ppath)),
                            tuple(_require(piece, "end", ppath)),
                        )
                    )
                elif ptype == "arc":
                    pieces.append(
                        ArcPiece(
                            center=tuple(_require(piece, "center", ppath)),
                            radius=float(_require(piece, "radius", ppath)),
                            angle_start=float(_require(piece, "start_deg", ppath)) * _RAD,
                            angle_stop=float(_require(piece, "stop_deg", ppath)) * _RAD,
                        )
                    )
                else:
                    raise ConfigError(f"{ppath}.type: unknown piece type '{ptype}'")
            return PiecewiseCurve(tuple(pieces))
        if kind == "discrete_array":
            if "csv" in cfg:
                pts = _read_two_column_csv(cfg["csv"], f"{path}.csv")
            else:
                pts = np.asarray(_require(cfg, "points", path), dtype=float)
            return DiscreteArray(tuple(map(tuple, np.atleast_2d(pts).tolist())))
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: {exc}")
    raise ConfigError(f"{path}.kind: unknown aperture kind '{kind}'")


def make_pas(cfg: dict, path: str = "pas"):
    kind = str(_require(cfg, "kind", path)).lower()
    alpha0 = float(cfg.get("alpha0_deg", 0.0)) * _RAD
    try:
        if kind == "isotropic":
            return IsotropicPas()
        if kind == "uniform":
            return UniformPas(delta=float(_require(cfg, "delta_deg", path)) * _RAD, alpha0=alpha0)
        if kind == "von_mises":
            return VonMisesPas(kappa=float(_require(cfg, "kappa", path)), alpha0=alpha0)
        if kind == "tabulated":
            table = _read_two_column_csv(_require(cfg, "table", path), f"{path}.table")
            return TabulatedPas(table[:, 0] * _RAD, table[:, 1], alpha0=alpha0)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: {exc}")
    raise ConfigError(f"{path}.kind: unknown pas kind '{kind}'")


def _solve_scenario(cfg: dict):
    aperture = make_aperture(_require(cfg, "aperture", "config"))
    model = make_pas(_require(cfg, "pas", "config"))
    n_override = cfg.get("n_override")
    quad_order = cfg.get("quadrature_order")
    op = build_truncated_operator(
        aperture,
        model,
        N=None if n_override is None else int(n_override),
        quad_order=None if quad_order is None else int(quad_order),
    )
    return aperture, model, op, solve_spectrum(op)


def _write_lines(out_path: str, lines: list[str]) -> None:
    with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _metadata_lines(spec) -> list[str]:
    return [
        f"# N = {spec.N}",
        f"# N_D = {spec.N_D}",
        f"# r1 = {_fmt(spec.r1)}",
        f"# rho_max = {_fmt(spec.rho_max)}",
        f"# eig_error_bound = {_fmt(spec.eig_error_bound)}",
        f"# omega = {_fmt(spec.omega)}",
        f"# hs_error_bound = {_fmt(spec.hs_error_bound)}",
    ]


def _dump_matrix(path: str, matrix: np.ndarray) -> None:
    lines = []
    for row in matrix:
        lines.append(",".join(f"{_fmt(v.real)}{v.imag:+.17g}j" for v in row))
    _write_lines(path, lines)


def cmd_spectrum(args) -> int:
    cfg = _load_config(args.config)
    aperture, model, op, spec = _solve_scenario(cfg)
    lines = _metadata_lines(spec)
    oracle = None
    if args.oracle:
        oracle = nystrom_oracle(aperture, model)
        lines.append("index,eigenvalue,cumulative,oracle_eigenvalue")
    else:
        lines.append("index,eigenvalue,cumulative")
    running = 0.0
    for i, lam in enumerate(spec.eigenvalues, start=1):
        running += lam
        row = f"{i},{_fmt(lam)},{_fmt(running)}"
        if oracle is not None:
            row += "," + (_fmt(oracle[i - 1]) if i - 1 < len(oracle) else "")
        lines.append(row)
    _write_lines(args.out, lines)
    if args.dump_matrices:
        stem = args.out[:-4] if args.out.endswith(".csv") else args.out
        _dump_matrix(stem + "_gram.csv", op.gram)
        _dump_matrix(stem + "_rtilde.csv", op.rtilde)
    return 0


def _sweep_values(sweep: dict):
    kind = str(_require(sweep, "kind", "sweep")).lower()
    start = float(_require(sweep, "start", "sweep"))
    stop = float(_require(sweep, "stop", "sweep"))
    steps = int(_require(sweep, "steps", "sweep"))
    if steps < 2:
        raise ConfigError("sweep.steps: must be >= 2")
    if not start < stop:
        raise ConfigError("sweep.start: must be < sweep.stop")
    values = np.linspace(start, stop, steps)
    if kind == "antennas":
        values = np.unique(np.rint(values).astype(int))
        if values[0] < 1:
            raise ConfigError("sweep.start: antenna counts must be >= 1")
    return kind, values


def _antenna_positions(aperture, L: int) -> np.ndarray:
    if isinstance(aperture, Circle):
        beta = 2.0 * math.pi * np.arange(L) / L
        return np.asarray(aperture.center)[None, :] + aperture.radius * np.stack(
            [np.cos(beta), np.sin(beta)], axis=1
        )
    if isinstance(aperture, Segment):
        d = np.array([math.cos(aperture.angle), math.sin(aperture.angle)])
        c = np.asarray(aperture.center)
        if L == 1:
            return c[None, :]
        t = np.linspace(-0.5, 0.5, L)
        return c[None, :] + t[:, None] * aperture.length * d[None, :]
    raise ConfigError(
        "aperture.kind: antennas sweep places antennas uniformly and "
        "supports circle and segment bases only"
    )


def _apply_sweep(cfg: dict, kind: str, value: float) -> dict:
    out = json.loads(json.dumps(cfg))  # deep copy without sharing
    ap = _require(out, "aperture", "config")
    ap_kind = str(_require(ap, "kind", "aperture")).lower()
    if kind == "radius":
        if ap_kind not in ("circle", "disk"):
            raise ConfigError("sweep.kind: radius sweep requires a circle or disk")
        ap["radius"] = value
    elif kind == "length":
        if ap_kind in ("segment", "parallel_lines"):
            ap["length"] = value
        elif ap_kind == "rectangle":
            ap["width"] = value
        else:
            raise ConfigError("sweep.kind: length sweep requires segment, lines, or rectangle")
    elif kind == "direction":
        out.setdefault("pas", {})["alpha0_deg"] = value
    else:
        raise ConfigError(f"sweep.kind: unknown sweep kind '{kind}'")
    return out


def cmd_sweep(args) -> int:
    cfg = _load_config(args.config)
    kind, values = _sweep_values(_require(cfg, "sweep", "config"))
    if kind == "doppler":
        return _doppler_csv(cfg, values, args.out)

    lines = [f"# sweep = {kind}", "param,omega,omega_corrected,error_bound"]
    if kind == "antennas":
        aperture = make_aperture(_require(cfg, "aperture", "config"))
        model = make_pas(_require(cfg, "pas", "config"))
        # one kernel order covers every antenna count: the maximal pairwise
        # distance never exceeds the base aperture diameter
        diameter = 2.0 * _continuous_radius(aperture)
        N = truncation_order(diameter) + 10
        bound = 0.2 * math.exp(truncation_order(diameter) - N)
        if not isinstance(aperture, (Circle, Segment)):
            raise ConfigError(
                "aperture.kind: antennas sweep places antennas uniformly and "
                "supports circle and segment bases only"
            )
        for L in values:
            try:
                R = discrete_correlation(_antenna_positions(aperture, int(L)), model, N)
                omega = discrete_diversity(R)
                lines.append(f"{int(L)},{_fmt(omega)},{_fmt(omega)},{_fmt(bound)}")
            except ConfigError:
                raise
            except (ValueError, ArithmeticError) as exc:
                print(f"warning: L={int(L)}: {exc}", file=sys.stderr)
                lines.append(f"{int(L)},,,")
    else:
        for value in values:
            try:
                _, _, _, spec = _solve_scenario(_apply_sweep(cfg, kind, float(value)))
                center, half_width = omega_corrected(spec)
                lines.append(
                    f"{_fmt(value)},{_fmt(spec.omega)},{_fmt(center)},{_fmt(half_width)}"
                )
            except ConfigError:
                raise
            except (ValueError, ArithmeticError, RuntimeError) as exc:
                print(f"warning: param={value}: {exc}", file=sys.stderr)
                lines.append(f"{_fmt(value)},,,")
    _write_lines(args.out, lines)
    return 0


def _continuous_radius(aperture) -> float:
    centered, _ = centering_transform(aperture)
    return enclosing_radius(centered)


def _doppler_csv(cfg: dict, nus, out_path: str) -> int:
    model = make_pas(_require(cfg, "pas", "config"))
    dop = cfg.get("doppler", {})
    spec = DopplerSpec(nu_max=float(dop.get("nu_max", 1.0)))
    lines = [f"# nu_max = {_fmt(spec.nu_max)}", "nu,S_doppler"]
    for nu in nus:
        try:
            lines.append(f"{_fmt(nu)},{_fmt(doppler_spectrum(model, spec, float(nu)))}")
        except ValueError as exc:
            print(f"warning: nu={nu}: {exc}", file=sys.stderr)
            lines.append(f"{_fmt(nu)},")
    _write_lines(out_path, lines)
    return 0


def cmd_doppler(args) -> int:
    cfg = _load_config(args.config)
    dop = _require(cfg, "doppler", "config")
    nu_max = float(_require(dop, "nu_max", "doppler"))
    start = float(dop.get("start", -0.99 * nu_max))
    stop = float(dop.get("stop", 0.99 * nu_max))
    steps = int(dop.get("steps", 201))
    if steps < 2 or not start < stop:
        raise ConfigError("doppler: requires steps >= 2 and start < stop")
    return _doppler_csv(cfg, np.linspace(start, stop, steps), args.out)


_PLOT_KINDS = ("spectrum", "sweep", "doppler")

_PLOT_TEMPLATE = '''#!/usr/bin/env python3
"""Render {kind} data from {csv!r}; written by divspec plot."""
import csv

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

rows = []
with open({csv!r}) as fh:
    for line in fh:
        if line.startswith("#") or not line.strip():
            continue
        rows.append(line.strip().split(","))
header, data = rows[0], rows[1:]
cols = {{name: [row[i] for row in data] for i, name in enumerate(header)}}

fig, ax = plt.subplots(figsize=(7, 4.5))
{body}
ax.grid(True, which="both", alpha=0.3)
fig.tight_layout()
fig.savefig({png!r}, dpi=150)
print("wrote", {png!r})
'''

_PLOT_BODIES = {
    "spectrum": """idx = [int(v) for v in cols["index"]]
lam = [float(v) for v in cols["eigenvalue"]]
floor = 1e-20
ax.semilogy(idx, [max(v, floor) for v in lam], "o-", markersize=3)
ax.set_xlabel("eigenvalue index")
ax.set_ylabel("eigenvalue")""",
    "sweep": """x = [float(v) for v in cols["param"]]
pairs = [(a, b) for a, b in zip(x, cols["omega"]) if b]
ax.plot([p[0] for p in pairs], [float(p[1]) for p in pairs], "o-", label="omega", markersize=3)
if "omega_corrected" in cols:
    pairs = [(a, b) for a, b in zip(x, cols["omega_corrected"]) if b]
    ax.plot([p[0] for p in pairs], [float(p[1]) for p in pairs], "--", label="corrected")
ax.set_xlabel("parameter")
ax.set_ylabel("diversity measure")
ax.legend()""",
    "doppler": """x = [float(v) for v in cols["nu"]]
pairs = [(a, b) for a, b in zip(x, cols["S_doppler"]) if b]
ax.plot([p[0] for p in pairs], [float(p[1]) for p in pairs])
ax.set_xlabel("Doppler frequency")
ax.set_ylabel("power density")""",
}

_EXPECTED_HEADERS = {
    "spectrum": "index,eigenvalue,cumulative",
    "sweep": "param,omega,omega_corrected,error_bound",
    "doppler": "nu,S_doppler",
}


def cmd_plot(args) -> int:
    kind = args.kind.lower()
    if kind not in _PLOT_KINDS:
        raise ConfigError(f"plot.kind: unknown kind '{args.kind}'; valid: {', '.join(_PLOT_KINDS)}")
    try:
        with open(args.csv, "r", encoding="utf-8") as fh:
            header = None
            for line in fh:
                if not line.startswith("#") and line.strip():
                    header = line.strip()
                    break
    except FileNotFoundError:
        raise ConfigError(f"plot.csv: file not found: {args.csv}")
    if header is None or not header.startswith(_EXPECTED_HEADERS[kind]):
        raise ConfigError(
            f"plot.csv: {args.csv} does not carry the '{_EXPECTED_HEADERS[kind]}' header"
        )
    png = (args.csv[:-4] if args.csv.endswith(".csv") else args.csv) + ".png"
    script = _PLOT_TEMPLATE.format(kind=kind, csv=args.csv, png=png, body=_PLOT_BODIES[kind])
    _write_lines(args.out, script.splitlines())
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="divspec",
        description="Diversity spectra of planar apertures under multipath fading",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="solve one scenario and write its spectrum")
    p.add_argument("--config", required=True, help="JSON scenario config")
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--dump-matrices", action="store_true", help="also write G and R as CSV")
    p.add_argument("--oracle", action="store_true", help="append an independent eigenvalue column")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("sweep", help="sweep one parameter of a base scenario")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("doppler", help="tabulate the Doppler power density")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_doppler)

    p = sub.add_parser("plot", help="write a matplotlib script for a CSV")
    p.add_argument("--csv", required=True)
    p.add_argument("--kind", required=True, help="spectrum, sweep, or doppler")
    p.add_argument("--out", required=True, help="output script path")
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError, RuntimeError, np.linalg.LinAlgError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
