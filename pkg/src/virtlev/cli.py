"""Command-line front end: reproducible experiments over the library.

Subcommands: kernel | jost | sweep | bifurcate | shift | embedded |
critical | nullity | suite.  Tabular output is CSV at 15 significant digits
with a commented header echoing the fully resolved configuration, so byte
identity across runs certifies determinism.  Classification results are
emitted as JSON.  Exit codes: 0 success, 1 computational failure, 2 usage
or configuration error; failures also emit a machine-readable JSON object
on stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
import time
from pathlib import Path

import numpy as np

from . import acceptance
from . import criticality as cr
from . import discrete_ops as do
from . import jost
from . import lap_sweep as ls
from . import perturbation as pt
from .errors import ConfigError, VirtlevError
from .free_resolvent import Approach, SpectralParameter, kernel_1d, kernel_2d, kernel_3d
from .weighted_space import Grid1D, RadialGrid


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        _emit_error("usage", message)
        raise SystemExit(2)


def _emit_error(kind: str, message: str) -> None:
    print(json.dumps({"error": kind, "message": message}), file=sys.stderr)


def _parse_angle(text: str) -> float:
    """Angles as radians or multiples of pi: 'pi', 'pi/2', '3pi/4', '1.2'."""
    text = text.strip().lower()
    m = re.fullmatch(r"([0-9.]*)\s*pi\s*(?:/\s*([0-9.]+))?", text)
    if m:
        num = float(m.group(1)) if m.group(1) else 1.0
        den = float(m.group(2)) if m.group(2) else 1.0
        return num * np.pi / den
    return float(text)


def _parse_complex(text: str) -> complex:
    text = text.strip()
    if "," in text:
        re_part, im_part = text.split(",", 1)
        return complex(float(re_part), float(im_part))
    if text == "i":
        return 1j
    m = re.fullmatch(r"arg:(.+)", text)
    if m:
        return complex(np.exp(1j * _parse_angle(m.group(1))))
    return complex(text.replace("i", "j"))


def parse_potential(spec: str, grid: Grid1D) -> jost.Potential1D:
    """Potential mini-format: well:g=..., bump:amp=...,a=..., table:path.csv."""
    kind, _, rest = spec.partition(":")
    params = {}
    if kind != "table":
        for item in filter(None, rest.split(",")):
            if "=" not in item:
                raise ConfigError(f"bad potential parameter {item!r}")
            key, val = item.split("=", 1)
            params[key.strip()] = val.strip()
    if kind == "well":
        g = _parse_complex(params.get("g", "1"))
        a = float(params.get("a", "1"))
        center = float(params.get("center", "0"))
        return jost.Potential1D.square_well(g, grid, half_width=a, center=center)
    if kind == "bump":
        amp = _parse_complex(params.get("amp", "1"))
        a = float(params.get("a", "1"))
        center = float(params.get("center", "0"))
        return jost.Potential1D.bump(grid, amplitude=amp, half_width=a, center=center)
    if kind == "table":
        path = rest
        data = np.genfromtxt(path, delimiter=",", dtype=float)
        if data.ndim != 2 or data.shape[1] not in (2, 3):
            raise ConfigError("table potential needs columns x,V_re[,V_im]")
        xs = data[:, 0]
        vre = data[:, 1]
        vim = data[:, 2] if data.shape[1] == 3 else np.zeros_like(vre)
        order = np.argsort(xs)
        xs, vre, vim = xs[order], vre[order], vim[order]
        support = float(np.max(np.abs(xs)))

        def sampler(x):
            x = np.asarray(x, dtype=float)
            return (np.interp(x, xs, vre, left=0.0, right=0.0)
                    + 1j * np.interp(x, xs, vim, left=0.0, right=0.0))

        return jost.Potential1D(support, sampler, grid)
    raise ConfigError(f"unknown potential kind {kind!r} (well|bump|table)")


def _load_config_file(path: str) -> dict:
    values = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"bad config line {raw!r}")
        key, val = line.split("=", 1)
        values[key.strip().replace("-", "_")] = val.strip()
    return values


def _coerce(raw: str, default):
    if isinstance(default, bool):
        token = raw.strip().lower()
        if token in ("1", "true", "yes", "on"):
            return True
        if token in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"expected a boolean, got {raw!r}")
    return type(default)(raw) if default is not None else raw


def _resolve(args, defaults: dict) -> dict:
    """Flags beat config-file entries beat built-in defaults."""
    file_values = _load_config_file(args.config) if args.config else {}
    resolved = {}
    for key, default in defaults.items():
        cli_value = getattr(args, key, None)
        if cli_value is not None:
            resolved[key] = cli_value
        elif key in file_values:
            resolved[key] = _coerce(file_values[key], default)
        else:
            resolved[key] = default
    unknown = set(file_values) - set(defaults)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return resolved


def _echo_header(config: dict) -> str:
    lines = [f"# {key} = {config[key]}" for key in sorted(config)]
    return "\n".join(lines) + "\n"


def _write_output(text: str, out: str | None) -> None:
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)


def _fmt_complex(z: complex) -> str:
    return f"{z.real:.15g} {z.imag:.15g}"


# ---------------------------------------------------------------------------
# subcommand handlers


def _cmd_kernel(args) -> int:
    defaults = {"d": 1, "z": "-1", "approach": "interior", "x": 0.0, "y": 0.0,
                "r": 1.0}
    cfg = _resolve(args, defaults)
    z = _parse_complex(str(cfg["z"]))
    approach = {
        "interior": Approach.INTERIOR,
        "upper": Approach.FROM_UPPER_HALF_PLANE,
        "lower": Approach.FROM_LOWER_HALF_PLANE,
        "neg": Approach.ALONG_NEGATIVE_AXIS,
    }[cfg["approach"]]
    p = SpectralParameter(z, approach)
    d = int(cfg["d"])
    if d == 1:
        value = kernel_1d(float(cfg["x"]), float(cfg["y"]), p)
    elif d == 2:
        value = kernel_2d(float(cfg["r"]), p)
    else:
        value = kernel_3d(float(cfg["r"]), p)
    print(_fmt_complex(complex(value)))
    return 0


def _cmd_jost(args) -> int:
    defaults = {"potential": "well:g=1", "R": 16.0, "n": 6401, "tol": 1e-6,
                "out": None}
    cfg = _resolve(args, defaults)
    grid = Grid1D(float(cfg["R"]), int(cfg["n"]))
    pot = parse_potential(cfg["potential"], grid)
    report = jost.classify_threshold_1d(pot, tol=float(cfg["tol"]))
    w = report.diagnostics["wronskian"]
    payload = {
        "classification": report.classification.value,
        "rank": report.rank,
        "wronskian": [w.real, w.imag],
        "wronskian_deviation": report.diagnostics["wronskian_deviation"],
    }
    print(json.dumps(payload))
    if cfg["out"]:
        pair = jost.jost_pair(pot)
        rows = ["x,theta_plus_re,theta_plus_im,theta_minus_re,theta_minus_im"]
        for x, tp, tm in zip(grid.points, pair.theta_plus, pair.theta_minus):
            rows.append(f"{x:.15g},{tp.real:.15g},{tp.imag:.15g},"
                        f"{tm.real:.15g},{tm.imag:.15g}")
        _write_output(_echo_header(cfg) + "\n".join(rows) + "\n", cfg["out"])
    return 0


_SWEEP_DEFAULTS = {
    "free1d": (20.0, 4001), "free2d": (20.0, 2000), "free3d": (30.0, 3000),
    "schrod1d": (16.0, 3201), "rankone1d": (20.0, 4001),
}


def _cmd_sweep(args) -> int:
    defaults = {"op": "free1d", "potential": None, "z0": "0", "ray": "pi",
                "r0": 1e-2, "ratio": 10.0 ** -0.5, "count": 9, "s": 2.0,
                "sp": None, "flavor": "weighted_l2", "R": None, "n": None,
                "classify": True, "out": None, "threads": None}
    cfg = _resolve(args, defaults)
    op_name = cfg["op"]
    if op_name not in _SWEEP_DEFAULTS:
        raise ConfigError(f"unknown operator {op_name!r}")
    r_default, n_default = _SWEEP_DEFAULTS[op_name]
    radius = float(cfg["R"]) if cfg["R"] is not None else r_default
    npts = int(cfg["n"]) if cfg["n"] is not None else n_default
    if op_name in ("free2d", "free3d"):
        grid = RadialGrid(radius, npts)
    else:
        grid = Grid1D(radius, npts if npts % 2 == 1 else npts + 1)
    if op_name == "free1d":
        op = ls.OperatorSpec.free1d(grid)
    elif op_name == "free2d":
        op = ls.OperatorSpec.free2d_radial(grid)
    elif op_name == "free3d":
        op = ls.OperatorSpec.free3d_radial(grid)
    elif op_name == "rankone1d":
        op = ls.OperatorSpec.rank_one_perturbed_1d(grid)
    else:
        if not cfg["potential"]:
            raise ConfigError("schrod1d requires --potential")
        op = ls.OperatorSpec.schrodinger1d(parse_potential(cfg["potential"], grid))
    sp_ = float(cfg["sp"]) if cfg["sp"] is not None else float(cfg["s"])
    radii = tuple(float(cfg["r0"]) * float(cfg["ratio"]) ** k
                  for k in range(int(cfg["count"])))
    sweep_cfg = ls.SweepConfig(z0=_parse_complex(str(cfg["z0"])),
                               angle=_parse_angle(str(cfg["ray"])),
                               radii=radii, s=float(cfg["s"]), sp=sp_,
                               flavor=cfg["flavor"])
    workers = int(cfg["threads"]) if cfg["threads"] is not None else _env_threads()
    result = ls.sweep(op, sweep_cfg, workers=workers)
    echo = dict(cfg, sp=sp_, threads=workers, R=radius, n=npts)
    _write_output(_echo_header(echo) + ls.sweep_csv(result), cfg["out"])
    if cfg["classify"]:
        report = ls.classify(op, sweep_cfg, workers=workers)
        print(report.verdict_line())
    if result.aborted:
        print(f"aborted: {result.aborted}", file=sys.stderr)
        return 1
    return 0


def _cmd_bifurcate(args) -> int:
    defaults = {"g": "0.01", "out": None}
    cfg = _resolve(args, defaults)
    gs = [float(t) for t in str(cfg["g"]).split(",") if t]
    curve = pt.square_well_curve(gs)
    for g, e, p in zip(curve.couplings, curve.energies, curve.predicted):
        print(f"g={g:.15g} E={e:.15g} E_predicted={p:.15g}")
    if cfg["out"]:
        _write_output(_echo_header(cfg) + pt.bifurcation_csv(curve), cfg["out"])
    return 0


def _cmd_shift(args) -> int:
    defaults = {"z0": "1", "phi": "1", "n": do.DEFAULT_LENGTH, "out": None}
    cfg = _resolve(args, defaults)
    z0 = _parse_complex(str(cfg["z0"]))
    phi_entries = [_parse_complex(t) for t in str(cfg["phi"]).split(";" if ";" in str(cfg["phi"]) else ",")]
    phi = do.SeqVector.from_values(phi_entries, n=int(cfg["n"]))
    lvl = do.build_shift_virtual_level(z0, phi)
    payload = {
        "z0": [z0.real, z0.imag],
        "residual": lvl.residual,
        "functional_index": lvl.functional_index,
        "psi_head": [[v.real, v.imag] for v in lvl.psi.entries[:8]],
        "state_space_dimension": do.virtual_state_space_dimension(lvl),
    }
    print(json.dumps(payload))
    if cfg["out"]:
        rows = ["index,psi_re,psi_im"]
        for idx, v in enumerate(lvl.psi.entries, start=1):
            rows.append(f"{idx},{v.real:.15g},{v.imag:.15g}")
        _write_output(_echo_header(cfg) + "\n".join(rows) + "\n", cfg["out"])
    return 0


def _cmd_embedded(args) -> int:
    defaults = {"zeta0": 0.0, "count": 8, "out": None}
    cfg = _resolve(args, defaults)
    fam = pt.embedded_family_check(float(cfg["zeta0"]), n=int(cfg["count"]))
    alpha_txt = f"alpha~{fam.alpha:.3g}"
    print(f"residual_max={fam.residual_max:.3e} monotone_growth={fam.monotone_growth} {alpha_txt}")
    if cfg["out"]:
        text = (_echo_header(cfg) + pt.embedded_csv(fam) + "\n"
                + ls.sweep_csv(fam.sweep_result))
        _write_output(text, cfg["out"])
    return 0


def _cmd_critical(args) -> int:
    defaults = {"case": "free1d", "potential": None, "K": 1.0, "jmax": 64,
                "R": 320.0, "n": None, "out": None}
    cfg = _resolve(args, defaults)
    case = cfg["case"]
    radius = float(cfg["R"])
    if case == "free1d":
        form = cr.QuadraticForm.free_line(radius, int(cfg["n"] or 12801))
    elif case == "free3d":
        form = cr.QuadraticForm.free_radial3d(radius, int(cfg["n"] or 12800))
    elif case == "potential":
        if not cfg["potential"]:
            raise ConfigError("critical --case potential requires --potential")
        pot = parse_potential(cfg["potential"], Grid1D(radius, int(cfg["n"] or 12801)))
        form = cr.QuadraticForm.from_potential_line(pot.sample, radius,
                                                    int(cfg["n"] or 12801))
    else:
        raise ConfigError(f"unknown case {case!r}")
    result = cr.null_state_iteration(form, compact_radius=float(cfg["K"]),
                                     j_max=int(cfg["jmax"]))
    payload = {"verdict": result.verdict.value,
               "margin": result.margin,
               "weight_coefficient": result.weight_coefficient,
               "residual": result.residual}
    print(json.dumps(payload))
    if cfg["out"]:
        _write_output(_echo_header(cfg) + cr.trace_csv(result), cfg["out"])
    return 0


_NULLITY_DEMOS = {
    "jordan3": np.array([[0, 1, 0], [0, 0, 1], [0, 0, 0]], dtype=float),
    "zero2": np.zeros((2, 2)),
    "identity3": np.eye(3),
}


def _cmd_nullity(args) -> int:
    defaults = {"demo": None, "matrix": None, "trials": 64, "seed": 0}
    cfg = _resolve(args, defaults)
    if cfg["matrix"]:
        rows = []
        for line in Path(cfg["matrix"]).read_text().splitlines():
            if line.strip():
                rows.append([_parse_complex(t) for t in line.split(",")])
        m = np.array(rows, dtype=complex)
    elif cfg["demo"]:
        if cfg["demo"] not in _NULLITY_DEMOS:
            raise ConfigError(f"unknown demo {cfg['demo']!r}")
        m = _NULLITY_DEMOS[cfg["demo"]]
    else:
        raise ConfigError("nullity requires --matrix or --demo")
    r = pt.matrix_nullity_by_perturbation(m, trials=int(cfg["trials"]),
                                          rng_seed=int(cfg["seed"]))
    print(r)
    return 0


def _cmd_suite(args) -> int:
    defaults = {"only": None, "out": None}
    cfg = _resolve(args, defaults)
    only = None
    if cfg["only"]:
        only = {int(t) for t in str(cfg["only"]).split(",")}
    t0 = time.perf_counter()
    results = acceptance.run_all(only=only)
    all_pass = True
    for res in results:
        print(res.line())
        print(f"  criterion {res.number} runtime: {res.runtime:.1f}s", file=sys.stderr)
        all_pass = all_pass and res.passed
        if cfg["out"] and res.artifacts:
            outdir = Path(cfg["out"])
            outdir.mkdir(parents=True, exist_ok=True)
            for name, text in res.artifacts.items():
                (outdir / name).write_text(text, encoding="utf-8", newline="\n")
    print(f"suite runtime: {time.perf_counter() - t0:.1f}s", file=sys.stderr)
    return 0 if all_pass else 1


def _env_threads() -> int:
    try:
        return max(1, int(os.environ.get("VIRTLEV_THREADS", "1")))
    except ValueError:
        return 1


def build_parser() -> _Parser:
    parser = _Parser(prog="virtlev",
                     description="virtual levels and LAP resolvent estimates, desk scale")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, handler, help_text):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(handler=handler)
        p.add_argument("--config", help="key = value file; flags override")
        p.add_argument("--out", help="output path (CSV) or directory (suite)")
        return p

    p = add("kernel", _cmd_kernel, "evaluate a free resolvent kernel pointwise")
    p.add_argument("--d", type=int, choices=(1, 2, 3))
    p.add_argument("--z", help="spectral parameter: re[,im]")
    p.add_argument("--approach", choices=("interior", "upper", "lower", "neg"))
    p.add_argument("--x", type=float)
    p.add_argument("--y", type=float)
    p.add_argument("--r", type=float)

    p = add("jost", _cmd_jost, "Wronskian threshold classification of a potential")
    p.add_argument("--potential")
    p.add_argument("--R", type=float)
    p.add_argument("--n", type=int)
    p.add_argument("--tol", type=float)

    p = add("sweep", _cmd_sweep, "resolvent-norm sweep toward a threshold")
    p.add_argument("--op", choices=tuple(_SWEEP_DEFAULTS))
    p.add_argument("--potential")
    p.add_argument("--z0")
    p.add_argument("--ray", help="approach angle: pi, pi/2, or radians")
    p.add_argument("--r0", type=float)
    p.add_argument("--ratio", type=float)
    p.add_argument("--count", type=int)
    p.add_argument("--s", type=float)
    p.add_argument("--sp", type=float)
    p.add_argument("--flavor", choices=("weighted_l2", "l1_linf"))
    p.add_argument("--R", type=float)
    p.add_argument("--n", type=int)
    p.add_argument("--threads", type=int)
    p.add_argument("--no-classify", dest="classify", action="store_false",
                   default=None)

    p = add("bifurcate", _cmd_bifurcate, "square-well eigenvalue vs -g^2")
    p.add_argument("--g", help="coupling or comma list")

    p = add("shift", _cmd_shift, "manufactured virtual level of the left shift")
    p.add_argument("--z0", help="unit-circle point: re,im | 1 | i | arg:pi/4")
    p.add_argument("--phi", help="comma list of leading entries")
    p.add_argument("--n", type=int)

    p = add("embedded", _cmd_embedded, "embedded eigenvalue family check")
    p.add_argument("--zeta0", type=float)
    p.add_argument("--count", type=int)

    p = add("critical", _cmd_critical, "null-state / weighted-gap dichotomy")
    p.add_argument("--case", choices=("free1d", "free3d", "potential"))
    p.add_argument("--potential")
    p.add_argument("--K", type=float)
    p.add_argument("--jmax", type=int)
    p.add_argument("--R", type=float)
    p.add_argument("--n", type=int)

    p = add("nullity", _cmd_nullity, "matrix nullity by random perturbations")
    p.add_argument("--demo", choices=tuple(_NULLITY_DEMOS))
    p.add_argument("--matrix", help="CSV file of matrix entries")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)

    p = add("suite", _cmd_suite, "run the acceptance battery")
    p.add_argument("--only", help="comma list of criterion numbers")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.handler(args)
    except ConfigError as exc:
        _emit_error("config", str(exc))
        return 2
    except VirtlevError as exc:
        _emit_error(type(exc).__name__, str(exc))
        return 1
    except (ValueError, OSError) as exc:
        _emit_error("config", str(exc))
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
