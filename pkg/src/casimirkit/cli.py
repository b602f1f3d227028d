"""Command-line front end.

Every subcommand writes its results into a run directory together with a
``manifest.json`` that records the resolved configuration, constants and
versions.  Nothing that depends on the machine or on ``--workers`` goes into
the outputs, so repeated runs produce identical bytes.

Exit status: 0 success, 2 domain error, 3 fit failure, 64 usage error,
65 malformed config file.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import platform
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy

try:
    import tomllib
except ImportError:  # Python < 3.11
    import tomli as tomllib

from . import __version__
from .analytic import atom_half_space_pairwise, deviation_report, plate_plate_pairwise_pressure
from .constants import CONSTANTS
from .errors import CapabilityError, DomainError, FitError
from .extractor import EXACT_VALUES, PureTermConfig, cutoff_grid, pure_term_report
from .geometry.bodies import Ball, Cube, Cylinder, HalfSpace, PointAtom
from .geometry.energy import interaction_energy_disjoint, planar_pressure, self_energy_with_cutoff
from .geometry.pairdensity import SCHEMA_ID as DENSITY_SCHEMA_ID
from .geometry.pairdensity import pair_distance_density
from .kernel import Material
from . import mems, spectra

EXIT_OK = 0
EXIT_DOMAIN = 2
EXIT_FIT = 3
EXIT_USAGE = 64
EXIT_CONFIG = 65

SUBCOMMANDS = ("compare", "pairwise", "pure-term", "drag", "unruh", "cosmo", "mems", "cache")
# options that never influence results and stay out of the manifest
_RUNTIME_ONLY = {"workers", "out", "config", "quiet", "command"}


class UsageError(Exception):
    pass


class ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _version_text():
    consts = ", ".join(f"{k}={v!r}" for k, v in CONSTANTS.items())
    return f"casimirkit {__version__}\nconstants: {consts}"


# ---------------------------------------------------------------------------
# output


def _plain(obj):
    """Convert to JSON-safe builtins; infinities become the string "inf"."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        if math.isnan(x):
            return None
        return x
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def dumps(obj) -> str:
    return json.dumps(_plain(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in row])
    return buf.getvalue()


@dataclass
class RunOutput:
    files: dict  # name -> text
    summary: str


def _run_dir(args, resolved):
    if args.out:
        return Path(args.out)
    digest = hashlib.sha256(dumps(resolved).encode()).hexdigest()[:12]
    return Path("runs") / f"{args.command}-{digest}"


def _write_run(path: Path, resolved: dict, out: RunOutput):
    path.mkdir(parents=True, exist_ok=True)
    hashes = {}
    for name, text in sorted(out.files.items()):
        (path / name).write_text(text)
        hashes[name] = hashlib.sha256(text.encode()).hexdigest()
    manifest = {
        "schema": "casimirkit.manifest/1",
        "toolkit": "casimirkit",
        "version": __version__,
        "subcommand": resolved["command"],
        "config": {k: v for k, v in resolved.items() if k != "command"},
        "constants": CONSTANTS,
        "environment": {
            "python": platform.python_version(),
            "numpy": np.__version__,
            "scipy": scipy.__version__,
        },
        "outputs": hashes,
    }
    (path / "manifest.json").write_text(dumps(manifest))


# ---------------------------------------------------------------------------
# subcommands


def cmd_compare(args):
    rows = deviation_report()
    table = {
        "schema": "casimirkit.compare/1",
        "rows": [r.to_dict() for r in rows],
        "exact_values": EXACT_VALUES,
        "notes": ["cube exact value is quoted without units and is taken as hbar c / a"],
    }
    csv_rows = [(r.quantity, r.pairwise, r.exact, r.ratio, r.pairwise_force_sign, r.exact_force_sign) for r in rows]
    lines = [f"{'quantity':24s} {'pairwise':>12s} {'exact':>12s} {'ratio':>10s}  force signs"]
    for r in rows:
        lines.append(
            f"{r.quantity:24s} {r.pairwise:12.7f} {r.exact:12.7f} {r.ratio:10.6f}  "
            f"{r.pairwise_force_sign:+d} / {r.exact_force_sign:+d}"
        )
    return RunOutput(
        {
            "compare.json": dumps(table),
            "compare.csv": csv_text(
                ["quantity", "pairwise", "exact", "ratio", "pairwise_force_sign", "exact_force_sign"], csv_rows
            ),
        },
        "\n".join(lines),
    )


def _finite_body(args):
    if args.body == "ball":
        return Ball(args.a)
    if args.body == "cube":
        return Cube(args.a)
    if args.body == "cylinder":
        return Cylinder(args.a)
    raise DomainError(f"{args.body} is not a finite body")


def _material(args):
    return Material.from_epsilon(args.epsilon, alpha=args.alpha)


def cmd_pairwise(args):
    material = _material(args)
    if args.body in ("atom-half-space", "half-spaces"):
        d = args.d
        if args.body == "atom-half-space":
            numeric = interaction_energy_disjoint(PointAtom((0.0, 0.0, d), args.alpha), HalfSpace(0.0), material)
            analytic = atom_half_space_pairwise(d, args.alpha, material.n_alpha)
            result = {"configuration": args.body, "d": d, "energy": numeric, "analytic": analytic}
        else:
            e = lambda gap: interaction_energy_disjoint(HalfSpace(0.0), HalfSpace(gap, upper=True), material)
            numeric = planar_pressure(e, d)
            analytic = plate_plate_pairwise_pressure(d) * (material.n_alpha / (3 / (4 * math.pi))) ** 2
            result = {"configuration": args.body, "d": d, "energy_per_area": e(d), "pressure": numeric, "analytic": analytic}
        result["relative_difference"] = abs(numeric / analytic - 1.0) if analytic else abs(numeric)
        result["schema"] = "casimirkit.pairwise/1"
        result["material"] = material.to_dict()
        summary = f"{args.body} d={d:g}: quadrature {numeric:.10g}, closed form {analytic:.10g}"
        return RunOutput({"pairwise.json": dumps(result)}, summary)

    body = _finite_body(args)
    density = pair_distance_density(
        body, args.method, args.resolution, args.seed, samples=args.samples, workers=args.workers,
        cache_dir=args.cache_dir,
    )
    s = cutoff_grid(body, args.s_min, args.s_max, args.n_s)
    energies = self_energy_with_cutoff(body, material, s, density=density)
    result = {
        "schema": "casimirkit.pairwise/1",
        "configuration": body.kind,
        "body": body.to_dict(),
        "material": material.to_dict(),
        "provenance": density.provenance,
        "pair_measure": density.integral(),
        "s": s,
        "energy": energies,
    }
    r = np.linspace(0.0, body.diameter, 201)
    return RunOutput(
        {
            "pairwise.json": dumps(result),
            "pair_density.json": density.to_json(indent=1, sort_keys=True) + "\n",
            "energies.csv": csv_text(["s", "energy"], zip(s.tolist(), energies.tolist())),
            "pair_density.csv": csv_text(["r", "P"], zip(r.tolist(), density(r).tolist())),
        },
        f"{body.kind}: pair measure {density.integral():.10g}, E(s) at {len(s)} cutoffs",
    )


def cmd_pure_term(args):
    body = _finite_body(args)
    material = _material(args)
    cfg = PureTermConfig(
        method=args.method,
        resolution=args.resolution,
        samples=args.samples,
        seed=args.seed,
        s_min=args.s_min,
        s_max=args.s_max,
        n_s=args.n_s,
        basis=tuple(args.basis) if args.basis else None,
        tolerance=args.tolerance,
        max_condition=args.max_condition,
        workers=args.workers,
        check_resolution=args.check_resolution,
        cache_dir=args.cache_dir,
    )
    row = pure_term_report(body, material, cfg)
    data = {"schema": "casimirkit.pure_term/1", "config": cfg.to_dict(), "rows": [row.to_dict()]}
    exp = row.expansion
    csv_rows = [(
        row.geometry, row.size, row.b0, row.uncertainty,
        "" if row.exact_value is None else row.exact_value,
        row.pairwise_sign, row.exact_sign, row.sign_agreement,
    )]
    exact = "sign only" if row.exact_value is None else f"{row.exact_value:+.4f}"
    summary = (
        f"{row.geometry} a={row.size:g}: b0 = {row.b0:+.7f} +/- {row.uncertainty:.2g}"
        f"  exact {exact}  signs {row.pairwise_sign:+d}/{row.exact_sign:+d}"
        f"  agreement {'yes' if row.sign_agreement else 'NO'}"
    )
    if row.convergence:
        summary += f"\n  resolution check {row.convergence['resolutions']}: b0 {row.convergence['b0']}"
    return RunOutput(
        {
            "pure_term.json": dumps(data),
            "pure_term.csv": csv_text(
                ["geometry", "size", "b0", "uncertainty", "exact", "pairwise_sign", "exact_sign", "sign_agreement"],
                csv_rows,
            ),
            "energies.csv": csv_text(["s", "energy", "fit"], zip(exp.s_grid, row.energies, exp.predict(exp.s_grid).tolist())),
        },
        summary,
    )


def _spectrum(args):
    kind = args.spectrum
    if kind == "vacuum":
        return spectra.Vacuum()
    if kind == "scaled-vacuum":
        return spectra.ScaledVacuum(args.factor)
    if kind == "planck":
        return spectra.Planck(args.temperature)
    if args.table is None:
        raise DomainError("--table is required for a tabulated spectrum")
    return spectra.Tabulated.from_csv(args.table)


def cmd_drag(args):
    sd = _spectrum(args)
    if args.p1 is not None:
        atom = spectra.TwoLevelAtom(args.omega, args.b12, args.p1, 1.0 - args.p1)
    else:
        t_pop = args.temperature if args.spectrum == "planck" else 0.0
        atom = spectra.TwoLevelAtom.thermal(args.omega, args.b12, t_pop)
    rho, drho = spectra.eval_spectral(sd, args.omega)
    force = spectra.drag_force(atom, sd, args.v)
    data = {
        "schema": "casimirkit.drag/1",
        "spectrum": args.spectrum,
        "omega": args.omega,
        "rho": rho,
        "drho_domega": drho,
        "drag_factor": spectra.drag_factor(sd, args.omega),
        "atom": {"omega": atom.omega, "b12": atom.b12, "p1": atom.p1, "p2": atom.p2},
        "v": args.v,
        "force": force,
    }
    return RunOutput({"drag.json": dumps(data)}, f"{args.spectrum}: F = {force:.6g} N at v = {args.v:g} m/s")


def cmd_unruh(args):
    if args.acceleration is not None:
        a = args.acceleration
        t = spectra.unruh_temperature(a)
    else:
        t = args.temperature
        a = spectra.unruh_acceleration(t)
    data = {"schema": "casimirkit.unruh/1", "acceleration": a, "temperature": t}
    return RunOutput({"unruh.json": dumps(data)}, f"a = {a:.6g} m/s^2  <->  T = {t:.6g} K")


def cmd_cosmo(args):
    b = spectra.vacuum_energy_budget(args.cutoff_length)
    data = {"schema": "casimirkit.cosmo/1", **b.to_dict()}
    summary = (
        f"cutoff {b.cutoff_length:g} m: {b.energy_density:.3g} J/m^3 = {b.mass_density:.3g} g/cm^3; "
        f"observed {b.observed_mass_density:.3g} g/cm^3; gap {b.orders_of_magnitude_gap:.1f} orders"
    )
    return RunOutput({"cosmo.json": dumps(data)}, summary)


def _default_sweep(cfg, parameter, steps):
    lam = mems.lambda_param(cfg)
    if parameter == "k":
        k_star = cfg.k * lam / mems.LAMBDA_CRITICAL
        return np.geomspace(2.0 * k_star, 0.5 * k_star, steps)
    d_star = cfg.d0 * (lam / mems.LAMBDA_CRITICAL) ** 0.2
    return np.geomspace(1.3 * d_star, 0.8 * d_star, steps)


def cmd_mems(args):
    cfg = mems.OscillatorConfig(args.k, args.d0, args.area, args.mass, args.damping)
    lam = mems.lambda_param(cfg)
    eqs = mems.equilibria(cfg)
    regime = "collapse" if not eqs else ("marginal" if eqs[0].stability == "marginal" else "bistable")
    p_pa, p_atm = mems.pressure_at_gap(cfg.d0)
    data = {
        "schema": "casimirkit.mems/1",
        "config": cfg.to_dict(),
        "lambda": lam,
        "lambda_critical": mems.LAMBDA_CRITICAL,
        "regime": regime,
        "equilibria": [e.to_dict() for e in eqs],
        "pressure_at_rest_gap": {"pa": p_pa, "atm": p_atm},
    }
    files = {}
    lines = [f"lambda = {lam:.6g} (critical {mems.LAMBDA_CRITICAL})  regime: {regime}"]
    for e in eqs:
        lines.append(f"  gap/d0 = {e.gap:.9f}  {e.stability}")
    if args.sweep:
        if args.sweep_from is not None and args.sweep_to is not None:
            values = np.linspace(args.sweep_from, args.sweep_to, args.steps)
        else:
            values = _default_sweep(cfg, args.sweep_param, args.steps)
        sweep = mems.hysteresis_sweep(cfg, args.sweep_param, values)
        data["sweep"] = {"parameter": sweep.parameter, "pull_in": sweep.pull_in, "steps": len(values)}
        files["sweep.csv"] = csv_text(
            ["direction", args.sweep_param, "lambda", "gap_over_d0", "state"],
            [(p.direction, p.value, p.lam, "" if p.gap is None else p.gap, p.state) for p in sweep.points],
        )
        if sweep.pull_in:
            pi = sweep.pull_in
            lines.append(f"pull-in at {args.sweep_param} = {pi['value']:.6g} (lambda {pi['lam']:.6g})")
    if args.simulate:
        period = mems.linear_period(cfg)
        x_stable = mems.stable_gap(lam)
        x0 = args.initial_gap if args.initial_gap is not None else (cfg.d0 if x_stable is None else 0.99 * x_stable * cfg.d0)
        traj = mems.simulate(
            cfg, x0, 0.0, args.periods * period, period / args.steps_per_period, record_every=args.record_every
        )
        data["simulation"] = {
            "initial_gap": x0,
            "duration": args.periods * period,
            "timestep": period / args.steps_per_period,
            "contact": traj.contact,
            "contact_time": traj.contact_time,
            "max_energy_drift": traj.max_energy_drift() if not traj.contact else None,
        }
        files["trajectory.csv"] = csv_text(["t", "d", "v"], traj.rows())
        lines.append("contact at t = %.6g s" % traj.contact_time if traj.contact else "no contact")
    files["mems.json"] = dumps(data)
    return RunOutput(files, "\n".join(lines))


def cmd_cache(args):
    root = Path(args.cache_dir) if args.cache_dir else None
    entries = []
    if root is not None and root.is_dir():
        for p in sorted(root.glob("*.json")):
            try:
                d = json.loads(p.read_text())
            except (OSError, json.JSONDecodeError):
                continue
            if d.get("schema") != DENSITY_SCHEMA_ID:
                continue
            entries.append({"file": p.name, "body": d.get("body"), "provenance": d.get("provenance")})
    removed = []
    if args.action == "clear":
        for e in entries:
            (root / e["file"]).unlink()
            removed.append(e["file"])
    data = {"schema": "casimirkit.cache/1", "action": args.action, "entries": entries, "removed": removed}
    verb = "removed" if args.action == "clear" else "found"
    return RunOutput({"cache.json": dumps(data)}, f"{verb} {len(entries)} cached pair densities")


COMMANDS = {
    "compare": cmd_compare,
    "pairwise": cmd_pairwise,
    "pure-term": cmd_pure_term,
    "drag": cmd_drag,
    "unruh": cmd_unruh,
    "cosmo": cmd_cosmo,
    "mems": cmd_mems,
    "cache": cmd_cache,
}


# ---------------------------------------------------------------------------
# parser


def _positive_int(text):
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _body_options(p, bodies):
    p.add_argument("--body", choices=bodies, required=True)
    p.add_argument("--a", type=float, default=1.0, help="size: ball/cylinder radius or cube side")
    p.add_argument("--epsilon", type=float, default=math.inf, help="dielectric constant (inf = perfect conductor)")
    p.add_argument("--alpha", type=float, default=1.0, help="atomic polarizability")
    p.add_argument("--method", choices=("analytic", "grid", "monte_carlo"), default="grid")
    p.add_argument("--resolution", type=_positive_int, default=256)
    p.add_argument("--samples", type=_positive_int, default=10_000_000)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--s-min", type=float, default=0.02, help="smallest cutoff in units of a")
    p.add_argument("--s-max", type=float, default=0.3, help="largest cutoff in units of a")
    p.add_argument("--n-s", type=_positive_int, default=24)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="flat TOML file of option values; flags override it")
    common.add_argument("--out", help="run directory (default runs/<command>-<config hash>)")
    common.add_argument("--workers", type=_positive_int, default=1, help="threads; never changes the output")
    common.add_argument("--cache-dir", default=None, help="pair-density cache directory")
    common.add_argument("--quiet", action="store_true")

    parser = _Parser(
        prog="casimirkit",
        description="Pairwise Casimir energies, vacuum drag and Casimir MEMS.",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=_version_text())
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("compare", parents=[common], help="pairwise vs exact ratios")

    p = sub.add_parser("pairwise", parents=[common], help="pair densities, E(s) and disjoint-body energies")
    _body_options(p, ("ball", "cube", "cylinder", "atom-half-space", "half-spaces"))
    p.add_argument("--d", type=float, default=1.0, help="separation for disjoint configurations")

    p = sub.add_parser("pure-term", parents=[common], help="cutoff-independent self-energy term")
    _body_options(p, ("ball", "cube", "cylinder"))
    p.add_argument("--basis", nargs="+", default=None, help="cutoff terms, e.g. s^-4 s^-3 s^-1")
    p.add_argument("--tolerance", type=float, default=1e-6)
    p.add_argument("--max-condition", type=float, default=1e12)
    p.add_argument("--check-resolution", action="store_true", help="repeat at doubled resolution")

    p = sub.add_parser("drag", parents=[common], help="velocity drag on a two-level atom")
    p.add_argument("--spectrum", choices=("vacuum", "scaled-vacuum", "planck", "tabulated"), default="vacuum")
    p.add_argument("--factor", type=float, default=1.0)
    p.add_argument("--temperature", type=float, default=300.0)
    p.add_argument("--table", default=None, help="CSV of omega (rad/s), rho (J s/m^3)")
    p.add_argument("--omega", type=float, default=1e14)
    p.add_argument("--b12", type=float, default=1.0)
    p.add_argument("--p1", type=float, default=None, help="ground population (default: thermal)")
    p.add_argument("--v", type=float, default=1.0)

    p = sub.add_parser("unruh", parents=[common], help="Unruh temperature <-> acceleration")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--acceleration", type=float)
    g.add_argument("--temperature", type=float)

    p = sub.add_parser("cosmo", parents=[common], help="zero-point energy density estimate")
    p.add_argument("--cutoff-length", type=float, default=1e-35)

    p = sub.add_parser("mems", parents=[common], help="Casimir spring-plate oscillator")
    p.add_argument("--k", type=float, required=True)
    p.add_argument("--d0", type=float, required=True)
    p.add_argument("--area", type=float, required=True)
    p.add_argument("--mass", type=float, default=1e-9)
    p.add_argument("--damping", type=float, default=0.0)
    p.add_argument("--sweep", action="store_true")
    p.add_argument("--sweep-param", choices=mems.SWEEPABLE, default="k")
    p.add_argument("--sweep-from", type=float, default=None)
    p.add_argument("--sweep-to", type=float, default=None)
    p.add_argument("--steps", type=_positive_int, default=201)
    p.add_argument("--simulate", action="store_true")
    p.add_argument("--initial-gap", type=float, default=None)
    p.add_argument("--periods", type=float, default=100.0)
    p.add_argument("--steps-per-period", type=_positive_int, default=200)
    p.add_argument("--record-every", type=_positive_int, default=10)

    p = sub.add_parser("cache", parents=[common], help="list or clear cached pair densities")
    p.add_argument("action", choices=("list", "clear"), nargs="?", default="list")
    return parser


def _subparser(parser, name):
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            return action.choices[name]
    raise KeyError(name)


def _load_config(path):
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from exc
    return data


def _coerce(action, key, value, path):
    if isinstance(action, (argparse._StoreTrueAction, argparse._StoreFalseAction)):
        if not isinstance(value, bool):
            raise ConfigError(f"{path}: {key} must be true or false")
        return value
    if action.nargs in ("+", "*"):
        if not isinstance(value, list):
            raise ConfigError(f"{path}: {key} must be a list")
        return value
    if isinstance(value, (bool, list)):
        raise ConfigError(f"{path}: bad value for {key}: {value!r}")
    if action.type in (int, _positive_int) and not isinstance(value, (int, str)):
        raise ConfigError(f"{path}: {key} must be an integer")
    if action.type is not None:
        try:
            value = action.type(str(value) if action.type is not float else value)
        except (TypeError, ValueError, argparse.ArgumentTypeError) as exc:
            raise ConfigError(f"{path}: bad value for {key}: {value!r}") from exc
    if action.choices is not None and value not in action.choices:
        raise ConfigError(f"{path}: {key} must be one of {list(action.choices)}")
    return value


def _apply_config(sub, data, path):
    actions = {a.dest: a for a in sub._actions if a.dest not in ("help", "config")}
    defaults = {}
    for key, value in data.items():
        if isinstance(value, dict):
            raise ConfigError(f"{path}: config must be flat, found table [{key}]")
        dest = key.replace("-", "_")
        if dest not in actions:
            raise ConfigError(f"{path}: unknown option {key!r} for this subcommand")
        action = actions[dest]
        defaults[dest] = _coerce(action, key, value, path)
        # a value from the file satisfies a required flag
        action.required = False
    sub.set_defaults(**defaults)
    # a file value also satisfies a required mutually exclusive group
    for group in sub._mutually_exclusive_groups:
        if any(a.dest in defaults for a in group._group_actions):
            group.required = False


def parse(argv):
    parser = build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    command = next((a for a in argv if a in SUBCOMMANDS), None)
    if known.config and command:
        _apply_config(_subparser(parser, command), _load_config(known.config), known.config)
    return parser.parse_args(argv)


def resolved_config(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in _RUNTIME_ONLY or k == "command"}


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = parse(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except ConfigError as exc:
        print(f"casimirkit: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)

    resolved = resolved_config(args)
    try:
        out = COMMANDS[args.command](args)
    except FitError as exc:
        print(f"casimirkit: fit failed: {exc}", file=sys.stderr)
        if exc.diagnostics:
            print(f"  diagnostics: {dumps(exc.diagnostics).strip()}", file=sys.stderr)
        return EXIT_FIT
    except (DomainError, CapabilityError) as exc:
        print(f"casimirkit: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    path = _run_dir(args, resolved)
    _write_run(path, resolved, out)
    if not args.quiet:
        print(out.summary)
        print(f"outputs written to {path}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
