"""Command line interface: hoppath <subcommand>.

Exit codes: 0 success, 1 verification failure, 2 configuration error,
3 numerical error (degenerate correction, divergent behavior, focal
singularity, and friends).
"""

from __future__ import annotations

import argparse
import sys as _sys

from .errors import ConfigError, HoppathError, NumericalError
from .finitary import HopPath, Model, PhaseParam
from .harness import (
    VERIFY_SECTIONS,
    config_from_dict,
    config_to_dict,
    emit_report,
    load_config,
    run_experiment,
    verify_suite,
)
from .action import Harmonic, PhysicalSystem, SpacetimePoint
from .xmachine import (
    CoverSemantics,
    additive_behavior_closed,
    additive_behavior_truncated,
    compile_path_to_machine,
    machine_from_text,
    machine_to_text,
)

# flag, config-dict path, parser
_OVERRIDES = [
    ("--system.mass", ("system", "mass"), float),
    ("--system.hbar", ("system", "hbar"), float),
    ("--system.potential", ("system", "potential"), str),
    ("--system.omega", ("system", "omega"), float),
    ("--region.x-lo", ("region", "x_lo"), float),
    ("--region.x-hi", ("region", "x_hi"), float),
    ("--region.t-lo", ("region", "t_lo"), float),
    ("--region.t-hi", ("region", "t_hi"), float),
    ("--q-i.x", ("q_i", "x"), float),
    ("--q-i.t", ("q_i", "t"), float),
    ("--q-f.x", ("q_f", "x"), float),
    ("--q-f.t", ("q_f", "t"), float),
    ("--model", ("model",), str),
    ("--rho", ("rho",), float),
    ("--n-max", ("n_max",), int),
    ("--quadrature.rule-order", ("quadrature", "rule_order"), int),
    ("--quadrature.panels-x", ("quadrature", "panels_x"), int),
    ("--quadrature.panels-t", ("quadrature", "panels_t"), int),
    ("--cover-semantics", ("cover_semantics",), str),
    ("--seed", ("seed",), int),
]


def _add_config_args(parser: argparse.ArgumentParser):
    parser.add_argument(
        "--config",
        required=True,
        help="config JSON file path or bundled experiment name (wide-x, narrow-x, harmonic)",
    )
    for flag, path, typ in _OVERRIDES:
        parser.add_argument(flag, dest="::".join(path), type=typ, default=None, help=argparse.SUPPRESS)


def _config_from_args(args) -> "ExperimentConfig":
    config = load_config(args.config)
    data = config_to_dict(config)
    omega_override = None
    for flag, path, _ in _OVERRIDES:
        value = getattr(args, "::".join(path), None)
        if value is None:
            continue
        if path == ("system", "omega"):
            omega_override = value
            continue
        node = data
        for key in path[:-1]:
            node = node[key]
        node[path[-1]] = value
    pot = data["system"]["potential"]
    if pot == "harmonic":
        if omega_override is None:
            raise ConfigError("--system.potential harmonic needs --system.omega")
        data["system"]["potential"] = {"harmonic": {"omega": omega_override}}
    elif omega_override is not None:
        if not (isinstance(pot, dict) and "harmonic" in pot):
            raise ConfigError("--system.omega requires a harmonic potential")
        pot["harmonic"]["omega"] = omega_override
    return config_from_dict(data)


def _fmt(z: complex) -> str:
    return f"{z.real:+.12e} {z.imag:+.12e}i"


def _cmd_standard(args) -> int:
    config = _config_from_args(args)
    report = run_experiment(config)
    print("n  phi_re              phi_im               dphi_re             dphi_im")
    for row in report.rows:
        print(
            f"{row.n}  {row.phi.real:+.12e} {row.phi.imag:+.12e}  "
            f"{row.delta_phi.real:+.12e} {row.delta_phi.imag:+.12e}"
        )
    for n, res in enumerate(report.telescoping_residuals, start=1):
        print(f"telescoping residual N={n}: {res:.3e}")
    return 0


def _cmd_finitary(args) -> int:
    config = _config_from_args(args)
    report = run_experiment(config)
    print("n  B                                        psi                                      |psi-dphi|")
    for row in report.rows:
        print(f"{row.n}  {_fmt(row.b):<40} {_fmt(row.psi):<40} {row.abs_err:.3e}")
    print(f"tail estimate: {report.tail_estimate:.3e}")
    ok = report.flags["psi_matches_corrections_1e-8"]
    print(f"psi identity: {'pass' if ok else 'FAIL'}")
    return 0 if ok else 1


def _cmd_machine(args) -> int:
    with open(args.machine, encoding="utf-8") as fh:
        text = fh.read()
    machine = machine_from_text(text, CoverSemantics(args.cover))
    if args.truncate is not None:
        value = additive_behavior_truncated(machine, max_len=args.truncate)
        label = f"truncated (max_len={args.truncate})"
    else:
        value = additive_behavior_closed(machine)
        label = "closed"
    print(f"{label} additive behavior: {_fmt(value)}")
    return 0


def _cmd_compile_path(args) -> int:
    points = []
    with open(args.path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ConfigError(f"{args.path}:{lineno}: expected 'x t', got {raw!r}")
            points.append(SpacetimePoint(float(parts[0]), float(parts[1])))
    if len(points) < 2:
        raise ConfigError("path file must contain at least two points")
    if args.omega is not None:
        system = PhysicalSystem(mass=args.mass, hbar=args.hbar, potential=Harmonic(omega=args.omega))
    else:
        system = PhysicalSystem(mass=args.mass, hbar=args.hbar)
    path = HopPath(points=tuple(points), model=Model(args.model))
    machine = compile_path_to_machine(path, system, PhaseParam(rho=args.rho))
    text = machine_to_text(machine)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        _sys.stdout.write(text)
    return 0


def _cmd_verify(args) -> int:
    selection = None
    if args.only is not None:
        selection = [part.strip() for part in args.only.split(",") if part.strip()]
    results = verify_suite(selection)
    failures = 0
    for res in results:
        status = "PASS" if res.passed else "FAIL"
        print(f"{status} {res.section}/{res.name} ({res.seconds:.2f}s): {res.detail}")
        failures += 0 if res.passed else 1
    print(f"{len(results) - failures}/{len(results)} checks passed")
    return 1 if failures else 0


def _cmd_report(args) -> int:
    config = _config_from_args(args)
    report = run_experiment(config)
    emit_report(report, args.format, args.out)
    print(f"wrote {args.format} report to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hoppath", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("standard", help="phi_n table for an experiment")
    _add_config_args(p)
    p.set_defaults(func=_cmd_standard)

    p = sub.add_parser("finitary", help="solved B_n and psi_n table for an experiment")
    _add_config_args(p)
    p.set_defaults(func=_cmd_finitary)

    p = sub.add_parser("machine", help="evaluate the additive behavior of a machine file")
    p.add_argument("--machine", required=True, help="machine description file")
    p.add_argument("--truncate", type=int, default=None, help="sum words up to this length instead of the closed form")
    p.add_argument("--cover", choices=["state", "transition"], default="transition")
    p.set_defaults(func=_cmd_machine)

    p = sub.add_parser("compile-path", help="compile an 'x t' per line path file into a machine file")
    p.add_argument("--path", required=True)
    p.add_argument("--model", choices=[m.value for m in Model], default="bidirectional")
    p.add_argument("--rho", type=float, default=0.0)
    p.add_argument("--mass", type=float, default=1.0)
    p.add_argument("--hbar", type=float, default=1.0)
    p.add_argument("--omega", type=float, default=None, help="harmonic frequency (default: free)")
    p.add_argument("--out", default=None, help="output file (default stdout)")
    p.set_defaults(func=_cmd_compile_path)

    p = sub.add_parser("verify", help="run the verification suite")
    p.add_argument("--only", default=None, help=f"comma-separated subset of {', '.join(VERIFY_SECTIONS)}")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("report", help="run an experiment and write its report")
    _add_config_args(p)
    p.add_argument("--format", choices=["csv", "json"], required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=_sys.stderr)
        return 3
    except (ConfigError, OSError, ValueError) as exc:
        print(f"config error: {exc}", file=_sys.stderr)
        return 2
    except HoppathError as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
