"""``sgdl`` command line.

Results go to stdout (JSON, or CSV for ``potential``); failures print a
JSON error document naming the module and operation to stderr and exit
nonzero.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import harness
from .errors import SGDLError


def _config(name: str, **sections) -> harness.ScenarioConfig:
    doc = {"schema_version": harness.SCHEMA_VERSION, "name": name}
    doc.update({k: v for k, v in sections.items() if v})
    return harness.parse_config(doc)


def _outputs(args) -> dict:
    return {k: v for k, v in (("csv_path", getattr(args, "csv", None)),
                              ("json_path", getattr(args, "json", None)),
                              ("svg_path", getattr(args, "svg", None))) if v}


def _environment(args) -> dict:
    env = {"mode": args.environment.replace("-", "_")}
    if args.coupling is not None:
        env["coupling"] = args.coupling
    if args.dim is not None:
        env["dim"] = args.dim
    if args.preparation is not None:
        env["preparation"] = args.preparation.replace("-", "_")
    return env


def _dynamics_sections(args) -> dict:
    grid = {k: v for k, v in (("n_points", args.points), ("n_steps", args.steps), ("dt", args.dt),
                              ("z_min", args.z_min), ("z_max", args.z_max)) if v is not None}
    ham = {"environment": _environment(args)}
    if args.gradient is not None:
        ham["field_gradient"] = args.gradient
    return {"grid": grid, "hamiltonian": ham, "atom": {"Z": args.Z, "A": args.A}}


def _add_dynamics_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--environment", default="none",
                   choices=["none", "linear-recorder", "potential-derived"])
    p.add_argument("--coupling", type=float)
    p.add_argument("--dim", type=int)
    p.add_argument("--preparation", choices=["ground", "shift-invariant"])
    p.add_argument("--gradient", type=float)
    p.add_argument("--points", type=int)
    p.add_argument("--steps", type=int)
    p.add_argument("--dt", type=float)
    p.add_argument("--z-min", type=float)
    p.add_argument("--z-max", type=float)
    p.add_argument("--Z", type=int, default=47)
    p.add_argument("--A", type=int, default=107)
    p.add_argument("--csv")
    p.add_argument("--json")
    p.add_argument("--svg")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sgdl", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("adiabatic", help="mass-ratio report for an atom")
    p.add_argument("--Z", type=int, required=True)
    p.add_argument("--A", type=int, required=True)
    p.add_argument("--mass-ratio", type=float)

    p = sub.add_parser("potential", help="tabulate the effective potential as CSV")
    p.add_argument("--Z", type=int, required=True)
    p.add_argument("--method", choices=["closed-form", "quadrature"], default="quadrature")
    p.add_argument("--omega-min", type=float, default=0.01)
    p.add_argument("--omega-max", type=float, default=20.0)
    p.add_argument("--points", type=int, default=64)
    p.add_argument("--a-mu", type=float, default=1.0)
    p.add_argument("--spin-factor", choices=["literal", "doubled"], default="literal")
    p.add_argument("--csv")

    p = sub.add_parser("conformance", help="closed form vs quadrature report")
    p.add_argument("--Z", type=int, required=True)
    p.add_argument("--points", type=int, default=32)
    p.add_argument("--spin-factor", choices=["literal", "doubled"], default="literal")
    p.add_argument("--json")

    p = sub.add_parser("scaling", help="fit the Z exponent of the potential")
    p.add_argument("--Z", default="2,10,28", help="comma-separated closed-shell Z values")
    p.add_argument("--omega", type=float, default=0.1)
    p.add_argument("--json")

    p = sub.add_parser("sg", help="Stern-Gerlach run")
    _add_dynamics_flags(p)
    p.add_argument("--record-every", type=int, default=20)

    p = sub.add_parser("erasure", help="Sx erasure after a Stern-Gerlach run")
    _add_dynamics_flags(p)

    p = sub.add_parser("sieve", help="pointer-state sieve over the standard candidates")
    p.add_argument("--coupling", type=float)
    p.add_argument("--time", type=float)
    p.add_argument("--json")

    p = sub.add_parser("reproduce", help="run every check and write a summary")
    p.add_argument("--skip", action="append", default=[],
                   help="'static', 'dynamics' or an item name; repeatable")
    p.add_argument("--tolerances", help="JSON file overriding default thresholds")
    p.add_argument("--seed", type=int, default=harness.DEFAULT_SEED)
    p.add_argument("--out-dir")

    p = sub.add_parser("run", help="run a JSON scenario config")
    p.add_argument("config")
    return parser


def dispatch(args) -> tuple[object, int]:
    cmd = args.command
    if cmd == "run":
        return harness.run(args.config), 0
    if cmd == "reproduce":
        tol = None
        if args.tolerances:
            try:
                tol = json.loads(Path(args.tolerances).read_text())
            except (OSError, json.JSONDecodeError) as exc:
                raise harness.ConfigParse(f"cannot read tolerances: {exc}") from exc
        summary = harness.reproduce_paper(tuple(args.skip), tol, args.seed, args.out_dir)
        return summary, 0 if summary["all_passed"] else 1
    if cmd == "adiabatic":
        atom = {"Z": args.Z, "A": args.A}
        if args.mass_ratio is not None:
            atom["mass_ratio"] = args.mass_ratio
        cfg = _config("adiabatic", atom=atom)
    elif cmd == "potential":
        cfg = _config("potential", atom={"Z": args.Z, "A": 2 * args.Z},
                      params={"method": args.method, "omega_min": args.omega_min,
                              "omega_max": args.omega_max, "points": args.points,
                              "a_mu": args.a_mu, "spin_factor": args.spin_factor},
                      outputs=_outputs(args))
        result = harness.execute(cfg)
        return result["csv"], 0
    elif cmd == "conformance":
        cfg = _config("conformance", atom={"Z": args.Z, "A": 2 * args.Z},
                      params={"points": args.points, "spin_factor": args.spin_factor},
                      outputs=_outputs(args))
    elif cmd == "scaling":
        try:
            zs = [int(z) for z in args.Z.split(",") if z]
        except ValueError as exc:
            raise harness.ConfigParse(f"--Z must be comma-separated integers: {exc}") from exc
        cfg = _config("scaling", params={"Z_list": zs, "omega": args.omega}, outputs=_outputs(args))
    elif cmd == "sg":
        cfg = _config("sg", **_dynamics_sections(args), params={"record_every": args.record_every},
                      outputs=_outputs(args))
    elif cmd == "erasure":
        cfg = _config("erasure", **_dynamics_sections(args), outputs=_outputs(args))
    elif cmd == "sieve":
        params = {k: v for k, v in (("coupling", args.coupling), ("time", args.time)) if v is not None}
        cfg = _config("sieve", params=params, outputs=_outputs(args))
    else:  # pragma: no cover - argparse restricts choices
        raise harness.UnknownScenario(cmd)
    return harness.execute(cfg), 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        result, status = dispatch(args)
    except SGDLError as exc:
        if exc.module is None:
            exc.module, exc.operation = "harness-cli", args.command
        print(json.dumps(exc.to_dict()), file=sys.stderr)
        return 2 if exc.kind in ("ConfigParse", "UnknownScenario") else 1
    if isinstance(result, str):
        sys.stdout.write(result)
    else:
        print(json.dumps(result, indent=2, sort_keys=True))
    return status


if __name__ == "__main__":
    sys.exit(main())
