"""Configuration-driven scenarios, result persistence and the reproduction run.

Configs are strict JSON documents::

    {
      "schema_version": 1,
      "name": "erasure",
      "atom": {"Z": 47, "A": 107},
      "grid": {"n_points": 8192, ...},
      "hamiltonian": {"field_gradient": 16.0,
                      "environment": {"mode": "linear_recorder"}},
      "packet": {"width": 1.0},
      "params": {},
      "outputs": {"json_path": "erasure.json"},
      "seed": 20081025
    }

Unknown keys anywhere are rejected.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import math
import os
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import atomic, dynamics, engine, potentials
from .errors import (ConfigParse, InvalidParameter, NoRelativeSystem, SGDLError,
                     UnknownScenario, provenance)
from .svg import write_series_charts

SCHEMA_VERSION = 1
DEFAULT_SEED = 20081025
SCENARIOS = ("adiabatic", "potential", "conformance", "scaling", "sg", "erasure", "sieve")
OUT_DIR_ENV = "SGDL_OUT_DIR"


# -- configuration ---------------------------------------------------------------

@dataclass
class Outputs:
    csv_path: str | None = None
    json_path: str | None = None
    svg_path: str | None = None


@dataclass
class ScenarioConfig:
    name: str
    atom: atomic.AtomSpec = field(default_factory=lambda: atomic.AtomSpec(47, 107))
    grid: dynamics.GridSpec = field(default_factory=dynamics.GridSpec)
    hamiltonian: dynamics.HamiltonianSpec = field(default_factory=dynamics.HamiltonianSpec)
    packet: dynamics.PacketSpec = field(default_factory=dynamics.PacketSpec)
    params: dict = field(default_factory=dict)
    outputs: Outputs = field(default_factory=Outputs)
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        if not self.name:
            raise ConfigParse("scenario name must be nonempty")
        if self.seed < 0:
            raise ConfigParse("seed must be an unsigned integer")


def _strict(cls, doc: Any, section: str, **overrides):
    if not isinstance(doc, dict):
        raise ConfigParse(f"section {section!r} must be an object")
    allowed = {f.name for f in dataclasses.fields(cls)}
    unknown = set(doc) - allowed
    if unknown:
        raise ConfigParse(f"unknown keys in {section!r}: {sorted(unknown)}")
    try:
        return cls(**{**doc, **overrides})
    except SGDLError as exc:
        raise ConfigParse(f"{section}: {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise ConfigParse(f"{section}: {exc}") from exc


PARAM_KEYS = {
    "adiabatic": set(),
    "potential": {"method", "omega_min", "omega_max", "points", "a_mu", "spin_factor"},
    "conformance": {"omega_min", "omega_max", "points", "a_mu", "spin_factor"},
    "scaling": {"Z_list", "omega", "a_mu"},
    "sg": {"record_every"},
    "erasure": set(),
    "sieve": {"time", "coupling"},
}


def parse_config(doc: dict) -> ScenarioConfig:
    """Validate a config document and build the typed config."""
    if not isinstance(doc, dict):
        raise ConfigParse("config must be a JSON object")
    top = {"schema_version", "name", "atom", "grid", "hamiltonian", "packet", "params",
           "outputs", "seed"}
    unknown = set(doc) - top
    if unknown:
        raise ConfigParse(f"unknown top-level keys: {sorted(unknown)}")
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise ConfigParse(f"schema_version must be {SCHEMA_VERSION}")
    name = doc.get("name")
    if name not in SCENARIOS:
        raise UnknownScenario(f"scenario {name!r} not in {SCENARIOS}")
    atom_doc = dict(doc.get("atom", {"Z": 47, "A": 107}))
    if not isinstance(atom_doc, dict) or set(atom_doc) - {"Z", "A", "mass_ratio"}:
        raise ConfigParse("atom accepts only Z, A, mass_ratio")
    ratio = atom_doc.pop("mass_ratio", None)
    constants = (atomic.PhysicalConstants.with_mass_ratio(ratio) if ratio is not None
                 else atomic.PhysicalConstants())
    atom = _strict(atomic.AtomSpec, atom_doc, "atom", constants=constants)
    grid = _strict(dynamics.GridSpec, doc.get("grid", {}), "grid")
    ham_doc = dict(doc.get("hamiltonian", {}))
    env = _strict(dynamics.EnvironmentSpec, ham_doc.pop("environment", {}), "hamiltonian.environment")
    ham = _strict(dynamics.HamiltonianSpec, ham_doc, "hamiltonian", environment=env)
    packet = _strict(dynamics.PacketSpec, doc.get("packet", {}), "packet")
    params = doc.get("params", {})
    if not isinstance(params, dict) or set(params) - PARAM_KEYS[name]:
        raise ConfigParse(f"params for {name!r} accept only {sorted(PARAM_KEYS[name])}")
    outputs = _strict(Outputs, doc.get("outputs", {}), "outputs")
    seed = doc.get("seed", DEFAULT_SEED)
    if not isinstance(seed, int) or seed < 0:
        raise ConfigParse("seed must be an unsigned integer")
    return ScenarioConfig(name, atom, grid, ham, packet, params, outputs, seed)


def load_config(path: str | Path) -> ScenarioConfig:
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigParse(f"cannot read config {path}: {exc}") from exc
    return parse_config(doc)


def out_dir() -> Path:
    return Path(os.environ.get(OUT_DIR_ENV, "."))


def resolve_output(path: str | None) -> Path | None:
    if path is None:
        return None
    p = Path(path)
    return p if p.is_absolute() else out_dir() / p


# -- persistence -------------------------------------------------------------------

CSV_COLUMNS = ("t", "norm", "spin_entropy", "packet_separation", "record_overlap", "cm_purity")


def write_run_csv(record: dynamics.RunRecord, path: Path | str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    series = record.series()
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_COLUMNS)
        for row in zip(*(series[c] for c in CSV_COLUMNS)):
            w.writerow([repr(v) for v in row])


def read_run_csv(path: Path | str) -> dict[str, list[float]]:
    with Path(path).open(newline="") as fh:
        rows = list(csv.DictReader(fh))
    return {c: [float(r[c]) for r in rows] for c in CSV_COLUMNS}


def write_json(doc: Any, path: Path | str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def potential_csv(pot: potentials.RadialPotential) -> str:
    lines = ["omega,value,method,Z"]
    for o, v in zip(pot.omega, pot.values):
        lines.append(f"{float(o)!r},{float(v)!r},{pot.method.value},{pot.Z}")
    return "\n".join(lines) + "\n"


def _emit_run(record: dynamics.RunRecord, outputs: Outputs, stem: str) -> None:
    if outputs.csv_path:
        write_run_csv(record, resolve_output(outputs.csv_path))
    if outputs.svg_path:
        target = resolve_output(outputs.svg_path)
        if target.suffix == ".svg":
            write_series_charts(record.series(), target.parent, target.stem)
        else:
            write_series_charts(record.series(), target, stem)


# -- scenario runners -----------------------------------------------------------------

def _require_relative_system(cfg: ScenarioConfig) -> None:
    if cfg.hamiltonian.environment.active and cfg.atom.A < 2:
        raise NoRelativeSystem(
            f"A={cfg.atom.A}: no relative system to act as environment", module="dynamics",
            operation="sg_scenario")


def _omega_grid(params: dict, default_min: float, default_max: float, default_points: int):
    lo = float(params.get("omega_min", default_min))
    hi = float(params.get("omega_max", default_max))
    n = int(params.get("points", default_points))
    if n < 1 or hi < lo or lo < 0:
        raise InvalidParameter("omega grid needs 0 <= omega_min <= omega_max and points >= 1")
    return np.linspace(lo, hi, n) if lo == 0 else np.geomspace(lo, hi, n)


def scenario_adiabatic(cfg: ScenarioConfig) -> dict:
    report = atomic.adiabatic_parameters(cfg.atom)
    return {"Z": cfg.atom.Z, "A": cfg.atom.A, **report.to_dict()}


def scenario_potential(cfg: ScenarioConfig) -> dict:
    p = cfg.params
    grid = _omega_grid(p, 0.01, 20.0, 64)
    pot = potentials.evaluate(cfg.atom.Z, grid, p.get("method", "quadrature"),
                              a_mu=float(p.get("a_mu", 1.0)),
                              spin_factor=p.get("spin_factor", "literal"))
    text = potential_csv(pot)
    if cfg.outputs.csv_path:
        path = resolve_output(cfg.outputs.csv_path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    return {"Z": pot.Z, "method": pot.method.value, "csv": text}


def scenario_conformance(cfg: ScenarioConfig) -> dict:
    p = cfg.params
    a_mu = float(p.get("a_mu", 1.0))
    grid = _omega_grid(p, 0.01 * a_mu, 20.0 * a_mu, 32)
    return potentials.conformance_27_vs_26(cfg.atom.Z, grid, a_mu,
                                           p.get("spin_factor", "literal")).to_dict()


def scenario_scaling(cfg: ScenarioConfig) -> dict:
    p = cfg.params
    return potentials.scaling_fit(p.get("Z_list", [2, 10, 28]), float(p.get("omega", 0.1)),
                                  float(p.get("a_mu", 1.0))).to_dict()


def scenario_sg(cfg: ScenarioConfig) -> dict:
    _require_relative_system(cfg)
    record = dynamics.sg_scenario(cfg.grid, cfg.hamiltonian, cfg.packet,
                                  int(cfg.params.get("record_every", 20)))
    _emit_run(record, cfg.outputs, "sg")
    return record.to_dict()


def scenario_erasure(cfg: ScenarioConfig) -> dict:
    _require_relative_system(cfg)
    run = dynamics.run_sg(cfg.grid, cfg.hamiltonian, cfg.packet)
    report = dynamics.erasure_scenario(cfg.grid, cfg.hamiltonian, cfg.packet, run=run)
    _emit_run(run.record, cfg.outputs, "erasure")
    return {**report.to_dict(), "run_summary": run.record.summary}


def scenario_sieve(cfg: ScenarioConfig) -> dict:
    env = cfg.hamiltonian.environment
    if not env.active:
        env = dataclasses.replace(env, mode=dynamics.EnvironmentMode.LINEAR_RECORDER)
    coupling = cfg.params.get("coupling", env.coupling)
    env = dataclasses.replace(env, coupling=dynamics.SIEVE_COUPLING if coupling is None else float(coupling))
    t = float(cfg.params.get("time", dynamics.SIEVE_TIME))
    entries = dynamics.pointer_sieve(dynamics.standard_candidates(dynamics.SIEVE_GRID, cfg.packet.width),
                                     env, t)
    return {"time": t, "coupling": env.coupling,
            "ranking": [{"candidate": e.label, "linear_entropy": e.production} for e in entries],
            "tied": dynamics.ranking_tied(entries)}


RUNNERS: dict[str, Callable[[ScenarioConfig], dict]] = {
    "adiabatic": scenario_adiabatic,
    "potential": scenario_potential,
    "conformance": scenario_conformance,
    "scaling": scenario_scaling,
    "sg": scenario_sg,
    "erasure": scenario_erasure,
    "sieve": scenario_sieve,
}


@provenance("harness-cli", "run")
def execute(cfg: ScenarioConfig) -> dict:
    """Run a parsed config and write its JSON output, if one is declared."""
    try:
        runner = RUNNERS[cfg.name]
    except KeyError:
        raise UnknownScenario(f"scenario {cfg.name!r} not in {SCENARIOS}") from None
    result = runner(cfg)
    if cfg.outputs.json_path:
        write_json(result, resolve_output(cfg.outputs.json_path))
    return result


@provenance("harness-cli", "run")
def run(config_path: str | Path) -> dict:
    return execute(load_config(config_path))


# -- reproduction --------------------------------------------------------------------

DEFAULT_TOLERANCES: dict[str, float] = {
    "kappa1_max": 1.1e-4,
    "kappa2_max": 1.1e-3,
    "kappa3_min": 0.9e-2,
    "jacobi_residual_max": 1e-10,
    "pairwise_residual_min": 0.1,
    "quadrature_rel_max": 1e-8,
    "conformance_rel_std_max": 1e-6,
    "exact_match_tol": 1e-6,
    "scaling_min": 1.5,
    "scaling_max": 2.5,
    "engine_oracle_max": 1e-12,
    "basis_identity_max": 1e-15,
    "invariance_max": 1e-9,
    "r_fidelity_min": 1 - 1e-8,
    "entropy_fraction_min": 0.99,
    "separation_widths_min": 4.0,
    "record_overlap_max": 0.05,
    "offdiag_max": 0.06,
    "purity_tol": 0.01,
    "p_plus_tol": 1e-6,
    "visibility_min": 0.99,
    "visibility_max": 0.06,
    "norm_drift_max": 1e-8,
    "convergence_min": 3.5,
    "convergence_max": 4.5,
}

STATIC_ITEMS = ("adiabatic_bounds", "hydrogen_exclusion", "reduced_mass", "kinetic_separation",
                "quadrature_correctness", "conformance", "scaling", "engine_invariants")
DYNAMIC_ITEMS = ("scenario_a", "scenario_b", "erasure", "pointer_sieve", "propagator")


def _item_adiabatic_bounds(tol, seed):
    rows, ok = [], True
    for Z, A in atomic.ISOTOPE_TABLE:
        r = atomic.adiabatic_parameters(atomic.AtomSpec(Z, A))
        passed = (r.kappa1 <= tol["kappa1_max"] and r.kappa2 <= tol["kappa2_max"]
                  and r.kappa3 >= tol["kappa3_min"])
        ok &= passed
        rows.append({"Z": Z, "A": A, "kappa1": r.kappa1, "kappa2": r.kappa2,
                     "kappa3": r.kappa3, "passed": passed})
    return ok, {"table": rows}


def _item_hydrogen_exclusion(tol, seed):
    try:
        atomic.adiabatic_parameters(atomic.AtomSpec(1, 1))
    except NoRelativeSystem as exc:
        return True, {"error": exc.kind}
    return False, {"error": None}


def _item_reduced_mass(tol, seed):
    unit = atomic.PhysicalConstants(nucleon_mass=1.0)
    values = {A: atomic.reduced_mass(atomic.AtomSpec(1, A, unit)) for A in (1, 2, 107)}
    ok = values[1] == 0.0 and values[2] == 0.5 and abs(values[107] - 106 / 107) < 1e-15
    return ok, {f"A={A}": v for A, v in values.items()}


def _item_kinetic_separation(tol, seed):
    jac = atomic.kinetic_separation_check([1.0] * 4, "jacobi")
    pair = atomic.kinetic_separation_check([1.0] * 3, "pairwise")
    ok = jac <= tol["jacobi_residual_max"] and pair > tol["pairwise_residual_min"]
    return ok, {"jacobi_4": jac, "pairwise_3": pair}


def _item_quadrature(tol, seed):
    Z = 2
    w = potentials.default_conformance_grid()
    analytic = 2 * Z * (1 / w - np.exp(-2 * Z * w) * (1 / w + Z))
    err = float(np.max(np.abs(potentials.effective_potential_quadrature(Z, w) / analytic - 1)))
    return err <= tol["quadrature_rel_max"], {"max_rel_error": err, "points": int(w.size)}


def _item_conformance(tol, seed):
    out, ok = {}, True
    for Z in (2, 10, 28):
        rep = potentials.conformance_27_vs_26(Z, tol=tol["conformance_rel_std_max"])
        exact_flag_consistent = rep.exact_match == (abs(rep.ratio_mean - 1) <= tol["exact_match_tol"])
        ok &= rep.structural_match and exact_flag_consistent
        out[str(Z)] = {"ratio_mean": rep.ratio_mean, "ratio_rel_std": rep.ratio_rel_std,
                       "structural_match": rep.structural_match, "exact_match": rep.exact_match}
    return ok, out


def _item_scaling(tol, seed):
    fit = potentials.scaling_fit([2, 10, 28], 0.1)
    return tol["scaling_min"] <= fit.exponent <= tol["scaling_max"], fit.to_dict()


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_density(dim: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    rank = rank or dim
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def _item_engine(tol, seed):
    from .oracles import naive_partial_trace

    rng = np.random.default_rng(seed)
    dims = (2, 3, 4)
    space = [engine.SpaceLabel(n, d) for n, d in zip("ABC", dims)]
    rho = engine.QState(space, "density", random_density(24, rng))
    oracle_err = 0.0
    for keep in (["A"], ["B"], ["C"], ["A", "C"], ["B", "C"]):
        fast = engine.partial_trace(rho, keep).data
        slow = naive_partial_trace(rho.data, dims, [rho.index(k) for k in keep])
        oracle_err = max(oracle_err, float(np.max(np.abs(fast - slow))))
    U = random_unitary(24, rng)
    rotated = engine.QState(space, "density", U @ rho.data @ U.conj().T)
    inv = max(abs(engine.purity(rotated) - engine.purity(rho)),
              abs(engine.vn_entropy(rotated) - engine.vn_entropy(rho)))
    # erasure identity in the Sz basis, with abstract orthonormal branches
    m, p = np.array([1, 0], complex), np.array([0, 1], complex)
    lhs = engine.SQRT_HALF * (np.kron(engine.UP, m) + np.kron(engine.DOWN, p))
    rhs = 0.5 * (np.kron(engine.RIGHT, m + p) + np.kron(engine.LEFT, m - p))
    ident = float(np.max(np.abs(lhs - rhs)))
    ok = (oracle_err <= tol["engine_oracle_max"] and inv <= tol["invariance_max"]
          and ident <= tol["basis_identity_max"])
    return ok, {"partial_trace_oracle_max_err": oracle_err, "unitary_invariance_err": inv,
                "erasure_identity_err": ident}


def _item_scenario_a(tol, seed):
    rec = dynamics.sg_scenario()
    s = rec.summary
    ok = (s["r_fidelity_initial"] >= tol["r_fidelity_min"]
          and s["final_separation_widths"] >= tol["separation_widths_min"]
          and s["final_spin_entropy"] >= tol["entropy_fraction_min"] * math.log(2))
    return ok, s


def _recorder_ham():
    return dynamics.HamiltonianSpec(
        environment=dynamics.EnvironmentSpec(mode=dynamics.EnvironmentMode.LINEAR_RECORDER))


def _item_scenario_b(tol, seed):
    s = dynamics.sg_scenario(ham=_recorder_ham()).summary
    ok = (s["record_overlap"] <= tol["record_overlap_max"] and s["offdiag_norm"] <= tol["offdiag_max"]
          and abs(s["cm_purity"] - 0.5) <= tol["purity_tol"])
    return ok, s


def _item_erasure(tol, seed):
    plain = dynamics.erasure_scenario()
    recorded = dynamics.erasure_scenario(ham=_recorder_ham())
    ok = (abs(plain.p_plus - 0.5) <= tol["p_plus_tol"] and abs(recorded.p_plus - 0.5) <= tol["p_plus_tol"]
          and plain.visibility_conditioned >= tol["visibility_min"]
          and recorded.visibility_conditioned <= tol["visibility_max"])
    return ok, {"without_records": plain.to_dict(), "with_records": recorded.to_dict()}


def _item_sieve(tol, seed):
    env = dynamics.EnvironmentSpec(mode="linear_recorder", coupling=dynamics.SIEVE_COUPLING)
    entries = dynamics.pointer_sieve(dynamics.standard_candidates(dynamics.SIEVE_GRID), env,
                                     dynamics.SIEVE_TIME)
    ok = entries[0].label == "minimal_uncertainty" and not dynamics.ranking_tied(entries)
    return ok, {"ranking": [[e.label, e.production] for e in entries]}


def convergence_factor(grid: dynamics.GridSpec, ham: dynamics.HamiltonianSpec,
                       packet: dynamics.PacketSpec = dynamics.PacketSpec()) -> float:
    """Error ratio e(dt)/e(dt/2) against a dt/8 reference at equal final time."""
    finals = {}
    for div in (1, 2, 8):
        g = dataclasses.replace(grid, dt=grid.dt / div, n_steps=grid.n_steps * div)
        prop = dynamics.build_hamiltonian(g, ham, packet_width=packet.width)
        _, final = dynamics.propagate(dynamics.initial_state(g, ham, packet), prop,
                                      record_every=g.n_steps or 1)
        finals[div] = final.data
    return float(np.linalg.norm(finals[1] - finals[8]) / np.linalg.norm(finals[2] - finals[8]))


CONVERGENCE_GRID = dynamics.GridSpec(n_points=512, z_min=-30.0, z_max=30.0, dt=0.02, n_steps=100)
CONVERGENCE_HAM = dynamics.HamiltonianSpec(
    field_gradient=2.0,
    environment=dynamics.EnvironmentSpec(mode="linear_recorder", dim=4, coupling=0.3,
                                         self_energy=(0.0, 0.7, 1.1, 2.3)))


def _item_propagator(tol, seed):
    grid = dynamics.GridSpec(n_steps=1000)
    rec = dynamics.sg_scenario(grid, _recorder_ham(), record_every=1000)
    drift = abs(rec.norm[-1] - 1.0)
    factor = convergence_factor(CONVERGENCE_GRID, CONVERGENCE_HAM)
    ok = drift <= tol["norm_drift_max"] and tol["convergence_min"] <= factor <= tol["convergence_max"]
    return ok, {"norm_drift_1000_steps": drift, "convergence_factor": factor}


ITEMS: dict[str, tuple[str, Callable]] = {
    "adiabatic_bounds": ("mass-ratio bounds over the isotope table", _item_adiabatic_bounds),
    "hydrogen_exclusion": ("A = 1 has no relative system", _item_hydrogen_exclusion),
    "reduced_mass": ("relative mass (1 - 1/A) m", _item_reduced_mass),
    "kinetic_separation": ("kinetic separation residuals", _item_kinetic_separation),
    "quadrature_correctness": ("quadrature vs analytic 1s potential", _item_quadrature),
    "conformance": ("closed form vs quadrature, Z = 2, 10, 28", _item_conformance),
    "scaling": ("Z scaling exponent at omega = 0.1", _item_scaling),
    "engine_invariants": ("partial trace oracle, invariance, erasure identity", _item_engine),
    "scenario_a": ("no environment: R factorises, spin fully entangled", _item_scenario_a),
    "scenario_b": ("recorder: branch records orthogonal, CM+S mixed", _item_scenario_b),
    "erasure": ("Sx erasure with and without records", _item_erasure),
    "pointer_sieve": ("minimal-uncertainty packet is the pointer state", _item_sieve),
    "propagator": ("unitarity and second-order convergence", _item_propagator),
}


def _clean(obj):
    """JSON-safe copy with numpy scalars converted."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


@provenance("harness-cli", "reproduce_paper")
def reproduce_paper(skip: tuple[str, ...] = (), tolerances: dict | None = None,
                    seed: int = DEFAULT_SEED, output_dir: Path | str | None = None) -> dict:
    """Run every check in order and write ``reproduce_summary.json``.

    ``skip`` may contain ``"static"``, ``"dynamics"`` or item names.
    Wall-clock timings go to a separate ``reproduce_timing.json`` so the
    summary itself is deterministic.
    """
    tol = dict(DEFAULT_TOLERANCES)
    if tolerances:
        unknown = set(tolerances) - set(tol)
        if unknown:
            raise ConfigParse(f"unknown tolerance keys: {sorted(unknown)}")
        tol.update({k: float(v) for k, v in tolerances.items()})
    items, timing = [], {}
    for name, (title, func) in ITEMS.items():
        group = "static" if name in STATIC_ITEMS else "dynamics"
        if group in skip or name in skip:
            continue
        start = time.perf_counter()
        try:
            passed, values = func(tol, seed)
            error = None
        except SGDLError as exc:
            passed, values, error = False, {}, exc.to_dict()
        timing[name] = time.perf_counter() - start
        items.append({"item": name, "title": title, "group": group,
                      "status": "PASS" if passed else "FAIL", "values": _clean(values),
                      "error": error})
    summary = {"seed": seed, "tolerances": tol, "items": items,
               "all_passed": all(i["status"] == "PASS" for i in items)}
    target = Path(output_dir) if output_dir is not None else out_dir()
    write_json(summary, target / "reproduce_summary.json")
    write_json({"seconds": timing, "finished_at": time.strftime("%Y-%m-%dT%H:%M:%S")},
               target / "reproduce_timing.json")
    return summary
