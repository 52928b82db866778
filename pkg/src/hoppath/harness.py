"""Experiment configuration, reports, bundled experiments, verification.

An experiment fixes a system, a spacetime region, endpoints, a hop model,
the zero-point phase rho, and quadrature settings.  Running it produces a
per-n table of standard amplitudes, corrections, solved normalization
factors, and finitary amplitudes, plus telescoping residuals and tail
estimates.

Three experiments ship with the package: a wide-region free particle (the
region spans +-8 position spreads, wide enough that whole-line propagator
checks make sense), a narrow-region free particle (+-1 spread, so boundary
truncation makes the corrections visibly non-zero, which is what the B_n
solver needs), and a harmonic oscillator run away from focal times.  The
machine-sum lattice fixture for the cross checks lives here too.
"""

from __future__ import annotations

import itertools
import json
import math
import time
from dataclasses import dataclass, replace

import numpy as np

from .action import (
    Conjugate,
    Free,
    Harmonic,
    Kind,
    PhysicalSystem,
    Region,
    SelfConjugate,
    SpacetimePoint,
    anti_action,
    classical_action,
    classical_amplitude,
    segment_amplitude,
)
from .errors import ConfigError, HoppathError
from .finitary import (
    HopPath,
    Model,
    PhaseParam,
    hop_amplitude,
    path_amplitude,
    psi_n,
    psi_total,
    solve_B_bidirectional,
    solve_B_unidirectional,
)
from .quadrature import QuadratureSpec, integrate_1d, integrate_2d
from .standard import (
    free_propagator,
    free_propagator_self_composition,
    normalization_A,
    phi_n,
    phi_n_whole_line,
)
from .xmachine import (
    AdditiveXMachine,
    CoverSemantics,
    FiniteStateMachine,
    MultiplierLabeling,
    accepted_words,
    additive_behavior_closed,
    additive_behavior_truncated,
    compile_path_to_machine,
    loop_resummation,
    machine_behavior,
    sum_over_machines,
    universal_relation_machine,
    _magnitude_matrix,
    _walk_sum,
    _weight_matrix,
)

__all__ = [
    "ExperimentConfig",
    "ReportRow",
    "Report",
    "run_experiment",
    "emit_report",
    "report_to_json",
    "report_from_json",
    "config_to_dict",
    "config_from_dict",
    "load_config",
    "bundled_experiments",
    "wide_x_free_config",
    "narrow_x_free_config",
    "harmonic_config",
    "CheckResult",
    "verify_suite",
    "VERIFY_SECTIONS",
]

DEFAULT_SEED = 20260810


@dataclass(frozen=True)
class ExperimentConfig:
    system: PhysicalSystem
    region: Region
    q_i: SpacetimePoint
    q_f: SpacetimePoint
    model: Model = Model.UNIDIRECTIONAL
    rho: float = 0.0
    n_max: int = 2
    quadrature: QuadratureSpec = QuadratureSpec()
    cover_semantics: CoverSemantics = CoverSemantics.TRANSITION
    seed: int = DEFAULT_SEED

    @property
    def phase(self) -> PhaseParam:
        return PhaseParam(rho=self.rho)


def validate_config(config: ExperimentConfig):
    """Reject invalid configs before any computation."""
    if config.n_max < 1:
        raise ConfigError("n_max must be >= 1")
    if not config.q_i.t < config.q_f.t:
        raise ConfigError("q_i must precede q_f in time")
    for name, q in (("q_i", config.q_i), ("q_f", config.q_f)):
        if not config.region.t_lo <= q.t <= config.region.t_hi:
            raise ConfigError(f"{name}.t outside [t_lo, t_hi]")
        if not config.region.x_lo <= q.x <= config.region.x_hi:
            raise ConfigError(f"{name}.x outside the closure of X")
    pot = config.system.potential
    if isinstance(pot, Harmonic):
        duration = config.q_f.t - config.q_i.t
        for df in range(0, max(config.n_max, 6) + 1):
            phase_angle = pot.omega * duration / (df + 1)
            if abs(phase_angle - round(phase_angle / math.pi) * math.pi) < 1e-6:
                raise ConfigError(
                    f"slice spacing for df={df} is within 1e-6 of a harmonic focal time"
                )


# ---------------------------------------------------------------------------
# config (de)serialization


def _potential_to_json(p):
    if isinstance(p, Free):
        return "free"
    return {"harmonic": {"omega": p.omega}}


def _potential_from_json(v):
    if v == "free":
        return Free()
    if isinstance(v, dict) and "harmonic" in v:
        return Harmonic(omega=float(v["harmonic"]["omega"]))
    raise ConfigError(f"unrecognized potential: {v!r}")


def _conjugation_to_json(c):
    if isinstance(c, SelfConjugate):
        return "self"
    return {"conjugate": {"potential_scale": c.potential_scale}}


def _conjugation_from_json(v):
    if v == "self":
        return SelfConjugate()
    if isinstance(v, dict) and "conjugate" in v:
        return Conjugate(potential_scale=float(v["conjugate"].get("potential_scale", -1.0)))
    raise ConfigError(f"unrecognized conjugation: {v!r}")


def config_to_dict(config: ExperimentConfig) -> dict:
    return {
        "system": {
            "mass": config.system.mass,
            "hbar": config.system.hbar,
            "potential": _potential_to_json(config.system.potential),
            "conjugation": _conjugation_to_json(config.system.charge_conjugation),
        },
        "region": {
            "x_lo": config.region.x_lo,
            "x_hi": config.region.x_hi,
            "t_lo": config.region.t_lo,
            "t_hi": config.region.t_hi,
        },
        "q_i": {"x": config.q_i.x, "t": config.q_i.t},
        "q_f": {"x": config.q_f.x, "t": config.q_f.t},
        "model": config.model.value,
        "rho": config.rho,
        "n_max": config.n_max,
        "quadrature": {
            "rule_order": config.quadrature.rule_order,
            "panels_x": config.quadrature.panels_x,
            "panels_t": config.quadrature.panels_t,
        },
        "cover_semantics": config.cover_semantics.value,
        "seed": config.seed,
    }


def config_from_dict(data: dict) -> ExperimentConfig:
    try:
        system = PhysicalSystem(
            mass=float(data["system"]["mass"]),
            hbar=float(data["system"]["hbar"]),
            potential=_potential_from_json(data["system"]["potential"]),
            charge_conjugation=_conjugation_from_json(data["system"].get("conjugation", "self")),
        )
        region = Region(
            x_lo=float(data["region"]["x_lo"]),
            x_hi=float(data["region"]["x_hi"]),
            t_lo=float(data["region"]["t_lo"]),
            t_hi=float(data["region"]["t_hi"]),
        )
        config = ExperimentConfig(
            system=system,
            region=region,
            q_i=SpacetimePoint(float(data["q_i"]["x"]), float(data["q_i"]["t"])),
            q_f=SpacetimePoint(float(data["q_f"]["x"]), float(data["q_f"]["t"])),
            model=Model(data.get("model", "unidirectional")),
            rho=float(data.get("rho", 0.0)),
            n_max=int(data.get("n_max", 2)),
            quadrature=QuadratureSpec(
                rule_order=int(data["quadrature"]["rule_order"]),
                panels_x=int(data["quadrature"]["panels_x"]),
                panels_t=int(data["quadrature"]["panels_t"]),
            ),
            cover_semantics=CoverSemantics(data.get("cover_semantics", "transition")),
            seed=int(data.get("seed", DEFAULT_SEED)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad config: {exc}") from exc
    validate_config(config)
    return config


# ---------------------------------------------------------------------------
# bundled experiments


def wide_x_free_config() -> ExperimentConfig:
    """Free particle, region +-8 sqrt(hbar T / m) around the midpoint."""
    q_i = SpacetimePoint(0.0, 0.0)
    q_f = SpacetimePoint(0.25, 1.0)
    spread = 1.0  # sqrt(hbar * T / m) with m = hbar = T = 1
    x_mid = 0.5 * (q_i.x + q_f.x)
    return ExperimentConfig(
        system=PhysicalSystem(),
        region=Region(x_mid - 8 * spread, x_mid + 8 * spread, 0.0, 1.0),
        q_i=q_i,
        q_f=q_f,
        model=Model.UNIDIRECTIONAL,
        rho=0.0,
        n_max=2,
        quadrature=QuadratureSpec(rule_order=12, panels_x=16, panels_t=6),
    )


def narrow_x_free_config() -> ExperimentConfig:
    """Free particle, region +-1 spread, with time margins on both sides."""
    q_i = SpacetimePoint(0.0, 0.0)
    q_f = SpacetimePoint(0.25, 1.0)
    x_mid = 0.5 * (q_i.x + q_f.x)
    return ExperimentConfig(
        system=PhysicalSystem(),
        region=Region(x_mid - 1.0, x_mid + 1.0, -0.25, 1.25),
        q_i=q_i,
        q_f=q_f,
        model=Model.UNIDIRECTIONAL,
        rho=0.0,
        n_max=2,
        quadrature=QuadratureSpec(rule_order=12, panels_x=6, panels_t=6),
    )


def harmonic_config() -> ExperimentConfig:
    """Harmonic oscillator with omega T = 1, clear of focal times."""
    q_i = SpacetimePoint(0.0, 0.0)
    q_f = SpacetimePoint(0.4, 1.0)
    return ExperimentConfig(
        system=PhysicalSystem(potential=Harmonic(omega=1.0)),
        region=Region(-1.3, 1.7, -0.2, 1.2),
        q_i=q_i,
        q_f=q_f,
        model=Model.UNIDIRECTIONAL,
        rho=0.2,
        n_max=2,
        quadrature=QuadratureSpec(rule_order=12, panels_x=6, panels_t=6),
    )


def bundled_experiments() -> dict[str, ExperimentConfig]:
    return {
        "wide-x": wide_x_free_config(),
        "narrow-x": narrow_x_free_config(),
        "harmonic": harmonic_config(),
    }


def load_config(path_or_name: str) -> ExperimentConfig:
    """Load a config from a JSON file path or a bundled experiment name."""
    bundled = bundled_experiments()
    if path_or_name in bundled:
        return bundled[path_or_name]
    try:
        with open(path_or_name, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path_or_name!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path_or_name!r} is not valid JSON: {exc}") from exc
    return config_from_dict(data)


# ---------------------------------------------------------------------------
# reports


@dataclass(frozen=True)
class ReportRow:
    n: int
    phi: complex
    delta_phi: complex  # phi_0 itself at n = 0
    b: complex
    psi: complex
    abs_err: float  # |psi_n - delta_phi_n|  (|psi_0 - phi_0| at n = 0)


@dataclass(frozen=True)
class Report:
    config: ExperimentConfig
    rows: tuple[ReportRow, ...]
    telescoping_residuals: tuple[float, ...]
    tail_terms: tuple[float, ...]
    tail_estimate: float
    flags: dict[str, bool]
    timings: dict[str, float]


def run_experiment(config: ExperimentConfig) -> Report:
    """Run the full standard + finitary pipeline for one experiment."""
    validate_config(config)
    sys_, region = config.system, config.region
    q_i, q_f, spec = config.q_i, config.q_f, config.quadrature
    phase = config.phase
    timings: dict[str, float] = {}

    t0 = time.perf_counter()
    phis = [phi_n(sys_, region, q_i, q_f, n, spec) for n in range(config.n_max + 1)]
    deltas = [phis[0]] + [phis[n] - phis[n - 1] for n in range(1, config.n_max + 1)]
    timings["phi"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    solver = solve_B_unidirectional if config.model is Model.UNIDIRECTIONAL else solve_B_bidirectional
    table = solver(sys_, region, q_i, q_f, config.n_max, phase, spec)
    timings["solve_b"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    psis = [
        psi_n(sys_, region, q_i, q_f, n, table, phase, spec, config.model)
        for n in range(config.n_max + 1)
    ]
    total, tail = psi_total(sys_, region, q_i, q_f, config.n_max, table, phase, spec, config.model)
    timings["psi"] = time.perf_counter() - t0

    rows = tuple(
        ReportRow(
            n=n,
            phi=phis[n],
            delta_phi=deltas[n],
            b=table.values[n],
            psi=psis[n],
            abs_err=abs(psis[n] - deltas[n]),
        )
        for n in range(config.n_max + 1)
    )
    residuals = tuple(
        abs(phis[0] + sum(deltas[1 : n + 1]) - phis[n]) / abs(phis[n])
        for n in range(1, config.n_max + 1)
    )
    sigma_a0 = phase.sigma * normalization_A(sys_, 0, q_f.t - q_i.t)
    flags = {
        "telescoping_1e-12": all(r <= 1e-12 for r in residuals),
        "psi_matches_corrections_1e-8": all(
            row.abs_err <= 1e-8 * abs(row.delta_phi) for row in rows
        ),
        "b0_equals_sigma_a0": table.values[0] == sigma_a0,
        "partial_sum_matches_phi_1e-8": abs(total - phis[-1]) <= 1e-8 * abs(phis[-1]),
    }
    timings["total"] = sum(timings.values())
    return Report(
        config=config,
        rows=rows,
        telescoping_residuals=residuals,
        tail_terms=tail.term_magnitudes,
        tail_estimate=tail.tail_estimate,
        flags=flags,
        timings=timings,
    )


def _c(z: complex) -> list[float]:
    return [z.real, z.imag]


def report_to_json(report: Report) -> str:
    data = {
        "config": config_to_dict(report.config),
        "rows": [
            {
                "n": row.n,
                "phi": _c(row.phi),
                "delta_phi": _c(row.delta_phi),
                "b": _c(row.b),
                "psi": _c(row.psi),
                "abs_err": row.abs_err,
            }
            for row in report.rows
        ],
        "telescoping_residuals": list(report.telescoping_residuals),
        "tail_terms": list(report.tail_terms),
        "tail_estimate": report.tail_estimate,
        "flags": report.flags,
        "timings": report.timings,
    }
    return json.dumps(data, indent=2) + "\n"


def report_from_json(text: str) -> Report:
    data = json.loads(text)
    rows = tuple(
        ReportRow(
            n=int(r["n"]),
            phi=complex(*r["phi"]),
            delta_phi=complex(*r["delta_phi"]),
            b=complex(*r["b"]),
            psi=complex(*r["psi"]),
            abs_err=float(r["abs_err"]),
        )
        for r in data["rows"]
    )
    return Report(
        config=config_from_dict(data["config"]),
        rows=rows,
        telescoping_residuals=tuple(data["telescoping_residuals"]),
        tail_terms=tuple(data["tail_terms"]),
        tail_estimate=data["tail_estimate"],
        flags=dict(data["flags"]),
        timings=dict(data["timings"]),
    )


def report_to_csv(report: Report) -> str:
    lines = ["n,phi_re,phi_im,dphi_re,dphi_im,B_re,B_im,psi_re,psi_im,abs_err"]
    for row in report.rows:
        fields = [str(row.n)] + [
            f"{v:.17g}"
            for v in (
                row.phi.real,
                row.phi.imag,
                row.delta_phi.real,
                row.delta_phi.imag,
                row.b.real,
                row.b.imag,
                row.psi.real,
                row.psi.imag,
                row.abs_err,
            )
        ]
        lines.append(",".join(fields))
    return "\n".join(lines) + "\n"


def emit_report(report: Report, format: str, path: str):
    """Write the report as CSV (per-n table) or JSON (full structure)."""
    if format == "csv":
        payload = report_to_csv(report)
    elif format == "json":
        payload = report_to_json(report)
    else:
        raise ConfigError(f"unknown report format {format!r}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(payload)


# ---------------------------------------------------------------------------
# verification suite

VERIFY_SECTIONS = ("standard", "finitary", "xmachine", "cross")


@dataclass(frozen=True)
class CheckResult:
    section: str
    name: str
    passed: bool
    detail: str
    seconds: float


def _rel(a: complex, b: complex) -> float:
    return abs(a - b) / abs(b)


def _pl_min_action(system: PhysicalSystem, x0, x1, duration, segments, potential_scale=1.0):
    """Independent action oracle: exact action of piecewise-linear paths,
    minimized (stationarized) over the interior nodes by a linear solve.

    The potential integral of a linear segment is exact, so the only error
    is the restriction to piecewise-linear paths, O(segments^-2) in value.
    """
    dt = duration / segments
    size = segments + 1
    m = system.mass
    if isinstance(system.potential, Harmonic):
        w2 = potential_scale * system.potential.omega**2
    else:
        w2 = 0.0
    quad = np.zeros((size, size))
    kin = m / (2 * dt)
    pot = m * w2 / 2 * dt / 3
    for k in range(segments):
        quad[k, k] += kin - pot
        quad[k + 1, k + 1] += kin - pot
        quad[k, k + 1] += -kin - pot / 2
        quad[k + 1, k] += -kin - pot / 2
    sym = quad + quad.T
    interior = np.arange(1, segments)
    boundary = np.array([0, segments])
    xb = np.array([x0, x1])
    xi = np.linalg.solve(sym[np.ix_(interior, interior)], -sym[np.ix_(interior, boundary)] @ xb)
    x = np.concatenate([[x0], xi, [x1]])
    return float(x @ quad @ x)


def _random_unidirectional_path(rng, max_hops=8) -> HopPath:
    hops = int(rng.integers(1, max_hops + 1))
    t = 0.0
    points = [SpacetimePoint(float(rng.uniform(-1, 1)), t)]
    for _ in range(hops):
        t += float(rng.uniform(0.1, 0.5))
        points.append(SpacetimePoint(float(rng.uniform(-1, 1)), t))
    return HopPath(points=tuple(points), model=Model.UNIDIRECTIONAL)


def _random_additive_machine(
    rng, max_states=5, max_transitions=8, radius_cap=0.75, tail_len=80
) -> AdditiveXMachine:
    """Random machine with spectral radius below radius_cap and a walk-sum
    tail beyond tail_len provably under 1e-9 (so length-tail_len enumeration
    matches the closed form at 1e-8); heavy-transient draws are rejected."""
    while True:
        nstates = int(rng.integers(2, max_states + 1))
        names = [f"s{i}" for i in range(nstates)]
        transitions = [(names[i], f"t{i}", names[i + 1]) for i in range(nstates - 1)]
        extra = int(rng.integers(0, max_transitions - len(transitions) + 1))
        for j in range(extra):
            src = names[int(rng.integers(0, nstates))]
            dst = names[int(rng.integers(0, nstates))]
            transitions.append((src, f"t{nstates - 1 + j}", dst))
        labels = {
            sym: float(rng.uniform(0.5, 1.5)) * complex(np.exp(1j * rng.uniform(0, 2 * np.pi)))
            for (_, sym, _) in transitions
        }
        fsm = FiniteStateMachine(
            states=frozenset(names),
            alphabet=frozenset(labels),
            transitions=tuple(transitions),
            initial=names[0],
            finals=frozenset({names[-1]}),
        )
        machine = AdditiveXMachine(fsm, MultiplierLabeling(labels))
        magnitude = _magnitude_matrix(machine)
        radius = float(np.max(np.abs(np.linalg.eigvals(magnitude))))
        if radius > 0:
            target = float(rng.uniform(0.3, radius_cap))
            scale = target / radius
            labels = {sym: c * scale for sym, c in labels.items()}
            machine = AdditiveXMachine(fsm, MultiplierLabeling(labels))
            magnitude = magnitude * scale
        # exact truncation tail: sum over walks longer than tail_len
        resolvent = np.linalg.solve(np.eye(nstates) - magnitude, np.ones(nstates))
        tail = (np.linalg.matrix_power(magnitude, tail_len + 1) @ resolvent)[0]
        if tail <= 1e-9:
            return machine


def lattice_fixture():
    """Three spacetime points, all 9 hops (nulls included), damped labels.

    Physical hop amplitudes are unit modulus, so the walk sums over the
    lattice would diverge; every label (and every hop of the direct sum)
    carries the damping factor, under which the machine-sum decomposition
    identity is unchanged.
    """
    system = PhysicalSystem()
    phase = PhaseParam(rho=0.35)
    points = (
        SpacetimePoint(0.0, 0.0),
        SpacetimePoint(0.7, 0.4),
        SpacetimePoint(0.3, 1.0),
    )
    hop_scale = 0.15
    return system, phase, points, hop_scale


def _lattice_paths(points, max_hops):
    """Every hop sequence from points[0] to points[-1] with <= max_hops hops."""
    start, end = points[0], points[-1]
    paths = []
    for hops in range(1, max_hops + 1):
        for interior in itertools.product(points, repeat=hops - 1):
            paths.append(HopPath(points=(start, *interior, end), model=Model.BIDIRECTIONAL))
    return paths


def _lattice_saturation_hops(system, phase, points, hop_scale):
    """Smallest bound L such that paths of <= L hops realize every machine.

    A machine here is a walk support: a set of hops usable by some start
    to end walk covering all of them.  BFS over (point, covered-set) pairs
    gives each support's minimal covering walk length.
    """
    del system, phase, hop_scale
    index = {p: i for i, p in enumerate(points)}
    hops = [(a, b) for a in points for b in points]
    hop_bit = {(index[a], index[b]): 1 << k for k, (a, b) in enumerate(hops)}
    start, end = index[points[0]], index[points[-1]]
    # BFS over (node, mask): minimal number of hops to stand at node with mask covered
    dist = {(start, 0): 0}
    frontier = [(start, 0)]
    while frontier:
        nxt = []
        for node, mask in frontier:
            d = dist[(node, mask)]
            for other in range(len(points)):
                bit = hop_bit[(node, other)]
                key = (other, mask | bit)
                if key not in dist:
                    dist[key] = d + 1
                    nxt.append(key)
        frontier = nxt
    lengths = {}
    for (node, mask), d in dist.items():
        if node == end and mask:
            lengths[mask] = min(lengths.get(mask, d), d)
    return max(lengths.values()), len(lengths)


def _check(section, name, fn, results):
    start = time.perf_counter()
    try:
        passed, detail = fn()
    except HoppathError as exc:
        passed, detail = False, f"{type(exc).__name__}: {exc}"
    results.append(
        CheckResult(section=section, name=name, passed=passed, detail=detail, seconds=time.perf_counter() - start)
    )


# --- standard section checks


def _check_quadrature_exactness():
    spec = QuadratureSpec(rule_order=8, panels_x=1, panels_t=1)
    value = integrate_1d(lambda x: x**15 + 0j, 0.0, 1.0, spec)
    err = abs(value - 1 / 16) / (1 / 16)
    sep = integrate_2d(lambda x, t: x * t + 0j, Region(0, 1, 0, 1), spec)
    err2 = abs(sep - 0.25) / 0.25
    ok = err <= 1e-12 and err2 <= 1e-12
    return ok, f"poly rel err {err:.2e}, xt rel err {err2:.2e}"


def _check_quadrature_refinement():
    omega = 20.0
    exact = (np.exp(1j * omega) - 1) / (1j * omega)
    errs = []
    for panels in (2, 4, 8, 16, 32):
        spec = QuadratureSpec(rule_order=3, panels_x=panels)
        errs.append(abs(integrate_1d(lambda x: np.exp(1j * omega * x), 0.0, 1.0, spec) - exact))
    ok = all(b < a for a, b in zip(errs, errs[1:]))
    return ok, "errors " + ", ".join(f"{e:.1e}" for e in errs)


def _check_quadrature_determinism():
    spec = QuadratureSpec(rule_order=16, panels_x=32)
    f = lambda x: np.exp(1j * 7.3 * x * x)
    a = integrate_1d(f, -2.0, 3.0, spec)
    b = integrate_1d(f, -2.0, 3.0, spec)
    return a == b, f"bitwise repeat {'ok' if a == b else 'FAILED'}"


def _check_action_invariants():
    system = PhysicalSystem()
    rng = np.random.default_rng(DEFAULT_SEED)
    worst_mod = 0.0
    worst_shift = 0.0
    for _ in range(50):
        x0, x1 = rng.uniform(-3, 3, size=2)
        t0 = rng.uniform(-1, 1)
        t1 = t0 + rng.uniform(0.1, 2.0)
        amp = classical_amplitude(system, SpacetimePoint(x0, t0), SpacetimePoint(x1, t1))
        worst_mod = max(worst_mod, abs(abs(amp) - 1.0))
        a, b = rng.uniform(-5, 5, size=2)
        s0 = classical_action(system, SpacetimePoint(x0, t0), SpacetimePoint(x1, t1))
        s1 = classical_action(system, SpacetimePoint(x0 + a, t0 + b), SpacetimePoint(x1 + a, t1 + b))
        worst_shift = max(worst_shift, abs(s0 - s1) / max(1.0, abs(s0)))
    anti_ok = all(
        anti_action(system, SpacetimePoint(0, 0), SpacetimePoint(x, 1.0))
        == classical_action(system, SpacetimePoint(0, 0), SpacetimePoint(x, 1.0))
        for x in (0.0, 0.5, -1.2)
    )
    ok = worst_mod <= 1e-12 and worst_shift <= 1e-12 and anti_ok
    return ok, f"|amp|-1 max {worst_mod:.1e}, shift {worst_shift:.1e}, anti==classical {anti_ok}"


def _check_action_oracle():
    free = PhysicalSystem()
    harm = PhysicalSystem(potential=Harmonic(omega=1.0))
    s_free = _pl_min_action(free, 0.0, 1.0, 1.0, 256)
    err_free = abs(s_free - 0.5) / 0.5
    closed = classical_action(harm, SpacetimePoint(0, 0), SpacetimePoint(1, 1))
    s_harm = _pl_min_action(harm, 0.0, 1.0, 1.0, 256)
    err_harm = abs(s_harm - closed) / abs(closed)
    ok = err_free <= 1e-6 and err_harm <= 1e-6
    return ok, f"free rel err {err_free:.1e}, harmonic rel err {err_harm:.1e}"


def _telescoping_residual(config: ExperimentConfig, df_max=6):
    phis = [
        phi_n(config.system, config.region, config.q_i, config.q_f, n, config.quadrature)
        for n in range(df_max + 1)
    ]
    worst = 0.0
    for n in range(1, df_max + 1):
        acc = phis[0]
        for k in range(1, n + 1):
            acc += phis[k] - phis[k - 1]
        worst = max(worst, abs(acc - phis[n]) / abs(phis[n]))
    return worst


def _check_telescoping(config):
    def inner():
        worst = _telescoping_residual(config)
        return worst <= 1e-12, f"max rel residual {worst:.2e} over N <= 6"

    return inner


def _check_dp_vs_direct():
    config = narrow_x_free_config()
    sys_, region, q_i, q_f, spec = (
        config.system,
        config.region,
        config.q_i,
        config.q_f,
        config.quadrature,
    )
    duration = q_f.t - q_i.t
    worst = 0.0
    # df = 1: single spatial integral
    eps = duration / 2
    t1 = q_i.t + eps
    direct1 = integrate_1d(
        lambda x: segment_amplitude(sys_, q_i.x, q_i.t, x, t1)
        * segment_amplitude(sys_, x, t1, q_f.x, q_f.t),
        region.x_lo,
        region.x_hi,
        spec,
    ) / normalization_A(sys_, 1, eps)
    worst = max(worst, _rel(direct1, phi_n(sys_, region, q_i, q_f, 1, spec)))
    # df = 2: double spatial integral
    eps = duration / 3
    ta, tb = q_i.t + eps, q_i.t + 2 * eps
    direct2 = integrate_2d(
        lambda xa, xb: segment_amplitude(sys_, q_i.x, q_i.t, xa, ta)
        * segment_amplitude(sys_, xa, ta, xb, tb)
        * segment_amplitude(sys_, xb, tb, q_f.x, q_f.t),
        Region(region.x_lo, region.x_hi, region.x_lo, region.x_hi),
        replace(spec, panels_t=spec.panels_x),
    ) / normalization_A(sys_, 2, eps)
    worst = max(worst, _rel(direct2, phi_n(sys_, region, q_i, q_f, 2, spec)))
    return worst <= 1e-10, f"max rel deviation {worst:.2e} for df <= 2"


def _check_wide_x_propagator():
    config = wide_x_free_config()
    spec = QuadratureSpec(rule_order=16, panels_x=64, panels_t=4)
    exact = free_propagator(config.system, config.q_i, config.q_f)
    worst = 0.0
    for df in range(5):
        value = phi_n_whole_line(config.system, config.q_i, config.q_f, df, spec)
        worst = max(worst, _rel(value, exact))
    return worst <= 1e-4, f"max rel deviation {worst:.2e} for df <= 4"


def _check_chapman_kolmogorov():
    config = wide_x_free_config()
    spec = QuadratureSpec(rule_order=16, panels_x=128, panels_t=4)
    composed = free_propagator_self_composition(config.system, config.q_i, config.q_f, spec)
    exact = free_propagator(config.system, config.q_i, config.q_f)
    err = _rel(composed, exact)
    return err <= 1e-5, f"rel deviation {err:.2e}"


def _check_anti_symmetry():
    config = narrow_x_free_config()
    ok = True
    for df in range(3):
        particle = phi_n(config.system, config.region, config.q_i, config.q_f, df, config.quadrature, Kind.PARTICLE)
        anti = phi_n(config.system, config.region, config.q_i, config.q_f, df, config.quadrature, Kind.ANTIPARTICLE)
        ok = ok and particle == anti
    return ok, "phi-bar == phi for the self-conjugate system"


# --- finitary section checks


def _psi_identity_errors(config: ExperimentConfig):
    report = run_experiment(config)
    rels = [row.abs_err / abs(row.delta_phi) for row in report.rows]
    return rels


def _check_psi_identity(config, label):
    def inner():
        rels = _psi_identity_errors(config)
        worst = max(rels)
        return worst <= 1e-8, f"{label}: max rel |psi_n - dphi_n| = {worst:.2e}"

    return inner


def _check_sigma_independence():
    base = narrow_x_free_config()
    reference = None
    worst = 0.0
    for rho in (0.0, 0.7, math.pi / 2):
        config = replace(base, rho=rho)
        report = run_experiment(config)
        if not report.flags["b0_equals_sigma_a0"]:
            return False, f"B_0 != sigma * A_0 at rho={rho}"
        psis = [row.psi for row in report.rows]
        if reference is None:
            reference = psis
        else:
            worst = max(
                worst, max(abs(a - b) / abs(b) for a, b in zip(psis, reference))
            )
    return worst <= 1e-8, f"max rel psi drift over rho values {worst:.2e}"


def _check_probability_equivalence():
    system = PhysicalSystem()
    phase = PhaseParam(rho=0.7)
    rng = np.random.default_rng(DEFAULT_SEED + 1)
    worst = 0.0
    for _ in range(50):
        x0, x1 = rng.uniform(-2, 2, size=2)
        t0 = rng.uniform(0, 1)
        t1 = t0 + rng.uniform(0.05, 1.0)
        q, qn = SpacetimePoint(x0, t0), SpacetimePoint(x1, t1)
        hop = abs(hop_amplitude(system, phase, q, qn, Model.BIDIRECTIONAL)) ** 2
        std = abs(classical_amplitude(system, q, qn)) ** 2
        worst = max(worst, abs(hop - std))
    return worst <= 1e-12, f"max | |hop|^2 - |classical|^2 | = {worst:.1e}"


def _check_unidirectional_bans():
    system = PhysicalSystem()
    phase = PhaseParam()
    bad_paths = [
        HopPath((SpacetimePoint(0, 0), SpacetimePoint(1, 1), SpacetimePoint(0, 0.5)), Model.UNIDIRECTIONAL),
        HopPath((SpacetimePoint(0, 0), SpacetimePoint(0, 0), SpacetimePoint(1, 1)), Model.UNIDIRECTIONAL),
        HopPath((SpacetimePoint(0, 0), SpacetimePoint(1, 0), SpacetimePoint(1, 1)), Model.UNIDIRECTIONAL),
    ]
    ok = all(path_amplitude(system, phase, p) == 0 for p in bad_paths)
    return ok, "non-increasing time steps give amplitude 0"


# --- xmachine section checks


def _check_path_computes_amplitude():
    system = PhysicalSystem()
    phase = PhaseParam(rho=0.3)
    rng = np.random.default_rng(DEFAULT_SEED + 2)
    worst = 0.0
    for _ in range(100):
        path = _random_unidirectional_path(rng)
        machine = compile_path_to_machine(path, system, phase)
        behavior = additive_behavior_truncated(machine, max_len=path.hops)
        amp = path_amplitude(system, phase, path)
        worst = max(worst, abs(behavior - amp))
    return worst <= 1e-12, f"max |behavior - amplitude| = {worst:.1e} over 100 paths"


def _check_single_word():
    system = PhysicalSystem()
    phase = PhaseParam(rho=0.3)
    rng = np.random.default_rng(DEFAULT_SEED + 2)
    for _ in range(100):
        path = _random_unidirectional_path(rng)
        machine = compile_path_to_machine(path, system, phase)
        for bound in (path.hops, path.hops + 3):
            words = accepted_words(machine.fsm, bound)
            if len(words) != 1:
                return False, f"expected one word, got {len(words)} at bound {bound}"
    return True, "each compiled machine accepts exactly one word"


def _check_loop_resummation():
    rng = np.random.default_rng(DEFAULT_SEED + 3)
    for _ in range(50):
        u = rng.uniform(0.02, 0.33) * np.exp(1j * rng.uniform(0, 2 * np.pi))
        w = rng.uniform(0.02, 0.33) * np.exp(1j * rng.uniform(0, 2 * np.pi))
        v = rng.uniform(0.05, 0.9) * np.exp(1j * rng.uniform(0, 2 * np.pi))
        closed = loop_resummation(u, v, w)
        for bound in range(10, 61, 10):
            partial = u * w * sum(v**j for j in range(1, bound + 1))
            # the 1e-15 floor covers rounding once the true tail is below it
            if abs(closed - partial) > abs(v) ** bound + 1e-15:
                return False, f"partial sum residual exceeds |v|^{bound}"
    return True, "closed form within |v|^L of partial sums for L = 10..60"


def _check_closed_vs_truncated():
    rng = np.random.default_rng(DEFAULT_SEED + 4)
    worst = 0.0
    for _ in range(50):
        machine = _random_additive_machine(rng)
        closed = additive_behavior_closed(machine)
        truncated = additive_behavior_truncated(machine, max_len=80)
        worst = max(worst, abs(closed - truncated) / max(1.0, abs(closed)))
    return worst <= 1e-8, f"max deviation {worst:.2e} over 50 machines"


def _check_universality():
    rng = np.random.default_rng(DEFAULT_SEED + 5)
    for _ in range(20):
        npairs = int(rng.integers(1, 21))
        pairs = {(int(rng.integers(0, 10)), int(rng.integers(100, 120))) for _ in range(npairs)}
        fsm, labeling = universal_relation_machine(pairs, anchor=-1)
        expected: dict[int, set[int]] = {}
        for y, z in pairs:
            expected.setdefault(y, set()).add(z)
        for y, outs in expected.items():
            if set(machine_behavior(fsm, labeling, y)) != outs:
                return False, f"behavior mismatch at input {y}"
        if machine_behavior(fsm, labeling, 99) != frozenset():
            return False, "behavior not empty outside the domain"
    return True, "20 random finite relations reproduced exactly"


def _check_cover_monotonicity():
    system = PhysicalSystem()
    phase = PhaseParam(rho=0.1)
    rng = np.random.default_rng(DEFAULT_SEED + 6)
    for _ in range(10):
        path = _random_unidirectional_path(rng, max_hops=5)
        machine = compile_path_to_machine(path, system, phase)
        base = additive_behavior_truncated(machine, max_len=path.hops)
        for extra in (1, 3, 7):
            if additive_behavior_truncated(machine, max_len=path.hops + extra) != base:
                return False, "acyclic behavior changed with a larger bound"
    return True, "acyclic truncated behavior constant beyond the longest path"


# --- cross section checks


def _check_machine_sum():
    system, phase, points, hop_scale = lattice_fixture()
    max_hops, n_supports = _lattice_saturation_hops(system, phase, points, hop_scale)
    paths = _lattice_paths(points, max_hops)
    result = sum_over_machines(paths, system, phase, Model.BIDIRECTIONAL, hop_scale=hop_scale)
    # resolvent oracle on the full lattice machine
    transitions = []
    labels = {}
    for k, (a, b) in enumerate((a, b) for a in points for b in points):
        sym = f"g{k}"
        transitions.append((f"p{points.index(a)}", sym, f"p{points.index(b)}"))
        labels[sym] = hop_scale * hop_amplitude(system, phase, a, b, Model.BIDIRECTIONAL)
    full = AdditiveXMachine(
        FiniteStateMachine(
            states=frozenset(f"p{i}" for i in range(len(points))),
            alphabet=frozenset(labels),
            transitions=tuple(transitions),
            initial="p0",
            finals=frozenset({f"p{len(points) - 1}"}),
        ),
        MultiplierLabeling(labels),
    )
    h = _weight_matrix(full)
    order = sorted(full.fsm.states)
    resolvent = _walk_sum(h, order.index("p0"), [order.index(f"p{len(points) - 1}")])
    machine_err = abs(result.machine_sum - resolvent) / abs(resolvent)
    if machine_err > 1e-8:
        return False, f"machine sum vs resolvent rel err {machine_err:.2e}"
    if len(result.classes) != n_supports:
        return False, f"expected {n_supports} machines, got {len(result.classes)}"
    radius = float(np.max(np.abs(np.linalg.eigvals(np.abs(h)))))
    for bound in sorted({4, 6, 8, max_hops}):
        partial = sum_over_machines(
            _lattice_paths(points, bound), system, phase, Model.BIDIRECTIONAL, hop_scale=hop_scale
        ).direct_sum
        gap = abs(resolvent - partial)
        if gap > radius**bound:
            return False, f"direct-sum gap {gap:.2e} exceeds radius^{bound}"
    return True, (
        f"machine sum matches resolvent to {machine_err:.1e}; "
        f"{len(result.classes)} machines; direct-sum gap under radius^L"
    )


def _check_psi_total_vs_phi():
    config = narrow_x_free_config()
    report = run_experiment(config)
    ok = report.flags["partial_sum_matches_phi_1e-8"]
    return ok, "psi_0 + ... + psi_n equals phi_n at 1e-8"


def verify_suite(selection=None) -> list[CheckResult]:
    """Run the module invariants and cross-module checks.

    selection is an iterable drawn from VERIFY_SECTIONS; None runs all.
    Failures are data (CheckResult.passed); no exception escapes a check.
    """
    if selection is None:
        sections = set(VERIFY_SECTIONS)
    else:
        sections = set(selection)
        unknown = sections - set(VERIFY_SECTIONS)
        if unknown:
            raise ConfigError(f"unknown verify sections: {sorted(unknown)}")
    results: list[CheckResult] = []
    if "standard" in sections:
        _check("standard", "quadrature-exactness", _check_quadrature_exactness, results)
        _check("standard", "quadrature-refinement", _check_quadrature_refinement, results)
        _check("standard", "quadrature-determinism", _check_quadrature_determinism, results)
        _check("standard", "action-invariants", _check_action_invariants, results)
        _check("standard", "action-oracle-convergence", _check_action_oracle, results)
        for name, config in bundled_experiments().items():
            _check("standard", f"telescoping-{name}", _check_telescoping(config), results)
        _check("standard", "dp-vs-direct", _check_dp_vs_direct, results)
        _check("standard", "wide-x-propagator", _check_wide_x_propagator, results)
        _check("standard", "chapman-kolmogorov", _check_chapman_kolmogorov, results)
        _check("standard", "antiparticle-symmetry", _check_anti_symmetry, results)
    if "finitary" in sections:
        narrow = narrow_x_free_config()
        _check("finitary", "psi-identity-unidirectional", _check_psi_identity(narrow, "unidirectional"), results)
        _check(
            "finitary",
            "psi-identity-bidirectional",
            _check_psi_identity(replace(narrow, model=Model.BIDIRECTIONAL), "bidirectional"),
            results,
        )
        _check("finitary", "psi-identity-harmonic", _check_psi_identity(harmonic_config(), "harmonic"), results)
        _check("finitary", "sigma-independence", _check_sigma_independence, results)
        _check("finitary", "probability-equivalence", _check_probability_equivalence, results)
        _check("finitary", "unidirectional-bans", _check_unidirectional_bans, results)
    if "xmachine" in sections:
        _check("xmachine", "path-computes-amplitude", _check_path_computes_amplitude, results)
        _check("xmachine", "single-word", _check_single_word, results)
        _check("xmachine", "loop-resummation", _check_loop_resummation, results)
        _check("xmachine", "closed-vs-truncated", _check_closed_vs_truncated, results)
        _check("xmachine", "universality", _check_universality, results)
        _check("xmachine", "cover-monotonicity", _check_cover_monotonicity, results)
    if "cross" in sections:
        _check("cross", "machine-sum-decomposition", _check_machine_sum, results)
        _check("cross", "psi-total-vs-phi", _check_psi_total_vs_phi, results)
    return results
