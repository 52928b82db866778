"""Finite state machines with relation labels and additive X-machines.

An X-machine is a finite state machine whose transition symbols are
labelled with relations on a data type; the machine computes the union,
over accepted words, of the composed relations.  When every label is a
constant complex multiplier the union is replaced by a sum over accepted
covering words and the machine is *additive*: its behavior is a single
multiplier, reported here as the image of z = 1.

A hop path compiles to an additive machine whose states are the distinct
spacetime points visited and whose transitions are the distinct hops,
labelled by their hop amplitudes.  Repeated traversals of the same hop
reuse the same transition (that is what creates loops), so two paths with
the same support compile to the same machine and the sum over distinct
machines of closed behaviors reproduces the sum over all covering walks.

The closed-form behavior is exact: by inclusion-exclusion over transition
subsets (or state subsets under state-cover semantics), the sum over
covering walks is an alternating sum of resolvent walk sums, each the
(initial, final) entry of (I - H)^-1 for the restricted weight matrix H.
Transition-cover semantics is the default: a word that skips transition e
while visiting all states is also generated by the sub-machine without e,
so state-cover double counts paths across machines and breaks the
machine-sum decomposition; state cover remains selectable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .action import PhysicalSystem
from .errors import (
    DivergentBehaviorError,
    SubsetBlowupError,
    UnboundedLanguageError,
    UnknownSymbolError,
)
from .finitary import HopPath, Model, PhaseParam, hop_amplitude

__all__ = [
    "FiniteStateMachine",
    "CoverSemantics",
    "MultiplierLabeling",
    "AdditiveXMachine",
    "IdentityRelation",
    "FiniteRelation",
    "MultiplierRelation",
    "GeneralLabeling",
    "recognizes",
    "accepted_words",
    "word_relation",
    "machine_behavior",
    "universal_relation_machine",
    "compile_path_to_machine",
    "additive_behavior_truncated",
    "additive_behavior_closed",
    "loop_resummation",
    "paths_equivalent",
    "MachineClass",
    "MachineSumResult",
    "sum_over_machines",
    "machine_to_text",
    "machine_from_text",
]

SUBSET_CAP = 2**20  # cap on inclusion-exclusion subsets and coverage masks
SPECTRAL_MARGIN = 1e-6


@dataclass(frozen=True)
class FiniteStateMachine:
    """Nondeterministic finite state machine over string state ids/symbols."""

    states: frozenset[str]
    alphabet: frozenset[str]
    transitions: tuple[tuple[str, str, str], ...]  # (from, symbol, to)
    initial: str
    finals: frozenset[str]

    def __post_init__(self):
        if self.initial not in self.states:
            raise ValueError("initial state must belong to states")
        if not self.finals:
            raise ValueError("finals must be non-empty")
        if not self.finals <= self.states:
            raise ValueError("finals must be a subset of states")
        for src, sym, dst in self.transitions:
            if src not in self.states or dst not in self.states:
                raise ValueError(f"transition endpoint outside states: {(src, sym, dst)}")
            if sym not in self.alphabet:
                raise ValueError(f"transition symbol outside alphabet: {sym}")


class CoverSemantics(Enum):
    STATE = "state"
    TRANSITION = "transition"


@dataclass(frozen=True)
class MultiplierLabeling:
    """Symbol -> constant complex multiplier c of the map z -> z * c."""

    map: dict[str, complex]

    def __hash__(self):
        return hash(frozenset(self.map.items()))


@dataclass(frozen=True)
class AdditiveXMachine:
    fsm: FiniteStateMachine
    labeling: MultiplierLabeling
    cover_semantics: CoverSemantics = CoverSemantics.TRANSITION

    def __post_init__(self):
        missing = self.fsm.alphabet - set(self.labeling.map)
        if missing:
            raise ValueError(f"labeling not total on the alphabet, missing {sorted(missing)}")


def recognizes(fsm: FiniteStateMachine, word) -> bool:
    """True iff some transition path from initial to a final state spells word."""
    current = {fsm.initial}
    for sym in word:
        if sym not in fsm.alphabet:
            raise UnknownSymbolError(f"symbol {sym!r} not in the alphabet")
        current = {dst for (src, s, dst) in fsm.transitions if s == sym and src in current}
        if not current:
            return False
    return bool(current & fsm.finals)


def _has_cycle_on_accepting_path(fsm: FiniteStateMachine) -> bool:
    fwd: dict[str, set[str]] = {s: set() for s in fsm.states}
    bwd: dict[str, set[str]] = {s: set() for s in fsm.states}
    for src, _, dst in fsm.transitions:
        fwd[src].add(dst)
        bwd[dst].add(src)

    def reach(start, edges):
        seen, stack = set(start), list(start)
        while stack:
            for nxt in edges[stack.pop()]:
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        return seen

    live = reach({fsm.initial}, fwd) & reach(set(fsm.finals), bwd)
    # cycle detection on the live subgraph
    color: dict[str, int] = {}

    def dfs(node):
        color[node] = 1
        for nxt in fwd[node]:
            if nxt not in live:
                continue
            if color.get(nxt) == 1:
                return True
            if nxt not in color and dfs(nxt):
                return True
        color[node] = 2
        return False

    return any(dfs(s) for s in live if s not in color)


def accepted_words(fsm: FiniteStateMachine, max_len: int) -> set[tuple[str, ...]]:
    """All accepted words of length <= max_len (distinct words, not paths)."""
    frontier: dict[tuple[str, ...], frozenset[str]] = {(): frozenset({fsm.initial})}
    accepted = {w for w, states in frontier.items() if states & fsm.finals}
    for _ in range(max_len):
        nxt: dict[tuple[str, ...], set[str]] = {}
        for word, states in frontier.items():
            for src, sym, dst in fsm.transitions:
                if src in states:
                    nxt.setdefault(word + (sym,), set()).add(dst)
        frontier = {w: frozenset(s) for w, s in nxt.items()}
        accepted.update(w for w, states in frontier.items() if states & fsm.finals)
        if not frontier:
            break
    return accepted


# ---------------------------------------------------------------------------
# relation labels


class IdentityRelation:
    """The identity relation on any carrier."""

    def image(self, values: frozenset) -> frozenset:
        return values

    def __eq__(self, other):
        return isinstance(other, IdentityRelation)

    def __hash__(self):
        return hash("identity")


@dataclass(frozen=True)
class FiniteRelation:
    """A finite set of (input, output) pairs."""

    pairs: frozenset

    def image(self, values: frozenset) -> frozenset:
        return frozenset(b for (a, b) in self.pairs if a in values)


@dataclass(frozen=True)
class MultiplierRelation:
    """The constant multiplier k_c: z -> z * c."""

    c: complex

    def image(self, values: frozenset) -> frozenset:
        return frozenset(v * self.c for v in values)


@dataclass(frozen=True)
class ComposedRelation:
    parts: tuple

    def image(self, values: frozenset) -> frozenset:
        for part in self.parts:
            values = part.image(values)
        return values


def _compose(r1, r2):
    """Left-to-right composition (apply r1 first)."""
    if isinstance(r1, IdentityRelation):
        return r2
    if isinstance(r2, IdentityRelation):
        return r1
    if isinstance(r1, MultiplierRelation) and isinstance(r2, MultiplierRelation):
        return MultiplierRelation(r1.c * r2.c)
    if isinstance(r1, FiniteRelation) and isinstance(r2, FiniteRelation):
        index: dict = {}
        for a, b in r2.pairs:
            index.setdefault(a, set()).add(b)
        return FiniteRelation(
            frozenset((a, c) for (a, b) in r1.pairs for c in index.get(b, ()))
        )
    return ComposedRelation(parts=(r1, r2))


@dataclass(frozen=True)
class GeneralLabeling:
    """Symbol -> relation on the carrier, with optional encoder/decoder."""

    map: dict
    encoder: object | None = None
    decoder: object | None = None

    def __hash__(self):
        return hash(frozenset(self.map))


def word_relation(labeling: GeneralLabeling | MultiplierLabeling, word):
    """Left-to-right composition of the labelled relations along the word.

    The empty word gives the identity relation.
    """
    rel = IdentityRelation()
    for sym in word:
        if sym not in labeling.map:
            raise UnknownSymbolError(f"symbol {sym!r} not labelled")
        label = labeling.map[sym]
        if isinstance(labeling, MultiplierLabeling):
            label = MultiplierRelation(complex(label))
        rel = _compose(rel, label)
    return rel


def machine_behavior(fsm: FiniteStateMachine, labeling: GeneralLabeling, value, max_len: int | None = None) -> frozenset:
    """Union over accepted words (within max_len) of the word images of value.

    The encoder is applied before and the decoder after when present.  For
    machines with a cycle on an accepting path a length bound is required.
    """
    if max_len is None:
        if _has_cycle_on_accepting_path(fsm):
            raise UnboundedLanguageError(
                "machine accepts infinitely many words; supply a length bound"
            )
        max_len = len(fsm.states) + len(fsm.transitions)
    start = frozenset({value})
    if labeling.encoder is not None:
        start = labeling.encoder.image(start)
    outputs: set = set()
    for word in accepted_words(fsm, max_len):
        image = word_relation(labeling, word).image(start)
        if labeling.decoder is not None:
            image = labeling.decoder.image(image)
        outputs.update(image)
    return frozenset(outputs)


def universal_relation_machine(zeta: set, anchor) -> tuple[FiniteStateMachine, GeneralLabeling]:
    """The 2-state, 1-transition machine computing an arbitrary finite relation.

    Encoder pairs the input with an anchor output value, the single label
    rewrites the pair to (input, zeta(input)), and the decoder projects the
    output component.
    """
    zeta = frozenset(zeta)
    if not zeta:
        raise ValueError("zeta must be non-empty")
    fsm = FiniteStateMachine(
        states=frozenset({"s0", "s1"}),
        alphabet=frozenset({"a"}),
        transitions=(("s0", "a", "s1"),),
        initial="s0",
        finals=frozenset({"s1"}),
    )
    domain = frozenset(y for (y, _) in zeta)
    encoder = FiniteRelation(frozenset((y, (y, anchor)) for y in domain))
    label = FiniteRelation(frozenset(((y, anchor), (y, z)) for (y, z) in zeta))
    decoder = FiniteRelation(frozenset(((y, z), z) for (y, z) in zeta))
    return fsm, GeneralLabeling(map={"a": label}, encoder=encoder, decoder=decoder)


# ---------------------------------------------------------------------------
# compilation of hop paths


def compile_path_to_machine(
    path: HopPath,
    sys: PhysicalSystem,
    phase: PhaseParam,
    cover_semantics: CoverSemantics = CoverSemantics.TRANSITION,
) -> AdditiveXMachine:
    """Compile a hop path into the additive machine it generates.

    States are the distinct spacetime points of the path in first-visit
    order; distinct hops (from-point, to-point pairs) become transitions in
    first-use order, labelled by their hop amplitudes.  A hop traversed
    twice reuses its transition, so a loop walked once or many times
    generates the same machine.
    """
    state_of: dict[tuple[float, float], str] = {}
    for p in path.points:
        key = (p.x, p.t)
        if key not in state_of:
            state_of[key] = f"q{len(state_of)}"
    symbol_of: dict[tuple, str] = {}
    transitions: list[tuple[str, str, str]] = []
    labels: dict[str, complex] = {}
    for a, b in zip(path.points, path.points[1:]):
        hop_key = ((a.x, a.t), (b.x, b.t))
        if hop_key not in symbol_of:
            sym = f"h{len(symbol_of)}"
            symbol_of[hop_key] = sym
            transitions.append((state_of[hop_key[0]], sym, state_of[hop_key[1]]))
            labels[sym] = hop_amplitude(sys, phase, a, b, path.model)
    fsm = FiniteStateMachine(
        states=frozenset(state_of.values()),
        alphabet=frozenset(labels),
        transitions=tuple(transitions),
        initial=state_of[(path.points[0].x, path.points[0].t)],
        finals=frozenset({state_of[(path.points[-1].x, path.points[-1].t)]}),
    )
    return AdditiveXMachine(fsm=fsm, labeling=MultiplierLabeling(labels), cover_semantics=cover_semantics)


# ---------------------------------------------------------------------------
# additive behavior


def _state_order(fsm: FiniteStateMachine) -> list[str]:
    return sorted(fsm.states)


def _weight_matrix(machine: AdditiveXMachine, allowed: set[int] | None = None) -> np.ndarray:
    """H[i, j] = sum of labels of (allowed) transitions state_i -> state_j."""
    order = _state_order(machine.fsm)
    index = {s: i for i, s in enumerate(order)}
    n = len(order)
    h = np.zeros((n, n), dtype=complex)
    for k, (src, sym, dst) in enumerate(machine.fsm.transitions):
        if allowed is not None and k not in allowed:
            continue
        h[index[src], index[dst]] += machine.labeling.map[sym]
    return h


def _magnitude_matrix(machine: AdditiveXMachine) -> np.ndarray:
    """A[i, j] = sum of |label| over transitions state_i -> state_j.

    This dominates |H| for every transition subset (parallel labels may
    cancel in H but not here), so it is the right matrix for divergence
    guards that must cover all restricted machines and word sums.
    """
    order = _state_order(machine.fsm)
    index = {s: i for i, s in enumerate(order)}
    n = len(order)
    a = np.zeros((n, n))
    for src, sym, dst in machine.fsm.transitions:
        a[index[src], index[dst]] += abs(machine.labeling.map[sym])
    return a


def _spectral_radius_upper(mat: np.ndarray) -> float:
    """Conservative estimate of the Perron root of the magnitude matrix.

    Power iteration from the all-ones vector, 200 iterations, 1e-9 shift
    tolerance.  The k-step estimate is the geometric mean growth
    ||A^k 1||_inf^(1/k), which equals the induced infinity-norm of A^k to
    the 1/k and therefore never undershoots the spectral radius; it also
    converges for periodic matrices where plain ratio estimates oscillate.
    """
    a = np.abs(mat)
    n = a.shape[0]
    if n == 0:
        return 0.0
    v = np.ones(n)
    log_growth = 0.0
    estimate = None
    for k in range(1, 201):
        v = a @ v
        top = float(np.max(v))
        if top == 0.0:
            return 0.0  # nilpotent
        log_growth += math.log(top)
        v /= top
        new_estimate = math.exp(log_growth / k)
        if estimate is not None and abs(new_estimate - estimate) < 1e-9:
            return new_estimate
        estimate = new_estimate
    return estimate


def _walk_sum(h: np.ndarray, init: int, finals: list[int]) -> complex:
    """Sum over all walks init -> any final of the product of step weights.

    The length-0 walk counts when init is final: this is the identity term
    of (I - H)^-1.
    """
    n = h.shape[0]
    rhs = np.zeros(n, dtype=complex)
    for f in finals:
        rhs[f] += 1.0
    x = np.linalg.solve(np.eye(n, dtype=complex) - h, rhs)
    return complex(x[init])


def additive_behavior_truncated(machine: AdditiveXMachine, max_len: int) -> complex:
    """Sum over accepted covering words of length <= max_len (image of z=1).

    Dynamic programming over (state, coverage mask) pairs; coverage tracks
    transitions used or states visited per the machine's cover semantics.
    """
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    fsm = machine.fsm
    order = _state_order(fsm)
    index = {s: i for i, s in enumerate(order)}
    nstates = len(order)
    if machine.cover_semantics is CoverSemantics.TRANSITION:
        nbits = len(fsm.transitions)
        start_mask = 0
    else:
        nbits = nstates
        start_mask = 1 << index[fsm.initial]
    nmasks = 1 << nbits
    if nmasks > SUBSET_CAP:
        raise SubsetBlowupError(f"coverage mask space 2^{nbits} exceeds the cap {SUBSET_CAP}")
    full = nmasks - 1
    finals = [index[f] for f in fsm.finals]
    steps = []
    for k, (src, sym, dst) in enumerate(fsm.transitions):
        if machine.cover_semantics is CoverSemantics.TRANSITION:
            bit = 1 << k
        else:
            bit = 1 << index[dst]
        steps.append((index[src], index[dst], bit, machine.labeling.map[sym]))
    masks = np.arange(nmasks)
    dist = np.zeros((nstates, nmasks), dtype=complex)
    dist[index[fsm.initial], start_mask] = 1.0
    total = 0j
    if index[fsm.initial] in finals and start_mask == full:
        total += 1.0  # the empty word
    for _ in range(max_len):
        new = np.zeros_like(dist)
        for src, dst, bit, label in steps:
            np.add.at(new[dst], masks | bit, label * dist[src])
        dist = new
        for f in finals:
            total += dist[f, full]
    return total


def additive_behavior_closed(machine: AdditiveXMachine) -> complex:
    """Exact infinite sum over accepted covering words, by inclusion-exclusion.

    Requires the spectral radius of the magnitude weight matrix to be
    strictly below 1 (margin 1e-6); each subset term is a resolvent walk
    sum of the restricted machine.
    """
    fsm = machine.fsm
    order = _state_order(fsm)
    index = {s: i for i, s in enumerate(order)}
    init = index[fsm.initial]
    finals = [index[f] for f in fsm.finals]
    h_full = _weight_matrix(machine)
    radius = _spectral_radius_upper(_magnitude_matrix(machine))
    if radius >= 1.0 - SPECTRAL_MARGIN:
        raise DivergentBehaviorError(
            f"spectral radius estimate {radius:.6f} >= {1.0 - SPECTRAL_MARGIN:.6f}; walk sum diverges"
        )
    if machine.cover_semantics is CoverSemantics.TRANSITION:
        ntrans = len(fsm.transitions)
        if 2**ntrans > SUBSET_CAP:
            raise SubsetBlowupError(f"2^{ntrans} transition subsets exceed the cap {SUBSET_CAP}")
        total = 0j
        for subset in range(2**ntrans):
            allowed = {k for k in range(ntrans) if subset >> k & 1}
            h = _weight_matrix(machine, allowed)
            sign = -1.0 if (ntrans - len(allowed)) % 2 else 1.0
            total += sign * _walk_sum(h, init, finals)
        return total
    nstates = len(order)
    if 2**nstates > SUBSET_CAP:
        raise SubsetBlowupError(f"2^{nstates} state subsets exceed the cap {SUBSET_CAP}")
    total = 0j
    for subset in range(2**nstates):
        members = [i for i in range(nstates) if subset >> i & 1]
        if init not in members:
            continue
        sub_finals = [i for i, f in enumerate(members) if f in finals]
        if not sub_finals:
            continue
        h = h_full[np.ix_(members, members)]
        sign = -1.0 if (nstates - len(members)) % 2 else 1.0
        total += sign * _walk_sum(h, members.index(init), sub_finals)
    return total


def loop_resummation(psi_u: complex, psi_v: complex, psi_w: complex) -> complex:
    """Sum over j >= 1 of psi_u * psi_v^j * psi_w = psi_u psi_w psi_v / (1 - psi_v)."""
    if abs(psi_v) >= 1.0:
        raise DivergentBehaviorError(f"|psi_v| = {abs(psi_v):.6f} >= 1; the loop sum diverges")
    return psi_u * psi_w * psi_v / (1.0 - psi_v)


# ---------------------------------------------------------------------------
# path equivalence and the sum over machines


def _machine_key(machine: AdditiveXMachine, state_points: dict[str, tuple[float, float]]):
    points = frozenset(state_points.values())
    hops = frozenset(
        (state_points[src], state_points[dst], machine.labeling.map[sym])
        for src, sym, dst in machine.fsm.transitions
    )
    initial = state_points[machine.fsm.initial]
    finals = frozenset(state_points[f] for f in machine.fsm.finals)
    return points, hops, initial, finals


def _compile_with_points(path: HopPath, sys, phase, cover_semantics=CoverSemantics.TRANSITION):
    machine = compile_path_to_machine(path, sys, phase, cover_semantics)
    # state name -> point, in the compiler's first-visit order
    state_points: dict[str, tuple[float, float]] = {}
    seen: set[tuple[float, float]] = set()
    for p in path.points:
        key = (p.x, p.t)
        if key not in seen:
            seen.add(key)
            state_points[f"q{len(state_points)}"] = key
    return machine, state_points


def paths_equivalent(
    p1: HopPath,
    p2: HopPath,
    sys: PhysicalSystem,
    phase: PhaseParam,
) -> bool:
    """True iff the two paths generate the same machine: same point set,
    same set of labelled hops (symbols are anonymous), same endpoints."""
    if (p1.points[0], p1.points[-1]) != (p2.points[0], p2.points[-1]):
        raise ValueError("paths must share endpoints")
    m1, pts1 = _compile_with_points(p1, sys, phase)
    m2, pts2 = _compile_with_points(p2, sys, phase)
    return _machine_key(m1, pts1) == _machine_key(m2, pts2)


@dataclass(frozen=True)
class MachineClass:
    machine: AdditiveXMachine
    path_indices: tuple[int, ...]


@dataclass(frozen=True)
class MachineSumResult:
    direct_sum: complex
    machine_sum: complex
    classes: tuple[MachineClass, ...]


def sum_over_machines(
    paths,
    sys: PhysicalSystem,
    phase: PhaseParam,
    model: Model,
    hop_scale: complex = 1.0,
    cover_semantics: CoverSemantics = CoverSemantics.TRANSITION,
) -> MachineSumResult:
    """Direct path-amplitude sum versus the sum over distinct machines.

    Physical hop amplitudes have unit modulus, so any machine with a cycle
    has a divergent walk sum; hop_scale < 1 damps every label (and every
    hop of the direct sum) to make both sides finite.  The decomposition
    identity is label-value independent.
    """
    paths = list(paths)
    if not paths:
        return MachineSumResult(direct_sum=0j, machine_sum=0j, classes=())
    endpoints = (paths[0].points[0], paths[0].points[-1])
    amp_cache: dict[tuple, complex] = {}

    def scaled_hop(a, b):
        key = (a.x, a.t, b.x, b.t)
        if key not in amp_cache:
            amp_cache[key] = hop_scale * hop_amplitude(sys, phase, a, b, model)
        return amp_cache[key]

    groups: dict = {}
    direct = 0j
    for i, path in enumerate(paths):
        if (path.points[0], path.points[-1]) != endpoints:
            raise ValueError("all paths must share endpoints")
        if path.model is not model:
            raise ValueError("path model differs from the requested model")
        amp = 1 + 0j
        hops = set()
        for a, b in zip(path.points, path.points[1:]):
            label = scaled_hop(a, b)
            amp *= label
            hops.add(((a.x, a.t), (b.x, b.t), label))
        direct += amp
        # the machine identity is fully determined by the labelled hop set
        # (endpoints are shared), so the machine is compiled once per class
        key = frozenset(hops)
        if key in groups:
            groups[key][1].append(i)
        else:
            machine, _ = _compile_with_points(path, sys, phase, cover_semantics)
            if hop_scale != 1.0:
                scaled = MultiplierLabeling({s: hop_scale * c for s, c in machine.labeling.map.items()})
                machine = AdditiveXMachine(machine.fsm, scaled, cover_semantics)
            groups[key] = (machine, [i])
    machine_total = 0j
    classes = []
    for machine, indices in groups.values():
        machine_total += additive_behavior_closed(machine)
        classes.append(MachineClass(machine=machine, path_indices=tuple(indices)))
    return MachineSumResult(direct_sum=direct, machine_sum=machine_total, classes=tuple(classes))


# ---------------------------------------------------------------------------
# plain-text machine serialization


def machine_to_text(machine: AdditiveXMachine) -> str:
    """Serialize: one record per line (state / initial / final / trans)."""
    lines = []
    for s in sorted(machine.fsm.states):
        lines.append(f"state {s}")
    lines.append(f"initial {machine.fsm.initial}")
    for f in sorted(machine.fsm.finals):
        lines.append(f"final {f}")
    for src, sym, dst in machine.fsm.transitions:
        c = machine.labeling.map[sym]
        lines.append(f"trans {src} {sym} {dst} {c.real!r} {c.imag!r}")
    return "\n".join(lines) + "\n"


def machine_from_text(text: str, cover_semantics: CoverSemantics = CoverSemantics.TRANSITION) -> AdditiveXMachine:
    """Parse the plain-text machine format ('#' starts a comment)."""
    states: set[str] = set()
    finals: set[str] = set()
    initial: str | None = None
    transitions: list[tuple[str, str, str]] = []
    labels: dict[str, complex] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        kind = parts[0]
        if kind == "state" and len(parts) == 2:
            states.add(parts[1])
        elif kind == "initial" and len(parts) == 2:
            if initial is not None and initial != parts[1]:
                raise ValueError(f"line {lineno}: multiple initial states")
            initial = parts[1]
            states.add(parts[1])
        elif kind == "final" and len(parts) == 2:
            finals.add(parts[1])
            states.add(parts[1])
        elif kind == "trans" and len(parts) == 6:
            src, sym, dst = parts[1], parts[2], parts[3]
            label = complex(float(parts[4]), float(parts[5]))
            if sym in labels and labels[sym] != label:
                raise ValueError(f"line {lineno}: symbol {sym} relabelled inconsistently")
            labels[sym] = label
            states.add(src)
            states.add(dst)
            transitions.append((src, sym, dst))
        else:
            raise ValueError(f"line {lineno}: unrecognized record {raw!r}")
    if initial is None:
        raise ValueError("machine file declares no initial state")
    if not finals:
        raise ValueError("machine file declares no final state")
    fsm = FiniteStateMachine(
        states=frozenset(states),
        alphabet=frozenset(labels),
        transitions=tuple(transitions),
        initial=initial,
        finals=frozenset(finals),
    )
    return AdditiveXMachine(fsm=fsm, labeling=MultiplierLabeling(labels), cover_semantics=cover_semantics)
