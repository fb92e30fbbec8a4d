"""Entangled agents against a classically implemented social choice rule.

Setup. A symmetric n-player C/D game with defection strictly dominant and
all-C better for everyone than all-D is quantized exactly as in ``ewl``. The
game is tied to a finite environment and SCR through the canonical
mechanism: at a state where a chosen outcome ``a`` is strictly worse for every
agent than some outcome ``b`` that the SCR picks at another state ``s'``,
playing C means sending the collusive message ``(s', b, 0)`` and playing D
means sending the truthful ``(state, a, 0)``. The mechanism only ever sees
these classical messages; the measurement result decides which one an
agent sends.

Whether the entangled agents escape the rule is decided by a named,
pluggable predicate ("condition lambda"). The default asks whether all-Q is
a grid Nash equilibrium of the quantized game whose payoffs strictly
Pareto-dominate all-D.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .ewl import (
    EPSILON,
    QuantumGameConfig,
    StrategySpace,
    gamma_samples,
    is_nash_on_grid,
    play,
    quantum_strategy,
)
from .game import NormalFormGame
from .mechanism import (
    Environment,
    Mechanism,
    Message,
    canonical_mechanism,
    environment_from_dict,
    implements,
    make_scr,
)
from .qsim import MAX_QUBITS, basis_labels


@dataclass(frozen=True, eq=False)
class QuantumMechanismScenario:
    n_agents: int
    cooperate: tuple[float, ...]
    defect: tuple[float, ...]
    gamma: float = math.pi / 2
    lambda_name: str = "default"
    lambda_params: dict = field(default_factory=dict)
    environment: Environment | None = None
    scr: dict | None = None
    strategy_space: StrategySpace = StrategySpace.TWO_PARAMETER
    grid_resolution: tuple[int, ...] | None = None
    integer_cap: int = 2

    def __post_init__(self):
        n = self.n_agents
        if not 2 <= n <= MAX_QUBITS:
            raise ValueError(f"n_agents={n} outside 2..{MAX_QUBITS}")
        coop = tuple(float(x) for x in self.cooperate)
        dfct = tuple(float(x) for x in self.defect)
        object.__setattr__(self, "cooperate", coop)
        object.__setattr__(self, "defect", dfct)
        object.__setattr__(self, "strategy_space", StrategySpace(self.strategy_space))
        if len(coop) != n or len(dfct) != n:
            raise ValueError(f"need {n} cooperate and {n} defect payoffs")
        if not all(d > c for c, d in zip(coop, dfct)):
            raise ValueError("not a Prisoners' Dilemma: defection must be strictly dominant")
        if not coop[-1] > dfct[0]:
            raise ValueError("not a Prisoners' Dilemma: all-C must Pareto-dominate all-D")
        if not 0.0 <= self.gamma <= math.pi / 2 + 1e-12:
            raise ValueError(f"gamma={self.gamma} outside [0, pi/2]")
        if (self.environment is None) != (self.scr is None):
            raise ValueError("environment and scr must be given together")
        if self.environment is not None and self.environment.n_agents != n:
            raise ValueError(f"linked environment has {self.environment.n_agents} agents, scenario has {n}")

    @property
    def game(self) -> NormalFormGame:
        return NormalFormGame.symmetric(self.n_agents, self.cooperate, self.defect)

    def config(self, gamma: float | None = None) -> QuantumGameConfig:
        return QuantumGameConfig(self.game, self.gamma if gamma is None else gamma, self.strategy_space)

    def with_gamma(self, gamma: float) -> "QuantumMechanismScenario":
        return replace(self, gamma=gamma)

    def with_lambda(self, name: str, **params) -> "QuantumMechanismScenario":
        return replace(self, lambda_name=name, lambda_params=params)

    def with_scr(self, environment: Environment, scr) -> "QuantumMechanismScenario":
        return replace(self, environment=environment, scr=make_scr(environment, scr))


def default_grid(n_agents: int) -> tuple[int, int]:
    """Two-parameter grid that contains U(0, pi/n): 33 thetas, lcm(16, n')+1 phis."""
    step = n_agents // math.gcd(n_agents, 2)
    return 33, math.lcm(16, step) + 1


def _grid(s: QuantumMechanismScenario):
    if s.grid_resolution is not None:
        return s.grid_resolution
    if s.strategy_space is StrategySpace.TWO_PARAMETER:
        return default_grid(s.n_agents)
    return None


# -- classical and quantum analysis -------------------------------------------


class ClassicalEquilibrium(NamedTuple):
    profile: tuple[str, ...]
    payoffs: np.ndarray


def classical_equilibrium(s: QuantumMechanismScenario) -> ClassicalEquilibrium:
    """All-D; defection is strictly dominant so it is the unique pure equilibrium."""
    profile = ("D",) * s.n_agents
    return ClassicalEquilibrium(profile, s.game.payoff(profile))


class QuantumCheck(NamedTuple):
    all_q_is_nash: bool
    all_q_payoffs: np.ndarray
    classical_payoffs: np.ndarray
    pareto_improves: bool
    witness: object  # best profitable deviation when all-Q is not an equilibrium


def quantum_equilibrium_check(s: QuantumMechanismScenario, grid_resolution=None,
                              epsilon: float = EPSILON) -> QuantumCheck:
    cfg = s.config()
    profile = [quantum_strategy(s.n_agents)] * s.n_agents
    check = is_nash_on_grid(cfg, profile, grid_resolution or _grid(s), epsilon)
    classical = classical_equilibrium(s).payoffs
    improves = bool(np.all(check.payoffs > classical + epsilon))
    return QuantumCheck(check.is_nash, check.payoffs, classical, improves, check.witness)


# -- condition lambda -----------------------------------------------------------

_PREDICATES: dict[str, Callable[..., bool]] = {}


def register_condition(name: str):
    """Decorator adding a named predicate ``fn(scenario, **params) -> bool``."""
    def deco(fn):
        _PREDICATES[name] = fn
        return fn
    return deco


def available_conditions() -> list[str]:
    return sorted(_PREDICATES)


@register_condition("default")
def _quantum_advantage(s: QuantumMechanismScenario, epsilon: float = EPSILON) -> bool:
    q = quantum_equilibrium_check(s, epsilon=epsilon)
    return q.all_q_is_nash and q.pareto_improves


@register_condition("always_true")
def _always_true(s: QuantumMechanismScenario) -> bool:
    return True


@register_condition("always_false")
def _always_false(s: QuantumMechanismScenario) -> bool:
    return False


@register_condition("min_gamma")
def _min_gamma(s: QuantumMechanismScenario, gamma_min: float = math.pi / 2) -> bool:
    return s.gamma >= gamma_min


def evaluate_condition_lambda(s: QuantumMechanismScenario) -> bool:
    try:
        fn = _PREDICATES[s.lambda_name]
    except KeyError:
        raise ValueError(
            f"unknown condition {s.lambda_name!r}; available: {', '.join(available_conditions())}"
        ) from None
    return bool(fn(s, **s.lambda_params))


# -- message embedding and breakage ---------------------------------------------


class Embedding(NamedTuple):
    """How C and D translate into canonical-mechanism messages at one state."""

    state: str
    truthful: Message
    collusive: Message

    def messages(self, bits: Sequence[int]) -> tuple[Message, ...]:
        return tuple(self.truthful if b else self.collusive for b in bits)


def embedding(env: Environment, scr, state: str) -> Embedding | None:
    """First (chosen a, better b, state s') with b in F(s') \\ F(state) strictly better for all.

    Search order is outcome order for ``a`` and ``b`` and state order for
    ``s'``. Returns None when the rule picks nothing that collusion could beat.
    """
    s = env.state_index(state)
    for a in env.sorted_outcomes(scr[state]):
        ka = env.outcome_index(a)
        for kb, b in enumerate(env.outcomes):
            if b in scr[state] or not np.all(env.ranks[s, :, kb] > env.ranks[s, :, ka]):
                continue
            for other in env.states:
                if b in scr[other]:
                    return Embedding(state, Message(state, a, 0), Message(other, b, 0))
    return None


def outcome_distribution(s: QuantumMechanismScenario, mech: Mechanism, emb: Embedding,
                         profile: Sequence | None = None) -> dict[str, float]:
    """Mechanism outcome probabilities when measured C/D bits become messages."""
    if profile is None:
        profile = [quantum_strategy(s.n_agents)] * s.n_agents
    dist = play(s.config(), profile).distribution
    out: dict[str, float] = {}
    for label, p in zip(basis_labels(s.n_agents), dist):
        if p <= 1e-15:
            continue
        bits = [c == "D" for c in label]
        o = mech.outcome(emb.messages(bits))
        out[o] = out.get(o, 0.0) + float(p)
    return out


class StateBreakage(NamedTuple):
    state: str
    classical_outcomes: frozenset
    collusive_message: Message | None
    quantum_outcome: str | None
    broken: bool


class BreakageReport(NamedTuple):
    verdict: str  # "quantum-broken" | "not broken" | "not implemented"
    text: str
    classically_implemented: bool
    lambda_holds: bool
    quantum: QuantumCheck
    rows: list[StateBreakage]


def breakage_report(s: QuantumMechanismScenario) -> BreakageReport:
    if s.environment is None:
        raise ValueError("scenario has no linked SCR/environment")
    env, scr = s.environment, s.scr
    mech = canonical_mechanism(scr, env, s.integer_cap)
    classical = implements(scr, mech, env)
    quantum = quantum_equilibrium_check(s)
    holds = evaluate_condition_lambda(s)
    rows = []
    for state in env.states:
        emb = embedding(env, scr, state)
        if emb is None:
            rows.append(StateBreakage(state, frozenset(scr[state]), None, None, False))
            continue
        dist = outcome_distribution(s, mech, emb)
        modal = max(env.sorted_outcomes(dist), key=lambda o: dist[o])
        broken = holds and dist.get(modal, 0.0) > 1 - 1e-9 and modal not in scr[state]
        rows.append(StateBreakage(state, frozenset(scr[state]), emb.collusive, modal, broken))

    if not classical:
        verdict = "not implemented"
        text = "SCR is not Nash implemented by the canonical mechanism; nothing to break"
    elif any(r.broken for r in rows):
        verdict = "quantum-broken"
        states = ", ".join(r.state for r in rows if r.broken)
        text = f"classically implemented / quantum-broken at state(s) {states}"
    else:
        verdict = "not broken"
        why = "condition lambda fails" if not holds else "no Pareto-improving collusion available"
        text = f"classically implemented, not broken ({why})"
    return BreakageReport(verdict, text, bool(classical), holds, quantum, rows)


# -- scenario files and sweep output -------------------------------------------


def scenario_from_dict(data: dict, base_dir: Path | str = ".") -> QuantumMechanismScenario:
    env = scr = None
    linked = data.get("environment")
    if isinstance(linked, str):
        with open(Path(base_dir) / linked, encoding="utf-8") as fh:
            linked = json.load(fh)
    if linked is not None:
        env, scr = environment_from_dict(linked)
        if scr is None:
            raise ValueError("linked environment must carry an 'scr' block")
    pd = data["pd_payoffs"]
    lam = data.get("condition_lambda", {})
    grid = data.get("grid")
    return QuantumMechanismScenario(
        n_agents=int(data["n_agents"]),
        cooperate=tuple(pd["cooperate"]),
        defect=tuple(pd["defect"]),
        gamma=float(data.get("gamma", math.pi / 2)),
        lambda_name=lam.get("name", "default"),
        lambda_params=dict(lam.get("params", {})),
        environment=env,
        scr=scr,
        strategy_space=data.get("strategy_space", "two_parameter"),
        grid_resolution=tuple(grid) if grid else None,
        integer_cap=int(data.get("integer_cap", 2)),
    )


def load_scenario(path) -> QuantumMechanismScenario:
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        return scenario_from_dict(json.load(fh), path.parent)


class SweepRecord(NamedTuple):
    gamma: float
    lambda_holds: bool
    all_q_is_nash: bool
    pareto_improves: bool
    payoffs: tuple[float, ...]
    verdict: str


def sweep(s: QuantumMechanismScenario, gammas) -> list[SweepRecord]:
    if isinstance(gammas, int):
        gammas = gamma_samples(gammas)
    records = []
    for g in sorted(set(float(x) for x in gammas)):
        sg = s.with_gamma(g)
        q = quantum_equilibrium_check(sg)
        verdict = breakage_report(sg).verdict if s.environment is not None else ""
        records.append(SweepRecord(g, evaluate_condition_lambda(sg), q.all_q_is_nash,
                                   q.pareto_improves, tuple(float(x) for x in q.all_q_payoffs), verdict))
    return records


def sweep_header(n_agents: int) -> list[str]:
    return (["gamma", "lambda", "all_q_is_nash", "pareto_improves"]
            + [f"payoff_{i + 1}" for i in range(n_agents)] + ["verdict"])


def write_sweep_csv(records: Sequence[SweepRecord], fh) -> None:
    if not records:
        raise ValueError("nothing to write")
    w = csv.writer(fh, lineterminator="\r\n")
    w.writerow(sweep_header(len(records[0].payoffs)))
    flag = lambda b: str(b).lower()  # noqa: E731
    for r in records:
        w.writerow([repr(r.gamma), flag(r.lambda_holds), flag(r.all_q_is_nash), flag(r.pareto_improves)]
                   + [repr(x) for x in r.payoffs] + [r.verdict])


def read_sweep_csv(fh) -> list[SweepRecord]:
    if isinstance(fh, str):
        fh = io.StringIO(fh)
    reader = csv.reader(fh)
    header = next(reader)
    if header[:4] != ["gamma", "lambda", "all_q_is_nash", "pareto_improves"] or header[-1] != "verdict":
        raise ValueError(f"unexpected sweep header {header}")
    out = []
    for rec in reader:
        if not rec:
            continue
        out.append(SweepRecord(float(rec[0]), rec[1] == "true", rec[2] == "true", rec[3] == "true",
                               tuple(float(x) for x in rec[4:-1]), rec[-1]))
    return out
