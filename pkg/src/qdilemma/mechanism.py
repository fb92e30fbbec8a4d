"""Finite Nash implementation: social choice rules, Maskin checks, canonical mechanism.

Preferences are integer utility ranks, one per (state, agent, outcome);
higher is better and equal ranks are indifference. Everything is decided by
exhaustive enumeration, so environments are meant to be small.
"""
from __future__ import annotations

import csv
import io
import itertools
import json
from dataclasses import dataclass
from typing import Callable, Hashable, Iterable, Mapping, NamedTuple, Sequence

import numpy as np

MAX_PROFILES = 10 ** 7

SCR = Mapping[str, frozenset]


@dataclass(frozen=True, eq=False)
class Environment:
    n_agents: int
    outcomes: tuple[str, ...]
    states: tuple[str, ...]
    ranks: np.ndarray  # (state, agent, outcome)

    def __post_init__(self):
        outcomes = tuple(str(a) for a in self.outcomes)
        states = tuple(str(s) for s in self.states)
        object.__setattr__(self, "outcomes", outcomes)
        object.__setattr__(self, "states", states)
        if self.n_agents < 1:
            raise ValueError("need at least one agent")
        if not outcomes or not states:
            raise ValueError("outcome and state sets must be nonempty")
        if len(set(outcomes)) != len(outcomes) or len(set(states)) != len(states):
            raise ValueError("outcome and state labels must be unique")
        ranks = np.array(self.ranks, dtype=np.int64)
        want = (len(states), self.n_agents, len(outcomes))
        if ranks.shape != want:
            raise ValueError(f"rank table has shape {ranks.shape}, expected {want}")
        ranks.setflags(write=False)
        object.__setattr__(self, "ranks", ranks)

    def state_index(self, state: str) -> int:
        try:
            return self.states.index(state)
        except ValueError:
            raise KeyError(f"unknown state {state!r}") from None

    def outcome_index(self, outcome: str) -> int:
        try:
            return self.outcomes.index(outcome)
        except ValueError:
            raise KeyError(f"unknown outcome {outcome!r}") from None

    def utility(self, state: str, agent: int, outcome: str) -> int:
        return int(self.ranks[self.state_index(state), agent, self.outcome_index(outcome)])

    def weakly_prefers(self, state: str, agent: int, a: str, b: str) -> bool:
        return self.utility(state, agent, a) >= self.utility(state, agent, b)

    def sorted_outcomes(self, outcomes: Iterable[str]) -> list[str]:
        return sorted(outcomes, key=self.outcome_index)

    @classmethod
    def from_dict(cls, data: dict) -> "Environment":
        outcomes = list(data["outcomes"])
        states = list(data["states"])
        n = int(data["agents"])
        prefs = data["preferences"]
        ranks = np.zeros((len(states), n, len(outcomes)), dtype=np.int64)
        for s, state in enumerate(states):
            table = prefs[state]
            if len(table) != n:
                raise ValueError(f"state {state!r}: {len(table)} rank tables for {n} agents")
            for i, row in enumerate(table):
                if set(row) != set(outcomes):
                    raise ValueError(f"state {state!r}, agent {i}: ranking must cover exactly {outcomes}")
                ranks[s, i] = [row[a] for a in outcomes]
        return cls(n, tuple(outcomes), tuple(states), ranks)

    def to_dict(self) -> dict:
        return {
            "agents": self.n_agents,
            "outcomes": list(self.outcomes),
            "states": list(self.states),
            "preferences": {
                st: [{a: int(self.ranks[s, i, k]) for k, a in enumerate(self.outcomes)}
                     for i in range(self.n_agents)]
                for s, st in enumerate(self.states)
            },
        }


def make_scr(env: Environment, mapping: Mapping[str, Iterable[str]]) -> dict[str, frozenset]:
    """Validate a state -> outcome-set mapping against ``env``."""
    if set(mapping) != set(env.states):
        raise ValueError(f"SCR must be defined on exactly the states {env.states}")
    scr = {}
    for state in env.states:
        chosen = frozenset(str(a) for a in mapping[state])
        if not chosen:
            raise ValueError(f"SCR is empty at state {state!r}")
        unknown = chosen - set(env.outcomes)
        if unknown:
            raise ValueError(f"SCR at {state!r} names unknown outcomes {sorted(unknown)}")
        scr[state] = chosen
    return scr


def load_environment(path) -> tuple[Environment, dict[str, frozenset] | None]:
    """Read an environment file; the ``scr`` block is optional."""
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    return environment_from_dict(data)


def environment_from_dict(data: dict) -> tuple[Environment, dict[str, frozenset] | None]:
    env = Environment.from_dict(data)
    scr = make_scr(env, data["scr"]) if "scr" in data else None
    return env, scr


def environment_to_dict(env: Environment, scr: SCR | None = None) -> dict:
    data = env.to_dict()
    if scr is not None:
        data["scr"] = {st: env.sorted_outcomes(scr[st]) for st in env.states}
    return data


# -- Maskin conditions ------------------------------------------------------


class Check(NamedTuple):
    ok: bool
    witness: tuple | None = None

    def __bool__(self):
        return self.ok


def preserves_lower_contour(env: Environment, agent: int, a: str, state: str, new_state: str) -> bool:
    """Everything ``agent`` ranked weakly below ``a`` at ``state`` stays weakly below at ``new_state``."""
    s, t, k = env.state_index(state), env.state_index(new_state), env.outcome_index(a)
    below = env.ranks[s, agent] <= env.ranks[s, agent, k]
    return bool(np.all(env.ranks[t, agent, below] <= env.ranks[t, agent, k]))


def is_monotonic(scr: SCR, env: Environment) -> Check:
    """Maskin monotonicity, with the first violating ``(state, new_state, outcome)`` on failure."""
    for state, new_state in itertools.product(env.states, repeat=2):
        for a in env.sorted_outcomes(scr[state]):
            if a in scr[new_state]:
                continue
            if all(preserves_lower_contour(env, i, a, state, new_state) for i in range(env.n_agents)):
                return Check(False, (state, new_state, a))
    return Check(True)


def satisfies_no_veto(scr: SCR, env: Environment) -> Check:
    """An outcome weakly top-ranked by at least n-1 agents must be chosen."""
    n = env.n_agents
    for s, state in enumerate(env.states):
        top = env.ranks[s] == env.ranks[s].max(axis=1, keepdims=True)
        for k, a in enumerate(env.outcomes):
            if top[:, k].sum() >= n - 1 and a not in scr[state]:
                return Check(False, (state, a))
    return Check(True)


def pareto_inefficiency(scr: SCR, env: Environment) -> Check:
    """Fails with ``(state, chosen, better)`` if some chosen outcome is strictly worse for every agent."""
    for s, state in enumerate(env.states):
        for a in env.sorted_outcomes(scr[state]):
            ka = env.outcome_index(a)
            for kb, b in enumerate(env.outcomes):
                if np.all(env.ranks[s, :, kb] > env.ranks[s, :, ka]):
                    return Check(False, (state, a, b))
    return Check(True)


# -- mechanisms ---------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Mechanism:
    """Finite message spaces and a tabulated outcome function.

    ``table[m_1, ..., m_n]`` is the index (into ``outcomes``) of the outcome
    chosen when agent ``i`` sends message ``message_spaces[i][m_i]``.
    """

    message_spaces: tuple[tuple[Hashable, ...], ...]
    outcomes: tuple[str, ...]
    table: np.ndarray
    rules: np.ndarray | None = None  # which canonical rule fired, if applicable

    def __post_init__(self):
        spaces = tuple(tuple(m) for m in self.message_spaces)
        object.__setattr__(self, "message_spaces", spaces)
        table = np.asarray(self.table, dtype=np.int64)
        shape = tuple(len(m) for m in spaces)
        if table.shape != shape:
            raise ValueError(f"outcome table has shape {table.shape}, expected {shape}")
        if table.size and (table.min() < 0 or table.max() >= len(self.outcomes)):
            raise ValueError("outcome table refers to outcomes outside the outcome set")
        table.setflags(write=False)
        object.__setattr__(self, "table", table)

    @property
    def n_agents(self) -> int:
        return len(self.message_spaces)

    @property
    def size(self) -> int:
        return int(self.table.size)

    def index(self, messages: Sequence[Hashable]) -> tuple[int, ...]:
        return tuple(space.index(m) for space, m in zip(self.message_spaces, messages))

    def outcome(self, messages: Sequence[Hashable]) -> str:
        return self.outcomes[self.table[self.index(messages)]]

    def messages(self, index: Sequence[int]) -> tuple:
        return tuple(space[k] for space, k in zip(self.message_spaces, index))

    @classmethod
    def from_function(cls, message_spaces, outcomes, g: Callable[[tuple], str]) -> "Mechanism":
        spaces = tuple(tuple(m) for m in message_spaces)
        outcomes = tuple(outcomes)
        size = int(np.prod([len(m) for m in spaces]))
        if size > MAX_PROFILES:
            raise ValueError(f"{size} message profiles exceed the enumeration guard {MAX_PROFILES}")
        table = np.empty(tuple(len(m) for m in spaces), dtype=np.int64)
        for idx in np.ndindex(*table.shape):
            table[idx] = outcomes.index(g(tuple(sp[k] for sp, k in zip(spaces, idx))))
        return cls(spaces, outcomes, table)

    @classmethod
    def constant(cls, message_spaces, outcomes, outcome: str) -> "Mechanism":
        spaces = tuple(tuple(m) for m in message_spaces)
        table = np.full(tuple(len(m) for m in spaces), tuple(outcomes).index(outcome))
        return cls(spaces, tuple(outcomes), table)


class Message(NamedTuple):
    state: str
    outcome: str
    integer: int


def canonical_outcome(messages: Sequence[Message], scr: SCR, env: Environment) -> tuple[str, int]:
    """Outcome and rule number of the integer-game mechanism for one message profile.

    1. everyone announces the same (state, a) with a in F(state): a.
    2. all but agent j announce (state, a) with a in F(state) and j announces
       (state', a'): a' if j weakly prefers a to a' at state, else a.
    3. otherwise the agent with the highest integer (lowest index on ties)
       gets the outcome they announced.
    """
    n = len(messages)
    claims = [(m.state, m.outcome) for m in messages]
    first = claims[0]
    if all(c == first for c in claims) and first[1] in scr[first[0]]:
        return first[1], 1
    for j in range(n):
        others = claims[:j] + claims[j + 1:]
        ref = others[0]
        if claims[j] != ref and all(c == ref for c in others) and ref[1] in scr[ref[0]]:
            a_dev = claims[j][1]
            if env.weakly_prefers(ref[0], j, ref[1], a_dev):
                return a_dev, 2
            return ref[1], 2
    winner = max(range(n), key=lambda i: (messages[i].integer, -i))
    return messages[winner].outcome, 3


def canonical_mechanism(scr: SCR, env: Environment, integer_cap: int = 2) -> Mechanism:
    """Maskin-style mechanism with messages (state, outcome, integer in 0..K).

    Unbounded integers are replaced by a cap ``K``; whether that cap creates
    spurious equilibria must be checked on the environment at hand (see
    ``implements``).
    """
    if env.n_agents < 3:
        raise ValueError(
            f"the canonical construction needs at least 3 agents, got {env.n_agents}: "
            "monotonicity plus no-veto only guarantees implementation for n >= 3"
        )
    if integer_cap < 1:
        raise ValueError("integer cap K must be at least 1")
    space = tuple(Message(s, a, k) for s in env.states for a in env.outcomes
                  for k in range(integer_cap + 1))
    spaces = (space,) * env.n_agents
    shape = (len(space),) * env.n_agents
    if int(np.prod(shape)) > MAX_PROFILES:
        raise ValueError(f"{int(np.prod(shape))} message profiles exceed the enumeration guard")
    table = np.empty(shape, dtype=np.int64)
    rules = np.empty(shape, dtype=np.int8)
    cache: dict = {}
    for idx in np.ndindex(*shape):
        msgs = tuple(space[k] for k in idx)
        out, rule = canonical_outcome(msgs, scr, env)
        table[idx] = cache.setdefault(out, env.outcome_index(out))
        rules[idx] = rule
    return Mechanism(spaces, env.outcomes, table, rules)


# -- equilibria and implementation -------------------------------------------


def _utilities(mech: Mechanism, env: Environment, state: str) -> np.ndarray:
    if tuple(mech.outcomes) != env.outcomes:
        order = [env.outcome_index(a) for a in mech.outcomes]
    else:
        order = list(range(len(env.outcomes)))
    s = env.state_index(state)
    return env.ranks[s][:, order]  # (agent, mechanism outcome index)


def nash_mask(mech: Mechanism, env: Environment, state: str) -> np.ndarray:
    """Boolean array over message profiles marking pure Nash equilibria at ``state``."""
    if mech.size > MAX_PROFILES:
        raise ValueError(f"{mech.size} message profiles exceed the enumeration guard {MAX_PROFILES}")
    if mech.n_agents != env.n_agents:
        raise ValueError("mechanism and environment disagree on the number of agents")
    util = _utilities(mech, env, state)
    mask = np.ones(mech.table.shape, dtype=bool)
    for i in range(mech.n_agents):
        u = util[i][mech.table]
        mask &= u >= u.max(axis=i, keepdims=True)
    return mask


def nash_equilibria(mech: Mechanism, env: Environment, state: str) -> list[tuple]:
    """All pure Nash message profiles at ``state``, in index order."""
    mask = nash_mask(mech, env, state)
    return [mech.messages(idx) for idx in zip(*np.nonzero(mask))]


class StateReport(NamedTuple):
    state: str
    target: frozenset
    achieved: frozenset
    n_equilibria: int

    @property
    def match(self) -> bool:
        return self.target == self.achieved


class ImplementationReport(NamedTuple):
    ok: bool
    rows: list[StateReport]

    def __bool__(self):
        return self.ok

    @property
    def failures(self) -> list[StateReport]:
        return [r for r in self.rows if not r.match]


def implements(scr: SCR, mech: Mechanism, env: Environment) -> ImplementationReport:
    """Equilibrium outcomes equal F(state) at every state."""
    rows = []
    for state in env.states:
        mask = nash_mask(mech, env, state)
        achieved = frozenset(mech.outcomes[k] for k in np.unique(mech.table[mask]))
        rows.append(StateReport(state, frozenset(scr[state]), achieved, int(mask.sum())))
    return ImplementationReport(all(r.match for r in rows), rows)


def equilibrium_rule_outcomes(mech: Mechanism, env: Environment, state: str, rule: int) -> frozenset:
    """Outcomes of equilibria that fall under a given canonical rule."""
    if mech.rules is None:
        raise ValueError("mechanism carries no rule table")
    mask = nash_mask(mech, env, state) & (mech.rules == rule)
    return frozenset(mech.outcomes[k] for k in np.unique(mech.table[mask]))


REPORT_HEADER = ["state", "scr_outcomes", "equilibrium_outcomes", "n_equilibria", "match"]


def write_report_csv(report: ImplementationReport, env: Environment, fh) -> None:
    w = csv.writer(fh, lineterminator="\r\n")
    w.writerow(REPORT_HEADER)
    for r in report.rows:
        w.writerow([
            r.state,
            ";".join(env.sorted_outcomes(r.target)),
            ";".join(env.sorted_outcomes(r.achieved)),
            r.n_equilibria,
            str(r.match).lower(),
        ])


def read_report_csv(fh) -> ImplementationReport:
    if isinstance(fh, str):
        fh = io.StringIO(fh)
    reader = csv.DictReader(fh)
    if reader.fieldnames != REPORT_HEADER:
        raise ValueError(f"unexpected report header {reader.fieldnames}")

    def split(text):
        return frozenset(x for x in text.split(";") if x)

    rows = [StateReport(r["state"], split(r["scr_outcomes"]), split(r["equilibrium_outcomes"]),
                        int(r["n_equilibria"])) for r in reader]
    return ImplementationReport(all(r.match for r in rows), rows)
