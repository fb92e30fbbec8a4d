"""Quantized C/D games: entangle, play local unitaries, disentangle, measure.

The final state for a profile ``(U_1, ..., U_n)`` is::

    |psi_f> = J(gamma)^dagger (U_1 (x) ... (x) U_n) J(gamma) |0...0>

and player ``i`` receives ``sum_b |<b|psi_f>|^2 * payoff_i(b)`` where ``b``
runs over the classical C/D profiles of the base game.

Equilibrium statements here are always relative to a finite strategy grid
and an absolute tolerance ``epsilon``.
"""
from __future__ import annotations

import csv
import enum
import io
import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .game import NormalFormGame, prisoners_dilemma
from .qsim import (
    COOPERATE,
    DEFECT,
    EWLStrategy,
    SU2Strategy,
    basis_labels,
    entangler,
    kron_all,
    strategy_unitary,
)

EPSILON = 1e-9
TIE_TOL = 1e-12


class StrategySpace(str, enum.Enum):
    CLASSICAL = "classical"
    TWO_PARAMETER = "two_parameter"
    FULL_SU2 = "full_su2"


DEFAULT_RESOLUTION = {
    StrategySpace.CLASSICAL: (33,),
    StrategySpace.TWO_PARAMETER: (33, 17),
    StrategySpace.FULL_SU2: (33, 17, 17),
}


@dataclass(frozen=True)
class QuantumGameConfig:
    base_game: NormalFormGame = field(default_factory=prisoners_dilemma)
    gamma: float = math.pi / 2
    strategy_space: StrategySpace = StrategySpace.TWO_PARAMETER

    def __post_init__(self):
        object.__setattr__(self, "strategy_space", StrategySpace(self.strategy_space))
        if any(len(s) != 2 for s in self.base_game.strategies):
            raise ValueError("the quantized game needs exactly 2 strategies (C, D) per player")
        if not 0.0 <= self.gamma <= math.pi / 2 + 1e-12:
            raise ValueError(f"gamma={self.gamma} outside [0, pi/2]")

    @property
    def n_players(self) -> int:
        return self.base_game.n_players

    def with_gamma(self, gamma: float) -> "QuantumGameConfig":
        return QuantumGameConfig(self.base_game, gamma, self.strategy_space)


def quantum_strategy(n_players: int = 2) -> EWLStrategy:
    """The phase strategy U(0, pi/n) that maps all-Q to all-C at full entanglement.

    For two players this is Q = diag(i, -i).
    """
    return EWLStrategy(0.0, math.pi / n_players)


def named_strategy(name: str, n_players: int = 2) -> EWLStrategy:
    try:
        return {"C": COOPERATE, "D": DEFECT}[name.upper()]
    except KeyError:
        if name.upper() == "Q":
            return quantum_strategy(n_players)
        raise ValueError(f"unknown strategy name {name!r}; expected C, D or Q") from None


def parse_profile(text: str) -> tuple[EWLStrategy, ...]:
    """``"QD"`` -> (Q, D); one letter per player."""
    text = text.strip()
    if len(text) < 2:
        raise ValueError(f"profile {text!r} needs one letter per player (at least 2)")
    return tuple(named_strategy(c, len(text)) for c in text)


def _coerce(space: StrategySpace, s) -> np.ndarray:
    if isinstance(s, np.ndarray):
        raise TypeError("pass strategies as EWLStrategy/SU2Strategy, not raw matrices")
    if space is StrategySpace.FULL_SU2:
        return strategy_unitary(s if isinstance(s, SU2Strategy) else SU2Strategy(*s))
    if isinstance(s, SU2Strategy):
        if abs(s.alpha) > 1e-12:
            raise ValueError(f"{s} is outside the {space.value} strategy space")
        s = EWLStrategy(s.theta, s.phi)
    s = EWLStrategy(*s)
    if space is StrategySpace.CLASSICAL and abs(s.phi) > 1e-12:
        raise ValueError(f"{s} has a phase; the classical space only allows phi = 0")
    return strategy_unitary(s)


class PlayResult(NamedTuple):
    distribution: np.ndarray
    payoffs: np.ndarray

    def labelled(self) -> dict[str, float]:
        n = int(self.distribution.size).bit_length() - 1
        return dict(zip(basis_labels(n), self.distribution.tolist()))


def final_state(config: QuantumGameConfig, profile: Sequence) -> np.ndarray:
    n = config.n_players
    if len(profile) != n:
        raise ValueError(f"profile has {len(profile)} strategies for {n} players")
    us = [_coerce(config.strategy_space, s) for s in profile]
    j = entangler(config.gamma, n)
    psi = j[:, 0]  # J |0...0>
    psi = kron_all(us) @ psi
    return j.conj().T @ psi


def _payoff_rows(config: QuantumGameConfig) -> np.ndarray:
    # row b <-> basis index b, because both are row-major with player 0 first
    return config.base_game.payoffs.reshape(-1, config.n_players)


def play(config: QuantumGameConfig, profile: Sequence) -> PlayResult:
    psi = final_state(config, profile)
    p = np.abs(psi) ** 2
    if abs(p.sum() - 1.0) > 1e-9:
        raise RuntimeError(f"final state lost normalization: {p.sum()!r}")
    return PlayResult(p, p @ _payoff_rows(config))


# -- grids ------------------------------------------------------------------


def _resolution(space: StrategySpace, resolution) -> tuple[int, ...]:
    if resolution is None:
        return DEFAULT_RESOLUTION[space]
    if isinstance(resolution, int):
        resolution = (resolution,) * len(DEFAULT_RESOLUTION[space])
    resolution = tuple(int(r) for r in resolution)
    if len(resolution) != len(DEFAULT_RESOLUTION[space]):
        raise ValueError(f"{space.value} grid needs {len(DEFAULT_RESOLUTION[space])} resolutions, got {resolution}")
    if min(resolution) < 2:
        raise ValueError("grid resolution must be at least 2 points per parameter")
    return resolution


def strategy_grid(space: StrategySpace | str, resolution=None) -> list:
    """Grid points in lexicographic (theta, phi[, alpha]) order.

    theta spans [0, pi]; phi spans [0, pi/2] in the two-parameter space and
    [-pi, pi] in full SU(2), as does alpha.
    """
    space = StrategySpace(space)
    res = _resolution(space, resolution)
    thetas = np.linspace(0.0, math.pi, res[0])
    if space is StrategySpace.CLASSICAL:
        return [EWLStrategy(float(t), 0.0) for t in thetas]
    if space is StrategySpace.TWO_PARAMETER:
        phis = np.linspace(0.0, math.pi / 2, res[1])
        return [EWLStrategy(float(t), float(p)) for t, p in itertools.product(thetas, phis)]
    phis = np.linspace(-math.pi, math.pi, res[1])
    alphas = np.linspace(-math.pi, math.pi, res[2])
    return [SU2Strategy(float(t), float(p), float(a)) for t, p, a in itertools.product(thetas, phis, alphas)]


def _grid_unitaries(grid) -> np.ndarray:
    t = np.array([s.theta for s in grid])
    p = np.array([s.phi for s in grid])
    a = np.array([getattr(s, "alpha", 0.0) for s in grid])
    c, s = np.cos(t / 2), np.sin(t / 2)
    out = np.empty((len(grid), 2, 2), dtype=complex)
    out[:, 0, 0] = np.exp(1j * p) * c
    out[:, 0, 1] = np.exp(1j * a) * s
    out[:, 1, 0] = -np.exp(-1j * a) * s
    out[:, 1, 1] = np.exp(-1j * p) * c
    return out


def deviation_payoffs(config: QuantumGameConfig, profile: Sequence, player: int, grid) -> np.ndarray:
    """Payoff to ``player`` for each grid strategy, others held at ``profile``.

    The final state is linear in the deviator's 2x2 matrix, so it is built
    from four basis runs (one per matrix unit) and contracted against the
    whole grid at once.
    """
    n = config.n_players
    us = [_coerce(config.strategy_space, s) for s in profile]
    j = entangler(config.gamma, n)
    jd = j.conj().T
    psi0 = j[:, 0]
    units = np.zeros((2, 2, 2 ** n), dtype=complex)
    for a, b in itertools.product(range(2), repeat=2):
        e = np.zeros((2, 2))
        e[a, b] = 1.0
        ops = list(us)
        ops[player] = e
        units[a, b] = jd @ (kron_all(ops) @ psi0)
    finals = np.einsum("mab,abk->mk", _grid_unitaries(grid), units)
    probs = np.abs(finals) ** 2
    return probs @ _payoff_rows(config)[:, player]


def best_response(config: QuantumGameConfig, opponent_strategies: Sequence, player: int = 0,
                  grid_resolution=None):
    """Best grid strategy for ``player`` against the others' fixed strategies.

    ``opponent_strategies`` lists the other players in order. Ties go to the
    first grid point in lexicographic order. The returned payoff is recomputed
    with ``play`` on the chosen point.
    """
    others = list(opponent_strategies)
    if len(others) != config.n_players - 1:
        raise ValueError(f"need {config.n_players - 1} opponent strategies, got {len(others)}")
    grid = strategy_grid(config.strategy_space, grid_resolution)
    profile = others[:player] + [grid[0]] + others[player:]
    values = deviation_payoffs(config, profile, player, grid)
    k = int(np.flatnonzero(values >= values.max() - TIE_TOL)[0])
    profile[player] = grid[k]
    return grid[k], float(play(config, profile).payoffs[player])


class Deviation(NamedTuple):
    player: int
    strategy: object
    payoff: float
    gain: float


class NashCheck(NamedTuple):
    is_nash: bool
    payoffs: np.ndarray
    best_deviations: list[Deviation]

    def __bool__(self):
        return self.is_nash

    @property
    def witness(self) -> Deviation | None:
        """Most profitable deviation, if it beats the profile by more than epsilon."""
        if self.is_nash:
            return None
        return max(self.best_deviations, key=lambda d: d.gain)


def is_nash_on_grid(config: QuantumGameConfig, profile: Sequence, grid_resolution=None,
                    epsilon: float = EPSILON) -> NashCheck:
    """No player gains more than ``epsilon`` by switching to any grid strategy."""
    profile = list(profile)
    base = play(config, profile).payoffs
    grid = strategy_grid(config.strategy_space, grid_resolution)
    devs = []
    for i in range(config.n_players):
        values = deviation_payoffs(config, profile, i, grid)
        k = int(np.argmax(values))
        devs.append(Deviation(i, grid[k], float(values[k]), float(values[k] - base[i])))
    return NashCheck(all(d.gain <= epsilon for d in devs), base, devs)


class DominanceFinding(NamedTuple):
    is_dominant: bool
    counterexample: object | None  # opponent grid strategy against which it is not a best response
    shortfall: float


def dominance_on_grid(config: QuantumGameConfig, strategy, grid_resolution=None,
                      epsilon: float = EPSILON) -> DominanceFinding:
    """Is ``strategy`` a best response for player 0 against every symmetric opponent grid point?

    Two-player games only. This is a diagnostic: equilibrium claims in this
    package are made with ``is_nash_on_grid``.
    """
    if config.n_players != 2:
        raise ValueError("dominance_on_grid is implemented for two players")
    grid = strategy_grid(config.strategy_space, grid_resolution)
    worst, witness = 0.0, None
    for opp in grid:
        values = deviation_payoffs(config, [strategy, opp], 0, grid)
        own = play(config, [strategy, opp]).payoffs[0]
        gap = float(values.max() - own)
        if gap > worst:
            worst, witness = gap, opp
    return DominanceFinding(worst <= epsilon, witness if worst > epsilon else None, worst)


# -- gamma sweeps -------------------------------------------------------------


class SweepRow(NamedTuple):
    gamma: float
    payoffs: tuple[float, ...]
    is_nash: bool


def gamma_samples(steps: int) -> list[float]:
    if steps < 2:
        raise ValueError("a sweep needs at least 2 gamma samples")
    return [float(g) for g in np.linspace(0.0, math.pi / 2, steps)]


def gamma_sweep(config: QuantumGameConfig, profile_family, gammas, grid_resolution=None,
                epsilon: float = EPSILON, workers: int | None = None) -> list[SweepRow]:
    """Payoffs and grid-Nash flag of a profile at each sampled gamma.

    ``profile_family`` is a fixed profile or a callable ``gamma -> profile``.
    ``gammas`` is a sequence of values or an integer count of evenly spaced
    samples over [0, pi/2]. Rows come back sorted by gamma.
    """
    if isinstance(gammas, int):
        gammas = gamma_samples(gammas)
    gammas = sorted(set(float(g) for g in gammas))
    if len(gammas) < 2:
        raise ValueError("a sweep needs at least 2 distinct gamma samples")
    family: Callable = profile_family if callable(profile_family) else (lambda _g: profile_family)

    def row(g: float) -> SweepRow:
        cfg = config.with_gamma(g)
        check = is_nash_on_grid(cfg, family(g), grid_resolution, epsilon)
        return SweepRow(g, tuple(float(x) for x in check.payoffs), check.is_nash)

    if workers and workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            return list(pool.map(row, gammas))
    return [row(g) for g in gammas]


def sweep_header(n_players: int) -> list[str]:
    return ["gamma"] + [f"payoff_{i + 1}" for i in range(n_players)] + ["is_nash"]


def write_sweep_csv(rows: Sequence[SweepRow], fh) -> None:
    if not rows:
        raise ValueError("nothing to write")
    w = csv.writer(fh, lineterminator="\r\n")
    w.writerow(sweep_header(len(rows[0].payoffs)))
    for r in rows:
        w.writerow([repr(r.gamma)] + [repr(x) for x in r.payoffs] + [str(r.is_nash).lower()])


def read_sweep_csv(fh) -> list[SweepRow]:
    if isinstance(fh, str):
        fh = io.StringIO(fh)
    reader = csv.reader(fh)
    header = next(reader)
    if header[0] != "gamma" or header[-1] != "is_nash":
        raise ValueError(f"unexpected sweep header {header}")
    rows = []
    for rec in reader:
        if not rec:
            continue
        rows.append(SweepRow(float(rec[0]), tuple(float(x) for x in rec[1:-1]), rec[-1] == "true"))
    return rows
