"""Finite normal-form games and their classical solution concepts.

A game stores one payoff tensor of shape ``(m_1, ..., m_n, n)``: the leading
axes index each player's strategy, the last axis holds the payoff vector.
Profiles are tuples of strategy labels; every function that returns a set of
profiles returns them as a list in lexicographic index order.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, NamedTuple, Sequence

import numpy as np

Profile = tuple[str, ...]

ATOL = 1e-12


class ShapeError(ValueError):
    """The game does not have the shape an operation requires."""


@dataclass(frozen=True, eq=False)
class NormalFormGame:
    strategies: tuple[tuple[str, ...], ...]
    payoffs: np.ndarray

    def __post_init__(self):
        strategies = tuple(tuple(str(s) for s in labels) for labels in self.strategies)
        object.__setattr__(self, "strategies", strategies)
        n = len(strategies)
        if n < 2:
            raise ValueError(f"a game needs at least 2 players, got {n}")
        for i, labels in enumerate(strategies):
            if not labels:
                raise ValueError(f"player {i} has an empty strategy set")
            if len(set(labels)) != len(labels):
                raise ValueError(f"player {i} has duplicate strategy labels: {labels}")
        payoffs = np.array(self.payoffs, dtype=float)
        expected = tuple(len(s) for s in strategies) + (n,)
        if payoffs.shape != expected:
            raise ValueError(f"payoff tensor has shape {payoffs.shape}, expected {expected}")
        if not np.all(np.isfinite(payoffs)):
            raise ValueError("payoffs must be finite")
        payoffs.setflags(write=False)
        object.__setattr__(self, "payoffs", payoffs)

    @property
    def n_players(self) -> int:
        return len(self.strategies)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.payoffs.shape[:-1]

    def index(self, profile: Sequence[str]) -> tuple[int, ...]:
        if len(profile) != self.n_players:
            raise ValueError(f"profile {tuple(profile)} has wrong length for {self.n_players} players")
        try:
            return tuple(labels.index(s) for labels, s in zip(self.strategies, profile))
        except ValueError:
            raise ValueError(f"profile {tuple(profile)} uses an unknown strategy") from None

    def label(self, index: Sequence[int]) -> Profile:
        return tuple(labels[k] for labels, k in zip(self.strategies, index))

    def payoff(self, profile: Sequence[str]) -> np.ndarray:
        return self.payoffs[self.index(profile)]

    def profiles(self) -> Iterator[Profile]:
        for idx in np.ndindex(*self.shape):
            yield self.label(idx)

    def __repr__(self):
        return f"NormalFormGame(strategies={self.strategies!r})"

    # -- constructors -------------------------------------------------------

    @classmethod
    def from_rows(cls, strategies, rows) -> "NormalFormGame":
        """Build from payoff vectors listed row-major over profiles."""
        strategies = tuple(tuple(s) for s in strategies)
        shape = tuple(len(s) for s in strategies)
        rows = np.asarray(rows, dtype=float)
        n_profiles = int(np.prod(shape))
        if rows.shape != (n_profiles, len(strategies)):
            raise ValueError(
                f"expected {n_profiles} payoff rows of length {len(strategies)}, got shape {rows.shape}"
            )
        return cls(strategies, rows.reshape(shape + (len(strategies),)))

    @classmethod
    def symmetric(cls, n: int, cooperate: Sequence[float], defect: Sequence[float],
                  labels: tuple[str, str] = ("C", "D")) -> "NormalFormGame":
        """Symmetric n-player C/D game.

        ``cooperate[k]`` is the payoff to a cooperator when ``k`` of the other
        ``n - 1`` players cooperate; ``defect[k]`` likewise for a defector.
        """
        cooperate = np.asarray(cooperate, dtype=float)
        defect = np.asarray(defect, dtype=float)
        if cooperate.shape != (n,) or defect.shape != (n,):
            raise ValueError(f"need {n} cooperate and {n} defect payoffs (0..{n - 1} other cooperators)")
        payoffs = np.empty((2,) * n + (n,))
        for bits in itertools.product((0, 1), repeat=n):
            n_coop = bits.count(0)
            for i, b in enumerate(bits):
                others = n_coop - (b == 0)
                payoffs[bits + (i,)] = defect[others] if b else cooperate[others]
        return cls((labels,) * n, payoffs)

    # -- serialization ------------------------------------------------------

    @classmethod
    def from_dict(cls, data: dict) -> "NormalFormGame":
        strategies = data["strategies"]
        players = data.get("players", len(strategies))
        if players != len(strategies):
            raise ValueError(f"'players' is {players} but {len(strategies)} strategy lists given")
        return cls.from_rows(strategies, data["payoffs"])

    def to_dict(self) -> dict:
        rows = self.payoffs.reshape(-1, self.n_players)
        return {
            "players": self.n_players,
            "strategies": [list(s) for s in self.strategies],
            "payoffs": [[_plain(v) for v in row] for row in rows],
        }


def _plain(v: float):
    return int(v) if float(v).is_integer() else float(v)


def load_game(path) -> NormalFormGame:
    with open(path, encoding="utf-8") as fh:
        return NormalFormGame.from_dict(json.load(fh))


def save_game(game: NormalFormGame, path) -> None:
    Path(path).write_text(json.dumps(game.to_dict(), indent=2) + "\n", encoding="utf-8")


def prisoners_dilemma(T=5.0, R=3.0, P=1.0, S=0.0) -> NormalFormGame:
    """Two-player PD with labels C/D; the defaults are the textbook 5/3/1/0 table."""
    return NormalFormGame.from_rows(
        [("C", "D"), ("C", "D")],
        [[R, R], [S, T], [T, S], [P, P]],
    )


# -- solution concepts ------------------------------------------------------


def _no_profitable_deviation(game: NormalFormGame, atol: float) -> np.ndarray:
    stable = np.ones(game.shape, dtype=bool)
    for i in range(game.n_players):
        u = game.payoffs[..., i]
        stable &= u >= u.max(axis=i, keepdims=True) - atol
    return stable


def find_pure_nash(game: NormalFormGame, atol: float = ATOL) -> list[Profile]:
    """Profiles where no player has a strictly profitable unilateral deviation."""
    mask = _no_profitable_deviation(game, atol)
    return [game.label(idx) for idx in zip(*np.nonzero(mask))]


class Dominance(NamedTuple):
    strategy: str
    strict: bool


def _dominates(u: np.ndarray, s: int, t: int, atol: float) -> tuple[bool, bool]:
    """(weakly dominates, strictly dominates) of row ``s`` over row ``t``."""
    diff = u[s] - u[t]
    weak = bool(np.all(diff >= -atol) and np.any(diff > atol))
    return weak, bool(np.all(diff > atol))


def dominant_strategies(game: NormalFormGame, weak: bool = False,
                        atol: float = ATOL) -> list[Dominance | None]:
    """Per-player dominant strategy, or None.

    By default only strictly dominant strategies are reported. With
    ``weak=True`` a strategy that weakly dominates every alternative is
    reported too, with ``strict=False`` unless the dominance is strict.
    """
    result: list[Dominance | None] = []
    for i in range(game.n_players):
        # rows: own strategy, columns: flattened opponent profiles
        u = np.moveaxis(game.payoffs[..., i], i, 0).reshape(game.shape[i], -1)
        found = None
        for s in range(game.shape[i]):
            rel = [_dominates(u, s, t, atol) for t in range(game.shape[i]) if t != s]
            if not rel:
                break
            if all(st for _, st in rel):
                found = Dominance(game.strategies[i][s], True)
                break
            if weak and all(w for w, _ in rel):
                found = Dominance(game.strategies[i][s], False)
                break
        result.append(found)
    return result


def pareto_optimal_profiles(game: NormalFormGame, atol: float = ATOL) -> list[Profile]:
    rows = game.payoffs.reshape(-1, game.n_players)
    # dominated[p] if some q is >= everywhere and > somewhere
    ge = np.all(rows[:, None, :] >= rows[None, :, :] - atol, axis=2)
    gt = np.any(rows[:, None, :] > rows[None, :, :] + atol, axis=2)
    dominated = np.any(ge & gt, axis=0)
    return [game.label(np.unravel_index(k, game.shape)) for k in np.flatnonzero(~dominated)]


def pd_parameters(game: NormalFormGame, atol: float = ATOL) -> dict[str, float]:
    """Temptation, reward, punishment and sucker payoffs of a symmetric 2x2 game.

    Strategy index 0 is read as C and index 1 as D.
    """
    if game.shape != (2, 2):
        raise ShapeError(f"expected a 2-player 2x2 game, got shape {game.shape}")
    u1, u2 = game.payoffs[..., 0], game.payoffs[..., 1]
    if not np.allclose(u1, u2.T, rtol=0.0, atol=atol):
        raise ShapeError("game is not symmetric: u1(a, b) != u2(b, a)")
    return {"T": float(u1[1, 0]), "R": float(u1[0, 0]), "P": float(u1[1, 1]), "S": float(u1[0, 1])}


def is_prisoners_dilemma(game: NormalFormGame, require_iterated: bool = False,
                         atol: float = ATOL) -> bool:
    """T > R > P > S; ``require_iterated`` also demands 2R > T + S."""
    p = pd_parameters(game, atol)
    T, R, P, S = p["T"], p["R"], p["P"], p["S"]
    ok = T > R + atol and R > P + atol and P > S + atol
    if require_iterated:
        ok = ok and 2 * R > T + S + atol
    return ok
