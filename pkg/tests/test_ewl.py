import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import classical_mixture_payoffs, ewl_unitary, pipeline_payoffs
from qdilemma.ewl import (
    QuantumGameConfig,
    StrategySpace,
    best_response,
    dominance_on_grid,
    gamma_sweep,
    is_nash_on_grid,
    parse_profile,
    play,
    quantum_strategy,
    read_sweep_csv,
    strategy_grid,
    write_sweep_csv,
)
from qdilemma.game import NormalFormGame, prisoners_dilemma
from qdilemma.qsim import COOPERATE, DEFECT, QUANTUM, EWLStrategy, SU2Strategy

HALF_PI = math.pi / 2
ROWS = prisoners_dilemma().payoffs.reshape(4, 2)


def cfg(gamma=HALF_PI, space="two_parameter", base=None):
    return QuantumGameConfig(base or prisoners_dilemma(), gamma, space)


def test_qq_at_full_entanglement():
    res = play(cfg(), [QUANTUM, QUANTUM])
    assert abs(res.distribution[0] - 1) <= 1e-9
    assert np.allclose(res.payoffs, [3, 3], atol=1e-9)


@pytest.mark.parametrize("gamma", [0.0, 0.3, 1.0, HALF_PI])
def test_dd_any_gamma(gamma):
    res = play(cfg(gamma), [DEFECT, DEFECT])
    assert abs(res.distribution[3] - 1) <= 1e-9
    assert np.allclose(res.payoffs, [1, 1], atol=1e-9)
    _, oracle = pipeline_payoffs([ewl_unitary(math.pi, 0)] * 2, gamma, ROWS)
    assert np.allclose(res.payoffs, oracle, atol=1e-9)


def test_q_against_d_punishes_defector():
    res = play(cfg(), [QUANTUM, DEFECT])
    assert res.labelled()["DC"] == pytest.approx(1, abs=1e-9)
    assert np.allclose(res.payoffs, [5, 0], atol=1e-9)
    p, oracle = pipeline_payoffs([ewl_unitary(0, HALF_PI), ewl_unitary(math.pi, 0)], HALF_PI, ROWS)
    assert np.allclose(res.distribution, p, atol=1e-10)


strategy = st.tuples(st.floats(0, math.pi), st.floats(0, HALF_PI))


@settings(max_examples=60, deadline=None)
@given(st.floats(0, HALF_PI), strategy, strategy)
def test_play_matches_pipeline_oracle(gamma, s1, s2):
    res = play(cfg(gamma), [EWLStrategy(*s1), EWLStrategy(*s2)])
    p, oracle = pipeline_payoffs([ewl_unitary(*s1), ewl_unitary(*s2)], gamma, ROWS)
    assert np.allclose(res.distribution, p, atol=1e-10)
    assert np.allclose(res.payoffs, oracle, atol=1e-9)
    assert abs(res.distribution.sum() - 1) <= 1e-9
    for i in range(2):
        assert ROWS[:, i].min() - 1e-9 <= res.payoffs[i] <= ROWS[:, i].max() + 1e-9


@settings(max_examples=60, deadline=None)
@given(strategy, strategy)
def test_gamma_zero_is_classical_mixture(s1, s2):
    res = play(cfg(0.0), [EWLStrategy(*s1), EWLStrategy(*s2)])
    oracle = classical_mixture_payoffs([ewl_unitary(*s1), ewl_unitary(*s2)], ROWS)
    assert np.allclose(res.payoffs, oracle, atol=1e-9)


@settings(max_examples=25, deadline=None)
@given(st.floats(0, HALF_PI), st.sampled_from(["CC", "CD", "DC", "DD"]))
def test_classical_embedding(gamma, name):
    res = play(cfg(gamma), parse_profile(name))
    assert np.allclose(res.payoffs, prisoners_dilemma().payoff(tuple(name)), atol=1e-9)


def test_classical_embedding_three_players():
    base = NormalFormGame.symmetric(3, [0, 1.5, 3], [1, 3, 5])
    for gamma in (0.2, 0.9, HALF_PI):
        for name in ("CCC", "CDC", "DDC", "DDD"):
            res = play(QuantumGameConfig(base, gamma), parse_profile(name))
            assert np.allclose(res.payoffs, base.payoff(tuple(name)), atol=1e-9)


def test_n_player_quantum_strategy():
    assert quantum_strategy(2) == QUANTUM
    base = NormalFormGame.symmetric(3, [0, 1.5, 3], [1, 3, 5])
    c = QuantumGameConfig(base, HALF_PI)
    assert np.allclose(play(c, [quantum_strategy(3)] * 3).payoffs, [3, 3, 3], atol=1e-9)
    # the two-player Q sends three entangled players to all-D
    assert np.allclose(play(c, [QUANTUM] * 3).payoffs, [1, 1, 1], atol=1e-9)


def test_strategy_space_restrictions():
    with pytest.raises(ValueError):
        play(cfg(space="classical"), [QUANTUM, DEFECT])
    with pytest.raises(ValueError):
        play(cfg(), [SU2Strategy(0, 0, 0.5), DEFECT])
    full = play(cfg(space="full_su2"), [QUANTUM, SU2Strategy(math.pi, 0, 0)])
    assert np.allclose(full.payoffs, [5, 0], atol=1e-9)


def test_config_validation():
    with pytest.raises(ValueError):
        QuantumGameConfig(prisoners_dilemma(), 2.0)
    three = NormalFormGame.from_rows([("a", "b", "c"), ("x", "y")], [[0, 0]] * 6)
    with pytest.raises(ValueError):
        QuantumGameConfig(three)
    with pytest.raises(ValueError):
        play(cfg(), [QUANTUM])


def test_grid_shapes_and_order():
    g = strategy_grid("two_parameter")
    assert len(g) == 33 * 17
    assert g[0] == EWLStrategy(0.0, 0.0)
    assert g[1].phi > 0 and g[1].theta == 0
    assert g == sorted(g)
    assert QUANTUM in g and DEFECT in g
    assert len(strategy_grid("full_su2", (5, 5, 5))) == 125
    with pytest.raises(ValueError):
        strategy_grid("two_parameter", (1, 5))


def oracle_best(gamma, opponent, base_rows=ROWS):
    best, arg = -np.inf, None
    for s in strategy_grid("two_parameter"):
        _, pay = pipeline_payoffs([ewl_unitary(*s), ewl_unitary(*opponent)], gamma, base_rows)
        if pay[0] > best + 1e-12:
            best, arg = pay[0], s
    return arg, best


def test_best_response_classical_against_defect():
    s, pay = best_response(cfg(0.0), [DEFECT])
    assert s == EWLStrategy(math.pi, 0.0)
    assert pay == pytest.approx(1, abs=1e-9)
    arg, val = oracle_best(0.0, DEFECT)
    assert s == arg and pay == pytest.approx(val, abs=1e-9)


def test_best_response_quantum_against_q():
    s, pay = best_response(cfg(), [QUANTUM])
    assert s == QUANTUM
    assert pay == pytest.approx(3, abs=1e-9)
    arg, val = oracle_best(HALF_PI, QUANTUM)
    assert s == arg and pay == pytest.approx(val, abs=1e-9)


def test_best_response_constant_game_takes_first_point():
    const = NormalFormGame.from_rows([("C", "D")] * 2, [[2, 2]] * 4)
    s, pay = best_response(cfg(base=const), [QUANTUM])
    assert s == EWLStrategy(0.0, 0.0)
    assert pay == pytest.approx(2)


def test_best_response_for_second_player_matches_play():
    s, pay = best_response(cfg(1.0), [EWLStrategy(0.7, 0.4)], player=1)
    assert pay == pytest.approx(play(cfg(1.0), [EWLStrategy(0.7, 0.4), s]).payoffs[1], abs=1e-12)


def test_nash_on_grid_claims():
    assert is_nash_on_grid(cfg(), [QUANTUM, QUANTUM]).is_nash
    dd = is_nash_on_grid(cfg(), [DEFECT, DEFECT])
    assert not dd
    assert dd.witness.strategy == QUANTUM and dd.witness.gain == pytest.approx(4)
    assert is_nash_on_grid(cfg(0.0), [DEFECT, DEFECT]).is_nash
    assert not is_nash_on_grid(cfg(0.0), [QUANTUM, QUANTUM]).is_nash


def test_nash_on_grid_matches_oracle_scan():
    for gamma, prof in ((HALF_PI, (DEFECT, DEFECT)), (HALF_PI, (QUANTUM, QUANTUM)), (0.6, (QUANTUM, DEFECT))):
        _, here = pipeline_payoffs([ewl_unitary(*s) for s in prof], gamma, ROWS)
        _, best0 = oracle_best(gamma, prof[1])
        assert is_nash_on_grid(cfg(gamma), prof).best_deviations[0].payoff == pytest.approx(best0, abs=1e-9)
        # symmetric game: player 2's best reply to s equals player 1's
        oracle_nash = bool(best0 <= here[0] + 1e-9 and oracle_best(gamma, prof[0])[1] <= here[1] + 1e-9)
        assert is_nash_on_grid(cfg(gamma), prof).is_nash == oracle_nash


def test_full_su2_breaks_qq():
    check = is_nash_on_grid(cfg(space="full_su2"), [QUANTUM, QUANTUM])
    assert not check.is_nash
    w = check.witness
    assert w.gain > 1e-9
    prof = [w.strategy, QUANTUM] if w.player == 0 else [QUANTUM, w.strategy]
    assert play(cfg(space="full_su2"), prof).payoffs[w.player] == pytest.approx(3 + w.gain, abs=1e-9)


def test_q_is_not_dominant_on_grid():
    finding = dominance_on_grid(cfg(), QUANTUM, (9, 5))
    assert not finding.is_dominant
    assert finding.counterexample is not None


def test_gamma_sweep_endpoints_and_order():
    rows = gamma_sweep(cfg(0.0), [QUANTUM, QUANTUM], 9)
    assert len(rows) == 9
    assert rows[0].gamma == 0.0 and rows[-1].gamma == pytest.approx(HALF_PI)
    assert all(a.gamma < b.gamma for a, b in zip(rows, rows[1:]))
    for r in (rows[0], rows[-1]):
        assert np.allclose(r.payoffs, [3, 3], atol=1e-9)
    assert not rows[0].is_nash and rows[-1].is_nash
    for r in rows:
        assert r.payoffs == pytest.approx(tuple(play(cfg(r.gamma), [QUANTUM, QUANTUM]).payoffs))
        assert r.is_nash == is_nash_on_grid(cfg(r.gamma), [QUANTUM, QUANTUM]).is_nash


def test_gamma_sweep_dd_constant():
    rows = gamma_sweep(cfg(0.0), [DEFECT, DEFECT], 5)
    for r in rows:
        assert np.allclose(r.payoffs, [1, 1], atol=1e-9)
        _, oracle = pipeline_payoffs([ewl_unitary(math.pi, 0)] * 2, r.gamma, ROWS)
        assert np.allclose(r.payoffs, oracle, atol=1e-9)


def test_gamma_sweep_family_and_workers():
    family = lambda g: [EWLStrategy(g, 0.0), QUANTUM]  # noqa: E731
    seq = gamma_sweep(cfg(0.0), family, [0.5, 0.1, 1.2, 0.1])
    par = gamma_sweep(cfg(0.0), family, [0.5, 0.1, 1.2], workers=3)
    assert [r.gamma for r in seq] == [0.1, 0.5, 1.2]
    assert seq == par
    with pytest.raises(ValueError):
        gamma_sweep(cfg(0.0), family, [0.3])


def test_sweep_csv_round_trip():
    rows = gamma_sweep(cfg(0.0), [QUANTUM, DEFECT], 4)
    buf = io.StringIO()
    write_sweep_csv(rows, buf)
    text = buf.getvalue()
    assert text.splitlines()[0] == "gamma,payoff_1,payoff_2,is_nash"
    assert read_sweep_csv(text) == rows
