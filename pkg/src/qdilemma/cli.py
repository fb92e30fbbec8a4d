"""Command-line entry point.

Exit status: 0 on success, 1 when the analysis itself fails (a check is
violated, or input data is inconsistent; the witness goes to stderr), 2 on
usage errors.
"""
from __future__ import annotations

import argparse
import math
import re
import sys
from pathlib import Path

from . import ewl, fixture_path, game, mechanism, qmech, typology
from .qsim import basis_labels


class DomainError(Exception):
    """Analysis ran but the answer is a failure; message carries the witness."""


def _fmt(x: float) -> str:
    x = float(x)
    if abs(x) < 5e-13:
        x = 0.0
    return f"{x:.10g}"


def _vec(v) -> str:
    return "(" + ", ".join(_fmt(x) for x in v) + ")"


def _profile(p) -> str:
    return "(" + ", ".join(p) + ")"


_ANGLE = re.compile(r"^\s*(?:(?P<num>[0-9.eE+-]+)\s*\*?\s*)?pi\s*(?:/\s*(?P<den>[0-9.eE+-]+))?\s*$")


def angle(text: str) -> float:
    """Parse ``0.3``, ``pi``, ``pi/2`` or ``0.5*pi``."""
    m = _ANGLE.match(text)
    if m:
        return float(m["num"] or 1.0) * math.pi / float(m["den"] or 1.0)
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an angle: {text!r}") from None


def grid_spec(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.replace("x", ",").split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must look like 33,17 or 33x17, got {text!r}") from None


def _open_out(path):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline=""), True


# -- classical ----------------------------------------------------------------


def cmd_classical_solve(args) -> int:
    g = game.load_game(args.file)
    out = sys.stdout
    out.write(f"players: {g.n_players}\n")
    for i, labels in enumerate(g.strategies):
        out.write(f"  player {i + 1} strategies: {', '.join(labels)}\n")
    out.write("pure Nash equilibria:\n")
    for p in game.find_pure_nash(g):
        out.write(f"  {_profile(p)}  payoffs {_vec(g.payoff(p))}\n")
    out.write("dominant strategies:\n")
    for i, d in enumerate(game.dominant_strategies(g, weak=args.weak)):
        text = "none" if d is None else f"{d.strategy} ({'strict' if d.strict else 'weak'})"
        out.write(f"  player {i + 1}: {text}\n")
    out.write("Pareto-optimal profiles:\n")
    for p in game.pareto_optimal_profiles(g):
        sym = "  [symmetric]" if len(set(p)) == 1 else ""
        out.write(f"  {_profile(p)}  payoffs {_vec(g.payoff(p))}{sym}\n")
    try:
        params = game.pd_parameters(g)
        verdict = "yes" if game.is_prisoners_dilemma(g, require_iterated=args.iterated) else "no"
        detail = ", ".join(f"{k}={_fmt(v)}" for k, v in params.items())
        out.write(f"Prisoners' Dilemma: {verdict} ({detail})\n")
    except game.ShapeError as exc:
        out.write(f"Prisoners' Dilemma: n/a ({exc})\n")
    return 0


def cmd_classify(args) -> int:
    try:
        proto = typology.GameProtocol(args.arbitrator, args.communication, args.binding)
    except ValueError as exc:
        raise DomainError(str(exc)) from None
    t = typology.classify(proto)
    verdict = typology.admits_quantum_extension(t)
    print(f"type: {t}")
    print(f"quantum extension admissible: {'yes' if verdict.admitted else 'no'}")
    print(f"reason: {verdict.reason}")
    return 0


# -- quantum --------------------------------------------------------------------


def _config(args, gamma=None) -> ewl.QuantumGameConfig:
    base = game.load_game(args.game) if args.game else game.prisoners_dilemma()
    return ewl.QuantumGameConfig(base, args.gamma if gamma is None else gamma, args.space)


def _profile_arg(args, n: int):
    prof = ewl.parse_profile(args.profile)
    if len(prof) != n:
        raise DomainError(f"profile {args.profile!r} has {len(prof)} letters for {n} players")
    return prof


def cmd_quantum_play(args) -> int:
    cfg = _config(args)
    prof = _profile_arg(args, cfg.n_players)
    res = ewl.play(cfg, prof)
    print(f"gamma: {_fmt(cfg.gamma)}  profile: {args.profile.upper()}")
    print("outcome distribution:")
    for label, p in zip(basis_labels(cfg.n_players), res.distribution):
        print(f"  {label}: {_fmt(p)}")
    print(f"expected payoffs: {_vec(res.payoffs)}")
    return 0


def cmd_quantum_sweep(args) -> int:
    cfg = _config(args, gamma=0.0)
    prof = _profile_arg(args, cfg.n_players)
    rows = ewl.gamma_sweep(cfg, prof, args.gamma_steps, args.grid, args.epsilon, workers=args.workers)
    fh, close = _open_out(args.out)
    try:
        ewl.write_sweep_csv(rows, fh)
    finally:
        if close:
            fh.close()
    return 0


def cmd_quantum_nash_check(args) -> int:
    cfg = _config(args)
    prof = _profile_arg(args, cfg.n_players)
    check = ewl.is_nash_on_grid(cfg, prof, args.grid, args.epsilon)
    print(f"profile {args.profile.upper()} at gamma {_fmt(cfg.gamma)} ({cfg.strategy_space.value}):"
          f" payoffs {_vec(check.payoffs)}")
    for d in check.best_deviations:
        print(f"  player {d.player + 1} best grid deviation {tuple(_fmt(x) for x in d.strategy)}"
              f" -> {_fmt(d.payoff)} (gain {_fmt(d.gain)})")
    print(f"nash on grid: {str(check.is_nash).lower()}")
    if not check.is_nash:
        w = check.witness
        raise DomainError(f"profitable deviation: player {w.player + 1} plays "
                          f"{tuple(_fmt(x) for x in w.strategy)} and gains {_fmt(w.gain)}")
    return 0


# -- mechanism design -------------------------------------------------------------


def _load_env(path):
    env, scr = mechanism.load_environment(path)
    if scr is None:
        raise DomainError(f"{path} has no 'scr' block")
    return env, scr


def cmd_mech_monotonic(args) -> int:
    env, scr = _load_env(args.file)
    check = mechanism.is_monotonic(scr, env)
    print(f"monotonic: {str(check.ok).lower()}")
    if not check:
        st, new, a = check.witness
        raise DomainError(f"monotonicity violated: {a!r} is chosen at {st!r}, no agent's ranking of it "
                          f"falls at {new!r}, yet it is not chosen at {new!r}")
    return 0


def cmd_mech_no_veto(args) -> int:
    env, scr = _load_env(args.file)
    check = mechanism.satisfies_no_veto(scr, env)
    print(f"no-veto: {str(check.ok).lower()}")
    if not check:
        st, a = check.witness
        raise DomainError(f"no-veto violated: {a!r} is top-ranked by at least n-1 agents at {st!r} "
                          "but not chosen")
    return 0


def cmd_mech_implement(args) -> int:
    env, scr = _load_env(args.file)
    mech = mechanism.canonical_mechanism(scr, env, args.integer_cap)
    report = mechanism.implements(scr, mech, env)
    print(f"implements: {str(report.ok).lower()}")
    print(f"{'state':<10} {'F(state)':<16} {'equilibrium outcomes':<22} {'#equilibria':>11}  match")
    for r in report.rows:
        print(f"{r.state:<10} {','.join(env.sorted_outcomes(r.target)):<16} "
              f"{','.join(env.sorted_outcomes(r.achieved)):<22} {r.n_equilibria:>11}  {str(r.match).lower()}")
    if args.report:
        with open(args.report, "w", encoding="utf-8", newline="") as fh:
            mechanism.write_report_csv(report, env, fh)
    if not report:
        bad = report.failures[0]
        raise DomainError(f"not implemented at state {bad.state!r}: equilibrium outcomes "
                          f"{sorted(bad.achieved)} != F = {sorted(bad.target)}")
    return 0


# -- quantum mechanism ------------------------------------------------------------


def cmd_qmech_run(args) -> int:
    s = qmech.load_scenario(args.scenario)
    if s.environment is None:
        raise DomainError("scenario has no linked environment/SCR")
    rep = qmech.breakage_report(s)
    q = rep.quantum
    print(f"gamma: {_fmt(s.gamma)}  agents: {s.n_agents}  condition: {s.lambda_name}")
    print(f"classical equilibrium (all-D) payoffs: {_vec(q.classical_payoffs)}")
    print(f"all-Q payoffs: {_vec(q.all_q_payoffs)}  nash on grid: {str(q.all_q_is_nash).lower()}"
          f"  Pareto-improves: {str(q.pareto_improves).lower()}")
    print(f"condition lambda: {str(rep.lambda_holds).lower()}")
    print(f"{'state':<10} {'classical':<12} {'collusive message':<22} {'quantum':<8} broken")
    for r in rep.rows:
        msg = "-" if r.collusive_message is None else f"({r.collusive_message.state},{r.collusive_message.outcome},0)"
        print(f"{r.state:<10} {','.join(s.environment.sorted_outcomes(r.classical_outcomes)):<12} "
              f"{msg:<22} {r.quantum_outcome or '-':<8} {str(r.broken).lower()}")
    print(f"verdict: {rep.text}")
    if args.out:
        records = qmech.sweep(s, args.gamma_steps)
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            qmech.write_sweep_csv(records, fh)
    return 0


# -- parser -------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qdilemma", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    cl = sub.add_parser("classical", help="classical normal-form analysis")
    cl_sub = cl.add_subparsers(dest="action", required=True)
    solve = cl_sub.add_parser("solve", help="Nash equilibria, dominance, Pareto set, PD test")
    solve.add_argument("file", help="game JSON file")
    solve.add_argument("--weak", action="store_true", help="also report weakly dominant strategies")
    solve.add_argument("--iterated", action="store_true", help="PD test also requires 2R > T + S")
    solve.set_defaults(func=cmd_classical_solve)

    cf = sub.add_parser("classify", help="classify a PD protocol and check quantum admissibility")
    cf.add_argument("--arbitrator", action="store_true")
    cf.add_argument("--communication", action="store_true")
    cf.add_argument("--binding", action="store_true")
    cf.set_defaults(func=cmd_classify)

    qu = sub.add_parser("quantum", help="quantized C/D game")
    qu_sub = qu.add_subparsers(dest="action", required=True)

    def common(sp, sweep=False):
        sp.add_argument("--game", help="base game JSON (default: 5/3/1/0 Prisoners' Dilemma)")
        sp.add_argument("--profile", default="QQ", help="one of C/D/Q per player, e.g. QD")
        sp.add_argument("--space", default="two_parameter", choices=[s.value for s in ewl.StrategySpace])
        sp.add_argument("--grid", type=grid_spec, default=None, help="grid points per parameter, e.g. 33,17")
        sp.add_argument("--epsilon", type=float, default=ewl.EPSILON)
        if not sweep:
            sp.add_argument("--gamma", type=angle, default=math.pi / 2, help="entanglement, e.g. pi/2")

    play = qu_sub.add_parser("play")
    common(play)
    play.set_defaults(func=cmd_quantum_play)
    sw = qu_sub.add_parser("sweep")
    common(sw, sweep=True)
    sw.add_argument("--gamma-steps", type=int, default=9)
    sw.add_argument("--out", help="CSV path (default: stdout)")
    sw.add_argument("--workers", type=int, default=None)
    sw.set_defaults(func=cmd_quantum_sweep)
    nc = qu_sub.add_parser("nash-check")
    common(nc)
    nc.set_defaults(func=cmd_quantum_nash_check)

    me = sub.add_parser("mech", help="Nash implementation checks")
    me_sub = me.add_subparsers(dest="action", required=True)
    for name, fn in (("check-monotonic", cmd_mech_monotonic), ("check-no-veto", cmd_mech_no_veto)):
        sp = me_sub.add_parser(name)
        sp.add_argument("file", help="environment + SCR JSON file")
        sp.set_defaults(func=fn)
    im = me_sub.add_parser("implement")
    im.add_argument("file")
    im.add_argument("--integer-cap", type=int, default=2)
    im.add_argument("--report", help="write per-state CSV here")
    im.set_defaults(func=cmd_mech_implement)

    qm = sub.add_parser("qmech", help="quantum mechanism scenario")
    qm_sub = qm.add_subparsers(dest="action", required=True)
    run = qm_sub.add_parser("run")
    run.add_argument("--scenario", required=True)
    run.add_argument("--gamma-steps", type=int, default=9)
    run.add_argument("--out", help="gamma sweep CSV path; the sweep only runs when this is given")
    run.set_defaults(func=cmd_qmech_run)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for attr in ("file", "game", "scenario"):
        path = getattr(args, attr, None)
        if not path or Path(path).is_file():
            continue
        # "fixtures/<name>" falls back to the copies shipped with the package
        packaged = fixture_path(Path(path).name)
        if Path(path).parent.name == "fixtures" and packaged.is_file():
            setattr(args, attr, str(packaged))
        else:
            parser.error(f"input file not found: {path}")
    if getattr(args, "gamma_steps", 2) < 2:
        parser.error("--gamma-steps must be at least 2")
    try:
        return args.func(args)
    except DomainError as exc:
        sys.stdout.flush()
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, KeyError) as exc:
        sys.stdout.flush()
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
