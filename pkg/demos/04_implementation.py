"""Designing a mechanism whose equilibria are exactly the outcomes we want.

A small society of three agents, two possible states of the world and three
outcomes. We check the two conditions that make Nash implementation possible,
build the integer-game mechanism, and verify by brute force that it works,
then watch it fail on a rule that is not monotonic.

Run: python3 demos/04_implementation.py
"""
from qdilemma import fixture_path
from qdilemma.mechanism import (
    canonical_mechanism,
    implements,
    is_monotonic,
    load_environment,
    satisfies_no_veto,
)

for name in ("monotonic_scr.json", "nonmonotonic_scr.json"):
    env, scr = load_environment(fixture_path(name))
    print(f"== {name}")
    for state in env.states:
        print(f"  F({state}) = {sorted(scr[state])}")
    mono = is_monotonic(scr, env)
    print(f"  monotonic: {mono.ok}" + ("" if mono else f"  (counterexample {mono.witness})"))
    print(f"  no veto power: {satisfies_no_veto(scr, env).ok}")
    mech = canonical_mechanism(scr, env, integer_cap=2)
    report = implements(scr, mech, env)
    print(f"  {len(mech.message_spaces[0])} messages per agent, {mech.size} profiles per state")
    for row in report.rows:
        print(f"    {row.state}: equilibrium outcomes {sorted(row.achieved)} from {row.n_equilibria} equilibria")
    print(f"  implemented: {report.ok}\n")
