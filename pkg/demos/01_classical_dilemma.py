"""The classical Prisoners' Dilemma, solved from scratch.

Run: python3 demos/01_classical_dilemma.py
"""
from qdilemma import fixture_path
from qdilemma.game import (
    dominant_strategies,
    find_pure_nash,
    is_prisoners_dilemma,
    load_game,
    pareto_optimal_profiles,
)

game = load_game(fixture_path("table1.json"))
print("Payoff table (row player, column player):")
for profile in game.profiles():
    print(f"  {profile}: {tuple(float(x) for x in game.payoff(profile))}")

nash = find_pure_nash(game)
print(f"\nThe only pure equilibrium is {nash[0]}, worth {tuple(float(x) for x in game.payoff(nash[0]))} to each side.")
for i, d in enumerate(dominant_strategies(game)):
    print(f"Player {i + 1} has a {'strictly' if d.strict else 'weakly'} dominant strategy: {d.strategy}.")

pareto = pareto_optimal_profiles(game)
print(f"\nPareto-optimal profiles: {pareto}")
print("Mutual defection is not among them, which is the whole dilemma.")
print(f"Standard PD ordering T > R > P > S holds: {is_prisoners_dilemma(game)}")
