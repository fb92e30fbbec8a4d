"""Entangled agents against a mechanism that works classically.

The rule in this scenario picks an outcome at state s1 that every agent
would happily trade for another. Classically they cannot coordinate on that
trade, because each one gains by telling the truth instead. If their message
choice is driven by measuring an entangled state, the escape becomes an
equilibrium, and the designer's mechanism picks an outcome the rule forbids.

Run: python3 demos/05_quantum_collusion.py
"""
import sys

from qdilemma import fixture_path
from qdilemma.ewl import gamma_samples
from qdilemma.qmech import breakage_report, load_scenario, sweep, write_sweep_csv

scenario = load_scenario(fixture_path("scenario.json"))
report = breakage_report(scenario)
q = report.quantum
print(f"All-Q payoffs {q.all_q_payoffs.round(6)} against all-D {q.classical_payoffs.round(6)}; "
      f"all-Q is an equilibrium: {q.all_q_is_nash}")
for row in report.rows:
    if row.collusive_message is None:
        print(f"  {row.state}: nothing better to collude on")
    else:
        print(f"  {row.state}: rule allows {sorted(row.classical_outcomes)}, "
              f"entangled agents send {tuple(row.collusive_message)} and get {row.quantum_outcome}")
print(f"Verdict: {report.text}\n")

print("How much entanglement does it take?")
write_sweep_csv(sweep(scenario, gamma_samples(9)), sys.stdout)
