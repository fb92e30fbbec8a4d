"""Entangling the dilemma: what changes as the entanglement knob turns.

At zero entanglement the quantized game is the classical one. At maximal
entanglement the profile (Q, Q) becomes an equilibrium worth (3, 3), at least
while players are confined to the two-parameter family of strategies. A
richer strategy family undoes that, as the last section shows.

Run: python3 demos/03_quantum_dilemma.py
"""
import math

from qdilemma.ewl import QuantumGameConfig, gamma_samples, gamma_sweep, is_nash_on_grid, play
from qdilemma.qsim import DEFECT, QUANTUM

cfg = QuantumGameConfig(gamma=math.pi / 2)
for name, profile in [("(D, D)", [DEFECT, DEFECT]), ("(Q, D)", [QUANTUM, DEFECT]), ("(Q, Q)", [QUANTUM, QUANTUM])]:
    res = play(cfg, profile)
    probs = {k: round(v, 12) for k, v in res.labelled().items() if v > 1e-12}
    print(f"{name} at maximal entanglement: outcome {probs}, payoffs {res.payoffs.round(9)}")

print("\nIs (Q, Q) an equilibrium as entanglement grows?")
for row in gamma_sweep(cfg, lambda g: [QUANTUM, QUANTUM], gamma_samples(9)):
    print(f"  gamma={row.gamma:.3f}  payoff={row.payoffs[0]:.3f}  nash={row.is_nash}")

check = is_nash_on_grid(QuantumGameConfig(gamma=math.pi / 2, strategy_space="full_su2"), [QUANTUM, QUANTUM])
w = check.witness
print(f"\nWith the three-parameter SU(2) family, (Q, Q) is an equilibrium: {check.is_nash}.")
print(f"Player {w.player + 1} can switch to {tuple(round(x, 4) for x in w.strategy)} and gain {w.gain:.3f}.")
