"""Three kinds of Prisoners' Dilemma, told apart by the rules of play.

The payoff table is the same for all of them. What differs is whether an
outside arbitrator hands out the payoffs, whether the players may talk
before moving, and whether they can sign enforceable agreements.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import NamedTuple


class PDType(enum.Enum):
    TYPE1 = "Type1"
    TYPE2 = "Type2"
    TYPE3 = "Type3"
    COOPERATIVE_EXCLUDED = "CooperativeExcluded"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class GameProtocol:
    has_arbitrator: bool
    pre_play_communication: bool
    binding_contracts: bool

    def __post_init__(self):
        if self.binding_contracts and not self.pre_play_communication:
            raise ValueError("binding contracts require pre-play communication")


def valid_protocols() -> list[GameProtocol]:
    """The six protocols satisfying the contract-needs-communication rule."""
    out = []
    for flags in itertools.product((False, True), repeat=3):
        try:
            out.append(GameProtocol(*flags))
        except ValueError:
            continue
    return out


def classify(protocol: GameProtocol) -> PDType:
    if not protocol.has_arbitrator:
        return PDType.TYPE1
    if not protocol.pre_play_communication:
        return PDType.TYPE2
    if not protocol.binding_contracts:
        return PDType.TYPE3
    return PDType.COOPERATIVE_EXCLUDED


class Admissibility(NamedTuple):
    admitted: bool
    reason: str

    def __bool__(self):
        return self.admitted


_REASONS = {
    PDType.TYPE1: (
        False,
        "No arbitrator: the players generate their own payoffs, but the quantum "
        "protocol needs a referee who measures the qubits and pays out. The "
        "quantized game does not describe this situation.",
    ),
    PDType.TYPE2: (
        False,
        "The players cannot communicate, and each one can only apply a local "
        "unitary to their own qubit, so they cannot entangle the qubits "
        "themselves. The arbitrator would have to hand them an entangled state, "
        "helping them toward the (3,3) outcome. An arbitrator with that incentive "
        "could just as well assign (3,3) directly.",
    ),
    PDType.TYPE3: (
        True,
        "The players can talk before moving, so they can prepare the entangled "
        "pair themselves without a benevolent arbitrator. The quantized game "
        "applies, and (Q, Q) replaces (D, D) as the equilibrium.",
    ),
    PDType.COOPERATIVE_EXCLUDED: (
        False,
        "Binding contracts turn this into a cooperative game, which is outside "
        "the non-cooperative setting the quantized game is built for.",
    ),
}


def admits_quantum_extension(t: PDType) -> Admissibility:
    return Admissibility(*_REASONS[PDType(t)])
