"""Which real-world dilemmas does the quantized game actually describe?

The answer depends on three facts about the protocol: is there a referee who
pays out, can the players talk beforehand, and can they sign binding deals.

Run: python3 demos/02_which_dilemma.py
"""
from qdilemma.typology import admits_quantum_extension, classify, valid_protocols

for proto in valid_protocols():
    kind = classify(proto)
    verdict = admits_quantum_extension(kind)
    flags = (f"arbitrator={proto.has_arbitrator!s:5}  communication={proto.pre_play_communication!s:5}  "
             f"binding={proto.binding_contracts!s:5}")
    print(f"{flags} -> {kind.value:20} quantum: {'yes' if verdict else 'no'}")
    print(f"    {verdict.reason}\n")
