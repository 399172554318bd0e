"""
Circuits and OpenQASM
=====================

Parse an OpenQASM 2.0 program into the gate-level IR, look at the structural
metrics that drive routing decisions, and round-trip it back to text.
"""
from qorch import depth, gate_count, interaction_components, parse_qasm, serialize_qasm

SOURCE = """\
OPENQASM 2.0;
include "qelib1.inc";
qreg q[5];
creg c[5];
h q[0];
cx q[0],q[1];
h q[3];
cx q[3],q[4];
x q[2];
measure q -> c;
"""

circuit = parse_qasm(SOURCE)
print("qubits:            ", circuit.num_qubits)
print("cregs:             ", circuit.cregs)
print("gate count:        ", gate_count(circuit))
print("depth:             ", depth(circuit))

# Two entangled pairs and a lone qubit: three independent components.
print("components:        ", interaction_components(circuit))

# Serialization is deterministic and round-trips structurally.
text = serialize_qasm(circuit)
print("\nserialized back:\n" + text)
assert parse_qasm(text) == circuit

# Conditioned gates couple qubits through the classical register.
FEEDFORWARD = """\
OPENQASM 2.0;
include "qelib1.inc";
qreg q[2];
creg c[1];
h q[0];
measure q[0] -> c[0];
if(c==1) x q[1];
"""
coupled = parse_qasm(FEEDFORWARD)
print("feed-forward components:", interaction_components(coupled))
