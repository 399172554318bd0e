import math

import pytest

from qorch.circuit import Barrier, Gate, Measure, Reset, ValidationError
from qorch.gates import GateKind
from qorch.qasm import QasmSyntaxError, UnsupportedFeature, parse_qasm, serialize_qasm

BELL = """OPENQASM 2.0;
include "qelib1.inc";
qreg q[2];
creg c[2];
h q[0];
cx q[0],q[1];
measure q -> c;
"""


def test_parse_bell():
    c = parse_qasm(BELL)
    assert c.num_qubits == 2
    assert c.cregs == (("c", 2),)
    assert c.instructions == (
        Gate(GateKind.H, (), (0,), None),
        Gate(GateKind.CX, (), (0, 1), None),
        Measure(0, "c", 0),
        Measure(1, "c", 1),
    )


def test_parse_conditional():
    src = 'OPENQASM 2.0;\nqreg q[1];\ncreg c[1];\nif(c==1) x q[0];\n'
    c = parse_qasm(src)
    assert c.instructions == (Gate(GateKind.X, (), (0,), ("c", 1)),)


def test_missing_header_is_positioned_syntax_error():
    with pytest.raises(QasmSyntaxError) as err:
        parse_qasm("qreg q[1];\n")
    assert err.value.line == 1


def test_wrong_version_unsupported():
    with pytest.raises(UnsupportedFeature):
        parse_qasm("OPENQASM 3.0;\n")


def test_bad_include_rejected():
    with pytest.raises(UnsupportedFeature):
        parse_qasm('OPENQASM 2.0;\ninclude "other.inc";\n')


def test_gate_definition_unsupported():
    src = "OPENQASM 2.0;\ngate foo a { h a; }\n"
    with pytest.raises(UnsupportedFeature) as err:
        parse_qasm(src)
    assert err.value.line == 2


def test_unknown_gate_unsupported():
    with pytest.raises(UnsupportedFeature):
        parse_qasm("OPENQASM 2.0;\nqreg q[1];\nfoo q[0];\n")


def test_qelib_gate_outside_subset_unsupported():
    with pytest.raises(UnsupportedFeature):
        parse_qasm("OPENQASM 2.0;\nqreg q[3];\nccx q[0],q[1],q[2];\n")


def test_parameter_expression_unsupported():
    with pytest.raises(UnsupportedFeature):
        parse_qasm("OPENQASM 2.0;\nqreg q[1];\nrx(sin(1.0)) q[0];\n")


def test_bad_index_validation_error():
    with pytest.raises(ValidationError) as err:
        parse_qasm("OPENQASM 2.0;\nqreg q[2];\nh q[5];\n")
    assert "line 3" in str(err.value)


def test_duplicate_register_name_rejected():
    with pytest.raises(ValidationError):
        parse_qasm("OPENQASM 2.0;\nqreg q[1];\ncreg q[1];\n")


def test_pi_fraction_params():
    src = (
        "OPENQASM 2.0;\nqreg q[1];\n"
        "rx(pi/2) q[0];\nrz(-pi) q[0];\nry(3*pi/4) q[0];\nrx(2*pi) q[0];\n"
        "u(pi/2,0,pi) q[0];\n"
    )
    c = parse_qasm(src)
    angles = [i.params for i in c.instructions]
    assert angles[0] == (math.pi / 2,)
    assert angles[1] == (-math.pi,)
    assert angles[2] == (3 * math.pi / 4,)
    assert angles[3] == (2 * math.pi,)
    assert angles[4] == (math.pi / 2, 0.0, math.pi)


def test_register_broadcast_single_qubit_gate():
    c = parse_qasm("OPENQASM 2.0;\nqreg q[3];\nh q;\n")
    assert [i.qubits for i in c.instructions] == [(0,), (1,), (2,)]


def test_register_broadcast_two_qubit_gate():
    c = parse_qasm("OPENQASM 2.0;\nqreg a[2];\nqreg b[2];\ncx a,b;\n")
    assert [i.qubits for i in c.instructions] == [(0, 2), (1, 3)]


def test_two_qregs_flatten_in_order():
    c = parse_qasm("OPENQASM 2.0;\nqreg a[2];\nqreg b[1];\nx b[0];\n")
    assert c.num_qubits == 3
    assert c.instructions[0].qubits == (2,)


def test_reset_and_barrier():
    c = parse_qasm("OPENQASM 2.0;\nqreg q[2];\nreset q[0];\nbarrier q;\n")
    assert c.instructions == (Reset(0), Barrier((0, 1)))


def test_conditioned_measure_unsupported():
    with pytest.raises(UnsupportedFeature):
        parse_qasm(
            "OPENQASM 2.0;\nqreg q[1];\ncreg c[1];\nif(c==1) measure q[0] -> c[0];\n"
        )


def test_crlf_accepted():
    c = parse_qasm("OPENQASM 2.0;\r\nqreg q[1];\r\nh q[0];\r\n")
    assert c.num_qubits == 1


def test_comments_skipped():
    c = parse_qasm("OPENQASM 2.0;\n// a comment\nqreg q[1]; // trailing\nh q[0];\n")
    assert len(c.instructions) == 1


# -- serialization --------------------------------------------------------


def test_serialize_empty_circuit():
    from qorch.circuit import Circuit

    text = serialize_qasm(Circuit(1))
    assert text == 'OPENQASM 2.0;\ninclude "qelib1.inc";\nqreg q[1];\n'


def test_bell_round_trip():
    c = parse_qasm(BELL)
    assert parse_qasm(serialize_qasm(c)) == c


def test_angle_round_trip_bit_exact():
    from qorch.circuit import Circuit

    c = Circuit(1, (), (Gate(GateKind.RX, (math.pi / 2,), (0,), None),))
    again = parse_qasm(serialize_qasm(c))
    assert again.instructions[0].params[0] == math.pi / 2


def test_conditional_round_trip():
    src = 'OPENQASM 2.0;\nqreg q[1];\ncreg c[2];\nmeasure q[0] -> c[1];\nif(c==2) z q[0];\n'
    c = parse_qasm(src)
    assert parse_qasm(serialize_qasm(c)) == c
