import math

import pytest

from qorch.circuit import CircuitBuilder
from qorch.qpm import (
    BackendDescriptor,
    BackendKind,
    BackendRegistry,
    CircuitTooLarge,
    DuplicateId,
    ExecuteRequest,
    MidCircuitUnsupported,
    MockHardwareBackend,
    StateVectorBackend,
    UnknownBackend,
    execute,
    get_calibration,
    list_backends,
    register_backend,
)


def bell():
    return (
        CircuitBuilder(2, (("c", 2),))
        .h(0)
        .cx(0, 1)
        .measure(0, "c", 0)
        .measure(1, "c", 1)
        .build()
    )


def sv_descriptor(backend_id="statevec", max_qubits=26):
    return BackendDescriptor(backend_id, BackendKind.STATE_VECTOR, max_qubits)


def hw_descriptor(backend_id="mock-hw"):
    return BackendDescriptor(
        backend_id, BackendKind.HARDWARE, max_qubits=12,
        supports_mid_circuit=False, supports_conditionals=False, concurrency=1,
    )


@pytest.fixture
def registry():
    reg = BackendRegistry()
    reg.register(sv_descriptor(), StateVectorBackend())
    reg.register(hw_descriptor(), MockHardwareBackend(readout_flip_probability=0.02))
    return reg


# -- registration ----------------------------------------------------------


def test_register_and_list_order(registry):
    ids = [d.id for d in list_backends(registry)]
    assert ids == ["statevec", "mock-hw"]


def test_duplicate_id_rejected(registry):
    with pytest.raises(DuplicateId):
        register_backend(registry, sv_descriptor(), StateVectorBackend())
    assert [d.id for d in list_backends(registry)] == ["statevec", "mock-hw"]


def test_register_tensor_network_stub(registry):
    register_backend(
        registry,
        BackendDescriptor("tn", BackendKind.TENSOR_NETWORK, max_qubits=40),
    )
    assert list_backends(registry)[-1].kind is BackendKind.TENSOR_NETWORK


def test_hardware_concurrency_must_be_one():
    reg = BackendRegistry()
    with pytest.raises(ValueError):
        reg.register(
            BackendDescriptor("hw", BackendKind.HARDWARE, 5, concurrency=2),
            MockHardwareBackend(),
        )


# -- calibration -------------------------------------------------------------


def test_statevec_calibration_is_ideal(registry):
    cal = get_calibration(registry, "statevec")
    assert cal.readout_flip_probability == 0.0
    assert cal.service_time_params[0] == 0.0


def test_mock_hw_calibration_echoes_config(registry):
    cal = get_calibration(registry, "mock-hw")
    assert cal.readout_flip_probability == 0.02


def test_unknown_backend(registry):
    with pytest.raises(UnknownBackend):
        get_calibration(registry, "nope")


# -- execute -----------------------------------------------------------------


def test_execute_bell_on_statevec(registry):
    res = execute(registry, "statevec", ExecuteRequest("t1", bell(), 100, seed=1))
    assert set(res.counts) <= {"00", "11"}
    assert res.counts.total() == 100
    assert res.backend_id == "statevec"
    assert res.modeled_service_time > 0


def test_mock_hw_flip_rate():
    reg = BackendRegistry()
    reg.register(hw_descriptor(), MockHardwareBackend(readout_flip_probability=0.1))
    res = reg.execute("mock-hw", ExecuteRequest("t2", bell(), 10000, seed=3))
    odd = res.counts.frequency("01") + res.counts.frequency("10")
    # ideal Bell is half "00" half "11": P(exactly one flip) = 2 p (1-p) = 0.18
    assert abs(odd - 0.18) < 0.02


def test_mock_hw_p_zero_matches_statevec(registry):
    reg = BackendRegistry()
    reg.register(hw_descriptor(), MockHardwareBackend(readout_flip_probability=0.0))
    hw = reg.execute("mock-hw", ExecuteRequest("t", bell(), 2000, seed=11))
    sv = execute(registry, "statevec", ExecuteRequest("t", bell(), 2000, seed=11))
    assert hw.counts == sv.counts


def test_circuit_too_large(registry):
    big = CircuitBuilder(30).build()
    with pytest.raises(CircuitTooLarge):
        execute(registry, "statevec", ExecuteRequest("t", big, 10, seed=0))


def test_mid_circuit_unsupported_on_hardware(registry):
    c = (
        CircuitBuilder(1, (("c", 1),))
        .h(0)
        .measure(0, "c", 0)
        .x(0, condition=("c", 1))
        .build()
    )
    with pytest.raises(MidCircuitUnsupported):
        execute(registry, "mock-hw", ExecuteRequest("t", c, 10, seed=0))


def test_tensor_network_stub_not_implemented(registry):
    register_backend(
        registry, BackendDescriptor("tn", BackendKind.TENSOR_NETWORK, 40)
    )
    with pytest.raises(NotImplementedError):
        execute(registry, "tn", ExecuteRequest("t", bell(), 10, seed=0))


def test_external_plugin_runs_when_registered(registry):
    class FakeTNPlugin:
        def execute(self, request, descriptor):
            from qorch.qpm import ExecuteResult
            from qorch.statevec import Counts, ExecutionTrace

            return ExecuteResult(
                request.task_id, Counts({"0": request.shots}),
                ExecutionTrace(), descriptor.id, 1.0,
            )

    register_backend(
        registry, BackendDescriptor("tn", BackendKind.TENSOR_NETWORK, 40), FakeTNPlugin()
    )
    res = execute(registry, "tn", ExecuteRequest("t", bell(), 7, seed=0))
    assert res.counts == {"0": 7}


def test_service_time_monotonicity():
    sv = StateVectorBackend(alpha=1e-3, beta=1e-9)
    desc = sv_descriptor()
    c = bell()
    t_small = sv.execute(ExecuteRequest("a", c, 10, 0, workers=1), desc)
    t_more_workers = sv.execute(ExecuteRequest("a", c, 10, 0, workers=2), desc)
    assert t_more_workers.modeled_service_time <= t_small.modeled_service_time

    hw = MockHardwareBackend(readout_flip_probability=0.0, alpha_q=1.0, beta_q=1e-6)
    hdesc = hw_descriptor()
    few = hw.execute(ExecuteRequest("a", c, 10, 0), hdesc)
    many = hw.execute(ExecuteRequest("a", c, 1000, 0), hdesc)
    assert many.modeled_service_time >= few.modeled_service_time


def test_execute_does_not_mutate_request(registry):
    req = ExecuteRequest("t", bell(), 50, seed=5)
    execute(registry, "statevec", req)
    assert req.shots == 50 and req.seed == 5


def test_results_reproducible(registry):
    a = execute(registry, "mock-hw", ExecuteRequest("t", bell(), 500, seed=9))
    b = execute(registry, "mock-hw", ExecuteRequest("t", bell(), 500, seed=9))
    assert a.counts == b.counts
