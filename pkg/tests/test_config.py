import pytest

from qorch.config import ConfigError, default_config_text, load_config, parse_config
from qorch.qpm import BackendKind


def test_default_config_parses():
    cfg = parse_config(default_config_text())
    assert cfg.nodes == 8
    assert cfg.device == "statevec"
    assert [b.id for b in cfg.backends] == ["statevec", "mock-hw"]
    assert cfg.routing.sv_max == 24
    assert cfg.routing.local_qubits_per_worker == 20
    assert cfg.timing.alpha == 1e-3
    assert cfg.partitions is None


def test_default_registry_has_two_backends():
    cfg = load_config()
    registry = cfg.build_registry()
    descs = registry.list()
    assert [d.id for d in descs] == ["statevec", "mock-hw"]
    assert descs[1].kind is BackendKind.HARDWARE
    assert registry.get_calibration("mock-hw").readout_flip_probability == 0.02


def test_custom_config_file(tmp_path):
    path = tmp_path / "sys.ini"
    path.write_text(
        "[cluster]\nnodes = 4\ndevice = sv\n\n"
        "[backend:sv]\nkind = state_vector\nmax_qubits = 10\n\n"
        "[simenv]\npartitions = state_vector:2,tensor_network:1\n",
        encoding="utf-8",
    )
    cfg = load_config(path)
    assert cfg.nodes == 4
    assert cfg.partitions == (("state_vector", 2), ("tensor_network", 1))


def test_env_var_config(tmp_path, monkeypatch):
    path = tmp_path / "sys.ini"
    path.write_text(
        "[cluster]\nnodes = 3\n\n[backend:sv]\nkind = state_vector\n",
        encoding="utf-8",
    )
    monkeypatch.setenv("QORCH_CONFIG", str(path))
    assert load_config().nodes == 3


def test_unknown_device_rejected():
    with pytest.raises(ConfigError):
        parse_config("[cluster]\ndevice = ghost\n\n[backend:sv]\nkind = state_vector\n")


def test_no_backends_rejected():
    with pytest.raises(ConfigError):
        parse_config("[cluster]\nnodes = 2\n")


def test_bad_kind_rejected():
    with pytest.raises(ConfigError):
        parse_config("[backend:x]\nkind = abacus\n")
