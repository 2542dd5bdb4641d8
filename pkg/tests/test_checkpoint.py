"""Checkpoint serialization round-trips and corruption handling."""

import numpy as np
import pytest

from urbangrid.errors import FormatError
from urbangrid.net import checkpoint, model


def _trained_ish_net():
    net = model.build_network(seed=5)
    rng = np.random.default_rng(9)
    for p in net.parameters():
        p.value += rng.normal(size=p.value.shape) * 0.01
        p.velocity += 1.0  # should NOT survive a round trip
    net.norm_mean = np.array([10.0, 20.0, 30.0])
    net.norm_std = np.array([1.0, 2.0, 3.0])
    return net


def test_roundtrip_bit_exact(tmp_path):
    net = _trained_ish_net()
    path = tmp_path / "net.mck1"
    checkpoint.save_checkpoint(net, path)
    loaded = checkpoint.load_checkpoint(path)
    assert set(loaded.params) == set(net.params)
    for name, p in net.params.items():
        assert np.array_equal(loaded.params[name].value, p.value), name
        assert np.all(loaded.params[name].velocity == 0.0)
        assert np.all(loaded.params[name].grad == 0.0)
    np.testing.assert_array_equal(loaded.norm_mean, net.norm_mean)
    np.testing.assert_array_equal(loaded.norm_std, net.norm_std)


def test_roundtrip_without_norm_stats(tmp_path):
    net = model.build_network(seed=1)
    path = tmp_path / "net.mck1"
    checkpoint.save_checkpoint(net, path)
    loaded = checkpoint.load_checkpoint(path)
    assert not loaded.has_norm_stats()


def test_save_is_deterministic(tmp_path):
    net = _trained_ish_net()
    a = tmp_path / "a.mck1"
    b = tmp_path / "b.mck1"
    checkpoint.save_checkpoint(net, a)
    checkpoint.save_checkpoint(net, b)
    assert a.read_bytes() == b.read_bytes()


def test_truncated_file_rejected(tmp_path):
    net = model.build_network(seed=1)
    path = tmp_path / "net.mck1"
    checkpoint.save_checkpoint(net, path)
    blob = path.read_bytes()
    for cut in (0, 3, 10, len(blob) // 2, len(blob) - 1):
        clipped = tmp_path / "cut.mck1"
        clipped.write_bytes(blob[:cut])
        with pytest.raises(FormatError):
            checkpoint.load_checkpoint(clipped)


def test_trailing_garbage_rejected(tmp_path):
    net = model.build_network(seed=1)
    path = tmp_path / "net.mck1"
    checkpoint.save_checkpoint(net, path)
    path.write_bytes(path.read_bytes() + b"\x00")
    with pytest.raises(FormatError):
        checkpoint.load_checkpoint(path)


def test_bad_magic_rejected(tmp_path):
    net = model.build_network(seed=1)
    path = tmp_path / "net.mck1"
    checkpoint.save_checkpoint(net, path)
    blob = bytearray(path.read_bytes())
    blob[:4] = b"XXXX"
    path.write_bytes(bytes(blob))
    with pytest.raises(FormatError):
        checkpoint.load_checkpoint(path)


def test_channel_count_roundtrip(tmp_path):
    from urbangrid.net.config import NetworkConfig
    net = model.build_network(NetworkConfig(input_channels=5), seed=0)
    path = tmp_path / "net5.mck1"
    checkpoint.save_checkpoint(net, path)
    loaded = checkpoint.load_checkpoint(path)
    assert loaded.config.input_channels == 5
    assert loaded.param("stage1.conv.weight").value.shape == (96, 5, 5, 5)
