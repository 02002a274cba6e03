"""Weight manifest round trips and failure modes."""

import json
import os

import numpy as np
import pytest

from genprior import (
    GeneratorNetwork,
    ManifestDataError,
    ManifestFileError,
    ManifestFormatError,
    ManifestShapeError,
    Rng,
    forward,
    load_manifest,
    random_network,
    save_manifest,
)


@pytest.fixture
def net():
    return random_network(Rng(55).child(0), (3, 10, 22))


def test_round_trip_bit_exact(tmp_path, net):
    save_manifest(net, tmp_path / "net")
    loaded = load_manifest(tmp_path / "net")
    assert loaded.widths == net.widths
    assert loaded.scale == net.scale
    for a, b in zip(loaded.weights, net.weights):
        assert np.array_equal(a, b)


def test_hand_built_manifest_forward(tmp_path):
    """A manifest written by hand loads and evaluates to the hand result."""
    d = tmp_path / "hand"
    os.makedirs(d)
    W1 = np.array([[1.0], [-2.0]])  # 2x1
    W2 = np.array([[1.0, 1.0], [0.5, -1.0], [-1.0, 0.0]])  # 3x2
    W1.astype("<f8").tofile(d / "W1.bin")
    W2.astype("<f8").tofile(d / "W2.bin")
    doc = {
        "widths": [1, 2, 3],
        "scale": "external",
        "layers": [
            {"rows": 2, "cols": 1, "file": "W1.bin"},
            {"rows": 3, "cols": 2, "file": "W2.bin"},
        ],
    }
    (d / "manifest.json").write_text(json.dumps(doc))
    net = load_manifest(d)
    # x=2: layer 1 gives relu([2, -4]) = [2, 0]; layer 2 gives relu([2, 1, -2]).
    np.testing.assert_array_equal(forward(net, np.array([2.0])), [2.0, 1.0, 0.0])


def test_truncated_file_error(tmp_path, net):
    save_manifest(net, tmp_path / "net")
    path = tmp_path / "net" / "W1.bin"
    raw = path.read_bytes()
    path.write_bytes(raw[:-16])
    with pytest.raises(ManifestFileError):
        load_manifest(tmp_path / "net")


def test_missing_weight_file_error(tmp_path, net):
    save_manifest(net, tmp_path / "net")
    os.remove(tmp_path / "net" / "W2.bin")
    with pytest.raises(ManifestFileError):
        load_manifest(tmp_path / "net")


def test_shape_mismatch_error(tmp_path, net):
    save_manifest(net, tmp_path / "net")
    doc = json.loads((tmp_path / "net" / "manifest.json").read_text())
    doc["layers"][0]["rows"] = 11
    (tmp_path / "net" / "manifest.json").write_text(json.dumps(doc))
    with pytest.raises(ManifestShapeError):
        load_manifest(tmp_path / "net")


def test_non_finite_weights_error(tmp_path, net):
    save_manifest(net, tmp_path / "net")
    W = np.array(net.weights[0])
    W[0, 0] = np.nan
    W.astype("<f8").tofile(tmp_path / "net" / "W1.bin")
    with pytest.raises(ManifestDataError):
        load_manifest(tmp_path / "net")


def test_malformed_json_error(tmp_path, net):
    save_manifest(net, tmp_path / "net")
    (tmp_path / "net" / "manifest.json").write_text("{not json")
    with pytest.raises(ManifestFormatError):
        load_manifest(tmp_path / "net")


def test_missing_manifest_error(tmp_path):
    with pytest.raises(ManifestFormatError):
        load_manifest(tmp_path / "nowhere")


def test_external_scale_round_trip(tmp_path):
    net = GeneratorNetwork(weights=(np.ones((4, 2)),), widths=(2, 4), scale="external")
    save_manifest(net, tmp_path / "ext")
    assert load_manifest(tmp_path / "ext").scale == "external"


def test_non_expansive_loaded_network_allowed(tmp_path):
    """Loaded decoders may be non-expansive; only constructors enforce it."""
    net = GeneratorNetwork(weights=(np.ones((2, 3)),), widths=(3, 2), scale="external")
    save_manifest(net, tmp_path / "narrow")
    loaded = load_manifest(tmp_path / "narrow")
    assert not loaded.expansive
