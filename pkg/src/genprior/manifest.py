"""On-disk weight manifests for generator networks.

A network directory contains ``manifest.json``::

    {"widths": [k, n1, ..., nd],
     "scale": "two_over_fanout" | "one_over_fanout" | "external",
     "layers": [{"rows": n1, "cols": k, "file": "W1.bin"}, ...]}

plus one binary file per layer holding ``rows * cols`` little-endian
IEEE-754 float64 values in row-major order.  This is the interchange
format for feeding externally trained decoders into the denoiser.
"""

from __future__ import annotations

import json
import os

import numpy as np

from .network import GeneratorNetwork

MANIFEST_NAME = "manifest.json"


class ManifestError(Exception):
    """Base class for weight-manifest problems."""


class ManifestFormatError(ManifestError):
    """manifest.json is missing, unparsable, or structurally wrong."""


class ManifestShapeError(ManifestError):
    """Declared layer shapes do not chain with the declared widths."""


class ManifestFileError(ManifestError):
    """A weight file is missing or its size disagrees with its shape."""


class ManifestDataError(ManifestError):
    """A weight file contains non-finite values."""


def save_manifest(network: GeneratorNetwork, directory) -> None:
    """Write ``network`` to ``directory`` (created if needed), bit-exactly."""
    os.makedirs(directory, exist_ok=True)
    layers = []
    for i, W in enumerate(network.weights):
        fname = f"W{i + 1}.bin"
        W.astype("<f8").tofile(os.path.join(directory, fname))
        layers.append({"rows": W.shape[0], "cols": W.shape[1], "file": fname})
    doc = {"widths": list(network.widths), "scale": network.scale, "layers": layers}
    with open(os.path.join(directory, MANIFEST_NAME), "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def load_manifest(directory) -> GeneratorNetwork:
    """Load a network from ``directory``, validating shapes and finiteness."""
    path = os.path.join(directory, MANIFEST_NAME)
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ManifestFormatError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ManifestFormatError(f"{path} is not valid JSON: {exc}") from exc

    if not isinstance(doc, dict):
        raise ManifestFormatError("manifest must be a JSON object")
    for key in ("widths", "scale", "layers"):
        if key not in doc:
            raise ManifestFormatError(f"manifest missing key {key!r}")
    widths = doc["widths"]
    layers = doc["layers"]
    if not isinstance(widths, list) or len(widths) < 2 or not all(
        isinstance(w, int) and w >= 1 for w in widths
    ):
        raise ManifestFormatError(f"invalid widths {widths!r}")
    if not isinstance(layers, list) or len(layers) != len(widths) - 1:
        raise ManifestFormatError(
            f"manifest declares {len(layers)} layers for {len(widths)} widths"
        )

    weights = []
    for i, layer in enumerate(layers):
        if not isinstance(layer, dict) or not {"rows", "cols", "file"} <= set(layer):
            raise ManifestFormatError(f"layer {i + 1} entry is malformed: {layer!r}")
        rows, cols = layer["rows"], layer["cols"]
        if (rows, cols) != (widths[i + 1], widths[i]):
            raise ManifestShapeError(
                f"layer {i + 1} declares shape {(rows, cols)}, "
                f"widths imply {(widths[i + 1], widths[i])}"
            )
        fpath = os.path.join(directory, layer["file"])
        try:
            raw = np.fromfile(fpath, dtype="<f8")
        except OSError as exc:
            raise ManifestFileError(f"cannot read weight file {fpath}: {exc}") from exc
        if raw.size != rows * cols:
            raise ManifestFileError(
                f"{fpath} holds {raw.size} values, expected {rows * cols}"
            )
        if not np.all(np.isfinite(raw)):
            raise ManifestDataError(f"{fpath} contains non-finite values")
        weights.append(raw.reshape(rows, cols))

    scale = doc["scale"]
    if scale not in ("two_over_fanout", "one_over_fanout", "external"):
        raise ManifestFormatError(f"unknown scale {scale!r}")
    return GeneratorNetwork(weights=tuple(weights), widths=tuple(widths), scale=scale)
