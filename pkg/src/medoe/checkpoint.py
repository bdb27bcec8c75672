"""Single-file checkpoint container.

Layout: an ASCII magic line, one JSON manifest line, then the named arrays
concatenated as raw little-endian float64. The manifest records kind, array
names/shapes in file order, and a free-form meta dict. Integer payloads are
stored as float64 (exact below 2**53, far beyond anything stored here).
"""

import json
import os

import numpy as np

MAGIC = b"MEDOECKPT1\n"

KINDS = ("actor", "critic", "prior", "classifier", "tables", "buffer")


class CheckpointError(ValueError):
    pass


def save_checkpoint(path, kind, arrays, meta=None):
    if kind not in KINDS:
        raise CheckpointError(f"unknown checkpoint kind: {kind}")
    entries = []
    blobs = []
    for name, arr in arrays.items():
        a = np.ascontiguousarray(arr, dtype="<f8")
        entries.append({"name": name, "shape": list(a.shape)})
        blobs.append(a.tobytes())
    manifest = {"kind": kind, "arrays": entries, "meta": meta or {}}
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    tmp = path + ".tmp"
    with open(tmp, "wb") as f:
        f.write(MAGIC)
        f.write(json.dumps(manifest, sort_keys=True).encode() + b"\n")
        for blob in blobs:
            f.write(blob)
    os.replace(tmp, path)


def load_checkpoint(path):
    with open(path, "rb") as f:
        magic = f.read(len(MAGIC))
        if magic != MAGIC:
            raise CheckpointError(f"bad checkpoint magic in {path}")
        manifest = json.loads(f.readline().decode())
        arrays = {}
        for entry in manifest["arrays"]:
            shape = tuple(entry["shape"])
            count = int(np.prod(shape)) if shape else 1
            raw = f.read(8 * count)
            if len(raw) != 8 * count:
                raise CheckpointError(f"truncated checkpoint: {path}")
            arrays[entry["name"]] = np.frombuffer(raw, dtype="<f8").reshape(shape).copy()
    return manifest["kind"], arrays, manifest.get("meta", {})


# ── net serialization ──

def net_to_arrays(net):
    if net.kind == "tabular":
        return {"table": net.table}, {"net": "tabular", "rows": net.table.shape[0], "out": net.table.shape[1]}
    arrays = {}
    for i, (w, b) in enumerate(zip(net.weights, net.biases)):
        arrays[f"w{i}"] = w
        arrays[f"b{i}"] = b
    return arrays, {"net": "mlp", "sizes": list(net.sizes)}


def net_from_arrays(arrays, meta):
    from medoe import funcapprox

    if meta["net"] == "tabular":
        net = funcapprox.Tabular(int(meta["rows"]), int(meta["out"]))
        net.table[:] = arrays["table"]
        return net
    sizes = [int(s) for s in meta["sizes"]]
    net = funcapprox.MLP(sizes[0], sizes[1:-1], sizes[-1], rng=None)
    for i in range(len(net.weights)):
        net.weights[i][:] = arrays[f"w{i}"]
        net.biases[i][:] = arrays[f"b{i}"]
    return net


def save_net(path, net, kind, meta=None):
    arrays, net_meta = net_to_arrays(net)
    merged = dict(net_meta)
    merged.update(meta or {})
    save_checkpoint(path, kind, arrays, merged)


def load_net(path, expect_kind=None):
    kind, arrays, meta = load_checkpoint(path)
    if expect_kind is not None and kind != expect_kind:
        raise CheckpointError(f"expected {expect_kind} checkpoint, found {kind}: {path}")
    return net_from_arrays(arrays, meta), meta
