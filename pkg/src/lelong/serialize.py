"""JSON encoding of forms, families and reports.

Complex matrices serialize as row-major nested arrays of [re, im]
pairs.  Family files follow the schema
{"n", "kind", "grid", "forms", "blocks", "t_max"}; blocks carry a
frame under the key "unitary" plus a profile list.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import SchemaError
from .families import MetricFamily, generated_family, sampled_family
from .forms import make_form
from .profiles import PROFILE_KINDS, ScalarProfile


def complex_to_pair(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def matrix_to_json(m) -> list:
    m = np.asarray(m, dtype=complex)
    return [[complex_to_pair(z) for z in row] for row in m]


def matrix_from_json(data, context: str = "matrix") -> np.ndarray:
    try:
        arr = np.asarray(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"{context}: not a numeric array") from exc
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise SchemaError(f"{context}: expected rows of [re, im] pairs, got shape {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


def vector_to_json(v) -> list:
    return [complex_to_pair(z) for z in np.asarray(v, dtype=complex)]


def vector_from_json(data, context: str = "vector") -> np.ndarray:
    try:
        arr = np.asarray(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"{context}: not a numeric array") from exc
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise SchemaError(f"{context}: expected [re, im] pairs, got shape {arr.shape}")
    return arr[:, 0] + 1j * arr[:, 1]


def profile_to_json(p: ScalarProfile) -> dict:
    return {"kind": p.kind, "params": dict(p.params)}


def profile_from_json(data, context: str = "profile") -> ScalarProfile:
    if not isinstance(data, dict) or "kind" not in data or "params" not in data:
        raise SchemaError(f"{context}: expected {{kind, params}}")
    if data["kind"] not in PROFILE_KINDS:
        raise SchemaError(f"{context}: unknown profile kind {data['kind']!r}")
    return ScalarProfile(kind=data["kind"], params=dict(data["params"]))


def family_to_json(fam: MetricFamily) -> dict:
    doc = {"n": fam.n, "kind": fam.kind, "t_max": fam.t_max}
    if fam.kind == "sampled":
        doc["grid"] = [float(t) for t in fam.grid]
        doc["forms"] = [matrix_to_json(f.matrix) for f in fam.forms]
    else:
        doc["blocks"] = [
            {
                "unitary": matrix_to_json(b.matrix),
                "profiles": [profile_to_json(p) for p in b.profiles],
            }
            for b in fam.blocks
        ]
    return doc


def family_from_json(doc, validate: bool = True) -> MetricFamily:
    if not isinstance(doc, dict):
        raise SchemaError("family document must be a JSON object")
    for key in ("n", "kind", "t_max"):
        if key not in doc:
            raise SchemaError(f"family: missing field {key!r}")
    kind = doc["kind"]
    t_max = float(doc["t_max"])
    if kind == "sampled":
        if "grid" not in doc or "forms" not in doc:
            raise SchemaError("sampled family: missing 'grid' or 'forms'")
        forms = [make_form(matrix_from_json(m, f"forms[{i}]")) for i, m in enumerate(doc["forms"])]
        fam = sampled_family(doc["grid"], forms)
    elif kind == "generated":
        if "blocks" not in doc:
            raise SchemaError("generated family: missing 'blocks'")
        blocks = []
        for i, blk in enumerate(doc["blocks"]):
            if "unitary" not in blk or "profiles" not in blk:
                raise SchemaError(f"blocks[{i}]: missing 'unitary' or 'profiles'")
            frame = matrix_from_json(blk["unitary"], f"blocks[{i}].unitary")
            profiles = [
                profile_from_json(p, f"blocks[{i}].profiles[{j}]") for j, p in enumerate(blk["profiles"])
            ]
            blocks.append((frame, profiles))
        fam = generated_family(blocks, t_max=t_max, require_unitary=True, validate=validate)
    else:
        raise SchemaError(f"family: unknown kind {kind!r}")
    if fam.n != int(doc["n"]):
        raise SchemaError(f"family: declared n = {doc['n']} but data has n = {fam.n}")
    return fam


def load_family(path, validate: bool = True) -> MetricFamily:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    return family_from_json(doc, validate=validate)


def save_family(fam: MetricFamily, path) -> None:
    Path(path).write_text(json.dumps(family_to_json(fam), indent=2, sort_keys=True))
