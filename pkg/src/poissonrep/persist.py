"""Versioned JSON envelopes with checksums, and matrix/representation codecs.

Floats go through Python's repr (shortest round-trip), so binary64 payloads
reload bit-exactly.  Envelopes carry a schema version, a payload kind, the
full run configuration, the tool version, and a checksum of the canonical
payload serialization; load() rejects unknown versions and corrupt payloads.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, asdict, field
from pathlib import Path

import numpy as np

from . import __version__
from .liegroups import group_by_name
from .repspace import Representation

SCHEMA_VERSION = 1


class SchemaVersionError(ValueError):
    pass


class ChecksumError(ValueError):
    pass


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=True)


def payload_checksum(payload) -> str:
    return hashlib.sha256(canonical_json(payload).encode()).hexdigest()


@dataclass
class Envelope:
    kind: str
    payload: dict
    config: dict = field(default_factory=dict)
    schema_version: int = SCHEMA_VERSION
    tool_version: str = __version__


def save_envelope(path, env: Envelope) -> None:
    body = {
        "schema_version": env.schema_version,
        "kind": env.kind,
        "tool_version": env.tool_version,
        "config": env.config,
        "payload": env.payload,
        "checksum": payload_checksum(env.payload),
    }
    Path(path).write_text(json.dumps(body, sort_keys=True, indent=1) + "\n")


def load_envelope(path) -> Envelope:
    body = json.loads(Path(path).read_text())
    version = body.get("schema_version")
    if version != SCHEMA_VERSION:
        raise SchemaVersionError(f"unsupported schema_version {version!r}")
    payload = body["payload"]
    if payload_checksum(payload) != body.get("checksum"):
        raise ChecksumError(f"payload checksum mismatch in {path}")
    return Envelope(kind=body["kind"], payload=payload, config=body.get("config", {}),
                    schema_version=version, tool_version=body.get("tool_version", ""))


# -- codecs --------------------------------------------------------------------

def matrix_to_json(m: np.ndarray) -> dict:
    a = np.asarray(m, dtype=complex)
    return {"re": np.real(a).tolist(), "im": np.imag(a).tolist()}


def matrix_from_json(obj) -> np.ndarray:
    return np.asarray(obj["re"], dtype=float) + 1j * np.asarray(obj["im"], dtype=float)


def representation_to_json(rep: Representation) -> dict:
    return {
        "group": rep.group.spec(),
        "genus": rep.genus,
        "central": matrix_to_json(rep.central),
        "entries": [matrix_to_json(m) for m in rep.entries],
    }


def representation_from_json(obj) -> Representation:
    group = group_by_name(obj["group"])
    return Representation(
        group=group,
        genus=int(obj["genus"]),
        entries=tuple(matrix_from_json(e) for e in obj["entries"]),
        central=matrix_from_json(obj["central"]),
    )


def save_representations(path, reps, config: dict | None = None) -> None:
    payload = {
        "count": len(reps),
        "representations": [representation_to_json(r) for r in reps],
        "relator_residuals": [r.relator_residual() for r in reps],
    }
    save_envelope(path, Envelope(kind="representations", payload=payload,
                                 config=config or {}))


def load_representations(path) -> list[Representation]:
    env = load_envelope(path)
    if env.kind != "representations":
        raise ValueError(f"expected a representations file, found kind {env.kind!r}")
    return [representation_from_json(o) for o in env.payload["representations"]]
