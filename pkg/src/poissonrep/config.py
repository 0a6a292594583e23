"""Run configuration: parsing, validation, and object construction."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .liegroups import (InvariantForm, MatrixGroup, diagonal_form,
                        group_by_name, identity_form)


class ConfigError(ValueError):
    """Invalid configuration; `field` names the offending entry."""

    def __init__(self, field_name: str, message: str):
        self.field = field_name
        super().__init__(f"config field {field_name!r}: {message}")


@dataclass
class RunConfig:
    group_spec: object = "SU2"
    genus: int = 2
    central: object = "I"
    form_spec: dict = field(default_factory=lambda: {"type": "identity"})
    seed: int = 0
    jobs: int | None = None
    out: str = "."
    params: dict = field(default_factory=dict)
    raw: dict = field(default_factory=dict)

    def build_group(self) -> MatrixGroup:
        try:
            return group_by_name(self.group_spec)
        except ValueError as err:
            raise ConfigError("group", str(err))

    def build_central(self, group: MatrixGroup) -> np.ndarray:
        try:
            return group.central_element(self.central)
        except (ValueError, TypeError) as err:
            raise ConfigError("central", str(err))

    def build_form(self, group: MatrixGroup) -> InvariantForm:
        spec = self.form_spec or {"type": "identity"}
        kind = spec.get("type", "identity")
        try:
            if kind == "identity":
                return identity_form(group, float(spec.get("scale", 1.0)))
            if kind == "diag":
                entries = spec.get("entries")
                if entries is None or len(entries) != group.dim:
                    raise ValueError(
                        f"diag form needs {group.dim} entries for {group.name}")
                return diagonal_form(group, entries)
            if kind == "gram":
                return InvariantForm(group, np.asarray(spec["entries"], dtype=float))
            raise ValueError(f"unknown form type {kind!r}")
        except ConfigError:
            raise
        except Exception as err:
            raise ConfigError("form", str(err))

    def effective_seed(self, cli_seed: int | None) -> int:
        if cli_seed is not None:
            return cli_seed
        env = os.environ.get("POISSON_SEED")
        if env is not None:
            try:
                return int(env)
            except ValueError:
                raise ConfigError("seed", f"POISSON_SEED={env!r} is not an integer")
        return self.seed

    def echo(self) -> dict:
        return dict(self.raw)


def load_config(path) -> RunConfig:
    try:
        raw = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ConfigError("config", f"file not found: {path}")
    except json.JSONDecodeError as err:
        raise ConfigError("config", f"invalid JSON: {err}")
    return config_from_dict(raw)


def config_from_dict(raw: dict) -> RunConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config", "top level must be an object")
    genus = raw.get("genus", 2)
    if not isinstance(genus, int) or genus < 1:
        raise ConfigError("genus", f"must be a positive integer, got {genus!r}")
    seed = raw.get("seed", 0)
    if not isinstance(seed, int):
        raise ConfigError("seed", f"must be an integer, got {seed!r}")
    jobs = raw.get("jobs")
    if jobs is not None and (not isinstance(jobs, int) or jobs < 1):
        raise ConfigError("jobs", f"must be a positive integer, got {jobs!r}")
    cfg = RunConfig(
        group_spec=raw.get("group", "SU2"),
        genus=genus,
        central=raw.get("central", "I"),
        form_spec=raw.get("form", {"type": "identity"}),
        seed=seed,
        jobs=jobs,
        out=raw.get("out", "."),
        params=raw.get("params", {}),
        raw=raw,
    )
    group = cfg.build_group()          # validates group
    cfg.build_central(group)           # validates central
    cfg.build_form(group)              # validates form
    return cfg
