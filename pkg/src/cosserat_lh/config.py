"""Run configuration (JSON) with strict validation.

Unknown keys anywhere in the document are rejected. ``docs/config.schema.json``
is generated from these models by ``RunConfig.model_json_schema()``.
"""

from __future__ import annotations

import hashlib
import inspect
import json
from pathlib import Path
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from . import kinematics
from .errors import ConfigError
from .kinematics import FACES
from .stability import DEFAULT_RESOLUTION, MIN_RESOLUTION, REFINE_CANDIDATES, REFINE_ITERATIONS

Vec3 = tuple[float, float, float]

DEFAULT_MATERIAL = {"mu": 1.0, "mu_c": 0.5, "lambda": 0.0, "a1": 1.0, "a2": 1.0, "a3": 1.0}
MATERIAL_KEYS = tuple(DEFAULT_MATERIAL)


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)


class MaterialConfig(_Strict):
    mu: Optional[float] = None
    mu_c: Optional[float] = None
    lam: Optional[float] = Field(default=None, alias="lambda")
    a1: Optional[float] = None
    a2: Optional[float] = None
    a3: Optional[float] = None

    def given(self):
        d = self.model_dump(by_alias=True)
        return {k: v for k, v in d.items() if v is not None}


class FieldConfig(_Strict):
    kind: Literal["identity", "uniform_stretch", "axis_twist", "sinusoidal", "nodes"] = "identity"
    n_per_axis: int = Field(default=5, ge=3)
    lo: Vec3 = (0.0, 0.0, 0.0)
    hi: Vec3 = (1.0, 1.0, 1.0)
    params: dict = Field(default_factory=dict)
    chi: Optional[list] = None
    R: Optional[list] = None
    traction_faces: list[str] = list(FACES)
    couple_faces: list[str] = list(FACES)

    @field_validator("traction_faces", "couple_faces")
    @classmethod
    def _faces(cls, v):
        bad = [f for f in v if f not in FACES]
        if bad:
            raise ValueError(f"unknown faces {bad}; expected a subset of {list(FACES)}")
        return v

    def build(self, n_per_axis=None):
        n = self.n_per_axis if n_per_axis is None else n_per_axis
        if self.kind == "nodes":
            if self.chi is None or self.R is None:
                raise ConfigError("field kind 'nodes' needs both 'chi' and 'R' arrays")
            return kinematics.FieldGrid(np.asarray(self.chi, dtype=float),
                                        np.asarray(self.R, dtype=float), self.lo, self.hi)
        if self.chi is not None or self.R is not None:
            raise ConfigError("'chi'/'R' arrays are only accepted with kind 'nodes'")
        fn = kinematics.CATALOG[self.kind]
        allowed = set(inspect.signature(fn).parameters) - {"n", "lo", "hi"}
        unknown = set(self.params) - allowed
        if unknown:
            raise ConfigError(f"unknown parameters for field {self.kind!r}: {sorted(unknown)}; "
                              f"allowed: {sorted(allowed)}")
        return fn(n, lo=self.lo, hi=self.hi, **self.params)


class ScanConfig(_Strict):
    resolution: int = Field(default=DEFAULT_RESOLUTION, ge=MIN_RESOLUTION)
    refine_iterations: int = Field(default=REFINE_ITERATIONS, ge=0)
    refine_candidates: int = Field(default=REFINE_CANDIDATES, ge=1)


class ProbeConfig(_Strict):
    x0: Optional[Vec3] = None
    a: Vec3 = (1.0, 0.3, -0.2)
    b: Vec3 = (0.2, -0.5, 0.7)
    n: Vec3 = (0.6, 0.8, 0.0)
    k_list: list[float] = [8.0, 16.0, 32.0]
    eps_list: list[float] = [0.25]
    bump: str = "cos2"
    n_per_axis: int = Field(default=33, ge=3)


class OutputConfig(_Strict):
    json_path: Optional[str] = Field(default=None, alias="json")
    csv_path: Optional[str] = Field(default=None, alias="csv")


class ToleranceConfig(_Strict):
    eig_tol: Optional[float] = Field(default=None, gt=0)


class ValidateConfig(_Strict):
    n_states: int = Field(default=100, ge=1)


class RunConfig(_Strict):
    material: MaterialConfig = MaterialConfig()
    field: FieldConfig = FieldConfig()
    scan: ScanConfig = ScanConfig()
    probe: ProbeConfig = ProbeConfig()
    output: OutputConfig = OutputConfig()
    tolerances: ToleranceConfig = ToleranceConfig()
    validate_: ValidateConfig = Field(default=ValidateConfig(), alias="validate")
    seed: Optional[int] = None

    def canonical(self):
        return self.model_dump(mode="json", by_alias=True)

    def echo(self):
        """Settings that affect results; output paths are left out."""
        d = self.canonical()
        d.pop("output")
        return d

    def digest(self):
        text = json.dumps(self.echo(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode("utf-8")).hexdigest()


def load_config(path=None):
    if path is None:
        return RunConfig()
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(raw)


def parse_config(raw):
    try:
        return RunConfig.model_validate(raw)
    except ValidationError as exc:
        raise ConfigError(str(exc)) from exc
