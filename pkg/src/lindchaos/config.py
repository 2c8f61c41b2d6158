"""JSON run configuration.

Complex matrices are nested row-major arrays whose entries are ``[re, im]``
pairs; a bare real number is accepted as shorthand for ``[x, 0]``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

import numpy as np

from . import tensor as ta
from .dynamics import ModelParams
from .errors import ConfigError, LindchaosError
from .tensor import Tolerances

BUILTIN_CONFIGS = ("qubit",)


def decode_matrix(obj: Any, name: str) -> np.ndarray:
    try:
        rows = []
        for row in obj:
            rows.append([complex(x[0], x[1]) if isinstance(x, (list, tuple)) else complex(x) for x in row])
        m = np.array(rows, dtype=complex)
    except (TypeError, ValueError, IndexError) as exc:
        raise ConfigError(f"{name}: malformed complex matrix ({exc})") from None
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ConfigError(f"{name}: expected a square matrix, got shape {m.shape}")
    return m


def encode_matrix(m: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m, dtype=complex)]


@dataclass
class SimConfig:
    d: int
    h_tilde: np.ndarray
    a_int: np.ndarray
    l_jump: np.ndarray
    m0: np.ndarray
    t_end: float
    dt: float
    n: int | None = None
    n_list: list[int] | None = None
    q: float | None = None
    seed: int = 0
    out_dir: Path = Path("out")
    record_stride: int = 10
    exp_moment: bool = True
    tolerances: Tolerances = field(default_factory=Tolerances)

    @property
    def params(self) -> ModelParams:
        return ModelParams(self.d, self.h_tilde, self.a_int, self.l_jump, herm_tol=self.tolerances.herm_tol)

    def validate(self, n_values: list[int] | None = None) -> None:
        """Raise ConfigError unless the model, initial state and sizes are usable."""
        try:
            self.params
        except LindchaosError as exc:
            raise ConfigError(f"invalid model: {exc}") from None
        if self.m0.shape != (self.d, self.d):
            raise ConfigError(f"m0 has shape {self.m0.shape}, expected ({self.d}, {self.d})")
        try:
            ta.check_density(self.m0, self.tolerances)
        except ValueError as exc:
            raise ConfigError(f"m0 is not a density matrix: {exc}") from None
        if ta.lambda_min(self.m0) <= 0:
            raise ConfigError("m0 must be faithful (strictly positive spectrum)")
        if not self.dt > 0 or not self.t_end >= 0:
            raise ConfigError("need dt > 0 and t_end >= 0")
        if self.record_stride < 1:
            raise ConfigError("record_stride must be >= 1")
        for n in n_values or []:
            if n < 1:
                raise ConfigError(f"particle number {n} must be >= 1")
            if self.d**n > ta.MAX_DIM:
                raise ConfigError(f"d**N = {self.d ** n} exceeds {ta.MAX_DIM}")

    def echo(self) -> dict:
        return {
            "d": self.d,
            "h_tilde": encode_matrix(self.h_tilde),
            "a_int": encode_matrix(self.a_int),
            "l_jump": encode_matrix(self.l_jump),
            "m0": encode_matrix(self.m0),
            "t_end": self.t_end,
            "dt": self.dt,
            "n": self.n,
            "n_list": self.n_list,
            "q": self.q,
            "seed": self.seed,
            "record_stride": self.record_stride,
            "exp_moment": self.exp_moment,
            "tolerances": dict(self.tolerances.__dict__),
        }


def from_dict(doc: dict) -> SimConfig:
    required = ("d", "h_tilde", "a_int", "l_jump", "m0", "t_end", "dt")
    missing = [k for k in required if k not in doc]
    if missing:
        raise ConfigError(f"missing config keys: {missing}")
    try:
        tol = Tolerances().replace(**doc.get("tolerances", {}))
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    n_list = doc.get("n_list")
    try:
        cfg = SimConfig(
            d=int(doc["d"]),
            h_tilde=decode_matrix(doc["h_tilde"], "h_tilde"),
            a_int=decode_matrix(doc["a_int"], "a_int"),
            l_jump=decode_matrix(doc["l_jump"], "l_jump"),
            m0=decode_matrix(doc["m0"], "m0"),
            t_end=float(doc["t_end"]),
            dt=float(doc["dt"]),
            n=None if doc.get("n") is None else int(doc["n"]),
            n_list=None if n_list is None else [int(v) for v in n_list],
            q=None if doc.get("q") is None else float(doc["q"]),
            seed=int(doc.get("seed", 0)),
            out_dir=Path(doc.get("out_dir", "out")),
            record_stride=int(doc.get("record_stride", 10)),
            exp_moment=bool(doc.get("exp_moment", True)),
            tolerances=tol,
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    cfg.validate()
    return cfg


def load_config(path: str | Path) -> SimConfig:
    """Load a JSON config from a path, or a shipped config by name (e.g. ``qubit``)."""
    p = Path(path)
    if p.exists():
        text = p.read_text()
    elif str(path) in BUILTIN_CONFIGS:
        text = resources.files("lindchaos").joinpath(f"configs/{path}.json").read_text()
    else:
        raise ConfigError(f"config file not found: {path}")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    return from_dict(doc)
