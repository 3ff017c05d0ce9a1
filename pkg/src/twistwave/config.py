"""Run configuration: one JSON document plus dotted-key overrides."""
from __future__ import annotations

import copy
import json
from dataclasses import dataclass

from .field import Grid, GridError

DEFAULTS = {
    "grid": {"extent": 8.0, "n": 2048},
    "zak": {"M": 32, "H": 64.0, "n_eta": 1024, "n_t": None},
    "spectral": {"H": 16.0, "n_eta": 4096, "band": [0.125, 8.0]},
    "tolerances": {
        "gram": 1e-6,
        "identity": 1e-12,
        "kernel": 1e-8,
        "hs": 1e-6,
        "oracle": 1e-10,
        "zak": 1e-10,
        "marginal": 1e-6,
        "isometry": 1e-3,
        "frame_slack": 0.05,
        "parseval": 1e-3,
        "calderon": 1e-6,
        "inequality": 1e-6,
    },
    "family": {"kind": "haar", "j_min": -3, "j_max": 3, "path": None, "corrupted": False},
    "gram": {"j": [-1, 0, 1], "k": [-2, 2], "l": [-2, 2], "m": [0, 0], "modified": False},
    "field": "haar0",
    "lattice_radius": 16,
    "frame_radius": 8,
    "seed": 0,
    "output": {"dir": "twc_out", "formats": ["json", "csv"]},
}


class ConfigError(ValueError):
    pass


def _parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        low = text.lower()
        if low in ("true", "false"):
            return low == "true"
        return text


def _merge(base: dict, upd: dict, path: str = ""):
    for k, v in upd.items():
        if k not in base:
            raise ConfigError(f"unknown config key {path + k!r}")
        if isinstance(base[k], dict) and isinstance(v, dict):
            _merge(base[k], v, path + k + ".")
        else:
            base[k] = v


@dataclass
class RunConfig:
    data: dict

    @classmethod
    def build(cls, path=None, overrides=()) -> "RunConfig":
        d = copy.deepcopy(DEFAULTS)
        if path:
            try:
                with open(path) as fh:
                    _merge(d, json.load(fh))
            except (OSError, json.JSONDecodeError) as e:
                raise ConfigError(f"cannot read config {path}: {e}") from e
        for key, text in overrides:
            cls._set(d, key, _parse_value(text) if isinstance(text, str) else text)
        cfg = cls(d)
        cfg.validate()
        return cfg

    @staticmethod
    def _set(d: dict, key: str, value):
        parts = key.split(".")
        node = d
        for p in parts[:-1]:
            if not isinstance(node.get(p), dict):
                raise ConfigError(f"unknown config key {key!r}")
            node = node[p]
        if parts[-1] not in node:
            raise ConfigError(f"unknown config key {key!r}")
        if parts[-1] == "formats" and isinstance(value, str):
            value = [v for v in value.split(",") if v]
        node[parts[-1]] = value

    def get(self, key: str):
        node = self.data
        for p in key.split("."):
            node = node[p]
        return node

    def validate(self):
        d = self.data
        try:
            self.grid()
            self.zak_params()
        except (GridError, ValueError, TypeError) as e:
            raise ConfigError(str(e)) from e
        for k, v in d["tolerances"].items():
            if not isinstance(v, (int, float)) or not v > 0:
                raise ConfigError(f"tolerance {k} must be positive")
        fam = d["family"]
        if fam["kind"] not in ("haar", "tiling", "file"):
            raise ConfigError(f"unknown family kind {fam['kind']!r}")
        if int(fam["j_min"]) > int(fam["j_max"]):
            raise ConfigError("family.j_min must not exceed family.j_max")
        if int(d["spectral"]["n_eta"]) < 2 or not float(d["spectral"]["H"]) > 0:
            raise ConfigError("spectral window needs H > 0 and n_eta >= 2")
        for f in d["output"]["formats"]:
            if f not in ("json", "csv"):
                raise ConfigError(f"unknown output format {f!r}")
        if int(d["lattice_radius"]) < 0 or int(d["frame_radius"]) < 0:
            raise ConfigError("lattice radii must be nonnegative")

    def grid(self) -> Grid:
        g = self.data["grid"]
        return Grid(float(g["extent"]), int(g["n"]))

    def zak_params(self):
        from .zak import ZakParams

        z = self.data["zak"]
        return ZakParams(M=int(z["M"]), H=float(z["H"]), n_eta=int(z["n_eta"]),
                         n_t=None if z["n_t"] is None else int(z["n_t"]))

    def tol(self, name: str) -> float:
        return float(self.data["tolerances"][name])
