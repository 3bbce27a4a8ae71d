"""Run configuration shared by the CLI commands.

A config is a flat JSON object whose keys match RunConfig field names;
command-line flags override file values, which override defaults.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass

from .geometry import (
    ArrayGeometry,
    CandidateGrid,
    ConfigError,
    builtin_array,
    load_geometry,
    make_grid,
)
from .stft import StftConfig


@dataclass
class RunConfig:
    geometry: str = "builtin:head12"
    az_res_deg: float = 5.0
    el_res_deg: float = 5.0
    az_min_deg: float = -180.0
    az_max_deg: float = 180.0
    el_min_deg: float = 0.0
    el_max_deg: float = 180.0
    sample_rate: int = 16000
    window_length: int = 512
    hop: int = 256
    fft_size: int = 512
    window: str = "hann"
    feature_source: str = "phat"  # phat | oracle | file
    pool: int = 12
    method: str = "iterative"  # iterative | peaks
    k_max: int = 2
    beta_th: float = 0.2
    known_k: int | None = None
    min_separation_deg: float | None = None
    active_beta: float = 0.5
    max_azimuth_error_deg: float = 30.0
    seed: int = 0

    def validate(self) -> "RunConfig":
        if self.feature_source not in ("phat", "oracle", "file"):
            raise ConfigError(f"unknown feature_source {self.feature_source!r}")
        if self.method not in ("iterative", "peaks"):
            raise ConfigError(f"unknown method {self.method!r}")
        if not (0.0 < self.beta_th <= 1.0):
            raise ConfigError("beta_th must lie in (0, 1]")
        if self.k_max < 1:
            raise ConfigError("k_max must be >= 1")
        if self.known_k is not None and self.known_k < 1:
            raise ConfigError("known_k must be >= 1")
        if self.pool < 1:
            raise ConfigError("pool must be >= 1")
        return self

    def stft_config(self) -> StftConfig:
        return StftConfig(
            sample_rate=self.sample_rate,
            window_length=self.window_length,
            hop=self.hop,
            fft_size=self.fft_size,
            window=self.window,
        )

    def grid(self) -> CandidateGrid:
        return make_grid(
            az_range=(math.radians(self.az_min_deg), math.radians(self.az_max_deg)),
            el_range=(math.radians(self.el_min_deg), math.radians(self.el_max_deg)),
            az_res=math.radians(self.az_res_deg),
            el_res=math.radians(self.el_res_deg),
        )

    def array_geometry(self) -> ArrayGeometry:
        if self.geometry.startswith("builtin:"):
            return builtin_array(self.geometry.split(":", 1)[1])
        return load_geometry(self.geometry)

    @classmethod
    def load(cls, config_path=None, overrides: dict | None = None) -> "RunConfig":
        """Defaults, then JSON file values, then non-None overrides."""
        values: dict = {}
        if config_path is not None:
            with open(config_path, "r", encoding="utf-8") as fh:
                data = json.load(fh)
            if not isinstance(data, dict):
                raise ConfigError("config file must hold a JSON object")
            values.update(data)
        if overrides:
            values.update({k: v for k, v in overrides.items() if v is not None})
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(values) - names
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**values).validate()
