"""Configuration loading and validation."""
from __future__ import annotations

import math
from pathlib import Path
from typing import Annotated, Any, Dict, Literal, Optional, Union

import numpy as np
import yaml
from pydantic import BaseModel, ConfigDict, Field, field_validator
from pydantic_settings import BaseSettings, PydanticBaseSettingsSource, SettingsConfigDict

from . import utils
from .densities.mixing import MixingLaw, PointMass
from .densities.smn import SmnDensity
from .estimators.point import Identity, PointEstimator
from .estimators.predictive import PredictiveDensity, mre_estimator, plugin
from .metrics.losses import L2Integrated, LossSpec
from .sim.engine import SimModel

CONFIG_VERSION = 1
OutputFormat = Literal["csv", "json"]


class ConfigFileSettingsSource(PydanticBaseSettingsSource):
    """Load settings from a YAML or JSON configuration file."""

    def __init__(self, settings_cls: type[BaseSettings], config_path: Optional[Path]):
        super().__init__(settings_cls)
        self.config_path = config_path
        self._data: Optional[Dict[str, Any]] = None

    def _load(self) -> Dict[str, Any]:
        if self._data is not None:
            return self._data
        if self.config_path is None or not self.config_path.exists():
            self._data = {}
            return self._data
        # yaml.safe_load also reads JSON
        data = yaml.safe_load(self.config_path.read_text())
        self._data = data if isinstance(data, dict) else {}
        return self._data

    def __call__(self) -> Dict[str, Any]:
        return self._load()

    def get_field_value(self, field: Any, field_name: str) -> tuple[Any, str, bool]:
        data = self._load()
        if field_name not in data:
            return None, field_name, False
        value = data[field_name]
        return value, field_name, isinstance(value, (dict, list))


class AppSettings(BaseSettings):
    """Runtime settings resolved from CLI/env/config file."""

    model_config = SettingsConfigDict(env_prefix="PDRISK_", env_file=".env", extra="ignore")

    config_path: Optional[Path] = Field(default=None, exclude=True)

    seed: Optional[int] = Field(default=None, ge=0)
    threads: int = Field(default=1, ge=1)
    n_scalar: int = Field(default=10**6, ge=2)
    n_scan: int = Field(default=10**5, ge=2)
    output_format: OutputFormat = "json"
    out_path: Optional[Path] = None

    @classmethod
    def settings_customise_sources(
        cls,
        settings_cls: type[BaseSettings],
        init_settings: PydanticBaseSettingsSource,
        env_settings: PydanticBaseSettingsSource,
        dotenv_settings: PydanticBaseSettingsSource,
        file_secret_settings: PydanticBaseSettingsSource,
    ) -> tuple[PydanticBaseSettingsSource, ...]:
        init_kwargs = getattr(init_settings, "init_kwargs", {})  # type: ignore[attr-defined]
        file_source = ConfigFileSettingsSource(settings_cls, init_kwargs.get("config_path"))
        # Precedence: CLI (init) > environment > .env > config file > file secrets
        return (
            init_settings,
            env_settings,
            dotenv_settings,
            file_source,
            file_secret_settings,
        )


def load_settings(config_path: Optional[Path] = None, overrides: Optional[Dict[str, Any]] = None) -> AppSettings:
    overrides = {key: value for key, value in (overrides or {}).items() if value is not None}
    if config_path is not None:
        overrides.setdefault("config_path", config_path)
    return AppSettings(**overrides)


class NormalModelConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["normal"] = "normal"
    p: int = Field(ge=1)
    var_x: float = Field(gt=0)
    var_y: float = Field(gt=0)

    @property
    def r(self) -> float:
        return self.var_x / self.var_y

    def sim_model(self) -> SimModel:
        return SimModel(
            px=SmnDensity(dim=self.p, mixing=PointMass(value=self.var_x)),
            qy=SmnDensity(dim=self.p, mixing=PointMass(value=self.var_y)),
        )


class SmnModelConfig(BaseModel):
    """``X - mu ~ SN_p(G)`` and ``Y - mu ~ SN_p(H)``."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["smn"] = "smn"
    p: int = Field(ge=1)
    g: MixingLaw
    h: MixingLaw

    def sim_model(self) -> SimModel:
        return SimModel(px=SmnDensity(dim=self.p, mixing=self.g), qy=SmnDensity(dim=self.p, mixing=self.h))


ModelConfig = Annotated[Union[NormalModelConfig, SmnModelConfig], Field(discriminator="kind")]


class EstimatorConfig(BaseModel):
    """Plug-in (``q_Y`` recentred) or MRE base, a location rule and a variance expansion ``c2``."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    label: str
    base: Literal["plugin", "mre"] = "plugin"
    location: PointEstimator = Field(default_factory=Identity)
    c2: float = Field(default=1.0, gt=0)

    def build(self, model: SimModel) -> PredictiveDensity:
        if self.base == "mre":
            mre = mre_estimator(model.px, model.qy)  # type: ignore[arg-type]
            return PredictiveDensity(base=mre.base, location=self.location, scale=math.sqrt(self.c2), label=self.label)
        return plugin(model.qy, self.location, scale=math.sqrt(self.c2), label=self.label)  # type: ignore[arg-type]


class ExperimentConfig(BaseModel):
    """One scenario: a model, the estimators to compare, a loss and a grid of locations."""

    model_config = ConfigDict(extra="forbid")

    version: int = CONFIG_VERSION
    name: str
    model: ModelConfig
    estimators: list[EstimatorConfig] = Field(min_length=1)
    loss: LossSpec = Field(default_factory=L2Integrated)
    mu_grid: Optional[list[list[float]]] = None
    n: int = Field(default=100_000, ge=2)
    seed: Optional[int] = Field(default=None, ge=0)
    output_path: Optional[Path] = None
    output_format: OutputFormat = "json"

    @field_validator("version")
    @classmethod
    def _known_version(cls, value: int) -> int:
        if value != CONFIG_VERSION:
            raise ValueError(f"unsupported config version {value}; expected {CONFIG_VERSION}")
        return value

    @field_validator("mu_grid")
    @classmethod
    def _nonempty_grid(cls, value: Optional[list[list[float]]]) -> Optional[list[list[float]]]:
        if value is not None and not value:
            raise ValueError("mu_grid must not be empty")
        return value

    def grid_points(self) -> list[np.ndarray] | None:
        if self.mu_grid is None:
            return None
        return [utils.as_vector(point, self.model.p) for point in self.mu_grid]

    def to_spec(self) -> dict[str, Any]:
        # python mode keeps infinite interval ends; json_dumps writes them as "inf"
        data = self.model_dump(mode="python")
        data["output_path"] = str(self.output_path) if self.output_path is not None else None
        return data


def load_experiment(path: Path) -> ExperimentConfig:
    text = path.read_text()
    data = utils.json_loads(text) if path.suffix.lower() == ".json" else yaml.safe_load(text)
    if not isinstance(data, dict):
        raise ValueError(f"{path} does not contain a config object")
    return ExperimentConfig.model_validate(data)


def dump_experiment(config: ExperimentConfig) -> str:
    return utils.json_dumps(config.to_spec(), indent=True)


__all__ = [
    "AppSettings",
    "ConfigFileSettingsSource",
    "EstimatorConfig",
    "ExperimentConfig",
    "ModelConfig",
    "NormalModelConfig",
    "SmnModelConfig",
    "dump_experiment",
    "load_experiment",
    "load_settings",
]
