from __future__ import annotations

import enum
import logging
import os
from pathlib import Path
from typing import Any

import pydantic
from typing_extensions import Self

from tabutune.config import config as global_config
from tabutune.dataset import MissingProfile
from tabutune.dataset.synth import DEFAULT_ADMIT_FRACTION
from tabutune.feature_selection import SelectionConfig, SelectionMethod
from tabutune.resampling import SmoteConfig
from tabutune.tuning import TsConfig
from tabutune.utils.config import ConfigNew
from tabutune.utils.dataclass import BaseModel, Field

logger = logging.getLogger(__name__)


class Algorithm(str, enum.Enum):
    t_gbt = "t_gbt"
    t_adab = "t_adab"
    t_mlp = "t_mlp"
    gbt = "gbt"
    adab = "adab"
    mlp = "mlp"

    @property
    def tuned(self) -> bool:
        return self.value.startswith("t_")

    @property
    def learner_name(self) -> str:
        return self.value.removeprefix("t_")

    @property
    def label(self) -> str:
        return self.value.replace("t_", "T-").upper()


class SynthConfig(BaseModel):
    rows: int = pydantic.Field(5000, ge=1)
    admit_fraction: float = pydantic.Field(DEFAULT_ADMIT_FRACTION, gt=0, lt=1)
    profile: MissingProfile | None = None
    seed: int = 0


class ExperimentConfig(ConfigNew):
    """
    One study: data source, preprocessing, selection, tuning and output.
    Without `data_path` the synthetic triage generator supplies the data.
    """
    data_path: str | None = None
    schema_path: str | None = None
    label_column: str | None = None
    synth: SynthConfig = Field(default_factory=SynthConfig)

    sample_size: int = pydantic.Field(5000, ge=1)
    impute_k: int = pydantic.Field(4, ge=1)
    impute_before_split: bool = True
    test_fraction: float = pydantic.Field(0.3, gt=0, lt=1)
    tuning_fraction: float = pydantic.Field(0.3, gt=0, lt=1)
    single_split: bool = False
    seed: int = 0

    selection: SelectionConfig = Field(default_factory=SelectionConfig)
    smote: SmoteConfig = Field(default_factory=SmoteConfig)
    tabu: TsConfig = Field(default_factory=TsConfig)
    grid_budget: int | None = None

    algorithms: list[Algorithm] = Field(default_factory=lambda: list(Algorithm))
    groups: list[SelectionMethod] = Field(default_factory=lambda: list(SelectionMethod))
    parallelism: int = pydantic.Field(1, ge=1)
    output_dir: str = "tabutune_output"

    @property
    def budget(self) -> int:
        """
        Grid evaluations, by default what one tabu run spends.
        """
        if self.grid_budget is not None:
            return self.grid_budget
        return max(1, self.tabu.max_iterations * self.tabu.neighborhood_size)

    @property
    def output_path(self) -> Path:
        return Path(self.output_dir)

    @classmethod
    def smoke(cls, **overrides: Any) -> Self:
        values: dict[str, Any] = {
            "synth": SynthConfig(rows=500),
            "sample_size": 500,
            "tabu": TsConfig(max_iterations=30),
            "grid_budget": 64,
            "selection": SelectionConfig(rf_trees=10),
        }
        values.update(overrides)
        return cls(**values)

    def with_env_seed(self) -> Self:
        env_var = global_config.seed_env_var
        value = os.environ.get(env_var)
        if value is None:
            return self
        try:
            seed = int(value)
        except ValueError:
            raise ValueError(f"{env_var} must be an integer, got {value!r}")
        logger.info(f"seed {seed} from {env_var}")
        return self.model_copy(update={"seed": seed})

    @classmethod
    def load(cls, path: str | Path) -> ExperimentConfig:
        return cls.read(path).with_env_seed()
