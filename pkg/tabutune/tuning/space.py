from __future__ import annotations

import enum
import logging
from typing import Any, Sequence

import numpy as np
import pydantic

from tabutune.utils.dataclass import BaseModel

logger = logging.getLogger(__name__)

# integers are stored as integral floats
ParamVector = tuple[float, ...]

KEY_DECIMALS = 6
# lower bound for parameters that must stay strictly positive
POSITIVE_FLOOR = 1e-4


class ParamKind(str, enum.Enum):
    integer = "integer"
    float = "float"


class ParamSpec(BaseModel):
    name: str
    kind: ParamKind
    lower: float
    upper: float
    init_lower: float | None = None
    init_upper: float | None = None

    @pydantic.model_validator(mode="after")
    def _check_bounds(self) -> ParamSpec:
        if self.init_lower is None:
            self.init_lower = self.lower
        if self.init_upper is None:
            self.init_upper = self.upper

        if not self.lower <= self.init_lower <= self.init_upper <= self.upper:
            raise ValueError(f"{self.name}: bounds must satisfy lower <= init_lower <= init_upper <= upper")
        if self.kind == ParamKind.integer:
            for bound in (self.lower, self.upper):
                if bound != int(bound):
                    raise ValueError(f"{self.name}: integer parameter with fractional bound {bound}")
        return self

    @property
    def is_integer(self) -> bool:
        return self.kind == ParamKind.integer

    def sigma(self, large: float, unit: float) -> float:
        """
        Step width of neighborhood moves: wide for parameters ranging past 1.
        """
        return large if self.upper > 1 else unit

    def repair(self, value: float) -> float:
        if self.is_integer:
            value = float(np.rint(value))
        return float(min(max(value, self.lower), self.upper))

    def draw(self, rng: np.random.Generator, full_range: bool=False) -> float:
        low, high = (self.lower, self.upper) if full_range else (self.init_lower, self.init_upper)
        return self.repair(rng.uniform(low, high))

    def grid(self, points: int) -> list[float]:
        """
        Evenly spaced values over the bounds; a single point sits in the middle.
        """
        if points < 1:
            raise ValueError(f"{self.name}: need at least one grid point")
        if points == 1:
            values = [self.lower + (self.upper - self.lower) / 2]
        else:
            values = list(np.linspace(self.lower, self.upper, points))
        return sorted({self.repair(value) for value in values})


class ParamSpace:
    """
    Ordered list of parameter specs the optimizers search over.
    """
    def __init__(self, specs: Sequence[ParamSpec], name: str=""):
        self.specs = list(specs)
        self.name = name
        names = self.names
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate parameter names: {names}")

    def __len__(self) -> int:
        return len(self.specs)

    def __iter__(self) -> Any:
        return iter(self.specs)

    def __repr__(self) -> str:
        return f"<ParamSpace {self.name} ({', '.join(self.names)})>"

    def __json__(self) -> dict[str, Any]:
        return {"specs": self.specs, "name": self.name}

    @classmethod
    def __from_json__(cls, specs: list[ParamSpec], name: str="") -> ParamSpace:
        return cls(specs, name)

    @property
    def names(self) -> list[str]:
        return [spec.name for spec in self.specs]

    def as_dict(self, vector: ParamVector) -> dict[str, float | int]:
        return {
            spec.name: int(value) if spec.is_integer else float(value)
            for spec, value in zip(self.specs, vector)
        }

    def from_dict(self, values: dict[str, float]) -> ParamVector:
        return self.repair([values[name] for name in self.names])

    def key(self, vector: ParamVector) -> ParamVector:
        """
        Identity of a vector for tabu and memo lookups.
        """
        return tuple(
            float(np.rint(value)) if spec.is_integer else round(float(value), KEY_DECIMALS)
            for spec, value in zip(self.specs, vector)
        )

    def repair(self, vector: Sequence[float] | np.ndarray) -> ParamVector:
        if len(vector) != len(self.specs):
            raise ValueError(f"vector of length {len(vector)} for {len(self.specs)} parameters")
        return tuple(spec.repair(value) for spec, value in zip(self.specs, vector))

    def contains(self, vector: ParamVector) -> bool:
        return all(
            spec.lower <= value <= spec.upper and (not spec.is_integer or value == int(value))
            for spec, value in zip(self.specs, vector)
        )

    def sigmas(self, large: float, unit: float) -> np.ndarray:
        return np.array([spec.sigma(large, unit) for spec in self.specs])


def init_solution(space: ParamSpace, rng: np.random.Generator, full_range: bool=False) -> ParamVector:
    """
    Uniform draw over the initialization sub-ranges (or the full bounds).
    """
    return tuple(spec.draw(rng, full_range) for spec in space.specs)


def repair_bounds(vector: Sequence[float] | np.ndarray, space: ParamSpace) -> ParamVector:
    return space.repair(vector)


def neighbor(current: ParamVector, space: ParamSpace, rng: np.random.Generator, sigma_large: float=2., sigma_unit: float=0.1, deltas: Sequence[float] | None=None) -> ParamVector:
    """
    Gaussian move on every coordinate, then rounding and clamping.
    `deltas` replaces the random draw.
    """
    if deltas is None:
        deltas = rng.normal(0., space.sigmas(sigma_large, sigma_unit))
    moved = np.asarray(current, dtype=np.float64) + np.asarray(deltas, dtype=np.float64)
    return space.repair(moved)


def _integer(name: str, lower: int, upper: int, init: tuple[int, int] | None=None) -> ParamSpec:
    init_lower, init_upper = init if init is not None else (None, None)
    return ParamSpec(name=name, kind=ParamKind.integer, lower=lower, upper=upper, init_lower=init_lower, init_upper=init_upper)


def _float(name: str, lower: float, upper: float, init: tuple[float, float] | None=None) -> ParamSpec:
    init_lower, init_upper = init if init is not None else (None, None)
    return ParamSpec(name=name, kind=ParamKind.float, lower=lower, upper=upper, init_lower=init_lower, init_upper=init_upper)


def gbt_space() -> ParamSpace:
    return ParamSpace([
        _integer("n_estimators", 1, 50, (1, 5)),
        _integer("max_depth", 0, 50, (1, 5)),
        _float("learning_rate", 0., 1., (0.001, 0.1)),
        _float("gamma", 0., 50., (0., 1.)),
        _integer("max_delta_step", 0, 50, (0, 5)),
        _integer("n_parallel_trees", 0, 50, (1, 5)),
    ], name="gbt")


def adab_space() -> ParamSpace:
    return ParamSpace([
        _integer("n_estimators", 1, 50, (1, 5)),
        _float("learning_rate", 0., 1., (0.001, 0.1)),
        _integer("base_max_depth", 1, 50, (1, 5)),
        _integer("base_min_samples_split", 1, 50, (1, 5)),
        _integer("base_min_samples_leaf", 1, 50, (1, 5)),
    ], name="adab")


def mlp_space() -> ParamSpace:
    return ParamSpace([
        _integer("hidden_1", 1, 30, (1, 5)),
        _integer("hidden_2", 1, 30, (1, 5)),
        _integer("hidden_3", 1, 30, (1, 5)),
        _float("learning_rate", POSITIVE_FLOOR, 1., (0.001, 0.1)),
        _float("momentum", POSITIVE_FLOOR, 1., (0.001, 0.1)),
        _float("alpha", POSITIVE_FLOOR, 1., (0.001, 0.1)),
    ], name="mlp")


PRESETS = {
    "gbt": gbt_space,
    "adab": adab_space,
    "mlp": mlp_space,
}


def space_for(algorithm: str) -> ParamSpace:
    try:
        return PRESETS[algorithm]()
    except KeyError:
        raise ValueError(f"no parameter space for {algorithm}")
