from typing import Any, Dict, List, Optional

import pandas as pd
from pydantic import Field, field_validator

from _levybsde import constants
from _levybsde.levy_measures import CGMY, LevyModelSpec
from levybsde import schema


class ModelInputs(schema.Base):
    model: LevyModelSpec = CGMY()
    T: float = Field(1.0, gt=0)
    paths: int = Field(constants.DEFAULT_PATHS, ge=2)


class LevelInputs(ModelInputs):
    levels: List[int] = list(constants.DEFAULT_LEVELS)
    eps_ref: float = Field(constants.DEFAULT_EPS_REF, ge=0)
    # None picks a beta a quarter above beta*
    beta: Optional[float] = Field(None, gt=0, lt=2)

    @field_validator("levels")
    @classmethod
    def check_levels(cls, value: List[int]):
        if len(value) < 3:
            raise ValueError(f"at least 3 levels are needed, got {value}")
        if value[0] < 1 or any(a >= b for a, b in zip(value, value[1:])):
            raise ValueError(f"levels must be positive and strictly increasing, got {value}")
        return value


def summary_frame(summary: Dict[str, Any]) -> pd.DataFrame:
    return pd.DataFrame({"key": list(summary), "value": list(summary.values())})
