from typing import Annotated

import pydantic
from pydantic import ConfigDict, Field, field_validator

from _levybsde.version import __version__, rounded_ver_parse


class Base(pydantic.BaseModel):
    model_config = ConfigDict(
        extra="forbid",
        validate_assignment=True,
        populate_by_name=True,
    )


class Main(Base):
    """Fields every experiment configuration carries."""

    seed: int = Field(0, ge=0, lt=2**64)
    # In levybsde_version only use major.minor.patch version - drop any pre/post/dev suffixes
    levybsde_version: Annotated[str, Field(validate_default=True)] = __version__

    @field_validator("levybsde_version")
    @classmethod
    def check_default(cls, value):
        assert cls.is_version_accepted(
            value
        ), f"levybsde_version={value} is not an accepted version, it must be equivalent to {__version__}.\nInstall a matching version of levy-bsde to reproduce results written with this configuration."
        return value

    @classmethod
    def is_version_accepted(cls, v):
        return v != "" and rounded_ver_parse(v) == rounded_ver_parse(__version__)


def is_version_accepted(v):
    """
    Given a version string, return boolean indicating whether
    levybsde_version in a configuration file would be acceptable
    for the current levy-bsde package.
    """
    return Main.is_version_accepted(v)
