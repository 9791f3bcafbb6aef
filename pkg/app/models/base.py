from pydantic import BaseModel, ConfigDict


class DomainModel(BaseModel):
    """Immutable value model shared by every domain type"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True, extra="forbid", validate_default=True)
