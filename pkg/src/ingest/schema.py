"""
pydantic models of the canonical profile document.

Nodes are validated one at a time by the tree builder (children are kept as
raw values here), so arbitrarily deep trees never recurse through pydantic.
"""
from typing import Annotated, Any, Dict, List, Literal, Optional, Type, TypeVar, Union

from pydantic import BaseModel, ConfigDict, Field, StrictFloat, StrictInt, ValidationError

from src.utils.errors import SchemaError

ModelT = TypeVar("ModelT", bound=BaseModel)

MetricValue = Optional[StrictFloat]
LineNumber = Annotated[StrictInt, Field(ge=0)]


class FrameModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str = Field(min_length=1)
    file: Optional[str] = None
    line: Optional[LineNumber] = None


class NodeModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    frame: FrameModel
    metrics: Dict[str, List[MetricValue]] = Field(default_factory=dict)
    children: List[Any] = Field(default_factory=list)


class ProfileDocument(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    schema_tag: Literal["chopper-profile-v1"] = Field(alias="schema")
    exec_id: Optional[str] = None
    ranks: Annotated[StrictInt, Field(gt=0)]
    metrics: List[str]
    roots: List[Any]


class LiteralFrameModel(FrameModel):
    # literal trees copied from other tools may carry extra frame keys (e.g. "type")
    model_config = ConfigDict(extra="ignore")


class LiteralNodeModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    frame: LiteralFrameModel
    metrics: Dict[str, Union[List[MetricValue], MetricValue]] = Field(default_factory=dict)
    children: List[Any] = Field(default_factory=list)


def validate(model: Type[ModelT], raw: Any, path: str) -> ModelT:
    """Validate ``raw`` and translate pydantic errors into a SchemaError at ``path``"""
    try:
        return model.model_validate(raw)
    except ValidationError as e:
        error = e.errors()[0]
        location = ".".join(str(part) for part in error["loc"])
        full_path = ".".join(part for part in (path, location) if part)
        raise SchemaError(error["msg"], full_path or "<document>") from None
