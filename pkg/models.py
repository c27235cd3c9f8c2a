import json
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

REPORT_SCHEMA = "kantower.report/1"
# Integers beyond this magnitude are written as decimal strings.
EXACT_INT_LIMIT = 2**53

Verb = Literal[
    "validate",
    "homology",
    "hall-basis",
    "witt",
    "collect",
    "cross-effect",
    "nilq",
    "loop-group",
    "tower-pi0",
    "layer-homotopy",
    "space",
]


class RefEntry(BaseModel):
    model_config = ConfigDict(extra="forbid")

    degeneracies: List[int] = Field(default_factory=list)
    base: str


class SimplexEntry(BaseModel):
    model_config = ConfigDict(extra="forbid")

    id: str = Field(min_length=1)
    faces: List[RefEntry] = Field(default_factory=list)


class SpaceFile(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str
    simplices: List[List[SimplexEntry]]


class PresentationFile(BaseModel):
    model_config = ConfigDict(extra="forbid")

    generators: List[str]
    relators: List[str] = Field(default_factory=list)


# per-verb options, checked before any computation starts


class DegreeOptions(BaseModel):
    model_config = ConfigDict(extra="forbid")

    degree: int = Field(ge=0)


class RankOptions(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    generators: int = Field(ge=0)
    nil_class: int = Field(ge=1, alias="class")


class CollectOptions(RankOptions):
    word: str


class CrossEffectOptions(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    nil_class: int = Field(ge=1, alias="class")
    ranks: List[int] = Field(min_length=2)


class ClassOptions(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    nil_class: int = Field(ge=1, alias="class")


class LayerHomotopyOptions(ClassOptions):
    degree: int = Field(ge=0)


class SpaceOptions(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str
    params: List[int] = Field(default_factory=list)


class EmptyOptions(BaseModel):
    model_config = ConfigDict(extra="forbid")


VERB_OPTIONS: Dict[str, type[BaseModel]] = {
    "validate": EmptyOptions,
    "homology": DegreeOptions,
    "hall-basis": RankOptions,
    "witt": RankOptions,
    "collect": CollectOptions,
    "cross-effect": CrossEffectOptions,
    "nilq": ClassOptions,
    "loop-group": DegreeOptions,
    "tower-pi0": ClassOptions,
    "layer-homotopy": LayerHomotopyOptions,
    "space": SpaceOptions,
}

VERB_INPUTS: Dict[str, int] = {
    "validate": 1,
    "homology": 1,
    "nilq": 1,
    "loop-group": 1,
    "tower-pi0": 1,
    "layer-homotopy": 1,
}


class Command(BaseModel):
    verb: Verb
    options: Dict[str, Any] = Field(default_factory=dict)
    inputs: List[str] = Field(default_factory=list)


class Report(BaseModel):
    report_schema: str = Field(default=REPORT_SCHEMA, alias="schema")
    verb: str
    inputs_digest: str
    exit_code: int = 0
    result: Any = None
    error: Optional[Dict[str, Any]] = None

    model_config = ConfigDict(populate_by_name=True)


class FixtureCase(BaseModel):
    """A recorded CLI run: the command and the exact report it must reproduce."""

    model_config = ConfigDict(extra="forbid")

    name: str
    verb: Verb
    options: Dict[str, Any] = Field(default_factory=dict)
    inputs: List[str] = Field(default_factory=list)
    exit_code: int = 0
    report: Dict[str, Any]


def exact(value: Any) -> Any:
    """Copy of a JSON payload with oversized integers turned into decimal strings."""
    if isinstance(value, bool):
        return value
    if isinstance(value, int):
        return str(value) if abs(value) > EXACT_INT_LIMIT else value
    if isinstance(value, dict):
        return {k: exact(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [exact(v) for v in value]
    return value


def canonical_json(value: Any) -> str:
    return json.dumps(exact(value), sort_keys=True, separators=(",", ":"))
