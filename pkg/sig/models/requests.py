"""Request and response models for the HTTP API."""

from datetime import UTC, datetime
from typing import Literal

from pydantic import BaseModel, Field

from sig.models.descriptions import GameDescription, ModelDescription, ObservationDescription


class HealthResponse(BaseModel):
    """Health check response."""

    status: str = Field(default="healthy")
    environment: str
    timestamp: datetime = Field(default_factory=lambda: datetime.now(UTC))
    version: str = Field(default="0.1.0")


class ValidateRequest(BaseModel):
    """A game with an optional model and observation model."""

    game: GameDescription
    model: ModelDescription | None = None
    observation: ObservationDescription | None = None


class ValidateResponse(BaseModel):
    game: str
    states: int
    transitions: int
    players: list[str]
    actions: list[str]
    atoms: list[str] = Field(description="User atoms followed by action atoms")
    worlds: int | None = None
    observation: str | None = None


class RunRequest(BaseModel):
    """Inputs of a run; the observation model defaults to public announcements."""

    game: GameDescription
    model: ModelDescription
    observation: ObservationDescription | None = None
    depth: int | None = Field(default=None, ge=0)
    dot: bool = Field(default=False, description="Include DOT text of the run")


class RunResponse(BaseModel):
    name: str
    depth: int
    worlds: int
    layers: list[int]
    action_edges: int
    epistemic_edges: int
    dot: str | None = None


class EvalRequest(BaseModel):
    game: GameDescription
    model: ModelDescription
    observation: ObservationDescription | None = None
    world: str | None = Field(default=None, description="Defaults to the model's point")
    formula: str
    semantics: Literal["del", "etl"] = "del"
    depth: int | None = Field(default=None, ge=0)


class EvalResponse(BaseModel):
    formula: str
    world: str
    semantics: Literal["del", "etl"]
    value: bool


class NormalityRequest(BaseModel):
    """Generate a run and check its normality conditions."""

    game: GameDescription
    model: ModelDescription
    observation: ObservationDescription | None = None
    depth: int | None = Field(default=None, ge=0)
    closed: bool = Field(default=False, description="Check the closure of the truncated frontier")
