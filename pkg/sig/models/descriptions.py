"""Raw input descriptions, as read from files or received over HTTP.

These carry names only; `sig.services.game` turns them into validated
structures.
"""

from pydantic import BaseModel, Field


class Transition(BaseModel):
    """One `trans <s> <a> <t>` line."""

    source: str
    action: str
    target: str


class Observation(BaseModel):
    """One `obs <s> <player>: <p>...` line (non-action atoms only)."""

    state: str
    player: str
    atoms: list[str] = Field(default_factory=list)


class GameDescription(BaseModel):
    """A game file."""

    name: str
    players: list[str]
    actions: dict[str, list[str]] = Field(
        default_factory=dict, description="Player id -> actions owned by that player"
    )
    atoms: list[str] = Field(default_factory=list, description="User atoms (no act_ atoms)")
    states: list[str]
    transitions: list[Transition] = Field(default_factory=list)
    observations: list[Observation] = Field(default_factory=list)


class WorldAssignment(BaseModel):
    """One `<w>:<s>` entry of a `worlds` line."""

    world: str
    state: str


class Link(BaseModel):
    """A generator pair for one player's relation."""

    player: str
    left: str
    right: str


class ModelDescription(BaseModel):
    """An epistemic model file."""

    name: str
    game: str
    worlds: list[WorldAssignment]
    links: list[Link] = Field(default_factory=list)
    point: str | None = None


class ObservationDescription(BaseModel):
    """An observation model file; unlisted pairs stay distinguishable."""

    name: str
    blurs: list[Link] = Field(default_factory=list)


class ValuationEntry(BaseModel):
    """One `val <w> <player>: <p>...` line of an ETL file."""

    world: str
    player: str
    atoms: list[str] = Field(default_factory=list)


class ETLDescription(BaseModel):
    """An epistemic temporal model file."""

    name: str
    players: list[str]
    actions: dict[str, list[str]] = Field(default_factory=dict)
    atoms: list[str] = Field(default_factory=list)
    worlds: list[str]
    transitions: list[Transition] = Field(default_factory=list)
    valuation: list[ValuationEntry] = Field(default_factory=list)
    links: list[Link] = Field(default_factory=list)
    frontier: list[str] = Field(default_factory=list)
