"""Analysis API endpoints."""

import logging

from fastapi import APIRouter

from sig.config import get_settings
from sig.errors import UsageError
from sig.models.descriptions import GameDescription, ModelDescription, ObservationDescription
from sig.models.reports import CheckReport
from sig.models.requests import (
    EvalRequest,
    EvalResponse,
    NormalityRequest,
    RunRequest,
    RunResponse,
    ValidateRequest,
    ValidateResponse,
)
from sig.services.dot import render_dot
from sig.services.formula import modal_action_depth, parse_formula
from sig.services.game import (
    EpistemicModel,
    GameStructure,
    ObservationModel,
    identity_observation,
    validate_epistemic,
    validate_game,
    validate_observation,
)
from sig.services.normality import check_normality
from sig.services.semantics import eval_del, eval_etl
from sig.services.update import close_frontier, generate_run, run_layers
from sig.services.worlds import RunWorld

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/api", tags=["analysis"])


def _load(
    game_raw: GameDescription,
    model_raw: ModelDescription,
    observation_raw: ObservationDescription | None,
) -> tuple[GameStructure, EpistemicModel, ObservationModel]:
    game = validate_game(game_raw)
    if model_raw.game != game.name:
        raise UsageError(f"model {model_raw.name} is over game '{model_raw.game}', not '{game.name}'")
    model = validate_epistemic(model_raw, game)
    if observation_raw is None:
        observation = identity_observation(game.signature)
    else:
        observation = validate_observation(observation_raw, game.signature)
    return game, model, observation


def _depth(requested: int | None) -> int:
    return requested if requested is not None else get_settings().default_depth


@router.post("/validate", response_model=ValidateResponse)
def validate(body: ValidateRequest) -> ValidateResponse:
    """Validate a game and, when given, a model and an observation model over it."""
    game = validate_game(body.game)
    worlds = None
    if body.model is not None:
        if body.model.game != game.name:
            raise UsageError(f"model {body.model.name} is over game '{body.model.game}', not '{game.name}'")
        worlds = len(validate_epistemic(body.model, game).worlds)
    observation = None
    if body.observation is not None:
        observation = validate_observation(body.observation, game.signature).name
    sig = game.signature
    return ValidateResponse(
        game=game.name,
        states=len(game.states),
        transitions=len(game.trans),
        players=list(sig.players),
        actions=list(sig.actions),
        atoms=list(sig.atoms),
        worlds=worlds,
        observation=observation,
    )


@router.post("/run", response_model=RunResponse)
def run(body: RunRequest) -> RunResponse:
    """Generate the depth-bounded run model."""
    _, model, observation = _load(body.game, body.model, body.observation)
    depth = _depth(body.depth)
    result = generate_run(model, observation, depth)
    actions, epistemic = result.edge_count()
    logger.info(f"Run {result.name}: {len(result.worlds)} worlds to depth {depth}")
    return RunResponse(
        name=result.name,
        depth=depth,
        worlds=len(result.worlds),
        layers=[len(layer) for layer in run_layers(result)],
        action_edges=actions,
        epistemic_edges=epistemic,
        dot=render_dot(result) if body.dot else None,
    )


@router.post("/eval", response_model=EvalResponse)
def evaluate(body: EvalRequest) -> EvalResponse:
    """Evaluate a formula at a world under ⊨ (del) or ⊩ (etl)."""
    game, model, observation = _load(body.game, body.model, body.observation)
    formula = parse_formula(body.formula, game.signature)
    world = body.world if body.world is not None else model.point
    if world is None:
        raise UsageError("no world given and the model has no point")
    model.require_world(world)
    if body.semantics == "del":
        value = eval_del(game, model, world, observation, formula)
    else:
        needed = modal_action_depth(formula)
        if body.depth is not None and body.depth < needed:
            raise UsageError(f"depth {body.depth} is below the formula's action depth {needed}")
        depth = body.depth if body.depth is not None else max(get_settings().default_depth, needed)
        value = eval_etl(generate_run(model, observation, depth), RunWorld(world, ()), formula)
    return EvalResponse(formula=str(formula), world=str(world), semantics=body.semantics, value=value)


@router.post("/normality", response_model=CheckReport)
def normality(body: NormalityRequest) -> CheckReport:
    """Generate a run and check it against the normal ETL conditions."""
    _, model, observation = _load(body.game, body.model, body.observation)
    result = generate_run(model, observation, _depth(body.depth))
    if body.closed:
        return check_normality(close_frontier(result), observation)
    return check_normality(result, observation)
