"""Normality conditions of epistemic temporal models, with witnesses."""

import logging
from collections.abc import Callable, Iterable
from concurrent.futures import ThreadPoolExecutor

from sig.config import get_settings
from sig.errors import UnknownIdError, UsageError
from sig.models.reports import CheckReport, ConditionResult, Witness
from sig.services.game import ObservationModel, action_atom, require_same_signature
from sig.services.update import ETLModel
from sig.services.worlds import Node, ordered

logger = logging.getLogger(__name__)

ALL_CONDITIONS = ("Nm", "Pr", "Det", "Exturn", "Info", "Ke", "Eq")
GAME_CONDITIONS = ("Det", "Exturn", "Info")
NEEDS_OBSERVATION = frozenset({"Nm", "Pr"})


def etl_act(model: ETLModel, world: Node) -> frozenset[str]:
    """Act(s): actions with at least one successor at `world`."""
    model.require_world(world)
    return model.act(world)


def etl_turn(model: ETLModel, world: Node) -> frozenset[str]:
    """Turn(s): the players owning every action in Act(s), empty when Act(s) is."""
    acts = etl_act(model, world)
    if not acts:
        return frozenset()
    owners = {model.signature.owner(a) for a in acts}
    return frozenset(owners) if len(owners) == 1 else frozenset()


def _labels(model: ETLModel, *worlds: Node) -> list[str]:
    return [model.label(w) for w in worlds]


def _check_nm(model: ETLModel, obs: ObservationModel, result: ConditionResult, cap: int) -> None:
    for player in model.signature.players:
        for s in model.worlds:
            for s2 in ordered(model.alternatives(player, s)):
                for a in model.signature.actions:
                    for t2 in ordered(model.successors(a, s2)):
                        for b in sorted(obs.blur_class(player, a)):
                            for t in ordered(model.successors(b, s)):
                                if model.observed(t, player) != model.observed(t2, player):
                                    continue
                                result.checked += 1
                                if t2 not in model.alternatives(player, t):
                                    result.record(
                                        Witness(
                                            condition="Nm",
                                            worlds=_labels(model, s, s2, t, t2),
                                            actions=[b, a],
                                            player=player,
                                            message=f"{model.label(t)} and {model.label(t2)} should be related",
                                        ),
                                        cap,
                                    )


def _check_pr(model: ETLModel, obs: ObservationModel, result: ConditionResult, cap: int) -> None:
    for a in model.signature.actions:
        for s in model.worlds:
            for t in ordered(model.successors(a, s)):
                for player in model.signature.players:
                    for t2 in ordered(model.alternatives(player, t)):
                        result.checked += 1
                        if not _has_blurred_predecessor(model, obs, player, s, a, t2):
                            result.record(
                                Witness(
                                    condition="Pr",
                                    worlds=_labels(model, s, t, t2),
                                    actions=[a],
                                    player=player,
                                    message=f"no blurred predecessor of {model.label(t2)} related to {model.label(s)}",
                                ),
                                cap,
                            )


def _has_blurred_predecessor(
    model: ETLModel, obs: ObservationModel, player: str, s: Node, a: str, t2: Node
) -> bool:
    for s2 in model.alternatives(player, s):
        for b in obs.blur_class(player, a):
            if t2 in model.successors(b, s2):
                return True
    return False


def _check_det(model: ETLModel, result: ConditionResult, cap: int) -> None:
    for a in model.signature.actions:
        for s in model.worlds:
            targets = ordered(model.successors(a, s))
            if not targets:
                continue
            result.checked += 1
            if len(targets) > 1:
                result.record(
                    Witness(condition="Det", worlds=_labels(model, s, targets[0], targets[1]), actions=[a]),
                    cap,
                )


def _check_exturn(model: ETLModel, result: ConditionResult, cap: int) -> None:
    for s in model.worlds:
        acts = model.act(s)
        if not acts:
            continue
        result.checked += 1
        owners = sorted({model.signature.owner(a) for a in acts})
        if len(owners) > 1:
            result.record(
                Witness(
                    condition="Exturn",
                    worlds=_labels(model, s),
                    actions=sorted(acts),
                    message=f"actions of players {','.join(owners)}",
                ),
                cap,
            )


def _check_info(model: ETLModel, frontier: frozenset[Node], result: ConditionResult, cap: int) -> None:
    for s in model.worlds:
        if s in frontier:
            continue
        for player in model.signature.players:
            for a in model.signature.actions_of(player):
                result.checked += 1
                announced = action_atom(a) in model.observed(s, player)
                enabled = bool(model.successors(a, s))
                if announced != enabled:
                    result.record(
                        Witness(
                            condition="Info",
                            worlds=_labels(model, s),
                            actions=[a],
                            player=player,
                            message=f"{action_atom(a)} {'present' if announced else 'absent'} "
                            f"but {a} {'has no' if announced else 'has a'} successor",
                        ),
                        cap,
                    )


def _check_ke(model: ETLModel, result: ConditionResult, cap: int) -> None:
    for player in model.signature.players:
        for s in model.worlds:
            for v in ordered(model.alternatives(player, s)):
                result.checked += 1
                if model.observed(s, player) != model.observed(v, player):
                    result.record(
                        Witness(condition="Ke", worlds=_labels(model, s, v), player=player), cap
                    )


def _check_eq(model: ETLModel, result: ConditionResult, cap: int) -> None:
    for player in model.signature.players:
        for s in model.worlds:
            result.checked += 1
            alts = model.alternatives(player, s)
            if s not in alts:
                result.record(
                    Witness(condition="Eq", worlds=_labels(model, s), player=player, message="not reflexive"),
                    cap,
                )
            for v in ordered(alts):
                if s not in model.alternatives(player, v):
                    result.record(
                        Witness(condition="Eq", worlds=_labels(model, s, v), player=player, message="not symmetric"),
                        cap,
                    )
                for u in ordered(model.alternatives(player, v)):
                    if u not in alts:
                        result.record(
                            Witness(
                                condition="Eq",
                                worlds=_labels(model, s, v, u),
                                player=player,
                                message="not transitive",
                            ),
                            cap,
                        )


def check_normality(
    model: ETLModel,
    observation: ObservationModel | None = None,
    frontier: Iterable[Node] | None = None,
    conditions: Iterable[str] | None = None,
    jobs: int = 1,
) -> CheckReport:
    """Check the normality conditions by exhaustive quantification.

    Worlds in `frontier` (default: the model's own frontier) are exempt
    from Info only. Without an observation model only the conditions that
    do not mention blur can be requested. With `jobs` > 1 the conditions
    are checked on a thread pool; the report order does not change.
    """
    if observation is not None:
        require_same_signature(model.signature, observation.signature, "ETL model and observation")
    if conditions is None:
        selected = [c for c in ALL_CONDITIONS if observation is not None or c not in NEEDS_OBSERVATION]
    else:
        selected = list(conditions)
        unknown = [c for c in selected if c not in ALL_CONDITIONS]
        if unknown:
            raise UsageError(f"unknown normality conditions: {unknown}")
        if observation is None and NEEDS_OBSERVATION.intersection(selected):
            raise UsageError("Nm and Pr need an observation model")

    exempt = model.frontier if frontier is None else frozenset(frontier)
    for world in exempt:
        model.require_world(world)
    cap = get_settings().witness_cap

    checks: dict[str, Callable[[ConditionResult], None]] = {
        "Nm": lambda r: _check_nm(model, observation, r, cap),  # type: ignore[arg-type]
        "Pr": lambda r: _check_pr(model, observation, r, cap),  # type: ignore[arg-type]
        "Det": lambda r: _check_det(model, r, cap),
        "Exturn": lambda r: _check_exturn(model, r, cap),
        "Info": lambda r: _check_info(model, exempt, r, cap),
        "Ke": lambda r: _check_ke(model, r, cap),
        "Eq": lambda r: _check_eq(model, r, cap),
    }

    def run(name: str) -> ConditionResult:
        result = ConditionResult(name=name)
        checks[name](result)
        return result

    names = [name for name in ALL_CONDITIONS if name in selected]
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run, names))
    else:
        results = [run(name) for name in names]

    report = CheckReport(kind="normality", subject=model.name, conditions=results)
    if exempt:
        report.notes.append(f"{len(exempt)} frontier worlds exempt from Info")
    logger.debug(f"Normality of {model.name}: {report.failed() or 'all pass'}")
    return report


def recheck_witness(model: ETLModel, observation: ObservationModel | None, witness: Witness) -> bool:
    """True iff the witness, taken on its own, falsifies its condition in `model`."""
    try:
        worlds = [model.world(label) for label in witness.worlds]
    except UnknownIdError:
        return False
    player = witness.player
    name = witness.condition

    if name == "Nm" and observation is not None and player is not None:
        s, s2, t, t2 = worlds
        b, a = witness.actions
        return (
            s2 in model.alternatives(player, s)
            and t2 in model.successors(a, s2)
            and t in model.successors(b, s)
            and observation.blurred(player, b, a)
            and model.observed(t, player) == model.observed(t2, player)
            and t2 not in model.alternatives(player, t)
        )
    if name == "Pr" and observation is not None and player is not None:
        s, t, t2 = worlds
        (a,) = witness.actions
        return (
            t in model.successors(a, s)
            and t2 in model.alternatives(player, t)
            and not _has_blurred_predecessor(model, observation, player, s, a, t2)
        )
    if name == "Det":
        s, t, t2 = worlds
        (a,) = witness.actions
        return t != t2 and {t, t2} <= model.successors(a, s)
    if name == "Exturn":
        (s,) = worlds
        return len({model.signature.owner(a) for a in model.act(s)}) > 1
    if name == "Info" and player is not None:
        (s,) = worlds
        (a,) = witness.actions
        return (action_atom(a) in model.observed(s, player)) != bool(model.successors(a, s))
    if name == "Ke" and player is not None:
        s, v = worlds
        return v in model.alternatives(player, s) and model.observed(s, player) != model.observed(v, player)
    if name == "Eq" and player is not None:
        if len(worlds) == 1:
            return worlds[0] not in model.alternatives(player, worlds[0])
        if len(worlds) == 2:
            s, v = worlds
            return v in model.alternatives(player, s) and s not in model.alternatives(player, v)
        s, v, u = worlds
        return (
            v in model.alternatives(player, s)
            and u in model.alternatives(player, v)
            and u not in model.alternatives(player, s)
        )
    return False
