"""DOT export for run models, game trees, E(G) and epistemic models."""

import logging
from collections.abc import Mapping
from functools import lru_cache
from pathlib import Path

from jinja2 import Environment, PackageLoader

from sig.services.game import EpistemicModel
from sig.services.update import ETLModel, etl_from_epistemic
from sig.services.worlds import Node, node_label, ordered

logger = logging.getLogger(__name__)


@lru_cache
def _environment() -> Environment:
    return Environment(
        loader=PackageLoader("sig", "templates"),
        trim_blocks=True,
        lstrip_blocks=True,
        keep_trailing_newline=True,
        autoescape=False,
    )


def _quote(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def render_dot(model: ETLModel | EpistemicModel) -> str:
    """Nodes `id:state`, solid action edges, dashed undirected epistemic edges (reflexive ones omitted)."""
    assign: Mapping[Node, Node] | None = getattr(model, "assign", None)
    layer: Mapping[Node, int] | None = getattr(model, "layer", None)
    etl = etl_from_epistemic(model) if isinstance(model, EpistemicModel) else model

    def ident(world: Node) -> str:
        return _quote(etl.label(world))

    nodes = []
    for world in etl.worlds:
        label = etl.label(world)
        if assign is not None and world in assign:
            label = f"{label}:{node_label(assign[world])}"
        nodes.append({"id": ident(world), "label": _quote(label)})

    layers: list[list[str]] = []
    if layer is not None:
        grouped: dict[int, list[Node]] = {}
        for world in etl.worlds:
            grouped.setdefault(layer[world], []).append(world)
        layers = [[ident(w) for w in ordered(grouped[k])] for k in sorted(grouped)]

    action_edges = [
        {"source": ident(world), "target": ident(target), "label": action}
        for world in etl.worlds
        for action in etl.signature.actions
        for target in ordered(etl.successors(action, world))
    ]

    epistemic_edges = []
    for player in etl.signature.players:
        seen: set[frozenset[Node]] = set()
        for world in etl.worlds:
            for other in ordered(etl.alternatives(player, world)):
                pair = frozenset((world, other))
                if other == world or pair in seen:
                    continue
                seen.add(pair)
                epistemic_edges.append({"source": ident(world), "target": ident(other), "label": player})

    template = _environment().get_template("graph.dot.j2")
    return template.render(
        name=_quote(etl.name),
        nodes=nodes,
        layers=layers,
        action_edges=action_edges,
        epistemic_edges=epistemic_edges,
    )


def export_dot(model: ETLModel | EpistemicModel, path: str | Path | None = None) -> str:
    """Render `model` and write it to `path` when given; returns the DOT text."""
    text = render_dot(model)
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
        logger.debug(f"Wrote DOT for {model.name} to {path}")
    return text
