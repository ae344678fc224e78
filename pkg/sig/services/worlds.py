"""World identities, ordering and labels.

Plain ids are strings. Worlds created by updating are `RunWorld`s: a root
world plus the actions executed since, matching the tuple notation
(s, a1, ..., ak). Every set of ids is iterated in `node_key` order.
"""

from __future__ import annotations

from collections import Counter
from collections.abc import Hashable, Iterable
from dataclasses import dataclass
from typing import TypeAlias

Node: TypeAlias = Hashable


@dataclass(frozen=True, slots=True)
class RunWorld:
    """A root world followed by an executed action history."""

    root: Node
    history: tuple[str, ...] = ()

    @property
    def layer(self) -> int:
        return len(self.history)

    def extend(self, action: str) -> RunWorld:
        return RunWorld(self.root, (*self.history, action))

    def parent(self) -> RunWorld | None:
        if not self.history:
            return None
        return RunWorld(self.root, self.history[:-1])

    def __str__(self) -> str:
        return node_label(self)


def extend(world: Node, action: str) -> RunWorld:
    """Product world (w, a); nested products flatten into one history."""
    if isinstance(world, RunWorld):
        return world.extend(action)
    return RunWorld(world, (action,))


def node_key(node: Node) -> tuple[str, ...]:
    """Total order on ids: root path first, then the history."""
    if isinstance(node, RunWorld):
        return (*node_key(node.root), *node.history)
    if isinstance(node, tuple):
        parts: list[str] = []
        for part in node:
            parts.extend(node_key(part))
        return tuple(parts)
    return (str(node),)


def node_label(node: Node) -> str:
    """Display label: `wa` for (w, a), `w.ab.c` when action ids are longer than one character."""
    path = node_key(node)
    if len(path) == 1:
        return path[0]
    root, *steps = path
    if all(len(step) == 1 for step in steps):
        return root + "".join(steps)
    return ".".join((root, *steps))


def ordered(nodes: Iterable[Node]) -> list[Node]:
    """Sort ids in the canonical order."""
    return sorted(nodes, key=node_key)


def dotted_label(node: Node) -> str:
    """Label with every step separated: `w.a.c`."""
    return ".".join(node_key(node))


def unique_labels(nodes: Iterable[Node]) -> dict[Node, str]:
    """Injective labels for one collection of worlds.

    Compact labels are kept where they are unambiguous. A run world whose
    compact label is shared falls back to the dotted form; any label still
    shared gets a `~k` suffix, except on plain ids.
    """
    worlds = ordered(set(nodes))
    labels = {w: node_label(w) for w in worlds}
    counts = Counter(labels.values())
    if len(counts) == len(labels):
        return labels
    for world in worlds:
        if counts[labels[world]] > 1 and isinstance(world, (RunWorld, tuple)):
            labels[world] = dotted_label(world)
    taken: set[str] = set()
    clashing = Counter(labels.values())
    for world in sorted(worlds, key=lambda w: isinstance(w, (RunWorld, tuple))):
        base = labels[world]
        if clashing[base] > 1 and base in taken:
            k = 1
            while f"{base}~{k}" in taken or f"{base}~{k}" in clashing:
                k += 1
            labels[world] = f"{base}~{k}"
        taken.add(labels[world])
    return labels
