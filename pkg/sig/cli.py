"""Command line front end.

Exit codes: 0 true/pass, 1 false/violations, 2 input or usage error.
"""

import argparse
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import TextIO

from sig.config import get_settings
from sig.errors import SigError, UsageError
from sig.models.reports import CheckReport
from sig.services.axioms import SuiteConfig, axiom_soundness_suite
from sig.services.bisimulation import check_invariance, largest_g_bisimulation
from sig.services.corpus import random_formulas
from sig.services.dot import export_dot
from sig.services.formats import (
    load_etl,
    load_game,
    load_model,
    load_observation,
    render_etl,
    render_model,
)
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
from sig.services.structure import (
    check_isomorphism,
    check_non_informative,
    check_tree_persistence,
    generate_game_tree,
    tracking_map,
)
from sig.services.update import close_frontier, generate_run, product, run_layers, validate_etl
from sig.services.worlds import RunWorld, node_label

logger = logging.getLogger(__name__)

EXIT_TRUE = 0
EXIT_FALSE = 1
EXIT_ERROR = 2


@dataclass
class Workspace:
    """Validated inputs of one command, resolved by name."""

    game: GameStructure
    models: dict[str, EpistemicModel] = field(default_factory=dict)
    observations: dict[str, ObservationModel] = field(default_factory=dict)

    @classmethod
    def load(
        cls,
        game_path: str,
        model_paths: list[str] | None = None,
        observation_path: str | None = None,
    ) -> "Workspace":
        game = validate_game(load_game(game_path))
        workspace = cls(game=game)
        for path in model_paths or []:
            workspace.add_model(path)
        if observation_path is not None:
            observation = validate_observation(load_observation(observation_path), game.signature)
            workspace.observations[observation.name] = observation
        return workspace

    def add_model(self, path: str) -> EpistemicModel:
        raw = load_model(path)
        if raw.game != self.game.name:
            raise UsageError(f"{path}: model is over game '{raw.game}', not '{self.game.name}'")
        model = validate_epistemic(raw, self.game)
        self.models[raw.name] = model
        return model

    def model(self, name: str | None = None) -> EpistemicModel:
        if name is None:
            return next(iter(self.models.values()))
        try:
            return self.models[name]
        except KeyError:
            raise UsageError(f"no model named '{name}'") from None

    def observation(self) -> ObservationModel:
        if not self.observations:
            return identity_observation(self.game.signature)
        return next(iter(self.observations.values()))


def _emit_report(report: CheckReport, fmt: str, out: TextIO) -> int:
    print(report.listing() if fmt == "listing" else report.text(), file=out)
    return EXIT_TRUE if report.passed else EXIT_FALSE


def _world(model: EpistemicModel, label: str | None) -> str:
    if label is None:
        if model.point is None:
            raise UsageError("no --world given and the model has no point")
        return str(model.point)
    model.require_world(label)
    return label


# =============================================================================
# Subcommands
# =============================================================================


def cmd_validate(args: argparse.Namespace, out: TextIO) -> int:
    ws = Workspace.load(args.game, [args.model] if args.model else [], args.obs)
    game = ws.game
    print(
        f"game {game.name}: {len(game.states)} states, {len(game.trans)} transitions, "
        f"players {' '.join(game.signature.players)}",
        file=out,
    )
    for name, model in ws.models.items():
        print(f"model {name}: {len(model.worlds)} worlds", file=out)
    for name in ws.observations:
        print(f"observation {name}: valid", file=out)
    return EXIT_TRUE


def cmd_product(args: argparse.Namespace, out: TextIO) -> int:
    ws = Workspace.load(args.game, [args.model], args.obs)
    result = product(ws.model(), ws.observation())
    if result.is_empty:
        print(f"# empty product: no world of {ws.model().name} has an enabled action", file=out)
    print(render_model(result), end="", file=out)
    if args.dot:
        export_dot(result, args.dot)
    return EXIT_TRUE


def cmd_run(args: argparse.Namespace, out: TextIO) -> int:
    ws = Workspace.load(args.game, [args.model], args.obs)
    depth = args.depth if args.depth is not None else get_settings().default_depth
    run = generate_run(ws.model(), ws.observation(), depth)
    layers = run_layers(run)
    actions, epistemic = run.edge_count()
    print(f"run {run.name}", file=out)
    print(f"worlds {len(run.worlds)}", file=out)
    print(f"layers {' '.join(str(len(layer)) for layer in layers)}", file=out)
    print(f"action_edges {actions}", file=out)
    print(f"epistemic_edges {epistemic}", file=out)
    for k, layer in enumerate(layers):
        print(f"layer {k}: {' '.join(f'{run.label(w)}:{node_label(run.assign[w])}' for w in layer)}", file=out)
    if args.dot:
        export_dot(run, args.dot)
    if args.etl:
        target = close_frontier(run) if args.closed else run
        with open(args.etl, "w", encoding="utf-8") as handle:
            handle.write(render_etl(target))
    return EXIT_TRUE


def cmd_eval(args: argparse.Namespace, out: TextIO) -> int:
    ws = Workspace.load(args.game, [args.model], args.obs)
    model = ws.model()
    formula = parse_formula(args.formula, ws.game.signature)
    world = _world(model, args.world)
    if args.semantics == "del":
        value = eval_del(ws.game, model, world, ws.observation(), formula)
    else:
        needed = modal_action_depth(formula)
        if args.depth is None:
            depth = max(get_settings().default_depth, needed)
        elif args.depth < needed:
            raise UsageError(f"--depth {args.depth} is below the formula's action depth {needed}")
        else:
            depth = args.depth
        run = generate_run(model, ws.observation(), depth)
        value = eval_etl(run, RunWorld(world, ()), formula)
    print("true" if value else "false", file=out)
    return EXIT_TRUE if value else EXIT_FALSE


def cmd_normal(args: argparse.Namespace, out: TextIO) -> int:
    model = validate_etl(load_etl(args.etl))
    observation = None
    if args.obs:
        observation = validate_observation(load_observation(args.obs), model.signature)
    jobs = args.jobs if args.jobs is not None else get_settings().jobs
    report = check_normality(model, observation, jobs=jobs)
    return _emit_report(report, args.format, out)


def cmd_bisim(args: argparse.Namespace, out: TextIO) -> int:
    ws = Workspace.load(args.game, [args.left], args.obs)
    left = ws.model()
    right = ws.add_model(args.right)
    if args.world is not None:
        left.require_world(args.world)
    if args.other is not None:
        right.require_world(args.other)
    bisim = largest_g_bisimulation(left, right, ws.game)
    print(f"pairs {len(bisim)}", file=out)
    for w, u in bisim.pairs():
        print(f"{node_label(w)} {node_label(u)}", file=out)
    if args.world is None or args.other is None:
        return EXIT_TRUE if len(bisim) else EXIT_FALSE
    if (args.world, args.other) not in bisim:
        print(f"{args.world} and {args.other} are not G-bisimilar", file=out)
        return EXIT_FALSE
    settings = get_settings()
    seed = args.seed if args.seed is not None else settings.seed
    samples = args.samples if args.samples is not None else settings.formula_samples
    corpus = random_formulas(seed, ws.game.signature, samples, settings.formula_depth)
    report = check_invariance(left, args.world, right, args.other, ws.game, corpus, ws.observation())
    return _emit_report(report, args.format, out)


def cmd_tree(args: argparse.Namespace, out: TextIO) -> int:
    ws = Workspace.load(args.game)
    depth = args.depth if args.depth is not None else get_settings().default_depth
    tree = generate_game_tree(ws.game, args.root, depth)
    layers: dict[int, list[str]] = {}
    for node in tree.worlds:
        layers.setdefault(tree.layer[node], []).append(f"{tree.label(node)}:{node_label(tree.assign[node])}")
    for k in sorted(layers):
        print(f"layer {k}: {' '.join(layers[k])}", file=out)
    if args.dot:
        export_dot(tree, args.dot)
    return _emit_report(check_tree_persistence(tree), args.format, out)


def cmd_trackiso(args: argparse.Namespace, out: TextIO) -> int:
    ws = Workspace.load(args.game, [args.model], args.obs)
    model = ws.model()
    depth = args.depth if args.depth is not None else get_settings().default_depth
    observation = ws.observation()
    run = generate_run(model, observation, depth)
    root = args.root if args.root is not None else model.assign[model.worlds[0]]
    tree = generate_game_tree(ws.game, root, depth)
    g = tracking_map(run, tree)
    print(f"tracking {len(g)} of {len(run.worlds)} worlds", file=out)
    jobs = args.jobs if args.jobs is not None else get_settings().jobs
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=2) as pool:
            pending = pool.submit(check_non_informative, observation, run)
            isomorphism = check_isomorphism(g, run, tree)
            non_informative = pending.result()
    else:
        non_informative = check_non_informative(observation, run)
        isomorphism = check_isomorphism(g, run, tree)
    _emit_report(non_informative, args.format, out)
    _emit_report(isomorphism, args.format, out)
    if non_informative.passed != isomorphism.passed:
        logger.error("non-informative verdict differs from isomorphism verdict")
        return EXIT_FALSE
    return EXIT_TRUE if isomorphism.passed else EXIT_FALSE


def cmd_axioms(args: argparse.Namespace, out: TextIO) -> int:
    ws = Workspace.load(args.game, [args.model], args.obs)
    settings = get_settings()
    defaults = SuiteConfig()
    config = SuiteConfig(
        seed=args.seed if args.seed is not None else settings.seed,
        samples=args.samples if args.samples is not None else defaults.samples,
        depth=args.depth if args.depth is not None else defaults.depth,
        jobs=args.jobs if args.jobs is not None else settings.jobs,
    )
    report = axiom_soundness_suite(ws.game, ws.model(), ws.observation(), config)
    return _emit_report(report, args.format, out)


def cmd_serve(args: argparse.Namespace, out: TextIO) -> int:
    import uvicorn

    settings = get_settings()
    uvicorn.run(
        "sig.main:app",
        host=args.host or settings.host,
        port=args.port or settings.port,
    )
    return EXIT_TRUE


# =============================================================================
# Parser
# =============================================================================


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sig", description="Compute game runs from game rules and player assumptions."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, *, model: bool = True, obs: bool = True) -> None:
        p.add_argument("game", help="game file")
        if model:
            p.add_argument("model", help="epistemic model file")
        if obs:
            p.add_argument("obs", nargs="?", default=None, help="observation model file (default: public)")

    def report_format(p: argparse.ArgumentParser) -> None:
        p.add_argument("--format", choices=("text", "listing"), default="text")

    p = sub.add_parser("validate", help="validate a game and optional model/observation files")
    p.add_argument("game")
    p.add_argument("model", nargs="?", default=None)
    p.add_argument("obs", nargs="?", default=None)
    p.set_defaults(handler=cmd_validate)

    p = sub.add_parser("product", help="one update product")
    common(p)
    p.add_argument("--dot")
    p.set_defaults(handler=cmd_product)

    p = sub.add_parser("run", help="depth-bounded run model")
    common(p)
    p.add_argument("--depth", type=int)
    p.add_argument("--dot")
    p.add_argument("--etl", help="write the run as an ETL file")
    p.add_argument("--closed", action="store_true", help="with --etl, write the normal closure")
    p.set_defaults(handler=cmd_run)

    p = sub.add_parser("eval", help="evaluate a formula")
    common(p)
    p.add_argument("--world")
    p.add_argument("--formula", required=True)
    p.add_argument("--semantics", choices=("del", "etl"), default="del")
    p.add_argument("--depth", type=int)
    p.set_defaults(handler=cmd_eval)

    p = sub.add_parser("normal", help="check the normality conditions of an ETL file")
    p.add_argument("etl")
    p.add_argument("obs", nargs="?", default=None)
    p.add_argument("--jobs", type=int)
    report_format(p)
    p.set_defaults(handler=cmd_normal)

    p = sub.add_parser("bisim", help="largest G-bisimulation between two models")
    p.add_argument("game")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--obs")
    p.add_argument("--world")
    p.add_argument("--other")
    p.add_argument("--seed", type=int)
    p.add_argument("--samples", type=int)
    report_format(p)
    p.set_defaults(handler=cmd_bisim)

    p = sub.add_parser("tree", help="epistemic game tree")
    common(p, model=False, obs=False)
    p.add_argument("--root", required=True)
    p.add_argument("--depth", type=int)
    p.add_argument("--dot")
    report_format(p)
    p.set_defaults(handler=cmd_tree)

    p = sub.add_parser("trackiso", help="tracking map, non-informative and isomorphism checks")
    common(p)
    p.add_argument("--depth", type=int)
    p.add_argument("--root")
    p.add_argument("--jobs", type=int)
    report_format(p)
    p.set_defaults(handler=cmd_trackiso)

    p = sub.add_parser("axioms", help="axiom soundness suite")
    common(p)
    p.add_argument("--seed", type=int)
    p.add_argument("--samples", type=int)
    p.add_argument("--depth", type=int)
    p.add_argument("--jobs", type=int)
    report_format(p)
    p.set_defaults(handler=cmd_axioms)

    p = sub.add_parser("serve", help="start the HTTP API")
    p.add_argument("--host")
    p.add_argument("--port", type=int)
    p.set_defaults(handler=cmd_serve)

    return parser


def run_command(argv: list[str], out: TextIO | None = None, err: TextIO | None = None) -> int:
    """Parse `argv`, dispatch, and return the exit code."""
    out = out or sys.stdout
    err = err or sys.stderr
    from sig.main import setup_logging

    setup_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_ERROR

    logger.info(f"Running {args.command}")
    try:
        return int(args.handler(args, out))
    except SigError as exc:
        print(f"sig: error: {exc}", file=err)
        return EXIT_ERROR
    except OSError as exc:
        print(f"sig: error: {exc}", file=err)
        return EXIT_ERROR


def main() -> None:
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
