"""Dynamic epistemic formulas: syntax tree, derived connectives and parser.

The tree has six constructors (Top, AtomAt, Not, And, Know, Box); every
other connective is desugared when it is built or parsed.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

from lark import Lark, Token, Transformer, v_args
from lark.exceptions import UnexpectedCharacters, UnexpectedEOF, UnexpectedInput, VisitError

from sig.errors import FormulaNameError, FormulaSyntaxError
from sig.services.game import Signature, action_atom

# =============================================================================
# Syntax tree
# =============================================================================


@dataclass(frozen=True, slots=True)
class Top:
    def __str__(self) -> str:
        return "top"


@dataclass(frozen=True, slots=True)
class AtomAt:
    """p_i: atom p is among the information player i holds."""

    atom: str
    player: str

    def __str__(self) -> str:
        return f"{self.atom}@{self.player}"


@dataclass(frozen=True, slots=True)
class Not:
    body: Formula

    def __str__(self) -> str:
        return f"~{self.body}"


@dataclass(frozen=True, slots=True)
class And:
    left: Formula
    right: Formula

    def __str__(self) -> str:
        return f"({self.left} & {self.right})"


@dataclass(frozen=True, slots=True)
class Know:
    player: str
    body: Formula

    def __str__(self) -> str:
        return f"K{self.player} {self.body}"


@dataclass(frozen=True, slots=True)
class Box:
    action: str
    body: Formula

    def __str__(self) -> str:
        return f"[{self.action}] {self.body}"


Formula = Top | AtomAt | Not | And | Know | Box

TOP = Top()


# =============================================================================
# Derived connectives
# =============================================================================


def bottom() -> Formula:
    return Not(TOP)


def disj(left: Formula, right: Formula) -> Formula:
    return Not(And(Not(left), Not(right)))


def implies(left: Formula, right: Formula) -> Formula:
    return Not(And(left, Not(right)))


def iff(left: Formula, right: Formula) -> Formula:
    return And(implies(left, right), implies(right, left))


def hat_k(player: str, body: Formula) -> Formula:
    """K̂_i φ = ¬K_i¬φ."""
    return Not(Know(player, Not(body)))


def diamond(action: str, body: Formula) -> Formula:
    """<a>φ = ¬[a]¬φ."""
    return Not(Box(action, Not(body)))


def conj_all(parts: list[Formula]) -> Formula:
    """Left-folded conjunction; top when empty."""
    if not parts:
        return TOP
    return reduce(And, parts)


def disj_all(parts: list[Formula]) -> Formula:
    """Left-folded disjunction; bottom when empty."""
    if not parts:
        return bottom()
    return reduce(disj, parts)


def turn(signature: Signature, player: str) -> Formula:
    """TURN_i: some action of player i is available."""
    signature.require_player(player)
    return disj_all([diamond(a, TOP) for a in signature.actions_of(player)])


def action_available(action: str, signature: Signature) -> Formula:
    """The owner's action atom for `action`."""
    return AtomAt(action_atom(action), signature.owner(action))


# =============================================================================
# Measures
# =============================================================================


def modal_action_depth(formula: Formula) -> int:
    """Maximum nesting of [a] (and so of <a>)."""
    match formula:
        case Top() | AtomAt():
            return 0
        case Not(body) | Know(_, body):
            return modal_action_depth(body)
        case And(left, right):
            return max(modal_action_depth(left), modal_action_depth(right))
        case Box(_, body):
            return 1 + modal_action_depth(body)
    raise TypeError(f"not a formula: {formula!r}")


def size(formula: Formula) -> int:
    match formula:
        case Top() | AtomAt():
            return 1
        case Not(body) | Know(_, body) | Box(_, body):
            return 1 + size(body)
        case And(left, right):
            return 1 + size(left) + size(right)
    raise TypeError(f"not a formula: {formula!r}")


def is_action_free(formula: Formula) -> bool:
    return modal_action_depth(formula) == 0


def check_names(formula: Formula, signature: Signature) -> None:
    """Raise FormulaNameError if a player, action or atom is not in the signature."""
    match formula:
        case Top():
            return
        case AtomAt(atom, player):
            if player not in signature.players:
                raise FormulaNameError(f"unknown player {player} in {formula}")
            if atom not in signature.atoms:
                raise FormulaNameError(f"unknown atom {atom} in {formula}")
        case Not(body):
            check_names(body, signature)
        case And(left, right):
            check_names(left, signature)
            check_names(right, signature)
        case Know(player, body):
            if player not in signature.players:
                raise FormulaNameError(f"unknown player {player} in K{player}")
            check_names(body, signature)
        case Box(action, body):
            if action not in signature.owners:
                raise FormulaNameError(f"unknown action {action} in [{action}]")
            check_names(body, signature)


# =============================================================================
# Parser
# =============================================================================

GRAMMAR = r"""
?start: formula

?formula: implication
    | implication "<->" formula         -> iff

?implication: disjunction
    | disjunction "->" implication      -> implies

?disjunction: conjunction
    | disjunction "|" conjunction       -> disj

?conjunction: unary
    | conjunction "&" unary             -> conj

?unary: primary
    | "~" unary                         -> neg
    | KNOW unary                        -> know
    | KHAT unary                        -> khat
    | "[" NAME "]" unary                -> box
    | "<" NAME ">" unary                -> dia

?primary: "top"                         -> top
    | "bot"                             -> bot
    | ATOM_AT                           -> atom
    | TURN                              -> turn
    | "(" formula ")"

ATOM_AT.4: /[A-Za-z_][A-Za-z0-9_]*@[A-Za-z0-9_]+/
TURN.3: /TURN[A-Za-z0-9_]+/
KHAT.2: /Kh[A-Za-z0-9_]+/
KNOW.1: /K[A-Za-z0-9_]+/
NAME: /[A-Za-z0-9_']+/

%import common.WS
%ignore WS
"""

_PARSER = Lark(GRAMMAR, parser="lalr", lexer="contextual", propagate_positions=False)


@v_args(inline=True)
class _ToFormula(Transformer):  # type: ignore[type-arg]
    """Build the syntax tree, resolving names against an optional signature."""

    def __init__(self, signature: Signature | None) -> None:
        super().__init__()
        self.signature = signature

    def top(self) -> Formula:
        return TOP

    def bot(self) -> Formula:
        return bottom()

    def atom(self, token: Token) -> Formula:
        name, player = str(token).rsplit("@", 1)
        return AtomAt(name, player)

    def turn(self, token: Token) -> Formula:
        player = str(token)[len("TURN"):]
        if self.signature is None:
            raise FormulaNameError(f"TURN{player} needs a signature")
        if player not in self.signature.players:
            raise FormulaNameError(f"unknown player {player} in TURN{player}")
        return turn(self.signature, player)

    def neg(self, body: Formula) -> Formula:
        return Not(body)

    def conj(self, left: Formula, right: Formula) -> Formula:
        return And(left, right)

    def disj(self, left: Formula, right: Formula) -> Formula:
        return disj(left, right)

    def implies(self, left: Formula, right: Formula) -> Formula:
        return implies(left, right)

    def iff(self, left: Formula, right: Formula) -> Formula:
        return iff(left, right)

    def know(self, token: Token, body: Formula) -> Formula:
        return Know(str(token)[1:], body)

    def khat(self, token: Token, body: Formula) -> Formula:
        text = str(token)
        # "Kh2" is K̂_2 unless "h2" is itself a player and "2" is not
        if self.signature is not None:
            players = self.signature.players
            if text[1:] in players and text[2:] not in players:
                return Know(text[1:], body)
        return hat_k(text[2:], body)

    def box(self, action: Token, body: Formula) -> Formula:
        return Box(str(action), body)

    def dia(self, action: Token, body: Formula) -> Formula:
        return diamond(str(action), body)


def parse_formula(text: str, signature: Signature | None = None) -> Formula:
    """Parse the ASCII formula syntax; with a signature, names are checked against it."""
    try:
        tree = _PARSER.parse(text)
    except UnexpectedEOF as exc:
        raise FormulaSyntaxError("unexpected end of formula", len(text) + 1) from exc
    except UnexpectedCharacters as exc:
        raise FormulaSyntaxError(f"unexpected character {text[exc.pos_in_stream]!r}", exc.column) from exc
    except UnexpectedInput as exc:
        column = getattr(exc, "column", None)
        token = getattr(exc, "token", None)
        if token is not None and token.type == "$END":
            raise FormulaSyntaxError("unexpected end of formula", len(text) + 1) from exc
        what = f"unexpected token {str(token)!r}" if token is not None else "syntax error"
        raise FormulaSyntaxError(what, column if isinstance(column, int) and column > 0 else None) from exc

    try:
        formula: Formula = _ToFormula(signature).transform(tree)
    except VisitError as exc:
        if isinstance(exc.orig_exc, FormulaNameError):
            raise exc.orig_exc from None
        raise
    if signature is not None:
        check_names(formula, signature)
    return formula
