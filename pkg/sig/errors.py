"""Exception hierarchy shared by the library, the CLI and the HTTP layer."""

from __future__ import annotations

from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from sig.models.reports import CheckReport


class SigError(Exception):
    """Base class for every error raised on bad input or a failed precondition."""


class UnknownIdError(SigError):
    """A state, world, player, action or atom id is not declared."""


class GameValidationError(SigError):
    """A game description breaks a game-structure invariant."""


class ModelValidationError(SigError):
    """An epistemic model description breaks an epistemic-model invariant."""


class ObservationValidationError(SigError):
    """An observation model description is malformed."""


class SignatureMismatchError(SigError):
    """Two structures that must share players, actions and atoms do not."""


class FormatError(SigError):
    """A line of an input file cannot be parsed."""

    def __init__(self, message: str, line: int | None = None, source: str = "") -> None:
        self.line = line
        self.source = source
        where = f"{source}:" if source else ""
        where += f"{line}: " if line is not None else (" " if where else "")
        super().__init__(f"{where}{message}")


class FormulaSyntaxError(SigError):
    """A formula does not match the grammar."""

    def __init__(self, message: str, column: int | None = None) -> None:
        self.column = column
        suffix = f" (column {column})" if column is not None else ""
        super().__init__(f"{message}{suffix}")


class FormulaNameError(SigError):
    """A formula names a player, action or atom missing from the signature."""


class NotNormalError(SigError):
    """An ETL model fails a normality condition required by an operation."""

    def __init__(self, message: str, report: CheckReport) -> None:
        self.report = report
        super().__init__(message)


class NotCertaintyError(SigError):
    """An operation that needs a single-world initial model got a larger one."""


class NotBisimilarError(SigError):
    """A pair of worlds is not in the largest G-bisimulation."""


class MorphismError(SigError):
    """A world map is not total or leaves the target model."""


class InvariantViolation(SigError):
    """An internal consistency check failed; this indicates a bug."""


class UsageError(SigError):
    """The command line is inconsistent (beyond what argparse can detect)."""
