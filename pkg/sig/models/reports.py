"""Check reports shared by normality, structure, bisimulation and axiom checks."""

from pydantic import BaseModel, Field, computed_field


class Witness(BaseModel):
    """One falsifying instance of a condition."""

    condition: str
    worlds: list[str] = Field(default_factory=list, description="World (or state) labels")
    actions: list[str] = Field(default_factory=list)
    player: str | None = None
    message: str = ""

    def describe(self) -> str:
        parts = [f"worlds={','.join(self.worlds)}"] if self.worlds else []
        if self.actions:
            parts.append(f"actions={','.join(self.actions)}")
        if self.player is not None:
            parts.append(f"player={self.player}")
        if self.message:
            parts.append(self.message)
        return " ".join(parts)


class ConditionResult(BaseModel):
    """Verdict for one named condition."""

    name: str
    checked: int = 0
    violations: int = 0
    witnesses: list[Witness] = Field(default_factory=list)

    @computed_field  # type: ignore[prop-decorator]
    @property
    def passed(self) -> bool:
        return self.violations == 0

    def record(self, witness: Witness, cap: int) -> None:
        """Count a violation, keeping at most `cap` witnesses."""
        self.violations += 1
        if len(self.witnesses) < cap:
            self.witnesses.append(witness)


class CheckReport(BaseModel):
    """Ordered per-condition verdicts plus notes."""

    kind: str
    subject: str = ""
    conditions: list[ConditionResult] = Field(default_factory=list)
    notes: list[str] = Field(default_factory=list)

    @computed_field  # type: ignore[prop-decorator]
    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.conditions)

    @property
    def checked(self) -> int:
        return sum(c.checked for c in self.conditions)

    @property
    def violations(self) -> int:
        return sum(c.violations for c in self.conditions)

    def condition(self, name: str) -> ConditionResult:
        for result in self.conditions:
            if result.name == name:
                return result
        raise KeyError(name)

    def failed(self) -> list[str]:
        return [c.name for c in self.conditions if not c.passed]

    def listing(self) -> str:
        """Machine-readable `CONDITION<TAB>VERDICT<TAB>WITNESSES` lines."""
        return "\n".join(
            f"{c.name}\t{'pass' if c.passed else 'fail'}\t{c.violations}" for c in self.conditions
        )

    def text(self) -> str:
        """Human-readable report with witnesses."""
        title = f"{self.kind} report"
        if self.subject:
            title += f" for {self.subject}"
        lines = [f"{title}: {'PASS' if self.passed else 'FAIL'}"]
        for c in self.conditions:
            verdict = "pass" if c.passed else "FAIL"
            lines.append(f"  {c.name:<10} {verdict:<5} checked={c.checked} violations={c.violations}")
            for w in c.witnesses:
                lines.append(f"      witness: {w.describe()}")
            if c.violations > len(c.witnesses):
                lines.append(f"      ... {c.violations - len(c.witnesses)} more")
        for note in self.notes:
            lines.append(f"  note: {note}")
        return "\n".join(lines)
