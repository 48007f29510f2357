"""Verdict records shared by every decision and verification routine."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass(frozen=True)
class Report:
    check: str
    passed: bool
    message: str = ""
    witness: Any = None
    details: dict = field(default_factory=dict)
    children: tuple = ()

    def failed_children(self) -> list:
        return [c for c in self.children if not c.passed]

    def lines(self, indent: int = 0) -> list:
        mark = "PASS" if self.passed else "FAIL"
        head = f"{'  ' * indent}[{mark}] {self.check}"
        if self.message:
            head += f": {self.message}"
        out = [head]
        for child in self.children:
            out.extend(child.lines(indent + 1))
        return out

    def __str__(self) -> str:
        return "\n".join(self.lines())


def combine(check: str, children, message: str = "", **details) -> Report:
    children = tuple(children)
    return Report(check, all(c.passed for c in children), message, details=details, children=children)
