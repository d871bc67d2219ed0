"""Henkin function vectors and the ``henkin-fn v1`` text format.

::

    hfn 1 <numVars> <numExistentials>
    def <y-id> <sexpr>        # one per existential, ascending id
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, TextIO

from .expr import BoolExpr, parse_sexpr, to_sexpr, variables
from .formula import DqbfInstance


class UnresolvedVector(ValueError):
    pass


@dataclass(frozen=True)
class HenkinVector:
    functions: Mapping[int, BoolExpr]

    def __getitem__(self, y: int) -> BoolExpr:
        return self.functions[y]

    def replace(self, y: int, f: BoolExpr) -> "HenkinVector":
        return HenkinVector({**self.functions, y: f})

    def is_resolved(self, instance: DqbfInstance) -> bool:
        """Every f_i reads only variables of its Henkin set."""
        return all(
            variables(self.functions[y]) <= instance.henkin[y]
            for y in instance.existentials
        )

    def henkin_violations(self, instance: DqbfInstance) -> dict[int, frozenset[int]]:
        out = {}
        for y in instance.existentials:
            extra = variables(self.functions[y]) - instance.henkin[y]
            if extra:
                out[y] = extra
        return out


def format_henkin_vector(instance: DqbfInstance, vector: HenkinVector) -> str:
    bad = vector.henkin_violations(instance)
    if bad:
        raise UnresolvedVector(f"functions read variables outside their Henkin sets: {bad}")
    lines = [f"hfn 1 {instance.num_vars} {len(instance.existentials)}"]
    for y in sorted(instance.existentials):
        lines.append(f"def {y} {to_sexpr(vector[y])}")
    return "\n".join(lines) + "\n"


def write_henkin_vector(instance: DqbfInstance, vector: HenkinVector, sink: TextIO) -> None:
    sink.write(format_henkin_vector(instance, vector))


def parse_henkin_vector(text: str) -> tuple[int, HenkinVector]:
    """Parse a certificate; returns ``(numVars, vector)``.

    Only syntax is checked here; matching against an instance is the
    caller's job.
    """
    lines = [l.strip() for l in text.splitlines()]
    lines = [l for l in lines if l and not l.startswith("c ")]
    if not lines:
        raise ValueError("empty certificate")
    head = lines[0].split()
    if len(head) != 4 or head[:2] != ["hfn", "1"]:
        raise ValueError("expected header 'hfn 1 <numVars> <numExistentials>'")
    num_vars, count = int(head[2]), int(head[3])
    functions: dict[int, BoolExpr] = {}
    for n, line in enumerate(lines[1:], start=2):
        parts = line.split(None, 2)
        if len(parts) != 3 or parts[0] != "def":
            raise ValueError(f"line {n}: expected 'def <y-id> <sexpr>'")
        y = int(parts[1])
        if y in functions:
            raise ValueError(f"line {n}: duplicate definition of {y}")
        functions[y] = parse_sexpr(parts[2])
    if len(functions) != count:
        raise ValueError(f"header announces {count} definitions, found {len(functions)}")
    return num_vars, HenkinVector(functions)
