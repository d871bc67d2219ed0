"""Clauses, CNF matrices and DQBF instances, plus the DQDIMACS reader/writer.

Variables are positive ints and literals are signed ints, exactly as in
DIMACS. A clause is a tuple of literals.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, TextIO, Union

Clause = tuple[int, ...]


class ParseError(ValueError):
    """Malformed DQDIMACS input. ``line`` is 1-based, or None if global."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        self.message = message
        super().__init__(f"line {line}: {message}" if line is not None else message)


def normalize_clause(lits: Iterable[int]) -> Clause | None:
    """Merge duplicate literals; return None for a tautology."""
    seen: dict[int, None] = {}
    for lit in lits:
        if lit == 0:
            raise ValueError("0 is not a literal")
        if -lit in seen:
            return None
        seen[lit] = None
    return tuple(seen)


@dataclass(frozen=True)
class CnfFormula:
    clauses: tuple[Clause, ...]
    num_vars: int

    def __post_init__(self):
        for clause in self.clauses:
            for lit in clause:
                if abs(lit) > self.num_vars:
                    raise ValueError(f"literal {lit} exceeds num_vars={self.num_vars}")

    @classmethod
    def build(cls, clauses: Iterable[Iterable[int]], num_vars: int | None = None) -> "CnfFormula":
        """Normalize raw clauses (tautologies dropped, duplicates merged)."""
        kept = []
        for raw in clauses:
            c = normalize_clause(raw)
            if c is not None:
                kept.append(c)
        if num_vars is None:
            num_vars = max((abs(l) for c in kept for l in c), default=0)
        return cls(tuple(kept), num_vars)

    def variables(self) -> set[int]:
        return {abs(l) for c in self.clauses for l in c}

    def evaluate(self, assignment: Mapping[int, bool]) -> bool:
        """True iff every clause has a literal true under ``assignment``."""
        return all(
            any(assignment[abs(l)] == (l > 0) for l in c) for c in self.clauses
        )


@dataclass(frozen=True)
class DqbfInstance:
    """``forall X exists^{H_1} y_1 ... exists^{H_m} y_m . matrix``.

    ``trivially_false`` records an empty clause in the matrix; the empty
    clause itself is never stored in ``matrix.clauses``.
    """

    universals: tuple[int, ...]
    existentials: tuple[int, ...]
    henkin: Mapping[int, frozenset[int]]
    matrix: CnfFormula
    trivially_false: bool = False

    def __post_init__(self):
        xs, ys = set(self.universals), set(self.existentials)
        if len(xs) != len(self.universals) or len(ys) != len(self.existentials):
            raise ValueError("variable quantified twice")
        if xs & ys:
            raise ValueError(f"variables both universal and existential: {sorted(xs & ys)}")
        if set(self.henkin) != ys:
            raise ValueError("henkin must have exactly one entry per existential")
        for y, deps in self.henkin.items():
            if not deps <= xs:
                raise ValueError(f"Henkin set member is not universal (y={y})")
        free = self.matrix.variables() - xs - ys
        if free:
            raise ValueError(f"free variables in matrix: {sorted(free)}")
        for v in xs | ys:
            if v < 1 or v > self.matrix.num_vars:
                raise ValueError(f"variable {v} out of range 1..{self.matrix.num_vars}")

    @classmethod
    def create(
        cls,
        universals: Sequence[int],
        henkin: Mapping[int, Iterable[int]],
        clauses: Iterable[Iterable[int]],
        num_vars: int | None = None,
    ) -> "DqbfInstance":
        """Convenience constructor; existentials are the keys of ``henkin`` in order."""
        raw = [tuple(c) for c in clauses]
        trivially_false = any(len(c) == 0 for c in raw)
        if num_vars is None:
            num_vars = max(
                [*universals, *henkin, *(abs(l) for c in raw for l in c), 0]
            )
        matrix = CnfFormula.build((c for c in raw if c), num_vars)
        return cls(
            tuple(universals),
            tuple(henkin),
            {y: frozenset(h) for y, h in henkin.items()},
            matrix,
            trivially_false,
        )

    @property
    def num_vars(self) -> int:
        return self.matrix.num_vars

    @property
    def variables(self) -> tuple[int, ...]:
        """Instance variables in ascending id order (the sample column order)."""
        return tuple(sorted(self.universals + self.existentials))

    def deps(self, y: int) -> frozenset[int]:
        return self.henkin[y]

    def holds(self, assignment: Mapping[int, bool]) -> bool:
        return not self.trivially_false and self.matrix.evaluate(assignment)


# -- DQDIMACS ---------------------------------------------------------------

Source = Union[str, bytes, TextIO]


def _lines(source: Source) -> Iterable[str]:
    if isinstance(source, bytes):
        source = source.decode()
    if isinstance(source, str):
        return source.splitlines()
    return source


def _ints(tokens: list[str], lineno: int) -> list[int]:
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise ParseError(f"expected integers, got {' '.join(tokens)!r}", lineno) from None


def parse_dqdimacs(source: Source) -> DqbfInstance:
    """Parse a DQDIMACS document.

    ``e`` lines depend on every universal declared above them, ``d`` lines
    carry an explicit Henkin set. Tautological clauses are dropped and
    duplicate literals merged.
    """
    header: tuple[int, int] | None = None
    universals: list[int] = []
    henkin: dict[int, frozenset[int]] = {}
    quantified: set[int] = set()
    clauses: list[Clause] = []
    trivially_false = False
    pending: list[int] = []
    pending_line = 0

    def declare(v: int, lineno: int) -> None:
        if v < 1 or v > header[0]:
            raise ParseError(f"variable {v} out of range 1..{header[0]}", lineno)
        if v in quantified:
            raise ParseError(f"variable {v} quantified twice", lineno)
        quantified.add(v)

    for lineno, raw in enumerate(_lines(source), start=1):
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        tokens = line.split()
        head = tokens[0]
        if head == "p":
            if header is not None:
                raise ParseError("duplicate problem line", lineno)
            if len(tokens) != 4 or tokens[1] != "cnf":
                raise ParseError("expected 'p cnf <vars> <clauses>'", lineno)
            nv, nc = _ints(tokens[2:], lineno)
            if nv < 0 or nc < 0:
                raise ParseError("negative count in problem line", lineno)
            header = (nv, nc)
            continue
        if header is None:
            raise ParseError("content before problem line", lineno)
        if head in ("a", "e", "d"):
            if clauses or pending:
                raise ParseError("quantifier line after clauses", lineno)
            nums = _ints(tokens[1:], lineno)
            if not nums or nums[-1] != 0 or 0 in nums[:-1]:
                raise ParseError("quantifier line must end with a single 0", lineno)
            nums = nums[:-1]
            if head == "a":
                for v in nums:
                    declare(v, lineno)
                    universals.append(v)
            elif head == "e":
                for v in nums:
                    declare(v, lineno)
                    henkin[v] = frozenset(universals)
            else:
                if not nums:
                    raise ParseError("'d' line needs an existential", lineno)
                y, deps = nums[0], nums[1:]
                declare(y, lineno)
                xs = set(universals)
                for x in deps:
                    if x not in xs:
                        raise ParseError(
                            f"Henkin set member is not universal: {x}", lineno
                        )
                henkin[y] = frozenset(deps)
            continue
        nums = _ints(tokens, lineno)
        for lit in nums:
            if lit == 0:
                c = normalize_clause(pending)
                if len(pending) == 0:
                    trivially_false = True
                elif c is not None:
                    clauses.append(c)
                pending = []
            else:
                if abs(lit) > header[0]:
                    raise ParseError(f"literal {lit} exceeds declared variables", lineno)
                if abs(lit) not in quantified:
                    raise ParseError(f"variable {abs(lit)} is not quantified", lineno)
                if not pending:
                    pending_line = lineno
                pending.append(lit)

    if header is None:
        raise ParseError("missing problem line")
    if pending:
        raise ParseError("clause not terminated by 0", pending_line)
    return DqbfInstance(
        tuple(universals),
        tuple(henkin),
        henkin,
        CnfFormula(tuple(clauses), header[0]),
        trivially_false,
    )


def read_dqdimacs(path) -> DqbfInstance:
    with open(path) as fh:
        return parse_dqdimacs(fh)


def format_dqdimacs(instance: DqbfInstance) -> str:
    """Print an instance; existentials always get explicit ``d`` lines."""
    out = io.StringIO()
    clauses = list(instance.matrix.clauses)
    n_clauses = len(clauses) + (1 if instance.trivially_false else 0)
    out.write(f"p cnf {instance.num_vars} {n_clauses}\n")
    if instance.universals:
        out.write("a " + " ".join(map(str, instance.universals)) + " 0\n")
    for y in instance.existentials:
        deps = sorted(instance.henkin[y], key=instance.universals.index)
        out.write("d " + " ".join(map(str, [y, *deps])) + " 0\n")
    for c in clauses:
        out.write(" ".join(map(str, c)) + " 0\n")
    if instance.trivially_false:
        out.write("0\n")
    return out.getvalue()


def write_dqdimacs(instance: DqbfInstance, sink: TextIO) -> None:
    sink.write(format_dqdimacs(instance))
