"""Candidate verification through the error formula.

The error formula is satisfiable exactly when some universal assignment
drives the candidates to outputs that falsify the matrix. Each existential
``y`` gets a primed copy ``y'`` defined by its candidate; references to
other existentials inside a candidate are redirected to their primed
copies.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence, Union

from . import expr as ex
from .certificate import HenkinVector
from .expr import VarPool
from .formula import CnfFormula, DqbfInstance
from .sat import SatOracle, SolverStats


@dataclass(frozen=True)
class Counterexample:
    x: dict[int, bool]        # the failing universal assignment
    y: dict[int, bool]        # a genuine extension that satisfies the matrix
    y_prime: dict[int, bool]  # what the candidates output on x

    def check(self, instance: DqbfInstance, vector: HenkinVector) -> None:
        assert instance.holds({**self.x, **self.y}), "y part does not extend x"
        assert not instance.holds({**self.x, **self.y_prime}), "candidate outputs satisfy the matrix"
        env = {**self.x, **self.y_prime}
        for yv, f in vector.functions.items():
            assert ex.evaluate(f, env) == self.y_prime[yv], f"y' disagrees with f_{yv}"


@dataclass(frozen=True)
class Verified:
    pass


@dataclass(frozen=True)
class CexFound:
    cex: Counterexample


@dataclass(frozen=True)
class InstanceFalse:
    witness: dict[int, bool]


VerifyResult = Union[Verified, CexFound, InstanceFalse]


@dataclass
class ErrorFormula:
    formula: CnfFormula
    primed: dict[int, int]  # y -> y'


def build_error_formula(instance: DqbfInstance, vector: HenkinVector, pool: VarPool | None = None) -> ErrorFormula:
    """CNF of  not matrix(X, Y')  and  (Y' <-> f)."""
    pool = pool or VarPool(instance.num_vars)
    primed = {y: pool.new() for y in instance.existentials}
    clauses: list[tuple[int, ...]] = []

    def p(l: int) -> int:
        v = abs(l)
        v = primed.get(v, v)
        return v if l > 0 else -v

    if not instance.trivially_false:
        # selector s_c -> clause c is false; at least one selector holds
        selectors = []
        for c in instance.matrix.clauses:
            s = pool.new()
            selectors.append(s)
            clauses.extend((-s, -p(l)) for l in c)
        clauses.append(tuple(selectors))  # empty when the matrix has no clauses
    for y in instance.existentials:
        clauses.extend(ex.to_cnf_defs(vector[y], primed[y], pool, primed))
    return ErrorFormula(CnfFormula(tuple(clauses), pool.top), primed)


class Verifier:
    """Owns the extension oracle (matrix only, X fixed via assumptions);
    the error formula is rebuilt per candidate vector."""

    def __init__(self, instance: DqbfInstance, deadline: float | None = None, stats: SolverStats | None = None):
        self.instance = instance
        self.deadline = deadline
        self.stats = stats if stats is not None else SolverStats()
        self.extension = SatOracle(
            instance.matrix.clauses, deadline=deadline, stats=self.stats
        )
        if instance.trivially_false:
            self.extension.add_clause(())

    def close(self):
        self.extension.close()

    def verify(self, vector: HenkinVector, exclude: Sequence[Mapping[int, bool]] = ()) -> VerifyResult:
        """``exclude`` lists universal assignments to skip (already known
        to be unrepairable for this vector)."""
        inst = self.instance
        ef = build_error_formula(inst, vector)
        with SatOracle(ef.formula.clauses, deadline=self.deadline, stats=self.stats) as eo:
            for xa in exclude:
                eo.add_clause([-x if xa[x] else x for x in inst.universals])
            res = eo.solve()
        if not res.sat:
            return Verified()
        delta = res.model
        xs = {x: delta.get(x, False) for x in inst.universals}
        ext = self.extension.solve([x if b else -x for x, b in xs.items()])
        if not ext.sat:
            return InstanceFalse(xs)
        cex = Counterexample(
            xs,
            {y: ext.value(y) for y in inst.existentials},
            {y: delta.get(ef.primed[y], False) for y in inst.existentials},
        )
        if __debug__:
            cex.check(inst, vector)
        return CexFound(cex)

    def has_extension(self, xs: Mapping[int, bool]) -> bool:
        return self.extension.solve([x if b else -x for x, b in xs.items()]).sat


def verify(instance: DqbfInstance, vector: HenkinVector, deadline: float | None = None) -> VerifyResult:
    v = Verifier(instance, deadline)
    try:
        return v.verify(vector)
    finally:
        v.close()
