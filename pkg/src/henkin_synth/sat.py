"""SAT oracle: incremental solving under assumptions, failed-assumption
cores, and exact partial MaxSAT by linear search.

The decision procedure itself is MiniSat 2.2 from python-sat. Timeouts
raise :class:`SolverTimeout`; they are never reported as UNSAT.
"""

from __future__ import annotations

import enum
import logging
import threading
import time
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Sequence

from pysat.solvers import Minisat22

log = logging.getLogger(__name__)

Clause = tuple[int, ...]


class SolverTimeout(Exception):
    """The deadline passed before the solver reached a verdict."""


class Status(enum.Enum):
    SAT = "SAT"
    UNSAT = "UNSAT"


@dataclass(frozen=True)
class SatQuery:
    clauses: tuple[Clause, ...]
    assumptions: tuple[int, ...] = ()


@dataclass(frozen=True)
class SatResult:
    status: Status
    model: dict[int, bool] | None = None
    failed: tuple[int, ...] | None = None

    @property
    def sat(self) -> bool:
        return self.status is Status.SAT

    def value(self, v: int) -> bool:
        return self.model.get(v, False)


@dataclass
class SolverStats:
    calls: int = 0
    seconds: float = 0.0


def _satisfied(clause: Iterable[int], model: dict[int, bool]) -> bool:
    return any(model.get(abs(l), False) == (l > 0) for l in clause)


class SatOracle:
    """One incremental clause database.

    Not thread-safe; use one oracle per thread. ``deadline`` is an absolute
    ``time.monotonic()`` value shared with the caller's budget.
    """

    def __init__(
        self,
        clauses: Iterable[Sequence[int]] = (),
        *,
        deadline: float | None = None,
        stats: SolverStats | None = None,
        check_models: bool = __debug__,
    ):
        self._solver = Minisat22()
        self._clauses: list[Clause] = []
        self._top = 0
        self.deadline = deadline
        self.stats = stats if stats is not None else SolverStats()
        self.check_models = check_models
        self._empty = False
        self.add_clauses(clauses)

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def close(self) -> None:
        if self._solver is not None:
            self._solver.delete()
            self._solver = None

    def __del__(self):
        try:
            self.close()
        except Exception:
            pass

    @property
    def top(self) -> int:
        return self._top

    def add_clause(self, clause: Sequence[int]) -> None:
        c = tuple(clause)
        if not c:
            self._empty = True
            return
        self._top = max(self._top, max(abs(l) for l in c))
        self._clauses.append(c)
        self._solver.add_clause(list(c))

    def add_clauses(self, clauses: Iterable[Sequence[int]]) -> None:
        for c in clauses:
            self.add_clause(c)

    def set_phases(self, literals: Sequence[int]) -> None:
        self._solver.set_phases(list(literals))

    def _run(self, assumptions: list[int]) -> bool:
        if self.deadline is None:
            return self._solver.solve(assumptions=assumptions)
        remaining = self.deadline - time.monotonic()
        if remaining <= 0:
            raise SolverTimeout()
        timer = threading.Timer(remaining, self._solver.interrupt)
        timer.start()
        try:
            res = self._solver.solve_limited(assumptions=assumptions, expect_interrupt=True)
        finally:
            timer.cancel()
            self._solver.clear_interrupt()
        if res is None:
            raise SolverTimeout()
        return res

    def solve(self, assumptions: Sequence[int] = ()) -> SatResult:
        assumptions = list(assumptions)
        self.stats.calls += 1
        if self._empty:
            return SatResult(Status.UNSAT, failed=())
        start = time.perf_counter()
        try:
            ok = self._run(assumptions)
        finally:
            self.stats.seconds += time.perf_counter() - start
        if ok:
            raw = self._solver.get_model() or []
            model = {abs(l): l > 0 for l in raw}
            for v in range(1, self._top + 1):
                model.setdefault(v, False)
            for a in assumptions:
                model.setdefault(abs(a), a > 0)
            if self.check_models:
                assert all(_satisfied(c, model) for c in self._clauses), "model violates a clause"
                assert all(model[abs(a)] == (a > 0) for a in assumptions), "model violates assumption"
            return SatResult(Status.SAT, model=model)
        core = self._solver.get_core()
        return SatResult(Status.UNSAT, failed=tuple(core or ()))

    def core(self, assumptions: Sequence[int], shrink: bool = True) -> tuple[int, ...]:
        """Failed assumptions of an UNSAT call, optionally shrunk by one
        deletion pass (each literal dropped if the rest stays UNSAT)."""
        res = self.solve(assumptions)
        if res.sat:
            raise ValueError("core requested for a satisfiable query")
        core = list(res.failed)
        if not shrink:
            return tuple(core)
        i = 0
        while i < len(core):
            trial = core[:i] + core[i + 1:]
            r = self.solve(trial)
            if r.sat:
                i += 1
            else:
                # keep only what the solver still needed, preserving order
                needed = set(r.failed)
                core = [l for l in trial if l in needed]
        return tuple(core)


def check_sat(query: SatQuery, deadline: float | None = None) -> SatResult:
    with SatOracle(query.clauses, deadline=deadline) as oracle:
        return oracle.solve(query.assumptions)


def failed_core(query: SatQuery, shrink: bool = True, deadline: float | None = None) -> tuple[int, ...]:
    with SatOracle(query.clauses, deadline=deadline) as oracle:
        return oracle.core(query.assumptions, shrink=shrink)


# -- partial MaxSAT -----------------------------------------------------------

class HardUnsatisfiable(ValueError):
    pass


@dataclass(frozen=True)
class MaxSatQuery:
    hard: tuple[Clause, ...]
    soft: tuple[tuple[Clause, Hashable], ...]


def _sequential_counter(inputs: Sequence[int], pool_top: int) -> tuple[list[Clause], list[int], int]:
    """Unary counter over ``inputs``: returns (clauses, outs, new_top) where
    ``outs[j]`` is forced true whenever more than j inputs are true.
    Asserting ``-outs[k]`` therefore enforces at most k true inputs."""
    n = len(inputs)
    top = pool_top
    clauses: list[Clause] = []
    prev: list[int] = []  # prev[j]: at least j+1 of inputs[:i] true
    for i, x in enumerate(inputs):
        cur = []
        for j in range(i + 1):
            top += 1
            cur.append(top)
        # s_{i,0} <- x ; s_{i,j} <- s_{i-1,j} ; s_{i,j} <- x & s_{i-1,j-1}
        clauses.append((-x, cur[0]))
        for j in range(len(prev)):
            clauses.append((-prev[j], cur[j]))
            clauses.append((-x, -prev[j], cur[j + 1]))
        prev = cur
    return clauses, prev, top


def solve_maxsat(
    query: MaxSatQuery,
    deadline: float | None = None,
    stats: SolverStats | None = None,
) -> tuple[dict[int, bool], set]:
    """Exact minimum number of falsified soft clauses subject to ``hard``.

    Each soft clause gets a relaxation variable; an at-most-k counter over
    the relaxation variables is tightened until the bound is infeasible.
    Returns the last optimal model and the tags of its falsified softs.
    """
    top = max((abs(l) for c in query.hard for l in c), default=0)
    top = max([top, *(abs(l) for c, _ in query.soft for l in c)])
    relax = []
    clauses = list(query.hard)
    for c, _ in query.soft:
        top += 1
        relax.append(top)
        clauses.append(tuple(c) + (top,))
    counter, outs, top = _sequential_counter(relax, top)
    clauses.extend(counter)

    with SatOracle(clauses, deadline=deadline, stats=stats) as oracle:
        res = oracle.solve()
        if not res.sat:
            raise HardUnsatisfiable("hard clauses are unsatisfiable")

        def falsified(model):
            return [tag for c, tag in query.soft if not _satisfied(c, model)]

        best = res.model
        cost = len(falsified(best))
        while cost > 0:
            # at most cost-1 relaxation variables may be true
            r = oracle.solve([-outs[cost - 1]])
            if not r.sat:
                break
            best = r.model
            cost = len(falsified(best))
        inst_vars = {abs(l) for c in query.hard for l in c} | {
            abs(l) for c, _ in query.soft for l in c
        }
        model = {v: best.get(v, False) for v in sorted(inst_vars)}
        return model, set(falsified(best))
