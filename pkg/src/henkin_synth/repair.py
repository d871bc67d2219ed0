"""Counterexample-driven candidate repair.

MaxSAT picks which candidates to touch; for each one a probe asks whether
``y_k`` may take its candidate output given the counterexample's values on
``H_k`` (and on later-ordered existentials it may read). An UNSAT probe
yields a core of counterexample literals ``beta``; the candidate is then
strengthened with ``not beta`` or weakened with ``beta``.
"""

from __future__ import annotations

import enum
import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Sequence, TextIO

from . import expr as ex
from .certificate import HenkinVector
from .expr import BoolExpr
from .formula import DqbfInstance
from .sat import MaxSatQuery, SatOracle, SatQuery, SolverStats, solve_maxsat
from .verifier import Counterexample

log = logging.getLogger(__name__)


class Outcome(enum.Enum):
    PROGRESS = "progress"
    STUCK = "stuck"


@dataclass
class RepairReport:
    outcome: Outcome
    probes: int = 0
    repaired: list[int] = field(default_factory=list)
    unrepaired: list[int] = field(default_factory=list)


def _lit(v: int, value: bool) -> int:
    return v if value else -v


def find_candidates(
    instance: DqbfInstance,
    cex: Counterexample,
    deadline: float | None = None,
    stats: SolverStats | None = None,
) -> list[int]:
    """Existentials whose candidate output must change in a minimum-size fix."""
    hard = list(instance.matrix.clauses)
    hard += [(_lit(x, b),) for x, b in cex.x.items()]
    soft = [((_lit(y, cex.y_prime[y]),), y) for y in instance.existentials]
    _, flipped = solve_maxsat(MaxSatQuery(tuple(hard), tuple(soft)), deadline, stats)
    return sorted(flipped)


def compute_hat_y(instance: DqbfInstance, order: Sequence[int], y: int) -> list[int]:
    """Existentials that ``f_y`` may read during repair: Henkin set inside
    ``H_y`` and placed later in ``order``."""
    pos = {v: i for i, v in enumerate(order)}
    h = instance.henkin[y]
    return [
        yj for yj in order
        if instance.henkin[yj] <= h and pos[yj] > pos[y]
    ]


def gk_assumptions(
    instance: DqbfInstance,
    values: dict[int, bool],
    y: int,
    hat_y: Sequence[int],
    y_output: bool,
) -> list[int]:
    """``values`` maps universals and ``hat_y`` members to the
    counterexample's working values."""
    deps = sorted(instance.henkin[y])
    lits = [_lit(x, values[x]) for x in deps]
    lits += [_lit(yj, values[yj]) for yj in hat_y]
    lits.append(_lit(y, y_output))
    return lits


def build_gk(instance: DqbfInstance, cex: Counterexample, y: int, hat_y: Sequence[int]) -> SatQuery:
    values = {**cex.x, **cex.y_prime}
    return SatQuery(
        instance.matrix.clauses,
        tuple(gk_assumptions(instance, values, y, hat_y, cex.y_prime[y])),
    )


def repair_candidate(f: BoolExpr, beta_lits: Sequence[int], y_output: bool) -> BoolExpr:
    """Exclude (output 1) or include (output 0) the cube ``beta``."""
    beta = ex.mk_and(*(ex.lit(l) for l in beta_lits))
    if y_output:
        return ex.mk_and(f, ex.mk_not(beta))
    return ex.mk_or(f, beta)


def repair_hkf(
    instance: DqbfInstance,
    vector: HenkinVector,
    cex: Counterexample,
    order: Sequence[int],
    oracle: SatOracle | None = None,
    *,
    budget: int | None = None,
    shrink: bool = True,
    trace: TextIO | None = None,
    deadline: float | None = None,
    stats: SolverStats | None = None,
) -> tuple[HenkinVector, RepairReport]:
    """One repair pass driven by ``cex``.

    ``oracle`` must hold exactly the matrix clauses; all probe constraints
    go in as assumptions. At most ``budget`` probes run (default 4|Y|).
    """
    own = oracle is None
    if own:
        oracle = SatOracle(instance.matrix.clauses, deadline=deadline, stats=stats)
    if budget is None:
        budget = 4 * len(instance.existentials)
    ys = instance.existentials
    functions = dict(vector.functions)
    report = RepairReport(Outcome.STUCK)
    try:
        work = deque(find_candidates(instance, cex, deadline, stats))
        probed: set[int] = set(work)
        # working copy: universals plus candidate outputs (read for hat-Y);
        # y_work is the genuine-extension part, overwritten on SAT probes
        values = {**cex.x, **cex.y_prime}
        y_work = dict(cex.y)
        while work:
            if report.probes >= budget:
                log.debug("repair budget exhausted with %d queued", len(work))
                break
            yk = work.popleft()
            hat_y = compute_hat_y(instance, order, yk)
            out = cex.y_prime[yk]
            assumptions = gk_assumptions(instance, values, yk, hat_y, out)
            report.probes += 1
            res = oracle.solve(assumptions)
            if not res.sat:
                core = oracle.core(assumptions, shrink=shrink)
                ylit = _lit(yk, out)
                beta = [l for l in core if l != ylit]
                if not beta:
                    if trace:
                        trace.write(f"probe y={yk} UNSAT core={list(core)} beta=[] stuck\n")
                    continue
                functions[yk] = repair_candidate(functions[yk], beta, out)
                report.repaired.append(yk)
                if trace:
                    kind = "strengthen" if out else "weaken"
                    trace.write(f"probe y={yk} UNSAT core={list(core)} beta={beta} {kind}\n")
            else:
                added = []
                for yt in ys:
                    if yt in hat_y:
                        continue
                    if res.value(yt) != cex.y_prime[yt]:
                        work.append(yt)
                        probed.add(yt)
                        added.append(yt)
                y_work[yk] = cex.y_prime[yk]
                if trace:
                    trace.write(f"probe y={yk} SAT enqueue={added}\n")
        report.unrepaired = sorted(probed - set(report.repaired))
        if report.repaired:
            report.outcome = Outcome.PROGRESS
            for yk in set(report.repaired):
                functions[yk] = ex.simplify(functions[yk])
        return HenkinVector(functions), report
    finally:
        if own:
            oracle.close()
