"""Synthesis driver: sample, learn, order, then verify/repair until the
candidates check out, the instance is refuted, or a budget runs out."""

from __future__ import annotations

import collections
import logging
import os
import time
from dataclasses import dataclass, field
from typing import Mapping, TextIO, Union

from . import expr as ex
from .certificate import HenkinVector
from .expr import BoolExpr
from .formula import DqbfInstance
from .learner import (
    DepState,
    candidate_hkf,
    find_order,
    format_tree,
    init_dependencies,
    mention_order_ok,
)
from .repair import Outcome, repair_hkf
from .sampler import SampleTable, get_samples
from .sat import SatOracle, SolverStats, SolverTimeout
from .verifier import CexFound, InstanceFalse, Verified, Verifier

log = logging.getLogger(__name__)

STUCK_LIMIT = 3
RESAMPLE_AFTER = 32


@dataclass
class Config:
    seed: int = 1
    samples: int | None = None
    timeout: float | None = None
    max_iterations: int = 1000
    strict_paper: bool = False
    max_depth: int | None = None
    shrink_cores: bool = True
    sample_bias: float = 0.0
    dump_samples: str | None = None
    dump_trees: str | None = None
    trace_repairs: TextIO | None = None
    # test hooks: fixed training data / fixed initial candidates
    sample_table: SampleTable | None = None
    initial_candidates: Mapping[int, BoolExpr] | None = None


@dataclass
class Stats:
    samples: int = 0
    iterations: int = 0
    repairs: int = 0
    probes: int = 0
    resamples: int = 0
    solver_calls: int = 0
    seconds: float = 0.0


@dataclass(frozen=True)
class Synthesized:
    vector: HenkinVector


@dataclass(frozen=True)
class False_:
    witness: dict[int, bool]


@dataclass(frozen=True)
class Unknown:
    reason: str
    unrepaired: tuple[int, ...] = ()


@dataclass
class SynthesisOutcome:
    result: Union[Synthesized, False_, Unknown]
    stats: Stats = field(default_factory=Stats)
    candidates: HenkinVector | None = None  # the initial learned vector
    order: list[int] | None = None

    @property
    def kind(self) -> str:
        return {Synthesized: "synthesized", False_: "false", Unknown: "unknown"}[type(self.result)]


def substitute(instance: DqbfInstance, vector: HenkinVector, order: list[int]) -> HenkinVector:
    """Expand existential references so that each function reads only its
    Henkin set. Later-ordered functions are resolved first."""
    ys = set(instance.existentials)
    resolved: dict[int, BoolExpr] = {}
    for y in reversed(order):
        f = vector[y]
        refs = ex.variables(f) & ys
        missing = refs - resolved.keys()
        if missing:
            raise RuntimeError(f"f_{y} reads {sorted(missing)} which are not ordered after it")
        if refs:
            f = ex.substitute(f, {r: resolved[r] for r in refs})
        resolved[y] = ex.simplify(f)
    return HenkinVector({y: resolved[y] for y in instance.existentials})


class _Run:
    def __init__(self, instance: DqbfInstance, config: Config):
        self.inst = instance
        self.cfg = config
        self.stats = Stats()
        self.solver_stats = SolverStats()
        self.start = time.monotonic()
        self.deadline = None if config.timeout is None else self.start + config.timeout
        self.repair_counts: collections.Counter = collections.Counter()

    # -- learning ---------------------------------------------------------

    def sample(self, seed: int) -> SampleTable:
        return get_samples(
            self.inst,
            self.cfg.samples,
            seed,
            bias=self.cfg.sample_bias,
            deadline=self.deadline,
            stats=self.solver_stats,
        )

    def learn(self, table: SampleTable) -> tuple[dict[int, BoolExpr], DepState]:
        dep = init_dependencies(self.inst)
        funcs = {}
        for y in sorted(self.inst.existentials):
            f, dep, tree = candidate_hkf(self.inst, table, y, dep, self.cfg.max_depth)
            funcs[y] = f
            if self.cfg.dump_trees:
                os.makedirs(self.cfg.dump_trees, exist_ok=True)
                with open(os.path.join(self.cfg.dump_trees, f"y{y}.tree"), "w") as fh:
                    fh.write(format_tree(tree))
        return funcs, dep

    def relearn(self, funcs: dict[int, BoolExpr], order: list[int]) -> dict[int, BoolExpr]:
        """Fresh samples; relearn the most-repaired quarter of the
        existentials, reading only existentials ordered after them so
        ``order`` stays valid."""
        self.stats.resamples += 1
        table = self.sample(self.cfg.seed + 7919 * self.stats.resamples)
        if table.count == 0:
            return funcs
        ranked = [y for y, _ in self.repair_counts.most_common()]
        k = max(1, len(self.inst.existentials) // 4)
        pos = {y: i for i, y in enumerate(order)}
        dep = DepState({y: set() for y in self.inst.existentials})
        funcs = dict(funcs)
        for y in ranked[:k]:
            later = [z for z in order if pos[z] > pos[y]]
            f, _, _ = candidate_hkf(self.inst, table, y, dep, self.cfg.max_depth, allowed=later)
            funcs[y] = f
        self.repair_counts.clear()
        return funcs

    # -- main loop --------------------------------------------------------

    def run(self) -> SynthesisOutcome:
        inst, cfg, stats = self.inst, self.cfg, self.stats
        verifier = Verifier(inst, self.deadline, self.solver_stats)
        matrix_oracle = SatOracle(inst.matrix.clauses, deadline=self.deadline, stats=self.solver_stats)
        outcome = SynthesisOutcome(Unknown("not started"), stats)
        try:
            outcome = self._run(verifier, matrix_oracle, outcome)
        except SolverTimeout:
            outcome.result = Unknown("timeout")
        finally:
            verifier.close()
            matrix_oracle.close()
            stats.solver_calls = self.solver_stats.calls
            stats.seconds = time.monotonic() - self.start
        return outcome

    def _false(self, witness: dict[int, bool], verifier: Verifier) -> False_:
        if verifier.has_extension(witness):
            raise AssertionError("false witness has an extension")
        return False_(witness)

    def _run(self, verifier: Verifier, matrix_oracle: SatOracle, outcome: SynthesisOutcome) -> SynthesisOutcome:
        inst, cfg, stats = self.inst, self.cfg, self.stats

        if cfg.initial_candidates is not None:
            funcs = {y: cfg.initial_candidates[y] for y in inst.existentials}
            dep = DepState({y: set() for y in inst.existentials})
            ys = set(inst.existentials)
            for y, f in funcs.items():
                for yk in ex.variables(f) & ys:
                    dep.depends_on[yk].add(y)
        else:
            table = cfg.sample_table if cfg.sample_table is not None else self.sample(cfg.seed)
            stats.samples = table.count
            if cfg.dump_samples:
                table.to_csv(cfg.dump_samples)
            if table.count == 0:
                # no model at all: any universal assignment refutes
                witness = {x: False for x in inst.universals}
                outcome.result = self._false(witness, verifier)
                return outcome
            funcs, dep = self.learn(table)

        order = find_order(dep)
        if not mention_order_ok(inst, funcs, order):
            raise RuntimeError("candidate vector is cyclic")
        outcome.candidates = HenkinVector(dict(funcs))
        outcome.order = order

        vector = HenkinVector(funcs)
        stuck_passes = 0
        excluded: list[dict[int, bool]] = []
        unrepaired: set[int] = set()
        streak = 0
        while True:
            if self.deadline is not None and time.monotonic() > self.deadline:
                outcome.result = Unknown("timeout")
                return outcome
            if stats.iterations >= cfg.max_iterations:
                outcome.result = Unknown("iteration budget exhausted")
                return outcome
            stats.iterations += 1
            res = verifier.verify(vector, excluded)
            if isinstance(res, Verified):
                if excluded:
                    outcome.result = Unknown(
                        "candidates cannot be repaired", tuple(sorted(unrepaired))
                    )
                    return outcome
                outcome.result = self._finish(vector, order)
                return outcome
            if isinstance(res, InstanceFalse):
                outcome.result = self._false(res.witness, verifier)
                return outcome
            streak += 1
            vector, report = repair_hkf(
                inst, vector, res.cex, order, matrix_oracle,
                shrink=cfg.shrink_cores,
                trace=cfg.trace_repairs,
                deadline=self.deadline,
                stats=self.solver_stats,
            )
            stats.probes += report.probes
            if report.outcome is Outcome.PROGRESS:
                stats.repairs += len(report.repaired)
                self.repair_counts.update(report.repaired)
                stuck_passes = 0
                excluded.clear()
                unrepaired.clear()
            else:
                stuck_passes += 1
                excluded.append(res.cex.x)
                unrepaired.update(report.unrepaired)
                if stuck_passes >= STUCK_LIMIT:
                    outcome.result = Unknown(
                        "candidates cannot be repaired", tuple(sorted(unrepaired))
                    )
                    return outcome
            if (
                not cfg.strict_paper
                and cfg.initial_candidates is None
                and streak > RESAMPLE_AFTER
            ):
                log.debug("%d counterexamples in a row; relearning", streak)
                vector = HenkinVector(self.relearn(dict(vector.functions), order))
                streak = 0
                stuck_passes = 0
                excluded.clear()
                unrepaired.clear()

    def _finish(self, vector: HenkinVector, order: list[int]) -> Synthesized:
        resolved = substitute(self.inst, vector, order)
        bad = resolved.henkin_violations(self.inst)
        if bad:
            raise AssertionError(f"resolved vector breaks Henkin sets: {bad}")
        # independent re-check on a fresh oracle
        fresh = Verifier(self.inst, self.deadline, self.solver_stats)
        try:
            if not isinstance(fresh.verify(resolved), Verified):
                raise AssertionError("final re-verification failed")
        finally:
            fresh.close()
        return Synthesized(resolved)


def synthesize(instance: DqbfInstance, config: Config | None = None) -> SynthesisOutcome:
    return _Run(instance, config or Config()).run()
