"""Training data: distinct satisfying assignments of the matrix.

Sampling is randomized-phase enumeration: each round the solver gets a
fresh random polarity per variable, the model found is recorded and
blocked. This is not uniform sampling; the learner only needs a spread of
models, and the verify/repair loop makes up for poor coverage.
"""

from __future__ import annotations

import csv
import random
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .formula import DqbfInstance
from .sat import SatOracle, SolverStats


@dataclass(frozen=True)
class SampleTable:
    """Rows of 0/1 values; column ``j`` holds variable ``variables[j]``."""

    variables: tuple[int, ...]
    rows: np.ndarray  # shape (count, len(variables)), dtype uint8

    @property
    def count(self) -> int:
        return int(self.rows.shape[0])

    def __len__(self):
        return self.count

    def column(self, v: int) -> np.ndarray:
        return self.rows[:, self.variables.index(v)]

    def project(self, vs: Sequence[int]) -> np.ndarray:
        idx = [self.variables.index(v) for v in vs]
        return self.rows[:, idx]

    def assignments(self) -> Iterable[dict[int, bool]]:
        for row in self.rows:
            yield {v: bool(b) for v, b in zip(self.variables, row)}

    @classmethod
    def from_rows(
        cls,
        variables: Sequence[int],
        rows: Iterable[Sequence[int]],
        instance: DqbfInstance | None = None,
    ) -> "SampleTable":
        """Build a table, dropping duplicate rows. With ``instance`` given,
        every row is checked against the matrix."""
        seen = {}
        for r in rows:
            key = tuple(int(bool(b)) for b in r)
            if len(key) != len(variables):
                raise ValueError("row width does not match variables")
            seen.setdefault(key, None)
        arr = np.array(list(seen), dtype=np.uint8).reshape(len(seen), len(variables))
        table = cls(tuple(variables), arr)
        if instance is not None:
            for a in table.assignments():
                if not instance.holds(a):
                    raise ValueError(f"sample row does not satisfy the matrix: {a}")
        return table

    def merge(self, other: "SampleTable") -> "SampleTable":
        if self.variables != other.variables:
            raise ValueError("cannot merge tables over different variables")
        return SampleTable.from_rows(
            self.variables, [*map(tuple, self.rows), *map(tuple, other.rows)]
        )

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(self.variables)
            w.writerows(self.rows.tolist())


def default_sample_count(instance: DqbfInstance) -> int:
    return min(10000, 50 * (len(instance.universals) + len(instance.existentials)))


def get_samples(
    instance: DqbfInstance,
    target: int | None = None,
    seed: int = 1,
    *,
    bias: float = 0.0,
    deadline: float | None = None,
    stats: SolverStats | None = None,
) -> SampleTable:
    """Up to ``target`` distinct models of the matrix (empty if unsatisfiable).

    ``bias`` is the probability that an existential keeps the polarity it
    had in the previous sample instead of a fresh coin flip.
    """
    if target is None:
        target = default_sample_count(instance)
    variables = instance.variables
    if instance.trivially_false:
        return SampleTable(variables, np.zeros((0, len(variables)), dtype=np.uint8))
    rng = random.Random(seed)
    ys = set(instance.existentials)
    rows: list[tuple[int, ...]] = []
    prev: dict[int, bool] = {}
    # blocking clauses live only in this oracle
    with SatOracle(instance.matrix.clauses, deadline=deadline, stats=stats) as oracle:
        while len(rows) < target:
            phases = []
            for v in variables:
                if bias and v in prev and v in ys and rng.random() < bias:
                    val = prev[v]
                else:
                    val = rng.random() < 0.5
                phases.append(v if val else -v)
            oracle.set_phases(phases)
            res = oracle.solve()
            if not res.sat:
                break
            row = tuple(int(res.value(v)) for v in variables)
            rows.append(row)
            prev = {v: bool(b) for v, b in zip(variables, row)}
            if not variables:
                break
            oracle.add_clause([-v if b else v for v, b in zip(variables, row)])
    table = SampleTable.from_rows(variables, rows)
    for a in table.assignments():
        assert instance.holds(a), "sampler produced a non-model"
    return table
