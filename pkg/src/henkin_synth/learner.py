"""Candidate learning under Henkin constraints.

Each existential gets a Gini decision tree over its Henkin set plus those
existentials it may safely read; the 1-paths of the tree become the
candidate function. ``DepState`` keeps ``d_i``: the existentials that
(may) depend on ``y_i`` and therefore must not be read by ``f_i``.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from . import expr as ex
from .expr import BoolExpr
from .formula import DqbfInstance
from .sampler import SampleTable


class DependencyCycle(RuntimeError):
    pass


@dataclass
class DepState:
    depends_on: dict[int, set[int]]
    order: list[int] | None = None

    def copy(self) -> "DepState":
        return DepState(
            {y: set(d) for y, d in self.depends_on.items()},
            None if self.order is None else list(self.order),
        )

    def is_acyclic(self) -> bool:
        try:
            _toposort(self.depends_on)
        except DependencyCycle:
            return False
        return True

    def index(self) -> dict[int, int]:
        if self.order is None:
            raise ValueError("order not computed")
        return {y: i for i, y in enumerate(self.order)}


def init_dependencies(instance: DqbfInstance) -> DepState:
    """``y_i`` joins ``d_j`` whenever ``H_j`` is a strict subset of ``H_i``."""
    d = {y: set() for y in instance.existentials}
    for yi in instance.existentials:
        for yj in instance.existentials:
            if instance.henkin[yj] < instance.henkin[yi]:
                d[yj].add(yi)
    return DepState(d)


def feature_set(instance: DqbfInstance, dep: DepState, y: int) -> frozenset[int]:
    h = instance.henkin[y]
    extra = {
        yj
        for yj in instance.existentials
        if yj != y and instance.henkin[yj] <= h and yj not in dep.depends_on[y]
    }
    return frozenset(h | extra)


# -- decision trees -----------------------------------------------------------

@dataclass(frozen=True)
class Leaf:
    label: int


@dataclass(frozen=True)
class Node:
    var: int
    low: "DecisionTree"   # branch taken when var = 0
    high: "DecisionTree"  # branch taken when var = 1


DecisionTree = Union[Leaf, Node]


def _gini(pos: int, n: int) -> float:
    if n == 0:
        return 0.0
    p = pos / n
    return 2.0 * p * (1.0 - p)


def default_max_depth(n_features: int) -> int | None:
    return None if n_features <= 16 else 8


def learn_tree(
    features: Iterable[int],
    table: SampleTable,
    label: int,
    max_depth: int | None = None,
    seed: int = 0,
) -> DecisionTree:
    """Greedy top-down induction minimizing weighted Gini impurity.

    A node becomes a leaf when it is pure, when no remaining feature
    separates its rows, or at ``max_depth``. Ties between features go to
    the larger variable id; majority ties go to 0. ``seed`` is accepted
    for interface symmetry; induction is deterministic.
    """
    feats = sorted(set(features), reverse=True)
    if label in feats:
        raise ValueError("label cannot be a feature")
    if table.count == 0:
        raise ValueError("empty training table")
    X = table.project(feats).astype(bool)
    y = table.column(label).astype(bool)

    def build(rows: np.ndarray, avail: list[int], depth: int) -> DecisionTree:
        labels = y[rows]
        n = len(labels)
        pos = int(labels.sum())
        majority = 1 if pos * 2 > n else 0
        if pos == 0 or pos == n or not avail:
            return Leaf(majority)
        if max_depth is not None and depth >= max_depth:
            return Leaf(majority)
        best = None
        for j in avail:
            col = X[rows, j]
            n1 = int(col.sum())
            n0 = n - n1
            if n0 == 0 or n1 == 0:
                continue
            p1 = int(labels[col].sum())
            p0 = pos - p1
            score = (n0 * _gini(p0, n0) + n1 * _gini(p1, n1)) / n
            # feats is descending, so strict < keeps the larger id on ties
            if best is None or score < best[0] - 1e-12:
                best = (score, j)
        if best is None:
            return Leaf(majority)
        j = best[1]
        col = X[rows, j]
        rest = [k for k in avail if k != j]
        return Node(
            feats[j],
            build(rows[~col], rest, depth + 1),
            build(rows[col], rest, depth + 1),
        )

    return build(np.arange(table.count), list(range(len(feats))), 0)


def classify(tree: DecisionTree, assignment: Mapping[int, bool]) -> int:
    while isinstance(tree, Node):
        tree = tree.high if assignment[tree.var] else tree.low
    return tree.label


def tree_to_expr(tree: DecisionTree) -> BoolExpr:
    """Disjunction of the root-to-leaf paths that end in label 1."""
    paths: list[BoolExpr] = []
    stack: list[tuple[DecisionTree, tuple[int, ...]]] = [(tree, ())]
    while stack:
        node, path = stack.pop()
        if isinstance(node, Leaf):
            if node.label == 1:
                paths.append(ex.mk_and(*(ex.lit(l) for l in path)))
            continue
        # low pushed first so the 1-branch path is emitted first
        stack.append((node.low, path + (-node.var,)))
        stack.append((node.high, path + (node.var,)))
    return ex.mk_or(*paths)


def format_tree(tree: DecisionTree) -> str:
    lines = []

    def walk(t, indent, edge):
        pad = "  " * indent + edge
        if isinstance(t, Leaf):
            lines.append(f"{pad}leaf {t.label}")
        else:
            lines.append(f"{pad}var {t.var}")
            walk(t.low, indent + 1, "0: ")
            walk(t.high, indent + 1, "1: ")

    walk(tree, 0, "")
    return "\n".join(lines) + "\n"


def _close(dep: DepState) -> None:
    """Make ``depends_on`` transitive: whoever depends on y_k also depends
    on everything y_k depends on."""
    changed = True
    d = dep.depends_on
    while changed:
        changed = False
        for yk, dk in d.items():
            for yj in list(dk):
                new = d[yj] - dk
                if new:
                    dk |= new
                    changed = True


def candidate_hkf(
    instance: DqbfInstance,
    table: SampleTable,
    y: int,
    dep: DepState,
    max_depth: int | None = None,
    allowed: Iterable[int] | None = None,
) -> tuple[BoolExpr, DepState, DecisionTree]:
    """Learn ``f_y`` and record the dependencies it introduces.

    ``allowed`` optionally narrows the existentials usable as features
    (used when relearning against a fixed order).
    """
    feats = feature_set(instance, dep, y)
    if allowed is not None:
        allowed = set(allowed)
        feats = frozenset(v for v in feats if v in instance.henkin[y] or v in allowed)
    if max_depth is None:
        max_depth = default_max_depth(len(feats))
    tree = learn_tree(feats, table, y, max_depth)
    f = tree_to_expr(tree)
    dep = dep.copy()
    ys = set(instance.existentials)
    for yk in ex.variables(f) & ys:
        dep.depends_on[yk] |= {y} | dep.depends_on[y]
    _close(dep)
    if any(yk in d for yk, d in dep.depends_on.items()):
        raise DependencyCycle(f"learning f_{y} created a dependency cycle")
    return f, dep, tree


def _toposort(depends_on: Mapping[int, set[int]]) -> list[int]:
    # y_i in d_j: y_i must come before y_j
    indeg = {y: 0 for y in depends_on}
    succ: dict[int, list[int]] = {y: [] for y in depends_on}
    for yj, dj in depends_on.items():
        for yi in dj:
            succ[yi].append(yj)
            indeg[yj] += 1
    heap = [y for y, k in indeg.items() if k == 0]
    heapq.heapify(heap)
    out = []
    while heap:
        y = heapq.heappop(heap)
        out.append(y)
        for z in succ[y]:
            indeg[z] -= 1
            if indeg[z] == 0:
                heapq.heappush(heap, z)
    if len(out) != len(indeg):
        raise DependencyCycle("dependency relation has a cycle")
    return out


def find_order(dep: DepState) -> list[int]:
    """Linear extension in which anything ``y_i`` may read sits at a higher
    index than ``y_i``. Ties go to the smaller variable id."""
    return _toposort(dep.depends_on)


def mention_order_ok(instance: DqbfInstance, functions: Mapping[int, BoolExpr], order: Sequence[int]) -> bool:
    """Every existential read by ``f_i`` sits later than ``y_i`` in ``order``."""
    pos = {y: i for i, y in enumerate(order)}
    ys = set(instance.existentials)
    return all(
        pos[yk] > pos[y]
        for y, f in functions.items()
        for yk in ex.variables(f) & ys
    )
