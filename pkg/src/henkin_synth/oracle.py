"""Brute-force ground truth. Deliberately naive and SAT-free: everything
here is plain enumeration so it can cross-check the solver-based paths."""

from __future__ import annotations

import itertools
from typing import Hashable, Iterator, Mapping, Sequence

from . import expr as ex
from .certificate import HenkinVector
from .formula import DqbfInstance


class CapExceeded(ValueError):
    pass


MAX_UNIVERSALS = 20
MAX_TABLE_BITS = 24
MAX_DECIDE_UNIVERSALS = 16


def assignments(vs: Sequence[int]) -> Iterator[dict[int, bool]]:
    """All assignments to ``vs`` in lexicographic order (first var slowest)."""
    for bits in itertools.product((False, True), repeat=len(vs)):
        yield dict(zip(vs, bits))


def resolve_vector(instance: DqbfInstance, vector: HenkinVector) -> dict[int, ex.BoolExpr]:
    """Expand existential references so each function reads only universals.
    Fails on a cyclic vector."""
    ys = set(instance.existentials)
    done: dict[int, ex.BoolExpr] = {}
    active: set[int] = set()

    def go(y):
        if y in done:
            return done[y]
        if y in active:
            raise ValueError("cyclic function vector")
        active.add(y)
        f = vector[y]
        refs = ex.variables(f) & ys
        f = ex.substitute(f, {r: go(r) for r in refs}) if refs else f
        active.discard(y)
        done[y] = f
        return f

    for y in instance.existentials:
        go(y)
    return done


def check_vector(instance: DqbfInstance, vector: HenkinVector, cap: int = MAX_UNIVERSALS) -> bool:
    """True iff substituting the vector makes the matrix a tautology over X.

    The vector must respect Henkin sets once existential references are
    expanded; a function that reads a universal outside its Henkin set is
    rejected outright.
    """
    if len(instance.universals) > cap:
        raise CapExceeded(f"{len(instance.universals)} universals exceed cap {cap}")
    if set(vector.functions) != set(instance.existentials):
        return False
    funcs = resolve_vector(instance, vector)
    for y, f in funcs.items():
        if not ex.variables(f) <= instance.henkin[y]:
            return False
    for xa in assignments(instance.universals):
        full = dict(xa)
        for y, f in funcs.items():
            full[y] = ex.evaluate(f, xa)
        if not instance.holds(full):
            return False
    return True


def _table_key(instance: DqbfInstance, y: int, xa: Mapping[int, bool]) -> tuple:
    return (y, tuple(xa[x] for x in sorted(instance.henkin[y])))


def decide_truth(
    instance: DqbfInstance,
    bit_cap: int = MAX_TABLE_BITS,
    x_cap: int = MAX_DECIDE_UNIVERSALS,
) -> tuple[bool, dict | None]:
    """Decide the DQBF by searching over function tables.

    Table entries are assigned lazily while walking the universal
    assignments in order; a branch dies as soon as one universal
    assignment has no matrix model under the entries fixed so far. Returns
    ``(truth, tables)`` where ``tables`` maps ``(y, H_y-values)`` to the
    output bit for a witnessing vector (unspecified entries default to 0).
    """
    bits = sum(2 ** len(instance.henkin[y]) for y in instance.existentials)
    if bits > bit_cap:
        raise CapExceeded(f"{bits} table bits exceed cap {bit_cap}")
    if len(instance.universals) > x_cap:
        raise CapExceeded(f"{len(instance.universals)} universals exceed cap {x_cap}")
    if instance.trivially_false:
        return False, None
    xs_list = list(assignments(instance.universals))
    ys = instance.existentials
    table: dict[tuple, bool] = {}

    def search(t: int) -> bool:
        if t == len(xs_list):
            return True
        xa = xs_list[t]
        keys = [_table_key(instance, y, xa) for y in ys]
        free = [i for i, k in enumerate(keys) if k not in table]
        free_keys = list(dict.fromkeys(keys[i] for i in free))
        for combo in itertools.product((False, True), repeat=len(free_keys)):
            for k, b in zip(free_keys, combo):
                table[k] = b
            full = dict(xa)
            for y, k in zip(ys, keys):
                full[y] = table[k]
            if instance.matrix.evaluate(full) and search(t + 1):
                return True
            for k in free_keys:
                del table[k]
        return False

    if search(0):
        return True, dict(table)
    return False, None


def vector_from_tables(instance: DqbfInstance, tables: Mapping[tuple, bool]) -> HenkinVector:
    """Sum-of-minterms functions for a table witness from ``decide_truth``."""
    funcs = {}
    for y in instance.existentials:
        deps = sorted(instance.henkin[y])
        cubes = []
        for bits in itertools.product((False, True), repeat=len(deps)):
            if tables.get((y, bits), False):
                cubes.append(ex.mk_and(*(ex.lit(x if b else -x) for x, b in zip(deps, bits))))
        funcs[y] = ex.mk_or(*cubes)
    return HenkinVector(funcs)


def has_extension(instance: DqbfInstance, xa: Mapping[int, bool]) -> bool:
    for ya in assignments(instance.existentials):
        if instance.holds({**xa, **ya}):
            return True
    return False


def maxsat_optimum(
    hard: Sequence[Sequence[int]],
    soft: Sequence[tuple[Sequence[int], Hashable]],
) -> int | None:
    """Minimum number of falsified soft clauses over all assignments, or
    None if the hard clauses are unsatisfiable."""
    vs = sorted({abs(l) for c in hard for l in c} | {abs(l) for c, _ in soft for l in c})

    def sat(c, a):
        return any(a[abs(l)] == (l > 0) for l in c)

    best = None
    for a in assignments(vs):
        if all(sat(c, a) for c in hard):
            cost = sum(1 for c, _ in soft if not sat(c, a))
            if best is None or cost < best:
                best = cost
    return best
