"""Random small instances and vectors for property tests and benchmarks."""

from __future__ import annotations

import itertools
import random

from . import expr as ex
from .certificate import HenkinVector
from .formula import DqbfInstance


def random_instance(
    rng: random.Random,
    max_x: int = 4,
    max_y: int = 3,
    max_h: int = 3,
    max_clauses: int = 8,
    max_width: int = 3,
) -> DqbfInstance:
    nx = rng.randint(1, max_x)
    ny = rng.randint(1, max_y)
    xs = list(range(1, nx + 1))
    ys = list(range(nx + 1, nx + ny + 1))
    henkin = {y: rng.sample(xs, rng.randint(0, min(max_h, nx))) for y in ys}
    allv = xs + ys
    clauses = []
    for _ in range(rng.randint(1, max_clauses)):
        width = rng.randint(1, min(max_width, len(allv)))
        # every clause touches an existential, otherwise most instances are trivially false
        vs = set(rng.sample(allv, width)) | {rng.choice(ys)}
        clauses.append([v if rng.random() < 0.5 else -v for v in sorted(vs)])
    return DqbfInstance.create(xs, henkin, clauses, num_vars=nx + ny)


def random_function(rng: random.Random, inputs: list[int]) -> ex.BoolExpr:
    """Uniform random truth table over ``inputs`` as a sum of minterms."""
    cubes = []
    for bits in itertools.product((False, True), repeat=len(inputs)):
        if rng.random() < 0.5:
            cubes.append(ex.mk_and(*(ex.lit(v if b else -v) for v, b in zip(inputs, bits))))
    return ex.mk_or(*cubes)


def random_vector(rng: random.Random, instance: DqbfInstance) -> HenkinVector:
    return HenkinVector({
        y: random_function(rng, sorted(instance.henkin[y])) for y in instance.existentials
    })


def random_expr(rng: random.Random, vs: list[int], depth: int) -> ex.BoolExpr:
    """Raw (unfolded) random tree, for encoding tests."""
    if depth == 0 or rng.random() < 0.25:
        r = rng.random()
        if r < 0.1:
            return ex.Const(rng.random() < 0.5)
        return ex.VarRef(rng.choice(vs))
    kind = rng.choice(("not", "and", "or"))
    if kind == "not":
        return ex.Not(random_expr(rng, vs, depth - 1))
    kids = tuple(random_expr(rng, vs, depth - 1) for _ in range(rng.randint(1, 3)))
    return (ex.And if kind == "and" else ex.Or)(kids)
