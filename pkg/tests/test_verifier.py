import random

import pytest

from henkin_synth import expr as ex
from henkin_synth import oracle
from henkin_synth.certificate import HenkinVector
from henkin_synth.formula import DqbfInstance, parse_dqdimacs
from henkin_synth.generators import random_instance, random_vector
from henkin_synth.sat import SatOracle
from henkin_synth.verifier import (
    CexFound,
    InstanceFalse,
    Verified,
    Verifier,
    build_error_formula,
    verify,
)

from conftest import X1, X2, X3, Y1, Y2, Y3


def test_tautological_matrix_verifies():
    # (y1 | -y1) is dropped at parse time, leaving no clauses
    inst = parse_dqdimacs("p cnf 2 1\na 1 0\nd 2 0\n2 -2 0\n")
    ef = build_error_formula(inst, HenkinVector({2: ex.TRUE}))
    with SatOracle(ef.formula.clauses) as o:
        assert not o.solve().sat
    assert isinstance(verify(inst, HenkinVector({2: ex.FALSE})), Verified)


def test_example1_initial_is_sat(example1, example1_initial):
    res = verify(example1, HenkinVector(example1_initial))
    assert isinstance(res, CexFound)
    cex = res.cex
    assert cex.x == {X1: True, X2: False, X3: False}
    assert cex.y_prime == {Y1: False, Y2: False, Y3: False}
    # any genuine extension: x1 = 1, x2 = 0 forces y2 = 1, y3 = 0
    assert cex.y[Y2] is True and cex.y[Y3] is False


def test_example1_repaired_is_unsat(example1, example1_repaired):
    assert isinstance(verify(example1, HenkinVector(example1_repaired)), Verified)


def test_false_instance_detected():
    # (y | x) & (-y | x): x = 0 has no extension
    inst = DqbfInstance.create([1], {2: []}, [[2, 1], [-2, 1]])
    for const in (ex.TRUE, ex.FALSE):
        res = verify(inst, HenkinVector({2: const}))
        assert isinstance(res, InstanceFalse)
        assert res.witness == {1: False}
        assert not oracle.has_extension(inst, res.witness)


def test_const_cannot_track_gives_counterexample():
    # every x has an extension, so the verifier can only report counterexamples
    inst = DqbfInstance.create([1], {2: []}, [[-2, 1], [2, -1]])
    assert not oracle.decide_truth(inst)[0]
    for const in (ex.TRUE, ex.FALSE):
        res = verify(inst, HenkinVector({2: const}))
        assert isinstance(res, CexFound)
        assert res.cex.x == {1: not const.value}


def test_exclusions(example1, example1_initial):
    v = Verifier(example1)
    vec = HenkinVector(example1_initial)
    first = v.verify(vec).cex.x
    second = v.verify(vec, [first]).cex.x
    assert second != first and second[X1] and not second[X2]
    assert isinstance(v.verify(vec, [first, second]), Verified)
    v.close()


def test_verifier_matches_enumeration_on_random_pairs():
    rng = random.Random(5)
    agree = {True: 0, False: 0}
    for _ in range(150):
        inst = random_instance(rng)
        vec = random_vector(rng, inst)
        ok = oracle.check_vector(inst, vec)
        res = verify(inst, vec)
        assert isinstance(res, Verified) == ok
        if isinstance(res, InstanceFalse):
            assert not oracle.has_extension(inst, res.witness)
        agree[ok] += 1
    assert agree[True] > 0 and agree[False] > 0
