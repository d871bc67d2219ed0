import itertools
import random

import pytest

from henkin_synth import oracle
from henkin_synth.formula import read_dqdimacs
from henkin_synth.sat import (
    HardUnsatisfiable,
    MaxSatQuery,
    SatOracle,
    SatQuery,
    SolverTimeout,
    Status,
    check_sat,
    failed_core,
    solve_maxsat,
)

from conftest import X1, X2, Y1, Y2


def random_cnf(rng, n_vars, n_clauses, width=3):
    return [
        tuple(v if rng.random() < 0.5 else -v for v in rng.sample(range(1, n_vars + 1), min(width, n_vars)))
        for _ in range(n_clauses)
    ]


def brute_sat(clauses, assumptions, n_vars):
    for bits in itertools.product((False, True), repeat=n_vars):
        a = dict(zip(range(1, n_vars + 1), bits))
        if all(a[abs(l)] == (l > 0) for l in assumptions) and all(
            any(a[abs(l)] == (l > 0) for l in c) for c in clauses
        ):
            return True
    return False


def test_unit_against_assumption():
    res = check_sat(SatQuery(((1,),), (-1,)))
    assert res.status is Status.UNSAT
    assert set(res.failed) <= {-1}


def test_simple_sat():
    res = check_sat(SatQuery(((1, 2),)))
    assert res.sat and (res.model[1] or res.model[2])


def test_example1_probe_unsat(example1):
    q = SatQuery(example1.matrix.clauses, (X1, -X2, -Y1, -Y2))
    assert not check_sat(q).sat


def test_example1_core_names_x2(example1):
    core = failed_core(SatQuery(example1.matrix.clauses, (X1, -X2, -Y1, -Y2)))
    assert -X2 in core
    assert set(core) == {-X2, -Y2}


def test_core_shrinks_irrelevant():
    assert failed_core(SatQuery(((1,),), (-1, 2))) == (-1,)


def test_core_on_sat_query_raises():
    with pytest.raises(ValueError):
        failed_core(SatQuery(((1, 2),), (1,)))


def test_random_cores_reverify():
    rng = random.Random(6)
    done = 0
    while done < 50:
        clauses = random_cnf(rng, 6, rng.randint(3, 10))
        assumptions = tuple(v if rng.random() < 0.5 else -v for v in rng.sample(range(1, 7), 4))
        if brute_sat(clauses, assumptions, 6) or not brute_sat(clauses, (), 6):
            continue
        core = failed_core(SatQuery(tuple(clauses), assumptions))
        assert set(core) <= set(assumptions)
        assert not brute_sat(clauses, core, 6)
        done += 1


def test_models_satisfy_clauses():
    rng = random.Random(3)
    for _ in range(50):
        clauses = random_cnf(rng, 8, 12)
        res = check_sat(SatQuery(tuple(clauses)))
        assert res.sat == brute_sat(clauses, (), 8)
        if res.sat:
            assert all(any(res.value(abs(l)) == (l > 0) for l in c) for c in clauses)


def test_incremental_assumptions_leave_database_untouched():
    with SatOracle([(1, 2)]) as o:
        assert not o.solve([-1, -2]).sat
        assert o.solve().sat
        assert o.solve([-1]).value(2)


def test_empty_clause():
    with SatOracle([()]) as o:
        assert not o.solve().sat


def test_timeout_is_not_unsat():
    # pigeonhole 9 into 8 holes keeps MiniSat busy well past the deadline
    n = 9
    var = lambda p, h: p * (n - 1) + h + 1
    clauses = [tuple(var(p, h) for h in range(n - 1)) for p in range(n)]
    for h in range(n - 1):
        for p, q in itertools.combinations(range(n), 2):
            clauses.append((-var(p, h), -var(q, h)))
    import time
    with SatOracle(clauses, deadline=time.monotonic() + 0.05) as o:
        with pytest.raises(SolverTimeout):
            o.solve()


def test_maxsat_forced():
    model, fals = solve_maxsat(MaxSatQuery(((1,),), (((-1,), "t1"), ((1,), "t2"))))
    assert fals == {"t1"}
    assert model[1]


def test_maxsat_example1(example1):
    hard = example1.matrix.clauses + ((X1,), (-X2,), (-3,))
    soft = (((-Y1,), Y1), ((-Y2,), Y2), ((-6,), 6))
    _, fals = solve_maxsat(MaxSatQuery(hard, soft))
    assert fals == {Y2}


def test_maxsat_hard_unsat():
    with pytest.raises(HardUnsatisfiable):
        solve_maxsat(MaxSatQuery(((1,), (-1,)), ()))


def test_maxsat_matches_brute_force():
    rng = random.Random(11)
    for _ in range(60):
        n = rng.randint(2, 8)
        hard = random_cnf(rng, n, rng.randint(0, 6))
        if not brute_sat(hard, (), n):
            continue
        soft = [(c, i) for i, c in enumerate(random_cnf(rng, n, rng.randint(1, 6), width=rng.randint(1, 2)))]
        model, fals = solve_maxsat(MaxSatQuery(tuple(hard), tuple(soft)))
        assert len(fals) == oracle.maxsat_optimum(hard, soft)
        assert all(any(model.get(abs(l), False) == (l > 0) for l in c) for c in hard)
