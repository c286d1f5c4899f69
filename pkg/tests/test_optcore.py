import itertools
import random
from fractions import Fraction

import pytest

from mechdock.exactnum import EPS1, EPS2, LT, UNBOUNDED, tv, tv_compare
from mechdock.optcore import (
    BudgetExceeded,
    OptResult,
    SearchError,
    beta_unbalance,
    opt_makespan,
)
from mechdock.schedmodel import Allocation, Instance, active_players, makespan

NR = Instance([[1, 0, "inf"], [1, "inf", 0]], dummy_of={1: 2, 2: 3})


def enumerate_opt(T, forbidden=frozenset()):
    """Brute-force oracle: full enumeration, lexicographically first optimum."""
    pools = []
    for j in T.jobs():
        pool = sorted(active_players(T, j) - set(forbidden))
        assert pool, f"job {j} unassignable"
        pools.append(pool)
    best_val, best_owner = None, None
    for owner in itertools.product(*pools):
        val = makespan(T, Allocation(owner))
        if best_val is None or tv_compare(val, best_val) == LT:
            best_val, best_owner = val, owner
    return best_val, Allocation(best_owner)


def random_instance(rng, max_players=3, max_jobs=6):
    n = rng.randint(2, max_players)
    m = rng.randint(2, max_jobs)
    costs = []
    for _ in range(n):
        row = []
        for _ in range(m):
            if rng.random() < 0.15:
                row.append(tv("inf"))
            else:
                row.append(tv(Fraction(rng.randint(0, 9), rng.choice([1, 1, 2]))))
        costs.append(row)
    # keep every column assignable
    for j in range(m):
        if all(not row[j].finite for row in costs):
            costs[rng.randrange(n)][j] = tv(rng.randint(0, 9))
    return Instance(costs)


def test_opt_on_dummy_instance():
    res = opt_makespan(NR)
    assert res.value == tv(1)
    # dummies force the diagonal; job 1 breaks lexicographically to player 1
    assert res.witness == Allocation([1, 1, 2])


def test_opt_excluding_player():
    # a forbidden player's dummy job is unassignable: precondition failure
    with pytest.raises(SearchError):
        opt_makespan(NR, forbidden={1})
    # without the dummy column, excluding player 1 shifts the load
    T = Instance([[1, 2], [3, 4]])
    assert opt_makespan(T).value == tv(3)
    assert opt_makespan(T, forbidden={1}).value == tv(7)


def test_opt_matches_enumeration_on_seeded_instances():
    rng = random.Random(1234)
    for _ in range(200):
        T = random_instance(rng)
        want_val, want_witness = enumerate_opt(T)
        got = opt_makespan(T)
        assert got.value == want_val
        assert got.witness == want_witness
        assert makespan(T, got.witness) == got.value


def test_opt_monotone_in_forbidden_set():
    rng = random.Random(99)
    for _ in range(40):
        T = random_instance(rng, max_players=3, max_jobs=4)
        try:
            base = opt_makespan(T).value
            harder = opt_makespan(T, forbidden={T.n}).value
        except SearchError:
            continue
        assert tv_compare(base, harder) != 1  # base <= harder


def test_opt_budget_guard():
    T = Instance([[1] * 30] * 5)
    with pytest.raises(BudgetExceeded):
        opt_makespan(T)


def test_opt_unassignable_job():
    T = Instance([[1, "inf"], [1, 1]])
    with pytest.raises(SearchError):
        opt_makespan(T, forbidden={2})


def test_beta_on_dummy_instance():
    A = Allocation([1, 1, 2])  # player 1 holds the shared job
    beta, aprime = beta_unbalance(NR, A, 1)
    assert beta == Fraction(1)
    assert aprime == Allocation([2, 1, 2])


def test_beta_symmetric_case():
    A = Allocation([2, 1, 2])
    beta, aprime = beta_unbalance(NR, A, 2)
    assert beta == Fraction(1)
    assert aprime == Allocation([1, 1, 2])


def test_beta_zero_when_no_improvement():
    # job 1 has no taker besides player 1: the load cannot be shed
    T = Instance([[1, 0, "inf"], ["inf", "inf", 0]], dummy_of={1: 2, 2: 3})
    beta, _ = beta_unbalance(T, Allocation([1, 1, 2]), 1)
    assert beta == Fraction(0)


def test_beta_requires_dictating_player():
    with pytest.raises(SearchError):
        beta_unbalance(NR, Allocation([1, 1, 2]), 2)


def test_beta_argmax_reevaluates():
    from mechdock.exactnum import leading_ratio
    from mechdock.schedmodel import load

    A = Allocation([1, 1, 2])
    beta, aprime = beta_unbalance(NR, A, 1)
    num = load(NR, A, 1) - load(NR, aprime, 1)
    assert leading_ratio(num, makespan(NR, aprime)) == beta
