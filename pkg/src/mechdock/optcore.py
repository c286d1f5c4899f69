"""Exact optimization oracles: optimal makespan and allocation unbalance.

opt_makespan is exact branch-and-bound over active players with a fixed
lexicographic tie-break so witnesses are reproducible. beta_unbalance
measures how much load the makespan-dictating player could shed relative
to the best alternative allocation, as a leading-tier ratio.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .exactnum import (
    GT,
    INF,
    LT,
    UNBOUNDED,
    ZERO,
    TieredValue,
    leading_ratio,
    tv_compare,
)
from .schedmodel import Allocation, Instance, active_players, load, makespan

NODE_GUARD = 10**8
BETA_GUARD = 10**7


class SearchError(RuntimeError):
    pass


class BudgetExceeded(SearchError):
    pass


@dataclass
class OptResult:
    value: TieredValue
    witness: Allocation
    explored: int


def _allowed_players(T, forbidden):
    allowed = []
    for j in T.jobs():
        players = sorted(active_players(T, j) - set(forbidden))
        if not players:
            raise SearchError(f"job {j} has no allowed active player")
        allowed.append(players)
    return allowed


def opt_makespan(T, forbidden=frozenset()):
    """Exact minimum makespan over allocations avoiding forbidden players.

    Phase 1 finds the optimal value by depth-first branch-and-bound with
    jobs ordered by descending cheapest active cost (pruning on current
    max load >= incumbent). Phase 2 rebuilds the witness in job-index
    order so the returned owner vector is the lexicographically smallest
    one achieving the optimum.
    """
    allowed = _allowed_players(T, forbidden)
    space = 1
    for players in allowed:
        space *= len(players)
        if space > NODE_GUARD:
            raise BudgetExceeded(
                f"search space exceeds {NODE_GUARD} nodes before pruning"
            )

    def min_cost(j):
        return min((T.cost(i, j) for i in allowed[j - 1]), key=_SortKey)

    order = sorted(T.jobs(), key=lambda j: _SortKey(min_cost(j)), reverse=True)

    loads = {i: ZERO for i in T.players()}
    explored = 0
    best_value = INF

    def descend(idx, current_max):
        nonlocal explored, best_value
        if idx == len(order):
            best_value = current_max
            return
        j = order[idx]
        for i in allowed[j - 1]:
            explored += 1
            new_load = loads[i] + T.cost(i, j)
            new_max = new_load if tv_compare(new_load, current_max) == GT else current_max
            if tv_compare(new_max, best_value) != LT:
                continue
            loads[i] = new_load
            descend(idx + 1, new_max)
            loads[i] = loads[i] - T.cost(i, j)

    descend(0, ZERO)
    if best_value.infinite:
        raise SearchError("no finite allocation exists")

    # Phase 2: lexicographically smallest witness at the known optimum.
    owner = [0] * T.m
    loads = {i: ZERO for i in T.players()}

    def rebuild(j):
        nonlocal explored
        if j > T.m:
            return True
        for i in allowed[j - 1]:
            explored += 1
            new_load = loads[i] + T.cost(i, j)
            if tv_compare(new_load, best_value) == GT:
                continue
            loads[i] = new_load
            owner[j - 1] = i
            if rebuild(j + 1):
                return True
            loads[i] = loads[i] - T.cost(i, j)
        return False

    if not rebuild(1):
        raise SearchError("witness reconstruction failed")  # pragma: no cover
    witness = Allocation(owner)
    return OptResult(value=best_value, witness=witness, explored=explored)


class _SortKey:
    """Adapter making TieredValue usable with sorted()/min()."""

    __slots__ = ("v",)

    def __init__(self, v):
        self.v = v

    def __lt__(self, other):
        return tv_compare(self.v, other.v) == LT

    def __eq__(self, other):
        return tv_compare(self.v, other.v) == 0


def _dummy_respecting_allocations(T):
    """Yield owner vectors giving each dummy to its owner, others to actives."""
    dummy_owner = {j: p for p, j in T.dummy_of.items()}
    choices = []
    for j in T.jobs():
        if j in dummy_owner:
            choices.append([dummy_owner[j]])
        else:
            choices.append(sorted(active_players(T, j)))
    count = 1
    for c in choices:
        count *= len(c)
        if count > BETA_GUARD:
            raise BudgetExceeded(f"more than {BETA_GUARD} candidate allocations")
    owner = [0] * T.m

    def walk(j):
        if j > T.m:
            yield Allocation(owner)
            return
        for i in choices[j - 1]:
            owner[j - 1] = i
            yield from walk(j + 1)

    yield from walk(1)


def beta_unbalance(T, A, i):
    """Largest (load drop of player i) / (makespan) over alternative allocations.

    Requires a full dummy part (so any finite-ratio mechanism is pinned to
    the comparison set) and that i dictates A's makespan. Returns the beta
    value (a rational, or UNBOUNDED on a tier gap) and an argmax allocation.
    """
    if set(T.dummy_of.keys()) != set(T.players()):
        raise SearchError("beta_unbalance needs a dummy job for every player")
    load_i = load(T, A, i)
    if load_i.infinite:
        raise SearchError("player holds an infinite-cost job")
    ms = makespan(T, A)
    if tv_compare(load_i, ms) != 0:
        raise SearchError(f"player {i} does not dictate the makespan")
    best = None
    best_alloc = None
    for cand in _dummy_respecting_allocations(T):
        num = load_i - load(T, cand, i)
        ratio = leading_ratio(num, makespan(T, cand))
        if best is None or _beta_greater(ratio, best):
            best, best_alloc = ratio, cand
    return best, best_alloc


def _beta_greater(a, b):
    if a is UNBOUNDED:
        return b is not UNBOUNDED
    if b is UNBOUNDED:
        return False
    return a > b
