"""Weak-monotonicity arithmetic and the inference lemmas as checkable predicates.

For two instances differing only in player i's row, a weakly monotone
allocation rule satisfies  sum_j (t_i^j - t'_i^j)(x_i^j - x'_i^j) <= 0.
Four standard consequences (L1-L4) are implemented as hypothesis-checked
inferences: given the edit pattern, they predict constraints any weakly
monotone (and, for L3, finite-ratio) mechanism must satisfy on the second
allocation. A seeded fuzzer searches for violations on random instances.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .exactnum import GT, LT, ZERO, TieredValue, format_value, tv, tv_compare
from .schedmodel import Allocation, Instance, validate_allocation


class WmonPreconditionError(ValueError):
    pass


class HypothesisError(ValueError):
    """The lemma's premises do not hold for the supplied pair (caller bug)."""


@dataclass
class WmonReport:
    player: int
    value: TieredValue
    violated: bool
    skipped_terms: list = field(default_factory=list)


def wmon_value(T, x, Tp, xp, i):
    """Exact tiered weak-monotonicity sum for player i on an instance pair.

    Jobs where both entries are infinite are skipped and recorded. A job
    assigned to i at infinite cost is a precondition failure: the engine
    reports that upstream as an unbounded-ratio event, never as a WMON
    value. A mixed infinite/finite term whose assignment flips would need
    -infinity, which tiered values cannot carry; it cannot arise after the
    upstream infinite-assignment screen and is rejected here.
    """
    if not T.rows_equal_except(Tp, i):
        raise WmonPreconditionError("instances differ outside the given row")
    total = ZERO
    skipped = []
    for j in T.jobs():
        t, tp = T.cost(i, j), Tp.cost(i, j)
        xi, xpi = x.indicator(i, j), xp.indicator(i, j)
        if t.infinite and xi:
            raise WmonPreconditionError(
                f"job {j} assigned to player {i} at infinite cost in T"
            )
        if tp.infinite and xpi:
            raise WmonPreconditionError(
                f"job {j} assigned to player {i} at infinite cost in T'"
            )
        if t.infinite and tp.infinite:
            skipped.append(j)
            continue
        d = xi - xpi
        if d == 0:
            continue
        if t.infinite or tp.infinite:
            raise WmonPreconditionError(
                f"mixed infinite/finite term with flipped assignment at job {j}"
            )
        total = total + (t - tp) * Fraction(d)
    return WmonReport(
        player=i,
        value=total,
        violated=tv_compare(total, ZERO) == GT,
        skipped_terms=skipped,
    )


@dataclass(frozen=True)
class LemmaExpectation:
    """Parameters of one lemma application (variant selects the fields used).

    L1: f1 = held jobs strictly lowered, f2 = unheld jobs strictly raised;
        everything else unchanged. Predicts keep f1, never get f2.
    L2: job j held and lowered, job k lowered; everything else unchanged.
        Predicts at least one of {j, k}; if k's decrease is strictly
        smaller than j's, predicts keep j.
    L3: like L1 for a player with a dummy job, whose cost may change
        arbitrarily; predicts the dummy is kept as well.
    L4: jobs j1, j2 both held, j1 lowered, j2 raised; everything else
        unchanged. Predicts: if j2 is kept then j1 is kept.
    """

    variant: str
    player: int
    f1: frozenset = frozenset()
    f2: frozenset = frozenset()
    j: int = 0
    k: int = 0
    j1: int = 0
    j2: int = 0


@dataclass
class Constraints:
    """Predicted restrictions on the post-edit allocation of one player."""

    player: int
    keep: set = field(default_factory=set)
    forbid: set = field(default_factory=set)
    one_of: list = field(default_factory=list)
    implications: list = field(default_factory=list)

    def defects(self, xp):
        out = []
        for j in sorted(self.keep):
            if not xp.assigns(self.player, j):
                out.append(f"player {self.player} was predicted to keep job {j}")
        for j in sorted(self.forbid):
            if xp.assigns(self.player, j):
                out.append(f"player {self.player} was predicted not to get job {j}")
        for group in self.one_of:
            if not any(xp.assigns(self.player, j) for j in group):
                out.append(
                    f"player {self.player} was predicted to get one of "
                    f"{sorted(group)}"
                )
        for trigger, required in self.implications:
            if xp.assigns(self.player, trigger) and not xp.assigns(
                self.player, required
            ):
                out.append(
                    f"player {self.player} kept job {trigger} but dropped "
                    f"job {required}"
                )
        return out

    def describe(self):
        bits = []
        if self.keep:
            bits.append(f"keep {sorted(self.keep)}")
        if self.forbid:
            bits.append(f"not-get {sorted(self.forbid)}")
        for group in self.one_of:
            bits.append(f"one-of {sorted(group)}")
        for trigger, required in self.implications:
            bits.append(f"if-get {trigger} then-get {required}")
        return ", ".join(bits) or "none"


def _require(cond, msg):
    if not cond:
        raise HypothesisError(msg)


def infer(exp, T, x, Tp):
    """Check the lemma's hypotheses on (T, x, Tp) and return its predictions."""
    i = exp.player
    _require(T.rows_equal_except(Tp, i), "instances differ outside the row")

    def lowered(jj):
        t, tp = T.cost(i, jj), Tp.cost(i, jj)
        return t.finite and tp.finite and tv_compare(t, tp) == GT

    def raised(jj):
        t, tp = T.cost(i, jj), Tp.cost(i, jj)
        if t.infinite:
            return False
        return tp.infinite or tv_compare(tp, t) == GT

    def unchanged(jj):
        return T.cost(i, jj) == Tp.cost(i, jj)

    if exp.variant == "L1":
        for j in exp.f1:
            _require(x.assigns(i, j), f"L1: job {j} in F1 is not held")
            _require(lowered(j), f"L1: job {j} in F1 is not strictly lowered")
        for j in exp.f2:
            _require(not x.assigns(i, j), f"L1: job {j} in F2 is held")
            _require(raised(j), f"L1: job {j} in F2 is not strictly raised")
        for j in T.jobs():
            if j not in exp.f1 and j not in exp.f2:
                _require(unchanged(j), f"L1: job {j} outside F1/F2 changed")
        return Constraints(player=i, keep=set(exp.f1), forbid=set(exp.f2))

    if exp.variant == "L2":
        j, k = exp.j, exp.k
        _require(j != k, "L2: j and k must differ")
        _require(x.assigns(i, j), "L2: job j is not held")
        _require(lowered(j), "L2: job j is not strictly lowered")
        _require(lowered(k), "L2: job k is not strictly lowered")
        for jj in T.jobs():
            if jj not in (j, k):
                _require(unchanged(jj), f"L2: job {jj} outside {{j,k}} changed")
        d_j = T.cost(i, j) - Tp.cost(i, j)
        d_k = T.cost(i, k) - Tp.cost(i, k)
        cons = Constraints(player=i, one_of=[frozenset({j, k})])
        if tv_compare(d_k, d_j) == LT:
            cons.keep.add(j)
        return cons

    if exp.variant == "L3":
        jd = T.dummy_of.get(i)
        _require(jd is not None, "L3: player has no dummy job")
        _require(x.assigns(i, jd), "L3: player does not hold the dummy")
        _require(jd not in exp.f1 and jd not in exp.f2, "L3: dummy inside F1/F2")
        for j in exp.f1:
            _require(x.assigns(i, j), f"L3: job {j} in F1 is not held")
            _require(lowered(j), f"L3: job {j} in F1 is not strictly lowered")
        for j in exp.f2:
            _require(not x.assigns(i, j), f"L3: job {j} in F2 is held")
            _require(raised(j), f"L3: job {j} in F2 is not strictly raised")
        for j in T.jobs():
            if j != jd and j not in exp.f1 and j not in exp.f2:
                _require(unchanged(j), f"L3: job {j} outside F1/F2 changed")
        return Constraints(
            player=i, keep=set(exp.f1) | {jd}, forbid=set(exp.f2)
        )

    if exp.variant == "L4":
        j1, j2 = exp.j1, exp.j2
        _require(j1 != j2, "L4: jobs must differ")
        _require(x.assigns(i, j1) and x.assigns(i, j2), "L4: jobs not both held")
        _require(lowered(j1), "L4: job j1 is not strictly lowered")
        _require(raised(j2), "L4: job j2 is not strictly raised")
        for jj in T.jobs():
            if jj not in (j1, j2):
                _require(unchanged(jj), f"L4: job {jj} outside {{j1,j2}} changed")
        return Constraints(player=i, implications=[(j2, j1)])

    raise HypothesisError(f"unknown lemma variant {exp.variant!r}")


def keep_lowered_constraints(T, x, Tp, i, keep):
    """Row-wide decrease step: predict that every job in `keep` stays put.

    Hypotheses (checked): every entry of row i is lowered or unchanged,
    each kept job is held and strictly lowered, and each kept job's
    decrease strictly exceeds the total decrease over non-kept jobs, so
    dropping any kept job forces a positive WMON sum.
    """
    _require(T.rows_equal_except(Tp, i), "instances differ outside the row")
    other_total = ZERO
    decreases = {}
    for j in T.jobs():
        t, tp = T.cost(i, j), Tp.cost(i, j)
        if t == tp:
            continue
        _require(
            t.finite and tp.finite and tv_compare(t, tp) == GT,
            f"keep-lowered: job {j} is not a finite decrease",
        )
        if j in keep:
            _require(x.assigns(i, j), f"keep-lowered: job {j} is not held")
            decreases[j] = t - tp
        else:
            other_total = other_total + (t - tp)
    for j in keep:
        _require(j in decreases, f"keep-lowered: kept job {j} unchanged")
        _require(
            tv_compare(decreases[j], other_total) == GT,
            f"keep-lowered: job {j}'s decrease does not dominate the rest",
        )
    return Constraints(player=i, keep=set(keep))


@dataclass(frozen=True)
class FuzzSpec:
    """Random finite instances on a value grid, one perturbed row per trial."""

    n: int = 3
    m: int = 3
    values: tuple = (0, 1, 2, 3, 4)


@dataclass
class ViolationRecord:
    player: int
    T: Instance
    x: Allocation
    Tp: Instance
    xp: Allocation
    value: TieredValue

    def to_json_dict(self):
        return {
            "player": self.player,
            "T": self.T.to_json_dict(),
            "x": self.x.to_json_dict(),
            "Tprime": self.Tp.to_json_dict(),
            "xprime": self.xp.to_json_dict(),
            "value": format_value(self.value),
        }

    @classmethod
    def from_json_dict(cls, d):
        return cls(
            player=int(d["player"]),
            T=Instance.from_json_dict(d["T"]),
            x=Allocation.from_json_dict(d["x"]),
            Tp=Instance.from_json_dict(d["Tprime"]),
            xp=Allocation.from_json_dict(d["xprime"]),
            value=tv(d["value"]),
        )


def _query_checked(M, T):
    x = M.query(T)
    defects = validate_allocation(T, x)
    if defects:
        from .schedmodel import MechanismError

        raise MechanismError("; ".join(defects))
    return x


def fuzz(M, spec, trials, seed):
    """Query M on random instance pairs and collect WMON violations.

    Deterministic under a fixed seed and spec; each trial draws a grid
    instance, perturbs a random subset of one row by random rationals
    (clamped at zero), and evaluates the WMON sum on the two answers.
    """
    rng = random.Random(seed)
    grid = [Fraction(v) for v in spec.values]
    violations = []
    for _ in range(trials):
        costs = [
            [tv(rng.choice(grid)) for _ in range(spec.m)] for _ in range(spec.n)
        ]
        T = Instance(costs)
        i = rng.randint(1, spec.n)
        jobs = rng.sample(range(1, spec.m + 1), rng.randint(1, spec.m))
        row = list(T.row(i))
        for j in jobs:
            delta = Fraction(rng.randint(1, 8), rng.randint(1, 4))
            if rng.random() < 0.5:
                delta = -delta
            moved = row[j - 1].standard_part() + delta
            row[j - 1] = tv(max(Fraction(0), moved))
        Tp = T.with_row(i, row)
        x = _query_checked(M, T)
        xp = _query_checked(M, Tp)
        report = wmon_value(T, x, Tp, xp, i)
        if report.violated:
            violations.append(
                ViolationRecord(player=i, T=T, x=x, Tp=Tp, xp=xp, value=report.value)
            )
    return violations


def exhaustive_pairs(M, n, m, values):
    """All grid instances crossed with all single-row grid rewrites.

    This is the brute-force oracle behind the small-grid violation search;
    mechanism answers are cached since every rewritten instance stays on
    the grid.
    """
    from itertools import product

    grid = [Fraction(v) for v in values]
    cache = {}

    def answer(T):
        if T not in cache:
            cache[T] = _query_checked(M, T)
        return cache[T]

    violations = []
    for flat in product(grid, repeat=n * m):
        costs = [[tv(flat[r * m + c]) for c in range(m)] for r in range(n)]
        T = Instance(costs)
        for i in range(1, n + 1):
            for new_row in product(grid, repeat=m):
                if tuple(tv(v) for v in new_row) == T.row(i):
                    continue
                Tp = T.with_row(i, [tv(v) for v in new_row])
                report = wmon_value(T, answer(T), Tp, answer(Tp), i)
                if report.violated:
                    violations.append(
                        ViolationRecord(
                            player=i,
                            T=T,
                            x=answer(T),
                            Tp=Tp,
                            xp=answer(Tp),
                            value=report.value,
                        )
                    )
    return violations
