"""The block-chain adversary: r three-job blocks, a geometric chain, dummies.

The walk mirrors the construction's case analysis. While some block's
first job escapes player 1, earlier winnings are zeroed, the offending
block is transitioned in two steps, and the loop advances (at most r
times). Once player 1 holds every non-trivial block job, the chain is
walked; any defection there, or at a block, is converted into a scripted
certificate worth 1 + a (or 3). If the mechanism concedes everything,
player 1's dummy is raised to the certificate makespan and the certified
parameter bound is claimed.
"""

from __future__ import annotations

from fractions import Fraction

from ..exactnum import EPS1, EPS4, ZERO, tv
from ..forge import (
    MainParams,
    build_main,
    certified_bound,
    check_feasible,
    transition_second_cost,
)
from ..schedmodel import Allocation
from ..wmon import LemmaExpectation


def _l1(player, f1=(), f2=()):
    return LemmaExpectation(
        variant="L1", player=player, f1=frozenset(f1), f2=frozenset(f2)
    )


def _l2(player, j, k):
    return LemmaExpectation(variant="L2", player=player, j=j, k=k)


def _l3(player, f1=(), f2=()):
    return LemmaExpectation(
        variant="L3", player=player, f1=frozenset(f1), f2=frozenset(f2)
    )


def _l4(player, j1, j2):
    return LemmaExpectation(variant="L4", player=player, j1=j1, j2=j2)


def block_chain(s, p: MainParams):
    check_feasible(p)
    s.bootstrap(build_main(p), f"block chain r={p.r} k_c={p.k_c}")
    transitioned = {}
    i_prev = 0
    for _ in range(p.r + 1):
        i1 = _first_block_deviation(s, p, i_prev)
        if i1 is None:
            t = _first_chain_deviation(s, p)
            if t is None:
                _terminal_concession(s, p, transitioned)
            _chain_defection(s, p, t, transitioned)
        _trivialize_up_to(s, p, i1)
        q = s.x.owner_of(p.block_jobs(i1)[0])
        lo, hi = p.block_coplayers(i1)
        if q not in (lo, hi):
            s.fail(f"first job of block {i1} held by player {q} after pinning")
        variant = "E1" if q == lo else "E2"
        j1, j2, j3 = p.block_jobs(i1)
        jm = j2 if variant == "E1" else j3
        if not s.x.assigns(q, jm):
            _semi_dummy_defection(s, p, i1, q, jm, transitioned)
        _transition(s, p, i1, q, jm, variant, transitioned)
        i_prev = i1
    s.fail("block loop exceeded its bound")  # pragma: no cover


def _first_block_deviation(s, p, i_prev):
    for i in range(i_prev + 1, p.r + 1):
        if not s.x.assigns(1, p.block_jobs(i)[0]):
            return i
    return None


def _first_chain_deviation(s, p):
    for t in range(1, p.k_c + 1):
        if not s.x.assigns(1, p.chain_job(t)):
            return t
    return None


def _held_nontrivial(s, p):
    """Player 1's current holdings with nonzero cost, dummy excluded."""
    dj = p.dummy_job(1)
    return [
        j
        for j in s.T.jobs()
        if j != dj and s.x.assigns(1, j) and not s.T.cost(1, j).is_zero()
    ]


def _trivialize_up_to(s, p, i1):
    """Zero player 1's winnings below block i1 and pin its first job away."""
    j1 = p.block_jobs(i1)[0]
    cutoff = p.block_jobs(i1 - 1)[2] if i1 > 1 else 0
    zeroed = [j for j in _held_nontrivial(s, p) if j <= cutoff]
    if not zeroed:
        return
    edits = [(1, j, ZERO) for j in zeroed]
    edits.append((1, j1, s.T.cost(1, j1) + EPS4))
    s.apply(edits, f"trivialize blocks below {i1}, pin its first job away")
    s.expect_lemma(_l1(1, f1=zeroed, f2=[j1]))


def _reference_cert(s, p, transitioned, overrides=None):
    """The standing no-player-1 certificate: zero-cost jobs stay with player
    1, block jobs go to their co-players (the transitioned split for
    transitioned blocks), chain jobs to their co-players, dummies home."""
    owner = {}
    for q in range(1, p.n + 1):
        owner[p.dummy_job(q)] = q
    for i in range(1, p.r + 1):
        j1, j2, j3 = p.block_jobs(i)
        lo, hi = p.block_coplayers(i)
        variant = transitioned.get(i)
        if variant == "E1":
            placement = {j1: hi, j2: lo, j3: hi}
        elif variant == "E2":
            placement = {j1: lo, j2: lo, j3: hi}
        else:
            placement = {j1: lo, j2: lo, j3: hi}
        for j, q in placement.items():
            owner[j] = 1 if s.T.cost(1, j).is_zero() else q
    for t in range(1, p.k_c + 1):
        j = p.chain_job(t)
        owner[j] = 1 if s.T.cost(1, j).is_zero() else p.chain_coplayer(t)
    for j, q in (overrides or {}).items():
        owner[j] = q
    return Allocation([owner[j] for j in range(1, p.m + 1)])


def _semi_dummy_defection(s, p, i1, q, jm, transitioned):
    """The co-player took the block's first job but not his trivial one."""
    j1 = p.block_jobs(i1)[0]
    a = Fraction(p.a)
    s.branch(f"block {i1}: player {q} split the pair")
    s.apply(
        [(q, j1, ZERO), (q, jm, 2 * EPS1)],
        "zero the co-player's first job, raise his trivial one",
    )
    s.expect_lemma(_l1(q, f1=[j1], f2=[jm]))
    gamma = tv(a**-i1)
    lowered = _held_nontrivial(s, p)
    edits = [(1, j, s.T.cost(1, j) - EPS4) for j in lowered]
    edits.append((1, p.dummy_job(1), gamma))
    s.apply(edits, "raise player 1's dummy to the certificate makespan")
    s.expect_lemma(_l3(1, f1=lowered))
    cert = _reference_cert(s, p, transitioned, overrides={j1: q, jm: q})
    s.finish_ratio(cert, Fraction(3))


def _transition(s, p, i1, q, jm, variant, transitioned):
    a = Fraction(p.a)
    j1 = p.block_jobs(i1)[0]
    other = p.block_coplayers(i1)[1] if variant == "E1" else p.block_coplayers(i1)[0]
    s.branch(f"block {i1}: {variant} against player {q}")
    # step 1: the co-player's trivial job is raised to his first-job price
    s.apply(
        [(q, jm, tv(a ** -(i1 - 1))), (q, j1, s.T.cost(q, j1) - EPS4)],
        f"transition step 1 on block {i1}",
    )
    s.expect_lemma(_l4(q, j1=j1, j2=jm))
    if s.x.assigns(q, jm):
        s.branch("co-player kept the raised pair")
        edits = [
            (q, p.dummy_job(q), tv(2 * a**-i1)),
            (q, j1, s.T.cost(q, j1) - EPS4),
            (q, jm, s.T.cost(q, jm) - EPS4),
        ]
        s.apply(edits, "raise the co-player's dummy to the certificate makespan")
        s.expect_lemma(_l3(q, f1=[j1, jm]))
        cert = _reference_cert(
            s, p, transitioned, overrides={jm: 1, j1: other}
        )
        s.finish_ratio(cert, 1 + a)
    s.branch("player 1 took the raised job")
    # step 2: player 1's prices for the pair drop
    c_cost = transition_second_cost(a, i1, p.b[i1 - 1])
    first_arm = c_cost != tv(a**-i1)
    s.apply(
        [(1, j1, tv(a**-i1)), (1, jm, c_cost)],
        f"transition step 2 on block {i1}",
    )
    s.expect_lemma(_l2(1, j=jm, k=j1))
    has_first = s.x.assigns(1, j1)
    has_mid = s.x.assigns(1, jm)
    if has_first and has_mid:
        s.branch("player 1 absorbed the block")
        transitioned[i1] = variant
        return
    if has_mid:
        _single_keeper(s, p, i1, kept=jm, missing=j1, transitioned=transitioned)
    if has_first and not first_arm:
        _single_keeper(s, p, i1, kept=j1, missing=jm, transitioned=transitioned)
    s.fail(f"transition step 2 on block {i1} left no predicted holding")


def _single_keeper(s, p, i1, kept, missing, transitioned):
    """Player 1 kept one of the transitioned pair: corner whoever has the
    other and claim 1 + a."""
    a = Fraction(p.a)
    s.branch(f"player 1 kept only job {kept}")
    s.apply(
        [(1, kept, ZERO), (1, missing, s.T.cost(1, missing) + EPS4)],
        "zero the kept job, pin the missing one away",
    )
    s.expect_lemma(_l1(1, f1=[kept], f2=[missing]))
    w = s.x.owner_of(missing)
    lo, hi = p.block_coplayers(i1)
    if w not in (lo, hi):
        s.fail(f"job {missing} held by player {w} after pinning")
    s.apply(
        [
            (w, p.dummy_job(w), tv(a**-i1)),
            (w, missing, s.T.cost(w, missing) - EPS4),
        ],
        "raise that co-player's dummy to the certificate makespan",
    )
    s.expect_lemma(_l3(w, f1=[missing]))
    cert = _reference_cert(
        s, p, transitioned, overrides={kept: 1, missing: 1}
    )
    s.finish_ratio(cert, 1 + a)


def _chain_defection(s, p, t, transitioned):
    """The t-th chain job escaped player 1: corner its co-player."""
    a = Fraction(p.a)
    cj = p.chain_job(t)
    co = p.chain_coplayer(t)
    s.branch(f"chain job {t} escaped player 1")
    zeroed = [j for j in _held_nontrivial(s, p) if j != cj]
    edits = [(1, j, ZERO) for j in zeroed]
    edits.append((1, cj, s.T.cost(1, cj) + EPS4))
    s.apply(edits, "zero player 1's winnings, pin the chain job away")
    s.expect_lemma(_l1(1, f1=zeroed, f2=[cj]))
    if not s.x.assigns(co, cj):
        s.fail(f"chain job {t} not with its co-player after pinning")
    s.apply(
        [
            (co, p.dummy_job(co), tv(a ** -(p.r + t))),
            (co, cj, s.T.cost(co, cj) - EPS4),
        ],
        "raise the chain co-player's dummy",
    )
    s.expect_lemma(_l3(co, f1=[cj]))
    cert = _reference_cert(s, p, transitioned, overrides={cj: 1})
    s.finish_ratio(cert, 1 + a)


def _terminal_concession(s, p, transitioned):
    """Player 1 holds every non-trivial job: raise his dummy and claim the
    certified parameter bound."""
    a = Fraction(p.a)
    k = max(transitioned) if transitioned else 0
    gamma = tv(a ** -(k - 1)) if k else tv(1)
    s.branch("player 1 holds all non-trivial jobs")
    lowered = _held_nontrivial(s, p)
    edits = [(1, j, s.T.cost(1, j) - EPS4) for j in lowered]
    edits.append((1, p.dummy_job(1), gamma))
    s.apply(edits, "raise player 1's dummy to the certificate makespan")
    s.expect_lemma(_l3(1, f1=lowered))
    cert = _reference_cert(s, p, transitioned)
    s.finish_ratio(cert, certified_bound(p))
