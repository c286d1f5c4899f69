"""Adversary strategies for the 2x2, 3x3, and 3x4 lower-bound instances.

Each strategy walks a finite case tree: it queries the mechanism, branches
on the answer, edits designated entries (held jobs are lowered, unheld
jobs raised, by in-tier halving/doubling for infinitesimal entries and a
tier-4 nudge for standard-scale ones), and terminates with a verdict.
"""

from __future__ import annotations

from fractions import Fraction

from ..exactnum import EPS1, EPS2, EPS3, EPS4, INF, ZERO, tv
from ..forge import d2x2, e3x3, f3x4
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


# -- two players, two jobs -------------------------------------------------


def square2(s):
    """Two machines, two jobs: leading ratio 2 or an unbounded witness."""
    s.bootstrap(d2x2(), "two-player square, job 2 in two epsilon tiers")
    if s.x.assigns(2, 2):
        if s.x.assigns(1, 1):
            s.branch("job 2 stuck with player 2; player 1 keeps job 1")
            s.apply(
                [(1, 1, ZERO), (1, 2, 2 * EPS2)],
                "zero player 1's held job, raise his unheld one",
            )
            s.expect_lemma(_l1(1, f1=[1], f2=[2]))
            s.finish_tier_gap(Allocation([1, 1]))
        s.branch("player 2 holds both jobs")
        s.apply(
            [(2, 1, ZERO), (2, 2, Fraction(1, 2) * EPS1)],
            "lower both of player 2's held jobs",
        )
        s.expect_lemma(_l1(2, f1=[1, 2]))
        s.finish_tier_gap(Allocation([2, 1]))
    if s.x.assigns(1, 1):
        s.branch("player 1 holds both jobs")
        s.apply(
            [(2, 1, tv(1) + EPS4), (2, 2, INF)],
            "price player 2 out of both jobs",
            dummy_of={1: 2},
        )
        s.expect_lemma(_l1(2, f2=[1, 2]))
        s.apply(
            [(1, 1, tv(1) - EPS4), (1, 2, tv(1))],
            "raise the fresh dummy to one",
        )
        s.expect_lemma(_l3(1, f1=[1]))
        s.finish_ratio(Allocation([2, 1]), Fraction(2))
    s.branch("jobs split against the price order")
    s.apply(
        [(2, 1, tv(1) - 2 * EPS1), (2, 2, EPS3)],
        "undercut player 2 on both jobs",
    )
    s.expect_lemma(_l2(2, j=1, k=2))
    if not s.x.assigns(2, 2):
        s.branch("player 1 kept job 2")
        s.apply(
            [(2, 1, ZERO), (2, 2, 2 * EPS3)],
            "zero player 2's held job, raise his unheld one",
        )
        s.expect_lemma(_l1(2, f1=[1], f2=[2]))
        s.finish_tier_gap(Allocation([2, 2]))
    s.branch("player 2 swept both jobs")
    s.apply(
        [(1, 1, tv(1) + EPS4), (1, 2, INF)],
        "price player 1 out of both jobs",
        dummy_of={2: 2},
    )
    s.expect_lemma(_l1(1, f2=[1, 2]))
    s.apply(
        [(2, 1, tv(1) - 2 * EPS1 - EPS4), (2, 2, tv(1))],
        "raise the fresh dummy to one",
    )
    s.expect_lemma(_l3(2, f1=[1]))
    s.finish_ratio(Allocation([1, 2]), Fraction(2))


# -- three players, three jobs ----------------------------------------------


def square3(s, a, b, c):
    """Three machines, three jobs: min(1 + c/b, b/a, (a+b+c)/c) or better."""
    a, b, c = Fraction(a), Fraction(b), Fraction(c)
    s.bootstrap(e3x3(a, b, c), "three-player triangle with a shared cheap job")
    if s.x.assigns(1, 2):
        if s.x.assigns(1, 3):
            s.branch("player 1 holds jobs 2 and 3")
            _finish_pair_on_player1(s, a, b, c, c_now=tv(c))
        s.branch("player 1 holds job 2, player 3 holds job 3")
        s.apply(
            [(1, 2, tv(c) - 2 * EPS1), (1, 3, EPS3)],
            "undercut player 1 on jobs 2 and 3",
        )
        s.expect_lemma(_l2(1, j=2, k=3))
        if s.x.assigns(1, 3):
            s.branch("player 1 collected job 3 as well")
            _finish_pair_on_player1(s, a, b, c, c_now=tv(c) - 2 * EPS1)
        s.branch("job 3 still with player 3")
        s.apply(
            [(1, 2, ZERO), (1, 3, 2 * EPS3)],
            "zero player 1's held job, raise his unheld one",
        )
        s.expect_lemma(_l1(1, f1=[2], f2=[3]))
        if s.x.assigns(2, 1):
            s.branch("player 2 carries job 1")
            s.finish_ratio(Allocation([3, 1, 1]), b / a)
        s.branch("player 3 carries jobs 1 and 3")
        s.apply(
            [
                (3, 1, ZERO),
                (3, 2, tv(b) + EPS4),
                (3, 3, Fraction(1, 2) * EPS2),
            ],
            "lower player 3's held jobs, raise his unheld one",
        )
        s.expect_lemma(_l1(3, f1=[1, 3], f2=[2]))
        s.finish_tier_gap(Allocation([3, 1, 1]))
    if s.x.assigns(2, 1) and s.x.assigns(3, 2):
        s.branch("player 2 on job 1, player 3 on job 2")
        _finish_b_over_a(s, a, b, c)
    if s.x.assigns(3, 1):
        if s.x.assigns(1, 3):
            s.branch("player 3 holds jobs 1 and 2, player 1 the cheap job")
            edits = [(3, 1, ZERO), (3, 2, ZERO), (3, 3, 2 * EPS2)]
            s.apply(edits, "zero player 3's held jobs, raise his unheld one")
            s.expect_lemma(_l1(3, f1=[1, 2], f2=[3]))
            s.finish_tier_gap(Allocation([3, 3, 3]))
        s.branch("player 3 swept all three jobs")
        s.apply(
            [(1, 2, tv(c) + EPS4), (1, 3, INF)],
            "price player 1 out; the cheap job becomes player 3's dummy",
            dummy_of={3: 3},
        )
        s.expect_lemma(_l1(1, f2=[2, 3]))
        if s.x.assigns(2, 1):
            s.branch("player 2 took job 1")
            _finish_b_over_a(s, a, b, c)
        s.branch("player 3 kept everything")
        s.apply(
            [(3, 3, tv(c)), (3, 1, tv(a) - EPS4), (3, 2, tv(b) - EPS4)],
            "raise player 3's dummy to the certificate makespan",
        )
        s.expect_lemma(_l3(3, f1=[1, 2]))
        s.finish_ratio(Allocation([2, 1, 3]), (a + b + c) / c)
    s.fail("unreachable 3x3 dispatch")  # pragma: no cover


def _finish_pair_on_player1(s, a, b, c, c_now):
    """Player 1 holds jobs 2 and 3: corner him and claim (b + c) / b."""
    s.apply(
        [(3, 3, INF), (3, 2, tv(b) + EPS4)],
        "price player 3 out; job 3 becomes player 1's dummy",
        dummy_of={1: 3},
    )
    s.expect_lemma(_l1(3, f2=[2, 3]))
    s.apply(
        [(1, 3, tv(b)), (1, 2, c_now - EPS4)],
        "raise player 1's dummy to the certificate makespan",
    )
    s.expect_lemma(_l3(1, f1=[2]))
    s.finish_ratio(Allocation([2, 3, 1]), (b + c) / b)


def _finish_b_over_a(s, a, b, c):
    """Player 2 holds job 1 while player 3 holds job 2: claim b / a."""
    f1 = {2}
    edits = [(3, 2, ZERO), (3, 1, tv(a) + EPS4)]
    if s.x.assigns(3, 3):
        f1.add(3)
        edits.append((3, 3, Fraction(1, 2) * s.T.cost(3, 3)))
    else:
        edits.append((3, 3, 2 * s.T.cost(3, 3)))
    s.apply(edits, "zero player 3's shared job, raise his unheld job 1")
    s.expect_lemma(
        _l1(3, f1=f1, f2={1} | ({3} - f1))
    )
    s.finish_ratio(Allocation([3, 3, 3]), b / a)


# -- three players, four jobs -------------------------------------------------


def square4(s, w):
    """Three machines, four jobs: min(1 + w, (2 + w) / w) or better."""
    w = Fraction(w)
    s.bootstrap(f3x4(w), "three-player rectangle with one true dummy")
    if s.x.assigns(1, 2):
        s.branch("player 1 holds the priced job")
        _boost_player1(s, w, Allocation([2, 2, 3, 1]))
    if s.x.assigns(2, 1) and s.x.assigns(2, 2):
        s.branch("player 2 holds jobs 1 and 2")
        s.apply(
            [(3, 2, INF), (3, 1, tv(1) + EPS4)],
            "price player 3 out of the first two jobs",
        )
        s.expect_lemma(_l1(3, f2=[1, 2]))
        if s.x.assigns(1, 2):
            s.branch("the priced job moved to player 1")
            _boost_player1(s, w, Allocation([3, 2, 2, 1]))
        s.branch("player 2 still holds jobs 1 and 2")
        s.apply(
            [(2, 2, tv(1)), (2, 1, tv(1) - EPS4)],
            "raise player 2's cheap job to one",
        )
        s.expect_lemma(_l4(2, j1=1, j2=2))
        if s.x.assigns(1, 2):
            s.branch("player 2 let the raised job go")
            _boost_player1(s, w, Allocation([3, 2, 2, 1]))
        if s.x.assigns(2, 3):
            s.branch("player 2 swept the first three jobs")
            s.apply(
                [(2, 1, ZERO), (2, 2, ZERO), (2, 3, Fraction(1, 2) * EPS2)],
                "lower all three of player 2's jobs",
            )
            s.expect_lemma(_l1(2, f1=[1, 2, 3]))
            s.finish_tier_gap(Allocation([2, 2, 3, 1]))
        s.branch("player 3 holds job 3")
        s.apply(
            [
                (2, 1, tv(1) - 2 * EPS1),
                (2, 2, tv(1) - 2 * EPS1),
                (2, 3, EPS4),
            ],
            "undercut player 2 across his row",
        )
        s.expect_keep_lowered(2, keep={1, 2})
        if s.x.assigns(2, 3):
            s.branch("player 2 reclaimed job 3")
            s.apply(
                [(3, 3, INF), (3, 1, tv(1) + 2 * EPS4)],
                "price player 3 out; job 3 becomes player 2's dummy",
                dummy_of={1: 4, 2: 3},
            )
            s.expect_lemma(_l1(3, f2=[1, 3]))
            if s.x.assigns(1, 2):
                s.branch("the priced job moved to player 1")
                _boost_player1(s, w, Allocation([3, 2, 2, 1]))
            s.branch("player 2 kept the first three jobs")
            s.apply(
                [
                    (2, 3, tv(w)),
                    (2, 1, tv(1) - 2 * EPS1 - EPS4),
                    (2, 2, tv(1) - 2 * EPS1 - EPS4),
                ],
                "raise player 2's dummy to the certificate makespan",
            )
            s.expect_lemma(_l3(2, f1=[1, 2]))
            s.finish_ratio(Allocation([3, 1, 2, 1]), (2 + w) / w)
        s.branch("player 3 kept job 3")
        s.apply(
            [(2, 1, ZERO), (2, 2, ZERO), (2, 3, 2 * EPS4)],
            "zero player 2's held jobs, raise his unheld one",
        )
        s.expect_lemma(_l1(2, f1=[1, 2], f2=[3]))
        s.finish_tier_gap(Allocation([2, 2, 2, 1]))
    if s.x.assigns(2, 1) and s.x.assigns(3, 2):
        s.branch("player 2 on job 1, player 3 on job 2")
        f1, edits = {1}, [(2, 1, ZERO), (2, 2, 2 * EPS2)]
        if s.x.assigns(2, 3):
            f1.add(3)
            edits.append((2, 3, Fraction(1, 2) * EPS2))
        else:
            edits.append((2, 3, 2 * EPS2))
        s.apply(edits, "zero player 2's shared job, raise what he lacks")
        s.expect_lemma(_l1(2, f1=f1, f2={2} | ({3} - f1)))
        cert_job3 = 2 if 3 in f1 else 3
        s.finish_tier_gap(Allocation([2, 2, cert_job3, 1]))
    if s.x.assigns(3, 1) and s.x.assigns(2, 2):
        s.branch("player 3 on job 1, player 2 on job 2")
        s.apply(
            [(3, 1, tv(1) - 2 * EPS1), (3, 2, EPS3)],
            "undercut player 3 on the first two jobs",
        )
        s.expect_lemma(_l2(3, j=1, k=2))
        if s.x.assigns(1, 2):
            s.branch("the priced job moved to player 1")
            _boost_player1(s, w, Allocation([3, 2, 2, 1]))
        if s.x.assigns(2, 2):
            s.branch("player 2 kept job 2")
            f1, edits = {1}, [(3, 1, ZERO), (3, 2, 2 * EPS3)]
            if s.x.assigns(3, 3):
                f1.add(3)
                edits.append((3, 3, Fraction(1, 2) * EPS3))
            else:
                edits.append((3, 3, 2 * EPS3))
            s.apply(edits, "zero player 3's held job, raise what he lacks")
            s.expect_lemma(_l1(3, f1=f1, f2={2} | ({3} - f1)))
            s.finish_tier_gap(Allocation([3, 3, 3, 1]))
        s.branch("player 3 collected job 2 as well")
        if s.x.assigns(2, 3):
            s.branch("player 2 holds job 3")
            s.apply(
                [(3, 1, ZERO), (3, 2, ZERO), (3, 3, 2 * EPS3)],
                "zero player 3's held jobs, raise his unheld one",
            )
            s.expect_lemma(_l1(3, f1=[1, 2], f2=[3]))
            s.finish_tier_gap(Allocation([3, 3, 3, 1]))
        s.branch("player 3 swept the first three jobs")
        s.apply(
            [(2, 1, tv(1) + EPS4), (2, 2, INF), (2, 3, INF)],
            "price player 2 out; job 3 becomes player 3's dummy",
            dummy_of={1: 4, 3: 3},
        )
        s.expect_lemma(_l1(2, f2=[1, 2, 3]))
        if s.x.assigns(1, 2):
            s.branch("the priced job moved to player 1")
            _boost_player1(s, w, Allocation([2, 3, 3, 1]))
        s.branch("player 3 kept job 2")
        s.apply(
            [(3, 2, tv(1)), (3, 1, tv(1) - 2 * EPS1 - EPS4)],
            "raise player 3's cheap job to one",
        )
        s.expect_lemma(_l4(3, j1=1, j2=2))
        if s.x.assigns(3, 2):
            s.branch("player 3 held on to everything")
            s.apply(
                [
                    (3, 3, tv(w)),
                    (3, 1, tv(1) - 2 * EPS1 - 2 * EPS4),
                    (3, 2, tv(1) - EPS4),
                ],
                "raise player 3's dummy to the certificate makespan",
            )
            s.expect_lemma(_l3(3, f1=[1, 2]))
            s.finish_ratio(Allocation([2, 1, 3, 1]), (2 + w) / w)
        s.branch("the raised job escaped to player 1")
        _boost_player1(s, w, Allocation([2, 3, 3, 1]))
    if s.x.assigns(3, 1) and s.x.assigns(3, 2):
        s.branch("player 3 holds the first two jobs")
        f1 = {1, 2}
        edits = [(3, 1, ZERO), (3, 2, Fraction(1, 2) * EPS1)]
        if s.x.assigns(3, 3):
            f1.add(3)
            edits.append((3, 3, Fraction(1, 2) * EPS3))
        else:
            edits.append((3, 3, 2 * EPS3))
        s.apply(edits, "lower player 3's held jobs")
        s.expect_lemma(_l1(3, f1=f1, f2={3} - f1))
        s.finish_tier_gap(Allocation([3, 2, 3, 1]))
    s.fail("unreachable 3x4 dispatch")  # pragma: no cover


def _boost_player1(s, w, certificate):
    """Player 1 holds the priced job: boost his dummy and claim 1 + w."""
    s.apply(
        [(1, 4, tv(1)), (1, 2, tv(w) - EPS4)],
        "raise player 1's dummy to one",
    )
    s.expect_lemma(_l3(1, f1=[2]))
    s.finish_ratio(certificate, 1 + w)
