"""Builders for every adversarial instance family, plus the parameter engine.

The block-chain construction consists of r three-job blocks (non-trivial
first job priced b_i for player 1, two trivial companion jobs), a chain of
k_c two-player jobs whose co-player always pays a times player 1's cost,
and one dummy job per player. The engine solves the backward recurrence
fixing the b_i, checks feasibility, certifies the resulting approximation
ratio bound, and searches for the best scale factor a.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .exactnum import EPS1, EPS2, EPS3, EPS4, INF, tv, tv_max
from .schedmodel import Instance


class ForgeError(ValueError):
    pass


class FeasibilityError(ForgeError):
    def __init__(self, k, b_k, floor):
        self.k = k
        super().__init__(f"b_{k} = {b_k} is below its floor {floor}")


# Parameter-selection polynomials (coefficients high degree first):
# the single-block crossing a^3 - a^2 - 2a + 1 = 0 (root near 1.80194),
# the 3x3 bound's rho^3 - 2 rho^2 - 1 = 0 (root near 2.20557), and the
# golden-ratio quadratic a^2 - a - 1 = 0 used as a reference point.
SINGLE_BLOCK_CUBIC = (1, -1, -2, 1)
SQUARE3_CUBIC = (1, -2, 0, -1)
GOLDEN_QUADRATIC = (1, -1, -1)


def z_sum(a, r, k_c):
    """Chain weight on player 1's row: sum of a^-j for j = r+1 .. r+k_c."""
    a = Fraction(a)
    return sum((a ** -(r + t) for t in range(1, k_c + 1)), Fraction(0))


def compute_b(a, r, k_c):
    """Backward recurrence for the block prices.

    s(r) = 0 and s(k-1) = 2 s(k) - a^-(k-2) + 4 a^-k + z, with
    b_k = s(k-1) - s(k). Exact rationals throughout; s is returned with
    s[k] at index k.
    """
    a = Fraction(a)
    if not 1 < a < 2:
        raise ForgeError(f"scale factor a={a} outside (1, 2)")
    z = z_sum(a, r, k_c)
    s = [Fraction(0)] * (r + 1)
    for k in range(r, 0, -1):
        s[k - 1] = 2 * s[k] - a ** -(k - 2) + 4 * a**-k + z
    b = tuple(s[k - 1] - s[k] for k in range(1, r + 1))
    return b, z, tuple(s)


def compute_b_closed(a, r, k_c, k):
    """Closed form of the recurrence: must agree with compute_b exactly."""
    a = Fraction(a)
    z = z_sum(a, r, k_c)
    return 2 ** (r - k) * (a**-r * (a + 2) + z) - a**-k * (a * a + a - 2)


@dataclass(frozen=True)
class MainParams:
    """Parameters of the block-chain construction."""

    a: Fraction
    r: int
    k_c: int
    b: tuple
    z: Fraction

    def __post_init__(self):
        a = Fraction(self.a)
        if not (a * a > 2 and a < 2):
            raise ForgeError(f"a={a} outside (sqrt 2, 2)")
        if self.r < 1:
            raise ForgeError("need at least one block")
        if self.k_c < 0:
            raise ForgeError("negative chain length")
        if len(self.b) != self.r:
            raise ForgeError("one block price per block required")
        if Fraction(self.z) != z_sum(a, self.r, self.k_c):
            raise ForgeError("z disagrees with the chain sum")

    @classmethod
    def from_alpha(cls, a, r, k_c=None):
        a = Fraction(a)
        if k_c is None:
            k_c = r
        b, z, _ = compute_b(a, r, k_c)
        return cls(a=a, r=r, k_c=k_c, b=b, z=z)

    @property
    def n(self):
        return 2 * self.r + 1 + self.k_c

    @property
    def m(self):
        return 3 * self.r + self.k_c + self.n

    def block_jobs(self, i):
        base = 3 * (i - 1)
        return base + 1, base + 2, base + 3

    def chain_job(self, t):
        return 3 * self.r + t

    def dummy_job(self, p):
        return 3 * self.r + self.k_c + p

    def block_coplayers(self, i):
        return 2 * i, 2 * i + 1

    def chain_coplayer(self, t):
        return 2 * self.r + 1 + t


def feasibility_defect(p):
    """Index k with b_k below a^-k, or None when all block prices are fine."""
    for k in range(1, p.r + 1):
        if p.b[k - 1] < p.a**-k:
            return k
    return None


def check_feasible(p):
    k = feasibility_defect(p)
    if k is not None:
        raise FeasibilityError(k, p.b[k - 1], p.a**-k)


def build_main(p):
    """The full n-player block-chain instance with a dummy job per player."""
    check_feasible(p)
    a = Fraction(p.a)
    rows = [[INF] * p.m for _ in range(p.n)]
    for i in range(1, p.r + 1):
        j1, j2, j3 = p.block_jobs(i)
        lo, hi = p.block_coplayers(i)
        rows[0][j1 - 1] = tv(p.b[i - 1])
        rows[0][j2 - 1] = tv(2 * a**-i)
        rows[0][j3 - 1] = tv(2 * a**-i)
        rows[lo - 1][j1 - 1] = tv(a ** -(i - 1))
        rows[lo - 1][j2 - 1] = EPS1
        rows[hi - 1][j1 - 1] = tv(a ** -(i - 1))
        rows[hi - 1][j3 - 1] = EPS1
    for t in range(1, p.k_c + 1):
        j = p.chain_job(t)
        rows[0][j - 1] = tv(a ** -(p.r + t))
        rows[p.chain_coplayer(t) - 1][j - 1] = tv(a ** -(p.r + t - 1))
    dummy_of = {}
    for q in range(1, p.n + 1):
        j = p.dummy_job(q)
        rows[q - 1][j - 1] = tv(0)
        dummy_of[q] = j
    return Instance(rows, dummy_of)


def transition_second_cost(a, i, b_i):
    """Player 1's reduced price for a block's companion job (tiered max)."""
    a, b_i = Fraction(a), Fraction(b_i)
    lowered = tv(2 * a**-i) - (tv(b_i - a**-i) + EPS1)
    return tv_max(lowered, tv(a**-i))


def apply_E(T, i, variant, step, b_i, a):
    """One step of the two-step block transition.

    Step 1 raises the chosen co-player's trivial job to his first-job
    price; step 2 lowers player 1's costs for the block's first job and
    the same companion job. The variant picks which companion job (and
    hence which co-player) is involved.
    """
    a, b_i = Fraction(a), Fraction(b_i)
    if variant not in ("E1", "E2"):
        raise ForgeError(f"unknown transition variant {variant!r}")
    if b_i < a**-i:
        raise ForgeError(f"b_{i} below a^-{i}: step 2 would not be a decrease")
    j1 = 3 * (i - 1) + 1
    jmid = j1 + 1 if variant == "E1" else j1 + 2
    co = 2 * i if variant == "E1" else 2 * i + 1
    if step == 1:
        return T.with_costs([(co, jmid, tv(a ** -(i - 1)))])
    if step == 2:
        return T.with_costs(
            [(1, j1, tv(a**-i)), (1, jmid, transition_second_cost(a, i, b_i))]
        )
    raise ForgeError(f"transition step must be 1 or 2, got {step}")


def d2x2():
    return Instance([[1, EPS2], [1, EPS1]])


def e3x3(a, b, c):
    a, b, c = Fraction(a), Fraction(b), Fraction(c)
    if not a < b < c:
        raise ForgeError("3x3 construction needs a < b < c")
    return Instance([[INF, c, EPS1], [b, INF, INF], [a, b, EPS2]])


def f3x4(x):
    x = Fraction(x)
    if x <= 1:
        raise ForgeError("3x4 construction needs x > 1")
    return Instance(
        [
            [INF, x, INF, EPS4],
            [1, EPS2, EPS2, INF],
            [1, EPS1, EPS3, INF],
        ],
        dummy_of={1: 4},
    )


def _with_dummy_part(rows):
    n = len(rows)
    m = len(rows[0])
    full = []
    for i, row in enumerate(rows):
        extra = [INF] * n
        extra[i] = tv(0)
        full.append(list(row) + extra)
    return Instance(full, dummy_of={i + 1: m + i + 1 for i in range(n)})


def b_nr():
    """One shared unit job for two players, plus dummies."""
    return _with_dummy_part([[1], [1]])


def b_ckv():
    """Two shared unit jobs for three players, plus dummies."""
    return _with_dummy_part([[1, 1], [1, 1], [1, 1]])


def c_kv(a, k):
    """A bare chain of k two-player jobs, geometric prices, plus dummies."""
    a = Fraction(a)
    if a <= 1:
        raise ForgeError("chain needs a > 1")
    if k < 1:
        raise ForgeError("chain needs at least one job")
    rows = [[INF] * k for _ in range(k + 1)]
    for t in range(1, k + 1):
        rows[0][t - 1] = tv(a**-t)
        rows[t][t - 1] = tv(a ** -(t - 1))
    return _with_dummy_part(rows)


def b_new(a, b1=None):
    """A single block (price b1, two trivial companions), plus dummies."""
    a = Fraction(a)
    if b1 is None:
        b1 = 2 / a
    b1 = Fraction(b1)
    rows = [
        [tv(b1), tv(2 / a), tv(2 / a)],
        [tv(1), EPS1, INF],
        [tv(1), INF, EPS1],
    ]
    return _with_dummy_part(rows)


_SMALL_BUILDERS = {
    "d2x2": d2x2,
    "e3x3": e3x3,
    "f3x4": f3x4,
    "b_nr": b_nr,
    "b_ckv": b_ckv,
    "c_kv": c_kv,
    "b_new": b_new,
}


def build_small(which, **params):
    try:
        builder = _SMALL_BUILDERS[which]
    except KeyError:
        raise ForgeError(f"unknown construction {which!r}")
    return builder(**params)


def bound_arms(p):
    """Standard-part bound per terminal: the all-blocks arm V_0 and each
    transitioned-at-k arm V_k (infinitesimal corrections dropped)."""
    a = Fraction(p.a)
    v0 = 1 + sum(p.b) + p.z
    vks = []
    for k in range(1, p.r + 1):
        ak = a**-k
        second = max(3 * ak - p.b[k - 1], ak)
        tail = sum(p.b[k:], Fraction(0))
        vks.append(
            (a ** -(k - 1) + ak + second + tail + p.z) / a ** -(k - 1)
        )
    return v0, vks


def certified_bound(p):
    """min(1 + a, V_0, min_k V_k): the ratio every branch of the adversary
    is guaranteed to reach with these parameters."""
    check_feasible(p)
    v0, vks = bound_arms(p)
    return min([1 + Fraction(p.a), v0] + vks)


def poly_eval(coeffs, x):
    acc = Fraction(0)
    for c in coeffs:
        acc = acc * x + c
    return acc


def poly_root(coeffs, lo, hi, tol):
    """Bisection root of a polynomial with a sign change on [lo, hi]."""
    lo, hi, tol = Fraction(lo), Fraction(hi), Fraction(tol)
    if tol <= 0:
        raise ForgeError("tolerance must be positive")
    flo, fhi = poly_eval(coeffs, lo), poly_eval(coeffs, hi)
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise ForgeError("no sign change on the bracket")
    while hi - lo > tol:
        mid = (lo + hi) / 2
        fmid = poly_eval(coeffs, mid)
        if fmid == 0:
            return mid
        if (fmid > 0) == (flo > 0):
            lo, flo = mid, fmid
        else:
            hi = mid
    return (lo + hi) / 2


def _certifies_one_plus_a(a, r, k_c):
    try:
        p = MainParams.from_alpha(a, r, k_c)
    except ForgeError:
        return False
    if feasibility_defect(p) is not None:
        return False
    v0, vks = bound_arms(p)
    target = 1 + Fraction(a)
    return v0 >= target and all(v >= target for v in vks)


def solve_best_a(r, k_c, lo, hi, tol):
    """Largest a in [lo, hi] whose parameters certify the full 1 + a bound.

    The certified bound equals 1 + a exactly while the terminal arms stay
    above it; past the crossing it degrades, so maximizing the bound means
    bisecting the boundary of the certification predicate.
    """
    lo, hi, tol = Fraction(lo), Fraction(hi), Fraction(tol)
    if not lo < hi:
        raise ForgeError("empty bracket")
    if _certifies_one_plus_a(hi, r, k_c):
        p = MainParams.from_alpha(hi, r, k_c)
        return hi, certified_bound(p)
    steps = 32
    good = None
    for idx in range(steps, -1, -1):
        cand = lo + (hi - lo) * idx / steps
        if _certifies_one_plus_a(cand, r, k_c):
            good = cand
            break
    if good is None:
        raise ForgeError("no feasible scale factor in the bracket")
    bad = good + (hi - lo) / steps
    while bad - good > tol:
        mid = (good + bad) / 2
        if _certifies_one_plus_a(mid, r, k_c):
            good = mid
        else:
            bad = mid
    p = MainParams.from_alpha(good, r, k_c)
    return good, certified_bound(p)
