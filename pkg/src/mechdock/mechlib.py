"""Built-in mechanisms: test subjects and baselines for the adversary.

Selector strings: "minwork", "optmakespan", "dictator:<i>",
"extern:<command...>", plus seeded stubs ("stub:<seed>" answers with
arbitrary valid allocations, "activestub:<seed>" restricts itself to
active players and honors dummy jobs, which drives the strategies deep
into their case trees).
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

from .exactnum import LT, tv_compare
from .optcore import opt_makespan
from .schedmodel import (
    Allocation,
    BuiltinMechanism,
    ExternalMechanism,
    MechanismError,
    MechanismHandle,
    active_players,
)

BUILTIN_NAMES = ("minwork", "optmakespan", "dictator")


@dataclass(frozen=True)
class BuiltinSpec:
    name: str
    params: tuple = field(default_factory=tuple)


def minwork_allocate(T):
    """Each job to its cheapest player in tiered order; ties to lowest index."""
    owner = []
    for j in T.jobs():
        best = None
        for i in T.players():
            c = T.cost(i, j)
            if not c.finite:
                continue
            if best is None or tv_compare(c, T.cost(best, j)) == LT:
                best = i
        if best is None:
            raise MechanismError(f"job {j} has no finite-cost player")
        owner.append(best)
    return Allocation(owner)


def optmakespan_allocate(T):
    """Lexicographically smallest owner vector achieving the optimal makespan.

    Exact but exponential; intended for desk-scale instances (roughly
    m <= 12 with <= 3 active players per job).
    """
    return opt_makespan(T).witness


def dictator_allocate(T, d):
    return Allocation([d] * T.m)


class SeededStub(MechanismHandle):
    """Deterministic pseudo-arbitrary allocator, valid but otherwise lawless."""

    def __init__(self, seed, active_only=False):
        self.seed = int(seed)
        self.active_only = active_only
        self.name = f"{'activestub' if active_only else 'stub'}:{self.seed}"

    def query(self, T):
        digest = hashlib.sha256(
            f"{self.seed}|{T.to_json_line()}".encode()
        ).digest()
        owner = []
        dummy_owner = {j: p for p, j in T.dummy_of.items()}
        for j in T.jobs():
            if self.active_only and j in dummy_owner:
                owner.append(dummy_owner[j])
                continue
            pool = sorted(active_players(T, j)) if self.active_only else list(
                T.players()
            )
            if not pool:
                pool = list(T.players())
            h = hashlib.sha256(digest + j.to_bytes(4, "big")).digest()
            owner.append(pool[int.from_bytes(h[:4], "big") % len(pool)])
        return Allocation(owner)


def make_mechanism(selector):
    """Build a mechanism handle from a CLI selector string."""
    if selector == "minwork":
        return BuiltinMechanism("minwork", minwork_allocate)
    if selector == "optmakespan":
        return BuiltinMechanism("optmakespan", optmakespan_allocate)
    if selector.startswith("dictator:"):
        d = int(selector.split(":", 1)[1])
        return BuiltinMechanism(selector, lambda T, d=d: dictator_allocate(T, d))
    if selector.startswith("stub:"):
        return SeededStub(selector.split(":", 1)[1])
    if selector.startswith("activestub:"):
        return SeededStub(selector.split(":", 1)[1], active_only=True)
    if selector.startswith("extern:"):
        return ExternalMechanism(selector.split(":", 1)[1])
    raise MechanismError(f"unknown mechanism selector {selector!r}")
