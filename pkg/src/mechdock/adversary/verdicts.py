"""Terminal verdicts of an adversary run, and their offline re-verification.

Every verdict carries enough stored data to re-check its claim without
querying the mechanism again: a ratio witness pins an instance, the
mechanism's allocation and a certificate allocation whose makespan bounds
the optimum; an unbounded verdict pins an infinite assignment or a tier
gap; a monotonicity violation pins the offending instance pair.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ..exactnum import UNBOUNDED, TieredValue, format_value, leading_ratio, tv
from ..schedmodel import Allocation, Instance, makespan, validate_allocation
from ..wmon import WmonPreconditionError, wmon_value

UNBOUNDED_INFINITE = "infinite-assignment"
UNBOUNDED_TIER_GAP = "tier-gap"


@dataclass(frozen=True)
class RatioWitness:
    instance: Instance
    mech_alloc: Allocation
    certificate: Allocation
    claimed_bound: Fraction

    kind = "RatioWitness"

    def to_json_dict(self):
        return {
            "kind": self.kind,
            "instance": self.instance.to_json_dict(),
            "mech_allocation": self.mech_alloc.to_json_dict(),
            "certificate": self.certificate.to_json_dict(),
            "claimed_bound": str(Fraction(self.claimed_bound)),
        }


@dataclass(frozen=True)
class Unbounded:
    instance: Instance
    mech_alloc: Allocation
    certificate: Allocation
    reason: str

    kind = "Unbounded"

    def to_json_dict(self):
        return {
            "kind": self.kind,
            "instance": self.instance.to_json_dict(),
            "mech_allocation": self.mech_alloc.to_json_dict(),
            "certificate": self.certificate.to_json_dict(),
            "reason": self.reason,
        }


@dataclass(frozen=True)
class WmonViolation:
    player: int
    T: Instance
    x: Allocation
    Tp: Instance
    xp: Allocation
    value: TieredValue

    kind = "WmonViolation"

    def to_json_dict(self):
        return {
            "kind": self.kind,
            "player": self.player,
            "T": self.T.to_json_dict(),
            "x": self.x.to_json_dict(),
            "Tprime": self.Tp.to_json_dict(),
            "xprime": self.xp.to_json_dict(),
            "value": format_value(self.value),
        }


@dataclass(frozen=True)
class StrategyIncomplete:
    step: int
    diagnostic: str

    kind = "StrategyIncomplete"

    def to_json_dict(self):
        return {"kind": self.kind, "step": self.step, "diagnostic": self.diagnostic}


def verdict_from_json_dict(d):
    kind = d.get("kind")
    if kind == "RatioWitness":
        return RatioWitness(
            instance=Instance.from_json_dict(d["instance"]),
            mech_alloc=Allocation.from_json_dict(d["mech_allocation"]),
            certificate=Allocation.from_json_dict(d["certificate"]),
            claimed_bound=Fraction(d["claimed_bound"]),
        )
    if kind == "Unbounded":
        return Unbounded(
            instance=Instance.from_json_dict(d["instance"]),
            mech_alloc=Allocation.from_json_dict(d["mech_allocation"]),
            certificate=Allocation.from_json_dict(d["certificate"]),
            reason=d["reason"],
        )
    if kind == "WmonViolation":
        return WmonViolation(
            player=int(d["player"]),
            T=Instance.from_json_dict(d["T"]),
            x=Allocation.from_json_dict(d["x"]),
            Tp=Instance.from_json_dict(d["Tprime"]),
            xp=Allocation.from_json_dict(d["xprime"]),
            value=tv(d["value"]),
        )
    if kind == "StrategyIncomplete":
        return StrategyIncomplete(step=int(d["step"]), diagnostic=d["diagnostic"])
    raise ValueError(f"unknown verdict kind {kind!r}")


def verify_verdict(v):
    """Re-check the verdict's invariants from stored data only.

    Returns a list of defects; an empty list means the verdict is sound.
    The mechanism is never queried.
    """
    defects = []
    if isinstance(v, (RatioWitness, Unbounded)):
        T = v.instance
        for label, alloc in (("mechanism", v.mech_alloc), ("certificate", v.certificate)):
            for d in validate_allocation(T, alloc):
                defects.append(f"{label} allocation invalid: {d}")
        if defects:
            return defects
        ms_cert = makespan(T, v.certificate)
        if ms_cert.infinite:
            return defects + ["certificate has infinite makespan"]
        ms_mech = makespan(T, v.mech_alloc)
        if isinstance(v, Unbounded):
            if v.reason == UNBOUNDED_INFINITE:
                if not ms_mech.infinite:
                    defects.append(
                        "reason says infinite assignment but mechanism makespan "
                        "is finite"
                    )
            elif v.reason == UNBOUNDED_TIER_GAP:
                if ms_cert.is_zero():
                    defects.append("tier-gap certificate has zero makespan")
                elif leading_ratio(ms_mech, ms_cert) is not UNBOUNDED:
                    defects.append("no tier gap between makespans")
            else:
                defects.append(f"unknown unboundedness reason {v.reason!r}")
            return defects
        if ms_cert.is_zero():
            return defects + ["certificate has zero makespan"]
        ratio = leading_ratio(ms_mech, ms_cert)
        if ratio is not UNBOUNDED and ratio < Fraction(v.claimed_bound):
            defects.append(
                f"claimed bound {v.claimed_bound} not met: leading ratio {ratio}"
            )
        return defects
    if isinstance(v, WmonViolation):
        for d in validate_allocation(v.T, v.x):
            defects.append(f"first allocation invalid: {d}")
        for d in validate_allocation(v.Tp, v.xp):
            defects.append(f"second allocation invalid: {d}")
        if not v.T.rows_equal_except(v.Tp, v.player):
            defects.append("instances differ outside the cited row")
        if defects:
            return defects
        try:
            report = wmon_value(v.T, v.x, v.Tp, v.xp, v.player)
        except WmonPreconditionError as exc:
            return [f"stored pair violates preconditions: {exc}"]
        if not report.violated:
            defects.append("recomputed monotonicity sum is not positive")
        if report.value != v.value:
            defects.append(
                f"stored value {format_value(v.value)} differs from recomputed "
                f"{format_value(report.value)}"
            )
        return defects
    if isinstance(v, StrategyIncomplete):
        return defects
    return [f"unknown verdict type {type(v).__name__}"]
