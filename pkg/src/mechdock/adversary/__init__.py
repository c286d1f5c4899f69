"""Adaptive adversary strategies emitting machine-checkable verdicts."""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from ..forge import MainParams
from ..schedmodel import MechanismError
from .blocks import block_chain
from .engine import Session, Transcript, run
from .small import square2, square3, square4
from .verdicts import (
    RatioWitness,
    StrategyIncomplete,
    Unbounded,
    WmonViolation,
    verdict_from_json_dict,
    verify_verdict,
)

STRATEGIES = ("s2x2", "s3x3", "s3x4", "main")


def run_2x2(mech):
    return run(square2, mech)


def run_3x3(mech, a, b, c):
    return run(square3, mech, a, b, c)


def run_3x4(mech, x):
    return run(square4, mech, x)


def run_main(mech, params: MainParams):
    return run(block_chain, mech, params)


@dataclass
class Report:
    strategy: str
    params: dict
    mechanism: str
    verdict: object
    transcript: Transcript

    def to_json_dict(self):
        return {
            "strategy": self.strategy,
            "params": {k: str(v) for k, v in sorted(self.params.items())},
            "mechanism": self.mechanism,
            "verdict": self.verdict.to_json_dict(),
            "transcript": self.transcript.to_json_list(),
            "queries": self.transcript.queries,
        }

    def to_json(self):
        return json.dumps(self.to_json_dict(), sort_keys=True, indent=1)


def attack(strategy, mech, params=None):
    """Run one strategy against a mechanism handle and package the report."""
    params = dict(params or {})
    if strategy == "s2x2":
        verdict, transcript = run_2x2(mech)
    elif strategy == "s3x3":
        defaults = {
            "a": Fraction(1),
            "b": Fraction(22055, 10000),
            "c": Fraction(26589, 10000),
        }
        defaults.update(params)
        params = defaults
        verdict, transcript = run_3x3(mech, params["a"], params["b"], params["c"])
    elif strategy == "s3x4":
        params.setdefault("x", Fraction(141421, 100000))
        verdict, transcript = run_3x4(mech, params["x"])
    elif strategy == "main":
        mp = MainParams.from_alpha(
            Fraction(params["a"]), int(params["r"]), int(params.get("kc", params["r"]))
        )
        params = {"a": mp.a, "r": mp.r, "kc": mp.k_c}
        verdict, transcript = run_main(mech, mp)
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    return Report(
        strategy=strategy,
        params=params,
        mechanism=mech.name,
        verdict=verdict,
        transcript=transcript,
    )


def replay_report(report_dict, mechanism_factory):
    """Re-run a report's strategy against a rebuilt mechanism and compare.

    Returns a list of defects: empty when the re-run reproduces the stored
    report byte for byte (deterministic mechanisms only).
    """
    mech = mechanism_factory(report_dict["mechanism"])
    fresh = attack(report_dict["strategy"], mech, report_dict.get("params", {}))
    stored = json.dumps(report_dict, sort_keys=True)
    redone = json.dumps(fresh.to_json_dict(), sort_keys=True)
    if stored != redone:
        return ["replay produced a different report"]
    return []


def verify_report(report_dict):
    """Offline checks of a stored report: verdict invariants only."""
    try:
        verdict = verdict_from_json_dict(report_dict["verdict"])
    except (KeyError, ValueError, TypeError) as exc:
        return [f"malformed report: {exc}"]
    return verify_verdict(verdict)
