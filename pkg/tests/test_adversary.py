import json
from fractions import Fraction

import pytest

from mechdock.adversary import (
    Report,
    attack,
    replay_report,
    run_2x2,
    run_3x3,
    run_3x4,
    run_main,
    verify_report,
)
from mechdock.adversary.verdicts import (
    RatioWitness,
    StrategyIncomplete,
    Unbounded,
    WmonViolation,
    verdict_from_json_dict,
    verify_verdict,
)
from mechdock.exactnum import UNBOUNDED, leading_ratio, tv
from mechdock.forge import MainParams
from mechdock.mechlib import SeededStub, make_mechanism
from mechdock.schedmodel import Allocation, makespan

RHO_B = Fraction(22055, 10000)
RHO_C = Fraction(26589, 10000)
SQRT2 = Fraction(141421, 100000)


def _assert_sound(verdict):
    assert not isinstance(verdict, StrategyIncomplete), verdict
    assert verify_verdict(verdict) == []


def test_2x2_minwork_exact_ratio_two():
    verdict, transcript = run_2x2(make_mechanism("minwork"))
    _assert_sound(verdict)
    assert isinstance(verdict, RatioWitness)
    assert verdict.claimed_bound == 2
    ratio = leading_ratio(
        makespan(verdict.instance, verdict.mech_alloc),
        makespan(verdict.instance, verdict.certificate),
    )
    assert ratio == Fraction(2)


def test_2x2_dictator_unbounded():
    verdict, _ = run_2x2(make_mechanism("dictator:2"))
    _assert_sound(verdict)
    assert isinstance(verdict, Unbounded)


def test_3x3_minwork_case_three_two():
    verdict, _ = run_3x3(make_mechanism("minwork"), 1, RHO_B, RHO_C)
    _assert_sound(verdict)
    assert isinstance(verdict, RatioWitness)
    assert verdict.claimed_bound == (1 + RHO_B + RHO_C) / RHO_C
    assert float(verdict.claimed_bound) >= 2.2054


def test_3x3_integer_parameters():
    verdict, _ = run_3x3(make_mechanism("minwork"), 1, 2, 3)
    _assert_sound(verdict)
    assert isinstance(verdict, RatioWitness)
    assert verdict.claimed_bound == Fraction(2)  # (1+2+3)/3


def test_3x3_dictator3():
    verdict, _ = run_3x3(make_mechanism("dictator:3"), 1, RHO_B, RHO_C)
    _assert_sound(verdict)


def test_3x4_minwork_sqrt2_bound():
    verdict, transcript = run_3x4(make_mechanism("minwork"), SQRT2)
    _assert_sound(verdict)
    assert isinstance(verdict, RatioWitness)
    assert verdict.claimed_bound == (2 + SQRT2) / SQRT2
    assert float(verdict.claimed_bound) >= 2.41420


def test_3x4_formula_point():
    verdict, _ = run_3x4(make_mechanism("minwork"), 2)
    _assert_sound(verdict)
    assert verdict.claimed_bound == Fraction(2)  # min(1+2, (2+2)/2)


def test_main_minwork_reference_point():
    p = MainParams.from_alpha(Fraction(1873, 1000), 3, 3)
    verdict, transcript = run_main(make_mechanism("minwork"), p)
    _assert_sound(verdict)
    assert isinstance(verdict, RatioWitness)
    assert verdict.claimed_bound == 1 + Fraction(1873, 1000)
    assert transcript.queries < 200


def test_main_dictator_unbounded():
    p = MainParams.from_alpha(Fraction(1873, 1000), 3, 3)
    verdict, _ = run_main(make_mechanism("dictator:1"), p)
    _assert_sound(verdict)
    assert isinstance(verdict, Unbounded)
    assert verdict.reason == "infinite-assignment"


def test_main_warmup_single_block():
    p = MainParams.from_alpha(Fraction(18019, 10000), 1, 40)
    verdict, _ = run_main(make_mechanism("minwork"), p)
    _assert_sound(verdict)
    assert isinstance(verdict, RatioWitness)
    assert float(verdict.claimed_bound) >= 1 + 1.8019 - 1e-3


def test_main_optmakespan_small():
    p = MainParams.from_alpha(Fraction(17, 10), 1, 1)
    verdict, _ = run_main(make_mechanism("optmakespan"), p)
    _assert_sound(verdict)


@pytest.mark.parametrize("seed", range(60))
def test_2x2_stub_sweep_small(seed):
    verdict, _ = run_2x2(SeededStub(seed))
    _assert_sound(verdict)
    verdict, _ = run_2x2(SeededStub(seed, active_only=True))
    _assert_sound(verdict)


def test_small_strategy_stub_sweeps():
    for seed in range(300):
        for stub in (SeededStub(seed), SeededStub(seed, active_only=True)):
            v, _ = run_3x3(stub, 1, RHO_B, RHO_C)
            _assert_sound(v)
            v, _ = run_3x4(stub, SQRT2)
            _assert_sound(v)


def test_main_stub_sweep():
    p = MainParams.from_alpha(Fraction(9, 5), 2, 2)
    for seed in range(150):
        for stub in (SeededStub(seed), SeededStub(seed, active_only=True)):
            v, _ = run_main(stub, p)
            _assert_sound(v)


def test_verdict_json_roundtrip_and_tamper_detection():
    verdict, _ = run_2x2(make_mechanism("minwork"))
    d = verdict.to_json_dict()
    back = verdict_from_json_dict(json.loads(json.dumps(d)))
    assert verify_verdict(back) == []
    tampered = dict(d)
    tampered["claimed_bound"] = str(Fraction(d["claimed_bound"]) + 1)
    assert verify_verdict(verdict_from_json_dict(tampered))
    tampered = dict(d)
    bad_cert = dict(d["certificate"])
    bad_cert["owner"] = [0] * len(bad_cert["owner"])
    tampered["certificate"] = bad_cert
    assert verify_verdict(verdict_from_json_dict(tampered))


def test_attack_report_and_replay():
    report = attack("s3x3", make_mechanism("minwork"))
    assert verify_report(report.to_json_dict()) == []
    assert replay_report(report.to_json_dict(), make_mechanism) == []
    # a doctored bound must fail verification
    doctored = report.to_json_dict()
    doctored["verdict"]["claimed_bound"] = "4"
    assert verify_report(doctored)


def test_attack_main_params_threading():
    report = attack(
        "main", make_mechanism("minwork"), {"a": Fraction(1873, 1000), "r": 3}
    )
    assert report.params["kc"] == 3
    assert verify_report(report.to_json_dict()) == []
    assert replay_report(report.to_json_dict(), make_mechanism) == []


def test_replay_detects_mechanism_mismatch():
    report = attack("s2x2", make_mechanism("minwork")).to_json_dict()
    report["mechanism"] = "dictator:2"
    assert replay_report(report, make_mechanism)
