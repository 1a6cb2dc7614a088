from pathlib import Path

import pytest

from reachtamp.bench.claims import CLAIMS, check_claim, sign_test_p
from reachtamp.bench.models import Outcome, SuiteConfig, TrialRecord
from reachtamp.bench.runner import load_records, run_suite
from reachtamp.utils.exceptions import ValidationError

SUITES = Path(__file__).resolve().parent.parent / "suites"


def cell(domain, m, variant, solved, trials=30, **fields):
    """`trials` records of one cell, the first `solved` of them solved."""
    return [
        TrialRecord(instance=f"{domain}-{m}-s{k}", domain=domain, m=m, variant=variant, seed=k,
                    outcome=Outcome.SOLVED if k < solved else Outcome.TIMEOUT,
                    wall_time=fields.get("wall_time", 10.0),
                    valid=True if k < solved else None,
                    **{key: value for key, value in fields.items() if key != "wall_time"})
        for k in range(trials)
    ]


def load_suite(name):
    return SuiteConfig.model_validate_json((SUITES / name).read_text(encoding="utf-8"))


class TestKitchenClaim:
    def test_holds(self):
        records = cell("kitchen", 3, "full", 27) + cell("kitchen", 3, "no-reward", 20) \
            + cell("kitchen", 3, "no-rejection", 27)
        result = check_claim(records, "kitchen")
        assert result.passed
        assert [g.name for g in result.gates] == ["full_vs_no_reward", "full_vs_no_rejection",
                                                  "full_success_rate", "solutions_valid"]

    def test_low_success_rate(self):
        records = cell("kitchen", 3, "full", 21) + cell("kitchen", 3, "no-reward", 20) \
            + cell("kitchen", 3, "no-rejection", 20)
        result = check_claim(records, "kitchen")
        assert not result.passed
        assert [g.name for g in result.gates if not g.passed] == ["full_success_rate"]

    def test_baseline_ahead(self):
        records = cell("kitchen", 3, "full", 25) + cell("kitchen", 3, "no-reward", 26) \
            + cell("kitchen", 3, "no-rejection", 20)
        failed = [g.name for g in check_claim(records, "kitchen").gates if not g.passed]
        assert failed == ["full_vs_no_reward"]

    def test_invalid_solution(self):
        full = cell("kitchen", 3, "full", 27)
        full[0] = full[0].model_copy(update={"valid": False})
        records = full + cell("kitchen", 3, "no-reward", 20) + cell("kitchen", 3, "no-rejection", 20)
        failed = [g.name for g in check_claim(records, "kitchen").gates if not g.passed]
        assert failed == ["solutions_valid"]

    def test_missing_baseline(self):
        with pytest.raises(ValidationError, match="kitchen/3/no-reward"):
            check_claim(cell("kitchen", 3, "full", 27), "kitchen")


class TestNonmonotonicClaim:
    def test_strictly_better(self):
        records = cell("nonmonotonic", 2, "full", 12) + cell("nonmonotonic", 2, "no-reward", 8)
        result = check_claim(records, "nonmonotonic")
        assert result.passed
        sign = next(g for g in result.gates if g.name == "paired_sign_test")
        assert sign.detail.startswith("4 wins, 0 losses, p = 0.062")

    def test_tie_fails(self):
        records = cell("nonmonotonic", 2, "full", 10) + cell("nonmonotonic", 2, "no-reward", 10)
        assert not check_claim(records, "nonmonotonic").passed

    def test_sign_test(self):
        assert sign_test_p(5, 0) == pytest.approx(1 / 32)
        assert sign_test_p(0, 0) == 1.0
        assert sign_test_p(2, 2) == pytest.approx(11 / 16)


class TestRejectionClaim:
    def test_fewer_motion_plans(self):
        records = cell("kitchen", 3, "full", 27, mp_calls=70) + cell("kitchen", 3, "no-rejection", 20, mp_calls=100)
        result = check_claim(records, "rejection")
        assert result.passed
        assert "30% fewer" in result.gates[0].detail

    def test_small_reduction(self):
        records = cell("kitchen", 3, "full", 27, mp_calls=90) + cell("kitchen", 3, "no-rejection", 20, mp_calls=100)
        assert not check_claim(records, "rejection").passed

    def test_no_baseline_calls(self):
        records = cell("kitchen", 3, "full", 27, mp_calls=0) + cell("kitchen", 3, "no-rejection", 20, mp_calls=0)
        assert not check_claim(records, "rejection").passed


class TestBlocktowerClaim:
    def test_holds(self):
        records = [r for m in (2, 3, 4) for r in cell("blocktower", m, "full", 25, task_plan_seconds=1.0)]
        result = check_claim(records, "blocktower")
        assert result.passed
        assert [g.name for g in result.gates] == ["m4_success_rate", "planner_share_m2", "planner_share_m3",
                                                  "planner_share_m4", "solutions_valid"]

    def test_planner_dominates(self):
        records = cell("blocktower", 2, "full", 30, task_plan_seconds=1.0) \
            + cell("blocktower", 4, "full", 25, task_plan_seconds=4.0)
        failed = [g.name for g in check_claim(records, "blocktower").gates if not g.passed]
        assert failed == ["planner_share_m4"]

    def test_missing_size(self):
        with pytest.raises(ValidationError):
            check_claim(cell("blocktower", 2, "full", 30), "blocktower")


def test_unknown_claim():
    with pytest.raises(ValidationError, match="Valid claims are"):
        check_claim([], "sokoban")


@pytest.mark.parametrize("name", ["kitchen3.json", "nonmonotonic2.json", "blocktower.json"])
def test_suite_files(name):
    config = load_suite(name)
    config.check_sizes()
    assert config.trials == 30 and config.timeout == 60


@pytest.mark.acceptance
@pytest.mark.parametrize("suite, claims", [
    ("kitchen3.json", ["kitchen", "rejection"]),
    ("nonmonotonic2.json", ["nonmonotonic"]),
    ("blocktower.json", ["blocktower"]),
])
def test_suite_meets_claims(suite, claims, tmp_path):
    config = load_suite(suite).model_copy(update={"out": tmp_path / "results.jsonl"})
    run_suite(config)
    records = load_records(config.out)
    assert len(records) == len(list(config.trial_keys()))
    for name in claims:
        result = check_claim(records, name)
        assert result.passed, [g for g in result.gates if not g.passed]
    assert set(claims) <= set(CLAIMS)
