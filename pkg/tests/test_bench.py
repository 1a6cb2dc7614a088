import asyncio
import json
import threading
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest
from pydantic import ValidationError as PydanticValidationError

from reachtamp.bench import runner
from reachtamp.bench.analysis import cdf, cdf_steps, compare, group_records
from reachtamp.bench.models import TIMING_FIELDS, Outcome, SuiteConfig, TrialRecord
from reachtamp.bench.report import render_markdown, write_markdown_report
from reachtamp.bench.runner import load_records, run_suite, run_trial
from reachtamp.utils.exceptions import FileFormatError, ValidationError


def record(variant="full", seed=0, outcome=Outcome.SOLVED, wall_time=1.0, domain="kitchen", m=1, **counters):
    return TrialRecord(instance=f"{domain}-{m}-s{seed}", domain=domain, m=m, variant=variant, seed=seed,
                       outcome=outcome, wall_time=wall_time, **counters)


@pytest.fixture
def results():
    return [
        record("full", 0, wall_time=1.0, iterations=4),
        record("full", 1, wall_time=3.0, iterations=8),
        record("full", 2, Outcome.TIMEOUT, wall_time=60.0, iterations=30),
        record("no-reward", 0, Outcome.TIMEOUT, wall_time=60.0, iterations=50),
        record("no-reward", 1, Outcome.INFEASIBLE, wall_time=0.1, iterations=0),
    ]


def write_lines(path, records):
    path.write_text("".join(r.model_dump_json() + "\n" for r in records), encoding="utf-8")


class TestCdf:
    def test_steps(self):
        steps = cdf_steps([4.0, 1.0, 2.0], 10)
        assert [(s.time, s.fraction) for s in steps] == [(1.0, 0.1), (2.0, 0.2), (4.0, pytest.approx(0.3))]

    def test_equal_times_share_a_step(self):
        steps = cdf_steps([2.0, 2.0, 5.0], 4)
        assert [(s.time, s.fraction) for s in steps] == [(2.0, 0.5), (5.0, 0.75)]

    def test_no_successes(self):
        (table,) = cdf([record(outcome=Outcome.TIMEOUT, wall_time=60.0)], ["variant"])
        assert table.steps == []
        assert table.success_rate == 0.0
        assert cdf_steps([], 0) == []

    def test_groups(self, results):
        tables = cdf(results, ["variant"])
        assert [t.group for t in tables] == [{"variant": "full"}, {"variant": "no-reward"}]
        full = tables[0]
        assert full.trials == 3
        assert full.success_rate == pytest.approx(2 / 3)
        assert full.steps[-1].fraction == pytest.approx(full.success_rate)

    def test_monotone_on_random_results(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            records = [record(seed=k, outcome=Outcome.SOLVED if rng.random() < 0.6 else Outcome.TIMEOUT,
                              wall_time=float(rng.integers(1, 20)))
                       for k in range(int(rng.integers(1, 30)))]
            (table,) = cdf(records, ["domain"])
            times = [s.time for s in table.steps]
            fractions = [s.fraction for s in table.steps]
            assert times == sorted(set(times))
            assert all(a < b for a, b in zip(fractions, fractions[1:]))
            if fractions:
                assert fractions[-1] == pytest.approx(table.success_rate)
            assert all(0.0 < f <= 1.0 for f in fractions)

    def test_bad_group_key(self, results):
        with pytest.raises(ValidationError):
            group_records(results, ["colour"])


class TestCompare:
    def test_summary(self, results):
        full, no_reward = compare(results)
        assert (full.trials, full.solved) == (3, 2)
        assert full.success_rate == pytest.approx(2 / 3)
        assert full.median_solve_time == 2.0
        assert full.counter_means["iterations"] == pytest.approx(14.0)
        assert no_reward.solved == 0
        assert no_reward.median_solve_time is None
        assert no_reward.counter_means["iterations"] == 25.0

    def test_two_keys(self, results):
        summaries = compare(results, ["domain", "variant"])
        assert summaries[0].group == {"domain": "kitchen", "variant": "full"}

    def test_empty(self):
        assert compare([]) == []
        assert cdf([], ["variant"]) == []


class TestRecords:
    def test_truncated_last_line(self, results, tmp_path):
        path = tmp_path / "results.jsonl"
        write_lines(path, results[:2])
        with open(path, "a", encoding="utf-8") as f:
            f.write(results[2].model_dump_json()[:20])
        assert load_records(path) == results[:2]
        load_records(path, repair=True)
        assert path.read_text(encoding="utf-8").endswith("\n")
        assert load_records(path) == results[:2]

    def test_truncated_only_line(self, results, tmp_path):
        path = tmp_path / "results.jsonl"
        path.write_text(results[0].model_dump_json()[:10], encoding="utf-8")
        assert load_records(path, repair=True) == []
        assert path.read_text(encoding="utf-8") == ""

    def test_corrupt_line(self, results, tmp_path):
        path = tmp_path / "results.jsonl"
        path.write_text(json.dumps({"instance": "x"}) + "\n", encoding="utf-8")
        with pytest.raises(FileFormatError):
            load_records(path)

    def test_missing_file(self, tmp_path):
        assert load_records(tmp_path / "none.jsonl") == []

    def test_record_key(self):
        r = record("no-rejection", 4)
        assert r.key == ("kitchen-1-s4", "no-rejection", 4)
        assert r.solved


class TestSuiteConfig:
    def test_aliases_and_order(self, tmp_path):
        config = SuiteConfig(domain=["nonmon", "kitchen"], m=[1], variant=["full", "no-reward"], trials=2,
                             seed=10, out=tmp_path / "r.jsonl")
        assert config.domain == ["nonmonotonic", "kitchen"]
        assert list(config.trial_keys())[:3] == [
            ("nonmonotonic", 1, "full", 10),
            ("nonmonotonic", 1, "full", 11),
            ("nonmonotonic", 1, "no-reward", 10),
        ]
        assert len(list(config.trial_keys())) == 8

    def test_invalid(self, tmp_path):
        with pytest.raises(PydanticValidationError):
            SuiteConfig(domain=["kitchen"], m=[1], variant=["fastest"], out=tmp_path / "r.jsonl")
        with pytest.raises(PydanticValidationError):
            SuiteConfig(domain=[], m=[1], out=tmp_path / "r.jsonl")
        with pytest.raises(ValidationError):
            SuiteConfig(domain=["nonmon"], m=[3], out=tmp_path / "r.jsonl").check_sizes()

    def test_unknown_key(self, tmp_path):
        with pytest.raises(PydanticValidationError):
            SuiteConfig.model_validate({"domain": ["kitchen"], "m": [1], "out": str(tmp_path / "r.jsonl"),
                                        "timout": 30})

    def test_resume_with_nothing_left(self, tmp_path):
        out = tmp_path / "r.jsonl"
        config = SuiteConfig(domain=["kitchen"], m=[1], trials=2, out=out)
        write_lines(out, [record("full", 0), record("full", 1)])
        assert run_suite(config) == 0
        assert len(load_records(out)) == 2


class TestReport:
    def test_render(self, results):
        text = render_markdown(compare(results), "Variants")
        assert text.startswith("# Variants\n")
        assert "| variant | trials | solved | success rate | median time (s) |" in text
        assert "| full | 3 | 2 | 67% | 2.00 |" in text
        assert "| no-reward | 2 | 0 | 0% | - |" in text

    def test_empty(self):
        assert "No trials recorded." in render_markdown([], "Nothing")

    def test_write(self, results, tmp_path):
        path = asyncio.run(write_markdown_report(compare(results), tmp_path / "out" / "report.md"))
        assert path.read_text(encoding="utf-8").startswith("# Planner comparison")
        with pytest.raises(ValidationError):
            asyncio.run(write_markdown_report([], tmp_path / "x.md", title="  "))


class TestGuardedTrial:
    @pytest.fixture
    def config(self, tmp_path):
        return SuiteConfig(domain=["kitchen"], m=[1], timeout=0.05, grace=0.05, out=tmp_path / "r.jsonl")

    def test_returns_worker_record(self, config, monkeypatch):
        monkeypatch.setattr(runner, "run_trial", lambda domain, m, variant, seed, *args: record(variant, seed))

        async def scenario():
            slots = asyncio.Semaphore(1)
            with ThreadPoolExecutor(max_workers=1) as executor:
                result = await runner._guarded_trial(executor, slots, config, "kitchen", 1, "full", 3)
                await asyncio.wait_for(slots.acquire(), timeout=5)
            return result

        assert asyncio.run(scenario()) == record("full", 3)

    def test_slot_held_until_overrunning_worker_returns(self, config, monkeypatch):
        release = threading.Event()

        def stuck(domain, m, variant, seed, *args):
            release.wait(10)
            return record(variant, seed)

        monkeypatch.setattr(runner, "run_trial", stuck)

        async def scenario():
            slots = asyncio.Semaphore(1)
            with ThreadPoolExecutor(max_workers=1) as executor:
                result = await runner._guarded_trial(executor, slots, config, "kitchen", 1, "full", 0)
                held = slots.locked()
                release.set()
                await asyncio.wait_for(slots.acquire(), timeout=5)
                slots.release()
            return result, held

        result, held = asyncio.run(scenario())
        assert result.outcome is Outcome.TIMEOUT
        assert result.message == "worker exceeded timeout + grace"
        assert held


@pytest.mark.slow
class TestRunner:
    def test_trial_is_deterministic(self):
        first = run_trial("kitchen", 1, "full", 0, timeout=120)
        second = run_trial("kitchen", 1, "full", 0, timeout=120)
        assert first.solved and first.valid
        assert first.model_dump(exclude=set(TIMING_FIELDS)) == second.model_dump(exclude=set(TIMING_FIELDS))

    def test_suite_resumes(self, tmp_path):
        out = tmp_path / "results.jsonl"
        config = SuiteConfig(domain=["kitchen"], m=[1], trials=2, timeout=120, workers=2, out=out)
        seen = []
        assert run_suite(config, seen.append) == 2
        records = load_records(out)
        assert [r.seed for r in records] == [0, 1]
        assert [r.key for r in seen] == [r.key for r in records]
        assert run_suite(config) == 0
