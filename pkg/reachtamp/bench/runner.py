"""
Trial runner: seeded solve attempts in worker processes, appended to a
line-delimited results file in submission order.
"""

import asyncio
import json
import os
import time
from concurrent.futures import Executor, ProcessPoolExecutor
from pathlib import Path
from typing import Callable, List, Optional, Set, Tuple

from pydantic import ValidationError as PydanticValidationError

from reachtamp.bench.models import Outcome, SuiteConfig, TrialRecord
from reachtamp.domains.bundle import build_instance
from reachtamp.domains.common import instance_id
from reachtamp.domains.validator import validate_solution
from reachtamp.tamp.params import SearchParams
from reachtamp.tamp.planner import SearchStats, solve
from reachtamp.utils.exceptions import FileFormatError, InfeasibleGoalError, ReachTampError, SolveTimeoutError
from reachtamp.utils.logging_config import get_logger

logger = get_logger(__name__)

TrialKey = Tuple[str, str, int]


def run_trial(domain: str, m: int, variant: str, seed: int, timeout: float,
              max_iterations: Optional[int] = None, validate: bool = True) -> TrialRecord:
    """
    One seeded solve attempt. The instance and the planner share the seed.

    Returns:
        TrialRecord: outcome and counters; `valid` is set for solved trials when `validate` is on
    """
    instance = build_instance(domain, m, seed)
    params = SearchParams.for_variant(variant, seed=seed, timeout=timeout, max_iterations=max_iterations)
    stats = SearchStats()
    fields = {}
    started = time.perf_counter()
    solution = None
    try:
        solution = solve(instance.x_init, instance.goal, instance.scene, instance.ground, params, stats)
        outcome = Outcome.SOLVED
    except SolveTimeoutError as e:
        outcome = Outcome.TIMEOUT
        fields["message"] = str(e)
    except InfeasibleGoalError as e:
        outcome = Outcome.INFEASIBLE
        fields["message"] = str(e)
    except ReachTampError as e:
        logger.error(f"{instance.id} [{variant}] failed: {e}")
        outcome = Outcome.ERROR
        fields["message"] = f"{type(e).__name__}: {e}"
    wall_time = time.perf_counter() - started

    if solution is not None:
        fields["solution_length"] = len(solution)
        if validate:
            verdict = validate_solution(instance, solution, params.mp.step, params.mp.check_resolution)
            fields["valid"] = verdict.valid
            if not verdict.valid:
                logger.error(f"{instance.id} [{variant}] seed {seed}: invalid solution at edge "
                             f"{verdict.step}: {verdict.violation}")
                fields["message"] = verdict.violation

    counters = stats.summary()
    record = TrialRecord(
        instance=instance.id,
        domain=instance.name,
        m=m,
        variant=variant,
        seed=seed,
        outcome=outcome,
        wall_time=wall_time,
        iterations=counters["iterations"],
        mp_calls=counters["mp_calls"],
        collision_checks=counters["collision_checks"],
        goal_candidates_drawn=counters["goal_candidates_drawn"],
        goal_candidates_rejected=counters["goal_candidates_rejected"],
        task_plan_calls=counters["task_plan_calls"],
        task_plan_seconds=counters["task_plan_seconds"],
        art_size=counters["art_size"],
        rt_size=counters["rt_size"],
        **fields,
    )
    logger.info(f"{record.instance} [{variant}] seed {seed}: {outcome.value} in {wall_time:.2f}s")
    return record


def load_records(path: Path, repair: bool = False) -> List[TrialRecord]:
    """
    Read a results file. A truncated last line (interrupted write) is
    dropped; with `repair` the file is also cut back to its last complete line.

    Raises:
        FileFormatError: If a complete line is not a valid record
    """
    path = Path(path)
    if not path.exists():
        return []
    raw = path.read_bytes()
    complete, _, tail = raw.rpartition(b"\n")
    if tail.strip():
        logger.warning(f"Dropping truncated last line of {path}")
        if repair:
            with open(path, "r+b") as f:
                f.truncate(len(complete) + 1 if complete else 0)
    records = []
    for lineno, line in enumerate(complete.decode("utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        try:
            records.append(TrialRecord.model_validate(json.loads(line)))
        except (json.JSONDecodeError, PydanticValidationError) as e:
            raise FileFormatError(f"line {lineno}: {e}", str(path)) from e
    return records


def _hard_timeout_record(domain: str, m: int, variant: str, seed: int, elapsed: float) -> TrialRecord:
    return TrialRecord(instance=instance_id(domain, m, seed), domain=domain, m=m, variant=variant, seed=seed,
                       outcome=Outcome.TIMEOUT, wall_time=elapsed, message="worker exceeded timeout + grace")


async def _guarded_trial(executor: Executor, slots: asyncio.Semaphore, config: SuiteConfig,
                         domain: str, m: int, variant: str, seed: int) -> TrialRecord:
    """
    Run one trial with a hard limit of timeout + grace. The slot is held until
    the worker actually finishes, so a trial that overruns the limit still
    counts against the worker budget.
    """
    await slots.acquire()
    loop = asyncio.get_running_loop()
    started = time.perf_counter()
    try:
        future = loop.run_in_executor(executor, run_trial, domain, m, variant, seed, config.timeout,
                                      config.max_iterations, config.validate_solutions)
    except BaseException:
        slots.release()
        raise
    future.add_done_callback(lambda _: slots.release())
    try:
        return await asyncio.wait_for(asyncio.shield(future), timeout=config.timeout + config.grace)
    except asyncio.TimeoutError:
        logger.warning(f"{instance_id(domain, m, seed)} [{variant}] exceeded the hard limit; "
                       f"its worker slot stays busy until it returns")
        return _hard_timeout_record(domain, m, variant, seed, time.perf_counter() - started)
    except Exception as e:
        logger.error(f"Worker failed on {instance_id(domain, m, seed)} [{variant}]: {e}")
        return TrialRecord(instance=instance_id(domain, m, seed), domain=domain, m=m, variant=variant,
                           seed=seed, outcome=Outcome.ERROR, wall_time=time.perf_counter() - started,
                           message=f"{type(e).__name__}: {e}")


async def run_suite_async(config: SuiteConfig,
                          on_record: Optional[Callable[[TrialRecord], None]] = None) -> int:
    config.check_sizes()
    out = Path(config.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    done: Set[TrialKey] = {r.key for r in load_records(out, repair=True)}
    pending = [(d, m, v, s) for d, m, v, s in config.trial_keys() if (instance_id(d, m, s), v, s) not in done]
    logger.info(f"Suite: {len(done)} trials already recorded, {len(pending)} to run, {config.workers} workers")
    if not pending:
        return 0

    slots = asyncio.Semaphore(config.workers)
    written = 0
    executor = ProcessPoolExecutor(max_workers=config.workers)
    tasks = [asyncio.create_task(_guarded_trial(executor, slots, config, *key)) for key in pending]
    try:
        with open(out, "a", encoding="utf-8") as f:
            for task in tasks:
                record = await task
                f.write(record.model_dump_json() + "\n")
                f.flush()
                os.fsync(f.fileno())
                written += 1
                if on_record is not None:
                    on_record(record)
    finally:
        for task in tasks:
            task.cancel()
        # Workers past their hard limit finish under their own solve deadline.
        executor.shutdown(wait=True, cancel_futures=True)
    return written


def run_suite(config: SuiteConfig, on_record: Optional[Callable[[TrialRecord], None]] = None) -> int:
    """
    Run every (domain, m, variant, seed) of the suite not yet in the results file.

    Returns:
        int: number of records appended
    """
    return asyncio.run(run_suite_async(config, on_record))
