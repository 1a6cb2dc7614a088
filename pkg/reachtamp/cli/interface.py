"""
Command-line interface for the ReachTAMP toolkit.
Generates benchmark bundles, solves and validates them, and runs and
summarizes benchmark suites.
"""

import asyncio
from pathlib import Path
from typing import List, Optional

import typer
from pydantic import TypeAdapter, ValidationError as PydanticValidationError
from rich.console import Console
from rich.progress import BarColumn, MofNCompleteColumn, Progress, SpinnerColumn, TextColumn
from rich.table import Table

from reachtamp.bench.analysis import CdfTable, GroupSummary, cdf as compute_cdf, compare as compute_compare
from reachtamp.bench.claims import CLAIMS, check_claim
from reachtamp.bench.models import SuiteConfig, TrialRecord
from reachtamp.bench.report import write_markdown_report
from reachtamp.bench.runner import load_records, run_suite
from reachtamp.config import DEFAULT_TIMEOUT, DEFAULT_TRIALS, DIRECT_PLAN_ATTEMPTS, validate_config
from reachtamp.domains.bundle import (
    build_instance,
    load_bundle,
    load_solution,
    verify_instance,
    write_bundle,
    write_solution,
)
from reachtamp.domains.validator import validate_solution
from reachtamp.tamp.params import SearchParams
from reachtamp.tamp.planner import SearchStats, solve as solve_instance
from reachtamp.utils.exceptions import ReachTampError, ValidationError
from reachtamp.utils.logging_config import get_logger, setup_logging
from reachtamp.utils.validation import (
    validate_domain_name,
    validate_group_keys,
    validate_movable_count,
    validate_output_path,
    validate_variant,
)

# Initialize logging
setup_logging()
logger = get_logger(__name__)

app = typer.Typer(
    name="reachtamp",
    help="ReachTAMP - task and motion planning over reachability trees",
    add_completion=False,
)

console = Console()

OUTCOME_STYLE = {"solved": "green", "timeout": "yellow", "infeasible": "blue", "error": "red"}


def _fail(e: Exception) -> None:
    logger.error(f"{type(e).__name__}: {e}")
    console.print(f"[red]Error:[/red] {e}")
    raise typer.Exit(1)


def _suite_from_flags(domain: Optional[List[str]], m: Optional[List[int]], variant: Optional[List[str]],
                      trials: int, timeout: float, seed: int, out: Optional[Path], workers: int,
                      max_iterations: Optional[int]) -> SuiteConfig:
    if not domain or not m:
        raise ValidationError("--domain and --m are required without --config")
    return SuiteConfig(
        domain=[validate_domain_name(d) for d in domain],
        m=m,
        variant=[validate_variant(v) for v in (variant or ["full"])],
        trials=trials,
        timeout=timeout,
        seed=seed,
        out=validate_output_path(out, "results.jsonl"),
        workers=workers,
        max_iterations=max_iterations,
    )


def _load_suite(path: Path) -> SuiteConfig:
    try:
        return SuiteConfig.model_validate_json(Path(path).read_text(encoding="utf-8"))
    except OSError as e:
        raise ValidationError(f"Cannot read config {path}: {e}") from e
    except PydanticValidationError as e:
        raise ValidationError(f"Invalid suite config {path}: {e}") from e


@app.command()
def run(
    domain: Optional[List[str]] = typer.Option(None, "--domain", "-d", help="kitchen, nonmon or blocktower (repeatable)"),
    m: Optional[List[int]] = typer.Option(None, "--m", help="Number of movables (repeatable)"),
    variant: Optional[List[str]] = typer.Option(None, "--variant", "-v", help="full, no-reward or no-rejection (repeatable)"),
    trials: int = typer.Option(DEFAULT_TRIALS, "--trials", "-n", help="Seeded trials per (domain, m, variant)"),
    timeout: float = typer.Option(DEFAULT_TIMEOUT, "--timeout", "-t", help="Per-trial timeout in seconds"),
    seed: int = typer.Option(0, "--seed", help="Seed of the first trial"),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Results file (JSON lines)"),
    workers: int = typer.Option(1, "--workers", "-w", help="Parallel worker processes"),
    max_iterations: Optional[int] = typer.Option(None, "--max-iterations", help="Iteration cap per trial"),
    config: Optional[Path] = typer.Option(None, "--config", "-c", help="Suite config file (JSON, same keys as the flags)"),
):
    """
    Run a benchmark suite, appending to the results file and skipping trials already recorded.
    """
    try:
        suite = _load_suite(config) if config else _suite_from_flags(
            domain, m, variant, trials, timeout, seed, out, workers, max_iterations)
        suite.check_sizes()
        total = len(list(suite.trial_keys()))
        logger.info(f"Run request: {suite.model_dump_json()}")

        with Progress(SpinnerColumn(), TextColumn("[progress.description]{task.description}"), BarColumn(),
                      MofNCompleteColumn(), console=console) as progress:
            task = progress.add_task(description="Running trials...", total=total)
            done_before = total

            def on_record(record: TrialRecord) -> None:
                style = OUTCOME_STYLE[record.outcome.value]
                progress.console.print(f"{record.instance} [{record.variant}] "
                                       f"[{style}]{record.outcome.value}[/{style}] {record.wall_time:.2f}s")
                progress.advance(task)

            written = run_suite(suite, on_record)
            progress.update(task, completed=total)
            done_before -= written

        console.print(f"[green]{written} trials recorded[/green] ({done_before} already present) in {suite.out}")
    except ReachTampError as e:
        _fail(e)


def _print_cdf(tables: List[CdfTable]) -> None:
    table = Table(title="Success CDF")
    table.add_column("Group", style="cyan")
    table.add_column("Trials", justify="right")
    table.add_column("Steps", justify="right")
    table.add_column("Success rate", style="green", justify="right")
    for t in tables:
        table.add_row(", ".join(f"{k}={v}" for k, v in t.group.items()), str(t.trials), str(len(t.steps)),
                      f"{t.success_rate:.0%}")
    console.print(table)


@app.command()
def cdf(
    results: Path = typer.Option(..., "--in", "-i", help="Results file"),
    group: str = typer.Option("domain,variant", "--group", "-g", help="Comma-separated group keys"),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="CDF table file (JSON)"),
):
    """
    Cumulative success fraction over solve time, per group.
    """
    try:
        keys = validate_group_keys(group)
        tables = compute_cdf(load_records(results), keys)
        path = validate_output_path(out, "cdf.json")
        path.write_bytes(TypeAdapter(List[CdfTable]).dump_json(tables, indent=2))
        _print_cdf(tables)
        console.print(f"[green]CDF written to[/green] {path}")
    except ReachTampError as e:
        _fail(e)


def _print_summary(summaries: List[GroupSummary]) -> None:
    table = Table(title="Comparison")
    table.add_column("Group", style="cyan")
    table.add_column("Trials", justify="right")
    table.add_column("Success", style="green", justify="right")
    table.add_column("Median time (s)", justify="right")
    table.add_column("MP calls", justify="right")
    table.add_column("Candidates rejected", justify="right")
    for s in summaries:
        median = f"{s.median_solve_time:.2f}" if s.median_solve_time is not None else "-"
        table.add_row(", ".join(f"{k}={v}" for k, v in s.group.items()), str(s.trials),
                      f"{s.success_rate:.0%}", median, f"{s.counter_means['mp_calls']:.1f}",
                      f"{s.counter_means['goal_candidates_rejected']:.1f}")
    console.print(table)


@app.command()
def compare(
    results: Path = typer.Option(..., "--in", "-i", help="Results file"),
    group: str = typer.Option("variant", "--group", "-g", help="Comma-separated group keys"),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Summary file (JSON); printed to stdout if omitted"),
    report: Optional[Path] = typer.Option(None, "--report", "-r", help="Also write a Markdown report"),
):
    """
    Success rates, median solve time and counter means per group.
    """
    try:
        keys = validate_group_keys(group)
        summaries = compute_compare(load_records(results), keys)
        data = TypeAdapter(List[GroupSummary]).dump_json(summaries, indent=2)
        if out is None:
            console.print_json(data.decode("utf-8"))
        else:
            path = validate_output_path(out, "summary.json")
            path.write_bytes(data)
            _print_summary(summaries)
            console.print(f"[green]Summary written to[/green] {path}")
        if report is not None:
            path = asyncio.run(write_markdown_report(summaries, validate_output_path(report, "report.md")))
            console.print(f"[green]Report written to[/green] {path}")
    except ReachTampError as e:
        _fail(e)


@app.command()
def check(
    results: List[Path] = typer.Option(..., "--in", "-i", help="Results file (repeatable)"),
    claim: Optional[List[str]] = typer.Option(None, "--claim", help="kitchen, nonmonotonic, rejection or blocktower "
                                                                    "(repeatable; all by default)"),
):
    """
    Check benchmark claims against recorded trials; exits 1 if any gate fails.
    """
    try:
        records = [r for path in results for r in load_records(path)]
        outcomes = [check_claim(records, name) for name in (claim or list(CLAIMS))]
    except ReachTampError as e:
        _fail(e)
        return

    table = Table(title="Claims")
    table.add_column("Claim", style="cyan")
    table.add_column("Gate")
    table.add_column("Result")
    table.add_column("Detail")
    for outcome in outcomes:
        for gate in outcome.gates:
            verdict = "[green]pass[/green]" if gate.passed else "[red]fail[/red]"
            table.add_row(outcome.claim, gate.name, verdict, gate.detail)
    console.print(table)
    failed = [o.claim for o in outcomes if not o.passed]
    if failed:
        console.print(f"[red]Claims not met:[/red] {', '.join(failed)}")
        raise typer.Exit(1)
    console.print(f"[green]All {len(outcomes)} claims hold[/green]")


@app.command()
def gen(
    domain: str = typer.Option(..., "--domain", "-d", help="kitchen, nonmon or blocktower"),
    m: int = typer.Option(..., "--m", help="Number of movables"),
    seed: int = typer.Option(0, "--seed", help="Generator seed"),
    out: Path = typer.Option(..., "--out", "-o", help="Bundle directory"),
    attempts: int = typer.Option(DIRECT_PLAN_ATTEMPTS, "--attempts", min=1,
                                 help="Seeded passes of the blocker-ignoring plan (nonmon)"),
):
    """
    Generate a problem bundle (domain.pddl, problem.pddl, scene.json, goal.json).
    The family's generation-time checks always run; a failing check writes nothing.
    """
    try:
        name = validate_domain_name(domain)
        validate_movable_count(name, m)
        instance = build_instance(name, m, seed)
        verify_instance(instance, attempts=attempts)
        path = write_bundle(instance, out)
        console.print(f"[green]Bundle {instance.id} written to[/green] {path}")
    except ReachTampError as e:
        _fail(e)


@app.command()
def solve(
    bundle: Path = typer.Option(..., "--bundle", "-b", help="Bundle directory"),
    variant: str = typer.Option("full", "--variant", "-v", help="Planner variant"),
    seed: int = typer.Option(0, "--seed", help="Planner seed"),
    timeout: float = typer.Option(DEFAULT_TIMEOUT, "--timeout", "-t", help="Timeout in seconds"),
    max_iterations: Optional[int] = typer.Option(None, "--max-iterations", help="Iteration cap"),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Solution file"),
):
    """
    Solve one bundle and write the solution file.
    """
    try:
        instance = load_bundle(bundle)
        params = SearchParams.for_variant(validate_variant(variant), seed=seed, timeout=timeout,
                                          max_iterations=max_iterations)
        stats = SearchStats()
        with console.status(f"Solving {instance.id}..."):
            solution = solve_instance(instance.x_init, instance.goal, instance.scene, instance.ground, params, stats)
        path = write_solution(validate_output_path(out, f"{instance.id}.solution.json"), instance, solution)
        console.print(f"[green]Solved {instance.id}[/green]: {len(solution)} edges, "
                      f"{stats['iterations']} iterations. Solution written to {path}")
    except ReachTampError as e:
        _fail(e)


@app.command()
def validate(
    bundle: Path = typer.Option(..., "--bundle", "-b", help="Bundle directory"),
    solution: Path = typer.Option(..., "--solution", "-s", help="Solution file"),
):
    """
    Replay a solution against its bundle; exits with code 1 if it is invalid.
    """
    try:
        instance = load_bundle(bundle)
        verdict = validate_solution(instance, load_solution(solution, instance))
    except ReachTampError as e:
        _fail(e)
    if verdict.valid:
        console.print(f"[green]Valid[/green] solution for {instance.id}")
        return
    logger.info(f"Invalid solution {solution}: edge {verdict.step}: {verdict.violation}")
    console.print(f"[red]Invalid[/red] at edge {verdict.step}: {verdict.violation}")
    raise typer.Exit(1)


@app.callback()
def main_callback():
    try:
        validate_config()
    except ReachTampError as e:
        _fail(e)


if __name__ == "__main__":
    app()
