"""
Markdown rendering of a comparison summary.
"""

import asyncio
from datetime import datetime
from pathlib import Path
from typing import Sequence

from reachtamp.bench.analysis import GroupSummary
from reachtamp.bench.models import COUNTER_FIELDS
from reachtamp.utils.exceptions import FileFormatError, ValidationError
from reachtamp.utils.logging_config import get_logger

logger = get_logger(__name__)


def render_markdown(summaries: Sequence[GroupSummary], title: str) -> str:
    lines = [f"# {title}", "", f"*Generated on {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}*", "", "---", ""]
    if not summaries:
        lines.append("No trials recorded.")
        return "\n".join(lines) + "\n"

    keys = list(summaries[0].group)
    lines.append("## Success")
    lines.append("")
    lines.append("| " + " | ".join(keys + ["trials", "solved", "success rate", "median time (s)"]) + " |")
    lines.append("|" + "---|" * (len(keys) + 4))
    for s in summaries:
        median = f"{s.median_solve_time:.2f}" if s.median_solve_time is not None else "-"
        cells = [s.group[k] for k in keys] + [str(s.trials), str(s.solved), f"{s.success_rate:.0%}", median]
        lines.append("| " + " | ".join(cells) + " |")

    lines += ["", "## Mean counters per trial", ""]
    lines.append("| " + " | ".join(keys + list(COUNTER_FIELDS)) + " |")
    lines.append("|" + "---|" * (len(keys) + len(COUNTER_FIELDS)))
    for s in summaries:
        cells = [s.group[k] for k in keys] + [f"{s.counter_means[f]:.1f}" for f in COUNTER_FIELDS]
        lines.append("| " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"


async def write_markdown_report(summaries: Sequence[GroupSummary], path: Path,
                                title: str = "Planner comparison") -> Path:
    """
    Write a comparison summary as a Markdown document.

    Args:
        summaries (Sequence[GroupSummary]): output of `compare`
        path (Path): destination file
        title (str): document heading

    Returns:
        Path: the written file

    Raises:
        FileFormatError: If the document cannot be written
    """
    logger.info("Generating Markdown report")
    if not title or not title.strip():
        raise ValidationError("Report title is empty")
    content = render_markdown(summaries, title)
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        loop = asyncio.get_running_loop()
        await loop.run_in_executor(None, lambda: path.write_text(content, encoding="utf-8"))
    except OSError as e:
        raise FileFormatError(f"Failed to write report: {e}", str(path)) from e
    logger.info(f"Markdown report generated: {path}")
    return path
