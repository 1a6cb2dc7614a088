"""
Validation utilities for user-supplied CLI and config values.
"""

from pathlib import Path
from typing import List, Optional

from reachtamp.utils.exceptions import ValidationError
from reachtamp.utils.logging_config import get_logger

logger = get_logger(__name__)

DOMAIN_ALIASES = {
    "kitchen": "kitchen",
    "nonmon": "nonmonotonic",
    "nonmonotonic": "nonmonotonic",
    "blocktower": "blocktower",
}

MOVABLE_RANGES = {
    "kitchen": (1, 6),
    "nonmonotonic": (1, 2),
    "blocktower": (2, 6),
}

RANGE_NOTES = {
    "nonmonotonic": "the layout has one cubby on each side of the arm base",
}

GROUP_KEYS = {"domain", "m", "variant", "instance"}


def validate_domain_name(name: str) -> str:
    """
    Validate a benchmark family name.

    Args:
        name (str): family name or alias ("nonmon")

    Returns:
        str: canonical family name

    Raises:
        ValidationError: If the family is unknown
    """
    canonical = DOMAIN_ALIASES.get(name.strip().lower())
    if canonical is None:
        raise ValidationError(
            f"Invalid domain '{name}'. Valid domains are: kitchen, nonmon, blocktower"
        )
    return canonical


def validate_movable_count(domain: str, m: int) -> int:
    name = validate_domain_name(domain)
    lo, hi = MOVABLE_RANGES[name]
    if not lo <= m <= hi:
        note = RANGE_NOTES.get(name)
        suffix = f" ({note})" if note else ""
        raise ValidationError(f"{domain} supports {lo} <= m <= {hi}, got m={m}{suffix}")
    return m


def validate_variant(variant: str) -> str:
    from reachtamp.tamp.params import VARIANTS

    variant_lower = variant.strip().lower()
    if variant_lower not in VARIANTS:
        raise ValidationError(
            f"Invalid variant '{variant}'. Valid variants are: {', '.join(VARIANTS)}"
        )
    return variant_lower


def validate_group_keys(text: str) -> List[str]:
    """
    Parse a comma-separated list of result fields to group by.

    Raises:
        ValidationError: If a key is unknown or the list is empty
    """
    keys = [k.strip().lower() for k in text.split(",") if k.strip()]
    if not keys:
        raise ValidationError("At least one group key is required")
    unknown = [k for k in keys if k not in GROUP_KEYS]
    if unknown:
        raise ValidationError(
            f"Invalid group keys {unknown}. Valid keys are: {', '.join(sorted(GROUP_KEYS))}"
        )
    return keys


def validate_output_path(path: Optional[Path], default_name: str) -> Path:
    """
    Validate and prepare an output file path.

    Args:
        path (Optional[Path]): User-specified file or None for the default results directory
        default_name (str): file name used under the default directory

    Returns:
        Path: absolute path whose parent directory exists

    Raises:
        ValidationError: If the parent directory cannot be created or written
    """
    from reachtamp.config import OUTPUT_DIR

    file_path = (Path(OUTPUT_DIR) / default_name if path is None else Path(path)).resolve()
    try:
        file_path.parent.mkdir(parents=True, exist_ok=True)
        test_file = file_path.parent / ".write_test"
        test_file.touch()
        test_file.unlink()
    except OSError as e:
        logger.error(f"Output path validation failed: {e}")
        raise ValidationError(f"Directory not writable: {file_path.parent}") from e
    return file_path
