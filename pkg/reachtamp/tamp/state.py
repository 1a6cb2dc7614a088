from dataclasses import dataclass
from typing import Tuple

from reachtamp.symbolic.model import AbstractState
from reachtamp.tamp.modes import Mode
from reachtamp.utils.exceptions import ConsistencyError


@dataclass(frozen=True)
class HybridState:
    """x = (s, sigma, q)."""

    s: AbstractState
    sigma: Mode
    q: Tuple[float, ...]

    @property
    def consistent(self) -> bool:
        return self.s.abstract_attachments == self.sigma.abstract_pairs()

    def check_consistency(self) -> None:
        if not self.consistent:
            only_s = sorted(self.s.abstract_attachments - self.sigma.abstract_pairs())
            only_sigma = sorted(self.sigma.abstract_pairs() - self.s.abstract_attachments)
            raise ConsistencyError(
                f"Abstract attachments disagree with the mode: state-only {only_s}, mode-only {only_sigma}"
            )
