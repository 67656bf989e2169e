"""Classification verdicts shared by the Wronskian and sweep classifiers."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np


class Classification(enum.Enum):
    REGULAR = "regular"
    VIRTUAL = "virtual"
    INCONCLUSIVE = "inconclusive"


@dataclass
class ThresholdReport:
    """Outcome of a threshold classification.

    `alpha` is the fitted divergence exponent of resolvent norms (None for
    classifiers that do not sweep), `divergence` distinguishes power-law from
    logarithmic growth, and `norms` keeps the raw (radius, norm) samples.
    Virtual verdicts carry the detected rank and sup-normalized states when
    the search resolved them.
    """

    classification: Classification
    rank: int | None = None
    states: list[np.ndarray] | None = None
    alpha: float | None = None
    alpha_r2: float | None = None
    divergence: str | None = None
    norms: list[tuple[float, float]] | None = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def is_virtual(self) -> bool:
        return self.classification is Classification.VIRTUAL

    def verdict_line(self) -> str:
        if self.classification is Classification.VIRTUAL:
            tag = "log" if self.divergence == "log" else f"alpha~{self.alpha:.3g}" if self.alpha is not None else "rank>=1"
            return f"Virtual ({tag})"
        if self.classification is Classification.REGULAR:
            return "Regular" + (f" (alpha~{self.alpha:.3g})" if self.alpha is not None else "")
        return "Inconclusive"
