from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Any, Literal

VIOLATION_TOL = 1e-9


@dataclass(frozen=True)
class BoundReport:
    """Observed value checked against a criterion bound.

    ``sense="lower"`` means states obeying the hypothesis satisfy
    ``value >= bound``; ``"upper"`` means ``value <= bound``. ``violated``
    flags incompatibility with the hypothesis (e.g. "width <= 2").
    """

    criterion: str
    value: float
    bound: float
    sense: Literal["lower", "upper"]
    params: dict[str, Any] = field(default_factory=dict)
    tol: float = VIOLATION_TOL

    @property
    def margin(self) -> float:
        """Signed slack; negative beyond ``-tol`` means violated."""
        return self.value - self.bound if self.sense == "lower" else self.bound - self.value

    @property
    def violated(self) -> bool:
        return self.margin < -self.tol

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        d.update(margin=self.margin, violated=self.violated)
        return d
