"""Per-trial outcome record shared by all runners."""
from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class RunRecord:
    """Outcome of one trial.

    `answer` is an arm index for finite instances and a unit direction (list
    of floats) on the sphere. `correct` is exact best-arm recovery for finite
    instances and epsilon-optimality on the sphere; it is only meaningful when
    the run is complete. `support_size` counts the arms carrying non-negligible
    mass in the final tracked allocation.
    """

    algorithm: str
    instance: str
    seed: int
    tau: int
    answer: object
    correct: bool
    support_size: int
    wall_time_s: float = 0.0
    incomplete: bool = False

    def aslist(self) -> list:
        return [
            self.algorithm,
            self.instance,
            self.seed,
            self.tau,
            self.answer if not isinstance(self.answer, list) else [float(x) for x in self.answer],
            self.correct,
            self.support_size,
            self.wall_time_s,
            self.incomplete,
        ]
