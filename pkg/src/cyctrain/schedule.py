"""Cyclical value schedules for training hyper-parameters.

A schedule is defined by two endpoints and a shape factor.  Training starts
at the "easy" endpoint, moves linearly toward the "hard" endpoint and (for
factors above 1) returns to the easy endpoint by the final epoch:

* ``cyclical_factor = 1`` -- monotone ramp from easy to hard.
* ``cyclical_factor = 2`` -- symmetric triangle, hard endpoint mid-training.
* ``cyclical_factor = 4`` -- hard endpoint a quarter of the way through.

Usage::

    sched = CyclicalSchedule(p_easy=1e-4, p_hard=1e-3, cyclical_factor=2,
                             total_epochs=60)
    wd = sched.value(epoch)

All arithmetic is double precision.  Functions here are pure and keep no
state, so they are safe to call from any thread.
"""

from __future__ import annotations

from dataclasses import dataclass


def cycle_coefficient(epoch: float, total_epochs: int, factor: float) -> float:
    """Return the cycle coefficient in [0, 1] for one training epoch.

    The coefficient is 1 at the start of training (fully "easy"), falls
    linearly to 0 (fully "hard") at epoch ``total_epochs / factor``, then
    rises linearly back to 1 at the final epoch.  The normalization divides
    by ``total_epochs - 1`` so both endpoints are attained exactly.

    ``epoch`` is normally an integer index but may be fractional for
    per-iteration stepping.  Epochs at or beyond ``total_epochs`` (cooldown
    epochs) are clamped to the final scheduled epoch.
    """
    if total_epochs < 1:
        raise ValueError(f"total_epochs must be >= 1, got {total_epochs}")
    if factor < 1.0:
        raise ValueError(f"cyclical_factor must be >= 1, got {factor}")
    if epoch < 0:
        raise ValueError(f"epoch must be >= 0, got {epoch}")
    if total_epochs == 1:
        return 1.0
    last = total_epochs - 1
    if epoch > last:
        epoch = float(last)
    progress = factor * epoch
    if progress < total_epochs:
        coeff = 1.0 - progress / last
    elif factor == 1.0:
        coeff = 0.0
    else:
        coeff = (progress / last - 1.0) / (factor - 1.0)
    if coeff < 0.0:
        return 0.0
    if coeff > 1.0:
        return 1.0
    return coeff


def blend_values(p_easy: float, p_hard: float, coefficient: float) -> float:
    """Linearly blend two endpoint values by a cycle coefficient.

    A coefficient of 1 returns ``p_easy`` and 0 returns ``p_hard``, both
    exactly.  Equal endpoints are returned unchanged so that a degenerate
    range is bit-identical to a constant setting.
    """
    if not 0.0 <= coefficient <= 1.0:
        raise ValueError(f"coefficient must be in [0, 1], got {coefficient}")
    if p_easy == p_hard:
        return p_easy
    return coefficient * p_easy + (1.0 - coefficient) * p_hard


@dataclass(frozen=True)
class CyclicalSchedule:
    """One cyclical trajectory for a scalar training setting.

    Attributes:
        p_easy: value used when training is easiest (start and, for
            factors above 1, end of training).
        p_hard: value used at the hardest point of training.
        cyclical_factor: cycle shape; must be >= 1 (smaller values would
            never reach ``p_hard``).
        total_epochs: length of the schedule in epochs.
    """

    p_easy: float
    p_hard: float
    cyclical_factor: float
    total_epochs: int

    def __post_init__(self):
        if self.cyclical_factor < 1.0:
            raise ValueError(
                f"cyclical_factor must be >= 1, got {self.cyclical_factor}")
        if self.total_epochs < 1:
            raise ValueError(
                f"total_epochs must be >= 1, got {self.total_epochs}")

    def coefficient(self, epoch: float) -> float:
        return cycle_coefficient(epoch, self.total_epochs, self.cyclical_factor)

    def value(self, epoch: float) -> float:
        return blend_values(self.p_easy, self.p_hard, self.coefficient(epoch))


def blend(schedule: CyclicalSchedule, coefficient: float) -> float:
    """Evaluate a schedule's endpoint blend at an explicit coefficient."""
    return blend_values(schedule.p_easy, schedule.p_hard, coefficient)


def schedule_trace(schedule: CyclicalSchedule) -> list[tuple[int, float]]:
    """Evaluate a schedule at every epoch.

    Returns a list of ``(epoch, value)`` pairs of length ``total_epochs``.
    The trace is piecewise linear with at most one interior extremum, at
    the epoch where the cycle turns around.
    """
    return [(e, schedule.value(e)) for e in range(schedule.total_epochs)]
