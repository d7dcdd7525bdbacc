"""Per-hyper-parameter cyclical controllers.

Each controller maps the generic cycle coefficient onto one training
setting with the correct easy/hard orientation:

* weight decay, momentum, softmax temperature and the gradient-clipping
  threshold start at their *minimum* (easy) and peak at their maximum;
* batch size starts at its *maximum* (large batches are easy) and dips
  to its minimum.

``ControllerRanges`` holds the base values plus the optional cyclical
range for each setting; ``resolve_epoch`` turns that into the concrete
``ControllerSet`` for one epoch.  Resolution is pure: a ranges value is
immutable and shareable across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .schedule import blend_values, cycle_coefficient

# empirically useful band for lr*wd / (bs*(1-m)); one decade either side
RATIO_TARGET = 1e-6
RATIO_LO = 1e-7
RATIO_HI = 1e-5

CLIP_MODES = ("value", "norm")
LR_SCHEDULES = ("constant", "cosine")


def resolve_weight_decay(wd_min: float, wd_max: float, coefficient: float) -> float:
    """Weight decay for one epoch; the easy endpoint is the small value."""
    if wd_min < 0 or wd_min > wd_max:
        raise ValueError(f"need 0 <= wd_min <= wd_max, got [{wd_min}, {wd_max}]")
    return blend_values(wd_min, wd_max, coefficient)


def resolve_temperature(t_min: float, t_max: float, coefficient: float) -> float:
    """Softmax temperature for one epoch; low (confident) is easy."""
    if t_min <= 0 or t_min > t_max:
        raise ValueError(f"need 0 < t_min <= t_max, got [{t_min}, {t_max}]")
    return blend_values(t_min, t_max, coefficient)


def resolve_clip(gc_min: float, gc_max: float, coefficient: float) -> float:
    """Gradient-clip threshold for one epoch; the tight threshold is easy."""
    if gc_min <= 0 or gc_min > gc_max:
        raise ValueError(f"need 0 < clip_min <= clip_max, got [{gc_min}, {gc_max}]")
    return blend_values(gc_min, gc_max, coefficient)


def resolve_momentum(m_min: float, m_max: float, coefficient: float) -> float:
    """Momentum for one epoch; low momentum is easy."""
    if m_min < 0 or m_min > m_max or m_max >= 1:
        raise ValueError(f"need 0 <= m_min <= m_max < 1, got [{m_min}, {m_max}]")
    return blend_values(m_min, m_max, coefficient)


def resolve_batch_size(bs_min: int, bs_max: int, coefficient: float) -> int:
    """Batch size for one epoch; the LARGE batch is the easy endpoint.

    The blend is rounded half-up and clamped to the configured range so
    the result is a valid batch size and monotone along each segment.
    """
    if bs_min < 1 or bs_min > bs_max:
        raise ValueError(f"need 1 <= bs_min <= bs_max, got [{bs_min}, {bs_max}]")
    raw = blend_values(float(bs_max), float(bs_min), coefficient)
    return min(bs_max, max(bs_min, int(math.floor(raw + 0.5))))


def hp_ratio(lr: float, wd: float, bs: int, momentum: float) -> float:
    """The lr*wd / (bs*(1-momentum)) balance of a configuration."""
    if bs < 1:
        raise ValueError(f"batch size must be >= 1, got {bs}")
    if momentum >= 1:
        raise ValueError(f"momentum must be < 1, got {momentum}")
    return (lr * wd) / (bs * (1.0 - momentum))


def ratio_in_range(ratio: float) -> bool:
    """Whether a ratio sits within one decade of the 1e-6 rule of thumb."""
    return RATIO_LO <= ratio <= RATIO_HI


def lr_at_epoch(
    base_lr: float,
    epoch: float,
    total_epochs: int,
    schedule: str = "constant",
    warmup_epochs: int = 0,
    warmup_lr: float = 0.0,
) -> float:
    """Baseline learning rate policy: optional linear warmup, then either a
    constant rate or a half-cosine decay toward zero.

    This is deliberately plain (cyclical ranges apply to the other
    hyper-parameters, not the learning rate); epochs past ``total_epochs``
    hold the final value.
    """
    if schedule not in LR_SCHEDULES:
        raise ValueError(f"unknown lr schedule {schedule!r}")
    if warmup_epochs > 0 and epoch < warmup_epochs:
        return warmup_lr + (base_lr - warmup_lr) * epoch / warmup_epochs
    if schedule == "constant":
        return base_lr
    span = max(1, total_epochs - warmup_epochs)
    t = min(1.0, (epoch - warmup_epochs) / span)
    return 0.5 * base_lr * (1.0 + math.cos(math.pi * t))


@dataclass(frozen=True)
class CyclicalRange:
    """A (min, max, cyclical_factor) triple for one controller."""

    lo: float
    hi: float
    factor: float = 2.0

    def __post_init__(self):
        if self.factor < 1.0:
            raise ValueError(f"cyclical_factor must be >= 1, got {self.factor}")


@dataclass(frozen=True)
class ControllerSet:
    """Fully resolved hyper-parameters for one epoch."""

    lr: float
    weight_decay: float
    momentum: float
    batch_size: int
    temperature: float
    clip_threshold: float | None
    clip_mode: str


@dataclass(frozen=True)
class ControllerRanges:
    """Base hyper-parameters plus optional cyclical ranges.

    An unset range leaves the corresponding setting at its constant base
    value; ``clip=None`` with no clip range disables clipping entirely.
    Each range carries its own cyclical factor.
    """

    total_epochs: int
    lr: float
    weight_decay: float = 0.0
    momentum: float = 0.9
    batch_size: int = 64
    temperature: float = 1.0
    clip: float | None = None
    clip_mode: str = "value"
    lr_schedule: str = "constant"
    warmup_epochs: int = 0
    warmup_lr: float = 0.0
    wd_range: CyclicalRange | None = None
    t_range: CyclicalRange | None = None
    clip_range: CyclicalRange | None = None
    bs_range: CyclicalRange | None = None
    m_range: CyclicalRange | None = None

    def __post_init__(self):
        if self.total_epochs < 1:
            raise ValueError(f"total_epochs must be >= 1, got {self.total_epochs}")
        if self.lr <= 0:
            raise ValueError(f"lr must be > 0, got {self.lr}")
        if self.weight_decay < 0:
            raise ValueError(f"weight_decay must be >= 0, got {self.weight_decay}")
        if not 0 <= self.momentum < 1:
            raise ValueError(f"momentum must be in [0, 1), got {self.momentum}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.temperature <= 0:
            raise ValueError(f"temperature must be > 0, got {self.temperature}")
        if self.clip is not None and self.clip <= 0:
            raise ValueError(f"clip must be > 0, got {self.clip}")
        if self.clip_mode not in CLIP_MODES:
            raise ValueError(f"clip_mode must be one of {CLIP_MODES}")
        if self.lr_schedule not in LR_SCHEDULES:
            raise ValueError(f"lr_schedule must be one of {LR_SCHEDULES}")
        if self.warmup_epochs < 0:
            raise ValueError("warmup_epochs must be >= 0")
        # run every enabled resolver once so bad ranges fail at construction
        self.resolve(0)

    def resolve(self, epoch: float) -> ControllerSet:
        """Resolve every controller for one epoch.

        Disabled controllers resolve to their constant base value; enabled
        ones evaluate their own cyclical factor against the shared epoch
        count.  Resolvers are independent: none reads another's range.
        """
        def coeff(rng: CyclicalRange) -> float:
            return cycle_coefficient(epoch, self.total_epochs, rng.factor)

        wd = self.weight_decay
        if self.wd_range is not None:
            r = self.wd_range
            wd = resolve_weight_decay(r.lo, r.hi, coeff(r))
        temp = self.temperature
        if self.t_range is not None:
            r = self.t_range
            temp = resolve_temperature(r.lo, r.hi, coeff(r))
        clip = self.clip
        if self.clip_range is not None:
            r = self.clip_range
            clip = resolve_clip(r.lo, r.hi, coeff(r))
        bs = self.batch_size
        if self.bs_range is not None:
            r = self.bs_range
            bs = resolve_batch_size(int(r.lo), int(r.hi), coeff(r))
        momentum = self.momentum
        if self.m_range is not None:
            r = self.m_range
            momentum = resolve_momentum(r.lo, r.hi, coeff(r))
        lr = lr_at_epoch(self.lr, epoch, self.total_epochs, self.lr_schedule,
                         self.warmup_epochs, self.warmup_lr)
        return ControllerSet(lr=lr, weight_decay=wd, momentum=momentum,
                             batch_size=bs, temperature=temp,
                             clip_threshold=clip, clip_mode=self.clip_mode)


def resolve_epoch(ranges: ControllerRanges, epoch: float) -> ControllerSet:
    """Functional alias for :meth:`ControllerRanges.resolve`."""
    return ranges.resolve(epoch)
