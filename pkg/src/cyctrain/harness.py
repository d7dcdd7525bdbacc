"""Experiment harness: reproducible runs, paired comparisons, factor sweeps.

A run is a pure function of (config, seed).  The seed feeds disjoint
streams for dataset generation, weight init, per-epoch shuffles and
augmentation noise, so two configs that differ only in their cyclical
ranges consume identical randomness: paired-seed comparisons are
low-variance by construction.

Hyper-parameters are re-resolved at the start of every epoch.  The
softmax temperature applies to the training loss only; evaluation is
plain argmax accuracy (which no temperature can change).  Label noise is
applied to the training split only, so test accuracy measures fit to the
clean geometry.
"""

from __future__ import annotations

import dataclasses
import json
import time
from dataclasses import dataclass, field

import numpy as np

from . import data as datagen
from .controllers import ControllerRanges, ControllerSet, CyclicalRange, hp_ratio, ratio_in_range
from .nn import (
    NonFiniteError,
    SgdMomentum,
    accuracy,
    clip_gradients,
    init_net,
    loss_and_grads,
)
from .schedule import blend_values, cycle_coefficient

RUN_CSV_FIELDS = ("epoch", "lr", "wd", "momentum", "batch_size", "temperature",
                  "clip", "train_loss", "masked", "test_acc", "ms")


class TrainingAborted(RuntimeError):
    """A run hit non-finite state; carries the epoch and resolved settings."""

    def __init__(self, message, epoch=None, resolved=None):
        super().__init__(message)
        self.epoch = epoch
        self.resolved = resolved


class ConfigError(ValueError):
    """Invalid experiment configuration."""


# controller range fields come in (min, max, factor) triples
_RANGE_GROUPS = (
    ("wd_min", "wd_max", "wd_fc"),
    ("T_min", "T_max", "T_fc"),
    ("clip_min", "clip_max", "clip_fc"),
    ("bs_min", "bs_max", "bs_fc"),
    ("m_min", "m_max", "m_fc"),
    ("aug_min", "aug_max", "aug_fc"),
)

_DATASET_FIELDS = ("classes", "dims", "train_samples", "test_samples",
                   "spread", "label_noise")


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a run needs; field names double as CLI flag/config keys."""

    # dataset
    classes: int = 4
    dims: int = 16
    train_samples: int = 4000
    test_samples: int = 2000
    spread: float = 0.35
    label_noise: float = 0.10
    # architecture
    hidden: tuple[int, ...] = (32, 32)
    # training loop
    epochs: int = 60
    cooldown_epochs: int = 0
    # base hyper-parameters
    lr: float = 0.1
    weight_decay: float = 5e-4
    momentum: float = 0.9
    batch_size: int = 64
    temperature: float = 1.0
    clip: float | None = None
    clip_mode: str = "value"
    mask_losses: bool = False
    # learning-rate policy
    sched: str = "cosine"
    warmup_epochs: int = 3
    warmup_lr: float = 0.01
    # cyclical ranges; a pair enables the controller, `*_fc` overrides the
    # shared cyclical_factor for that controller only
    cyclical_factor: float = 2.0
    wd_min: float | None = None
    wd_max: float | None = None
    wd_fc: float | None = None
    T_min: float | None = None
    T_max: float | None = None
    T_fc: float | None = None
    clip_min: float | None = None
    clip_max: float | None = None
    clip_fc: float | None = None
    bs_min: int | None = None
    bs_max: int | None = None
    bs_fc: float | None = None
    m_min: float | None = None
    m_max: float | None = None
    m_fc: float | None = None
    aug_min: float | None = None
    aug_max: float | None = None
    aug_fc: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "hidden", tuple(int(h) for h in self.hidden))
        if self.train_samples < self.classes or self.train_samples % self.classes:
            raise ConfigError(
                f"train_samples must be a positive multiple of classes, "
                f"got {self.train_samples} / {self.classes}")
        if self.test_samples < self.classes or self.test_samples % self.classes:
            raise ConfigError(
                f"test_samples must be a positive multiple of classes, "
                f"got {self.test_samples} / {self.classes}")
        if self.epochs < 1:
            raise ConfigError(f"epochs must be >= 1, got {self.epochs}")
        if self.cooldown_epochs < 0:
            raise ConfigError("cooldown_epochs must be >= 0")
        for lo_name, hi_name, _ in _RANGE_GROUPS:
            lo, hi = getattr(self, lo_name), getattr(self, hi_name)
            if (lo is None) != (hi is None):
                raise ConfigError(f"{lo_name} and {hi_name} must be set together")
        if self.bs_max is not None and self.bs_max > self.train_samples:
            raise ConfigError("bs_max cannot exceed train_samples")
        if self.batch_size > self.train_samples:
            raise ConfigError("batch_size cannot exceed train_samples")
        if self.aug_min is not None and not 0 <= self.aug_min <= self.aug_max:
            raise ConfigError("need 0 <= aug_min <= aug_max")
        self.controller_ranges()  # fail fast on bad ranges

    def _factor(self, specific: float | None) -> float:
        return self.cyclical_factor if specific is None else specific

    def _range(self, lo_name: str, hi_name: str, fc_name: str) -> CyclicalRange | None:
        lo = getattr(self, lo_name)
        if lo is None:
            return None
        return CyclicalRange(lo, getattr(self, hi_name),
                             self._factor(getattr(self, fc_name)))

    def controller_ranges(self) -> ControllerRanges:
        return ControllerRanges(
            total_epochs=self.epochs,
            lr=self.lr,
            weight_decay=self.weight_decay,
            momentum=self.momentum,
            batch_size=self.batch_size,
            temperature=self.temperature,
            clip=self.clip,
            clip_mode=self.clip_mode,
            lr_schedule=self.sched,
            warmup_epochs=self.warmup_epochs,
            warmup_lr=self.warmup_lr,
            wd_range=self._range("wd_min", "wd_max", "wd_fc"),
            t_range=self._range("T_min", "T_max", "T_fc"),
            clip_range=self._range("clip_min", "clip_max", "clip_fc"),
            bs_range=self._range("bs_min", "bs_max", "bs_fc"),
            m_range=self._range("m_min", "m_max", "m_fc"),
        )

    def augment_strength(self, epoch: float) -> float:
        if self.aug_min is None:
            return 0.0
        coeff = cycle_coefficient(epoch, self.epochs, self._factor(self.aug_fc))
        return blend_values(self.aug_min, self.aug_max, coeff)

    def layer_sizes(self) -> tuple[int, ...]:
        return (self.dims, *self.hidden, self.classes)

    def advisories(self) -> list[str]:
        """Non-fatal configuration warnings (the ratio rule of thumb)."""
        notes = []
        ratio = hp_ratio(self.lr, self.weight_decay, self.batch_size, self.momentum)
        if not ratio_in_range(ratio):
            notes.append(
                f"lr*wd/(bs*(1-m)) = {ratio:.3g} is outside [1e-07, 1e-05]; "
                "configurations near 1e-06 tend to train best")
        return notes


@dataclass(frozen=True)
class RunRecord:
    """One epoch of a run: resolved hyper-parameters plus outcomes."""

    epoch: int
    lr: float
    wd: float
    momentum: float
    batch_size: int
    temperature: float
    clip: float | None
    train_loss: float
    masked: int
    test_acc: float
    ms: int

    @classmethod
    def from_resolved(cls, epoch: int, hp: ControllerSet, train_loss: float,
                      masked: int, test_acc: float, ms: int) -> "RunRecord":
        return cls(epoch=epoch, lr=hp.lr, wd=hp.weight_decay, momentum=hp.momentum,
                   batch_size=hp.batch_size, temperature=hp.temperature,
                   clip=hp.clip_threshold, train_loss=train_loss, masked=masked,
                   test_acc=test_acc, ms=ms)


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def run_csv_lines(records) -> list[str]:
    lines = [",".join(RUN_CSV_FIELDS)]
    for r in records:
        lines.append(",".join(_csv_cell(getattr(r, f)) for f in RUN_CSV_FIELDS))
    return lines


def write_run_csv(records, path) -> None:
    with open(path, "w") as fh:
        fh.write("\n".join(run_csv_lines(records)) + "\n")


def _epoch_seed(seed: int, epoch: int):
    return np.random.SeedSequence([int(seed), 4, epoch])


def _augment_seed(seed: int, epoch: int, batch_index: int):
    return np.random.SeedSequence([int(seed), 5, epoch, batch_index])


def run_experiment(config: ExperimentConfig, seed: int,
                   collect_timing: bool = True):
    """Train once; returns ``(records, final_test_accuracy)``.

    Deterministic given (config, seed): rerunning yields bit-identical
    records apart from the wall-clock ``ms`` field, and byte-identical
    ones with ``collect_timing=False`` (which logs ms as 0).  Aborts with
    :class:`TrainingAborted` if parameters go non-finite, reporting the
    epoch and the resolved hyper-parameters.
    """
    ranges = config.controller_ranges()
    train = datagen.make_blobs(config.classes, config.train_samples // config.classes,
                               config.dims, config.spread, config.label_noise,
                               seed, split="train")
    test = datagen.make_blobs(config.classes, config.test_samples // config.classes,
                              config.dims, config.spread, 0.0, seed, split="test")
    net = init_net(config.layer_sizes(),
                   np.random.SeedSequence([int(seed), 3]))
    opt = SgdMomentum(net)

    records = []
    total_epochs = config.epochs + config.cooldown_epochs
    for epoch in range(total_epochs):
        hp = ranges.resolve(epoch)
        noise_std = config.augment_strength(epoch)
        mask_threshold = hp.clip_threshold if config.mask_losses else None
        started = time.perf_counter() if collect_timing else 0.0

        loss_sum = 0.0
        active = 0
        masked = 0
        try:
            for b, idx in enumerate(datagen.batches(train, hp.batch_size,
                                                    _epoch_seed(seed, epoch))):
                xb = train.features[idx]
                if noise_std > 0.0:
                    xb = datagen.augment(xb, noise_std, _augment_seed(seed, epoch, b))
                bundle = loss_and_grads(net, xb, train.labels[idx],
                                        temperature=hp.temperature,
                                        mask_threshold=mask_threshold)
                if mask_threshold is None and hp.clip_threshold is not None:
                    clip_gradients(bundle, hp.clip_threshold, hp.clip_mode)
                opt.step(net, bundle, hp.lr, hp.momentum, hp.weight_decay)
                if bundle.mask is not None:
                    loss_sum += float(bundle.losses[bundle.mask].sum())
                else:
                    loss_sum += float(bundle.losses.sum())
                active += bundle.n_active
                masked += len(idx) - bundle.n_active
        except NonFiniteError as exc:
            raise TrainingAborted(
                f"run aborted at epoch {epoch} (seed {seed}): {exc}; resolved {hp}",
                epoch=epoch, resolved=hp) from exc

        elapsed_ms = round((time.perf_counter() - started) * 1000) if collect_timing else 0
        records.append(RunRecord.from_resolved(
            epoch, hp,
            train_loss=loss_sum / active if active else 0.0,
            masked=masked,
            test_acc=accuracy(net, test.features, test.labels),
            ms=elapsed_ms))
    return records, records[-1].test_acc


def _mean_std(values) -> tuple[float, float]:
    arr = np.asarray(values, dtype=np.float64)
    if arr.size == 0:
        return float("nan"), float("nan")
    std = float(arr.std(ddof=1)) if arr.size > 1 else 0.0
    return float(arr.mean()), std


@dataclass
class ArmResult:
    accuracies: list = field(default_factory=list)   # per seed; None if aborted
    failures: list = field(default_factory=list)     # (seed, message)

    @property
    def completed(self) -> list[float]:
        return [a for a in self.accuracies if a is not None]

    def stats(self) -> tuple[float, float]:
        return _mean_std(self.completed)


@dataclass
class ComparisonSummary:
    """Paired-seed comparison of two configurations."""

    seeds: list
    arm_a: ArmResult
    arm_b: ArmResult
    paired_diffs: list    # arm_b - arm_a where both seeds completed
    mean_diff: float

    def to_dict(self, config_a: ExperimentConfig, config_b: ExperimentConfig) -> dict:
        mean_a, std_a = self.arm_a.stats()
        mean_b, std_b = self.arm_b.stats()
        return {
            "seeds": list(self.seeds),
            "config_a": dataclasses.asdict(config_a),
            "config_b": dataclasses.asdict(config_b),
            "arm_a": {"final_accuracies": self.arm_a.accuracies,
                      "mean": mean_a, "std": std_a,
                      "failures": self.arm_a.failures},
            "arm_b": {"final_accuracies": self.arm_b.accuracies,
                      "mean": mean_b, "std": std_b,
                      "failures": self.arm_b.failures},
            "paired_diff": {"values": self.paired_diffs, "mean": self.mean_diff},
        }


def compare(config_a: ExperimentConfig, config_b: ExperimentConfig,
            seeds) -> ComparisonSummary:
    """Run both configs over a shared seed list and summarize.

    Refuses configs that differ in dataset or architecture: the paired
    design only makes sense when both arms see identical data.  An arm
    whose run aborts records the failure for that seed; remaining seeds
    still run.
    """
    seeds = list(seeds)
    if len(seeds) < 2:
        raise ConfigError(f"need at least 2 seeds for a comparison, got {len(seeds)}")
    for name in _DATASET_FIELDS + ("hidden",):
        if getattr(config_a, name) != getattr(config_b, name):
            raise ConfigError(
                f"configs differ in {name}; comparisons require identical "
                "dataset and architecture")

    arms = (ArmResult(), ArmResult())
    for seed in seeds:
        for config, arm in zip((config_a, config_b), arms):
            try:
                _, acc = run_experiment(config, seed)
                arm.accuracies.append(acc)
            except TrainingAborted as exc:
                arm.accuracies.append(None)
                arm.failures.append((seed, str(exc)))
    diffs = [b - a for a, b in zip(arms[0].accuracies, arms[1].accuracies)
             if a is not None and b is not None]
    mean_diff = float(np.mean(diffs)) if diffs else float("nan")
    return ComparisonSummary(seeds=seeds, arm_a=arms[0], arm_b=arms[1],
                             paired_diffs=diffs, mean_diff=mean_diff)


def sweep_fc(config: ExperimentConfig, fc_values, seeds) -> list[dict]:
    """Rerun a config at several cyclical factors over a shared seed list.

    Clears any per-controller factor overrides so the swept value governs
    every enabled controller.  Returns one row per factor with mean/std of
    final accuracy; a row's failure is re-raised tagged with its factor.
    """
    seeds = list(seeds)
    if not seeds:
        raise ConfigError("sweep needs at least one seed")
    rows = []
    for fc in fc_values:
        if fc < 1:
            raise ConfigError(f"cyclical_factor must be >= 1, got {fc}")
        swept = dataclasses.replace(
            config, cyclical_factor=float(fc), wd_fc=None, T_fc=None,
            clip_fc=None, bs_fc=None, m_fc=None, aug_fc=None)
        accs = []
        for seed in seeds:
            try:
                _, acc = run_experiment(swept, seed)
            except TrainingAborted as exc:
                raise TrainingAborted(
                    f"sweep failed at cyclical_factor={fc}: {exc}",
                    epoch=exc.epoch, resolved=exc.resolved) from exc
            accs.append(acc)
        mean, std = _mean_std(accs)
        rows.append({"cyclical_factor": float(fc), "mean_acc": mean,
                     "std_acc": std, "accuracies": accs})
    return rows


def summary_json(summary: ComparisonSummary, config_a: ExperimentConfig,
                 config_b: ExperimentConfig) -> str:
    return json.dumps(summary.to_dict(config_a, config_b), indent=2)


# --- flat key-value config files -------------------------------------------
#
# Keys are exactly the ExperimentConfig field names (and so the CLI flags).
# Values: ints, floats, true/false, or comma-separated ints for `hidden`.

def _format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, tuple):
        return ",".join(str(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def config_to_kv(config: ExperimentConfig) -> str:
    lines = []
    for f in dataclasses.fields(ExperimentConfig):
        value = getattr(config, f.name)
        if value is None:
            continue
        lines.append(f"{f.name} = {_format_value(value)}")
    return "\n".join(lines) + "\n"


_BOOL_WORDS = {"true": True, "false": False, "1": True, "0": False,
               "yes": True, "no": False}

_INT_FIELDS = {"classes", "dims", "train_samples", "test_samples", "epochs",
               "cooldown_epochs", "batch_size", "warmup_epochs", "bs_min", "bs_max"}
_BOOL_FIELDS = {"mask_losses"}
_STR_FIELDS = {"clip_mode", "sched"}


def _parse_value(name: str, raw: str):
    raw = raw.strip()
    if name == "hidden":
        return tuple(int(v) for v in raw.split(",") if v.strip())
    if name in _BOOL_FIELDS:
        try:
            return _BOOL_WORDS[raw.lower()]
        except KeyError:
            raise ConfigError(f"{name} expects true/false, got {raw!r}") from None
    if name in _STR_FIELDS:
        return raw
    try:
        return int(raw) if name in _INT_FIELDS else float(raw)
    except ValueError:
        raise ConfigError(f"could not parse {name} = {raw!r}") from None


def config_from_kv(text: str, base: ExperimentConfig | None = None) -> ExperimentConfig:
    """Parse `key = value` lines into a config; '#' starts a comment."""
    known = {f.name for f in dataclasses.fields(ExperimentConfig)}
    overrides = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, raw = (part.strip() for part in line.split("=", 1))
        if key not in known:
            raise ConfigError(f"line {lineno}: unknown config key {key!r}")
        overrides[key] = _parse_value(key, raw)
    base = base if base is not None else ExperimentConfig()
    return dataclasses.replace(base, **overrides)
