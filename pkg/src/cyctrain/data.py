"""Deterministic synthetic classification datasets.

Class centroids sit on the unit hypersphere and samples are Gaussian
clouds around them, with an optional fraction of labels reassigned to
wrong classes.  Every array is a pure function of (seed, parameters), and
the train/test splits draw from disjoint seeded streams, so regeneration
is bit-identical and the splits never share samples.

Each sample carries a difficulty score: the negative margin between its
distance to the nearest wrong centroid and to its own.  Noisy-labeled
samples land far from their assigned centroid and score hardest.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_SPLIT_STREAM = {"train": 1, "test": 2}


@dataclass(frozen=True)
class SyntheticDataset:
    features: np.ndarray
    labels: np.ndarray
    difficulty: np.ndarray
    centroids: np.ndarray
    seed: int
    split: str

    def __len__(self) -> int:
        return self.features.shape[0]

    @property
    def dims(self) -> int:
        return self.features.shape[1]

    @property
    def class_count(self) -> int:
        return self.centroids.shape[0]


def difficulty_margins(features, labels, centroids) -> np.ndarray:
    """Negative margin to the nearest wrong centroid, per sample.

    margin = dist(nearest wrong centroid) - dist(own centroid); higher
    difficulty (= -margin) means harder.  Invariant under any rotation
    applied to both features and centroids.
    """
    dists = np.linalg.norm(features[:, None, :] - centroids[None, :, :], axis=2)
    rows = np.arange(len(labels))
    own = dists[rows, labels]
    wrong = dists.copy()
    wrong[rows, labels] = np.inf
    return -(wrong.min(axis=1) - own)


def make_blobs(class_count: int, samples_per_class: int, dims: int,
               spread: float, label_noise_fraction: float, seed: int,
               split: str = "train") -> SyntheticDataset:
    """Generate one split of a Gaussian-blob classification dataset.

    Centroids depend only on (seed, class_count, dims), so the train and
    test splits of one seed share geometry while drawing disjoint sample
    noise.  Exactly ``floor(label_noise_fraction * n)`` labels are
    reassigned, each to a uniformly random wrong class.
    """
    if class_count < 2:
        raise ValueError(f"class_count must be >= 2, got {class_count}")
    if dims < 2:
        raise ValueError(f"dims must be >= 2, got {dims}")
    if samples_per_class < 1:
        raise ValueError(f"samples_per_class must be >= 1, got {samples_per_class}")
    if spread < 0:
        raise ValueError(f"spread must be >= 0, got {spread}")
    if not 0.0 <= label_noise_fraction < 0.5:
        raise ValueError(
            f"label_noise_fraction must be in [0, 0.5), got {label_noise_fraction}")
    if split not in _SPLIT_STREAM:
        raise ValueError(f"split must be one of {tuple(_SPLIT_STREAM)}, got {split!r}")

    cen_rng = np.random.default_rng(np.random.SeedSequence([int(seed), 0]))
    directions = cen_rng.normal(size=(class_count, dims))
    centroids = directions / np.linalg.norm(directions, axis=1, keepdims=True)

    rng = np.random.default_rng(np.random.SeedSequence([int(seed), _SPLIT_STREAM[split]]))
    n = class_count * samples_per_class
    labels = np.repeat(np.arange(class_count, dtype=np.int64), samples_per_class)
    features = centroids[labels] + rng.normal(0.0, spread, size=(n, dims)) \
        if spread > 0 else centroids[labels].copy()

    n_noisy = int(label_noise_fraction * n)
    if n_noisy:
        flip = rng.choice(n, size=n_noisy, replace=False)
        offsets = rng.integers(1, class_count, size=n_noisy)
        labels[flip] = (labels[flip] + offsets) % class_count

    return SyntheticDataset(
        features=features,
        labels=labels,
        difficulty=difficulty_margins(features, labels, centroids),
        centroids=centroids,
        seed=int(seed),
        split=split,
    )


def batches(dataset, batch_size: int, epoch_seed) -> list[np.ndarray]:
    """Seeded shuffle of the dataset, partitioned into index batches.

    The permutation depends only on ``epoch_seed``, so the batch size can
    change across epochs without disturbing the shuffle stream.  The last
    batch may be short; together the batches partition the dataset.
    """
    if batch_size < 1:
        raise ValueError(f"batch_size must be >= 1, got {batch_size}")
    n = len(dataset)
    perm = np.random.default_rng(epoch_seed).permutation(n)
    return [perm[i:i + batch_size] for i in range(0, n, batch_size)]


def augment(features: np.ndarray, noise_std: float, seed) -> np.ndarray:
    """Add seeded Gaussian feature noise; strength zero is the identity."""
    if not np.isfinite(noise_std) or noise_std < 0:
        raise ValueError(f"noise_std must be finite and >= 0, got {noise_std}")
    if noise_std == 0.0:
        return features
    rng = np.random.default_rng(seed)
    return features + rng.normal(0.0, noise_std, size=features.shape)


def save_csv(dataset: SyntheticDataset, path) -> None:
    """Write ``f0..f{D-1},label`` rows; floats use round-trip repr."""
    with open(path, "w") as fh:
        cols = [f"f{i}" for i in range(dataset.dims)] + ["label"]
        fh.write(",".join(cols) + "\n")
        for row, label in zip(dataset.features, dataset.labels):
            fh.write(",".join(repr(float(v)) for v in row) + f",{label}\n")


def load_csv(path) -> tuple[np.ndarray, np.ndarray]:
    """Read back a dataset CSV as (features, labels)."""
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        if header[-1] != "label" or not header[0].startswith("f"):
            raise ValueError(f"unexpected dataset CSV header: {header}")
        feats, labels = [], []
        for line in fh:
            parts = line.rstrip("\n").split(",")
            feats.append([float(v) for v in parts[:-1]])
            labels.append(int(parts[-1]))
    return np.asarray(feats, dtype=np.float64), np.asarray(labels, dtype=np.int64)
