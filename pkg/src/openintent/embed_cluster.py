"""Embedding-space clustering baseline and cluster-count estimation.

Implements k-means with k-means++ seeding on top of the deterministic
RNG so the baseline comparison reproduces bit-for-bit across platforms,
plus the drop-small-clusters estimator: overcluster with K' centers and
count the clusters whose size clears a fraction of the uniform share.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .errors import ConfigError, CorpusFormatError
from .rng import SplitMix64


@dataclass(frozen=True)
class EmbeddingSet:
    ids: tuple[int, ...]
    vectors: np.ndarray  # (n, d) float64
    source_tag: str = ""

    def __post_init__(self):
        if self.vectors.ndim != 2:
            raise ConfigError(f"vectors must be 2-dimensional, got shape {self.vectors.shape}")
        if len(self.ids) != self.vectors.shape[0]:
            raise ConfigError(
                f"{len(self.ids)} ids for {self.vectors.shape[0]} vectors"
            )
        if not np.isfinite(self.vectors).all():
            raise ConfigError("embedding vectors contain NaN or infinity")

    def __len__(self) -> int:
        return len(self.ids)


def load_embeddings(path: Path, source_tag: str = "") -> EmbeddingSet:
    """JSONL, one {"id": int, "vector": [float,...]} per line."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"embedding file not found: {path}")
    ids: list[int] = []
    rows: list[list[float]] = []
    dim: Optional[int] = None
    with path.open("r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
                vector = [float(x) for x in record["vector"]]
                ids.append(int(record["id"]))
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise CorpusFormatError(f"{path}:{lineno}: bad embedding record: {exc}")
            if dim is None:
                dim = len(vector)
                if dim == 0:
                    raise CorpusFormatError(f"{path}:{lineno}: empty vector")
            elif len(vector) != dim:
                raise CorpusFormatError(
                    f"{path}:{lineno}: dimension {len(vector)} != {dim}"
                )
            rows.append(vector)
    if not rows:
        raise CorpusFormatError(f"{path}: no embedding records")
    vectors = np.asarray(rows, dtype=np.float64)
    if not np.isfinite(vectors).all():
        raise CorpusFormatError(f"{path}: non-finite embedding values")
    return EmbeddingSet(ids=tuple(ids), vectors=vectors, source_tag=source_tag)


@dataclass(frozen=True)
class KMeansResult:
    labels: tuple[int, ...]  # cluster index per row, 0-based
    centers: np.ndarray  # (k, d)
    inertia: float
    iterations: int

    def cluster_sizes(self) -> list[int]:
        sizes = [0] * self.centers.shape[0]
        for label in self.labels:
            sizes[label] += 1
        return sizes


def _sq_dists(vectors: np.ndarray, center: np.ndarray) -> np.ndarray:
    diff = vectors - center
    return np.einsum("ij,ij->i", diff, diff)


def _plusplus_init(vectors: np.ndarray, k: int, rng: SplitMix64) -> np.ndarray:
    n = vectors.shape[0]
    centers = np.empty((k, vectors.shape[1]), dtype=np.float64)
    centers[0] = vectors[rng.randrange(n)]
    best = _sq_dists(vectors, centers[0])
    for j in range(1, k):
        total = float(best.sum())
        if total <= 0.0:
            # all points coincide with chosen centers; fall back to uniform
            centers[j] = vectors[rng.randrange(n)]
            continue
        # D^2 sampling via the cumulative mass and one uniform draw
        target = rng.uniform() * total
        cumulative = np.cumsum(best)
        index = int(np.searchsorted(cumulative, target, side="right"))
        index = min(index, n - 1)
        centers[j] = vectors[index]
        best = np.minimum(best, _sq_dists(vectors, centers[j]))
    return centers


def kmeans(
    embeddings: EmbeddingSet,
    k: int,
    seed: int = 0,
    max_iters: int = 300,
) -> KMeansResult:
    """Lloyd iterations to a fixpoint from a k-means++ start.

    Ties in assignment go to the lowest cluster index; a cluster left
    empty after an update is reseeded from the point farthest from its
    own center.
    """
    vectors = embeddings.vectors
    n = vectors.shape[0]
    if k < 1:
        raise ConfigError(f"k must be >= 1, got {k}")
    if k > n:
        raise ConfigError(f"k={k} exceeds the {n} available points")
    if max_iters < 1:
        raise ConfigError(f"max_iters must be >= 1, got {max_iters}")
    rng = SplitMix64(seed).fork("kmeans")
    centers = _plusplus_init(vectors, k, rng)
    labels = np.zeros(n, dtype=np.int64)
    iterations = 0
    for iterations in range(1, max_iters + 1):
        # argmin breaks ties toward the lowest index by construction
        distances = np.stack([_sq_dists(vectors, c) for c in centers], axis=1)
        new_labels = distances.argmin(axis=1)
        for j in range(k):
            members = vectors[new_labels == j]
            if len(members):
                centers[j] = members.mean(axis=0)
            else:
                own = distances[:, j]
                farthest = int(own.argmax())
                centers[j] = vectors[farthest]
                new_labels[farthest] = j
        if iterations > 1 and np.array_equal(new_labels, labels):
            labels = new_labels
            break
        labels = new_labels
    final_d = np.stack([_sq_dists(vectors, c) for c in centers], axis=1)
    inertia = float(final_d[np.arange(n), labels].sum())
    return KMeansResult(
        labels=tuple(int(x) for x in labels),
        centers=centers,
        inertia=inertia,
        iterations=iterations,
    )


@dataclass(frozen=True)
class KEstimate:
    k_predicted: int
    k_prime: int
    cluster_sizes: tuple[int, ...]
    size_floor: float


def estimate_k(
    embeddings: EmbeddingSet,
    k_prime: Optional[int] = None,
    reference_k: Optional[int] = None,
    multiplier: Optional[float] = None,
    size_threshold_ratio: float = 0.9,
    seed: int = 0,
) -> KEstimate:
    """Overcluster with K' centers, keep clusters above the size floor.

    The floor is ratio * (n / K'), the fraction of the uniform per-cluster
    share a real intent cluster should retain. K' is given directly or as
    multiplier * reference_k.
    """
    n = len(embeddings)
    if k_prime is None:
        if reference_k is None or multiplier is None:
            raise ConfigError("provide k_prime, or reference_k with multiplier")
        if multiplier < 1:
            raise ConfigError(f"multiplier must be >= 1, got {multiplier}")
        k_prime = int(round(multiplier * reference_k))
    if k_prime < 1:
        raise ConfigError(f"k_prime must be >= 1, got {k_prime}")
    if k_prime > n:
        raise ConfigError(f"k_prime={k_prime} exceeds the {n} available points")
    if not (0.0 < size_threshold_ratio <= 1.0):
        raise ConfigError(
            f"size_threshold_ratio must be in (0, 1], got {size_threshold_ratio}"
        )
    result = kmeans(embeddings, k_prime, seed=seed)
    sizes = result.cluster_sizes()
    floor = size_threshold_ratio * (n / k_prime)
    predicted = sum(1 for size in sizes if size >= floor)
    return KEstimate(
        k_predicted=predicted,
        k_prime=k_prime,
        cluster_sizes=tuple(sizes),
        size_floor=floor,
    )


def make_blobs(
    centers: Sequence[Sequence[float]],
    points_per_blob: int,
    sigma: float,
    seed: int = 0,
) -> tuple[EmbeddingSet, list[int]]:
    """Gaussian blobs for offline baseline checks; returns (set, gold labels)."""
    if points_per_blob < 1:
        raise ConfigError(f"points_per_blob must be >= 1, got {points_per_blob}")
    rng = SplitMix64(seed).fork("blobs")
    rows: list[list[float]] = []
    gold: list[int] = []
    for blob_index, center in enumerate(centers):
        for _ in range(points_per_blob):
            # Box-Muller pairs from the deterministic uniform stream
            point = []
            for coordinate in center:
                u1 = max(rng.uniform(), 1e-12)
                u2 = rng.uniform()
                z = float(np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2))
                point.append(coordinate + sigma * z)
            rows.append(point)
            gold.append(blob_index)
    vectors = np.asarray(rows, dtype=np.float64)
    ids = tuple(range(1, len(rows) + 1))
    return EmbeddingSet(ids=ids, vectors=vectors, source_tag="synthetic-blobs"), gold
