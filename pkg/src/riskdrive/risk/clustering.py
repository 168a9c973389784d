"""K-means bucketing of risk parameters into four behavior categories."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

CLUSTER_LABELS = ("very conservative", "conservative", "aggressive", "very aggressive")
N_CLUSTERS = 4


@dataclass(frozen=True)
class RiskClusters:
    """Centroids sorted by descending theta; label order follows centroids."""

    centroids: tuple[float, ...]
    labels: tuple[str, ...]
    assignments: tuple[int, ...]  # cluster index per input point
    inertia: float

    def label_of(self, theta: float) -> str:
        best = min(range(len(self.centroids)), key=lambda j: (theta - self.centroids[j]) ** 2)
        return self.labels[best]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["cluster", "label", "centroid_theta", "size"])
        sizes = [0] * len(self.centroids)
        for a in self.assignments:
            sizes[a] += 1
        for j, (c, lab) in enumerate(zip(self.centroids, self.labels)):
            writer.writerow([j, lab, repr(c), sizes[j]])
        return buf.getvalue()


def _kmeans_once(values: np.ndarray, k: int, rng: np.random.Generator, iters: int = 300):
    # k-means++ seeding
    centroids = [values[rng.integers(values.size)]]
    while len(centroids) < k:
        d2 = np.min([(values - c) ** 2 for c in centroids], axis=0)
        total = d2.sum()
        if total == 0:
            centroids.append(values[rng.integers(values.size)])
            continue
        centroids.append(values[rng.choice(values.size, p=d2 / total)])
    centroids = np.array(centroids)
    assign = np.zeros(values.size, dtype=int)
    for _ in range(iters):
        dists = (values[:, None] - centroids[None, :]) ** 2
        new_assign = dists.argmin(axis=1)
        for j in range(k):
            members = values[new_assign == j]
            if members.size:
                centroids[j] = members.mean()
        if np.array_equal(new_assign, assign):
            break
        assign = new_assign
    inertia = float(((values - centroids[assign]) ** 2).sum())
    return centroids, assign, inertia


def cluster(thetas, seed: int = 0, n_restarts: int = 10) -> RiskClusters:
    """Lloyd's algorithm with k-means++ seeding, best of ``n_restarts``.

    Clusters are relabeled by descending centroid theta, so "very
    conservative" always names the most risk-averse bucket.
    """
    values = np.asarray(thetas, dtype=float).ravel()
    if np.unique(values).size < N_CLUSTERS:
        raise ValueError(f"need at least {N_CLUSTERS} distinct risk values")
    rng = np.random.default_rng(seed)
    best = None
    for _ in range(n_restarts):
        centroids, assign, inertia = _kmeans_once(values, N_CLUSTERS, rng)
        if best is None or inertia < best[2]:
            best = (centroids, assign, inertia)
    centroids, assign, inertia = best
    order = np.argsort(-centroids)  # descending theta: most averse first
    remap = np.empty(N_CLUSTERS, dtype=int)
    remap[order] = np.arange(N_CLUSTERS)
    return RiskClusters(
        centroids=tuple(float(centroids[j]) for j in order),
        labels=CLUSTER_LABELS,
        assignments=tuple(int(remap[a]) for a in assign),
        inertia=inertia,
    )
