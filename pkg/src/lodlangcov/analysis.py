"""Clustering, agreement scoring, and quartile-based resource categories.

Languages are points in a log-log plane: x the Wikipedia article count,
y the aggregated KG entity count, both through log10(1+n). Lloyd's
k-means with seeded k-means++ groups them, clusters get the six NLP
resource-class names by centroid rank, NMI compares partitions, and the
formal Low/Medium/High/Missing categories come from the first and third
quartiles of the two count distributions.
"""

from __future__ import annotations

import enum
import math
from collections import Counter
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .coverage import CoverageRecord, Distribution, aggregate_entity_count

JOSHI_NAMES = (
    "Left-Behinds",
    "Scrapping-Bys",
    "Hopefuls",
    "Rising Stars",
    "Underdogs",
    "Winner",
)

DEFAULT_TAU = 0.5  # half an order of magnitude on log10 axes


@dataclass(frozen=True)
class FeaturePoint:
    x: float  # log-scaled article count
    y: float  # log-scaled entity count
    wals_code: str


@dataclass(frozen=True)
class JoshiCategory:
    index: int
    name: str


@dataclass(frozen=True)
class Quartiles:
    q1: float
    q3: float

    def __post_init__(self):
        if self.q1 > self.q3:
            raise ValueError(f"q1 {self.q1} > q3 {self.q3}")


class LodCategory(enum.Enum):
    MISSING = "Missing"
    LOW = "Low"
    MEDIUM = "Medium"
    HIGH = "High"
    UNCLASSIFIED = "Unclassified"


@dataclass(frozen=True)
class DivergenceClass:
    score: float  # y - x on log features
    label: str  # "Left" | "Right" | "NearLinear"
    tau: float


@dataclass
class ClusterModel:
    k: int
    centroids: np.ndarray  # (k, 2)
    assignments: dict  # wals_code -> cluster index
    seed: int
    inertia: float
    n_iter: int
    inertia_history: list  # inertia after each Lloyd assignment step


def log_features(record: CoverageRecord, selected, raw: bool = False) -> FeaturePoint:
    """Feature point for a language covered by both KGs and Wikipedia."""
    entities = aggregate_entity_count(record, selected)
    articles = record.article_count
    if entities <= 0 or articles is None or articles <= 0:
        raise ValueError(
            f"{record.languoid.wals_code} is outside the KG/Wikipedia intersection"
        )
    if raw:
        return FeaturePoint(float(articles), float(entities), record.languoid.wals_code)
    return FeaturePoint(
        math.log10(1 + articles), math.log10(1 + entities), record.languoid.wals_code
    )


def _kmeans_pp_init(data: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = data.shape[0]
    centroids = np.empty((k, data.shape[1]))
    centroids[0] = data[rng.integers(n)]
    dist_sq = np.sum((data - centroids[0]) ** 2, axis=1)
    for i in range(1, k):
        total = dist_sq.sum()
        if total <= 0:
            centroids[i] = data[rng.integers(n)]
            continue
        probs = dist_sq / total
        centroids[i] = data[rng.choice(n, p=probs)]
        dist_sq = np.minimum(dist_sq, np.sum((data - centroids[i]) ** 2, axis=1))
    return centroids


def _lloyd(data: np.ndarray, centroids: np.ndarray, max_iter: int, tol: float):
    k = centroids.shape[0]
    history = []
    labels = np.zeros(data.shape[0], dtype=int)
    n_iter = 0
    for n_iter in range(1, max_iter + 1):
        d2 = np.sum((data[:, None, :] - centroids[None, :, :]) ** 2, axis=2)
        labels = np.argmin(d2, axis=1)
        history.append(float(d2[np.arange(data.shape[0]), labels].sum()))
        new_centroids = centroids.copy()
        for i in range(k):
            members = data[labels == i]
            if len(members):
                new_centroids[i] = members.mean(axis=0)
            else:
                # re-seed an empty cluster to the point farthest from its centroid
                d2 = np.sum((data - new_centroids[labels]) ** 2, axis=1)
                far = int(np.argmax(d2))
                new_centroids[i] = data[far]
                labels[far] = i
        shift = np.sqrt(np.sum((new_centroids - centroids) ** 2, axis=1)).max()
        centroids = new_centroids
        if shift < tol:
            break
    # final consistent assignment against the converged centroids
    d2 = np.sum((data[:, None, :] - centroids[None, :, :]) ** 2, axis=2)
    labels = np.argmin(d2, axis=1)
    inertia = float(d2[np.arange(data.shape[0]), labels].sum())
    history.append(inertia)
    return centroids, labels, inertia, n_iter, history


def kmeans(
    points,
    k: int = 6,
    seed: int = 42,
    max_iter: int = 300,
    tol: float = 1e-6,
    restarts: int = 1,
) -> ClusterModel:
    """Seeded k-means++ plus Lloyd iterations; fully deterministic."""
    if len(points) < k:
        raise ValueError(f"need at least k={k} points, got {len(points)}")
    data = np.array([[p.x, p.y] for p in points], dtype=np.float64)
    best = None
    for restart in range(restarts):
        rng = np.random.default_rng(seed + restart)
        init = _kmeans_pp_init(data, k, rng)
        centroids, labels, inertia, n_iter, history = _lloyd(data, init, max_iter, tol)
        if best is None or inertia < best[2]:
            best = (centroids, labels, inertia, n_iter, history)
    centroids, labels, inertia, n_iter, history = best
    assignments = {p.wals_code: int(labels[i]) for i, p in enumerate(points)}
    return ClusterModel(k, centroids, assignments, seed, inertia, n_iter, history)


def label_clusters(model: ClusterModel) -> dict:
    """Name the six clusters by centroid coordinate-sum rank.

    Lowest-coverage cluster becomes Left-Behinds, highest Winner; ties
    on the sum break by ascending x.
    """
    if model.k != 6:
        raise ValueError(f"resource-class labeling requires k=6, got k={model.k}")
    order = sorted(
        range(model.k),
        key=lambda i: (float(model.centroids[i].sum()), float(model.centroids[i][0])),
    )
    return {cluster: JoshiCategory(rank, JOSHI_NAMES[rank]) for rank, cluster in enumerate(order)}


def _entropy(counts: Counter, n: int) -> float:
    return -sum((c / n) * math.log(c / n) for c in counts.values())


def nmi(a: dict, b: dict) -> float:
    """Normalized mutual information of two labelings of the same items.

    Normalization is the arithmetic mean of the two entropies, natural
    logs. Identical partitions score 1 even when degenerate; otherwise a
    zero-entropy side scores 0.
    """
    if not a or not b:
        raise ValueError("empty partition")
    if set(a) != set(b):
        raise ValueError("partitions must label the same items")
    items = list(a)
    n = len(items)

    def groups(labeling):
        out: dict = {}
        for item in items:
            out.setdefault(labeling[item], set()).add(item)
        return frozenset(frozenset(g) for g in out.values())

    if groups(a) == groups(b):
        return 1.0
    counts_a = Counter(a[i] for i in items)
    counts_b = Counter(b[i] for i in items)
    h_a = _entropy(counts_a, n)
    h_b = _entropy(counts_b, n)
    if h_a == 0.0 or h_b == 0.0:
        return 0.0
    joint = Counter((a[i], b[i]) for i in items)
    mi = 0.0
    for (la, lb), c in joint.items():
        p_ab = c / n
        mi += p_ab * math.log(p_ab / ((counts_a[la] / n) * (counts_b[lb] / n)))
    return mi / ((h_a + h_b) / 2)


def quartiles(d: Distribution) -> Quartiles:
    """First/third quartiles by linear interpolation over the sorted sample."""
    if len(d) == 0:
        raise ValueError("empty distribution")
    values = sorted(d.values)
    n = len(values)

    def quantile(p: float) -> float:
        h = p * (n - 1)
        lo = math.floor(h)
        if lo + 1 >= n:
            return float(values[-1])
        return values[lo] + (h - lo) * (values[lo + 1] - values[lo])

    return Quartiles(quantile(0.25), quantile(0.75))


def lod_categorize(
    entity_count: float,
    article_count: Optional[float],
    q_e: Quartiles,
    q_w: Quartiles,
    in_l_star: bool,
) -> LodCategory:
    """Assign the formal resource category for one language.

    Low and High use strict inequalities against Q1/Q3; Medium uses the
    closed interval, so boundary values land in Medium. Everything
    covered but matching neither pattern is Unclassified.
    """
    if not in_l_star:
        return LodCategory.MISSING
    e, w = entity_count, article_count
    if e < q_e.q1 and w < q_w.q1:
        return LodCategory.LOW
    if q_e.q1 <= e <= q_e.q3 and q_w.q1 <= w <= q_w.q3:
        return LodCategory.MEDIUM
    if e > q_e.q3 and w > q_w.q3:
        return LodCategory.HIGH
    return LodCategory.UNCLASSIFIED


def divergence(point: FeaturePoint, tau: float = DEFAULT_TAU) -> DivergenceClass:
    """Classify entity-vs-article imbalance on the log plane.

    Left: substantially more entities than articles (KG verbalization
    opportunity); Right: the reverse (knowledge extraction opportunity).
    """
    if tau <= 0:
        raise ValueError(f"tau must be positive, got {tau}")
    score = point.y - point.x
    if score > tau:
        label = "Left"
    elif score < -tau:
        label = "Right"
    else:
        label = "NearLinear"
    return DivergenceClass(score, label, tau)
