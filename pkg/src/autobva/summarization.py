"""Validity-Value Similarity Clustering of archived boundary candidates.

Candidates are first partitioned by whether each side of the pair returned
normally (VV / VE / EE).  Within a group, each candidate is embedded in a
four-attribute feature space: its within-pair output distance under both
strlendist (min-max normalized) and 2-gram Jaccard, plus the mean 2-gram
Jaccard distance of each of its outputs to the corresponding outputs of the
whole group (uniqueness).  Restarted k-means with silhouette-based model
selection then yields clusters, each summarized by its shortest member.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .detection import Archive, BoundaryCandidate
from .distances import ngrams, strlendist
from .values import display_tuple

DIVERSITY_BLOCK = 100
DIVERSITY_WINDOW = 1000
KMEANS_MAX_ITER = 200
KMEANS_RESTARTS = 100
K_MAX = 10


def validity_of(candidate: BoundaryCandidate) -> str:
    return candidate.validity


class FeatureSpace:
    """Feature extraction context anchored to one reference set of candidates.

    The uniqueness attributes depend on the whole reference set, so vectors
    for candidates outside it (diversity-dropped ones) are computed against
    the same set and the same strlendist normalization.
    """

    def __init__(self, reference: Sequence[BoundaryCandidate]):
        if not reference:
            raise ValueError("feature space needs a nonempty reference group")
        self.reference = list(reference)
        self._grams: dict = {}
        self._dist: dict = {}
        self._counts1 = self._text_counts(c.output1.text for c in self.reference)
        self._counts2 = self._text_counts(c.output2.text for c in self.reference)
        raw_wd = [strlendist(c.output1.text, c.output2.text) for c in self.reference]
        self._wd_min = min(raw_wd)
        self._wd_max = max(raw_wd)
        self.matrix = np.column_stack([self.vector(c) for c in self.reference])

    @staticmethod
    def _text_counts(texts: Iterable[str]) -> dict:
        counts: dict = {}
        for t in texts:
            counts[t] = counts.get(t, 0) + 1
        return counts

    def _gram_set(self, text: str) -> frozenset:
        g = self._grams.get(text)
        if g is None:
            g = ngrams(text, 2)
            self._grams[text] = g
        return g

    def _jaccard2(self, t1: str, t2: str) -> float:
        if t1 == t2:
            return 0.0
        key = (t1, t2) if t1 <= t2 else (t2, t1)
        d = self._dist.get(key)
        if d is None:
            a, b = self._gram_set(t1), self._gram_set(t2)
            union = len(a | b)
            d = (union - len(a & b)) / union if union else 0.0
            self._dist[key] = d
        return d

    def _uniqueness(self, text: str, counts: dict) -> float:
        # mean distance to the reference outputs keeps the attribute in [0, 1]
        total = sum(n * self._jaccard2(text, other) for other, n in counts.items())
        return total / len(self.reference)

    def _normalized_wd(self, value: int) -> float:
        if self._wd_max == self._wd_min:
            return 0.0
        return (value - self._wd_min) / (self._wd_max - self._wd_min)

    def vector(self, c: BoundaryCandidate) -> np.ndarray:
        t1, t2 = c.output1.text, c.output2.text
        wd = min(max(self._normalized_wd(strlendist(t1, t2)), 0.0), 1.0)
        return np.array([
            wd,
            self._jaccard2(t1, t2),
            self._uniqueness(t1, self._counts1),
            self._uniqueness(t2, self._counts2),
        ])


def diversity_subset(candidates: Sequence[BoundaryCandidate], rng: random.Random,
                     block: int = DIVERSITY_BLOCK,
                     window: int = DIVERSITY_WINDOW) -> tuple:
    """Select a diverse working set for clustering; returns (subset, dropped).

    Groups within the window size pass through untouched.  Otherwise a random
    window is scored by the sum of its feature attributes, the lowest `block`
    are dropped (ties kept in insertion order) and replaced with unseen
    candidates, until the unseen pool is exhausted.
    """
    candidates = list(candidates)
    if len(candidates) <= window:
        return candidates, []
    picked = sorted(rng.sample(range(len(candidates)), window))
    chosen = set(picked)
    working = [candidates[i] for i in picked]
    pool = [c for i, c in enumerate(candidates) if i not in chosen]
    dropped: list = []
    while pool:
        matrix = FeatureSpace(working).matrix
        scores = matrix.sum(axis=0)
        order = sorted(range(len(working)), key=lambda j: (scores[j], j))
        cut = set(order[:block])
        dropped.extend(working[j] for j in sorted(cut))
        working = [c for j, c in enumerate(working) if j not in cut]
        refill, pool = pool[:block], pool[block:]
        working.extend(refill)
    return working, dropped


@dataclass
class ClusteringModel:
    k: int
    centroids: np.ndarray            # (k, 4)
    assignment: np.ndarray           # point -> cluster id
    silhouette: float
    wcss_history: list = field(default_factory=list)
    reseeded: bool = False


def kmeans(matrix: np.ndarray, k: int, rng: random.Random,
           max_iter: int = KMEANS_MAX_ITER) -> ClusteringModel:
    """Lloyd's algorithm on the feature matrix columns, Euclidean metric.

    Initial centroids are k distinct random data points; an emptied cluster
    is reseeded with the point farthest from its assigned centroid.
    """
    points = matrix.T
    n = points.shape[0]
    if not 2 <= k <= n:
        raise ValueError(f"k={k} must be between 2 and the number of points ({n})")
    centroids = points[rng.sample(range(n), k)].copy()
    assignment = np.full(n, -1)
    history: list = []
    reseeded = False
    for _ in range(max_iter):
        sq = ((points[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
        new_assignment = sq.argmin(axis=1)
        # an emptied cluster steals the point farthest from its own centroid;
        # repeat in case the theft empties a singleton donor
        claimed: set = set()
        while True:
            empty = [c for c in range(k) if not (new_assignment == c).any()]
            if not empty:
                break
            reseeded = True
            for cluster in empty:
                own_dist = sq[np.arange(n), new_assignment].copy()
                donors = np.bincount(new_assignment, minlength=k)[new_assignment] > 1
                eligible = donors & ~np.isin(np.arange(n), list(claimed))
                if not eligible.any():
                    eligible = ~np.isin(np.arange(n), list(claimed))
                own_dist[~eligible] = -1.0
                farthest = int(own_dist.argmax())
                new_assignment[farthest] = cluster
                claimed.add(farthest)
        history.append(float(((points - centroids[new_assignment]) ** 2).sum()))
        if (new_assignment == assignment).all():
            break
        assignment = new_assignment
        for cluster in range(k):
            centroids[cluster] = points[assignment == cluster].mean(axis=0)
    return ClusteringModel(k, centroids, assignment,
                           silhouette(matrix, assignment), history, reseeded)


def silhouette(matrix: np.ndarray, assignment: np.ndarray) -> float:
    """Mean silhouette score over all points; singleton clusters contribute 0."""
    labels = np.unique(assignment)
    if len(labels) < 2:
        raise ValueError("silhouette needs at least two clusters")
    points = matrix.T
    n = points.shape[0]
    distances = np.sqrt(((points[:, None, :] - points[None, :, :]) ** 2).sum(axis=2))
    total = 0.0
    for i in range(n):
        own = assignment == assignment[i]
        if own.sum() == 1:
            continue  # contributes 0
        a = distances[i][own].sum() / (own.sum() - 1)
        b = min(distances[i][assignment == other].mean()
                for other in labels if other != assignment[i])
        denom = max(a, b)
        if denom > 0:
            total += (b - a) / denom
    return total / n


def select_model(models: Sequence[ClusteringModel]) -> ClusteringModel:
    """Most clusters among the runs at or above the 95th percentile silhouette.

    Ties prefer the higher silhouette, then the earlier run.
    """
    if not models:
        raise ValueError("no clustering runs to select from")
    scores = [m.silhouette for m in models]
    cutoff = float(np.percentile(scores, 95))
    eligible = [(m.k, m.silhouette, -i, m) for i, m in enumerate(models)
                if m.silhouette >= cutoff]
    return max(eligible)[3]


@dataclass
class ClusterSummary:
    cluster_id: int
    members: list
    representative: BoundaryCandidate
    strategy_counts: dict = field(default_factory=dict)

    @property
    def size(self) -> int:
        return len(self.members)


@dataclass
class GroupSummary:
    validity: str
    clusters: list
    silhouette: Optional[float] = None   # None for small groups clustered trivially

    @property
    def size(self) -> int:
        return sum(c.size for c in self.clusters)


@dataclass
class ClusterReport:
    groups: list

    @property
    def total_candidates(self) -> int:
        return sum(g.size for g in self.groups)

    def group(self, validity: str) -> Optional[GroupSummary]:
        for g in self.groups:
            if g.validity == validity:
                return g
        return None

    def cluster_of(self) -> dict:
        """Candidate identity key -> (validity, cluster_id), for coverage stats."""
        mapping = {}
        for g in self.groups:
            for cluster in g.clusters:
                for member in cluster.members:
                    mapping[member.key] = (g.validity, cluster.cluster_id)
        return mapping


def _candidate_brevity(c: BoundaryCandidate) -> tuple:
    fields = (display_tuple(c.input1), c.output1.text,
              display_tuple(c.input2), c.output2.text)
    return (sum(len(f) for f in fields), fields)


def _pick_representative(members: Sequence[BoundaryCandidate]) -> BoundaryCandidate:
    return min(members, key=_candidate_brevity)


def _strategy_counts(members: Sequence[BoundaryCandidate], strategies: dict) -> dict:
    counts: dict = {}
    for member in members:
        for tag in strategies.get(member.key, ()):
            counts[tag] = counts.get(tag, 0) + 1
    return dict(sorted(counts.items()))


def summarize(archive: Archive, rng: Optional[random.Random] = None,
              restarts: int = KMEANS_RESTARTS, k_max: int = K_MAX,
              block: int = DIVERSITY_BLOCK, window: int = DIVERSITY_WINDOW) -> ClusterReport:
    """Cluster an archive per validity group and return the report.

    Groups with fewer than three candidates become a single cluster; larger
    groups go through diversity subsetting, `restarts` k-means runs cycling
    k over 2..min(k_max, subset size), silhouette model selection, and
    nearest-centroid attachment of the diversity-dropped candidates.
    """
    rng = rng or random.Random(0)
    groups = []
    for validity in ("VV", "VE", "EE"):
        group = [c for c in archive if c.validity == validity]
        if not group:
            continue
        if len(group) < 3:
            clusters = [ClusterSummary(1, group, _pick_representative(group),
                                       _strategy_counts(group, archive.strategies))]
            groups.append(GroupSummary(validity, clusters, silhouette=None))
            continue
        subset, dropped = diversity_subset(group, rng, block, window)
        space = FeatureSpace(subset)
        ks = list(range(2, min(k_max, len(subset)) + 1))
        models = [kmeans(space.matrix, ks[i % len(ks)],
                         random.Random(rng.getrandbits(64)))
                  for i in range(restarts)]
        best = select_model(models)
        member_lists: list = [[] for _ in range(best.k)]
        for point, cluster in enumerate(best.assignment):
            member_lists[cluster].append(subset[point])
        for candidate in dropped:
            vec = space.vector(candidate)
            nearest = int(((best.centroids - vec) ** 2).sum(axis=1).argmin())
            member_lists[nearest].append(candidate)
        ordered = sorted((m for m in member_lists if m),
                         key=lambda ms: (-len(ms), _pick_representative(ms).key))
        clusters = [
            ClusterSummary(i + 1, members, _pick_representative(members),
                           _strategy_counts(members, archive.strategies))
            for i, members in enumerate(ordered)
        ]
        groups.append(GroupSummary(validity, clusters, silhouette=best.silhouette))
    return ClusterReport(groups)
