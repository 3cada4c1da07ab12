"""Feature extraction, diversity subsetting, k-means, silhouette, model
selection, and the full summarize pipeline."""

from fractions import Fraction
from random import Random

import numpy as np
import pytest

from autobva.detection import Archive, BoundaryCandidate, make_candidate
from autobva.distances import STRLEN
from autobva.summarization import (
    ClusteringModel,
    FeatureSpace,
    diversity_subset,
    kmeans,
    select_model,
    silhouette,
    summarize,
    validity_of,
)
from autobva.suts import execute, get_sut
from autobva.values import ExecutionOutcome

BC = get_sut("bytecount")


def bc_cand(a, b):
    return make_candidate((a,), execute(BC, (a,)), (b,), execute(BC, (b,)), STRLEN)


def text_cand(i1, t1, i2, t2, err1=False, err2=False):
    def o(t, e):
        return ExecutionOutcome(text=t, error_kind="argument_error" if e else None)
    return BoundaryCandidate((i1,), o(t1, err1), (i2,), o(t2, err2), Fraction(1))


# ---------------------------------------------------------------------------
# validity


def test_validity_groups():
    assert validity_of(bc_cand(999, 1000)) == "VV"
    assert validity_of(bc_cand(999999999999994822656, 999999999999994822657)) == "VE"
    assert validity_of(bc_cand(999999999999990520104160854016,
                               999999999999990520104160854017)) == "EE"
    assert validity_of(text_cand(1, "x", 2, "y", err1=True, err2=False)) == "VE"


# ---------------------------------------------------------------------------
# features


def test_features_identical_outputs_have_zero_wd():
    group = [text_cand(1, "same", 2, "same"), text_cand(3, "aaaa", 4, "bbbb")]
    m = FeatureSpace(group).matrix
    assert m.shape == (4, 2)
    assert m[0, 0] == 0 and m[1, 0] == 0
    assert np.all((m >= 0) & (m <= 1))


def test_features_singleton_group_has_zero_uniqueness():
    m = FeatureSpace([text_cand(1, "ab", 2, "cd")]).matrix
    assert m[2, 0] == 0 and m[3, 0] == 0


def test_features_shared_first_output():
    # direct evaluation of the uniqueness sum on a two-element group
    a = text_cand(1, "xx", 2, "yy")
    b = text_cand(3, "xx", 4, "zz")
    m = FeatureSpace([a, b]).matrix
    assert m[2, 0] == m[2, 1] == 0          # identical first outputs
    assert m[3, 0] == m[3, 1] == 0.5        # d("yy","zz")=1 over group size 2


def test_feature_wd_min_max_normalization():
    group = [text_cand(1, "a", 2, "abc"),      # strlendist 2
             text_cand(3, "a", 4, "ab"),       # strlendist 1
             text_cand(5, "a", 6, "abcde")]    # strlendist 4
    m = FeatureSpace(group).matrix
    assert m[0].tolist() == [pytest.approx(1 / 3), 0.0, 1.0]
    flat = FeatureSpace([text_cand(1, "q", 2, "z"), text_cand(3, "r", 4, "s")]).matrix
    assert flat[0].tolist() == [0.0, 0.0]   # max == min collapses the row


# ---------------------------------------------------------------------------
# diversity subset


def _many(n):
    return [text_cand(i, f"t{i}", i + 10**6, f"u{i}") for i in range(n)]


def test_diversity_below_window_is_identity():
    group = _many(500)
    subset, dropped = diversity_subset(group, Random(0))
    assert subset == group and dropped == []


def test_diversity_single_cycle_at_1100():
    group = _many(1100)
    subset, dropped = diversity_subset(group, Random(0), block=100, window=1000)
    assert len(subset) == 1000
    assert len(dropped) == 100
    assert set(c.key for c in subset) | set(c.key for c in dropped) == {c.key for c in group}


def test_diversity_exhausts_pool():
    # 1350 -> four cycles; the last refill only has 50 unseen left
    group = _many(1350)
    subset, dropped = diversity_subset(group, Random(1), block=100, window=1000)
    assert len(subset) + len(dropped) == 1350
    assert len(subset) == 950
    assert len(dropped) == 400


# ---------------------------------------------------------------------------
# k-means and silhouette


def _four_point_matrix():
    return np.array([
        [0.0, 0.0, 1.0, 1.0],
        [0.0, 0.0, 1.0, 1.0],
        [0.0, 0.0, 1.0, 1.0],
        [0.0, 0.01, 1.0, 0.99],
    ])


def test_kmeans_recovers_two_separated_groups():
    # brute force over all 2-partitions of the 4 points confirms the split
    m = _four_point_matrix()
    points = m.T
    best, best_wcss = None, None
    for mask in range(1, 8):  # nontrivial bipartitions up to symmetry
        a = [i for i in range(4) if mask & (1 << i)]
        b = [i for i in range(4) if not mask & (1 << i)]
        wcss = 0.0
        for side in (a, b):
            center = points[side].mean(axis=0)
            wcss += ((points[side] - center) ** 2).sum()
        if best_wcss is None or wcss < best_wcss:
            best, best_wcss = frozenset(map(frozenset, (a, b))), wcss
    assert best == frozenset({frozenset({0, 1}), frozenset({2, 3})})
    model = kmeans(m, 2, Random(0))
    got = frozenset(map(frozenset, (
        [i for i in range(4) if model.assignment[i] == model.assignment[0]],
        [i for i in range(4) if model.assignment[i] != model.assignment[0]],
    )))
    assert got == best
    assert model.silhouette > 0.9


def test_kmeans_k_equals_point_count():
    m = np.random.RandomState(0).rand(4, 6)
    model = kmeans(m, 6, Random(0))
    assert sorted(np.bincount(model.assignment)) == [1] * 6
    assert model.silhouette == 0  # all singletons contribute 0


def test_kmeans_identical_columns_have_no_structure():
    m = np.ones((4, 8))
    model = kmeans(m, 2, Random(0))
    assert model.silhouette <= 0


def test_kmeans_rejects_bad_k():
    m = np.random.RandomState(1).rand(4, 5)
    with pytest.raises(ValueError):
        kmeans(m, 1, Random(0))
    with pytest.raises(ValueError):
        kmeans(m, 6, Random(0))


def test_kmeans_wcss_monotone_and_silhouette_bounded():
    rng = np.random.RandomState(42)
    for trial in range(25):
        m = rng.rand(4, 30)
        model = kmeans(m, 2 + trial % 5, Random(trial))
        assert -1 <= model.silhouette <= 1
        if not model.reseeded:
            for earlier, later in zip(model.wcss_history, model.wcss_history[1:]):
                assert later <= earlier + 1e-9


def test_silhouette_two_tight_far_clusters():
    m = _four_point_matrix()
    assert silhouette(m, np.array([0, 0, 1, 1])) > 0.9


def test_silhouette_identical_points_zero():
    m = np.zeros((4, 6))
    assert silhouette(m, np.array([0, 0, 0, 1, 1, 1])) == 0


def test_silhouette_requires_two_clusters():
    with pytest.raises(ValueError):
        silhouette(np.zeros((4, 3)), np.array([0, 0, 0]))


def _model(k, sil):
    return ClusteringModel(k, np.zeros((k, 4)), np.zeros(k, dtype=int), sil)


def test_select_model_rules():
    assert select_model([_model(4, 0.5)]).k == 4
    # both in the top percentile: larger k wins despite lower silhouette
    picked = select_model([_model(5, 0.982), _model(6, 0.942)] + [_model(2, 0.1)] * 38)
    assert picked.k == 6
    # equal silhouettes: largest k
    picked = select_model([_model(k, 0.7) for k in (3, 5, 4)])
    assert picked.k == 5
    # tie on k: higher silhouette
    picked = select_model([_model(4, 0.6), _model(4, 0.9)])
    assert picked.silhouette == 0.9


# ---------------------------------------------------------------------------
# summarize


def _seeded_archive(seeds=(0, 1), budget=1500):
    from autobva.detection import DetectionConfig, detect
    from autobva.sampling import SamplerConfig
    merged = Archive()
    for seed in seeds:
        cfg = DetectionConfig(strategy="bcs", budget_iterations=budget,
                              sampler=SamplerConfig(seed=seed))
        merged.merge(detect(BC, cfg).archive)
    return merged


def test_summarize_empty_archive():
    report = summarize(Archive(), Random(0))
    assert report.groups == [] and report.total_candidates == 0


def test_summarize_small_group_is_single_cluster():
    archive = Archive()
    archive.add(bc_cand(999999999999994822656, 999999999999994822657), strategy="bcs")
    report = summarize(archive, Random(0))
    (group,) = report.groups
    assert group.validity == "VE"
    assert len(group.clusters) == 1
    assert group.clusters[0].size == 1
    assert group.silhouette is None
    assert group.clusters[0].strategy_counts == {"bcs": 1}


def test_summarize_bytecount_archive():
    archive = _seeded_archive()
    report = summarize(archive, Random(0), restarts=60)
    assert report.total_candidates == len(archive)
    vv = report.group("VV")
    assert vv is not None
    sizes = [c.size for c in vv.clusters]
    assert sum(sizes) == vv.size
    assert all(s > 0 for s in sizes)
    assert vv.silhouette is not None and -1 <= vv.silhouette <= 1
    mapping = report.cluster_of()
    assert len(mapping) == report.total_candidates


def test_summarize_representative_is_shortest():
    from autobva.values import display_tuple

    def total_len(c):
        return (len(display_tuple(c.input1)) + len(display_tuple(c.input2))
                + len(c.output1.text) + len(c.output2.text))

    archive = _seeded_archive()
    report = summarize(archive, Random(0), restarts=60)
    for group in report.groups:
        for cluster in group.clusters:
            rep_len = total_len(cluster.representative)
            assert all(total_len(m) >= rep_len for m in cluster.members)


def test_summarize_fixed_seed_reproducible():
    archive = _seeded_archive()
    a = summarize(archive, Random(42), restarts=40)
    b = summarize(archive, Random(42), restarts=40)
    assert [(g.validity, [(c.cluster_id, c.size, c.representative.key)
                          for c in g.clusters]) for g in a.groups] == \
           [(g.validity, [(c.cluster_id, c.size, c.representative.key)
                          for c in g.clusters]) for g in b.groups]
