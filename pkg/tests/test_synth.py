import numpy as np
import pytest

from ctxrec import evaluation, features, learners
from ctxrec.dataset import filter_evaluation_cohort, write_interactions
from ctxrec.errors import ConfigError
from ctxrec.synth import SynthConfig, synthesize


class TestConfigValidation:
    def test_bad_signal(self):
        with pytest.raises(ConfigError):
            synthesize(SynthConfig(signal_strength=1.5))

    def test_bad_sizes(self):
        with pytest.raises(ConfigError):
            synthesize(SynthConfig(n_users=0))


class TestDeterminism:
    def test_same_seed_byte_identical(self, tmp_path):
        paths = []
        for name in ("a.csv", "b.csv"):
            records, _ = synthesize(SynthConfig(seed=11, n_users=30, n_objects=50))
            path = tmp_path / name
            write_interactions(records, path)
            paths.append(path)
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_different_seed_differs(self):
        a, _ = synthesize(SynthConfig(seed=1, n_users=10, n_objects=30))
        b, _ = synthesize(SynthConfig(seed=2, n_users=10, n_objects=30))
        assert a != b


class TestShape:
    def test_every_user_evaluable(self):
        records, catalog = synthesize(SynthConfig(seed=5, n_users=40, n_objects=60))
        cohort = filter_evaluation_cohort(records)
        by_user = {}
        for r in cohort:
            by_user.setdefault(r.user_id, []).append(r)
        assert len(by_user) == 40
        for recs in by_user.values():
            assert len({r.object_id for r in recs}) >= 3
            assert any(r.purchase for r in recs)

    def test_catalog_resolves_all_objects(self):
        records, catalog = synthesize(SynthConfig(seed=5, n_users=20, n_objects=40))
        assert catalog.missing_objects(records) == []

    def test_visit_counts_heavy_tailed(self):
        records, _ = synthesize(SynthConfig(seed=9, n_users=300, n_objects=500))
        counts = {}
        for r in records:
            counts[r.user_id] = counts.get(r.user_id, 0) + 1
        values = np.array(sorted(counts.values()))
        # power-law-ish: a long right tail over the minimum of 3
        assert values.min() == 3
        assert values.max() >= 4 * np.median(values)
        assert np.mean(values > 2 * np.median(values)) > 0.03

    def test_c6_consistent(self):
        records, _ = synthesize(SynthConfig(seed=5, n_users=10, n_objects=30))
        for r in records:
            expected = (r.c5_window_width * r.c5_window_height) / \
                (r.c4_page_width * r.c4_page_height)
            assert r.c6_visible_area_ratio == pytest.approx(expected, abs=1e-9)


class TestSignal:
    def test_null_signal_labels_look_exchangeable(self):
        records, _ = synthesize(SynthConfig(seed=21, n_users=60, n_objects=90,
                                            signal_strength=0.0))
        cohort = filter_evaluation_cohort(records)
        matrix = features.build_variant(cohort, features.Variant.RAW_PLUS_CONTEXT)
        report = evaluation.loocv_purchase_prediction(
            matrix, learners.LearnerConfig(kind="j48", seed=0))
        lo, hi = evaluation.label_permutation_band(
            report.cases, 1000, np.random.default_rng(77))
        assert lo <= report.aggregates()["mean_ndcg"] <= hi

    def test_full_signal_recovered_by_tree(self):
        records, _ = synthesize(SynthConfig(seed=22, n_users=200, n_objects=300,
                                            signal_strength=1.0))
        cohort = filter_evaluation_cohort(records)
        matrix = features.build_variant(cohort, features.Variant.RAW_PLUS_CONTEXT)
        report = evaluation.loocv_purchase_prediction(
            matrix, learners.LearnerConfig(kind="j48", seed=0))
        lo, hi = evaluation.label_permutation_band(
            report.cases, 1000, np.random.default_rng(78))
        assert report.aggregates()["mean_ndcg"] > hi
