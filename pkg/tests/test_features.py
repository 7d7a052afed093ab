import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ctxrec import features
from ctxrec.errors import ConfigError
from ctxrec.features import (Variant, build_variant, complexity_ratios,
                             hit_bottom, relative_user_features, scrolled_area,
                             variant_columns)
from helpers import make_record


class TestRelativeUserFeatures:
    def test_value_at_mean_and_above(self):
        records = [make_record(obj=f"o{i}", f2=v) for i, v in enumerate([10, 20, 30])]
        rel = relative_user_features(records)
        assert rel[1, 1] == pytest.approx(1.0)   # f2 = 20 vs mean 20
        assert rel[2, 1] == pytest.approx(1.5)   # f2 = 30

    def test_all_zero_feature_maps_to_zero(self):
        records = [make_record(obj=f"o{i}", f5=0.0) for i in range(3)]
        rel = relative_user_features(records)
        assert np.all(rel[:, 4] == 0.0)

    @settings(max_examples=50, deadline=None)
    @given(scale=st.floats(min_value=1e-3, max_value=1e3),
           values=st.lists(st.floats(min_value=0.0, max_value=1e4), min_size=2,
                           max_size=6))
    def test_scale_relativity(self, scale, values):
        base = [make_record(obj=f"o{i}", f2=v) for i, v in enumerate(values)]
        scaled = [make_record(obj=f"o{i}", f2=v * scale)
                  for i, v in enumerate(values)]
        np.testing.assert_allclose(relative_user_features(base)[:, 1],
                                   relative_user_features(scaled)[:, 1],
                                   rtol=1e-9, atol=1e-12)


class TestScrolling:
    def test_scrolled_area_examples(self):
        assert scrolled_area(make_record(c5h=500, c4h=1000, f5=0.0)) == 0.5
        assert scrolled_area(make_record(c5h=500, c4h=1000, f5=500.0)) == 1.0
        assert scrolled_area(make_record(c5h=800, c4h=600, c5w=500, f5=0.0)) == 1.0

    def test_hit_bottom_examples(self):
        assert hit_bottom(make_record(c5h=500, c4h=1000, f5=499.0)) is False
        assert hit_bottom(make_record(c5h=500, c4h=1000, f5=500.0)) is True
        assert hit_bottom(make_record(c5h=800, c4h=600, c5w=500, f5=0.0)) is True

    @settings(max_examples=100, deadline=None)
    @given(win=st.integers(min_value=100, max_value=2000),
           page=st.integers(min_value=100, max_value=5000),
           scroll=st.floats(min_value=0, max_value=10000))
    def test_hit_bottom_implies_full_area(self, win, page, scroll):
        rec = make_record(c5h=win, c4h=page, f5=scroll, c4w=1000, c5w=500)
        if hit_bottom(rec):
            assert scrolled_area(rec) == 1.0


class TestComplexityRatios:
    def test_examples(self):
        rec = make_record(f2=100.0, c1=50)
        ratios = complexity_ratios(rec, np.zeros(6))
        names = features.RATIO_COLUMNS
        assert ratios[names.index("f2_per_c1")] == pytest.approx(2.0)

        rec = make_record(f3=40.0, c2=0)
        ratios = complexity_ratios(rec, np.zeros(6))
        assert ratios[names.index("f3_per_c2")] == pytest.approx(40.0)

    def test_all_zero_feedback(self):
        rec = make_record(f1=0, f2=0.0, f3=0.0, f4=0.0, f5=0.0, f6=0.0)
        ratios = complexity_ratios(rec, np.zeros(6))
        assert ratios.shape == (60,)
        assert np.all(ratios == 0.0)


def _sample_records():
    rng = np.random.default_rng(4)
    records = []
    for u in range(3):
        for o in range(4):
            records.append(make_record(
                user=f"u{u}", obj=f"o{o}",
                f1=int(rng.integers(0, 5)), f2=float(rng.uniform(0, 50)),
                f3=float(rng.uniform(0, 500)), f4=float(rng.uniform(0, 9)),
                f5=float(rng.uniform(0, 2000)), f6=float(rng.uniform(0, 9)),
                c1=int(rng.integers(0, 80)), c2=int(rng.integers(0, 20)),
                c3=int(rng.integers(0, 9000)),
                c4w=1000, c4h=int(rng.integers(500, 4000)),
                c5w=500, c5h=int(rng.integers(300, 900)),
                purchase=bool(rng.random() < 0.3)))
    return records


class TestVariants:
    def test_dwell_time_columns(self):
        matrix = build_variant(_sample_records(), Variant.DWELL_TIME)
        assert matrix.columns == ["f2", "f2_u"]

    def test_raw_plus_context_columns(self):
        cols = variant_columns(Variant.RAW_PLUS_CONTEXT)
        assert "f_sc" in cols and "f_hb" in cols
        assert not any("_per_" in c for c in cols)

    def test_all_features_adds_60_ratios(self):
        n_ratios = len(features.FEEDBACK_NAMES + features.RELATIVE_NAMES) \
            * len(features.COMPLEXITY_NAMES)
        assert n_ratios == 60
        rpc = variant_columns(Variant.RAW_PLUS_CONTEXT)
        allf = variant_columns(Variant.ALL_FEATURES)
        assert len(allf) == len(rpc) + 60

    def test_variant_nesting(self):
        dwell = set(variant_columns(Variant.DWELL_TIME))
        raw = set(variant_columns(Variant.RAW_FEEDBACK))
        rpc = set(variant_columns(Variant.RAW_PLUS_CONTEXT))
        allf = set(variant_columns(Variant.ALL_FEATURES))
        assert dwell < raw < rpc < allf

    def test_unknown_variant(self):
        with pytest.raises((ConfigError, ValueError)):
            build_variant(_sample_records(), "nope")

    def test_rows_sorted_and_finite(self):
        matrix = build_variant(_sample_records(), Variant.ALL_FEATURES)
        assert matrix.keys == sorted(matrix.keys)
        assert np.all(np.isfinite(matrix.X))
        assert set(np.unique(matrix.y)) <= {0.0, 1.0}

    def test_csv_export(self, tmp_path):
        matrix = build_variant(_sample_records(), Variant.DWELL_TIME)
        path = tmp_path / "m.csv"
        matrix.write_csv(path)
        lines = path.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "user_id,object_id,f2,f2_u,purchase"
        assert len(lines) == 1 + len(matrix.keys)
