import pytest

from ctxrec.dataset import (aggregate, filter_evaluation_cohort, load_catalog,
                            load_interactions, summarize, write_interactions)
from ctxrec.errors import CohortError, SchemaError
from helpers import csv_row, make_record, write_interactions_csv


class TestLoadInteractions:
    def test_clean_file(self, tmp_path):
        path = tmp_path / "x.csv"
        write_interactions_csv(path, [
            csv_row(user="u1", obj="o1"),
            csv_row(user="u1", obj="o2"),
            csv_row(user="u2", obj="o1"),
        ])
        result = load_interactions(path)
        assert len(result.records) == 3
        assert result.rejects == []

    def test_negative_feedback_rejected(self, tmp_path):
        path = tmp_path / "x.csv"
        write_interactions_csv(path, [
            csv_row(user="u1", obj="o1"),
            csv_row(user="u1", obj="o2", f2=-1),
            csv_row(user="u2", obj="o1"),
        ])
        result = load_interactions(path)
        assert len(result.records) == 2
        assert len(result.rejects) == 1
        assert result.rejects[0].reason == "negative feedback"
        assert result.rejects[0].line_no == 3

    def test_missing_c6_recomputed(self, tmp_path):
        path = tmp_path / "x.csv"
        write_interactions_csv(path, [
            csv_row(c6="", c4w=1000, c4h=2000, c5w=500, c5h=800),
        ])
        result = load_interactions(path)
        assert not result.rejects
        rec = result.records[0]
        assert rec.c6_visible_area_ratio == pytest.approx((500 * 800) / (1000 * 2000))

    def test_inconsistent_c6_rejected(self, tmp_path):
        path = tmp_path / "x.csv"
        write_interactions_csv(path, [csv_row(c6="0.9")])  # true ratio 0.25
        result = load_interactions(path)
        assert result.rejects[0].reason == "inconsistent visible ratio"

    def test_zero_page_dimension_rejected(self, tmp_path):
        path = tmp_path / "x.csv"
        write_interactions_csv(path, [csv_row(c4h=0)])
        result = load_interactions(path)
        assert result.rejects[0].reason == "zero page dimension"

    def test_missing_column_is_schema_error(self, tmp_path):
        path = tmp_path / "x.csv"
        header = "user_id,object_id,f1_view_count"
        path.write_text(header + "\nu1,o1,1\n", encoding="utf-8")
        with pytest.raises(SchemaError):
            load_interactions(path)

    def test_column_mapping(self, tmp_path):
        path = tmp_path / "x.csv"
        content = write_interactions_csv(path, [csv_row()])
        text = path.read_text(encoding="utf-8").replace("user_id", "visitor")
        path.write_text(text, encoding="utf-8")
        result = load_interactions(path, schema={"user_id": "visitor"})
        assert result.records[0].user_id == "u1"

    def test_dwell_unit_milliseconds(self, tmp_path):
        path = tmp_path / "x.csv"
        write_interactions_csv(path, [csv_row(f2=1500.0)])
        result = load_interactions(path, dwell_unit="milliseconds")
        assert result.records[0].f2_dwell_time == pytest.approx(1.5)


class TestAggregation:
    def test_sums_feedback_keeps_last_context(self):
        a = make_record(f1=1, f2=10.0, c3=100, purchase=False)
        b = make_record(f1=2, f2=5.0, c3=200, purchase=True)
        merged = aggregate([a, b])
        assert len(merged) == 1
        rec = merged[0]
        assert rec.f1_view_count == 3
        assert rec.f2_dwell_time == pytest.approx(15.0)
        assert rec.c3_text_size == 200
        assert rec.purchase is True

    def test_roundtrip_identity(self, tmp_path):
        path = tmp_path / "x.csv"
        write_interactions_csv(path, [
            csv_row(user="u1", obj="o1", f2=10.125, purchase=1),
            csv_row(user="u1", obj="o2", f5=123.5),
            csv_row(user="u2", obj="o1", handheld=1),
        ])
        first = load_interactions(path).records
        out = tmp_path / "y.csv"
        write_interactions(first, out)
        second = load_interactions(out).records
        assert first == second
        out2 = tmp_path / "z.csv"
        write_interactions(second, out2)
        assert out.read_bytes() == out2.read_bytes()


class TestCohortFilter:
    def _user(self, user, n_objects, n_purchased):
        return [make_record(user=user, obj=f"{user}-o{i}", purchase=i < n_purchased)
                for i in range(n_objects)]

    def test_rules(self):
        records = (self._user("a", 2, 1)      # too few objects
                   + self._user("b", 3, 0)    # no purchase
                   + self._user("c", 3, 1))   # retained
        kept = filter_evaluation_cohort(records)
        assert {r.user_id for r in kept} == {"c"}
        assert len(kept) == 3

    def test_empty_cohort_raises(self):
        with pytest.raises(CohortError):
            filter_evaluation_cohort(self._user("a", 2, 1))

    def test_filter_is_monotone_per_user(self):
        # each user's retention depends only on their own records
        users = {"a": (3, 1), "b": (5, 0), "c": (4, 2), "d": (2, 2)}
        records = [r for u, (n, p) in users.items() for r in self._user(u, n, p)]
        kept_all = {r.user_id for r in filter_evaluation_cohort(records)}
        for dropped in ("a", "c"):
            remaining = [r for r in records if r.user_id != dropped]
            kept = {r.user_id for r in filter_evaluation_cohort(remaining)}
            assert kept == kept_all - {dropped}


class TestSummary:
    def test_counts(self):
        records = [
            make_record(user="u1", obj="o1", purchase=True),
            make_record(user="u1", obj="o2"),
            make_record(user="u2", obj="o1", purchase=True),
        ]
        s = summarize(records)
        assert (s.n_users, s.n_objects, s.n_purchases, s.n_records) == (2, 2, 2, 3)


class TestCatalog:
    def test_load(self, tmp_path):
        path = tmp_path / "cat.csv"
        path.write_text(
            "object_id,category_ids,attributes\n"
            "o1,beach-south;family,tour_type=beach;country=it;country=hr\n"
            "o2,city-west,tour_type=city\n",
            encoding="utf-8")
        catalog, rejects = load_catalog(path)
        assert not rejects
        assert catalog.objects["o1"].categories == {"beach-south", "family"}
        assert catalog.objects["o1"].attributes["country"] == ("hr", "it")

    def test_empty_categories_rejected(self, tmp_path):
        path = tmp_path / "cat.csv"
        path.write_text("object_id,category_ids,attributes\no1,,x=1\n",
                        encoding="utf-8")
        catalog, rejects = load_catalog(path)
        assert "o1" not in catalog
        assert rejects[0].reason == "empty categories"

    def test_unresolved_objects_reported(self, tmp_path):
        path = tmp_path / "cat.csv"
        path.write_text("object_id,category_ids,attributes\no1,c1,x=1\n",
                        encoding="utf-8")
        catalog, _ = load_catalog(path)
        records = [make_record(obj="o1"), make_record(obj="o9")]
        assert catalog.missing_objects(records) == ["o9"]
