"""Feature engineering: per-user relative feedback, scroll coverage and
page-complexity ratios, materialized as one of four dataset variants.

Derived features:

* ``f{i}_u``       relative per-user feedback, f_i divided by the user's
                   mean of f_i over all their records (0/0 defined as 0)
* ``f_sc``         scrolled area, min(1, (window_h + scroll_dist) / page_h)
* ``f_hb``         hit bottom, 1 when window_h + scroll_dist >= page_h
* ``f{i}_per_c{j}``  feedback over page complexity, f_i / max(c_j, 1),
                   with c_j ranging over link count, image count, text
                   size, page area (width*height) and visible-area ratio

Variants nest: dwell_time (f2, f2_u) < raw_feedback (all f_i, f_i_u)
< raw_plus_context (adds context columns, f_sc, f_hb) < all_features
(adds the 60 complexity ratios).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from .dataset import InteractionRecord
from .errors import ConfigError

RATIO_EPS = 1.0  # lower clamp for complexity denominators


class Variant(str, Enum):
    DWELL_TIME = "dwell_time"
    RAW_FEEDBACK = "raw_feedback"
    RAW_PLUS_CONTEXT = "raw_plus_context"
    ALL_FEATURES = "all_features"


_FEEDBACK_ATTRS = ["f1_view_count", "f2_dwell_time", "f3_mouse_distance",
                   "f4_mouse_time", "f5_scroll_distance", "f6_scroll_time"]
FEEDBACK_NAMES = ["f1", "f2", "f3", "f4", "f5", "f6"]
RELATIVE_NAMES = [f"{n}_u" for n in FEEDBACK_NAMES]

CONTEXT_COLUMNS = ["c1_links", "c2_images", "c3_text", "c4_page_w", "c4_page_h",
                   "c5_win_w", "c5_win_h", "c6_visible_ratio", "c7_handheld"]

COMPLEXITY_NAMES = ["c1", "c2", "c3", "c4_area", "c6"]

RATIO_COLUMNS = [f"{f}_per_{c}"
                 for f in FEEDBACK_NAMES + RELATIVE_NAMES
                 for c in COMPLEXITY_NAMES]


def variant_columns(variant: Variant) -> list[str]:
    raw = FEEDBACK_NAMES + RELATIVE_NAMES
    if variant == Variant.DWELL_TIME:
        return ["f2", "f2_u"]
    if variant == Variant.RAW_FEEDBACK:
        return list(raw)
    if variant == Variant.RAW_PLUS_CONTEXT:
        return raw + CONTEXT_COLUMNS + ["f_sc", "f_hb"]
    if variant == Variant.ALL_FEATURES:
        return raw + CONTEXT_COLUMNS + ["f_sc", "f_hb"] + RATIO_COLUMNS
    raise ConfigError(f"unknown variant {variant!r}")


def _feedback_vector(record: InteractionRecord) -> np.ndarray:
    return np.array([float(getattr(record, a)) for a in _FEEDBACK_ATTRS])


def relative_user_features(records: list[InteractionRecord]) -> np.ndarray:
    """Per-record relative feedback f_i / avg_u(f_i), aligned with the input order.

    A user whose f_i is zero on every record gets 0 (no activity carries
    no signal); nonzero values with a zero mean cannot occur since raw
    feedback is nonnegative.
    """
    if not records:
        return np.zeros((0, 6))
    raw = np.array([_feedback_vector(r) for r in records])
    users = np.array([r.user_id for r in records])
    rel = np.zeros_like(raw)
    for user in np.unique(users):
        mask = users == user
        means = raw[mask].mean(axis=0)
        with np.errstate(divide="ignore", invalid="ignore"):
            vals = np.where(means > 0, raw[mask] / means, 0.0)
        rel[mask] = vals
    return rel


def scrolled_area(record: InteractionRecord) -> float:
    """Fraction of the page the user has had in view, in [0, 1]."""
    covered = record.c5_window_height + record.f5_scroll_distance
    return min(1.0, covered / record.c4_page_height)


def hit_bottom(record: InteractionRecord) -> bool:
    """Whether scrolling reached the bottom of the page."""
    return record.c5_window_height + record.f5_scroll_distance >= record.c4_page_height


def _complexity_vector(record: InteractionRecord) -> np.ndarray:
    return np.array([
        max(float(record.c1_num_links), RATIO_EPS),
        max(float(record.c2_num_images), RATIO_EPS),
        max(float(record.c3_text_size), RATIO_EPS),
        max(float(record.c4_page_width) * float(record.c4_page_height), RATIO_EPS),
        max(float(record.c6_visible_area_ratio), RATIO_EPS),
    ])


def complexity_ratios(record: InteractionRecord, relative: np.ndarray) -> np.ndarray:
    """The 60 feedback/complexity ratios for one record (feedback-major order)."""
    feedback = np.concatenate([_feedback_vector(record), np.asarray(relative, float)])
    denom = _complexity_vector(record)
    return (feedback[:, None] / denom[None, :]).ravel()


@dataclass
class FeatureMatrix:
    """Per-(user, object) feature rows for one variant, labels attached."""

    variant: Variant
    columns: list[str]
    keys: list[tuple[str, str]]
    X: np.ndarray
    y: np.ndarray

    @property
    def users(self) -> np.ndarray:
        return np.array([u for u, _ in self.keys])

    def subset(self, mask: np.ndarray) -> "FeatureMatrix":
        idx = np.flatnonzero(mask)
        return FeatureMatrix(
            variant=self.variant,
            columns=self.columns,
            keys=[self.keys[i] for i in idx],
            X=self.X[idx],
            y=self.y[idx],
        )

    def write_csv(self, path) -> None:
        with Path(path).open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["user_id", "object_id", *self.columns, "purchase"])
            for (user, obj), row, label in zip(self.keys, self.X, self.y):
                writer.writerow([user, obj, *[repr(float(v)) for v in row],
                                 int(label)])


def build_variant(records: list[InteractionRecord], variant: Variant) -> FeatureMatrix:
    """Materialize one dataset variant; rows sorted by (user_id, object_id)."""
    variant = Variant(variant)
    columns = variant_columns(variant)
    records = sorted(records, key=InteractionRecord.key)
    rel = relative_user_features(records)

    rows = np.zeros((len(records), len(columns)))
    for i, rec in enumerate(records):
        raw = _feedback_vector(rec)
        if variant == Variant.DWELL_TIME:
            row = [raw[1], rel[i, 1]]
        else:
            row = list(raw) + list(rel[i])
            if variant in (Variant.RAW_PLUS_CONTEXT, Variant.ALL_FEATURES):
                row += [
                    float(rec.c1_num_links), float(rec.c2_num_images),
                    float(rec.c3_text_size),
                    float(rec.c4_page_width), float(rec.c4_page_height),
                    float(rec.c5_window_width), float(rec.c5_window_height),
                    float(rec.c6_visible_area_ratio), float(rec.c7_handheld),
                    scrolled_area(rec), float(hit_bottom(rec)),
                ]
            if variant == Variant.ALL_FEATURES:
                row += list(complexity_ratios(rec, rel[i]))
        rows[i] = row

    if not np.all(np.isfinite(rows)):
        raise ValueError("engineered features produced non-finite values")
    y = np.array([1.0 if r.purchase else 0.0 for r in records])
    return FeatureMatrix(variant=variant, columns=columns,
                         keys=[r.key() for r in records], X=rows, y=y)
