"""Loading, validation, aggregation and cohort filtering of interaction data.

The canonical interchange format is a UTF-8 CSV with header

    user_id,object_id,f1_view_count,f2_dwell_time,f3_mouse_distance,
    f4_mouse_time,f5_scroll_distance,f6_scroll_time,c1_links,c2_images,
    c3_text,c4_page_w,c4_page_h,c5_win_w,c5_win_h,c6_visible_ratio,
    c7_handheld,purchase

(one line, shown wrapped).  Booleans are 0/1, decimals use a dot, no
thousands separators.  Exports with other column names are supported
through a column mapping passed to :func:`load_interactions`.

Multiple raw events for the same (user, object) pair are aggregated:
volume feedback f1..f6 is summed, presentation context keeps the last
observation, and the purchase flag is OR-ed.
"""

from __future__ import annotations

import csv
import sys
from dataclasses import dataclass, replace
from pathlib import Path

from .errors import CohortError, SchemaError

C6_TOLERANCE = 1e-6

#: canonical CSV column order
COLUMNS = [
    "user_id", "object_id",
    "f1_view_count", "f2_dwell_time", "f3_mouse_distance", "f4_mouse_time",
    "f5_scroll_distance", "f6_scroll_time",
    "c1_links", "c2_images", "c3_text",
    "c4_page_w", "c4_page_h", "c5_win_w", "c5_win_h",
    "c6_visible_ratio", "c7_handheld", "purchase",
]


@dataclass(frozen=True, slots=True)
class InteractionRecord:
    """One aggregated (user, object) interaction with its presentation context."""

    user_id: str
    object_id: str
    f1_view_count: int
    f2_dwell_time: float
    f3_mouse_distance: float
    f4_mouse_time: float
    f5_scroll_distance: float
    f6_scroll_time: float
    c1_num_links: int
    c2_num_images: int
    c3_text_size: int
    c4_page_width: int
    c4_page_height: int
    c5_window_width: int
    c5_window_height: int
    c6_visible_area_ratio: float
    c7_handheld: bool
    purchase: bool

    def key(self) -> tuple[str, str]:
        return (self.user_id, self.object_id)


@dataclass(frozen=True)
class RejectedRow:
    line_no: int
    reason: str


@dataclass
class LoadResult:
    records: list[InteractionRecord]
    rejects: list[RejectedRow]


@dataclass(frozen=True)
class DatasetSummary:
    n_users: int
    n_objects: int
    n_purchases: int
    n_records: int


@dataclass(frozen=True)
class CatalogObject:
    object_id: str
    categories: frozenset[str]
    attributes: dict[str, tuple[str, ...]]


@dataclass
class ItemCatalog:
    """Objects with content attributes and category memberships."""

    objects: dict[str, CatalogObject]

    def __contains__(self, object_id: str) -> bool:
        return object_id in self.objects

    def __len__(self) -> int:
        return len(self.objects)

    def categories(self) -> list[str]:
        cats = set()
        for obj in self.objects.values():
            cats.update(obj.categories)
        return sorted(cats)

    def missing_objects(self, records) -> list[str]:
        """Object ids referenced by interactions that the catalog cannot resolve."""
        missing = {r.object_id for r in records} - set(self.objects)
        return sorted(missing)


def _parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true"):
        return True
    if t in ("0", "false"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _visible_ratio(c4_w: int, c4_h: int, c5_w: int, c5_h: int) -> float:
    return (c5_w * c5_h) / (c4_w * c4_h)


_INT_FIELDS = ["f1_view_count", "c1_links", "c2_images", "c3_text",
               "c4_page_w", "c4_page_h", "c5_win_w", "c5_win_h"]
_FLOAT_FIELDS = ["f2_dwell_time", "f3_mouse_distance", "f4_mouse_time",
                 "f5_scroll_distance", "f6_scroll_time"]
_FEEDBACK_FIELDS = ["f1_view_count", "f2_dwell_time", "f3_mouse_distance",
                    "f4_mouse_time", "f5_scroll_distance", "f6_scroll_time"]


def _parse_row(row: dict, dwell_unit: str) -> InteractionRecord:
    """Parse and validate one CSV row; raises ValueError with a reject reason."""
    vals: dict = {}
    for col in ("user_id", "object_id"):
        v = row.get(col, "").strip()
        if not v:
            raise ValueError(f"missing {col}")
        vals[col] = v
    for col in _INT_FIELDS:
        raw = row.get(col, "").strip()
        try:
            vals[col] = int(raw)
        except ValueError:
            raise ValueError(f"unparseable {col}") from None
    for col in _FLOAT_FIELDS:
        raw = row.get(col, "").strip()
        try:
            vals[col] = float(raw)
        except ValueError:
            raise ValueError(f"unparseable {col}") from None
    for col in ("c7_handheld", "purchase"):
        try:
            vals[col] = _parse_bool(row.get(col, ""))
        except ValueError:
            raise ValueError(f"unparseable {col}") from None

    for col in _FEEDBACK_FIELDS:
        if vals[col] < 0:
            raise ValueError("negative feedback")
    for col in ("c1_links", "c2_images", "c3_text"):
        if vals[col] < 0:
            raise ValueError("negative context")
    if vals["c4_page_w"] <= 0 or vals["c4_page_h"] <= 0:
        raise ValueError("zero page dimension")
    if vals["c5_win_w"] <= 0 or vals["c5_win_h"] <= 0:
        raise ValueError("zero window dimension")

    if dwell_unit == "milliseconds":
        vals["f2_dwell_time"] /= 1000.0

    ratio = _visible_ratio(vals["c4_page_w"], vals["c4_page_h"],
                           vals["c5_win_w"], vals["c5_win_h"])
    raw_c6 = row.get("c6_visible_ratio", "").strip()
    if raw_c6:
        try:
            c6 = float(raw_c6)
        except ValueError:
            raise ValueError("unparseable c6_visible_ratio") from None
        if abs(c6 - ratio) > C6_TOLERANCE:
            raise ValueError("inconsistent visible ratio")
    else:
        c6 = ratio

    return InteractionRecord(
        user_id=vals["user_id"],
        object_id=vals["object_id"],
        f1_view_count=vals["f1_view_count"],
        f2_dwell_time=vals["f2_dwell_time"],
        f3_mouse_distance=vals["f3_mouse_distance"],
        f4_mouse_time=vals["f4_mouse_time"],
        f5_scroll_distance=vals["f5_scroll_distance"],
        f6_scroll_time=vals["f6_scroll_time"],
        c1_num_links=vals["c1_links"],
        c2_num_images=vals["c2_images"],
        c3_text_size=vals["c3_text"],
        c4_page_width=vals["c4_page_w"],
        c4_page_height=vals["c4_page_h"],
        c5_window_width=vals["c5_win_w"],
        c5_window_height=vals["c5_win_h"],
        c6_visible_area_ratio=c6,
        c7_handheld=vals["c7_handheld"],
        purchase=vals["purchase"],
    )


def aggregate(records) -> list[InteractionRecord]:
    """Merge duplicate (user, object) rows: sum f1..f6, keep last context, OR purchase."""
    merged: dict[tuple[str, str], InteractionRecord] = {}
    for rec in records:
        prev = merged.get(rec.key())
        if prev is None:
            merged[rec.key()] = rec
        else:
            merged[rec.key()] = replace(
                rec,
                f1_view_count=prev.f1_view_count + rec.f1_view_count,
                f2_dwell_time=prev.f2_dwell_time + rec.f2_dwell_time,
                f3_mouse_distance=prev.f3_mouse_distance + rec.f3_mouse_distance,
                f4_mouse_time=prev.f4_mouse_time + rec.f4_mouse_time,
                f5_scroll_distance=prev.f5_scroll_distance + rec.f5_scroll_distance,
                f6_scroll_time=prev.f6_scroll_time + rec.f6_scroll_time,
                purchase=prev.purchase or rec.purchase,
            )
    return sorted(merged.values(), key=InteractionRecord.key)


def load_interactions(path, schema: dict[str, str] | None = None,
                      dwell_unit: str = "seconds") -> LoadResult:
    """Load, validate and aggregate an interactions CSV.

    schema maps canonical column names to the file's column names for
    non-canonical exports; omitted entries default to the canonical name.
    Rows failing validation are collected in the result, never silently
    dropped.  dwell_unit may be "seconds" or "milliseconds".
    """
    if dwell_unit not in ("seconds", "milliseconds"):
        raise ValueError(f"unknown dwell_unit {dwell_unit!r}")
    mapping = {col: col for col in COLUMNS}
    if schema:
        mapping.update(schema)

    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        required = [mapping[col] for col in COLUMNS if col != "c6_visible_ratio"]
        missing = [col for col in required if col not in header]
        if missing:
            raise SchemaError(f"missing columns in {path}: {', '.join(missing)}")
        has_c6 = mapping["c6_visible_ratio"] in header

        rows: list[InteractionRecord] = []
        rejects: list[RejectedRow] = []
        for line_no, raw in enumerate(reader, start=2):
            row = {col: raw.get(mapping[col], "") or "" for col in COLUMNS}
            if not has_c6:
                row["c6_visible_ratio"] = ""
            try:
                rows.append(_parse_row(row, dwell_unit))
            except ValueError as exc:
                rejects.append(RejectedRow(line_no, str(exc)))
    return LoadResult(records=aggregate(rows), rejects=rejects)


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_interactions(records, path) -> None:
    """Serialize records in the canonical CSV layout (round-trip exact)."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(COLUMNS)
        for r in sorted(records, key=InteractionRecord.key):
            writer.writerow([
                r.user_id, r.object_id,
                _fmt(r.f1_view_count), _fmt(r.f2_dwell_time),
                _fmt(r.f3_mouse_distance), _fmt(r.f4_mouse_time),
                _fmt(r.f5_scroll_distance), _fmt(r.f6_scroll_time),
                _fmt(r.c1_num_links), _fmt(r.c2_num_images), _fmt(r.c3_text_size),
                _fmt(r.c4_page_width), _fmt(r.c4_page_height),
                _fmt(r.c5_window_width), _fmt(r.c5_window_height),
                _fmt(r.c6_visible_area_ratio), _fmt(r.c7_handheld), _fmt(r.purchase),
            ])


def load_catalog(path) -> tuple[ItemCatalog, list[RejectedRow]]:
    """Load the object catalog CSV: object_id,category_ids,attributes.

    category_ids is a semicolon-separated non-empty list; attributes is a
    semicolon-separated list of name=value entries (names may repeat for
    multi-valued attributes).
    """
    objects: dict[str, CatalogObject] = {}
    rejects: list[RejectedRow] = []
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in ("object_id", "category_ids", "attributes") if c not in header]
        if missing:
            raise SchemaError(f"missing columns in {path}: {', '.join(missing)}")
        for line_no, raw in enumerate(reader, start=2):
            object_id = (raw.get("object_id") or "").strip()
            if not object_id:
                rejects.append(RejectedRow(line_no, "missing object_id"))
                continue
            cats = frozenset(c.strip() for c in (raw.get("category_ids") or "").split(";")
                             if c.strip())
            if not cats:
                rejects.append(RejectedRow(line_no, "empty categories"))
                continue
            attrs: dict[str, list[str]] = {}
            bad = False
            for chunk in (raw.get("attributes") or "").split(";"):
                chunk = chunk.strip()
                if not chunk:
                    continue
                name, sep, value = chunk.partition("=")
                if not sep or not name.strip():
                    rejects.append(RejectedRow(line_no, f"malformed attribute {chunk!r}"))
                    bad = True
                    break
                attrs.setdefault(name.strip(), []).append(value.strip())
            if bad:
                continue
            objects[object_id] = CatalogObject(
                object_id=object_id,
                categories=cats,
                attributes={k: tuple(sorted(v)) for k, v in sorted(attrs.items())},
            )
    return ItemCatalog(objects=objects), rejects


def write_catalog(catalog: ItemCatalog, path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["object_id", "category_ids", "attributes"])
        for oid in sorted(catalog.objects):
            obj = catalog.objects[oid]
            attrs = ";".join(f"{name}={value}"
                             for name in sorted(obj.attributes)
                             for value in obj.attributes[name])
            writer.writerow([oid, ";".join(sorted(obj.categories)), attrs])


def filter_evaluation_cohort(records) -> list[InteractionRecord]:
    """Keep users who visited at least 3 distinct objects and bought at least one."""
    by_user: dict[str, list[InteractionRecord]] = {}
    for rec in records:
        by_user.setdefault(rec.user_id, []).append(rec)
    kept: list[InteractionRecord] = []
    for user, recs in by_user.items():
        objects = {r.object_id for r in recs}
        if len(objects) >= 3 and any(r.purchase for r in recs):
            kept.extend(recs)
    if not kept:
        raise CohortError("no user passes the evaluation cohort filter")
    return sorted(kept, key=InteractionRecord.key)


def summarize(records) -> DatasetSummary:
    users = {r.user_id for r in records}
    objects = {r.object_id for r in records}
    purchases = sum(1 for r in records if r.purchase)
    return DatasetSummary(n_users=len(users), n_objects=len(objects),
                          n_purchases=purchases, n_records=len(records))


def write_validation_report(rejects, stream=None, path=None) -> None:
    """Write the line-numbered reject list to stderr and optionally a file."""
    stream = stream if stream is not None else sys.stderr
    lines = [f"line {r.line_no}: {r.reason}" for r in rejects]
    for line in lines:
        print(line, file=stream)
    if path is not None:
        Path(path).write_text("\n".join(lines) + ("\n" if lines else ""),
                              encoding="utf-8")
