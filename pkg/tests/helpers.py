"""Shared fixtures-in-spirit: record factories and tiny CSV writers."""

from ctxrec.dataset import CatalogObject, InteractionRecord, ItemCatalog

CSV_HEADER = ("user_id,object_id,f1_view_count,f2_dwell_time,f3_mouse_distance,"
              "f4_mouse_time,f5_scroll_distance,f6_scroll_time,c1_links,"
              "c2_images,c3_text,c4_page_w,c4_page_h,c5_win_w,c5_win_h,"
              "c6_visible_ratio,c7_handheld,purchase")


def make_record(user="u1", obj="o1", f1=1, f2=10.0, f3=5.0, f4=1.0, f5=0.0,
                f6=0.0, c1=10, c2=5, c3=1000, c4w=1000, c4h=1000, c5w=500,
                c5h=500, handheld=False, purchase=False):
    return InteractionRecord(
        user_id=user, object_id=obj,
        f1_view_count=f1, f2_dwell_time=f2, f3_mouse_distance=f3,
        f4_mouse_time=f4, f5_scroll_distance=f5, f6_scroll_time=f6,
        c1_num_links=c1, c2_num_images=c2, c3_text_size=c3,
        c4_page_width=c4w, c4_page_height=c4h,
        c5_window_width=c5w, c5_window_height=c5h,
        c6_visible_area_ratio=(c5w * c5h) / (c4w * c4h),
        c7_handheld=handheld, purchase=purchase,
    )


def csv_row(user="u1", obj="o1", f1=1, f2=10.0, f3=5.0, f4=1.0, f5=0.0, f6=0.0,
            c1=10, c2=5, c3=1000, c4w=1000, c4h=1000, c5w=500, c5h=500,
            c6="", handheld=0, purchase=0):
    return (f"{user},{obj},{f1},{f2},{f3},{f4},{f5},{f6},{c1},{c2},{c3},"
            f"{c4w},{c4h},{c5w},{c5h},{c6},{handheld},{purchase}")


def write_interactions_csv(path, rows):
    path.write_text("\n".join([CSV_HEADER, *rows]) + "\n", encoding="utf-8")


def make_catalog(spec):
    """spec: {object_id: (categories, attributes)} with attributes name->values."""
    objects = {}
    for oid, (cats, attrs) in spec.items():
        objects[oid] = CatalogObject(
            object_id=oid,
            categories=frozenset(cats),
            attributes={k: tuple(v) if isinstance(v, (list, tuple)) else (v,)
                        for k, v in attrs.items()},
        )
    return ItemCatalog(objects=objects)
