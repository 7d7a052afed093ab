"""Synthetic interaction and catalog generator for desk-scale experiments.

The generator plants a purchase signal whose strength is controlled by
``signal_strength``: purchases are first drawn uniformly among each
user's visited objects, then engagement is sampled from a distribution
shifted upward for purchased objects.  Raw feedback volumes are the
product of engagement and presentation context (dwell time scales with
text length, mouse distance with link/image counts, scroll distance with
page height), so context-normalized features separate the classes better
than raw volumes do.  With ``signal_strength=0`` labels are independent
of every feature.

Everything is drawn from a single seeded generator in a fixed order, so
a given config always produces byte-identical datasets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dataset import CatalogObject, InteractionRecord, ItemCatalog
from .errors import ConfigError

TOUR_TYPES = ["beach", "city", "hiking", "ski", "wellness", "safari"]
COUNTRY_REGION = {
    "it": "south_eu", "es": "south_eu", "gr": "south_eu", "hr": "south_eu",
    "fr": "west_eu", "de": "west_eu", "at": "west_eu",
    "cz": "central_eu", "sk": "central_eu",
    "eg": "africa", "tn": "africa", "th": "asia",
}
BOARDS = ["all_inclusive", "half_board", "breakfast", "self_catering"]
TRANSPORT = ["air", "bus", "own"]


@dataclass(frozen=True)
class SynthConfig:
    seed: int = 0
    n_users: int = 100
    n_objects: int = 150
    signal_strength: float = 0.8
    handheld_rate: float = 0.3
    visits_shape: float = 1.3
    max_visits: int = 40
    extra_purchase_rate: float = 0.04


def _zipf_weights(n: int, exponent: float = 0.8) -> np.ndarray:
    w = 1.0 / np.arange(1, n + 1) ** exponent
    return w / w.sum()


@dataclass(frozen=True)
class _ObjectContext:
    text: int
    links: int
    images: int
    base_height: int


def _make_catalog(cfg: SynthConfig, rng: np.random.Generator):
    countries = sorted(COUNTRY_REGION)
    type_w = _zipf_weights(len(TOUR_TYPES), 0.7)
    objects: dict[str, CatalogObject] = {}
    contexts: dict[str, _ObjectContext] = {}
    for i in range(cfg.n_objects):
        oid = f"o{i:04d}"
        tour_type = TOUR_TYPES[rng.choice(len(TOUR_TYPES), p=type_w)]
        country = countries[rng.integers(len(countries))]
        region = COUNTRY_REGION[country]
        quality = int(rng.integers(2, 6))
        nights = int(rng.choice([3, 7, 10, 14]))
        price = round(float(np.exp(rng.normal(math.log(25.0 * quality), 0.3))), 2)
        discount = int(rng.choice([0, 0, 0, 5, 10, 15, 20]))
        family = bool(rng.random() < 0.4)

        categories = {f"{tour_type}-{region}"}
        if discount >= 15:
            categories.add("deals")
        if family:
            categories.add("family")

        attributes = {
            "tour_type": (tour_type,),
            "country": (country,),
            "region": (region,),
            "quality": (str(quality),),
            "board": (str(rng.choice(BOARDS)),),
            "transport": (str(rng.choice(TRANSPORT)),),
            "nights": (str(nights),),
            "price_per_night": (repr(price),),
            "discount_pct": (str(discount),),
            "family_friendly": ("yes" if family else "no",),
        }
        objects[oid] = CatalogObject(object_id=oid, categories=frozenset(categories),
                                     attributes=attributes)

        text = int(np.clip(np.exp(rng.normal(math.log(1600.0), 1.1)), 150, 60000))
        images = 2 + int(rng.poisson(text / 700.0))
        links = 15 + int(rng.poisson(text / 120.0))
        base_height = int(np.clip(700 + 0.45 * text + 60 * images
                                  + rng.normal(0, 150), 600, None))
        contexts[oid] = _ObjectContext(text=text, links=links, images=images,
                                       base_height=base_height)
    return ItemCatalog(objects=objects), contexts


def synthesize(config: SynthConfig) -> tuple[list[InteractionRecord], ItemCatalog]:
    """Generate an aggregated interaction set and a matching catalog."""
    cfg = config
    if not (0.0 <= cfg.signal_strength <= 1.0):
        raise ConfigError("signal_strength must be in [0, 1]")
    if cfg.n_users < 1 or cfg.n_objects < 1:
        raise ConfigError("n_users and n_objects must be >= 1")
    if cfg.n_objects < 3:
        raise ConfigError("need at least 3 objects for an evaluable cohort")

    rng = np.random.default_rng(cfg.seed)
    catalog, contexts = _make_catalog(cfg, rng)
    object_ids = sorted(catalog.objects)
    base_pop = _zipf_weights(len(object_ids), 0.8)

    obj_type = np.array([catalog.objects[o].attributes["tour_type"][0]
                         for o in object_ids])
    obj_region = np.array([catalog.objects[o].attributes["region"][0]
                           for o in object_ids])
    regions = sorted(set(COUNTRY_REGION.values()))
    type_w = _zipf_weights(len(TOUR_TYPES), 0.7)

    max_visits = min(cfg.max_visits, cfg.n_objects)
    records: list[InteractionRecord] = []
    for ui in range(cfg.n_users):
        user_id = f"u{ui:04d}"
        handheld = bool(rng.random() < cfg.handheld_rate)
        speed = float(np.exp(rng.normal(0.0, 0.35)))
        fav_type = TOUR_TYPES[rng.choice(len(TOUR_TYPES), p=type_w)]
        fav_region = regions[rng.integers(len(regions))]

        n_visits = 3 + int(rng.pareto(cfg.visits_shape) * 2)
        n_visits = min(n_visits, max_visits)

        weights = base_pop * np.where(obj_type == fav_type, 3.0, 1.0) \
            * np.where(obj_region == fav_region, 2.0, 1.0)
        weights = weights / weights.sum()
        visited = rng.choice(len(object_ids), size=n_visits, replace=False, p=weights)

        n_buy = 1 + int(rng.binomial(n_visits - 1, cfg.extra_purchase_rate))
        bought = set(rng.choice(n_visits, size=n_buy, replace=False).tolist())

        for vi, obj_idx in enumerate(visited):
            oid = object_ids[int(obj_idx)]
            ctx = contexts[oid]
            purchased = vi in bought

            z = float(rng.gamma(2.0, 0.5))
            if purchased and cfg.signal_strength > 0:
                z += cfg.signal_strength * (0.5 + float(rng.gamma(2.0, 0.5)))

            if handheld:
                win_w = int(np.clip(390 + rng.normal(0, 15), 300, None))
                win_h = int(np.clip(680 + rng.normal(0, 40), 400, None))
                page_w = win_w
                page_h = int(np.clip(ctx.base_height * 2.4 + rng.normal(0, 100),
                                     win_h + 1, None))
            else:
                win_w = int(np.clip(1280 + rng.normal(0, 80), 800, None))
                win_h = int(np.clip(780 + rng.normal(0, 60), 500, None))
                page_w = int(np.clip(1180 + rng.normal(0, 40), 900, None))
                page_h = int(np.clip(ctx.base_height + rng.normal(0, 80), 600, None))

            # dwell mixes engaged reading with idle time; mouse mixes purposeful
            # movement with wandering; both scale with page complexity.  Scroll
            # coverage is the cleanest engagement channel but its raw distance
            # is confounded by how much page there is to scroll.
            f1 = 1 + int(rng.poisson(0.15 * z * float(np.exp(rng.normal(0, 0.6)))))
            read_time = z * (ctx.text / 1500.0) * float(np.exp(rng.normal(0, 0.3))) * 25.0
            idle = float(np.exp(rng.normal(math.log(20.0), 1.0)))
            f2 = round(speed * (read_time + idle), 3)
            wander = 0.5 * float(np.exp(rng.normal(0, 0.8)))
            f3 = round(speed * (0.4 * z + wander) * (ctx.links + 2 * ctx.images)
                       * float(np.exp(rng.normal(0, 0.5))) * 3.0, 1)
            f4 = round(f3 / (180.0 * float(np.exp(rng.normal(0, 0.3)))), 3)
            cover = 1.0 - math.exp(-1.1 * z * float(np.exp(rng.normal(0, 0.18))))
            need = max(0, page_h - win_h)
            f5 = round(need * cover * (1.0 + 0.35 * float(rng.random())), 1)
            f6 = round(f5 / (250.0 * float(np.exp(rng.normal(0, 0.3)))), 3)

            records.append(InteractionRecord(
                user_id=user_id,
                object_id=oid,
                f1_view_count=f1,
                f2_dwell_time=f2,
                f3_mouse_distance=f3,
                f4_mouse_time=f4,
                f5_scroll_distance=f5,
                f6_scroll_time=f6,
                c1_num_links=ctx.links,
                c2_num_images=ctx.images,
                c3_text_size=ctx.text,
                c4_page_width=page_w,
                c4_page_height=page_h,
                c5_window_width=win_w,
                c5_window_height=win_h,
                c6_visible_area_ratio=(win_w * win_h) / (page_w * page_h),
                c7_handheld=handheld,
                purchase=purchased,
            ))

    records.sort(key=InteractionRecord.key)
    return records, catalog
