"""Content-based and hybrid recommenders fed by inferred preference.

Two scorers over the object catalog:

* VSM: objects as TF-IDF weighted binary attribute vectors, the user as
  the preference-weighted sum of their engaged objects' vectors, cosine
  similarity as the score.  Numeric attributes are binarized by
  equal-frequency binning into 3 bins.
* Popular SimCat: score = log-popularity of the object times the best
  Jaccard category similarity between the object's categories and the
  user's engaged categories (own categories count as similarity 1).

Preference estimates are clipped to [0, 1] to become VSM profile
weights; for Popular SimCat a positive weight gates category engagement.
Objects the user already interacted with in training are never
recommended.  All rankings break score ties by object id ascending.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dataset import InteractionRecord, ItemCatalog
from .errors import EmptyProfileError

N_NUMERIC_BINS = 3


@dataclass(frozen=True)
class UserProfile:
    """A user's training-visible objects with engagement weights in [0, 1]."""

    user_id: str
    engaged: dict[str, float]

    def positive_objects(self) -> list[str]:
        return sorted(o for o, w in self.engaged.items() if w > 0)


def profile_from_estimates(user_id: str, estimates: dict[str, float]) -> UserProfile:
    """Clip raw preference estimates into profile weights (negatives drop to 0)."""
    weights = {o: min(1.0, max(0.0, float(r))) for o, r in estimates.items()}
    return UserProfile(user_id=user_id, engaged=weights)


def binary_profile(user_id: str, object_ids) -> UserProfile:
    """The baseline profile: every visited object fully relevant."""
    return UserProfile(user_id=user_id, engaged={o: 1.0 for o in object_ids})


@dataclass
class RankedList:
    user_id: str
    items: list[tuple[str, float]]


def rank_scores(scores: dict[str, float], k: int | None = None) -> list[tuple[str, float]]:
    """Order (object, score) pairs score-descending, ties by object id ascending."""
    ordered = sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))
    return ordered if k is None else ordered[:k]


class VsmModel:
    """TF-IDF attribute space over a catalog; cosine scoring against profiles."""

    def __init__(self, catalog: ItemCatalog, n_bins: int = N_NUMERIC_BINS):
        self.catalog = catalog
        self.object_ids = sorted(catalog.objects)
        self._index: dict[tuple[str, str], int] = {}
        n = len(self.object_ids)

        # decide per attribute whether values are numeric, set bin edges
        values_by_attr: dict[str, list[str]] = {}
        for oid in self.object_ids:
            for name, vals in catalog.objects[oid].attributes.items():
                values_by_attr.setdefault(name, []).extend(vals)
        self._bin_edges: dict[str, np.ndarray] = {}
        for name, vals in sorted(values_by_attr.items()):
            nums = _as_floats(vals)
            if nums is not None:
                qs = np.quantile(nums, [i / n_bins for i in range(1, n_bins)])
                self._bin_edges[name] = np.unique(qs)

        rows: list[list[int]] = []
        for oid in self.object_ids:
            cols = sorted({self._column(name, v)
                           for name, vals in catalog.objects[oid].attributes.items()
                           for v in vals})
            rows.append([self._col_index(c) for c in cols])

        df = np.zeros(len(self._index))
        for cols in rows:
            df[cols] += 1
        idf = np.log(n / df)

        self.vectors = np.zeros((n, len(self._index)))
        for i, cols in enumerate(rows):
            self.vectors[i, cols] = idf[cols]
        self.norms = np.linalg.norm(self.vectors, axis=1)
        self._row = {oid: i for i, oid in enumerate(self.object_ids)}

    def _column(self, name: str, value: str) -> tuple[str, str]:
        edges = self._bin_edges.get(name)
        if edges is None:
            return (name, value)
        b = int(np.searchsorted(edges, float(value), side="right"))
        return (name, f"bin{b}")

    def _col_index(self, col: tuple[str, str]) -> int:
        if col not in self._index:
            self._index[col] = len(self._index)
        return self._index[col]

    def score(self, profile: UserProfile,
              exclude: frozenset | set | None = None) -> dict[str, float]:
        """Cosine of the profile vector against every non-excluded object."""
        exclude = exclude if exclude is not None else set(profile.engaged)
        pvec = np.zeros(self.vectors.shape[1])
        weight_total = 0.0
        for oid in sorted(profile.engaged):
            w = profile.engaged[oid]
            if w > 0 and oid in self._row:
                pvec += w * self.vectors[self._row[oid]]
                weight_total += w
        if weight_total <= 0:
            raise EmptyProfileError(f"user {profile.user_id}: no positive weights")
        pnorm = float(np.linalg.norm(pvec))
        if pnorm == 0.0:
            raise EmptyProfileError(f"user {profile.user_id}: zero profile vector")
        sims = self.vectors @ pvec
        denom = self.norms * pnorm
        with np.errstate(divide="ignore", invalid="ignore"):
            sims = np.where(denom > 0, sims / denom, 0.0)
        return {oid: float(sims[i]) for oid, i in self._row.items()
                if oid not in exclude}


def vsm_recommend(profile: UserProfile, catalog: ItemCatalog, k: int,
                  model: VsmModel | None = None) -> RankedList:
    model = model if model is not None else VsmModel(catalog)
    scores = model.score(profile)
    return RankedList(user_id=profile.user_id, items=rank_scores(scores, k))


def _as_floats(values) -> np.ndarray | None:
    try:
        return np.array([float(v) for v in values])
    except ValueError:
        return None


def _pair(a: str, b: str) -> tuple[str, str]:
    return (a, b) if a <= b else (b, a)


def _jaccard(a: set, b: set) -> float:
    if not a and not b:
        return 0.0
    union = len(a | b)
    return len(a & b) / union if union else 0.0


@dataclass
class CategoryStats:
    """Training-side state of Popular SimCat."""

    sim: dict[tuple[str, str], float]
    pop: dict[str, float]

    def similarity(self, a: str, b: str) -> float:
        return self.sim.get(_pair(a, b), 0.0)


def _category_visitors(records, catalog) -> dict[str, set[str]]:
    visitors: dict[str, set[str]] = {c: set() for c in catalog.categories()}
    for r in records:
        obj = catalog.objects.get(r.object_id)
        if obj is None:
            continue
        for c in obj.categories:
            visitors[c].add(r.user_id)
    return visitors


def category_similarity(records, catalog: ItemCatalog) -> dict[tuple[str, str], float]:
    """Jaccard similarity of category visitor sets, over all category pairs."""
    visitors = _category_visitors(records, catalog)
    cats = sorted(visitors)
    sim: dict[tuple[str, str], float] = {}
    for i, a in enumerate(cats):
        for b in cats[i:]:
            sim[(a, b)] = _jaccard(visitors[a], visitors[b])
    return sim


def popularity(records) -> dict[str, float]:
    """Log of total view count per object; zero total maps to 0."""
    totals: dict[str, float] = {}
    for r in records:
        totals[r.object_id] = totals.get(r.object_id, 0.0) + r.f1_view_count
    return {o: math.log(t) if t > 0 else 0.0 for o, t in sorted(totals.items())}


def fit_category_stats(records, catalog: ItemCatalog) -> CategoryStats:
    return CategoryStats(sim=category_similarity(records, catalog),
                         pop=popularity(records))


def popular_simcat_recommend(profile: UserProfile, stats: CategoryStats,
                             catalog: ItemCatalog, k: int) -> RankedList:
    """Rank candidates by log-popularity times best engaged-category similarity."""
    engaged_cats: set[str] = set()
    for oid in profile.positive_objects():
        obj = catalog.objects.get(oid)
        if obj is not None:
            engaged_cats.update(obj.categories)
    if not engaged_cats:
        raise EmptyProfileError(f"user {profile.user_id}: no engaged categories")

    best_sim: dict[str, float] = {}
    for c in catalog.categories():
        if c in engaged_cats:
            best_sim[c] = 1.0
        else:
            best_sim[c] = max((stats.similarity(c, e) for e in engaged_cats),
                              default=0.0)

    exclude = set(profile.engaged)
    scores: dict[str, float] = {}
    for oid in sorted(catalog.objects):
        if oid in exclude:
            continue
        obj = catalog.objects[oid]
        sim = max(best_sim.get(c, 0.0) for c in obj.categories)
        scores[oid] = stats.pop.get(oid, 0.0) * sim
    return RankedList(user_id=profile.user_id, items=rank_scores(scores, k))


class PopularSimcatEngine:
    """Fold-friendly Popular SimCat with incremental hold-one-out adjustment.

    Training state is built once; removing a single (user, object)
    interaction only touches that object's view total and the user's
    membership in the object's categories, so fold scoring adjusts those
    and recomputes the handful of affected Jaccard values on the fly.
    """

    def __init__(self, records, catalog: ItemCatalog):
        self.catalog = catalog
        self.visitors = _category_visitors(records, catalog)
        self.views: dict[str, float] = {}
        self.view_of: dict[tuple[str, str], int] = {}
        self.user_cat_count: dict[tuple[str, str], int] = {}
        for r in records:
            self.views[r.object_id] = self.views.get(r.object_id, 0.0) + r.f1_view_count
            self.view_of[(r.user_id, r.object_id)] = r.f1_view_count
            obj = catalog.objects.get(r.object_id)
            if obj is None:
                continue
            for c in obj.categories:
                key = (r.user_id, c)
                self.user_cat_count[key] = self.user_cat_count.get(key, 0) + 1

    def _pop(self, oid: str, held_out: tuple[str, str] | None) -> float:
        total = self.views.get(oid, 0.0)
        if held_out is not None and oid == held_out[1]:
            total -= self.view_of.get(held_out, 0)
        return math.log(total) if total > 0 else 0.0

    def score(self, profile: UserProfile, exclude: set,
              held_out: tuple[str, str] | None = None) -> dict[str, float]:
        """Scores for all non-excluded catalog objects.

        held_out, when given, is a (user, object) training interaction to
        pretend was never observed.
        """
        engaged_cats: set[str] = set()
        for oid in profile.positive_objects():
            obj = self.catalog.objects.get(oid)
            if obj is not None:
                engaged_cats.update(obj.categories)
        if not engaged_cats:
            raise EmptyProfileError(f"user {profile.user_id}: no engaged categories")

        dropped: set[str] = set()
        if held_out is not None:
            user, oid = held_out
            obj = self.catalog.objects.get(oid)
            if obj is not None:
                dropped = {c for c in obj.categories
                           if self.user_cat_count.get((user, c), 0) <= 1}

        def visitors_of(c: str) -> set[str]:
            base = self.visitors.get(c, set())
            if held_out is not None and c in dropped:
                return base - {held_out[0]}
            return base

        engaged = sorted(engaged_cats)
        best_sim: dict[str, float] = {}
        for c in self.visitors:
            if c in engaged_cats:
                best_sim[c] = 1.0
            else:
                vc = visitors_of(c)
                best_sim[c] = max((_jaccard(vc, visitors_of(e)) for e in engaged),
                                  default=0.0)

        scores: dict[str, float] = {}
        for oid in sorted(self.catalog.objects):
            if oid in exclude:
                continue
            obj = self.catalog.objects[oid]
            sim = max(best_sim.get(c, 0.0) for c in obj.categories)
            scores[oid] = self._pop(oid, held_out) * sim
        return scores


def write_ranked_lists(lists: list[RankedList], path) -> None:
    """Export as CSV: user_id,rank,object_id,score."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["user_id", "rank", "object_id", "score"])
        for rl in lists:
            for rank, (oid, score) in enumerate(rl.items, start=1):
                writer.writerow([rl.user_id, rank, oid, repr(float(score))])
