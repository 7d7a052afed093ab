"""Ranking metrics and the two leave-one-out protocols.

Ties are compensated exactly: items sharing a score form a tie group and
every metric takes its expected value under a uniformly random ordering
of each group.  For nDCG that means each tied item receives the mean
positional discount over its group; recall@k lets a group straddling the
cutoff contribute fractionally; average position assigns tied items the
mean rank of their group.  The boolean hit@k outcomes used by the sign
test are taken from the materialized ranking, whose ties are already
broken deterministically by object id.

Protocols:

* purchase prediction: one fold per user, the model trained on all other
  users' rows, the user's visited objects ranked by estimated preference;
* recommendation: one fold per purchased (user, object) pair, the
  held-out interaction removed from training, the recommender asked to
  rank all catalog objects the user has not seen in training.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import learners
from .dataset import InteractionRecord, ItemCatalog
from .errors import ContractError, EmptyProfileError
from .recommenders import (PopularSimcatEngine, UserProfile, VsmModel,
                           profile_from_estimates, rank_scores)

DEFAULT_KS = (5, 10)
RANKED_STORE_LIMIT = 60


@dataclass(frozen=True)
class EvalCase:
    """One evaluated ranking: candidates in materialized order plus the truth."""

    case_id: str
    user_id: str
    ranked: tuple[tuple[str, float], ...]
    relevant: frozenset[str]


def _tie_groups(ranked) -> list[tuple[int, int]]:
    """Runs of equal score as (start, end) positions, 1-based inclusive."""
    groups = []
    start = 1
    for i in range(1, len(ranked)):
        if ranked[i][1] != ranked[i - 1][1]:
            groups.append((start, i))
            start = i + 1
    groups.append((start, len(ranked)))
    return groups


def _discounts(n: int) -> np.ndarray:
    return 1.0 / np.log2(np.arange(1, n + 1) + 1.0)


def _mean_group_discounts(ranked) -> np.ndarray:
    """Per-item expected discount given random ordering inside tie groups."""
    disc = _discounts(len(ranked))
    out = np.empty(len(ranked))
    for start, end in _tie_groups(ranked):
        out[start - 1:end] = disc[start - 1:end].mean()
    return out


def ndcg_tie_aware(ranked, relevant) -> float:
    """Binary-relevance nDCG with exact tie compensation.

    Equals the expected plain nDCG over all orderings consistent with the
    tie structure; normalization uses the ideal (tie-free) ranking.
    """
    if not ranked:
        raise ContractError("ranked list must be non-empty")
    if not relevant:
        raise ContractError("relevant set must be non-empty")
    mean_disc = _mean_group_discounts(ranked)
    dcg = sum(mean_disc[i] for i, (oid, _) in enumerate(ranked) if oid in relevant)
    m = sum(1 for oid, _ in ranked if oid in relevant)
    if m == 0:
        return 0.0
    idcg = float(_discounts(m).sum())
    return float(dcg / idcg)


def recall_at_k(ranked, relevant, k: int) -> float:
    """Fraction of relevant items in the top k, fractional across tied cutoffs."""
    if k < 1:
        raise ContractError("k must be >= 1")
    if not relevant:
        return 0.0
    total = 0.0
    for start, end in _tie_groups(ranked):
        overlap = min(end, k) - start + 1
        if overlap <= 0:
            continue
        frac = overlap / (end - start + 1)
        in_group = sum(1 for oid, _ in ranked[start - 1:end] if oid in relevant)
        total += frac * in_group
    return total / len(relevant)


def average_position(ranked, relevant) -> float:
    """Mean rank of relevant items; tied items take their group's mean rank."""
    if not relevant:
        raise ContractError("relevant set must be non-empty")
    ranks = []
    for start, end in _tie_groups(ranked):
        mean_rank = (start + end) / 2.0
        for oid, _ in ranked[start - 1:end]:
            if oid in relevant:
                ranks.append(mean_rank)
    if not ranks:
        raise ContractError("no relevant item present in the ranking")
    return float(np.mean(ranks))


def hit_at_k(ranked, relevant, k: int) -> bool:
    """Whether any relevant item sits in the first k materialized positions."""
    return any(oid in relevant for oid, _ in ranked[:k])


def case_metrics(case: EvalCase, ks=DEFAULT_KS) -> dict:
    metrics: dict = {
        "ndcg": ndcg_tie_aware(case.ranked, case.relevant),
        "avg_position": average_position(case.ranked, case.relevant),
    }
    for k in ks:
        metrics[f"recall@{k}"] = recall_at_k(case.ranked, case.relevant, k)
        metrics[f"hit@{k}"] = hit_at_k(case.ranked, case.relevant, k)
    return metrics


@dataclass
class EvalReport:
    """Per-case outcomes plus aggregate means for one experiment cell."""

    metadata: dict
    ks: tuple[int, ...]
    per_case: list[dict]
    cases: list[EvalCase] = field(default_factory=list, repr=False)

    @classmethod
    def from_cases(cls, cases: list[EvalCase], metadata: dict,
                   ks=DEFAULT_KS) -> "EvalReport":
        cases = sorted(cases, key=lambda c: c.case_id)
        per_case = []
        for case in cases:
            relevant_ranks = sorted(i + 1 for i, (oid, _) in enumerate(case.ranked)
                                    if oid in case.relevant)
            entry = {
                "case_id": case.case_id,
                "user_id": case.user_id,
                "n_candidates": len(case.ranked),
                "relevant": sorted(case.relevant),
                "relevant_ranks": relevant_ranks,
                "metrics": case_metrics(case, ks),
            }
            if len(case.ranked) <= RANKED_STORE_LIMIT:
                entry["ranked"] = [[oid, float(s)] for oid, s in case.ranked]
                entry["ranked_truncated"] = False
            else:
                entry["ranked"] = [[oid, float(s)]
                                   for oid, s in case.ranked[:max(ks)]]
                entry["ranked_truncated"] = True
            per_case.append(entry)
        return cls(metadata=dict(metadata), ks=tuple(ks), per_case=per_case,
                   cases=list(cases))

    def aggregates(self) -> dict:
        agg: dict = {"n_cases": len(self.per_case)}
        if not self.per_case:
            return agg
        names = ["ndcg", "avg_position"] + [f"recall@{k}" for k in self.ks]
        for name in names:
            agg[f"mean_{name}"] = float(np.mean([pc["metrics"][name]
                                                 for pc in self.per_case]))
        for k in self.ks:
            agg[f"hit_rate@{k}"] = float(np.mean([1.0 if pc["metrics"][f"hit@{k}"]
                                                  else 0.0
                                                  for pc in self.per_case]))
        return agg

    def hits(self, k: int) -> dict[str, bool]:
        key = f"hit@{k}"
        if self.per_case and key not in self.per_case[0]["metrics"]:
            raise ContractError(f"report carries no hit@{k} outcomes")
        return {pc["case_id"]: bool(pc["metrics"][key]) for pc in self.per_case}

    def to_json_dict(self) -> dict:
        return {
            "metadata": self.metadata,
            "ks": list(self.ks),
            "aggregates": self.aggregates(),
            "cases": self.per_case,
        }

    def save_json(self, path) -> None:
        Path(path).write_text(
            json.dumps(self.to_json_dict(), indent=1, sort_keys=True) + "\n",
            encoding="utf-8")

    @classmethod
    def load_json(cls, path) -> "EvalReport":
        blob = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls(metadata=blob["metadata"], ks=tuple(blob["ks"]),
                   per_case=blob["cases"])


def make_case(case_id: str, user_id: str, scores: dict[str, float],
              relevant) -> EvalCase:
    return EvalCase(case_id=case_id, user_id=user_id,
                    ranked=tuple(rank_scores(scores)),
                    relevant=frozenset(relevant))


# ---------------------------------------------------------------------------
# leave-one-out protocols


_FOLD_CTX: tuple | None = None


def _purchase_fold(user: str) -> EvalCase:
    matrix, config = _FOLD_CTX
    users = matrix.users
    test_mask = users == user
    model = learners.fit(config, matrix.subset(~test_mask))
    test = matrix.subset(test_mask)
    estimates = learners.predict(model, test)
    scores = {obj: float(r) for (_, obj), r in zip(test.keys, estimates)}
    relevant = {obj for (_, obj), label in zip(test.keys, test.y) if label > 0}
    return make_case(user, user, scores, relevant)


def loocv_purchase_prediction(matrix, config: learners.LearnerConfig,
                              ks=DEFAULT_KS, jobs: int = 1) -> EvalReport:
    """Per-user leave-one-out: train on everyone else, rank the user's objects.

    Expects a cohort-filtered matrix (every user has a purchase among at
    least 3 visited objects).
    """
    global _FOLD_CTX
    users = sorted(set(matrix.users))
    _FOLD_CTX = (matrix, config)
    try:
        if jobs > 1:
            import multiprocessing as mp
            with ProcessPoolExecutor(max_workers=jobs,
                                     mp_context=mp.get_context("fork")) as pool:
                cases = list(pool.map(_purchase_fold, users, chunksize=8))
        else:
            cases = [_purchase_fold(u) for u in users]
    finally:
        _FOLD_CTX = None
    metadata = {
        "protocol": "loocv_purchase_prediction",
        "variant": str(getattr(matrix, "variant", "")),
        "learner": config.kind.value,
        "n_folds": len(users),
    }
    return EvalReport.from_cases(cases, metadata, ks)


def preference_map(report: EvalReport) -> dict[tuple[str, str], float]:
    """The (user, object) -> estimate handoff recovered from fold rankings."""
    prefs: dict[tuple[str, str], float] = {}
    for pc in report.per_case:
        if pc.get("ranked_truncated"):
            raise ContractError("report does not carry full per-object estimates")
        for oid, score in pc["ranked"]:
            prefs[(pc["user_id"], oid)] = float(score)
    return prefs


def loocv_recommendation(records: list[InteractionRecord], catalog: ItemCatalog,
                         recommender: str,
                         preferences: dict[tuple[str, str], float] | None,
                         ks=DEFAULT_KS) -> EvalReport:
    """Per-purchase leave-one-out over the recommender.

    preferences maps every training-visible (user, object) pair to an
    inferred preference; None means the binary baseline (every visited
    object weighted 1).  For each purchased pair the held-out interaction
    is dropped from the training data and from the user's profile, and the
    recommender ranks every catalog object the user has not seen.
    """
    if recommender not in ("vsm", "popular_simcat"):
        raise ContractError(f"unknown recommender {recommender!r}")

    visited: dict[str, list[str]] = {}
    for r in records:
        visited.setdefault(r.user_id, []).append(r.object_id)
    purchases = sorted((r.user_id, r.object_id) for r in records if r.purchase)

    if recommender == "vsm":
        vsm = VsmModel(catalog)
    else:
        engine = PopularSimcatEngine(records, catalog)

    def weight(user: str, obj: str) -> float:
        if preferences is None:
            return 1.0
        try:
            return min(1.0, max(0.0, preferences[(user, obj)]))
        except KeyError:
            raise ContractError(f"no preference estimate for ({user}, {obj})") \
                from None

    cases: list[EvalCase] = []
    n_skipped = 0
    n_empty_profile = 0
    for user, held in purchases:
        if held not in catalog:
            n_skipped += 1
            continue
        remaining = [o for o in visited[user] if o != held]
        profile = UserProfile(user_id=user,
                              engaged={o: weight(user, o) for o in remaining})
        exclude = set(remaining)
        try:
            if recommender == "vsm":
                scores = vsm.score(profile, exclude=exclude)
            else:
                scores = engine.score(profile, exclude=exclude,
                                      held_out=(user, held))
        except EmptyProfileError:
            n_empty_profile += 1
            scores = {oid: 0.0 for oid in catalog.objects if oid not in exclude}
        cases.append(make_case(f"{user}|{held}", user, scores, {held}))

    metadata = {
        "protocol": "loocv_recommendation",
        "recommender": recommender,
        "preference_source": "binary" if preferences is None else "estimates",
        "n_folds": len(purchases),
        "n_skipped": n_skipped,
        "n_empty_profile": n_empty_profile,
    }
    return EvalReport.from_cases(cases, metadata, ks)


# ---------------------------------------------------------------------------
# significance and permutation machinery


@dataclass(frozen=True)
class SignTestResult:
    p_value: float
    n_pos: int
    n_neg: int
    n_cases: int
    flagged: bool  # no discordant pairs, p fixed at 1.0


def sign_test_pvalue(n_pos: int, n_neg: int) -> float:
    """One-sided exact p = P(X >= n_pos), X ~ Binomial(n_pos + n_neg, 1/2)."""
    n = n_pos + n_neg
    if n == 0:
        return 1.0
    num = sum(math.comb(n, i) for i in range(n_pos, n + 1))
    return float(Fraction(num, 2 ** n))


def binomial_significance(report_a: EvalReport, report_b: EvalReport,
                          k: int) -> SignTestResult:
    """Paired sign test on per-case top-k hits (A better than B, one-sided)."""
    hits_a = report_a.hits(k)
    hits_b = report_b.hits(k)
    if set(hits_a) != set(hits_b):
        raise ContractError("reports do not share identical case ids")
    n_pos = sum(1 for cid in hits_a if hits_a[cid] and not hits_b[cid])
    n_neg = sum(1 for cid in hits_a if hits_b[cid] and not hits_a[cid])
    flagged = (n_pos + n_neg) == 0
    p = 1.0 if flagged else sign_test_pvalue(n_pos, n_neg)
    return SignTestResult(p_value=p, n_pos=n_pos, n_neg=n_neg,
                          n_cases=len(hits_a), flagged=flagged)


def label_permutation_means(cases: list[EvalCase], n_draws: int = 1000,
                            rng: np.random.Generator | None = None) -> np.ndarray:
    """Draws of mean nDCG when each case's relevant set is resampled uniformly.

    The rankings (and their tie structure) stay fixed; only which items
    count as relevant is permuted within each case.  This is the exact
    chance distribution of the mean tie-aware nDCG.
    """
    rng = rng if rng is not None else np.random.default_rng(0)
    totals = np.zeros(n_draws)
    for case in cases:
        n = len(case.ranked)
        m = sum(1 for oid, _ in case.ranked if oid in case.relevant)
        if n == 0 or m == 0:
            continue
        mean_disc = _mean_group_discounts(case.ranked)
        idcg = float(_discounts(m).sum())
        keys = rng.random((n_draws, n))
        chosen = np.argpartition(keys, m - 1, axis=1)[:, :m]
        totals += mean_disc[chosen].sum(axis=1) / idcg
    return totals / len(cases)


def label_permutation_band(cases: list[EvalCase], n_draws: int = 1000,
                           rng: np.random.Generator | None = None,
                           lower: float = 2.5,
                           upper: float = 97.5) -> tuple[float, float]:
    draws = label_permutation_means(cases, n_draws, rng)
    return float(np.percentile(draws, lower)), float(np.percentile(draws, upper))


def paired_signflip_pvalue(diffs, n_draws: int = 999,
                           rng: np.random.Generator | None = None) -> float:
    """One-sided paired permutation test of mean(diffs) > 0 by sign flips."""
    rng = rng if rng is not None else np.random.default_rng(0)
    diffs = np.asarray(diffs, float)
    observed = diffs.mean()
    signs = rng.integers(0, 2, size=(n_draws, len(diffs))) * 2 - 1
    stats = (signs * diffs).mean(axis=1)
    return float((1 + np.sum(stats >= observed - 1e-12)) / (n_draws + 1))
