"""Command line entry point: run the full experiment grid from one config.

Subcommands: validate, synth, features, predict, recommend, significance,
report.  Exit codes: 0 ok, 1 validation failure, 2 I/O error, 3 contract
error.

The config file is INI-style (flat key-value with sections); see the
README for a complete example.  Environment variables CTXREC_INTERACTIONS,
CTXREC_CATALOG and CTXREC_OUT override the corresponding paths only.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import evaluation, learners
from .dataset import (filter_evaluation_cohort, load_catalog, load_interactions,
                      summarize, write_catalog, write_interactions,
                      write_validation_report)
from .errors import EXIT_CONTRACT, EXIT_IO, EXIT_OK, EXIT_VALIDATION, CtxrecError
from .features import Variant, build_variant
from .synth import SynthConfig, synthesize
from .utils import subseed

DEFAULT_VARIANTS = [v.value for v in Variant]
DEFAULT_LEARNERS = list(learners.ALL_KINDS)
DEFAULT_RECOMMENDERS = ["vsm", "popular_simcat"]


@dataclass
class ExperimentConfig:
    interactions: str | None = None
    catalog: str | None = None
    dwell_unit: str = "seconds"
    synth: SynthConfig | None = None
    variants: list[str] = field(default_factory=lambda: list(DEFAULT_VARIANTS))
    learners: list[str] = field(default_factory=lambda: list(DEFAULT_LEARNERS))
    recommenders: list[str] = field(default_factory=lambda: list(DEFAULT_RECOMMENDERS))
    ks: list[int] = field(default_factory=lambda: [5, 10])
    seed: int = 0
    out: str = "runs/out"
    jobs: int = 1
    lam: float | None = None
    prune_confidence: float = 0.25
    boost_rounds: int = 50
    pairs: list[tuple[str, str, str]] = field(default_factory=list)


def _split_list(raw: str) -> list[str]:
    return [item.strip() for item in raw.split(",") if item.strip()]


def load_config(path: str | None) -> ExperimentConfig:
    cfg = ExperimentConfig()
    if path is not None:
        parser = configparser.ConfigParser()
        read = parser.read(path)
        if not read:
            raise FileNotFoundError(path)
        if parser.has_section("data"):
            cfg.interactions = parser.get("data", "interactions", fallback=None)
            cfg.catalog = parser.get("data", "catalog", fallback=None)
            cfg.dwell_unit = parser.get("data", "dwell_unit", fallback="seconds")
        if parser.has_section("synth"):
            cfg.synth = SynthConfig(
                n_users=parser.getint("synth", "n_users", fallback=100),
                n_objects=parser.getint("synth", "n_objects", fallback=150),
                signal_strength=parser.getfloat("synth", "signal_strength",
                                                fallback=0.8),
            )
        if parser.has_section("experiment"):
            exp = parser["experiment"]
            if "variants" in exp:
                cfg.variants = _split_list(exp["variants"])
            if "learners" in exp:
                cfg.learners = _split_list(exp["learners"])
            if "recommenders" in exp:
                cfg.recommenders = _split_list(exp["recommenders"])
            if "k" in exp:
                cfg.ks = [int(v) for v in _split_list(exp["k"])]
            cfg.seed = exp.getint("seed", fallback=cfg.seed)
            cfg.out = exp.get("out", fallback=cfg.out)
            cfg.jobs = exp.getint("jobs", fallback=cfg.jobs)
        if parser.has_section("learners"):
            sec = parser["learners"]
            lam = sec.get("lambda", fallback="cv").strip()
            cfg.lam = None if lam in ("cv", "") else float(lam)
            cfg.prune_confidence = sec.getfloat("prune_confidence", fallback=0.25)
            cfg.boost_rounds = sec.getint("boost_rounds", fallback=50)
        if parser.has_section("significance"):
            raw = parser.get("significance", "pairs", fallback="")
            for chunk in _split_list(raw):
                parts = chunk.split(":")
                if len(parts) != 3:
                    raise CtxrecError(f"bad significance pair {chunk!r}, expected "
                                      "recommender:baseline:method")
                cfg.pairs.append((parts[0], parts[1], parts[2]))
    if os.environ.get("CTXREC_INTERACTIONS"):
        cfg.interactions = os.environ["CTXREC_INTERACTIONS"]
    if os.environ.get("CTXREC_CATALOG"):
        cfg.catalog = os.environ["CTXREC_CATALOG"]
    if os.environ.get("CTXREC_OUT"):
        cfg.out = os.environ["CTXREC_OUT"]
    return cfg


def _apply_overrides(cfg: ExperimentConfig, args) -> ExperimentConfig:
    if getattr(args, "seed", None) is not None:
        cfg.seed = args.seed
    if getattr(args, "out", None) is not None:
        cfg.out = args.out
    if getattr(args, "jobs", None) is not None:
        cfg.jobs = args.jobs
    return cfg


def _get_dataset(cfg: ExperimentConfig):
    """Records (cohort-filtered upstream of learning) plus optional catalog."""
    if cfg.interactions:
        result = load_interactions(cfg.interactions, dwell_unit=cfg.dwell_unit)
        if result.rejects:
            write_validation_report(result.rejects)
        records = result.records
        catalog = None
        if cfg.catalog:
            catalog, cat_rejects = load_catalog(cfg.catalog)
            if cat_rejects:
                write_validation_report(cat_rejects)
        return records, catalog
    if cfg.synth is None:
        raise CtxrecError("config provides neither [data] interactions nor [synth]")
    synth_cfg = SynthConfig(
        seed=subseed(cfg.seed, "synth"),
        n_users=cfg.synth.n_users,
        n_objects=cfg.synth.n_objects,
        signal_strength=cfg.synth.signal_strength,
    )
    records, catalog = synthesize(synth_cfg)
    return records, catalog


def _learner_config(cfg: ExperimentConfig, variant: str, kind: str):
    return learners.LearnerConfig(
        kind=kind, lam=cfg.lam, prune_confidence=cfg.prune_confidence,
        boost_rounds=cfg.boost_rounds,
        seed=subseed(cfg.seed, f"learner|{variant}|{kind}"),
    )


def _write_table(path: Path, header: list[str], rows: list[list]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _fmt_cell(value: float) -> str:
    return f"{value:.6f}"


def cmd_validate(args) -> int:
    result = load_interactions(args.interactions,
                               schema=_parse_mapping(args.mapping),
                               dwell_unit=args.dwell_unit)
    write_validation_report(result.rejects, path=args.report)
    if args.catalog:
        catalog, cat_rejects = load_catalog(args.catalog)
        write_validation_report(cat_rejects)
        missing = catalog.missing_objects(result.records)
        for oid in missing:
            print(f"unresolved object_id: {oid}", file=sys.stderr)
        if cat_rejects or missing:
            return EXIT_VALIDATION
    summary = summarize(result.records)
    print(f"records={summary.n_records} users={summary.n_users} "
          f"objects={summary.n_objects} purchases={summary.n_purchases} "
          f"rejects={len(result.rejects)}")
    return EXIT_VALIDATION if result.rejects else EXIT_OK


def _parse_mapping(raw: str | None) -> dict[str, str] | None:
    if not raw:
        return None
    mapping = {}
    for chunk in _split_list(raw):
        key, sep, value = chunk.partition("=")
        if not sep:
            raise CtxrecError(f"bad mapping entry {chunk!r}, expected field=column")
        mapping[key.strip()] = value.strip()
    return mapping


def cmd_synth(cfg: ExperimentConfig) -> int:
    records, catalog = _get_dataset(cfg)
    out = Path(cfg.out) / "data"
    out.mkdir(parents=True, exist_ok=True)
    write_interactions(records, out / "interactions.csv")
    write_catalog(catalog, out / "catalog.csv")
    summary = summarize(records)
    print(f"wrote {out}/interactions.csv ({summary.n_records} records, "
          f"{summary.n_users} users) and {out}/catalog.csv ({len(catalog)} objects)")
    return EXIT_OK


def cmd_features(cfg: ExperimentConfig) -> int:
    records, _ = _get_dataset(cfg)
    cohort = filter_evaluation_cohort(records)
    out = Path(cfg.out) / "features"
    out.mkdir(parents=True, exist_ok=True)
    for variant in cfg.variants:
        matrix = build_variant(cohort, Variant(variant))
        matrix.write_csv(out / f"{variant}.csv")
        print(f"wrote {out}/{variant}.csv "
              f"({len(matrix.keys)} rows x {len(matrix.columns)} columns)")
    return EXIT_OK


def cmd_predict(cfg: ExperimentConfig) -> int:
    records, _ = _get_dataset(cfg)
    cohort = filter_evaluation_cohort(records)
    out = Path(cfg.out) / "predict"
    grid: dict[str, dict[str, float]] = {}
    for variant in cfg.variants:
        matrix = build_variant(cohort, Variant(variant))
        for kind in cfg.learners:
            config = _learner_config(cfg, variant, kind)
            report = evaluation.loocv_purchase_prediction(
                matrix, config, ks=tuple(cfg.ks), jobs=cfg.jobs)
            cell_dir = out / variant / kind
            cell_dir.mkdir(parents=True, exist_ok=True)
            report.save_json(cell_dir / "cases.json")
            prefs = evaluation.preference_map(report)
            with (cell_dir / "preferences.csv").open("w", newline="",
                                                     encoding="utf-8") as fh:
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(["user_id", "object_id", "r_bar"])
                for (user, obj), r in sorted(prefs.items()):
                    writer.writerow([user, obj, repr(float(r))])
            grid.setdefault(kind, {})[variant] = report.aggregates()["mean_ndcg"]
            print(f"predict {variant}/{kind}: "
                  f"mean nDCG {_fmt_cell(grid[kind][variant])}")
    _write_table(out / "table4.csv",
                 ["learner", *cfg.variants],
                 [[kind, *[_fmt_cell(grid[kind][v]) for v in cfg.variants]]
                  for kind in cfg.learners])
    (out / "table4.json").write_text(
        json.dumps({"metric": "mean_ndcg", "grid": grid}, indent=1, sort_keys=True)
        + "\n", encoding="utf-8")
    return EXIT_OK


def _load_preferences(path: Path) -> dict[tuple[str, str], float]:
    prefs: dict[tuple[str, str], float] = {}
    with path.open(newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            prefs[(row["user_id"], row["object_id"])] = float(row["r_bar"])
    return prefs


def _method_dir(method: str) -> str:
    if method == "binary":
        return "binary"
    learner, sep, variant = method.partition("/")
    if not sep:
        raise CtxrecError(f"bad method {method!r}, expected binary or "
                          "learner/variant")
    return f"{learner}__{variant}"


def cmd_recommend(cfg: ExperimentConfig) -> int:
    records, catalog = _get_dataset(cfg)
    if catalog is None:
        raise CtxrecError("recommendation requires a catalog")
    cohort = filter_evaluation_cohort(records)
    out = Path(cfg.out) / "recommend"
    predict_out = Path(cfg.out) / "predict"

    rows = []
    for rec in cfg.recommenders:
        report = evaluation.loocv_recommendation(cohort, catalog, rec, None,
                                                 ks=tuple(cfg.ks))
        report.metadata["preference_source"] = "binary"
        cell_dir = out / rec / "binary"
        cell_dir.mkdir(parents=True, exist_ok=True)
        report.save_json(cell_dir / "cases.json")
        value = _fmt_cell(report.aggregates()["mean_ndcg"])
        rows.append(["binary", rec, *[value for _ in cfg.variants]])
        print(f"recommend {rec}/binary: mean nDCG {value}")

        for kind in cfg.learners:
            row = [kind, rec]
            for variant in cfg.variants:
                pref_path = predict_out / variant / kind / "preferences.csv"
                if not pref_path.exists():
                    raise FileNotFoundError(
                        f"{pref_path} (run `ctxrec predict` first)")
                prefs = _load_preferences(pref_path)
                report = evaluation.loocv_recommendation(cohort, catalog, rec,
                                                         prefs, ks=tuple(cfg.ks))
                report.metadata["preference_source"] = f"{kind}/{variant}"
                cell_dir = out / rec / _method_dir(f"{kind}/{variant}")
                cell_dir.mkdir(parents=True, exist_ok=True)
                report.save_json(cell_dir / "cases.json")
                row.append(_fmt_cell(report.aggregates()["mean_ndcg"]))
            rows.append(row)
            print(f"recommend {rec}/{kind}: " + " ".join(row[2:]))
    _write_table(out / "table5.csv", ["method", "recommender", *cfg.variants],
                 rows)
    return EXIT_OK


def cmd_significance(cfg: ExperimentConfig, pairs_arg: str | None) -> int:
    pairs = list(cfg.pairs)
    if pairs_arg:
        for chunk in _split_list(pairs_arg):
            parts = chunk.split(":")
            if len(parts) != 3:
                raise CtxrecError(f"bad pair {chunk!r}")
            pairs.append((parts[0], parts[1], parts[2]))
    out = Path(cfg.out)
    rows = []
    for rec, baseline, method in pairs:
        base_report = evaluation.EvalReport.load_json(
            out / "recommend" / rec / _method_dir(baseline) / "cases.json")
        method_report = evaluation.EvalReport.load_json(
            out / "recommend" / rec / _method_dir(method) / "cases.json")
        cells = []
        notes = []
        for k in cfg.ks:
            result = evaluation.binomial_significance(method_report, base_report, k)
            cells.append(_fmt_cell(result.p_value))
            if result.flagged:
                notes.append(f"no-discordant@{k}")
        rows.append([rec, baseline, method, *cells, ";".join(notes)])
    _write_table(out / "table6.csv",
                 ["recommender", "baseline", "method",
                  *[f"p_recall@{k}" for k in cfg.ks], "notes"],
                 rows)
    for row in rows:
        print(",".join(str(c) for c in row))
    return EXIT_OK


def cmd_report(cfg: ExperimentConfig) -> int:
    """Rebuild the summary tables from stored per-case JSON."""
    out = Path(cfg.out)
    predict_out = out / "predict"
    if predict_out.exists():
        grid: dict[str, dict[str, float]] = {}
        for variant_dir in sorted(predict_out.iterdir()):
            if not variant_dir.is_dir():
                continue
            for cell in sorted(variant_dir.iterdir()):
                report = evaluation.EvalReport.load_json(cell / "cases.json")
                grid.setdefault(cell.name, {})[variant_dir.name] = \
                    report.aggregates()["mean_ndcg"]
        variants = [v for v in cfg.variants if any(v in g for g in grid.values())]
        kinds = [k for k in cfg.learners if k in grid]
        _write_table(predict_out / "table4.csv", ["learner", *variants],
                     [[k, *[_fmt_cell(grid[k][v]) for v in variants]]
                      for k in kinds])
        print(f"rebuilt {predict_out / 'table4.csv'}")
    rec_out = out / "recommend"
    if rec_out.exists():
        rows = []
        for rec in cfg.recommenders:
            rec_dir = rec_out / rec
            if not rec_dir.exists():
                continue
            for cell in sorted(rec_dir.iterdir()):
                report = evaluation.EvalReport.load_json(cell / "cases.json")
                rows.append([cell.name, rec,
                             _fmt_cell(report.aggregates()["mean_ndcg"])])
        _write_table(rec_out / "summary.csv", ["method", "recommender",
                                               "mean_ndcg"], rows)
        print(f"rebuilt {rec_out / 'summary.csv'}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ctxrec", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_val = sub.add_parser("validate", help="validate interaction/catalog files")
    p_val.add_argument("--interactions", required=True)
    p_val.add_argument("--catalog")
    p_val.add_argument("--report", help="also write the reject list to this file")
    p_val.add_argument("--mapping", help="field=column,... remapping")
    p_val.add_argument("--dwell-unit", choices=["seconds", "milliseconds"],
                       default="seconds")

    for name in ("synth", "features", "predict", "recommend", "significance",
                 "report"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=name != "report")
        p.add_argument("--seed", type=int)
        p.add_argument("--out")
        p.add_argument("--jobs", type=int)
        if name == "significance":
            p.add_argument("--pairs", help="recommender:baseline:method,...")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "validate":
            return cmd_validate(args)
        cfg = _apply_overrides(load_config(args.config), args)
        if args.command == "synth":
            return cmd_synth(cfg)
        if args.command == "features":
            return cmd_features(cfg)
        if args.command == "predict":
            return cmd_predict(cfg)
        if args.command == "recommend":
            return cmd_recommend(cfg)
        if args.command == "significance":
            return cmd_significance(cfg, args.pairs)
        if args.command == "report":
            return cmd_report(cfg)
        raise CtxrecError(f"unknown command {args.command}")
    except (FileNotFoundError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except CtxrecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
