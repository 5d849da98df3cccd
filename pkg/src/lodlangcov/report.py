"""Pipeline orchestration for analysis runs and deterministic emission.

Every under-documented methodological choice (quantile method, NMI
normalization, feature transform, seed, tau) is echoed into the report
metadata so the numbers stay interpretable on their own.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Optional, Union

from . import __version__
from . import analysis
from .analysis import LodCategory
from .config import RunConfig
from .coverage import CoverageTable, aggregate_entity_count, distributions, l_star

QUANTILE_METHOD = "linear interpolation over the sorted sample"
NMI_NORMALIZATION = "arithmetic mean of entropies, natural log"

SCATTER_COLUMNS = (
    "wals_code",
    "x",
    "y",
    "cluster",
    "joshi",
    "lod_category",
    "divergence_class",
)


def run_analysis(
    table: CoverageTable,
    cfg: RunConfig,
    reference_labels: Optional[dict] = None,
    selected=None,
) -> dict:
    """Full analysis over a coverage table; returns the report document.

    Clustering degrades gracefully: with fewer covered languages than k
    it is skipped with a warning while the quartile categories still run.
    """
    if not table.records:
        raise ValueError("empty coverage table")
    selected = list(selected) if selected is not None else list(table.sources)
    warnings: list = []

    star = l_star(table, selected)
    langs, d_e, d_w = distributions(table, selected)

    q_e = q_w = None
    if len(d_e):
        q_e = analysis.quartiles(d_e)
        q_w = analysis.quartiles(d_w)
    else:
        warnings.append("no language is covered by both KGs and Wikipedia; "
                        "only the Missing category applies")

    points = []
    feature = {}
    for languoid in langs:
        point = analysis.log_features(
            table.records[languoid.wals_code], selected, raw=cfg.raw_features
        )
        points.append(point)
        feature[languoid.wals_code] = point

    model = None
    joshi_by_cluster = {}
    if len(points) >= cfg.k:
        model = analysis.kmeans(
            points, k=cfg.k, seed=cfg.seed, max_iter=cfg.max_iter,
            tol=cfg.tol, restarts=cfg.restarts,
        )
        if cfg.k == 6:
            joshi_by_cluster = analysis.label_clusters(model)
    elif len(points):
        warnings.append(
            f"clustering skipped: only {len(points)} covered languages for k={cfg.k}"
        )

    rows = []
    histogram = {c.value: 0 for c in LodCategory}
    for code in sorted(table.records):
        rec = table.records[code]
        in_star = code in star
        aggregated = aggregate_entity_count(rec, selected)
        if in_star:
            category = analysis.lod_categorize(
                aggregated, rec.article_count, q_e, q_w, True
            )
        else:
            category = LodCategory.MISSING
        histogram[category.value] += 1
        row = {
            "wals_code": code,
            "name": rec.languoid.name,
            "entity_counts": dict(sorted(rec.entity_counts.items())),
            "aggregated_entity_count": aggregated,
            "article_count": rec.article_count,
            "x": None,
            "y": None,
            "cluster": None,
            "joshi": None,
            "lod_category": category.value,
            "divergence_score": None,
            "divergence_class": None,
        }
        point = feature.get(code)
        if point is not None:
            row["x"] = point.x
            row["y"] = point.y
            div = analysis.divergence(point, cfg.tau)
            row["divergence_score"] = div.score
            row["divergence_class"] = div.label
            if model is not None:
                cluster = model.assignments[code]
                row["cluster"] = cluster
                if joshi_by_cluster:
                    row["joshi"] = joshi_by_cluster[cluster].name
        rows.append(row)

    nmi_value = None
    if reference_labels is not None and model is not None:
        common = set(reference_labels) & set(model.assignments)
        if common:
            nmi_value = analysis.nmi(
                {c: model.assignments[c] for c in common},
                {c: reference_labels[c] for c in common},
            )
        else:
            warnings.append("reference labels share no languages with the clustering")

    report = {
        "metadata": {
            "tool_version": __version__,
            "sources": selected,
            "quantile_method": QUANTILE_METHOD,
            "nmi_normalization": NMI_NORMALIZATION,
            "feature_transform": "raw counts" if cfg.raw_features else "log10(1+n)",
            "article_statistic": "articles (content pages, MediaWiki siteinfo)",
            "k": cfg.k,
            "seed": cfg.seed,
            "tau": cfg.tau,
            "restarts": cfg.restarts,
            "quartiles": {
                "entity": None if q_e is None else {"q1": q_e.q1, "q3": q_e.q3},
                "article": None if q_w is None else {"q1": q_w.q1, "q3": q_w.q3},
            },
            "n_languages": len(rows),
            "n_intersection": len(star),
            "category_histogram": histogram,
            "nmi_vs_reference": nmi_value,
            "clustering_inertia": None if model is None else model.inertia,
            "warnings": warnings,
        },
        "rows": rows,
    }
    return report


def load_reference_labels(path: Union[str, Path]) -> dict:
    """Load a `wals_code,label` CSV of reference cluster labels."""
    labels = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["wals_code", "label"]:
            raise ValueError(f"{path}: expected header wals_code,label, got {header}")
        for row in reader:
            labels[row[0].strip()] = row[1].strip()
    return labels


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.6f}"
    return str(value)


def write_report_json(report: dict, path: Union[str, Path]) -> None:
    Path(path).write_text(
        json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False) + "\n",
        encoding="utf-8", newline="\n",
    )


def write_report_csv(report: dict, path: Union[str, Path]) -> None:
    sources = report["metadata"]["sources"]
    columns = (
        ["wals_code", "name"]
        + [f"entities_{s}" for s in sources]
        + [
            "aggregated_entity_count", "article_count", "x", "y",
            "cluster", "joshi", "lod_category",
            "divergence_score", "divergence_class",
        ]
    )
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in report["rows"]:
            writer.writerow(
                [row["wals_code"], row["name"]]
                + [_fmt(row["entity_counts"].get(s, 0)) for s in sources]
                + [_fmt(row[c]) for c in (
                    "aggregated_entity_count", "article_count", "x", "y",
                    "cluster", "joshi", "lod_category",
                    "divergence_score", "divergence_class",
                )]
            )


def write_scatter_tsv(report: dict, path: Union[str, Path]) -> None:
    """Plot-ready rows, intersection languages only."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, delimiter="\t", lineterminator="\n")
        writer.writerow(SCATTER_COLUMNS)
        for row in report["rows"]:
            if row["x"] is None:
                continue
            writer.writerow([_fmt(row[c]) for c in SCATTER_COLUMNS])


def write_counts_csv(per_source_counts: dict, path: Union[str, Path]) -> None:
    """Emit `source,language_tag,entity_count`, sorted for determinism."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["source", "language_tag", "entity_count"])
        for source in sorted(per_source_counts):
            for tag in sorted(per_source_counts[source]):
                writer.writerow([source, tag, per_source_counts[source][tag]])


def write_unmapped_csv(unmapped: dict, path: Union[str, Path]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["language_tag", "count"])
        for tag in sorted(unmapped):
            writer.writerow([tag, unmapped[tag]])


def write_articles_csv(counts: dict, path: Union[str, Path]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["edition", "articles"])
        for edition in sorted(counts):
            writer.writerow([edition, counts[edition]])


def write_errors_csv(errors: dict, path: Union[str, Path], key_column: str = "edition") -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([key_column, "error"])
        for key in sorted(errors):
            writer.writerow([key, errors[key]])
