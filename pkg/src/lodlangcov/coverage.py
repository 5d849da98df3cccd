"""The central per-language coverage table.

One record per WALS languoid, carrying entity counts per KG source and
the Wikipedia article count. The table defines the derived language
sets: covered by any KG, covered by any Wikipedia edition, and their
intersection, over which the two empirical count distributions live.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

from .langtags import Languoid, WalsIndex


@dataclass
class CoverageRecord:
    languoid: Languoid
    entity_counts: dict = field(default_factory=dict)  # source name -> count
    article_count: Optional[int] = None  # None: no considered Wikipedia edition

    def __post_init__(self):
        for source, count in self.entity_counts.items():
            if count < 0:
                raise ValueError(f"negative entity count for {source}: {count}")
        if self.article_count is not None and self.article_count < 0:
            raise ValueError(f"negative article count: {self.article_count}")


@dataclass
class CoverageTable:
    records: dict = field(default_factory=dict)  # wals_code -> CoverageRecord
    sources: list = field(default_factory=list)

    def aggregate(self, record: CoverageRecord, selected) -> int:
        unknown = set(selected) - set(self.sources)
        if unknown:
            raise KeyError(f"unknown source id(s): {sorted(unknown)}")
        return aggregate_entity_count(record, selected)


@dataclass
class Distribution:
    """Counts over the intersection languages, in a stable languoid order."""

    values: list
    wals_codes: list

    def __post_init__(self):
        if len(self.values) != len(self.wals_codes):
            raise ValueError("values and wals_codes must align")

    def __len__(self):
        return len(self.values)


def build_coverage_table(per_source_counts: dict, article_counts: dict, wals: WalsIndex) -> CoverageTable:
    """Assemble the table from per-source languoid counts and article counts.

    Every WALS languoid gets a record even with no counts anywhere;
    those zero rows feed the Missing category later. Languoids not in
    the index are rejected.
    """
    def check(languoid: Languoid):
        if languoid not in wals:
            raise KeyError(f"languoid {languoid.wals_code!r} not in the WALS index")

    table = CoverageTable(sources=sorted(per_source_counts))
    for languoid in wals.all:
        table.records[languoid.wals_code] = CoverageRecord(languoid)
    for source, counts in per_source_counts.items():
        for languoid, count in counts.items():
            check(languoid)
            table.records[languoid.wals_code].entity_counts[source] = count
    for languoid, count in article_counts.items():
        check(languoid)
        table.records[languoid.wals_code].article_count = count
    return table


def aggregate_entity_count(record: CoverageRecord, selected) -> int:
    """Entity count summed over selected sources, no deduplication.

    Plain summation is the optimistic model: every source is assumed to
    contribute distinct entities. Sources absent from the record add 0.
    """
    return sum(record.entity_counts.get(source, 0) for source in selected)


def l_lod(table: CoverageTable, selected) -> set:
    """Languages with any aggregated KG entity count > 0."""
    return {
        code
        for code, rec in table.records.items()
        if aggregate_entity_count(rec, selected) > 0
    }


def l_txt(table: CoverageTable) -> set:
    """Languages with a Wikipedia edition holding at least one article."""
    return {
        code
        for code, rec in table.records.items()
        if rec.article_count is not None and rec.article_count > 0
    }


def l_star(table: CoverageTable, selected) -> set:
    return l_lod(table, selected) & l_txt(table)


def distributions(table: CoverageTable, selected):
    """Aligned entity/article count distributions over the intersection.

    Ordering is ascending wals_code: quantiles do not care, but reports
    must be deterministic.
    """
    codes = sorted(l_star(table, selected))
    langs = [table.records[c].languoid for c in codes]
    d_e = Distribution([aggregate_entity_count(table.records[c], selected) for c in codes], codes)
    d_w = Distribution([table.records[c].article_count for c in codes], codes)
    return langs, d_e, d_w


def to_json(table: CoverageTable) -> str:
    doc = {
        "sources": list(table.sources),
        "records": [
            {
                "wals_code": rec.languoid.wals_code,
                "name": rec.languoid.name,
                "iso639_3": rec.languoid.iso639_3,
                "is_written": rec.languoid.is_written,
                "entity_counts": dict(sorted(rec.entity_counts.items())),
                "article_count": rec.article_count,
            }
            for _, rec in sorted(table.records.items())
        ],
    }
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def from_json(text: str) -> CoverageTable:
    doc = json.loads(text)
    table = CoverageTable(sources=list(doc["sources"]))
    for raw in doc["records"]:
        languoid = Languoid(
            raw["wals_code"], raw["name"], raw.get("iso639_3"), raw.get("is_written", True)
        )
        table.records[languoid.wals_code] = CoverageRecord(
            languoid,
            entity_counts={k: int(v) for k, v in raw["entity_counts"].items()},
            article_count=raw["article_count"],
        )
    return table


def save(table: CoverageTable, path: Union[str, Path]) -> None:
    Path(path).write_text(to_json(table), encoding="utf-8", newline="\n")


def load(path: Union[str, Path]) -> CoverageTable:
    return from_json(Path(path).read_text(encoding="utf-8"))
