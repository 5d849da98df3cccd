"""Plain-text key=value run configuration.

Example:

    # KG sources: one of dump / counts_csv / sparql_endpoint per source
    source.dbpedia.dump = fixtures/dbpedia.nt.gz
    source.wikidata.counts_csv = fixtures/wikidata_counts.csv

    # article counts: either a CSV or the live API
    articles.csv = fixtures/articles.csv
    wiki.editions = fr,en,de
    wiki.api_url_template = https://{code}.wikipedia.org/w/api.php

    wals.languoid_csv = fixtures/wals_languoids.csv
    wals.iso_bridge_csv = fixtures/iso1_to_iso3.csv
    wals.written_list = fixtures/written_codes.txt
    wals.edition_overrides = fixtures/edition_overrides.csv

    analysis.k = 6
    analysis.seed = 42
    ingest.mode = exact
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union


class ConfigError(ValueError):
    pass


@dataclass
class SourceSpec:
    name: str
    dump: Optional[str] = None
    counts_csv: Optional[str] = None
    sparql_endpoint: Optional[str] = None
    sparql_query: Optional[str] = None


@dataclass
class RunConfig:
    sources: dict = field(default_factory=dict)  # name -> SourceSpec
    articles_csv: Optional[str] = None
    wiki_editions: list = field(default_factory=list)
    wiki_api_url_template: str = "https://{code}.wikipedia.org/w/api.php"
    wals_languoid_csv: Optional[str] = None
    wals_iso_bridge_csv: Optional[str] = None
    wals_written_list: Optional[str] = None
    wals_edition_overrides: Optional[str] = None
    written_filter: bool = True
    k: int = 6
    seed: int = 42
    tol: float = 1e-6
    max_iter: int = 300
    tau: float = 0.5
    restarts: int = 1
    raw_features: bool = False
    ingest_mode: str = "exact"
    ingest_precision: int = 14
    ingest_predicates: str = "labels"  # "labels" | "any" | comma-separated IRIs
    ingest_strict: bool = False
    ingest_shards: int = 1
    sparql_timeout: float = 60.0
    sparql_max_concurrent: int = 2
    sparql_retry_budget: int = 3
    sparql_politeness_ms: float = 250.0
    output_dir: str = "."

    def validate(self) -> None:
        if not self.sources:
            raise ConfigError("config must define at least one KG source")
        if not (self.articles_csv or self.wiki_editions):
            raise ConfigError(
                "config must define an article source (articles.csv or wiki.editions)"
            )
        if self.k < 1:
            raise ConfigError(f"analysis.k must be >= 1, got {self.k}")
        if self.tau <= 0:
            raise ConfigError(f"analysis.tau must be > 0, got {self.tau}")
        if self.ingest_mode not in ("exact", "approximate"):
            raise ConfigError(f"ingest.mode must be exact or approximate, got {self.ingest_mode!r}")
        if self.ingest_shards < 1:
            raise ConfigError("ingest.shards must be >= 1")
        for spec in self.sources.values():
            given = [v for v in (spec.dump, spec.counts_csv, spec.sparql_endpoint) if v]
            if len(given) != 1:
                raise ConfigError(
                    f"source {spec.name!r} needs exactly one of dump / counts_csv / "
                    f"sparql_endpoint"
                )


def _parse_bool(raw: str, key: str) -> bool:
    low = raw.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"{key}: expected a boolean, got {raw!r}")


def parse_config(path: Union[str, Path]) -> RunConfig:
    cfg = RunConfig()
    text = Path(path).read_text(encoding="utf-8")
    base = Path(path).resolve().parent

    def resolve(raw: str) -> str:
        p = Path(raw)
        return str(p if p.is_absolute() else base / p)

    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        parts = key.split(".")
        try:
            if parts[0] == "source" and len(parts) == 3:
                spec = cfg.sources.setdefault(parts[1], SourceSpec(parts[1]))
                if parts[2] == "dump":
                    spec.dump = resolve(value)
                elif parts[2] == "counts_csv":
                    spec.counts_csv = resolve(value)
                elif parts[2] == "sparql_endpoint":
                    spec.sparql_endpoint = value
                elif parts[2] == "sparql_query":
                    spec.sparql_query = value
                else:
                    raise ConfigError(f"unknown source key {parts[2]!r}")
            elif key == "articles.csv":
                cfg.articles_csv = resolve(value)
            elif key == "wiki.editions":
                cfg.wiki_editions = [c.strip() for c in value.split(",") if c.strip()]
            elif key == "wiki.api_url_template":
                cfg.wiki_api_url_template = value
            elif key == "wals.languoid_csv":
                cfg.wals_languoid_csv = resolve(value)
            elif key == "wals.iso_bridge_csv":
                cfg.wals_iso_bridge_csv = resolve(value)
            elif key == "wals.written_list":
                cfg.wals_written_list = resolve(value)
            elif key == "wals.edition_overrides":
                cfg.wals_edition_overrides = resolve(value)
            elif key == "wals.written_filter":
                cfg.written_filter = _parse_bool(value, key)
            elif key == "analysis.k":
                cfg.k = int(value)
            elif key == "analysis.seed":
                cfg.seed = int(value)
            elif key == "analysis.tol":
                cfg.tol = float(value)
            elif key == "analysis.max_iter":
                cfg.max_iter = int(value)
            elif key == "analysis.tau":
                cfg.tau = float(value)
            elif key == "analysis.restarts":
                cfg.restarts = int(value)
            elif key == "analysis.raw_features":
                cfg.raw_features = _parse_bool(value, key)
            elif key == "ingest.mode":
                cfg.ingest_mode = value
            elif key == "ingest.precision":
                cfg.ingest_precision = int(value)
            elif key == "ingest.predicates":
                cfg.ingest_predicates = value
            elif key == "ingest.strict":
                cfg.ingest_strict = _parse_bool(value, key)
            elif key == "ingest.shards":
                cfg.ingest_shards = int(value)
            elif key == "sparql.timeout":
                cfg.sparql_timeout = float(value)
            elif key == "sparql.max_concurrent":
                cfg.sparql_max_concurrent = int(value)
            elif key == "sparql.retry_budget":
                cfg.sparql_retry_budget = int(value)
            elif key == "sparql.politeness_ms":
                cfg.sparql_politeness_ms = float(value)
            elif key == "output_dir":
                cfg.output_dir = resolve(value)
            else:
                raise ConfigError(f"unknown config key {key!r}")
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: {exc}") from None
    cfg.validate()
    return cfg
