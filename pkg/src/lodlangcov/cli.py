"""Command-line surface.

Verbs:
    count       stream N-Triples dumps (or SPARQL endpoints) into a counts CSV
    fetch-wiki  pull per-edition article counts from the MediaWiki API
    build       fold tag counts onto WALS languoids and emit the coverage table
    analyze     cluster + categorize, emit report JSON/CSV and scatter TSV
    report      analyze plus rendered figures

Exit codes: 0 success, 1 usage/config error, 2 data error,
3 completed in degraded mode (warnings emitted).
"""

from __future__ import annotations

import argparse
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import __version__, coverage, langtags, ntriples, remote, report as report_mod
from .config import ConfigError, RunConfig, parse_config

log = logging.getLogger("lodlangcov")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_DEGRADED = 3


class DataError(RuntimeError):
    pass


def _predicate_filter(cfg: RunConfig):
    if cfg.ingest_predicates == "labels":
        return ntriples.DEFAULT_LABEL_PREDICATES
    if cfg.ingest_predicates == "any":
        return ntriples.ANY_PREDICATE
    return frozenset(p.strip() for p in cfg.ingest_predicates.split(",") if p.strip())


def count_dump(path, cfg: RunConfig) -> dict:
    """Count one dump, optionally sharded into parallel accumulators."""
    predicate_filter = _predicate_filter(cfg)

    def new_acc():
        return ntriples.CountAccumulator(
            mode=cfg.ingest_mode, precision=cfg.ingest_precision, seed=cfg.seed
        )

    stream = ntriples.open_maybe_gzip(path)
    try:
        if cfg.ingest_shards == 1:
            acc = ntriples.count_entities(stream, predicate_filter, new_acc(), cfg.ingest_strict)
        else:
            shards = [[] for _ in range(cfg.ingest_shards)]
            for i, line in enumerate(stream):
                shards[i % cfg.ingest_shards].append(line)
            with ThreadPoolExecutor(max_workers=cfg.ingest_shards) as pool:
                accs = list(pool.map(
                    lambda lines: ntriples.count_entities(
                        lines, predicate_filter, new_acc(), cfg.ingest_strict
                    ),
                    shards,
                ))
            acc = accs[0]
            for other in accs[1:]:
                acc = ntriples.merge_accumulators(acc, other)
    finally:
        stream.close()
    if acc.parse_errors:
        log.warning("%s: %d malformed lines skipped", path, acc.parse_errors)
    return ntriples.report_counts(acc)


def cmd_count(args) -> int:
    cfg = parse_config(args.config)
    per_source: dict = {}
    for name, spec in sorted(cfg.sources.items()):
        if spec.dump:
            if not Path(spec.dump).exists():
                raise DataError(f"dump not found: {spec.dump}")
            per_source[name] = count_dump(spec.dump, cfg)
        elif spec.sparql_endpoint:
            if not args.tags:
                raise ConfigError(
                    f"source {name!r} is a SPARQL endpoint; pass --tags lang1,lang2,..."
                )
            if not spec.sparql_query:
                raise ConfigError(f"source {name!r} has no sparql_query template")
            endpoint = remote.SparqlEndpointConfig(
                spec.sparql_endpoint,
                timeout=cfg.sparql_timeout,
                max_concurrent=cfg.sparql_max_concurrent,
                retry_budget=cfg.sparql_retry_budget,
                politeness_delay_ms=cfg.sparql_politeness_ms,
            )
            tags = [t.strip().lower() for t in args.tags.split(",") if t.strip()]
            counts, errors = remote.fetch_sparql_language_counts(
                endpoint, spec.sparql_query, tags
            )
            per_source[name] = counts
            if errors:
                report_mod.write_errors_csv(
                    errors, Path(args.output).with_suffix(f".{name}.errors.csv"),
                    key_column="language_tag",
                )
                log.warning("%s: %d languages failed", name, len(errors))
    report_mod.write_counts_csv(per_source, args.output)
    print(f"wrote {args.output} ({sum(len(v) for v in per_source.values())} rows)")
    return EXIT_OK


def cmd_fetch_wiki(args) -> int:
    cfg = parse_config(args.config)
    editions = [
        remote.WikiEdition.for_code(code, cfg.wiki_api_url_template)
        for code in cfg.wiki_editions
    ]
    counts, errors = remote.fetch_wikipedia_article_counts(editions)
    report_mod.write_articles_csv(counts, args.output)
    errors_path = Path(args.output).with_suffix(".errors.csv")
    report_mod.write_errors_csv(errors, errors_path)
    print(f"wrote {args.output} ({len(counts)} editions, {len(errors)} errors)")
    if editions and not counts:
        raise DataError("every edition fetch failed")
    return EXIT_DEGRADED if errors else EXIT_OK


def _load_wals_assets(cfg: RunConfig):
    if not cfg.wals_languoid_csv or not cfg.wals_iso_bridge_csv:
        raise ConfigError("config must set wals.languoid_csv and wals.iso_bridge_csv")
    idx = langtags.load_wals(
        cfg.wals_languoid_csv,
        written_filter=cfg.written_filter,
        written_list_path=cfg.wals_written_list,
    )
    bridge = langtags.load_iso_bridge(cfg.wals_iso_bridge_csv)
    overrides = (
        langtags.load_edition_overrides(cfg.wals_edition_overrides)
        if cfg.wals_edition_overrides else None
    )
    return idx, bridge, overrides


def cmd_build(args) -> int:
    cfg = parse_config(args.config)
    idx, bridge, overrides = _load_wals_assets(cfg)

    counts_paths = list(args.counts or [])
    for spec in cfg.sources.values():
        if spec.counts_csv:
            counts_paths.append(spec.counts_csv)
    if not counts_paths:
        raise ConfigError("no counts CSV given (--counts or source.<name>.counts_csv)")
    tag_counts_by_source: dict = {}
    for path in counts_paths:
        for source, tag, count in remote.load_counts_csv(path):
            source_map = tag_counts_by_source.setdefault(source, {})
            if tag in source_map:
                raise DataError(f"duplicate ({source}, {tag}) across counts files")
            source_map[tag] = count

    per_source_counts: dict = {}
    unmapped_tags: dict = {}
    for source, tag_counts in tag_counts_by_source.items():
        mapped, unmapped = langtags.fold_counts_by_languoid(tag_counts, idx, bridge)
        per_source_counts[source] = mapped
        for tag, count in unmapped.items():
            unmapped_tags[tag] = unmapped_tags.get(tag, 0) + count

    articles_path = args.articles or cfg.articles_csv
    if not articles_path:
        raise ConfigError("no article counts given (--articles or articles.csv in config)")
    edition_counts = remote.load_article_counts_csv(articles_path)
    article_counts, unmapped_editions = langtags.fold_article_counts(
        edition_counts, idx, bridge, overrides
    )

    table = coverage.build_coverage_table(per_source_counts, article_counts, idx)
    coverage.save(table, args.output)
    out = Path(args.output)
    report_mod.write_unmapped_csv(unmapped_tags, out.with_suffix(".unmapped_tags.csv"))
    report_mod.write_unmapped_csv(
        unmapped_editions, out.with_suffix(".unmapped_editions.csv")
    )
    print(
        f"wrote {args.output} ({len(table.records)} languoids, "
        f"{len(unmapped_tags)} unmapped tags, {len(unmapped_editions)} unmapped editions)"
    )
    return EXIT_OK


def _analyze(args, render_figures: bool) -> int:
    cfg = parse_config(args.config)
    table = coverage.load(args.coverage)
    if not table.records:
        raise DataError(f"{args.coverage}: empty coverage table")
    reference = report_mod.load_reference_labels(args.reference) if args.reference else None
    report = report_mod.run_analysis(table, cfg, reference_labels=reference)

    outdir = Path(args.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    report_mod.write_report_json(report, outdir / "report.json")
    report_mod.write_report_csv(report, outdir / "report.csv")
    report_mod.write_scatter_tsv(report, outdir / "scatter.tsv")
    written = ["report.json", "report.csv", "scatter.tsv"]

    if render_figures:
        from . import plotting  # deferred: matplotlib import is slow

        plotting.plot_scatter(report, outdir / "scatter_joshi.png", color_by="joshi")
        plotting.plot_scatter(report, outdir / "scatter_categories.png", color_by="lod_category")
        plotting.plot_category_histogram(report, outdir / "categories.png")
        written += ["scatter_joshi.png", "scatter_categories.png", "categories.png"]

    warnings = report["metadata"]["warnings"]
    print(f"wrote {', '.join(written)} in {outdir}")
    for warning in warnings:
        print(f"warning: {warning}", file=sys.stderr)
    return EXIT_DEGRADED if warnings else EXIT_OK


def cmd_analyze(args) -> int:
    return _analyze(args, render_figures=False)


def cmd_report(args) -> int:
    return _analyze(args, render_figures=True)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lodlangcov",
        description="Language coverage analysis of Linked Open Data knowledge graphs",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("count", help="count entities per language tag in dumps")
    p.add_argument("--config", required=True)
    p.add_argument("--output", required=True, help="counts CSV to write")
    p.add_argument("--tags", help="comma-separated tags for SPARQL sources")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("fetch-wiki", help="fetch Wikipedia article counts")
    p.add_argument("--config", required=True)
    p.add_argument("--output", required=True, help="articles CSV to write")
    p.set_defaults(func=cmd_fetch_wiki)

    p = sub.add_parser("build", help="build the coverage table")
    p.add_argument("--config", required=True)
    p.add_argument("--counts", action="append", help="counts CSV (repeatable)")
    p.add_argument("--articles", help="articles CSV (default: articles.csv from config)")
    p.add_argument("--output", required=True, help="coverage JSON to write")
    p.set_defaults(func=cmd_build)

    for verb, func, help_text in (
        ("analyze", cmd_analyze, "cluster and categorize a coverage table"),
        ("report", cmd_report, "analyze and render figures"),
    ):
        p = sub.add_parser(verb, help=help_text)
        p.add_argument("--config", required=True)
        p.add_argument("--coverage", required=True, help="coverage JSON from `build`")
        p.add_argument("--reference", help="reference labels CSV (wals_code,label)")
        p.add_argument("--output-dir", required=True)
        p.set_defaults(func=func)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, ntriples.MalformedLineError, remote.SparqlError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (ValueError, KeyError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
