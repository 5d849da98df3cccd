"""Language tag normalization and mapping onto WALS written languoids.

Raw BCP-47 tags from dumps (en, en-GB, zh-Hant-TW, ...) are folded onto
their primary subtag and resolved to a WALS languoid through the
ISO 639-1 to 639-3 bridge. Unresolvable tags are never dropped silently:
they come back with their counts so reports can surface them.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class LanguageTag:
    canonical: str  # lowercase BCP-47
    primary_subtag: str
    nonstandard: bool = False  # primary subtag not 2-3 alphabetic chars


@dataclass(frozen=True)
class Languoid:
    wals_code: str
    name: str
    iso639_3: Optional[str] = None
    is_written: bool = True


@dataclass
class WalsIndex:
    all: list = field(default_factory=list)
    by_iso: dict = field(default_factory=dict)
    by_wals_code: dict = field(default_factory=dict)
    written_filtered: bool = False

    def __contains__(self, languoid: Languoid) -> bool:
        return languoid.wals_code in self.by_wals_code


def normalize_tag(raw: str) -> LanguageTag:
    """Lowercase and split a raw tag; idempotent on its own output."""
    if not raw or not raw.strip():
        raise ValueError("empty language tag")
    canonical = raw.strip().lower()
    primary = canonical.split("-", 1)[0]
    nonstandard = not (2 <= len(primary) <= 3 and primary.isalpha())
    return LanguageTag(canonical, primary, nonstandard)


def _pick_column(fieldnames, *candidates):
    for cand in candidates:
        if cand in fieldnames:
            return cand
    return None


def load_wals(
    languoid_csv_path: Union[str, Path],
    written_filter: bool = False,
    written_list_path: Optional[Union[str, Path]] = None,
) -> WalsIndex:
    """Build the languoid index from a WALS languoid CSV export.

    Writtenness is not a column of the stock export, so it comes either
    from an `is_written` column or from a companion file listing the
    written wals codes, one per line. With neither, every languoid is
    kept in scope and a warning is logged.
    """
    written_codes = None
    if written_list_path is not None:
        written_codes = {
            line.strip()
            for line in Path(written_list_path).read_text(encoding="utf-8").splitlines()
            if line.strip() and not line.startswith("#")
        }

    idx = WalsIndex(written_filtered=written_filter)
    with open(languoid_csv_path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise ValueError(f"{languoid_csv_path}: empty CSV")
        code_col = _pick_column(reader.fieldnames, "wals_code", "id")
        name_col = _pick_column(reader.fieldnames, "name", "Name")
        iso_col = _pick_column(reader.fieldnames, "iso639_3", "iso_code", "iso_codes")
        written_col = _pick_column(reader.fieldnames, "is_written")
        if code_col is None or name_col is None:
            raise ValueError(
                f"{languoid_csv_path}: need wals_code (or id) and name columns, "
                f"got {reader.fieldnames}"
            )
        for row in reader:
            code = row[code_col].strip()
            if code in idx.by_wals_code:
                raise ValueError(f"duplicate wals_code {code!r}")
            iso = (row.get(iso_col) or "").strip().lower() if iso_col else ""
            if written_col:
                is_written = row[written_col].strip().lower() in ("1", "true", "yes", "y")
            elif written_codes is not None:
                is_written = code in written_codes
            else:
                is_written = True
            languoid = Languoid(code, row[name_col].strip(), iso or None, is_written)
            if written_filter and not languoid.is_written:
                continue
            idx.all.append(languoid)
            idx.by_wals_code[code] = languoid
            if languoid.iso639_3:
                idx.by_iso[languoid.iso639_3] = languoid

    if written_filter and written_codes is None and written_col is None:
        log.warning(
            "written-languoid filter requested but no writtenness source provided; "
            "treating all %d languoids as in scope", len(idx.all)
        )
    return idx


def load_iso_bridge(path: Union[str, Path]) -> dict:
    """Load the ISO 639-1 -> 639-3 bridge CSV (header `iso1,iso3`)."""
    bridge = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != ["iso1", "iso3"]:
            raise ValueError(f"{path}: expected header iso1,iso3, got {reader.fieldnames}")
        for row in reader:
            bridge[row["iso1"].strip().lower()] = row["iso3"].strip().lower()
    return bridge


def map_tag_to_languoid(tag: LanguageTag, idx: WalsIndex, iso1_to_iso3: dict) -> Optional[Languoid]:
    """Resolve a tag's primary subtag to a languoid, or None."""
    primary = tag.primary_subtag
    if len(primary) == 3:
        return idx.by_iso.get(primary)
    if len(primary) == 2:
        iso3 = iso1_to_iso3.get(primary)
        if iso3 is not None:
            return idx.by_iso.get(iso3)
    return None


def fold_counts_by_languoid(tag_counts: dict, idx: WalsIndex, bridge: dict):
    """Sum tag-level counts per resolved languoid.

    Returns (mapped: {Languoid: count}, unmapped: {canonical tag: count});
    total counts are conserved between the two maps.
    """
    mapped: dict = {}
    unmapped: dict = {}
    for raw, count in tag_counts.items():
        tag = raw if isinstance(raw, LanguageTag) else normalize_tag(raw)
        languoid = map_tag_to_languoid(tag, idx, bridge)
        if languoid is None:
            log.info("unmapped language tag %s (count %d)", tag.canonical, count)
            unmapped[tag.canonical] = unmapped.get(tag.canonical, 0) + count
        else:
            mapped[languoid] = mapped.get(languoid, 0) + count
    return mapped, unmapped


def fold_article_counts(
    edition_counts: dict,
    idx: WalsIndex,
    bridge: dict,
    edition_overrides: Optional[dict] = None,
):
    """Map Wikipedia edition codes to languoids, same bridge mechanism.

    `edition_overrides` (edition code -> iso639_3) handles the edition
    codes that are not plain ISO codes. Returns (mapped, unmapped).
    """
    overrides = edition_overrides or {}
    mapped: dict = {}
    unmapped: dict = {}
    for code, count in edition_counts.items():
        iso3 = overrides.get(code.lower())
        if iso3 is not None:
            languoid = idx.by_iso.get(iso3)
        else:
            languoid = map_tag_to_languoid(normalize_tag(code), idx, bridge)
        if languoid is None:
            unmapped[code.lower()] = unmapped.get(code.lower(), 0) + count
        else:
            mapped[languoid] = mapped.get(languoid, 0) + count
    return mapped, unmapped


def load_edition_overrides(path: Union[str, Path]) -> dict:
    """Load the `edition,iso3` override CSV for irregular edition codes."""
    overrides = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != ["edition", "iso3"]:
            raise ValueError(f"{path}: expected header edition,iso3, got {reader.fieldnames}")
        for row in reader:
            overrides[row["edition"].strip().lower()] = row["iso3"].strip().lower()
    return overrides
