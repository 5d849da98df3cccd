"""Streaming N-Triples ingestion and per-language distinct-entity counting.

Line-oriented by design: every triple sits on one physical line, so a
dump can be sharded into independent accumulators and merged afterwards.
Only N-Triples syntax is supported, no Turtle abbreviations.
"""

from __future__ import annotations

import gzip
import io
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Optional, Union

from .hll import HyperLogLog

# Canonical label-bearing predicates; the default filter for what counts
# as a language-tagged "entity" literal.
DEFAULT_LABEL_PREDICATES = frozenset({
    "http://www.w3.org/2000/01/rdf-schema#label",
    "http://www.w3.org/2004/02/skos/core#prefLabel",
    "http://www.w3.org/2004/02/skos/core#altLabel",
})

ANY_PREDICATE = "any"


class MalformedLineError(ValueError):
    """A physical line that is neither a triple, a comment, nor blank."""

    def __init__(self, reason: str, byte_offset: int = 0):
        super().__init__(f"byte {byte_offset}: {reason}")
        self.reason = reason
        self.byte_offset = byte_offset


@dataclass(frozen=True)
class Literal:
    lexical_form: str
    language_tag: Optional[str] = None
    datatype_iri: Optional[str] = None

    def __post_init__(self):
        if self.language_tag is not None and self.datatype_iri is not None:
            raise ValueError("literal cannot carry both a language tag and a datatype")


@dataclass(frozen=True)
class Triple:
    subject: str
    predicate: str
    object: Union[str, Literal]

    def __post_init__(self):
        if not self.subject or not self.predicate:
            raise ValueError("subject and predicate must be non-empty")


_IRI = r'<([^<>"{}|^`\\\x00-\x20]*)>'
_BNODE = r"(_:[^\s]+)"
_LIT = r'"((?:[^"\\]|\\.)*)"(?:@([A-Za-z0-9]+(?:-[A-Za-z0-9]+)*)|\^\^<([^<>"{}|^`\\\x00-\x20]*)>)?'

_LINE_RE = re.compile(
    rf"^[ \t]*(?:{_IRI}|{_BNODE})"
    rf"[ \t]+{_IRI}"
    rf"[ \t]+(?:{_IRI}|{_BNODE}|{_LIT})"
    rf"[ \t]*\.[ \t]*$"
)

_ESCAPE_RE = re.compile(r"\\(?:u([0-9A-Fa-f]{4})|U([0-9A-Fa-f]{8})|(.))")
_ECHAR = {"t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f", '"': '"', "'": "'", "\\": "\\"}


def _unescape(raw: str) -> str:
    if "\\" not in raw:
        return raw

    def sub(m: re.Match) -> str:
        if m.group(1):
            return chr(int(m.group(1), 16))
        if m.group(2):
            return chr(int(m.group(2), 16))
        ch = m.group(3)
        if ch not in _ECHAR:
            raise MalformedLineError(f"invalid escape sequence \\{ch}")
        return _ECHAR[ch]

    return _ESCAPE_RE.sub(sub, raw)


def parse_ntriples_line(line: str, byte_offset: int = 0) -> Optional[Triple]:
    """Parse one physical line; None for blank or comment lines.

    Language tags are lowercased here so every downstream count is keyed
    consistently (BCP-47 tags are case-insensitive).
    """
    stripped = line.strip()
    if not stripped or stripped.startswith("#"):
        return None
    m = _LINE_RE.match(line.rstrip("\r\n"))
    if m is None:
        raise MalformedLineError("line does not match the N-Triples grammar", byte_offset)
    subj = m.group(1) if m.group(1) is not None else m.group(2)
    pred = m.group(3)
    if m.group(4) is not None:
        obj: Union[str, Literal] = m.group(4)
    elif m.group(5) is not None:
        obj = m.group(5)
    else:
        try:
            lexical = _unescape(m.group(6))
        except MalformedLineError as exc:
            raise MalformedLineError(exc.reason, byte_offset) from None
        tag = m.group(7).lower() if m.group(7) else None
        obj = Literal(lexical, language_tag=tag, datatype_iri=m.group(8))
    return Triple(subj, pred, obj)


@dataclass
class CountAccumulator:
    """Per-language-tag distinct-subject counts, exact or sketched.

    Single-writer during counting; merge combines independent shards.
    """

    mode: str = "exact"  # "exact" | "approximate"
    precision: int = 14
    seed: int = 0
    per_tag: dict = field(default_factory=dict)
    triples_seen: int = 0
    parse_errors: int = 0
    skipped_lines: int = 0  # blank and comment lines

    def __post_init__(self):
        if self.mode not in ("exact", "approximate"):
            raise ValueError(f"unknown accumulator mode: {self.mode!r}")

    def _tracker(self, tag: str):
        tracker = self.per_tag.get(tag)
        if tracker is None:
            if self.mode == "exact":
                tracker = set()
            else:
                tracker = HyperLogLog(self.precision, self.seed)
            self.per_tag[tag] = tracker
        return tracker

    def observe(self, subject: str, tag: str) -> None:
        self._tracker(tag).add(subject)


def count_entities(
    stream: Iterable[str],
    predicate_filter: Union[frozenset, set, str] = DEFAULT_LABEL_PREDICATES,
    accumulator: Optional[CountAccumulator] = None,
    strict: bool = False,
) -> CountAccumulator:
    """Stream lines, tracking distinct subjects per language tag.

    Only triples whose object is a language-tagged literal and whose
    predicate passes the filter contribute. Lenient mode counts
    malformed lines instead of aborting.
    """
    acc = accumulator if accumulator is not None else CountAccumulator()
    any_predicate = predicate_filter == ANY_PREDICATE
    offset = 0
    for line in stream:
        try:
            triple = parse_ntriples_line(line, byte_offset=offset)
        except MalformedLineError:
            if strict:
                raise
            acc.parse_errors += 1
            offset += len(line.encode("utf-8"))
            continue
        offset += len(line.encode("utf-8"))
        if triple is None:
            acc.skipped_lines += 1
            continue
        acc.triples_seen += 1
        obj = triple.object
        if isinstance(obj, Literal) and obj.language_tag is not None:
            if any_predicate or triple.predicate in predicate_filter:
                acc.observe(triple.subject, obj.language_tag)
    return acc


def merge_accumulators(a: CountAccumulator, b: CountAccumulator) -> CountAccumulator:
    """Combine two shard accumulators of the same mode and precision."""
    if a.mode != b.mode:
        raise ValueError(f"accumulator mode mismatch: {a.mode} != {b.mode}")
    if a.mode == "approximate" and (a.precision != b.precision or a.seed != b.seed):
        raise ValueError("sketch precision/seed mismatch")
    out = CountAccumulator(mode=a.mode, precision=a.precision, seed=a.seed)
    out.triples_seen = a.triples_seen + b.triples_seen
    out.parse_errors = a.parse_errors + b.parse_errors
    out.skipped_lines = a.skipped_lines + b.skipped_lines
    for src in (a, b):
        for tag, tracker in src.per_tag.items():
            existing = out.per_tag.get(tag)
            if existing is None:
                out.per_tag[tag] = set(tracker) if a.mode == "exact" else tracker.copy()
            elif a.mode == "exact":
                existing |= tracker
            else:
                out.per_tag[tag] = existing.merge(tracker)
    return out


def report_counts(acc: CountAccumulator) -> dict:
    """Distinct-subject count per language tag (estimate in sketch mode)."""
    if acc.mode == "exact":
        return {tag: len(subjects) for tag, subjects in acc.per_tag.items()}
    return {tag: sketch.count() for tag, sketch in acc.per_tag.items()}


def open_maybe_gzip(path: Union[str, Path]) -> Iterator[str]:
    """Open a text stream, transparently decompressing gzip (magic bytes)."""
    path = Path(path)
    with open(path, "rb") as probe:
        magic = probe.read(2)
    if magic == b"\x1f\x8b":
        return io.TextIOWrapper(gzip.open(path, "rb"), encoding="utf-8")
    return open(path, "r", encoding="utf-8")
