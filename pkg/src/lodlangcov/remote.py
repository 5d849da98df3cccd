"""Clients for live count acquisition, plus offline CSV fallbacks.

Wikipedia article counts come from the MediaWiki siteinfo statistics
endpoint; per-language entity counts can alternatively be pulled from a
SPARQL endpoint, one count query per language so runs are resumable and
endpoint-friendly. Transports are injectable so the test suite runs
entirely on recorded responses.
"""

from __future__ import annotations

import csv
import json
import logging
import os
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Union

import requests

log = logging.getLogger(__name__)

USER_AGENT_ENV = "LODLANGCOV_USER_AGENT"
DEFAULT_USER_AGENT = "lodlangcov/0.1 (KG language coverage toolkit)"


def user_agent() -> str:
    return os.environ.get(USER_AGENT_ENV, DEFAULT_USER_AGENT)


@dataclass(frozen=True)
class WikiEdition:
    edition_code: str
    api_url: str

    def __post_init__(self):
        if not self.edition_code:
            raise ValueError("empty edition code")
        if not self.api_url.startswith(("http://", "https://")):
            raise ValueError(f"api_url must be an absolute IRI: {self.api_url!r}")

    @classmethod
    def for_code(cls, code: str, url_template: str = "https://{code}.wikipedia.org/w/api.php"):
        return cls(code, url_template.format(code=code))


@dataclass(frozen=True)
class SparqlEndpointConfig:
    endpoint_url: str
    timeout: float = 60.0
    max_concurrent: int = 2
    retry_budget: int = 3
    politeness_delay_ms: float = 250.0

    def __post_init__(self):
        if self.max_concurrent < 1:
            raise ValueError("max_concurrent must be >= 1")
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")
        if self.retry_budget < 0:
            raise ValueError("retry_budget must be >= 0")


@dataclass
class HttpResponse:
    status: int
    body: bytes

    def json(self):
        return json.loads(self.body.decode("utf-8"))


# Transport signature: (method, url, params, data, headers, timeout) -> HttpResponse
Transport = Callable[..., HttpResponse]


def requests_transport(method, url, params=None, data=None, headers=None, timeout=60.0) -> HttpResponse:
    resp = requests.request(method, url, params=params, data=data, headers=headers, timeout=timeout)
    return HttpResponse(resp.status_code, resp.content)


def fetch_wikipedia_article_counts(
    editions,
    transport: Optional[Transport] = None,
    timeout: float = 30.0,
):
    """Article count per edition from the siteinfo statistics API.

    Per-edition failures are recorded and never abort the batch:
    returns (counts: {edition_code: articles}, errors: {edition_code: reason}).
    """
    transport = transport or requests_transport
    counts: dict = {}
    errors: dict = {}
    params = {
        "action": "query",
        "meta": "siteinfo",
        "siprop": "statistics",
        "format": "json",
    }
    headers = {"User-Agent": user_agent()}
    for edition in editions:
        try:
            resp = transport("GET", edition.api_url, params=params, headers=headers, timeout=timeout)
        except Exception as exc:  # transport-level failure
            errors[edition.edition_code] = f"transport error: {exc}"
            continue
        if not 200 <= resp.status < 300:
            errors[edition.edition_code] = f"HTTP {resp.status}"
            continue
        try:
            articles = resp.json()["query"]["statistics"]["articles"]
        except (ValueError, KeyError, TypeError):
            errors[edition.edition_code] = "missing articles field in response"
            continue
        counts[edition.edition_code] = int(articles)
    return counts, errors


class SparqlError(RuntimeError):
    pass


class _PolitenessGate:
    """Global inter-request delay per endpoint, shared across workers."""

    def __init__(self, delay_ms: float, sleep=time.sleep):
        self._delay = delay_ms / 1000.0
        self._sleep = sleep
        self._lock = threading.Lock()
        self._next_ok = 0.0

    def wait(self):
        if self._delay <= 0:
            return
        with self._lock:
            now = time.monotonic()
            pause = self._next_ok - now
            self._next_ok = max(now, self._next_ok) + self._delay
        if pause > 0:
            self._sleep(pause)


def fetch_sparql_language_count(
    cfg: SparqlEndpointConfig,
    query_template: str,
    tag: str,
    transport: Optional[Transport] = None,
    sleep=time.sleep,
    _gate: Optional[_PolitenessGate] = None,
) -> int:
    """Run one count query with the language tag substituted.

    Expects a SPARQL results document with exactly one binding row
    holding one integer variable. Retries with exponential backoff up
    to the retry budget.
    """
    transport = transport or requests_transport
    if "{lang}" not in query_template:
        raise ValueError("query template must contain a {lang} placeholder")
    query = query_template.replace("{lang}", tag)
    headers = {
        "User-Agent": user_agent(),
        "Accept": "application/sparql-results+json",
        "Content-Type": "application/x-www-form-urlencoded",
    }
    gate = _gate or _PolitenessGate(cfg.politeness_delay_ms, sleep)
    last_error: Optional[Exception] = None
    for attempt in range(cfg.retry_budget + 1):
        if attempt:
            sleep(min(2.0 ** (attempt - 1), 30.0))
        gate.wait()
        try:
            resp = transport(
                "POST",
                cfg.endpoint_url,
                data={"query": query},
                headers=headers,
                timeout=cfg.timeout,
            )
        except Exception as exc:
            last_error = exc
            continue
        if not 200 <= resp.status < 300:
            last_error = SparqlError(f"HTTP {resp.status}")
            continue
        return _extract_single_count(resp)
    raise SparqlError(f"query for {tag!r} failed after {cfg.retry_budget} retries: {last_error}")


def _extract_single_count(resp: HttpResponse) -> int:
    try:
        doc = resp.json()
        bindings = doc["results"]["bindings"]
    except (ValueError, KeyError, TypeError):
        raise SparqlError("malformed SPARQL results document")
    if len(bindings) != 1:
        raise SparqlError(f"expected exactly 1 result row, got {len(bindings)}")
    row = bindings[0]
    if len(row) != 1:
        raise SparqlError(f"expected exactly 1 bound variable, got {len(row)}")
    value = next(iter(row.values()))["value"]
    try:
        count = int(value)
    except ValueError:
        raise SparqlError(f"count binding is not an integer: {value!r}")
    if count < 0:
        raise SparqlError(f"negative count: {count}")
    return count


def fetch_sparql_language_counts(
    cfg: SparqlEndpointConfig,
    query_template: str,
    tags,
    transport: Optional[Transport] = None,
    sleep=time.sleep,
):
    """Fetch many per-language counts with bounded concurrency.

    Returns (counts: {tag: n}, errors: {tag: reason}); sibling failures
    never discard successes.
    """
    gate = _PolitenessGate(cfg.politeness_delay_ms, sleep)
    counts: dict = {}
    errors: dict = {}

    def fetch(tag):
        return tag, fetch_sparql_language_count(
            cfg, query_template, tag, transport=transport, sleep=sleep, _gate=gate
        )

    with ThreadPoolExecutor(max_workers=cfg.max_concurrent) as pool:
        for tag, future in [(t, pool.submit(fetch, t)) for t in tags]:
            try:
                _, count = future.result()
                counts[tag] = count
            except Exception as exc:
                errors[tag] = str(exc)
    return counts, errors


def load_counts_csv(path: Union[str, Path]):
    """Load `source,language_tag,entity_count` rows; duplicates rejected."""
    rows = []
    seen = set()
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["source", "language_tag", "entity_count"]:
            raise ValueError(
                f"{path}: expected header source,language_tag,entity_count, got {header}"
            )
        for lineno, row in enumerate(reader, start=2):
            if len(row) != 3:
                raise ValueError(f"{path}:{lineno}: expected 3 columns, got {len(row)}")
            source, tag, raw_count = row[0].strip(), row[1].strip().lower(), row[2].strip()
            try:
                count = int(raw_count)
            except ValueError:
                raise ValueError(f"{path}:{lineno}: non-integer count {raw_count!r}")
            if count < 0:
                raise ValueError(f"{path}:{lineno}: negative count {count}")
            key = (source, tag)
            if key in seen:
                raise ValueError(f"{path}:{lineno}: duplicate (source, tag) pair {key}")
            seen.add(key)
            rows.append((source, tag, count))
    return rows


def load_article_counts_csv(path: Union[str, Path]):
    """Load `edition,articles` rows into a map; same validation rules."""
    counts: dict = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["edition", "articles"]:
            raise ValueError(f"{path}: expected header edition,articles, got {header}")
        for lineno, row in enumerate(reader, start=2):
            if len(row) != 2:
                raise ValueError(f"{path}:{lineno}: expected 2 columns, got {len(row)}")
            edition, raw_count = row[0].strip(), row[1].strip()
            try:
                count = int(raw_count)
            except ValueError:
                raise ValueError(f"{path}:{lineno}: non-integer count {raw_count!r}")
            if count < 0:
                raise ValueError(f"{path}:{lineno}: negative count {count}")
            if edition in counts:
                raise ValueError(f"{path}:{lineno}: duplicate edition {edition!r}")
            counts[edition] = count
    return counts
