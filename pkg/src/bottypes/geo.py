"""Declared-location resolution to US / China / RestOfWorld / Unknown.

The offline gazetteer is always consulted first. An optional
Nominatim-compatible HTTP client covers coordinates and strings the
gazetteer cannot place.
"""

from __future__ import annotations

import csv
import json
import logging
import threading
import unicodedata
import urllib.parse
import urllib.request
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Protocol

from .corpus import IngestionError, UserProfile

log = logging.getLogger(__name__)


class RegionLabel(str, Enum):
    US = "US"
    CHINA = "China"
    REST_OF_WORLD = "RestOfWorld"
    UNKNOWN = "Unknown"


ANALYSED_REGIONS = (RegionLabel.US, RegionLabel.CHINA, RegionLabel.REST_OF_WORLD)


def country_to_region(code: str | None) -> RegionLabel:
    if not code:
        return RegionLabel.UNKNOWN
    code = code.upper()
    if code == "US":
        return RegionLabel.US
    if code == "CN":
        return RegionLabel.CHINA
    return RegionLabel.REST_OF_WORLD


def normalize_place(text: str) -> str:
    """Case-fold, turn punctuation/symbols into spaces, collapse whitespace."""
    chars = []
    for ch in text.casefold():
        cat = unicodedata.category(ch)
        chars.append(" " if cat[0] in "PSZC" else ch)
    return " ".join("".join(chars).split())


@dataclass(frozen=True)
class CountryBox:
    country_code: str
    min_lat: float
    min_lon: float
    max_lat: float
    max_lon: float

    def contains(self, lat: float, lon: float) -> bool:
        return self.min_lat <= lat <= self.max_lat and self.min_lon <= lon <= self.max_lon


@dataclass(frozen=True)
class Gazetteer:
    entries: Mapping[str, str]
    boxes: tuple[CountryBox, ...] = ()
    ambiguous: frozenset[str] = frozenset()

    def lookup(self, place: str) -> str | None:
        return self.entries.get(normalize_place(place))

    def lookup_coordinates(self, lat: float, lon: float) -> str | None:
        """Country whose box contains the point; overlapping countries give None."""
        hits = {b.country_code for b in self.boxes if b.contains(lat, lon)}
        return hits.pop() if len(hits) == 1 else None

    @staticmethod
    def region_of(code: str | None) -> RegionLabel:
        return country_to_region(code)


def _data_path(name: str) -> Path:
    return Path(str(resources.files("bottypes") / "data" / name))


def default_gazetteer_path() -> Path:
    return _data_path("gazetteer.csv")


def default_boxes_path() -> Path:
    return _data_path("country_boxes.csv")


def _rows(path: Path) -> Iterable[tuple[int, list[str]]]:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise IngestionError(f"cannot read gazetteer {path}: {exc}") from exc
    lines = (ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#"))
    for lineno, row in enumerate(csv.reader(lines), start=1):
        yield lineno, row


def load_boxes(path: str | Path) -> tuple[CountryBox, ...]:
    boxes = []
    for lineno, row in _rows(Path(path)):
        try:
            cc, a, b, c, d = row
            boxes.append(CountryBox(cc.strip().upper(), float(a), float(b), float(c), float(d)))
        except ValueError:
            log.warning("%s:%d: malformed box row skipped", path, lineno)
    return tuple(boxes)


def load_gazetteer(path: str | Path, boxes_path: str | Path | None = None) -> Gazetteer:
    """Read ``place,iso3166_alpha2`` rows.

    A place listed under two different countries is ambiguous and dropped.
    """
    path = Path(path)
    entries: dict[str, str] = {}
    ambiguous: set[str] = set()
    for lineno, row in _rows(path):
        if len(row) != 2 or not row[0].strip() or len(row[1].strip()) != 2 or not row[1].strip().isalpha():
            log.warning("%s:%d: malformed gazetteer row skipped: %r", path, lineno, row)
            continue
        key, code = normalize_place(row[0]), row[1].strip().upper()
        if not key or key in ambiguous:
            continue
        prev = entries.get(key)
        if prev is not None and prev != code:
            log.warning("ambiguous place %r (%s vs %s) dropped", key, prev, code)
            del entries[key]
            ambiguous.add(key)
            continue
        entries[key] = code
    boxes = load_boxes(boxes_path) if boxes_path is not None else ()
    return Gazetteer(entries=entries, boxes=boxes, ambiguous=frozenset(ambiguous))


def load_default_gazetteer() -> Gazetteer:
    return load_gazetteer(default_gazetteer_path(), default_boxes_path())


# --------------------------------------------------------------------------
# HTTP geocoder


class GeocoderError(RuntimeError):
    pass


class GeocoderClient(Protocol):
    def reverse(self, lat: float, lon: float) -> str | None: ...

    def search(self, query: str) -> str | None: ...


def _country_code(payload: object) -> str | None:
    if isinstance(payload, list):
        payload = payload[0] if payload else None
    if not isinstance(payload, dict):
        return None
    cc = (payload.get("address") or {}).get("country_code")
    return cc.upper() if isinstance(cc, str) and cc else None


class NominatimClient:
    """Minimal client for Nominatim's ``/reverse`` and ``/search`` endpoints.

    Only ``address.country_code`` of the response is read, so any server
    version that returns ``addressdetails`` works. Search results are cached
    per query string.
    """

    def __init__(self, base_url: str, timeout: float = 10.0, user_agent: str = "bottypes/0.1"):
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout
        self.user_agent = user_agent
        self._cache: dict[tuple, str | None] = {}
        self._lock = threading.Lock()

    def _get(self, endpoint: str, params: dict[str, object]) -> object:
        key = (endpoint, tuple(sorted(params.items())))
        with self._lock:
            if key in self._cache:
                return self._cache[key]
        query = urllib.parse.urlencode({**params, "format": "jsonv2", "addressdetails": 1})
        req = urllib.request.Request(f"{self.base_url}/{endpoint}?{query}", headers={"User-Agent": self.user_agent})
        try:
            with urllib.request.urlopen(req, timeout=self.timeout) as resp:
                payload = json.loads(resp.read().decode("utf-8"))
        except Exception as exc:  # noqa: BLE001 - every transport failure falls through the same way
            raise GeocoderError(f"{endpoint} failed: {exc}") from exc
        code = _country_code(payload)
        with self._lock:
            self._cache[key] = code
        return code

    def reverse(self, lat: float, lon: float) -> str | None:
        return self._get("reverse", {"lat": lat, "lon": lon})

    def search(self, query: str) -> str | None:
        return self._get("search", {"q": query, "limit": 1})


# --------------------------------------------------------------------------
# resolution


@dataclass(frozen=True)
class Resolution:
    region: RegionLabel
    country_code: str | None
    stage: str
    client_failures: int = 0
    disagreement: bool = False


@dataclass
class ResolutionReport:
    regions: Counter = field(default_factory=Counter)
    stages: Counter = field(default_factory=Counter)
    client_failures: int = 0
    disagreements: int = 0

    def add(self, r: Resolution) -> None:
        self.regions[r.region.value] += 1
        self.stages[r.stage] += 1
        self.client_failures += r.client_failures
        self.disagreements += int(r.disagreement)

    def to_dict(self) -> dict:
        return {
            "regions": {lab.value: self.regions.get(lab.value, 0) for lab in RegionLabel},
            "stages": dict(sorted(self.stages.items())),
            "client_failures": self.client_failures,
            "coordinate_string_disagreements": self.disagreements,
        }


def _string_lookup(location: str, gazetteer: Gazetteer) -> tuple[str | None, str]:
    code = gazetteer.lookup(location)
    if code is not None:
        return code, "string_full"
    for segment in reversed(location.split(",")):
        if segment.strip():
            code = gazetteer.lookup(segment)
            if code is not None:
                return code, "string_segment"
    return None, ""


def resolve_detail(profile: UserProfile, gazetteer: Gazetteer, client: GeocoderClient | None = None) -> Resolution:
    failures = 0
    coord_code: str | None = None
    if profile.declared_coordinates is not None:
        lat, lon = profile.declared_coordinates
        if client is not None:
            try:
                coord_code = client.reverse(lat, lon)
            except GeocoderError:
                failures += 1
        else:
            coord_code = gazetteer.lookup_coordinates(lat, lon)

    location = (profile.declared_location or "").strip()
    str_code, str_stage = _string_lookup(location, gazetteer) if location else (None, "")

    if coord_code is not None:
        stage = "client_reverse" if client is not None else "coordinate_box"
        disagree = str_code is not None and str_code != coord_code
        return Resolution(country_to_region(coord_code), coord_code, stage, failures, disagree)
    if str_code is not None:
        return Resolution(country_to_region(str_code), str_code, str_stage, failures)
    if client is not None and location:
        try:
            code = client.search(location)
        except GeocoderError:
            failures += 1
            code = None
        if code is not None:
            return Resolution(country_to_region(code), code, "client_search", failures)
    return Resolution(RegionLabel.UNKNOWN, None, "unresolved", failures)


def resolve_location(profile: UserProfile, gazetteer: Gazetteer, client: GeocoderClient | None = None) -> RegionLabel:
    return resolve_detail(profile, gazetteer, client).region


def resolve_many(
    profiles: Iterable[UserProfile],
    gazetteer: Gazetteer,
    client: GeocoderClient | None = None,
    max_in_flight: int = 4,
) -> tuple[dict[str, Resolution], ResolutionReport]:
    profiles = list(profiles)
    if client is None or max_in_flight <= 1:
        results = [resolve_detail(p, gazetteer, client) for p in profiles]
    else:
        with ThreadPoolExecutor(max_workers=max_in_flight) as pool:
            results = list(pool.map(lambda p: resolve_detail(p, gazetteer, client), profiles))
    report = ResolutionReport()
    out: dict[str, Resolution] = {}
    for p, r in zip(profiles, results):
        out[p.user_id] = r
        report.add(r)
    return out, report
