import pytest

from bottypes.corpus import IngestionError, UserProfile
from bottypes.geo import (
    GeocoderError,
    RegionLabel,
    country_to_region,
    load_default_gazetteer,
    load_gazetteer,
    normalize_place,
    resolve_detail,
    resolve_location,
    resolve_many,
)


@pytest.fixture(scope="module")
def gaz():
    return load_default_gazetteer()


class FakeClient:
    def __init__(self, reverse=None, search=None, fail=False):
        self._reverse, self._search, self.fail = reverse, search, fail
        self.calls = 0

    def reverse(self, lat, lon):
        self.calls += 1
        if self.fail:
            raise GeocoderError("down")
        return self._reverse

    def search(self, query):
        self.calls += 1
        if self.fail:
            raise GeocoderError("down")
        return self._search


@pytest.mark.parametrize(
    "location, region",
    [
        ("Austin, Texas", RegionLabel.US),
        ("  NEW YORK!! ", RegionLabel.US),
        ("北京", RegionLabel.CHINA),
        ("Shanghai, China", RegionLabel.CHINA),
        ("London", RegionLabel.REST_OF_WORLD),
        ("Hong Kong", RegionLabel.REST_OF_WORLD),
        ("somewhere over the rainbow", RegionLabel.UNKNOWN),
        ("", RegionLabel.UNKNOWN),
    ],
)
def test_string_resolution(gaz, location, region):
    assert resolve_location(UserProfile("u", declared_location=location), gaz) == region


def test_country_mapping():
    assert country_to_region("us") is RegionLabel.US
    assert country_to_region("CN") is RegionLabel.CHINA
    assert country_to_region("TW") is RegionLabel.REST_OF_WORLD
    assert country_to_region(None) is RegionLabel.UNKNOWN


def test_normalize_place():
    assert normalize_place("  Washington, D.C. ") == "washington d c"


@pytest.mark.parametrize(
    "lat, lon, region",
    [
        (30.27, -97.74, RegionLabel.US),  # Austin, near the Mexican border box
        (29.42, -98.49, RegionLabel.US),
        (32.22, -110.97, RegionLabel.US),
        (19.43, -99.13, RegionLabel.REST_OF_WORLD),
        (39.9, 116.4, RegionLabel.CHINA),
        (48.85, 2.35, RegionLabel.REST_OF_WORLD),
        (0.0, -150.0, RegionLabel.UNKNOWN),
    ],
)
def test_coordinate_boxes(gaz, lat, lon, region):
    assert resolve_location(UserProfile("u", declared_coordinates=(lat, lon)), gaz) == region


def test_coordinates_win_and_disagreement_is_flagged(gaz):
    r = resolve_detail(UserProfile("u", declared_location="Paris", declared_coordinates=(39.9, 116.4)), gaz)
    assert r.region is RegionLabel.CHINA and r.stage == "coordinate_box" and r.disagreement


def test_segment_fallback(gaz):
    r = resolve_detail(UserProfile("u", declared_location="my couch, Berlin"), gaz)
    assert r.region is RegionLabel.REST_OF_WORLD and r.stage == "string_segment"


def test_ambiguous_places_dropped(tmp_path):
    p = tmp_path / "g.csv"
    p.write_text("georgia,US\ngeorgia,GE\nparis,FR\nbroken row\n", encoding="utf-8")
    g = load_gazetteer(p)
    assert g.lookup("Georgia") is None and "georgia" in g.ambiguous
    assert g.lookup("PARIS") == "FR"


def test_missing_gazetteer(tmp_path):
    with pytest.raises(IngestionError):
        load_gazetteer(tmp_path / "absent.csv")


def test_client_reverse_and_search(gaz):
    r = resolve_detail(UserProfile("u", declared_coordinates=(1, 2)), gaz, FakeClient(reverse="cn"))
    assert r.region is RegionLabel.CHINA and r.stage == "client_reverse"
    r = resolve_detail(UserProfile("u", declared_location="zzzz"), gaz, FakeClient(search="DE"))
    assert r.region is RegionLabel.REST_OF_WORLD and r.stage == "client_search"


def test_client_failure_degrades_to_unknown(gaz):
    client = FakeClient(fail=True)
    profiles = [UserProfile(f"u{i}", declared_location="zzzz", declared_coordinates=(1, 2)) for i in range(6)]
    out, report = resolve_many(profiles, gaz, client, max_in_flight=3)
    assert all(r.region is RegionLabel.UNKNOWN for r in out.values())
    assert report.client_failures == 12
    assert list(out) == [p.user_id for p in profiles]


def test_client_failure_keeps_string_result(gaz):
    r = resolve_detail(UserProfile("u", declared_location="Tokyo", declared_coordinates=(1, 2)), gaz, FakeClient(fail=True))
    assert r.region is RegionLabel.REST_OF_WORLD and r.client_failures == 1
