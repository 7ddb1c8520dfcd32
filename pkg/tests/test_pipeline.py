import csv
import json

import pytest

from bottypes.pipeline import Pipeline, PipelineConfig, RunManifest, StageError, fixture_config, fixture_dir


def _rows(path):
    with open(path, encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))


@pytest.fixture(scope="module")
def fixture_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("fixture_run")
    pipe = Pipeline(fixture_config(out))
    manifest = pipe.run()
    return pipe, manifest


@pytest.fixture(scope="module")
def truth():
    return json.loads((fixture_dir() / "truth.json").read_text(encoding="utf-8"))


ROLE_TO_TYPE = {"Human": "Human", "General": "General", "NewsProfile": "News", "NewsHeadline": "News", "Bridging": "Bridging"}


def test_fixture_regions_recovered(fixture_run, truth):
    pipe, _ = fixture_run
    got = {r["user_id"]: r["region"] for r in _rows(pipe.path("geo", "regions.csv"))}
    assert got == {u: t["region"] for u, t in truth.items()}


def test_fixture_types_recovered(fixture_run, truth):
    pipe, _ = fixture_run
    got = {r["user_id"]: r["user_type"] for r in _rows(pipe.path("cluster", "user_types.csv"))}
    assert got == {u: ROLE_TO_TYPE[t["role"]] for u, t in truth.items()}


def test_threshold_boundary_in_fixture(fixture_run):
    pipe, _ = fixture_run
    verdicts = _rows(pipe.path("bots", "verdicts.csv"))
    at = [r for r in verdicts if float(r["p_bot"]) == 0.70]
    below = [r for r in verdicts if float(r["p_bot"]) == 0.6999]
    assert at and all(r["is_bot"] == "1" for r in at)
    assert below and all(r["is_bot"] == "0" for r in below)


def test_manifest_contents(fixture_run):
    pipe, manifest = fixture_run
    assert manifest.stages == list(Pipeline.STAGES)
    assert set(manifest.input_digests) == {"tweets", "users", "scores"}
    assert manifest.row_counts["ingest"]["users.jsonl"] == 200
    assert RunManifest.from_json((pipe.out / "manifest.json").read_text()) == manifest


def test_stage_rerun_is_byte_identical(fixture_run):
    pipe, _ = fixture_run
    for stage in ("cluster", "bend", "report"):
        files = sorted((pipe.out / stage).iterdir())
        before = {f.name: f.read_bytes() for f in files}
        pipe.run_stage(stage)
        assert {f.name: f.read_bytes() for f in sorted((pipe.out / stage).iterdir())} == before


def test_report_tables_present(fixture_run):
    pipe, _ = fixture_run
    rows = _rows(pipe.path("report", "proportions.csv"))
    assert {r["region"] for r in rows} == {"US", "China", "RestOfWorld"}
    assert {r["category"] for r in rows} == {"Bot", "Human", "General", "News", "Bridging"}
    means = _rows(pipe.path("report", "centrality_means.csv"))
    assert len(means) == 9


def test_missing_upstream_output_is_an_input_error(tmp_path):
    pipe = Pipeline(fixture_config(tmp_path))
    with pytest.raises(StageError) as err:
        pipe.run_stage("cluster")
    assert err.value.input_error and err.value.stage == "cluster"


def test_missing_gazetteer_aborts_geotag(tmp_path):
    pipe = Pipeline(fixture_config(tmp_path, gazetteer=str(tmp_path / "absent.csv")))
    with pytest.raises(StageError) as err:
        pipe.run()
    assert err.value.stage == "geotag" and err.value.input_error


def test_baseline_bot_model_when_no_scores(tmp_path):
    pipe = Pipeline(fixture_config(tmp_path, scores=None))
    pipe.run(["ingest", "botscore"])
    rows = _rows(pipe.path("bots", "scores.csv"))
    assert len(rows) == 200 and {r["source"] for r in rows} == {"BaselineModel"}


def test_pruning_everything_still_completes(tmp_path):
    pipe = Pipeline(fixture_config(tmp_path, prune_min_edge_weight=10**6))
    pipe.run()
    assert _rows(pipe.path("centrality", "centrality.csv")) == []


def test_config_round_trip_and_relative_paths(tmp_path):
    (tmp_path / "data").mkdir()
    (tmp_path / "cfg.json").write_text(json.dumps({"tweets": "data/t.jsonl", "seed": 3, "output_dir": "o"}))
    cfg = PipelineConfig.load(tmp_path / "cfg.json")
    assert cfg.tweets == str(tmp_path / "data" / "t.jsonl") and cfg.output_dir == str(tmp_path / "o")
    assert PipelineConfig.from_dict(cfg.to_dict()) == cfg


def test_config_validation():
    with pytest.raises(ValueError):
        PipelineConfig.from_dict({"bogus": 1})
    with pytest.raises(ValueError):
        PipelineConfig(bot_threshold=1.5)
    with pytest.raises(ValueError):
        PipelineConfig(type_precedence=("News", "General"))


def test_digest_ignores_locations_only():
    a = PipelineConfig(tweets="/x/t.jsonl", output_dir="a")
    assert a.digest() == a.replace(tweets="/y/t.jsonl", output_dir="b").digest()
    assert a.digest() != a.replace(seed=1).digest()
    assert a.digest() != a.replace(bot_threshold=0.8).digest()
