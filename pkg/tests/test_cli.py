import json

import pytest

from bottypes.cli import EXIT_INPUT, EXIT_OK, EXIT_STAGE, EXIT_USAGE, main
from bottypes.newsbot import HeadlineModel
from bottypes.forest import RandomForest


def test_full_run(tmp_path, capsys):
    assert main(["run", "--fixture", "--out", str(tmp_path)]) == EXIT_OK
    out = capsys.readouterr().out
    assert "completed 10 stages" in out and "region" in out
    assert (tmp_path / "manifest.json").exists()


def test_single_stages_and_resume(tmp_path):
    out = str(tmp_path)
    for stage in ("ingest", "geotag", "botscore"):
        assert main([stage, "--fixture", "--out", out]) == EXIT_OK
    assert main(["run", "--fixture", "--out", out, "--from", "classify", "--skip", "topics"]) == EXIT_OK
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["stages"] == ["classify", "graph", "cluster", "centrality", "bend", "report"]


def test_usage_errors(tmp_path, capsys):
    assert main(["run", "--fixture", "--set", "nope=1", "--out", str(tmp_path)]) == EXIT_USAGE
    assert main(["run", "--fixture", "--set", "novalue", "--out", str(tmp_path)]) == EXIT_USAGE
    assert main(["run", "--fixture", "--set", "bot_threshold=2", "--out", str(tmp_path)]) == EXIT_USAGE
    assert main(["run", "--fixture", "--config", "x.json"]) == EXIT_USAGE
    with pytest.raises(SystemExit) as exc:
        main(["no-such-command"])
    assert exc.value.code == EXIT_USAGE


def test_input_errors(tmp_path, capsys):
    assert main(["run", "--fixture", "--out", str(tmp_path), "--set", f"gazetteer={tmp_path / 'none.csv'}"]) == EXIT_INPUT
    assert "geotag" in capsys.readouterr().err
    assert main(["cluster", "--fixture", "--out", str(tmp_path / "fresh")]) == EXIT_INPUT
    assert main(["run", "--config", str(tmp_path / "missing.json")]) == EXIT_INPUT


def test_stage_failure(tmp_path, capsys):
    bad = tmp_path / "model.json"
    bad.write_text('{"format": "something else"}')
    code = main(["run", "--fixture", "--out", str(tmp_path / "o"), "--set", f"headline_model={bad}"])
    assert code == EXIT_STAGE
    assert "classify" in capsys.readouterr().err


def test_write_config(capsys):
    assert main(["write-config", "--fixture", "--seed", "4"]) == EXIT_OK
    cfg = json.loads(capsys.readouterr().out)
    assert cfg["seed"] == 4 and cfg["bot_threshold"] == 0.7 and cfg["tweets"].endswith("tweets.jsonl")


def test_train_headline_model(tmp_path, capsys):
    path = tmp_path / "h.json"
    assert main(["train-headline-model", "--model", str(path)]) == EXIT_OK
    assert HeadlineModel.load(path).heldout_accuracy >= 0.85
    assert main(["train-headline-model", "--model", str(path), "--headlines", str(tmp_path / "none.txt")]) == EXIT_INPUT


def test_train_bot_model(tmp_path):
    path = tmp_path / "f.json"
    assert main(["train-bot-model", "--model", str(path), "--n-trees", "5"]) == EXIT_OK
    assert len(RandomForest.load(path).trees) == 5
    labels = tmp_path / "labels.csv"
    labels.write_text("account_age_days,label\n1,bot\n")
    assert main(["train-bot-model", "--model", str(path), "--labels", str(labels)]) == EXIT_INPUT
