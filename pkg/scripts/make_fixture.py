"""Regenerate every bundled data artefact from fixed seeds.

Writes into src/bottypes/data/:
  headlines.txt, conversational.txt   headline-classifier training corpora
  bot_model.json                      baseline forest fit on synthetic accounts
  fixture/                            the 200-user demo corpus, scores, truth and config
"""

from __future__ import annotations

import json
from pathlib import Path

from bottypes.botdetect import train_baseline
from bottypes.synth import labeled_account_features, training_corpora, write_demo_fixture

DATA = Path(__file__).resolve().parents[1] / "src" / "bottypes" / "data"

HEADER = {
    "headlines.txt": "# synthetic news headlines, one per line (scripts/make_fixture.py, seed 0)\n",
    "conversational.txt": "# synthetic conversational tweets, one per line (scripts/make_fixture.py, seed 0)\n",
}

FIXTURE_CONFIG = {
    "tweets": "tweets.jsonl",
    "users": "users.jsonl",
    "scores": "scores.csv",
    "language": "en",
    "seed": 0,
}


def main() -> None:
    heads, chat = training_corpora(1000, seed=0)
    for name, lines in (("headlines.txt", heads), ("conversational.txt", chat)):
        (DATA / name).write_text(HEADER[name] + "\n".join(lines) + "\n", encoding="utf-8")

    model = train_baseline(labeled_account_features(400, seed=0), seed=0)
    model.save(DATA / "bot_model.json")

    paths = write_demo_fixture(DATA / "fixture", seed=7)
    (DATA / "fixture" / "config.json").write_text(json.dumps(FIXTURE_CONFIG, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    for name, p in sorted(paths.items()):
        print(f"{name:>7}: {p.relative_to(DATA.parent.parent.parent)} ({p.stat().st_size} bytes)")


if __name__ == "__main__":
    main()
