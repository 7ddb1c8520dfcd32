"""Run the full pipeline on the bundled demo corpus and score it against the planted truth.

    python scripts/demo_run.py --out out/demo
"""

from __future__ import annotations

import argparse
import csv
import json
from collections import Counter

from bottypes.pipeline import Pipeline, fixture_config, fixture_dir

ROLE_TO_TYPE = {"Human": "Human", "General": "General", "NewsProfile": "News", "NewsHeadline": "News", "Bridging": "Bridging"}


def _column(path, key):
    with open(path, encoding="utf-8", newline="") as fh:
        return {r["user_id"]: r[key] for r in csv.DictReader(fh)}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="out/demo")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    pipe = Pipeline(fixture_config(args.out, seed=args.seed))
    manifest = pipe.run()
    truth = json.loads((fixture_dir() / "truth.json").read_text(encoding="utf-8"))

    regions = _column(pipe.path("geo", "regions.csv"), "region")
    types = _column(pipe.path("cluster", "user_types.csv"), "user_type")
    region_hits = sum(regions[u] == t["region"] for u, t in truth.items())
    confusion = Counter((ROLE_TO_TYPE[t["role"]], types[u]) for u, t in truth.items())

    print(f"stages: {', '.join(manifest.stages)}")
    print(f"regions recovered: {region_hits}/{len(truth)}")
    print("planted type -> assigned type")
    for (want, got), n in sorted(confusion.items()):
        print(f"  {want:<9} -> {got:<9} {n:>4}{'' if want == got else '  <-- mismatch'}")
    print()
    print((pipe.out / "report" / "proportions.txt").read_text(encoding="utf-8"), end="")


if __name__ == "__main__":
    main()
