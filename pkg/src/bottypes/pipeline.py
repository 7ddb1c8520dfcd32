"""End-to-end pipeline with every stage persisted under one output directory.

Each stage reads only its predecessors' files, so any stage can be rerun on
its own and gives the same bytes as a full run. Layout::

    ingest/     tweets.jsonl users.jsonl skip_report.json
    geo/        regions.csv report.json
    bots/       scores.csv verdicts.csv
    news/       headline_model.json verdicts.csv
    graph/      edges.csv nodes.csv summary.json
    cluster/    clusters.csv modularity.json bridging.csv types.csv user_types.csv
    centrality/ centrality.csv
    topics/     terms.csv
    bend/       scores.csv summary.csv
    report/     proportions.{csv,txt} centrality_means.{csv,txt} bend_summary.txt
    manifest.json
"""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

from . import __version__
from .botdetect import (
    DEFAULT_THRESHOLD,
    BotScore,
    ScoreSource,
    apply_threshold,
    default_model_path,
    extract_features,
    read_scores,
    read_verdicts,
    score_baseline,
    write_scores,
    write_verdicts,
)
from .corpus import Corpus, IngestionError, dump_corpus, ingest_jsonl
from .forest import RandomForest
from .geo import NominatimClient, default_boxes_path, default_gazetteer_path, load_gazetteer, resolve_many
from .maneuvers import LexiconSet, ManeuverConfig, default_lexicon_dir, score_all, summarize, write_scores_csv, write_summary_csv
from .netgraph.bridging import (
    BotType,
    bridging_bots,
    exclusive_type_map,
    finalize_types,
    write_bridging_csv,
    write_types_csv,
)
from .netgraph.centrality import centralities, read_centrality_csv, write_centrality_csv
from .netgraph.graph import build_graph, prune, read_graph_csv, write_edges_csv, write_nodes_csv
from .netgraph.louvain import louvain, read_clusters_csv, write_clusters_csv
from .newsbot import (
    DEFAULT_NEWS_FRACTION,
    HeadlineModel,
    classify_news_bots,
    load_training_texts,
    read_verdicts_csv,
    train_headline_model,
    write_verdicts_csv,
)
from .reports import (
    format_centrality_means,
    format_proportions,
    report_centrality_means,
    report_proportions,
    write_centrality_means_csv,
    write_proportions_csv,
)
from .topics import TokenizerConfig, read_wordlist, group_topics, write_term_csv

PATH_FIELDS = (
    "tweets", "users", "gazetteer", "boxes", "lexicons", "stopwords", "event_phrases",
    "scores", "bot_model", "headline_model", "headlines", "non_headlines",
)


class StageError(RuntimeError):
    """A stage failed; ``stage`` names it and ``__cause__`` holds the reason."""

    def __init__(self, stage: str, message: str, input_error: bool = False):
        super().__init__(f"stage {stage}: {message}")
        self.stage = stage
        self.input_error = input_error


@dataclass(frozen=True)
class PipelineConfig:
    """Every tunable of a run. Paths left as None fall back to bundled data.

    Relative paths in a config file are resolved against the file's folder.
    """

    tweets: str | None = None
    users: str | None = None
    language: str | None = None
    gazetteer: str | None = None
    boxes: str | None = None
    geocoder_url: str | None = None
    lexicons: str | None = None
    stopwords: str | None = None
    event_phrases: str | None = None
    scores: str | None = None
    bot_model: str | None = None
    headline_model: str | None = None
    headlines: str | None = None
    non_headlines: str | None = None
    bot_threshold: float = DEFAULT_THRESHOLD
    news_fraction: float = DEFAULT_NEWS_FRACTION
    news_include_retweets: bool = True
    prune_min_edge_weight: int = 10
    prune_min_component_size: int = 5
    bridging_min_edges: int = 1
    type_precedence: tuple[str, ...] = ("Bridging", "News", "General")
    louvain_resolution: float = 1.0
    louvain_restarts: int = 8
    weighted_betweenness: bool = False
    per_component_eigenvector: bool = False
    top_k: int = 500
    keep_hashtag_words: bool = False
    kappa_engage: float = 5.0
    kappa_explain: float = 3.0
    kappa_boost: float = 10.0
    seed: int = 0
    output_dir: str = "out"

    def __post_init__(self) -> None:
        if not 0.0 <= self.bot_threshold <= 1.0:
            raise ValueError("bot_threshold must lie in [0, 1]")
        if not 0.0 < self.news_fraction <= 1.0:
            raise ValueError("news_fraction must lie in (0, 1]")
        if self.prune_min_edge_weight < 1 or self.prune_min_component_size < 1:
            raise ValueError("pruning thresholds must be >= 1")
        if self.bridging_min_edges < 1:
            raise ValueError("bridging_min_edges must be >= 1")
        if sorted(self.type_precedence) != sorted(t.value for t in BotType):
            raise ValueError("type_precedence must order General, News and Bridging")
        if self.louvain_resolution <= 0 or self.louvain_restarts < 1:
            raise ValueError("louvain_resolution must be > 0 and louvain_restarts >= 1")
        if self.top_k < 1:
            raise ValueError("top_k must be >= 1")
        object.__setattr__(self, "type_precedence", tuple(self.type_precedence))

    def to_dict(self) -> dict[str, Any]:
        d = dataclasses.asdict(self)
        d["type_precedence"] = list(self.type_precedence)
        return d

    @classmethod
    def from_dict(cls, d: dict[str, Any], base_dir: str | Path | None = None) -> "PipelineConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(d) - known)
        if unknown:
            raise ValueError(f"unknown config keys: {unknown}")
        d = dict(d)
        if base_dir is not None:
            for k in PATH_FIELDS + ("output_dir",):
                if d.get(k) is not None and not Path(d[k]).is_absolute():
                    d[k] = str(Path(base_dir) / d[k])
        if "type_precedence" in d:
            d["type_precedence"] = tuple(d["type_precedence"])
        return cls(**d)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def load(cls, path: str | Path) -> "PipelineConfig":
        path = Path(path)
        try:
            raw = json.loads(path.read_text(encoding="utf-8"))
        except OSError as exc:
            raise IngestionError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ValueError(f"config {path} is not valid JSON: {exc}") from exc
        return cls.from_dict(raw, base_dir=path.parent)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json(), encoding="utf-8")

    def replace(self, **changes: Any) -> "PipelineConfig":
        return dataclasses.replace(self, **changes)

    def digest(self) -> str:
        """Hash of every setting except file locations, which are covered by input digests."""
        d = {k: v for k, v in self.to_dict().items() if k not in PATH_FIELDS and k != "output_dir"}
        d["inputs_given"] = sorted(k for k in PATH_FIELDS if getattr(self, k) is not None)
        return hashlib.sha256(json.dumps(d, sort_keys=True).encode()).hexdigest()


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with path.open("rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


@dataclass
class RunManifest:
    config_hash: str
    input_digests: dict[str, str]
    row_counts: dict[str, dict[str, int]] = field(default_factory=dict)
    seed: int = 0
    version: str = __version__
    stages: list[str] = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "RunManifest":
        return cls(**json.loads(text))


def _count_rows(path: Path) -> int:
    with path.open(encoding="utf-8") as fh:
        n = sum(1 for line in fh if line.strip())
    return n - 1 if path.suffix == ".csv" else n


class Pipeline:
    """Stage runner bound to one config and output directory."""

    def __init__(self, config: PipelineConfig):
        self.config = config
        self.out = Path(config.output_dir)

    # -- helpers ----------------------------------------------------------

    def path(self, stage: str, name: str) -> Path:
        return self.out / stage / name

    def _dir(self, stage: str) -> Path:
        d = self.out / stage
        d.mkdir(parents=True, exist_ok=True)
        return d

    def _need(self, stage: str, *names: tuple[str, str]) -> None:
        for st, name in names:
            if not self.path(st, name).exists():
                raise StageError(stage, f"missing {st}/{name}; run the {st} stage first", input_error=True)

    def _input(self, stage: str, key: str, default: Path | None = None) -> Path | None:
        value = getattr(self.config, key)
        if value is None:
            return default
        p = Path(value)
        if not p.exists():
            raise StageError(stage, f"{key} file not found: {p}", input_error=True)
        return p

    def inputs(self) -> dict[str, Path]:
        c = self.config
        out = {}
        for key in PATH_FIELDS:
            v = getattr(c, key)
            if v is None:
                continue
            p = Path(v)
            if p.is_dir():
                for f in sorted(p.iterdir()):
                    if f.is_file():
                        out[f"{key}/{f.name}"] = f
            elif p.exists():
                out[key] = p
        return out

    def _load_corpus(self, stage: str) -> Corpus:
        self._need(stage, ("ingest", "tweets.jsonl"), ("ingest", "users.jsonl"))
        corpus, _ = ingest_jsonl(self.path("ingest", "tweets.jsonl"), None, self.path("ingest", "users.jsonl"))
        return corpus

    def _regions(self, stage: str) -> dict[str, str]:
        self._need(stage, ("geo", "regions.csv"))
        with self.path("geo", "regions.csv").open(encoding="utf-8", newline="") as fh:
            return {r["user_id"]: r["region"] for r in csv.DictReader(fh)}

    def _bots(self, stage: str) -> list[str]:
        self._need(stage, ("bots", "verdicts.csv"))
        return [v.user_id for v in read_verdicts(self.path("bots", "verdicts.csv")) if v.is_bot]

    def _user_types(self, stage: str) -> dict[str, str]:
        self._need(stage, ("cluster", "user_types.csv"))
        with self.path("cluster", "user_types.csv").open(encoding="utf-8", newline="") as fh:
            return {r["user_id"]: r["user_type"] for r in csv.DictReader(fh)}

    # -- stages -----------------------------------------------------------

    def ingest(self) -> None:
        c = self.config
        if c.tweets is None:
            raise StageError("ingest", "no tweets file configured", input_error=True)
        tweets = self._input("ingest", "tweets")
        users = self._input("ingest", "users")
        try:
            corpus, report = ingest_jsonl(tweets, c.language, users)
        except IngestionError as exc:
            raise StageError("ingest", str(exc), input_error=True) from exc
        d = self._dir("ingest")
        dump_corpus(corpus, d)
        (d / "skip_report.json").write_text(json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8")

    def geotag(self) -> None:
        c = self.config
        gaz_path = self._input("geotag", "gazetteer", default_gazetteer_path())
        boxes = self._input("geotag", "boxes", default_boxes_path())
        corpus = self._load_corpus("geotag")
        gaz = load_gazetteer(gaz_path, boxes)
        client = NominatimClient(c.geocoder_url) if c.geocoder_url else None
        profiles = [corpus.users[u] for u in sorted(corpus.users)]
        res, report = resolve_many(profiles, gaz, client)
        d = self._dir("geo")
        with (d / "regions.csv").open("w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["user_id", "region", "country_code", "stage", "disagreement"])
            for uid in sorted(res):
                r = res[uid]
                w.writerow([uid, r.region.value, r.country_code or "", r.stage, int(r.disagreement)])
        (d / "report.json").write_text(json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8")

    def botscore(self) -> None:
        c = self.config
        corpus = self._load_corpus("botscore")
        d = self._dir("bots")
        scores_in = self._input("botscore", "scores")
        if scores_in is not None:
            imported, rejected = read_scores(scores_in)
            by_user = {s.user_id: s for s in imported}
            # accounts without an imported score are scored 0 and reported as such
            scores = [by_user.get(u, BotScore(u, 0.0, ScoreSource.IMPORTED)) for u in sorted(corpus.users)]
            missing = sorted(set(corpus.users) - set(by_user))
            (d / "import_report.json").write_text(
                json.dumps({"rejected": dict(sorted(rejected.items())), "missing_users": len(missing)}, indent=2, sort_keys=True) + "\n",
                encoding="utf-8",
            )
        else:
            model = RandomForest.load(self._input("botscore", "bot_model", default_model_path()))
            by_author = corpus.tweets_by_author()
            # "now" is the corpus's last tweet, so scores never depend on the wall clock
            now = max((t.created_at for t in corpus.tweets), default=None)
            scores = []
            for u in sorted(corpus.users):
                user = corpus.users[u]
                ref = max(now, user.account_created_at) if now is not None else user.account_created_at
                feats = extract_features(user, by_author.get(u, []), ref)
                scores.append(score_baseline(feats, model, u))
        write_scores(scores, d / "scores.csv")
        write_verdicts(apply_threshold(scores, c.bot_threshold), d / "verdicts.csv")

    def _headline_model(self) -> HeadlineModel:
        c = self.config
        given = self._input("classify", "headline_model")
        if given is not None:
            return HeadlineModel.load(given)
        from .newsbot import default_training_paths

        h_default, n_default = default_training_paths()
        h = self._input("classify", "headlines", h_default)
        n = self._input("classify", "non_headlines", n_default)
        return train_headline_model(load_training_texts(h), load_training_texts(n), seed=c.seed)

    def classify(self) -> None:
        c = self.config
        corpus = self._load_corpus("classify")
        bots = self._bots("classify")
        model = self._headline_model()
        d = self._dir("news")
        model.save(d / "headline_model.json")
        verdicts = classify_news_bots(bots, corpus, model, threshold=c.news_fraction, include_retweets=c.news_include_retweets)
        write_verdicts_csv(verdicts, d / "verdicts.csv")

    def graph(self) -> None:
        c = self.config
        corpus = self._load_corpus("graph")
        full = build_graph(corpus)
        pruned = prune(full, c.prune_min_edge_weight, c.prune_min_component_size)
        d = self._dir("graph")
        write_edges_csv(pruned, d / "edges.csv")
        write_nodes_csv(pruned, d / "nodes.csv")
        summary = {
            "full": {"nodes": len(full), "edges": len(full.edges)},
            "pruned": {"nodes": len(pruned), "edges": len(pruned.edges), "components": len(pruned.components())},
        }
        (d / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8")

    def _pruned(self, stage: str):
        self._need(stage, ("graph", "edges.csv"), ("graph", "nodes.csv"))
        return read_graph_csv(self.path("graph", "edges.csv"), self.path("graph", "nodes.csv"))

    def cluster(self) -> None:
        """Louvain, bridging verdicts and the final bot types."""
        c = self.config
        graph = self._pruned("cluster")
        corpus = self._load_corpus("cluster")
        bots = self._bots("cluster")
        self._need("cluster", ("news", "verdicts.csv"))
        news = read_verdicts_csv(self.path("news", "verdicts.csv"))
        d = self._dir("cluster")
        if len(graph) == 0:
            clusters = None
            bridging = []
            (d / "clusters.csv").write_text("user_id,cluster\n", encoding="utf-8")
            (d / "modularity.json").write_text(json.dumps({"clusters": 0, "modularity": None, "seed": c.seed}) + "\n", encoding="utf-8")
        else:
            clusters = louvain(graph, seed=c.seed, resolution=c.louvain_resolution, restarts=c.louvain_restarts)
            write_clusters_csv(clusters, d / "clusters.csv")
            info = {
                "clusters": clusters.n_clusters,
                "modularity": round(clusters.modularity, 12),
                "seed": c.seed,
                "resolution": c.louvain_resolution,
            }
            (d / "modularity.json").write_text(json.dumps(info, indent=2, sort_keys=True) + "\n", encoding="utf-8")
            bridging = bridging_bots(graph, clusters, bots, c.bridging_min_edges)
        write_bridging_csv(bridging, d / "bridging.csv")
        types = finalize_types(bots, news, bridging, [BotType(p) for p in c.type_precedence])
        write_types_csv(types, d / "types.csv")
        emap = exclusive_type_map(sorted(corpus.users), types)
        with (d / "user_types.csv").open("w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["user_id", "user_type"])
            for u in sorted(emap):
                w.writerow([u, emap[u]])

    def centrality(self) -> None:
        c = self.config
        graph = self._pruned("centrality")
        d = self._dir("centrality")
        if len(graph) == 0:
            (d / "centrality.csv").write_text("user_id,betweenness,eigenvector,total_degree\n", encoding="utf-8")
            return
        rep = centralities(graph, c.weighted_betweenness, c.per_component_eigenvector)
        write_centrality_csv(rep, d / "centrality.csv")

    def _tokenizer(self, stage: str) -> TokenizerConfig:
        c = self.config
        overrides: dict[str, Any] = {"keep_hashtag_words": c.keep_hashtag_words}
        sw = self._input(stage, "stopwords")
        if sw is not None:
            overrides["stopwords"] = frozenset(read_wordlist(sw))
        ev = self._input(stage, "event_phrases")
        if ev is not None:
            overrides["event_phrases"] = tuple(read_wordlist(ev))
        return TokenizerConfig.default(**overrides)

    def topics(self) -> None:
        c = self.config
        corpus = self._load_corpus("topics")
        regions = self._regions("topics")
        types = self._user_types("topics")
        tables = group_topics(corpus, regions, types, self._tokenizer("topics"), c.top_k)
        write_term_csv(tables, self._dir("topics") / "terms.csv")

    def bend(self) -> None:
        c = self.config
        corpus = self._load_corpus("bend")
        graph = self._pruned("bend")
        self._need("bend", ("cluster", "clusters.csv"))
        clusters = read_clusters_csv(self.path("cluster", "clusters.csv"), seed=c.seed)
        lex_dir = self._input("bend", "lexicons", default_lexicon_dir())
        lexicons = LexiconSet.load(lex_dir)
        mcfg = ManeuverConfig(kappa_engage=c.kappa_engage, kappa_explain=c.kappa_explain, kappa_boost=c.kappa_boost)
        scores = score_all(corpus, graph, clusters, lexicons, mcfg)
        regions = self._regions("bend")
        types = self._user_types("bend")
        groups = {u: f"{regions[u]}:{types[u]}" for u in types if regions.get(u) in ("US", "China", "RestOfWorld")}
        d = self._dir("bend")
        write_scores_csv(scores, d / "scores.csv")
        write_summary_csv(summarize(scores, groups), d / "summary.csv")

    def report(self) -> None:
        corpus = self._load_corpus("report")
        regions = self._regions("report")
        types = self._user_types("report")
        self._need("report", ("centrality", "centrality.csv"), ("bend", "summary.csv"))
        d = self._dir("report")
        rows = report_proportions(types, regions, corpus)
        write_proportions_csv(rows, d / "proportions.csv")
        (d / "proportions.txt").write_text(format_proportions(rows), encoding="utf-8")
        cent = read_centrality_csv(self.path("centrality", "centrality.csv"))
        cells = report_centrality_means(cent, types, regions)
        write_centrality_means_csv(cells, d / "centrality_means.csv")
        (d / "centrality_means.txt").write_text(format_centrality_means(cells), encoding="utf-8")
        (d / "bend_summary.txt").write_text(_format_bend_summary(self.path("bend", "summary.csv")), encoding="utf-8")

    # -- orchestration ----------------------------------------------------

    STAGES: tuple[str, ...] = (
        "ingest", "geotag", "botscore", "classify", "graph", "cluster", "centrality", "topics", "bend", "report",
    )

    def run_stage(self, name: str) -> None:
        if name not in self.STAGES:
            raise ValueError(f"unknown stage {name!r}")
        step: Callable[[], None] = getattr(self, name)
        try:
            step()
        except StageError:
            raise
        except IngestionError as exc:
            raise StageError(name, str(exc), input_error=True) from exc
        except Exception as exc:  # noqa: BLE001 - reported with the stage name
            raise StageError(name, f"{type(exc).__name__}: {exc}") from exc

    def manifest(self, stages: list[str]) -> RunManifest:
        digests = {role: _sha256(p) for role, p in sorted(self.inputs().items())}
        counts: dict[str, dict[str, int]] = {}
        for sub in sorted(p for p in self.out.iterdir() if p.is_dir()):
            files = {f.name: _count_rows(f) for f in sorted(sub.iterdir()) if f.suffix in (".csv", ".jsonl")}
            if files:
                counts[sub.name] = files
        return RunManifest(self.config.digest(), digests, counts, self.config.seed, __version__, stages)

    def run(self, stages: list[str] | None = None, skip: tuple[str, ...] = ()) -> RunManifest:
        todo = [s for s in (stages or list(self.STAGES)) if s not in skip]
        self.out.mkdir(parents=True, exist_ok=True)
        for s in todo:
            self.run_stage(s)
        m = self.manifest(todo)
        (self.out / "manifest.json").write_text(m.to_json(), encoding="utf-8")
        return m


def _format_bend_summary(path: Path) -> str:
    from .maneuvers import MANEUVERS

    with path.open(encoding="utf-8", newline="") as fh:
        rows = list(csv.DictReader(fh))
    lines = [f"{'group':<22} {'n':>4} " + " ".join(f"{m:>13}" for m in MANEUVERS)]
    for r in rows:
        cells = " ".join(f"{float(r[m + '_mean']):.3f}±{float(r[m + '_std']):.3f}".rjust(13) for m in MANEUVERS)
        lines.append(f"{r['group_id']:<22} {r['n_users']:>4} {cells}")
    return "\n".join(lines) + "\n"


def run_pipeline(config: PipelineConfig) -> RunManifest:
    return Pipeline(config).run()


def fixture_dir() -> Path:
    from importlib import resources

    return Path(str(resources.files("bottypes") / "data" / "fixture"))


def fixture_config(output_dir: str | Path = "out", **overrides: Any) -> PipelineConfig:
    """Config for the bundled 200-user demo corpus."""
    cfg = PipelineConfig.load(fixture_dir() / "config.json")
    return cfg.replace(output_dir=str(output_dir), **overrides)


__all__ = ["Pipeline", "PipelineConfig", "RunManifest", "StageError", "fixture_config", "fixture_dir", "run_pipeline"]
