from bottypes.pipeline import fixture_dir
from bottypes.synth import news_bot_corpus, planted_bridging, planted_partition, write_demo_fixture


def test_bundled_fixture_is_reproducible(tmp_path):
    paths = write_demo_fixture(tmp_path, seed=7)
    for name, path in paths.items():
        assert path.read_bytes() == (fixture_dir() / path.name).read_bytes(), name


def test_planted_partition_shape():
    g, truth = planted_partition(3, 10, 1.0, 0.0, seed=0)
    assert len(g) == 30 and len(g.edges) == 3 * 45 and len(g.components()) == 3
    assert sorted(set(truth.values())) == [0, 1, 2]


def test_planted_bridges_touch_both_blocks():
    case = planted_bridging(seed=1)
    for b in case.bridges:
        assert {case.blocks[nb] for nb in case.graph.neighbors(b)} == {0, 1}
    assert case.bridges < case.bots


def test_news_corpus_sizes():
    corpus, news = news_bot_corpus(seed=0)
    assert len(corpus.users) == 100 and len(news) == 50 and len(corpus.tweets) == 2000
