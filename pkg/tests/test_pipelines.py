"""End-to-end pipeline and CLI tests over temporary fixture files."""

import numpy as np
import pytest

from wordspace.cli import main
from wordspace.config import RunConfig
from wordspace.errors import InputError
from wordspace.formats import (
    EmbeddingRecord,
    LexiconEntry,
    read_report_csv,
    write_city_table,
    write_country_table,
    write_embeddings,
    write_lexicon,
    write_similarity_pairs,
)
from wordspace.distortion import SimilarityPair
from wordspace.geo import CityRecord
from wordspace.geometry import meb_coreset
from wordspace.pipelines import (
    build_identity_datasets,
    cohorts_from_records,
    distortion_pipeline,
    geo_pipeline,
    meb_pipeline,
    probe_context_pipeline,
    probe_identity_pipeline,
    report_pipeline,
    theory_check_pipeline,
)
from wordspace.synthetic import context_trend_fixture, region_fixture


def cloud_records(words, contexts, dim, seed, spread=8.0, sigma=0.5, source="synthetic"):
    """Well-separated per-word clouds; one record per (word, context)."""
    rng = np.random.default_rng(seed)
    records = []
    for word in words:
        center = rng.normal(size=dim) * spread
        for cid in range(contexts):
            records.append(
                EmbeddingRecord(
                    token=word,
                    context_id=cid,
                    source=source,
                    vector=center + rng.normal(size=dim) * sigma,
                )
            )
    return records


@pytest.fixture(scope="module")
def identity_files(tmp_path_factory):
    root = tmp_path_factory.mktemp("identity")
    words = [f"i{n:02d}" for n in range(12)]
    records = cloud_records(words, contexts=4, dim=8, seed=0)
    emb = root / "words.emb"
    write_embeddings(records, emb)
    categories = ("in_vocab_word", "short_nonword", "other")
    entries = [
        LexiconEntry(
            word=w,
            frequency=int(f),
            sense_count=(None, 1, 2, 5, 12)[n % 5],
            token_count=1 + n % 4,
            first_token_category=categories[n % 3],
        )
        for n, (w, f) in enumerate(zip(words, np.geomspace(1e2, 5e6, 12)))
    ]
    lex = root / "lexicon.tsv"
    write_lexicon(entries, lex)
    return emb, lex


@pytest.fixture(scope="module")
def context_file(tmp_path_factory):
    root = tmp_path_factory.mktemp("context")
    fx = context_trend_fixture(n_words=8, n_contexts=6, dim=8, seed=11)
    emb = root / "contexts.emb"
    write_embeddings(fx.records, emb)
    lex = root / "lexicon.tsv"
    write_lexicon(fx.lexicon.values(), lex)
    return emb, lex


@pytest.fixture(scope="module")
def distortion_files(tmp_path_factory):
    root = tmp_path_factory.mktemp("distortion")
    words = [f"d{n}" for n in range(8)]
    records = cloud_records(words, contexts=8, dim=6, seed=1, spread=4.0, sigma=0.3)
    emb = root / "pairs.emb"
    write_embeddings(records, emb)
    rng = np.random.default_rng(2)
    pairs = []
    combos = [(a, b) for i, a in enumerate(words) for b in words[i + 1 :]]
    for w1, w2 in combos[:20]:
        pairs.append(
            SimilarityPair(
                word1=w1,
                word2=w2,
                context1_id=int(rng.integers(8)),
                context2_id=int(rng.integers(8)),
                human_score=float(rng.uniform(0, 10)),
            )
        )
    tsv = root / "pairs.tsv"
    write_similarity_pairs(pairs, tsv)
    return emb, tsv


@pytest.fixture(scope="module")
def geo_files(tmp_path_factory):
    root = tmp_path_factory.mktemp("geo")
    countries, cohorts = region_fixture(
        countries_per_region=4, points_per_country=30, dim=16, seed=5
    )
    records = []
    for name, cohort in cohorts["base"].items():
        for cid, row in enumerate(cohort.points):
            records.append(
                EmbeddingRecord(token=name, context_id=cid, source="base", vector=row)
            )
    emb = root / "geo.emb"
    write_embeddings(records, emb)
    ctable = root / "countries.tsv"
    write_country_table(countries, ctable)
    cities = [
        CityRecord("Alpha", countries[0].name, "North America", 2_000_000),
        CityRecord("Beta", countries[0].name, "North America", 500_000),
        CityRecord("Gamma", countries[4].name, "Europe", 800_000),
        CityRecord("Delta", countries[4].name, "Europe", 90_000),
    ]
    citytable = root / "cities.tsv"
    write_city_table(cities, citytable)
    vocab = root / "vocab.txt"
    vocab.write_text("Alpha\nGamma\nunrelated\n")
    return emb, ctable, citytable, vocab


def table_map(tables):
    return {t.name: t for t in tables}


class TestCohortsFromRecords:
    def test_grouping_and_mask_skip(self):
        records = [
            EmbeddingRecord("a", 0, "s1", np.ones(2)),
            EmbeddingRecord("a", 1, "s1", np.zeros(2)),
            EmbeddingRecord("a", 0, "s2", np.ones(2)),
            EmbeddingRecord("[MASK]", 0, "s1", np.ones(2), is_mask=True),
        ]
        out = cohorts_from_records(records)
        assert set(out) == {"s1", "s2"}
        assert out["s1"]["a"].points.shape == (2, 2)
        assert out["s2"]["a"].points.shape == (1, 2)

    def test_min_points_filter(self):
        records = [
            EmbeddingRecord("a", 0, "s", np.ones(2)),
            EmbeddingRecord("b", 0, "s", np.ones(2)),
            EmbeddingRecord("b", 1, "s", np.zeros(2)),
        ]
        out = cohorts_from_records(records, min_points=2)
        assert set(out["s"]) == {"b"}

    def test_only_masks_rejected(self):
        records = [EmbeddingRecord("[MASK]", 0, "s", np.ones(2), is_mask=True)]
        with pytest.raises(InputError, match="no non-mask"):
            cohorts_from_records(records)


class TestBuildIdentityDatasets:
    def records(self):
        return cloud_records([f"w{n}" for n in range(7)], contexts=3, dim=4, seed=3)

    def test_partition_and_leftover_drop(self):
        datasets = build_identity_datasets(self.records(), classes_per_model=3, seed=0)
        assert len(datasets) == 2
        used = [w for ds in datasets for w in ds.classes]
        assert len(used) == len(set(used)) == 6

    def test_first_context_trains(self):
        records = self.records()
        datasets = build_identity_datasets(records, classes_per_model=7, seed=0)
        ds = datasets[0]
        by_word = {r.token: r for r in records if r.context_id == 0}
        for label, word in enumerate(ds.classes):
            assert np.array_equal(ds.train_x[label], by_word[word].vector)
        # remaining contexts all become test rows
        assert ds.test_x.shape == (14, 4)

    def test_source_filter(self):
        records = self.records() + cloud_records(
            ["x0", "x1"], contexts=3, dim=4, seed=4, source="other"
        )
        datasets = build_identity_datasets(
            records, classes_per_model=2, seed=0, source="other"
        )
        assert sorted(w for ds in datasets for w in ds.classes) == ["x0", "x1"]

    def test_single_context_words_excluded(self):
        records = [EmbeddingRecord("solo", 0, "s", np.ones(3))]
        with pytest.raises(InputError, match="at least 2"):
            build_identity_datasets(records, classes_per_model=2, seed=0)

    def test_too_few_words(self):
        with pytest.raises(InputError, match="classes_per_model=10"):
            build_identity_datasets(self.records(), classes_per_model=10, seed=0)


class TestMebPipeline:
    def test_tables_and_radii(self, identity_files):
        emb, lex = identity_files
        config = RunConfig(embeddings_path=emb, lexicon_path=lex, sample_size=5)
        tables = table_map(meb_pipeline(config))
        radii = tables["cohort_radii"]
        assert radii.columns == (
            "source",
            "word",
            "n_points",
            "radius",
            "mean_pairwise_distance",
            "frequency",
        )
        assert len(radii.rows) == 12
        # cohorts are smaller than sample_size, so radii are exact balls
        from wordspace.formats import read_embeddings

        records = read_embeddings(emb)
        first = radii.rows[0]
        points = np.vstack(
            [r.vector for r in records if r.token == first[1]]
        )
        assert first[3] == pytest.approx(meb_coreset(points, 1e-3).radius)
        corr = tables["radius_frequency_correlation"]
        assert corr.rows[0][1] == 12

    def test_missing_embeddings_config(self):
        with pytest.raises(InputError, match="embeddings_path"):
            meb_pipeline(RunConfig())


class TestProbeIdentityPipeline:
    def test_reports(self, identity_files):
        emb, lex = identity_files
        config = RunConfig(embeddings_path=emb, lexicon_path=lex)
        tables = table_map(probe_identity_pipeline(config))
        models = tables["identity_models"]
        assert models.rows[0][1] == 10
        assert models.rows[0][2] > 0.9
        for facet in ("frequency", "senses", "tokens", "first_token"):
            table = tables[f"identity_errors_by_{facet}"]
            assert table.columns == ("bin", "error_percent", "n_instances")
            assert sum(r[2] for r in table.rows) > 0


class TestProbeContextPipeline:
    def test_reports(self, context_file):
        emb, lex = context_file
        config = RunConfig(
            embeddings_path=emb, lexicon_path=lex, templates_per_word=6
        )
        tables = table_map(probe_context_pipeline(config))
        retrieval = tables["context_retrieval"]
        assert len(retrieval.rows) == 8
        assert all(0.0 <= row[1] <= 1.0 for row in retrieval.rows)
        corr = tables["context_frequency_correlation"]
        assert corr.rows[0][0] == 8

    def test_wrong_template_count(self, context_file):
        emb, lex = context_file
        config = RunConfig(embeddings_path=emb, templates_per_word=9)
        with pytest.raises(InputError, match="expected 9"):
            probe_context_pipeline(config)


class TestDistortionPipeline:
    def test_reports(self, distortion_files):
        emb, tsv = distortion_files
        config = RunConfig(embeddings_path=emb, pairs_path=tsv, sample_size=5)
        tables = table_map(distortion_pipeline(config))
        pairs = tables["distortion_pairs"]
        assert len(pairs.rows) == 20
        residual_sum = sum(row[5] for row in pairs.rows)
        assert abs(residual_sum) < 1e-6 * len(pairs.rows)
        fit = tables["distortion_fit"]
        assert fit.rows[0][3] == 20
        quartiles = tables["distortion_quartiles"]
        assert [q for q, _ in quartiles.rows] == [1, 2, 3, 4]
        assert all(-1.0 <= r <= 1.0 for _, r in quartiles.rows)

    def test_unknown_pair_word(self, distortion_files, tmp_path):
        emb, _ = distortion_files
        bad = tmp_path / "bad.tsv"
        write_similarity_pairs(
            [SimilarityPair("ghost", "d0", 0, 0, 5.0)], bad
        )
        config = RunConfig(embeddings_path=emb, pairs_path=bad, sample_size=5)
        with pytest.raises(InputError, match="ghost"):
            distortion_pipeline(config)


class TestGeoPipeline:
    def test_reports(self, geo_files):
        emb, ctable, citytable, vocab = geo_files
        config = RunConfig(
            embeddings_path=emb,
            countries_path=ctable,
            cities_path=citytable,
            vocab_path=vocab,
            sample_size=5,
        )
        tables = table_map(geo_pipeline(config))

        coverage = {row[0]: row for row in tables["city_vocab_coverage"].rows}
        # Delta sits under the population floor, so Europe counts 1 of 1
        assert coverage["North America"][1:3] == (1, 2)
        assert coverage["Europe"][1:3] == (1, 1)

        region = {row[1]: row[2] for row in tables["region_radius"].rows}
        assert region["North America"] == pytest.approx(100.0)
        assert region["Europe"] == pytest.approx(90.0, rel=0.01)
        assert region["Africa"] == pytest.approx(80.0, rel=0.01)

        gdp = tables["gdp_correlation"].rows[0]
        assert gdp[0] == "base"
        assert gdp[2] == 12

        counts = tables["similar_counts"]
        assert len(counts.rows) == 12
        assert all(row[2] >= 0 for row in counts.rows)


class TestTheoryAndReport:
    def test_theory_tables(self):
        tables = table_map(theory_check_pipeline(RunConfig(), samples_per_case=500))
        containment = tables["theory_containment"]
        assert {row[0] for row in containment.rows} == {2, 8, 768}
        assert all(row[7] for row in containment.rows)
        monotone = tables["theory_width_monotone"]
        assert all(row[1] for row in monotone.rows)

    def test_report_runs_configured_pipelines(self, identity_files):
        emb, lex = identity_files
        config = RunConfig(embeddings_path=emb, lexicon_path=lex, sample_size=5)
        names = [t.name for t in report_pipeline(config)]
        assert "theory_containment" in names
        assert "cohort_radii" in names
        assert "identity_models" in names
        assert "distortion_pairs" not in names
        assert len(names) == len(set(names))

    def test_report_theory_only(self):
        names = [t.name for t in report_pipeline(RunConfig())]
        assert names == ["theory_containment", "theory_width_monotone"]


def write_cfg(tmp_path, text):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(text)
    return cfg


class TestCli:
    def test_theory_check_stdout(self, capsys):
        rc = main(["theory-check"])
        out = capsys.readouterr().out
        assert rc == 0
        assert "# table theory_containment" in out
        assert "# table theory_width_monotone" in out

    def test_meb_to_directory(self, identity_files, tmp_path, capsys):
        emb, lex = identity_files
        cfg = write_cfg(
            tmp_path, f"embeddings_path = {emb}\nlexicon_path = {lex}\nsample_size = 5\n"
        )
        out_dir = tmp_path / "report"
        rc = main(["meb", "--config", str(cfg), "--out", str(out_dir)])
        assert rc == 0
        printed = capsys.readouterr().out.splitlines()
        assert str(out_dir / "cohort_radii.csv") in printed
        table = read_report_csv(out_dir / "cohort_radii.csv")
        assert len(table.rows) == 12

    def test_byte_identical_reruns(self, identity_files, tmp_path, capsys):
        emb, lex = identity_files
        cfg = write_cfg(
            tmp_path, f"embeddings_path = {emb}\nlexicon_path = {lex}\nsample_size = 5\n"
        )
        for d in ("r1", "r2"):
            assert main(["meb", "--config", str(cfg), "--out", str(tmp_path / d)]) == 0
        capsys.readouterr()
        for name in ("cohort_radii.csv", "radius_frequency_correlation.csv"):
            assert (tmp_path / "r1" / name).read_bytes() == (
                tmp_path / "r2" / name
            ).read_bytes()

    def test_json_lines_single_table_writes_file(
        self, identity_files, tmp_path, capsys
    ):
        # without a lexicon the meb pipeline emits one table, so --out
        # names the file itself rather than a directory
        emb, _ = identity_files
        cfg = write_cfg(tmp_path, f"embeddings_path = {emb}\nsample_size = 5\n")
        out = tmp_path / "radii.jsonl"
        rc = main(
            ["meb", "--config", str(cfg), "--out", str(out), "--format", "json-lines"]
        )
        assert rc == 0
        capsys.readouterr()
        import json

        lines = out.read_text().splitlines()
        assert len(lines) == 12
        assert json.loads(lines[0])["n_points"] == 4

    def test_missing_input_exits_2(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path, "seed = 1\n")
        rc = main(["meb", "--config", str(cfg)])
        err = capsys.readouterr().err
        assert rc == 2
        assert "embeddings_path" in err

    def test_missing_config_file_exits_2(self, tmp_path, capsys):
        rc = main(["meb", "--config", str(tmp_path / "ghost.cfg")])
        assert rc == 2
        assert "does not exist" in capsys.readouterr().err

    def test_corrupt_embeddings_exit_2(self, tmp_path, capsys):
        emb = tmp_path / "junk.emb"
        emb.write_bytes(b"JUNKJUNKJUNKJUNK")
        cfg = write_cfg(tmp_path, f"embeddings_path = {emb}\n")
        rc = main(["meb", "--config", str(cfg)])
        err = capsys.readouterr().err
        assert rc == 2
        assert "bad magic" in err

    def test_bad_epsilon_override_exits_2(self, capsys):
        rc = main(["theory-check", "--epsilon", "0.9"])
        assert rc == 2
        assert "epsilon" in capsys.readouterr().err

    def test_seed_override_changes_samples(self, capsys):
        rc1 = main(["theory-check", "--seed", "1"])
        out1 = capsys.readouterr().out
        rc2 = main(["theory-check", "--seed", "1"])
        out2 = capsys.readouterr().out
        rc3 = main(["theory-check", "--seed", "2"])
        out3 = capsys.readouterr().out
        assert rc1 == rc2 == rc3 == 0
        assert out1 == out2
        assert out1 != out3

    def test_unknown_command_rejected(self):
        with pytest.raises(SystemExit):
            main(["frobnicate"])
