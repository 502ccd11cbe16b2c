"""Generate a desk-scale fixture dataset for the analysis pipelines.

Writes an embedding file with planted structure (cloud size growing
with word frequency, plus country cohorts with region-scaled radii), a
matching lexicon, similarity pairs with human-style scores, country and
city metadata, a vocabulary list, sentence templates, and two ready-run
config files. Everything is seeded, so reruns reproduce the same bytes.
"""

import argparse
from pathlib import Path

import numpy as np

from wordspace.distortion import SimilarityPair, cosine_similarity
from wordspace.formats import (
    EmbeddingRecord,
    LexiconEntry,
    write_city_table,
    write_country_table,
    write_embeddings,
    write_lexicon,
    write_similarity_pairs,
)
from wordspace.geo import CityRecord
from wordspace.synthetic import (
    context_trend_fixture,
    gaussian_cohorts,
    region_fixture,
)

TEMPLATE_SOURCE = Path(__file__).resolve().parents[1] / (
    "src/wordspace/data/context_templates.txt"
)


def cohort_records(cohorts):
    records = []
    for word in sorted(cohorts):
        cohort = cohorts[word]
        for cid, row in enumerate(cohort.points):
            records.append(
                EmbeddingRecord(
                    token=word, context_id=cid, source=cohort.source, vector=row
                )
            )
    return records


def build_pairs(cohorts, n_pairs, seed):
    """Score pairs by the cosine of two sampled contexts plus rater noise."""
    rng = np.random.default_rng(seed)
    words = sorted(cohorts)
    combos = [(a, b) for i, a in enumerate(words) for b in words[i + 1 :]]
    rng.shuffle(combos)
    pairs = []
    for w1, w2 in combos[:n_pairs]:
        c1 = int(rng.integers(len(cohorts[w1])))
        c2 = int(rng.integers(len(cohorts[w2])))
        cos = cosine_similarity(cohorts[w1].points[c1], cohorts[w2].points[c2])
        score = float(np.clip(5.0 + 4.5 * cos + rng.normal() * 0.7, 0.0, 10.0))
        pairs.append(
            SimilarityPair(
                word1=w1, word2=w2, context1_id=c1, context2_id=c2, human_score=score
            )
        )
    return pairs


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="fixtures", help="output directory")
    parser.add_argument("--seed", type=int, default=3)
    parser.add_argument("--words", type=int, default=40, help="frequency-planted words")
    parser.add_argument("--contexts", type=int, default=30, help="contexts per word")
    parser.add_argument("--pairs", type=int, default=40, help="similarity pairs")
    args = parser.parse_args(argv)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    cohorts, lexicon = gaussian_cohorts(
        n_words=args.words,
        points_per_word=args.contexts,
        dim=24,
        seed=args.seed,
    )
    countries, country_cohorts = region_fixture(
        countries_per_region=4,
        points_per_country=args.contexts,
        dim=24,
        seed=args.seed + 1,
        sources=("synthetic",),
    )
    records = cohort_records(cohorts) + cohort_records(country_cohorts["synthetic"])
    write_embeddings(records, out / "embeddings.emb")

    ctx = context_trend_fixture(n_words=60, n_contexts=30, dim=24, seed=args.seed + 2)
    write_embeddings(ctx.records, out / "contexts.emb")

    name_rng = np.random.default_rng(args.seed + 5)
    country_entries = [
        LexiconEntry(
            word=c.name,
            frequency=int(round(10.0 ** name_rng.uniform(3.0, 6.0))),
            sense_count=1,
            token_count=1,
            first_token_category="in_vocab_word",
        )
        for c in countries
    ]
    write_lexicon(
        list(lexicon.values()) + list(ctx.lexicon.values()) + country_entries,
        out / "lexicon.tsv",
    )
    write_similarity_pairs(
        build_pairs(cohorts, args.pairs, args.seed + 3), out / "pairs.tsv"
    )
    write_country_table(countries, out / "countries.tsv")

    rng = np.random.default_rng(args.seed + 4)
    cities = []
    for i, country in enumerate(countries):
        for j in range(3):
            cities.append(
                CityRecord(
                    name=f"{country.name}City{j}",
                    country=country.name,
                    region=country.region,
                    population=int(rng.integers(60_000, 5_000_000)),
                )
            )
    write_city_table(cities, out / "cities.tsv")

    in_vocab = [c.name for c in cities if rng.uniform() < 0.6]
    (out / "vocab.txt").write_text("\n".join(sorted(in_vocab)) + "\n")
    (out / "templates.txt").write_text(TEMPLATE_SOURCE.read_text())

    (out / "demo.cfg").write_text(
        "# main fixture set: radii, identity probes, distortion, geography\n"
        f"embeddings_path = {out / 'embeddings.emb'}\n"
        f"lexicon_path = {out / 'lexicon.tsv'}\n"
        f"pairs_path = {out / 'pairs.tsv'}\n"
        f"countries_path = {out / 'countries.tsv'}\n"
        f"cities_path = {out / 'cities.tsv'}\n"
        f"vocab_path = {out / 'vocab.txt'}\n"
        f"templates_path = {out / 'templates.txt'}\n"
        f"seed = {args.seed}\n"
    )
    (out / "context.cfg").write_text(
        "# context-retrieval fixture: mask rows train, word rows test\n"
        f"embeddings_path = {out / 'contexts.emb'}\n"
        f"lexicon_path = {out / 'lexicon.tsv'}\n"
        "templates_per_word = 30\n"
        f"seed = {args.seed}\n"
    )

    for name in sorted(p.name for p in out.iterdir()):
        print(out / name)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
