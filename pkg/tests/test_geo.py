"""Geographic analyses: coverage counting, planted region ratios, GDP trends."""

import numpy as np
import pytest

from wordspace.errors import InputError
from wordspace.geo import (
    CityRecord,
    CountryRecord,
    active_countries,
    artificial_sentences,
    default_excluded_countries,
    gdp_radius_correlation,
    mark_excluded,
    region_radius_table,
    similar_country_count,
    vocab_coverage,
)
from wordspace.geometry import SiblingCohort
from wordspace.synthetic import region_fixture


def city(name, region="Europe", country="X", population=500_000):
    return CityRecord(name=name, country=country, region=region, population=population)


class TestVocabCoverage:
    def test_all_in_vocab(self):
        cities = [city(f"c{i}") for i in range(5)]
        table = vocab_coverage(cities, {f"c{i}" for i in range(5)})
        assert table["Europe"].percent == 100.0

    def test_three_of_ten(self):
        cities = [city(f"c{i}") for i in range(10)]
        table = vocab_coverage(cities, {"c0", "c1", "c2"})
        assert table["Europe"].covered == 3
        assert table["Europe"].total == 10
        assert table["Europe"].percent == pytest.approx(30.0)

    def test_population_filter(self):
        cities = [city("big", population=100_000), city("small", population=99_999)]
        table = vocab_coverage(cities, {"big", "small"})
        assert table["Europe"].total == 1

    def test_grouped_by_country(self):
        cities = [
            city(f"n{i}", country="Nigeria", region="Africa") for i in range(92)
        ] + [city(f"u{i}", country="United Kingdom") for i in range(67)]
        vocab = {f"n{i}" for i in range(2)} | {f"u{i}" for i in range(46)}
        table = vocab_coverage(cities, vocab, group_by="country")
        assert table["Nigeria"].covered == 2
        assert table["Nigeria"].total == 92
        assert table["United Kingdom"].covered == 46
        assert table["United Kingdom"].total == 67

    def test_order_invariant(self):
        cities = [city(f"c{i}", population=100_000 + i) for i in range(20)]
        vocab = {f"c{i}" for i in range(0, 20, 3)}
        forward = vocab_coverage(cities, vocab)
        backward = vocab_coverage(list(reversed(cities)), vocab)
        assert forward == backward

    def test_unknown_region_rejected(self):
        with pytest.raises(InputError, match="unknown region"):
            CityRecord(name="x", country="X", region="Atlantis", population=1_000_000)

    def test_empty_rejected(self):
        with pytest.raises(InputError):
            vocab_coverage([], {"a"})


class TestRegionRadiusTable:
    def test_identical_cohorts_read_100_everywhere(self):
        rng = np.random.default_rng(0)
        points = rng.normal(size=(30, 8))
        regions = ["North America", "Europe", "Africa", "Asia"]
        countries = [
            CountryRecord(name=f"C{i}", region=regions[i % 4]) for i in range(8)
        ]
        cohorts = {
            "base": {
                c.name: SiblingCohort(word=c.name, source="base", points=points)
                for c in countries
            }
        }
        table = region_radius_table(countries, cohorts)
        assert all(v == pytest.approx(100.0) for v in table["base"].values())

    def test_planted_scales_recovered(self):
        countries, cohorts = region_fixture()
        table = region_radius_table(countries, cohorts)["base"]
        assert table["North America"] == pytest.approx(100.0)
        assert table["Europe"] == pytest.approx(90.0, rel=0.01)
        assert table["Africa"] == pytest.approx(80.0, rel=0.01)

    def test_base_region_required(self):
        countries = [CountryRecord(name="A", region="Europe")]
        cohorts = {
            "base": {
                "A": SiblingCohort(
                    word="A", source="base", points=np.random.default_rng(0).normal(size=(20, 4))
                )
            }
        }
        with pytest.raises(InputError, match="North America"):
            region_radius_table(countries, cohorts)

    def test_missing_cohort_named(self):
        countries, cohorts = region_fixture()
        del cohorts["base"]["Country03"]
        with pytest.raises(InputError, match="Country03"):
            region_radius_table(countries, cohorts)

    def test_excluded_countries_skipped(self):
        countries, cohorts = region_fixture()
        excluded = mark_excluded(countries, ["Country00"], reason="test")
        del cohorts["base"]["Country00"]
        table = region_radius_table(excluded, cohorts)["base"]
        assert table["North America"] == pytest.approx(100.0)


class TestGdpRadiusCorrelation:
    def _countries(self, gdps):
        return [
            CountryRecord(name=f"C{i}", region="Europe", gdp=g)
            for i, g in enumerate(gdps)
        ]

    def test_radii_proportional_to_log_gdp(self):
        gdps = np.geomspace(1e9, 1e13, 40)
        countries = self._countries(gdps)
        radii = {c.name: float(np.log10(c.gdp)) for c in countries}
        result = gdp_radius_correlation(countries, radii)
        assert result.correlation == pytest.approx(1.0, abs=1e-9)
        assert result.n_used == 40

    def test_shuffled_radii_near_zero(self):
        rng = np.random.default_rng(15)
        gdps = np.geomspace(1e9, 1e13, 150)
        countries = self._countries(gdps)
        shuffled = rng.permutation(np.log10(gdps))
        radii = {c.name: float(r) for c, r in zip(countries, shuffled)}
        result = gdp_radius_correlation(countries, radii)
        assert abs(result.correlation) < 0.2

    def test_low_gdp_gap(self):
        # eight countries under 1e10 with radius 8, top-2 economies at radius 10
        countries = self._countries([1e9] * 8 + [1e11, 5e12, 9e12])
        radii = {f"C{i}": 8.0 for i in range(8)}
        radii.update({"C8": 7.0, "C9": 10.0, "C10": 10.0})
        result = gdp_radius_correlation(countries, radii)
        assert result.low_gdp_mean == pytest.approx(8.0)
        assert result.top_mean == pytest.approx(10.0)
        assert result.gap_percent == pytest.approx(20.0)

    def test_missing_gdp_skipped_with_warning(self):
        countries = self._countries(list(np.geomspace(1e9, 1e12, 12)))
        countries.append(CountryRecord(name="NoGdp", region="Asia", gdp=None))
        radii = {c.name: 1.0 + i * 0.1 for i, c in enumerate(countries)}
        with pytest.warns(UserWarning, match="NoGdp"):
            result = gdp_radius_correlation(countries, radii)
        assert result.n_used == 12
        assert result.skipped == ("NoGdp",)

    def test_too_few_usable_rejected(self):
        countries = self._countries([1e10] * 9)
        radii = {c.name: float(i) for i, c in enumerate(countries)}
        with pytest.raises(InputError, match="at least 10"):
            gdp_radius_correlation(countries, radii)

    def test_missing_radius_named(self):
        countries = self._countries(list(np.geomspace(1e9, 1e12, 11)))
        radii = {c.name: 1.0 for c in countries[:-1]}
        with pytest.raises(InputError, match="C10"):
            gdp_radius_correlation(countries, radii)


class TestArtificialSentences:
    def test_single_template(self):
        out = artificial_sentences(["I want to visit {} next year."], "Kenya")
        assert out == ["I want to visit Kenya next year."]

    def test_thirty_templates_idempotent(self):
        templates = [f"Sentence {i} about {{}} here." for i in range(30)]
        first = artificial_sentences(templates, "Peru")
        second = artificial_sentences(templates, "Peru")
        assert first == second
        assert len(first) == 30

    def test_contexts_differ_only_at_name_span(self):
        templates = ["The capital of {} is large.", "{} exports coffee."]
        a = artificial_sentences(templates, "Kenya")
        b = artificial_sentences(templates, "Peru")
        for s1, s2 in zip(a, b):
            assert s1.replace("Kenya", "#") == s2.replace("Peru", "#")

    def test_zero_slots_rejected(self):
        with pytest.raises(InputError, match="slot"):
            artificial_sentences(["No placeholder here."], "Kenya")

    def test_multiple_slots_rejected(self):
        with pytest.raises(InputError, match="slot"):
            artificial_sentences(["{} and {} twice."], "Kenya")

    def test_empty_list_rejected(self):
        with pytest.raises(InputError):
            artificial_sentences([], "Kenya")


def make_cohorts(vectors_by_country, copies=12, noise=0.0, seed=0):
    rng = np.random.default_rng(seed)
    out = {}
    for name, v in vectors_by_country.items():
        v = np.asarray(v, dtype=np.float64)
        points = np.tile(v, (copies, 1))
        if noise:
            points = points + rng.normal(size=points.shape) * noise
        out[name] = SiblingCohort(word=name, source="base", points=points)
    return out


class TestSimilarCountryCount:
    def test_identical_embeddings_count_all_others(self):
        cohorts = make_cohorts({"A": [1.0, 0.0], "B": [1.0, 0.0], "C": [1.0, 0.0]})
        assert similar_country_count("A", cohorts, instances=10) == 2.0

    def test_orthogonal_embeddings_count_zero(self):
        cohorts = make_cohorts(
            {"A": [1.0, 0.0, 0.0], "B": [0.0, 1.0, 0.0], "C": [0.0, 0.0, 1.0]}
        )
        assert similar_country_count("A", cohorts) == 0.0

    def test_monotone_nonincreasing_in_threshold(self):
        rng = np.random.default_rng(6)
        base = rng.normal(size=5)
        cohorts = {}
        for i in range(8):
            drift = rng.normal(size=5) * (0.1 * i)
            points = base + drift + rng.normal(size=(12, 5)) * 0.05
            cohorts[f"C{i}"] = SiblingCohort(word=f"C{i}", source="base", points=points)
        counts = [
            similar_country_count("C0", cohorts, threshold=t)
            for t in (0.0, 0.3, 0.5, 0.7, 0.9, 0.999)
        ]
        assert all(b <= a for a, b in zip(counts, counts[1:]))

    def test_aggregate_modes_ordering(self):
        rng = np.random.default_rng(44)
        cohorts = {}
        for i in range(6):
            points = rng.normal(size=(15, 4))
            cohorts[f"C{i}"] = SiblingCohort(word=f"C{i}", source="base", points=points)
        mean_count = similar_country_count("C0", cohorts, threshold=0.4, aggregate="mean")
        max_count = similar_country_count("C0", cohorts, threshold=0.4, aggregate="max")
        per_inst = similar_country_count(
            "C0", cohorts, threshold=0.4, aggregate="per_instance"
        )
        assert mean_count <= max_count
        assert per_inst <= max_count

    def test_deterministic(self):
        rng = np.random.default_rng(1)
        cohorts = {
            f"C{i}": SiblingCohort(
                word=f"C{i}", source="base", points=rng.normal(size=(20, 4))
            )
            for i in range(5)
        }
        a = similar_country_count("C0", cohorts, seed=5)
        b = similar_country_count("C0", cohorts, seed=5)
        assert a == b

    def test_insufficient_instances_named(self):
        cohorts = make_cohorts({"A": [1.0, 0.0], "B": [0.0, 1.0]}, copies=5)
        with pytest.raises(InputError, match="instances=10"):
            similar_country_count("A", cohorts, instances=10)

    def test_unknown_country_rejected(self):
        with pytest.raises(InputError, match="Z"):
            similar_country_count("Z", make_cohorts({"A": [1.0, 0.0]}))

    def test_unknown_aggregate_rejected(self):
        with pytest.raises(InputError, match="aggregate"):
            similar_country_count(
                "A", make_cohorts({"A": [1.0, 0.0], "B": [1.0, 0.0]}), aggregate="median"
            )


class TestExclusions:
    def test_default_list(self):
        assert default_excluded_countries() == {
            "Chad",
            "Jordan",
            "Mali",
            "Georgia",
            "Guinea",
        }

    def test_mark_and_filter(self):
        countries = [
            CountryRecord(name="Chad", region="Africa"),
            CountryRecord(name="Kenya", region="Africa"),
            CountryRecord(name="China", region="Asia"),
        ]
        marked = mark_excluded(countries, default_excluded_countries())
        active = active_countries(marked)
        assert [c.name for c in active] == ["Kenya", "China"]
        assert marked[0].excluded == "polysemous name"

    def test_validation(self):
        with pytest.raises(InputError):
            CountryRecord(name="X", region="Narnia")
        with pytest.raises(InputError):
            CountryRecord(name="X", region="Asia", gdp=0.0)
        with pytest.raises(InputError):
            CountryRecord(name="", region="Asia")
