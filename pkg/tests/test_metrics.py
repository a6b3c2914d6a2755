"""String metric correctness against independent oracles."""

from __future__ import annotations

import random
import string

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ontoalign.metrics import (
    damerau_levenshtein,
    edit_sim,
    jaccard_tokens,
    jaro,
    jaro_winkler,
    levenshtein,
)
from oracles import bfs_edit_distance, damerau_reference, jaro_reference, levenshtein_reference

short_text = st.text(alphabet=string.ascii_lowercase, max_size=12)


class TestLevenshtein:
    @pytest.mark.parametrize(
        "a,b,expected",
        [
            ("tumor", "tumor", 0),
            ("kitten", "sitting", 3),  # frozen from the recursive DP reference
            ("", "abc", 3),
            ("abc", "", 3),
            ("", "", 0),
        ],
    )
    def test_examples(self, a, b, expected):
        assert levenshtein(a, b) == expected
        assert levenshtein_reference(a, b) == expected

    def test_random_pairs_match_reference(self):
        rng = random.Random(101)
        for _ in range(300):
            a = "".join(rng.choices("abcde", k=rng.randint(0, 15)))
            b = "".join(rng.choices("abcde", k=rng.randint(0, 15)))
            assert levenshtein(a, b) == levenshtein_reference(a, b)

    def test_tiny_cases_match_exhaustive_search(self):
        rng = random.Random(7)
        for _ in range(40):
            a = "".join(rng.choices("abc", k=rng.randint(0, 4)))
            b = "".join(rng.choices("abc", k=rng.randint(0, 4)))
            if a == b:
                continue
            assert levenshtein(a, b) == bfs_edit_distance(a, b, transpositions=False)


class TestDamerauLevenshtein:
    @pytest.mark.parametrize(
        "a,b,expected",
        [
            ("ca", "ac", 1),
            ("kitten", "sitting", 3),  # no transposition helps here
            ("a", "a", 0),
            ("ca", "abc", 2),  # unrestricted variant: transpose then insert
            ("abc", "ca", 2),
        ],
    )
    def test_examples(self, a, b, expected):
        assert damerau_levenshtein(a, b) == expected
        assert damerau_reference(a, b) == expected

    def test_random_pairs_match_reference(self):
        rng = random.Random(202)
        for _ in range(300):
            a = "".join(rng.choices("abcd", k=rng.randint(0, 12)))
            b = "".join(rng.choices("abcd", k=rng.randint(0, 12)))
            assert damerau_levenshtein(a, b) == damerau_reference(a, b)

    def test_tiny_cases_match_exhaustive_search(self):
        rng = random.Random(9)
        for _ in range(40):
            a = "".join(rng.choices("abc", k=rng.randint(0, 4)))
            b = "".join(rng.choices("abc", k=rng.randint(0, 4)))
            if a == b:
                continue
            assert damerau_levenshtein(a, b) == bfs_edit_distance(a, b, transpositions=True)

    @given(short_text, short_text)
    def test_never_exceeds_levenshtein(self, a, b):
        assert damerau_levenshtein(a, b) <= levenshtein(a, b)


class TestJaro:
    def test_hand_computed_martha(self):
        # m = 6 matches, t = 1 transposition: (1 + 1 + 5/6) / 3 = 17/18
        assert jaro("MARTHA", "MARHTA") == pytest.approx(17 / 18, abs=1e-12)

    @pytest.mark.parametrize(
        "a,b,expected",
        [("abc", "abc", 1.0), ("abc", "xyz", 0.0), ("", "", 1.0), ("", "abc", 0.0)],
    )
    def test_examples(self, a, b, expected):
        assert jaro(a, b) == expected

    def test_random_pairs_match_reference(self):
        rng = random.Random(303)
        for _ in range(300):
            a = "".join(rng.choices("abcdef", k=rng.randint(0, 10)))
            b = "".join(rng.choices("abcdef", k=rng.randint(0, 10)))
            assert jaro(a, b) == pytest.approx(jaro_reference(a, b), abs=1e-12)


class TestJaroWinkler:
    def test_hand_computed_martha(self):
        # common prefix "MAR" (length 3): 17/18 + 3 * 0.1 * (1 - 17/18)
        expected = 17 / 18 + 0.3 * (1 - 17 / 18)
        assert jaro_winkler("MARTHA", "MARHTA") == pytest.approx(expected, abs=1e-12)
        assert jaro_winkler("MARTHA", "MARHTA") == pytest.approx(0.9611111, abs=1e-4)

    @pytest.mark.parametrize(
        "a,b,expected", [("abc", "abc", 1.0), ("abc", "xyz", 0.0)]
    )
    def test_examples(self, a, b, expected):
        assert jaro_winkler(a, b) == expected

    def test_prefix_cap_at_four(self):
        base = jaro("prefixaaa", "prefixbbb")
        assert jaro_winkler("prefixaaa", "prefixbbb") == base + 4 * 0.1 * (1 - base)

    @given(short_text, short_text)
    def test_bounded_and_at_least_jaro(self, a, b):
        jw = jaro_winkler(a, b)
        assert 0.0 <= jw <= 1.0
        assert jw >= jaro(a, b)


class TestJaccardTokens:
    @pytest.mark.parametrize(
        "a,b,expected",
        [
            ("tumor region", "tumor site", pytest.approx(2 / 3, abs=1e-12)),
            ("tumor region", "region tumor", 0.0),
            ("abc", "xyz", 1.0),
            ("", "", 0.0),
        ],
    )
    def test_examples(self, a, b, expected):
        assert jaccard_tokens(a, b) == expected


class TestEditSim:
    @pytest.mark.parametrize(
        "a,b,expected",
        [
            ("tumor region", "tumor region", 1.0),
            ("kitten", "sitting", pytest.approx(1 - 3 / 7, abs=1e-12)),
            ("abc", "", 0.0),
            ("", "", 1.0),
        ],
    )
    def test_examples(self, a, b, expected):
        assert edit_sim(a, b) == expected


@given(short_text, short_text)
def test_all_metrics_symmetric(a, b):
    assert levenshtein(a, b) == levenshtein(b, a)
    assert damerau_levenshtein(a, b) == damerau_levenshtein(b, a)
    assert jaro(a, b) == pytest.approx(jaro(b, a), abs=1e-12)
    assert jaro_winkler(a, b) == pytest.approx(jaro_winkler(b, a), abs=1e-12)
    assert jaccard_tokens(a, b) == jaccard_tokens(b, a)


@given(short_text)
def test_all_metrics_identity(a):
    assert levenshtein(a, a) == 0
    assert damerau_levenshtein(a, a) == 0
    assert jaro(a, a) == 1.0
    assert jaro_winkler(a, a) == 1.0
    assert jaccard_tokens(a, a) == 0.0
    assert edit_sim(a, a) == 1.0
