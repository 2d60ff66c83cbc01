from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cskit.errors import ConllParseError, UnknownTagError
from cskit.ingest import RawCorpus, deduplicate, normalized_text, parse_conll
from cskit.model import LanguageTag, Split

from .conftest import utterance

EXAMPLE_BLOCK = (
    "estaba\tspa\n"
    "aquí\tspa\n"
    "three\teng\n"
    "feet\teng\n"
    "away\teng\n"
    ".\teng&spa\n"
)


class TestParseConll:
    def test_example_block_parses_with_alias_resolution(self):
        utterances = parse_conll(EXAMPLE_BLOCK, Split.TRAIN)
        assert len(utterances) == 1
        parsed = utterances[0]
        assert [t.surface for t in parsed.tokens] == [
            "estaba", "aquí", "three", "feet", "away", ".",
        ]
        assert [t.tag for t in parsed.tokens] == [
            LanguageTag.SPA,
            LanguageTag.SPA,
            LanguageTag.ENG,
            LanguageTag.ENG,
            LanguageTag.ENG,
            LanguageTag.MIXED,
        ]
        assert parsed.split is Split.TRAIN

    def test_empty_content_gives_empty_sequence(self):
        assert parse_conll("", Split.TRAIN) == []

    def test_missing_tag_is_a_parse_error_with_line_number(self):
        content = "hola\tspa\n\nhello\n"
        with pytest.raises(ConllParseError) as err:
            parse_conll(content, Split.TRAIN)
        assert err.value.line_number == 3

    def test_space_separator_is_rejected(self):
        with pytest.raises(ConllParseError):
            parse_conll("hola spa\n", Split.TRAIN)

    def test_unknown_tag_literal_carries_the_literal(self):
        with pytest.raises(UnknownTagError) as err:
            parse_conll("hola\txyz\n", Split.TRAIN)
        assert err.value.literal == "xyz"

    def test_ids_sequential_within_split(self):
        content = "a\teng\n\nb\teng\n\nc\teng\n"
        ids = [u.id for u in parse_conll(content, Split.DEV)]
        assert ids == ["dev-000001", "dev-000002", "dev-000003"]

    def test_token_count_equals_non_blank_line_count(self):
        content = EXAMPLE_BLOCK + "\n" + "hola\tspa\nworld\teng\n"
        utterances = parse_conll(content, Split.TRAIN)
        non_blank = sum(1 for line in content.splitlines() if line.strip())
        assert sum(len(u.tokens) for u in utterances) == non_blank


class TestDeduplicate:
    def test_cross_split_duplicate_survives_in_test(self):
        train = utterance("hola/spa amigo/spa my/eng friend/eng", Split.TRAIN, "t-1")
        test = utterance("hola/spa amigo/spa my/eng friend/eng", Split.TEST, "x-1")
        corpus = RawCorpus(splits={Split.TRAIN: (train,), Split.TEST: (test,)})
        result = deduplicate(corpus)
        assert result.splits[Split.TRAIN] == ()
        assert result.splits[Split.TEST] == (test,)

    def test_dev_outranks_train(self):
        train = utterance("vamos/spa ya/spa go/eng now/eng", Split.TRAIN, "t-1")
        dev = utterance("vamos/spa ya/spa go/eng now/eng", Split.DEV, "d-1")
        corpus = RawCorpus(splits={Split.TRAIN: (train,), Split.DEV: (dev,)})
        result = deduplicate(corpus)
        assert result.splits[Split.TRAIN] == ()
        assert result.splits[Split.DEV] == (dev,)

    def test_corpus_without_duplicates_is_unchanged(self):
        first = utterance("uno/spa dos/spa one/eng two/eng", Split.TRAIN, "t-1")
        second = utterance("tres/spa cuatro/spa three/eng four/eng", Split.TRAIN, "t-2")
        corpus = RawCorpus(splits={Split.TRAIN: (first, second)})
        assert deduplicate(corpus).splits == corpus.splits

    def test_triple_duplicate_keeps_first_occurrence(self):
        copies = tuple(
            utterance("si/spa claro/spa yes/eng sure/eng", Split.TRAIN, f"t-{i}")
            for i in range(3)
        )
        corpus = RawCorpus(splits={Split.TRAIN: copies})
        result = deduplicate(corpus)
        assert result.splits[Split.TRAIN] == (copies[0],)

    def test_key_ignores_case_and_tokenization_noise(self):
        plain = utterance("Hola/spa mundo/spa hello/eng world/eng ./eng", Split.TRAIN, "t-1")
        shouted = utterance("HOLA/spa MUNDO/spa HELLO/eng WORLD/eng ./eng", Split.TRAIN, "t-2")
        assert normalized_text(plain) == normalized_text(shouted)

    def test_idempotent(self):
        corpus = RawCorpus(
            splits={
                Split.TRAIN: (
                    utterance("a/spa b/spa c/eng d/eng", Split.TRAIN, "t-1"),
                    utterance("a/spa b/spa c/eng d/eng", Split.TRAIN, "t-2"),
                ),
                Split.TEST: (
                    utterance("a/spa b/spa c/eng d/eng", Split.TEST, "x-1"),
                ),
            }
        )
        once = deduplicate(corpus)
        twice = deduplicate(once)
        assert once.splits == twice.splits


words = st.lists(
    st.text(alphabet="abcdef", min_size=1, max_size=4), min_size=1, max_size=6
)


@given(st.lists(words, min_size=0, max_size=10))
def test_deduplicate_never_grows_any_split(feeds):
    utterances = tuple(
        utterance(
            " ".join(f"{w}/eng" for w in ws), Split.TRAIN, f"t-{i}"
        )
        for i, ws in enumerate(feeds)
    )
    corpus = RawCorpus(splits={Split.TRAIN: utterances})
    result = deduplicate(corpus)
    assert len(result.splits[Split.TRAIN]) <= len(utterances)
    # Idempotence on arbitrary inputs.
    assert deduplicate(result).splits == result.splits
