import hashlib

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cswl.phonemes import (
    N_FEATURES,
    SILENT,
    VOWELS,
    PhonemeTable,
    PronouncingLexicon,
    UnknownSymbolError,
    UnknownWordError,
    encode_word_sequence,
    phoneme_to_vector,
    word_to_phonemes,
)

# sha256 of "SYM\tv1 ... v12\n" lines (repr floats) in table order, frozen
# from an independent transcription of the published table
TABLE_DIGEST = "2feed8874fcb7ca319031e46f84be91875bb8f9a527e443d859dd8a8ca2db65e"

TABLE = PhonemeTable()
LEXICON = PronouncingLexicon.default()
WORDS = st.lists(st.sampled_from(sorted(LEXICON.words)), max_size=6)


def canonical(table):
    return "".join(s + "\t" + " ".join(repr(float(v)) for v in table.vector(s)) + "\n"
                   for s in table.symbols)


def test_table_byte_exact():
    assert len(TABLE) == 40
    assert hashlib.sha256(canonical(TABLE).encode()).hexdigest() == TABLE_DIGEST


def test_table_rows():
    np.testing.assert_array_equal(phoneme_to_vector(TABLE, "AA"), [1, 0.5, 1, -1] + [0] * 8)
    np.testing.assert_array_equal(phoneme_to_vector(TABLE, SILENT), np.zeros(12))
    np.testing.assert_array_equal(phoneme_to_vector(TABLE, "B"), [0] * 4 + [1, -1, 1, -1, 1, -1, -1, -1])


def test_block_structure():
    for s in TABLE.symbols:
        v = TABLE.vector(s)
        assert v.shape == (N_FEATURES,)
        assert np.all(np.abs(v) <= 1)
        if s in VOWELS:
            assert not v[4:].any()
        else:
            assert not v[:4].any()


def test_unknown_symbol():
    with pytest.raises(UnknownSymbolError):
        phoneme_to_vector(TABLE, "QQ")


def test_ball_example():
    assert word_to_phonemes(LEXICON, "ball") == ["B", "AO", "L"]
    m = np.vstack(encode_word_sequence(LEXICON, TABLE, ["ball"]))
    assert m.shape == (3, 12)
    np.testing.assert_array_equal(m[0], [0, 0, 0, 0, 1, -1, 1, -1, 1, -1, -1, -1])
    np.testing.assert_array_equal(m[2], [0, 0, 0, 0, 0.45, -1, -1, -1, 1, -1, -1, 1])
    # the printed example shows the AA row in the middle; the table row for AO is used
    np.testing.assert_array_equal(m[1], TABLE.vector("AO"))


def test_lookup_examples():
    assert word_to_phonemes(LEXICON, "bed") == ["B", "EH", "D"]
    assert word_to_phonemes(LEXICON, "BED") == ["B", "EH", "D"]
    with pytest.raises(UnknownWordError):
        word_to_phonemes(LEXICON, "")
    with pytest.raises(UnknownWordError, match="zyzzyva"):
        word_to_phonemes(LEXICON, "zyzzyva")


def test_sequence_separator():
    assert encode_word_sequence(LEXICON, TABLE, []) == []
    seq = encode_word_sequence(LEXICON, TABLE, ["bed", "fork"])
    expect = ["B", "EH", "D", SILENT, "F", "AO", "R", "K"]
    assert len(seq) == len(expect)
    for v, s in zip(seq, expect):
        np.testing.assert_array_equal(v, TABLE.vector(s))


@given(WORDS)
def test_sequence_length_and_range(words):
    seq = encode_word_sequence(LEXICON, TABLE, words)
    assert len(seq) == sum(len(LEXICON.phonemes(w)) for w in words) + max(len(words) - 1, 0)
    assert all(np.all(np.abs(v) <= 1) for v in seq)


def test_lexicon_parse_rules():
    lex = PronouncingLexicon.parse(";; comment\nCAT\tK AE1 T\ncat(2)\tK AA T\ndog  D AO1 G\n")
    assert lex.phonemes("cat") == ["K", "AE", "T"]
    assert lex.phonemes("dog") == ["D", "AO", "G"]
    with pytest.raises(UnknownSymbolError):
        PronouncingLexicon.parse("bad\tXX\n")
    with pytest.raises(ValueError):
        PronouncingLexicon.parse("lonely\n")


def test_shipped_lexicon_covers_designs():
    from cswl.experiments import load_designs

    for d in load_designs().values():
        for w in d.all_words:
            assert w in LEXICON
