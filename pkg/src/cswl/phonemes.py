"""Words to ARPAbet symbols, and ARPAbet symbols to 12-component feature vectors.

Components 1-4 describe vowels and 5-12 describe consonants; each phoneme
fills only its own block. ``#`` is the silent symbol and encodes to zeros.
"""

from __future__ import annotations

import re
from importlib import resources
from pathlib import Path

import numpy as np

SILENT = "#"
N_FEATURES = 12

# fmt: off
_ROWS = {
    "AA": (1, 0.5, 1, -1,      0, 0, 0, 0, 0, 0, 0, 0),
    "AE": (1, -0.5, -1, -1,    0, 0, 0, 0, 0, 0, 0, 0),
    "AH": (0.67, 0, -1, -1,    0, 0, 0, 0, 0, 0, 0, 0),
    "AO": (0.33, 1, 1, 1,      0, 0, 0, 0, 0, 0, 0, 0),
    "AW": (0, 0.5, 0, 0,       0, 0, 0, 0, 0, 0, 0, 0),
    "AY": (0, 0, -0.5, 0,      0, 0, 0, 0, 0, 0, 0, 0),
    "EH": (0.33, -0.5, -1, -1, 0, 0, 0, 0, 0, 0, 0, 0),
    "ER": (0.33, 0, 1, 0,      0, 0, 0, 0, 0, 0, 0, 0),
    "IH": (-0.67, -0.5, -1, -1, 0, 0, 0, 0, 0, 0, 0, 0),
    "IY": (-1, -1, 1, -1,      0, 0, 0, 0, 0, 0, 0, 0),
    "OY": (0, 0, 0, 0,         0, 0, 0, 0, 0, 0, 0, 0),
    "OW": (-0.33, 1, 1, 1,     0, 0, 0, 0, 0, 0, 0, 0),
    "EY": (-0.33, -1, 1, 0,    0, 0, 0, 0, 0, 0, 0, 0),
    "UH": (-0.67, 0.5, -1, 0,  0, 0, 0, 0, 0, 0, 0, 0),
    "UW": (-1, 1, 1, 1,        0, 0, 0, 0, 0, 0, 0, 0),
    "B":  (0, 0, 0, 0, 1, -1, 1, -1, 1, -1, -1, -1),
    "CH": (0, 0, 0, 0, 0.27, -1, -1, 0, -1, -1, -1, -1),
    "D":  (0, 0, 0, 0, 0.45, -1, 1, -1, 1, -1, -1, -1),
    "DH": (0, 0, 0, 0, 0.64, -1, -1, 1, 1, -1, -1, -1),
    "F":  (0, 0, 0, 0, 0.82, -1, -1, 1, -1, -1, -1, -1),
    "G":  (0, 0, 0, 0, -0.27, -1, 1, -1, 1, -1, -1, -1),
    "HH": (0, 0, 0, 0, -1, -1, -1, 1, 0, -1, -1, -1),
    "JH": (0, 0, 0, 0, 0.45, -1, -1, 0, 1, -1, -1, -1),
    "K":  (0, 0, 0, 0, -0.27, -1, 1, -1, -1, -1, -1, -1),
    "L":  (0, 0, 0, 0, 0.45, -1, -1, -1, 1, -1, -1, 1),
    "M":  (0, 0, 0, 0, 1, 1, -1, -1, 1, -1, -1, -1),
    "N":  (0, 0, 0, 0, 0.45, 1, -1, -1, 1, -1, -1, -1),
    "NG": (0, 0, 0, 0, -0.27, 1, -1, -1, 1, -1, -1, -1),
    "P":  (0, 0, 0, 0, 1, -1, 1, -1, -1, -1, -1, -1),
    "R":  (0, 0, 0, 0, 0.27, -1, -1, -1, 1, -1, 1, -1),
    "S":  (0, 0, 0, 0, 0.45, -1, -1, 1, -1, -1, -1, -1),
    "SH": (0, 0, 0, 0, 0.27, -1, -1, 1, -1, -1, -1, -1),
    "T":  (0, 0, 0, 0, 0.45, -1, 1, -1, -1, -1, -1, -1),
    "TH": (0, 0, 0, 0, 0.64, -1, -1, 1, -1, -1, -1, -1),
    "V":  (0, 0, 0, 0, 0.82, -1, -1, 1, 1, -1, -1, -1),
    "W":  (0, 0, 0, 0, 1, -1, -1, -1, 1, 1, -1, -1),
    "Y":  (0, 0, 0, 0, -0.09, -1, -1, -1, 1, 1, -1, -1),
    "Z":  (0, 0, 0, 0, 0.45, -1, -1, 1, 1, -1, -1, -1),
    "ZH": (0, 0, 0, 0, 0.27, -1, -1, 1, 1, -1, -1, -1),
    SILENT: (0,) * 12,
}
# fmt: on

VOWELS = ("AA", "AE", "AH", "AO", "AW", "AY", "EH", "ER", "IH", "IY", "OY", "OW", "EY", "UH", "UW")


class UnknownWordError(KeyError):
    pass


class UnknownSymbolError(KeyError):
    pass


class PhonemeTable:
    """Immutable ARPAbet symbol to feature-vector mapping."""

    def __init__(self, rows: dict[str, tuple[float, ...]] | None = None):
        rows = _ROWS if rows is None else rows
        self._rows = {k: np.array(v, dtype=float) for k, v in rows.items()}
        for v in self._rows.values():
            v.setflags(write=False)

    def __contains__(self, symbol: str) -> bool:
        return symbol in self._rows

    def __len__(self) -> int:
        return len(self._rows)

    @property
    def symbols(self) -> list[str]:
        return list(self._rows)

    def vector(self, symbol: str) -> np.ndarray:
        try:
            return self._rows[symbol]
        except KeyError:
            raise UnknownSymbolError(f"unknown ARPAbet symbol: {symbol!r}") from None

    def matrix(self) -> np.ndarray:
        return np.vstack([self._rows[s] for s in self._rows])


def phoneme_to_vector(table: PhonemeTable, symbol: str) -> np.ndarray:
    return table.vector(symbol)


_STRESS = re.compile(r"\d")


class PronouncingLexicon:
    """Lowercase word to ARPAbet sequence, stress markers stripped.

    The text format is one ``word<TAB>SYM SYM ...`` entry per line with ``;``
    comment lines. CMUdict-style variants (``word(2)``) are skipped so that the
    first pronunciation wins.
    """

    def __init__(self, entries: dict[str, list[str]], table: PhonemeTable | None = None):
        table = table or PhonemeTable()
        self._entries: dict[str, tuple[str, ...]] = {}
        for word, syms in entries.items():
            syms = tuple(_STRESS.sub("", s) for s in syms)
            for s in syms:
                if s not in table:
                    raise UnknownSymbolError(f"{word!r} uses unknown symbol {s!r}")
            self._entries[word.lower()] = syms

    @classmethod
    def parse(cls, text: str, table: PhonemeTable | None = None) -> "PronouncingLexicon":
        entries: dict[str, list[str]] = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            if not line.strip() or line.startswith(";"):
                continue
            if "\t" in line:
                word, _, rest = line.partition("\t")
            else:
                word, _, rest = line.strip().partition(" ")
            word = word.strip().lower()
            syms = rest.split()
            if not word or not syms:
                raise ValueError(f"line {lineno}: malformed lexicon entry")
            if word.endswith(")") or word in entries:
                continue
            entries[word] = syms
        return cls(entries, table)

    @classmethod
    def load(cls, path: str | Path, table: PhonemeTable | None = None) -> "PronouncingLexicon":
        return cls.parse(Path(path).read_text(), table)

    @classmethod
    def default(cls) -> "PronouncingLexicon":
        text = resources.files("cswl").joinpath("data/lexicon.tsv").read_text()
        return cls.parse(text)

    def __contains__(self, word: str) -> bool:
        return word.lower() in self._entries

    @property
    def words(self) -> list[str]:
        return list(self._entries)

    def phonemes(self, word: str) -> list[str]:
        if not word:
            raise UnknownWordError("empty word")
        try:
            return list(self._entries[word.lower()])
        except KeyError:
            raise UnknownWordError(f"word not in lexicon: {word!r}") from None


def word_to_phonemes(lexicon: PronouncingLexicon, word: str) -> list[str]:
    return lexicon.phonemes(word)


def encode_word_sequence(lexicon: PronouncingLexicon, table: PhonemeTable,
                         words: list[str]) -> list[np.ndarray]:
    """Phoneme vectors of ``words`` in order, one silent vector between words."""
    out: list[np.ndarray] = []
    for k, word in enumerate(words):
        if k:
            out.append(table.vector(SILENT))
        out.extend(table.vector(s) for s in lexicon.phonemes(word))
    return out
