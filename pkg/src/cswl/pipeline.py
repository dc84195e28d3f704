"""The four-layer word-learning model: perception, representation, context, association.

Codebooks are learned once per dataset and shared (they stand for prior
knowledge); each simulated participant owns a context network and an
association map.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .art2 import Art2Network
from .params import ModelConfig
from .phonemes import PhonemeTable, PronouncingLexicon, encode_word_sequence
from .representation import (
    Codebook,
    FeatureHistogram,
    ObjectDescriptors,
    build_codebook,
    load_descriptors,
    normalize_counts,
)
from .som import SomMap

DESCRIPTOR_FILE = "descriptors.txt"
LEXICON_FILE = "lexicon.tsv"


class DatasetError(ValueError):
    pass


@dataclass
class Dataset:
    objects: dict[str, ObjectDescriptors]
    lexicon: PronouncingLexicon = field(default_factory=PronouncingLexicon.default)
    table: PhonemeTable = field(default_factory=PhonemeTable)

    @classmethod
    def load(cls, directory: str | Path) -> "Dataset":
        directory = Path(directory)
        desc = directory / DESCRIPTOR_FILE
        if not desc.exists():
            raise DatasetError(f"missing {desc}")
        lex_path = directory / LEXICON_FILE
        lexicon = PronouncingLexicon.load(lex_path) if lex_path.exists() else PronouncingLexicon.default()
        return cls(load_descriptors(desc), lexicon)

    @classmethod
    def synthetic(cls, names: list[str], seed: int = 0) -> "Dataset":
        from .synthetic import generate_objects

        return cls(generate_objects(names, seed=seed))

    def check(self, words=(), referents=()) -> None:
        for w in words:
            if w not in self.lexicon:
                raise DatasetError(f"word not in lexicon: {w!r}")
        for r in referents:
            if r not in self.objects:
                raise DatasetError(f"object not in dataset: {r!r}")


class MinMaxScaler:
    """Per-dimension affine map onto [0, 1], fitted once."""

    def __init__(self, data: np.ndarray):
        self.lo = data.min(axis=0)
        span = data.max(axis=0) - self.lo
        self.span = np.where(span > 0, span, 1.0)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return (np.asarray(x, dtype=float) - self.lo) / self.span


class Representations:
    """Frozen auditory and visual codebooks plus memoized histograms."""

    def __init__(self, dataset: Dataset, auditory: Codebook, visual: Codebook,
                 scaler: MinMaxScaler, weighting: str = "count"):
        self.dataset = dataset
        self.auditory_book = auditory
        self.visual_book = visual
        self.scaler = scaler
        self.weighting = weighting
        self._visual: dict[str, FeatureHistogram] = {}
        self._auditory: dict[tuple[str, ...], FeatureHistogram] = {}

    @property
    def visual_size(self) -> int:
        return self.visual_book.size

    @property
    def auditory_size(self) -> int:
        return self.auditory_book.size

    def visual(self, name: str) -> FeatureHistogram:
        if name not in self._visual:
            if name not in self.dataset.objects:
                raise DatasetError(f"object not in dataset: {name!r}")
            feats = self.scaler(self.dataset.objects[name].descriptors)
            self._visual[name] = normalize_counts(self.visual_book.counts(feats), "visual", self.weighting)
        return self._visual[name]

    def auditory(self, words) -> FeatureHistogram:
        key = tuple(w.lower() for w in words)
        if key not in self._auditory:
            try:
                feats = encode_word_sequence(self.dataset.lexicon, self.dataset.table, list(key))
            except KeyError as exc:
                raise DatasetError(str(exc)) from None
            counts = self.auditory_book.counts(np.array(feats)) if feats else np.zeros(self.auditory_size)
            self._auditory[key] = normalize_counts(counts, "auditory", self.weighting)
        return self._auditory[key]


def build_representations(dataset: Dataset, config: ModelConfig | None = None,
                          seed: int = 0) -> Representations:
    """Pre-train both codebooks on a seeded permutation of their feature sets."""
    config = config or ModelConfig()
    rng = np.random.default_rng(seed)
    phon = dataset.table.matrix()
    auditory = build_codebook(phon[rng.permutation(len(phon))], config.auditory, seed=seed,
                              modality="auditory", passes=config.codebook_passes)
    feats = np.vstack([o.descriptors for o in dataset.objects.values()])
    scaler = MinMaxScaler(feats)
    scaled = scaler(feats)
    visual = build_codebook(scaled[rng.permutation(len(scaled))], config.visual, seed=seed,
                            modality="visual", passes=config.codebook_passes)
    return Representations(dataset, auditory, visual, scaler, config.histogram_weighting)


@dataclass(frozen=True)
class Stimulus:
    words: tuple[str, ...]
    referents: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "words", tuple(self.words))
        object.__setattr__(self, "referents", tuple(self.referents))
        if not self.words or not self.referents:
            raise ValueError("a stimulus needs at least one word and one referent")


@dataclass
class AssociationInput:
    referent: str
    visual: FeatureHistogram
    auditory: FeatureHistogram
    context: np.ndarray

    def vector(self) -> np.ndarray:
        return np.concatenate([self.visual.values, self.auditory.values, self.context])


class ModelState:
    """One simulated participant."""

    def __init__(self, reps: Representations, config: ModelConfig | None = None, seed: int = 0):
        self.reps = reps
        self.config = config or ModelConfig()
        self.seed = seed
        ss = np.random.SeedSequence(seed)
        map_seed, rng_seed = (int(s.generate_state(1)[0]) for s in ss.spawn(2))
        self.rng = np.random.default_rng(rng_seed)
        n = reps.visual_size + reps.auditory_size
        self.context = Art2Network(self.config.context, n=n)
        self.association = SomMap(self.config.association.to_params(), dim=2 * n, rng_seed=map_seed)

    @property
    def input_dim(self) -> int:
        return self.association.dim

    # -- context --------------------------------------------------------
    def _advance(self, visual: np.ndarray, auditory: FeatureHistogram, learn: bool) -> None:
        self.context.advance(np.concatenate([visual, auditory.values]), learn=learn)

    def _inputs(self, referents, auditory: FeatureHistogram, learn: bool) -> list[AssociationInput]:
        """Pair ``auditory`` with each referent, advancing the context as configured."""
        visuals = [self.reps.visual(r) for r in referents]
        out = []
        if self.config.context_granularity == "trial":
            mean = np.mean([v.values for v in visuals], axis=0)
            self._advance(mean, auditory, learn)
            ctx = self.context.context_vector()
            out = [AssociationInput(r, v, auditory, ctx) for r, v in zip(referents, visuals)]
        else:
            for r, v in zip(referents, visuals):
                self._advance(v.values, auditory, learn)
                out.append(AssociationInput(r, v, auditory, self.context.context_vector()))
        return out

    def build_trial_inputs(self, stim: Stimulus, learn: bool = True) -> list[AssociationInput]:
        return self._inputs(list(stim.referents), self.reps.auditory(stim.words), learn)

    # -- association ----------------------------------------------------
    def train_trial(self, stim: Stimulus, record: bool = False):
        """Feed one trial to the association map in a shuffled order.

        Returns the number of inserted nodes, or ``(inserted, scores)`` when
        ``record`` is set, where ``scores`` maps each referent to its winner
        activation measured before any of this trial's updates.
        """
        order = [stim.referents[k] for k in self.rng.permutation(len(stim.referents))]
        inputs = self._inputs(order, self.reps.auditory(stim.words), learn=True)
        vectors = [inp.vector() for inp in inputs]
        scores = {inp.referent: self.association.max_activation(v) for inp, v in zip(inputs, vectors)}
        created = sum(self.association.organize_step(v).inserted for v in vectors)
        return (created, scores) if record else created

    def score_pairing(self, word: str, referent: str) -> float:
        """Winner activation for ``(word, referent)`` under the current context; no learning."""
        inp = AssociationInput(referent, self.reps.visual(referent), self.reps.auditory([word]),
                               self.context.context_vector())
        return self.association.max_activation(inp.vector())

    def rank_candidates(self, word: str, referents, advance: bool = True) -> list[str]:
        """Present every ``(word, referent)`` pair in random order and rank by activation.

        With ``advance`` the context network sees the test trial first (as a
        recognition, not a learning, event).
        """
        referents = list(referents)
        if not referents:
            raise ValueError("rank_candidates needs at least one referent")
        order = [referents[k] for k in self.rng.permutation(len(referents))]
        auditory = self.reps.auditory([word])
        if advance:
            inputs = self._inputs(order, auditory, learn=False)
        else:
            ctx = self.context.context_vector()
            inputs = [AssociationInput(r, self.reps.visual(r), auditory, ctx) for r in order]
        scores = np.array([self.association.max_activation(inp.vector()) for inp in inputs])
        tiebreak = self.rng.random(len(order))
        ranked = np.lexsort((tiebreak, -scores))
        return [order[k] for k in ranked]

    def induce(self, stim: Stimulus) -> None:
        """Let a trial shape the context without touching the association map."""
        self.build_trial_inputs(stim, learn=False)


def default_object_names(designs) -> list[str]:
    """Every referent named by ``designs``, in first-mention order."""
    return list(dict.fromkeys(r for d in designs for r in d.all_referents))
