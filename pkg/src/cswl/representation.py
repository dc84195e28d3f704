"""Bag-of-features codebooks built with LARFDSSOM, and histogram encoding.

Also reads and writes the plain-text descriptor files that stand in for
image keypoint extraction.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .params import MapBlock
from .som import SomMap

DESCRIPTOR_DIM = 128
UNIT_TOL = 1e-6


class DescriptorFormatError(ValueError):
    pass


@dataclass
class ObjectDescriptors:
    name: str
    descriptors: np.ndarray  # (count, 128), rows unit-norm

    def __post_init__(self):
        self.descriptors = np.atleast_2d(np.asarray(self.descriptors, dtype=float))
        if len(self.descriptors) == 0:
            raise DescriptorFormatError(f"object {self.name!r} has no descriptors")


def load_descriptors(path: str | Path, dim: int = DESCRIPTOR_DIM) -> dict[str, ObjectDescriptors]:
    """Parse a descriptor file: ``# object: <name>`` headers, one row per line.

    Rows whose L2 norm is off unity by more than 1e-6 are renormalized.
    """
    objects: dict[str, list[np.ndarray]] = {}
    current: str | None = None
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            text = line.strip()
            if not text:
                continue
            if text.startswith("#"):
                body = text[1:].strip()
                if body.startswith("object:"):
                    current = body[len("object:"):].strip()
                    if not current:
                        raise DescriptorFormatError(f"line {lineno}: empty object name")
                    if current in objects:
                        raise DescriptorFormatError(f"line {lineno}: duplicate object {current!r}")
                    objects[current] = []
                continue
            if current is None:
                raise DescriptorFormatError(f"line {lineno}: descriptor before any object header")
            try:
                row = np.array([float(t) for t in text.split()])
            except ValueError:
                raise DescriptorFormatError(f"line {lineno}: non-numeric value") from None
            if row.shape[0] != dim:
                raise DescriptorFormatError(
                    f"line {lineno}: expected {dim} values, found {row.shape[0]}")
            if not np.all(np.isfinite(row)):
                raise DescriptorFormatError(f"line {lineno}: non-finite value")
            norm = np.linalg.norm(row)
            if norm == 0:
                raise DescriptorFormatError(f"line {lineno}: zero descriptor")
            if abs(norm - 1.0) > UNIT_TOL:
                row = row / norm
            objects[current].append(row)
    return {name: ObjectDescriptors(name, np.array(rows).reshape(len(rows), dim))
            for name, rows in objects.items()}


def write_descriptors(path: str | Path, objects: dict[str, ObjectDescriptors]) -> None:
    with open(path, "w") as fh:
        for name, obj in objects.items():
            fh.write(f"# object: {name}\n")
            for row in obj.descriptors:
                fh.write(" ".join(format(v, ".17g") for v in row) + "\n")


@dataclass
class FeatureHistogram:
    values: np.ndarray
    modality: str
    recognized: bool = True

    def __len__(self) -> int:
        return len(self.values)


class Codebook:
    """A frozen LARFDSSOM whose nodes are the histogram bins."""

    def __init__(self, som: SomMap, modality: str):
        self.map = som
        self.modality = modality
        self._ids = som.node_ids

    @property
    def size(self) -> int:
        return len(self._ids)

    @property
    def dim(self) -> int:
        return self.map.dim

    def first_winner(self, x) -> int | None:
        """Bin index of the best node at or above ``a_t``; None when unrecognized."""
        acts = self.map.activations(x)
        k = int(np.argmax(acts))
        return k if acts[k] >= self.map.params.a_t else None

    def counts(self, features) -> np.ndarray:
        counts = np.zeros(self.size)
        for x in features:
            k = self.first_winner(x)
            if k is not None:
                counts[k] += 1
        return counts


def build_codebook(features, block: MapBlock, seed: int = 0, modality: str = "visual",
                   passes: int = 2) -> Codebook:
    """Train a LARFDSSOM over ``features`` (``passes`` times, in order) and freeze it."""
    feats = np.asarray(features, dtype=float)
    if feats.ndim != 2 or len(feats) == 0:
        raise ValueError("build_codebook needs a non-empty 2-D feature array")
    params = block.to_params(n_stimuli=len(feats) * passes)
    som = SomMap(params, feats.shape[1], rng_seed=seed, init=feats[0])
    som.train(feats, passes=passes)
    return Codebook(som, modality)


def normalize_counts(counts: np.ndarray, modality: str, weighting: str = "count") -> FeatureHistogram:
    counts = np.asarray(counts, dtype=float)
    if weighting == "binary":
        counts = (counts > 0).astype(float)
    norm = np.linalg.norm(counts)
    if norm == 0:
        return FeatureHistogram(np.zeros_like(counts), modality, recognized=False)
    return FeatureHistogram(counts / norm, modality)


def encode_histogram(book: Codebook, features, weighting: str = "count") -> FeatureHistogram:
    if len(features) == 0:
        return normalize_counts(np.zeros(book.size), book.modality, weighting)
    feats = np.asarray(features, dtype=float)
    if feats.ndim != 2 or feats.shape[1] != book.dim:
        raise ValueError(f"dimension mismatch: codebook expects {book.dim}-d features")
    return normalize_counts(book.counts(feats), book.modality, weighting)
