"""Synthetic keypoint descriptors for desk-scale runs.

Descriptors imitate SIFT statistics loosely: non-negative, sparse-ish,
clipped at 0.2 and L2-normalized. Every object draws its keypoints from a
small mixture over a shared vocabulary of part prototypes, plus a fraction
from a pool of generic background parts that all objects share (edges and
textures common to any photograph).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .representation import DESCRIPTOR_DIM, ObjectDescriptors


@dataclass
class SyntheticSpec:
    n_parts: int = 37
    parts_per_object: int = 5
    descriptors_per_object: int = 40
    active_dims: int = 24
    noise: float = 0.04
    background_parts: int = 0
    background_fraction: float = 0.0
    dim: int = DESCRIPTOR_DIM


def _sift_normalize(v: np.ndarray) -> np.ndarray:
    v = np.maximum(v, 0.0)
    v = v / np.linalg.norm(v, axis=-1, keepdims=True)
    v = np.minimum(v, 0.2)
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def part_vocabulary(spec: SyntheticSpec, rng: np.random.Generator) -> np.ndarray:
    parts = np.zeros((spec.n_parts, spec.dim))
    for k in range(spec.n_parts):
        dims = rng.choice(spec.dim, size=spec.active_dims, replace=False)
        parts[k, dims] = rng.gamma(2.0, 1.0, size=spec.active_dims)
    return _sift_normalize(parts)


def generate_objects(names: list[str], seed: int = 0,
                     spec: SyntheticSpec | None = None) -> dict[str, ObjectDescriptors]:
    spec = spec or SyntheticSpec()
    rng = np.random.default_rng(seed)
    parts = part_vocabulary(spec, rng)
    n_own = spec.n_parts - spec.background_parts
    background = np.arange(n_own, spec.n_parts)
    out = {}
    for name in names:
        chosen = rng.choice(n_own, size=spec.parts_per_object, replace=False)
        weights = rng.dirichlet(np.ones(spec.parts_per_object))
        picks = rng.choice(chosen, size=spec.descriptors_per_object, p=weights)
        if spec.background_parts:
            generic = rng.random(spec.descriptors_per_object) < spec.background_fraction
            picks[generic] = rng.choice(background, size=int(generic.sum()))
        raw = parts[picks] + rng.normal(0.0, spec.noise, size=(len(picks), spec.dim)) * (parts[picks] > 0)
        out[name] = ObjectDescriptors(name, _sift_normalize(raw))
    return out


# "background" gives objects a large shared share of generic parts, so visual
# histograms overlap the way photographs of household objects do
PRESETS = {
    "default": SyntheticSpec(),
    "background": SyntheticSpec(parts_per_object=6, descriptors_per_object=120,
                                background_parts=10, background_fraction=0.7),
}
