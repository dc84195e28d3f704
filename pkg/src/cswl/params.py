"""Parameter blocks for every learning module, with the tuned default values.

Values can be overridden from a flat ``key=value`` text file whose keys are
``<block>.<name>``, for example ``association.a_t = 0.999``.
"""

from __future__ import annotations

import dataclasses
import hashlib
import math
from dataclasses import dataclass, field
from pathlib import Path


class ParamsError(ValueError):
    """Raised for malformed or unknown parameter entries."""


@dataclass(frozen=True)
class MapParams:
    """Runtime parameters of one LARFDSSOM instance."""

    a_t: float
    lp: float
    beta: float
    maxcomp: int
    e_b: float
    e_n: float
    s: float
    conn_thr: float
    n_max: int | None = None
    epsilon: float = 1e-9

    def __post_init__(self):
        if not 0.0 < self.a_t < 1.0:
            raise ParamsError(f"a_t must lie in (0,1), got {self.a_t}")
        for name in ("lp", "beta", "e_b", "e_n", "conn_thr"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ParamsError(f"{name} must lie in [0,1], got {v}")
        if self.maxcomp < 1:
            raise ParamsError(f"maxcomp must be >= 1, got {self.maxcomp}")
        if self.s <= 0:
            raise ParamsError(f"s must be positive, got {self.s}")
        if self.epsilon <= 0:
            raise ParamsError("epsilon must be positive")
        if self.n_max is not None and self.n_max < 1:
            raise ParamsError("n_max must be >= 1 when given")


@dataclass
class MapBlock:
    """A LARFDSSOM parameter block as tabulated.

    ``maxcomp`` is either an absolute count or, when ``maxcomp_per_stimulus``
    is set, a multiplier of the training stream length. ``e_n_factor``
    multiplies ``e_b``.
    """

    a_t: float
    lp: float
    beta: float
    maxcomp: float
    e_b: float
    e_n_factor: float
    s: float
    conn_thr: float
    maxcomp_per_stimulus: bool = False

    def to_params(self, n_stimuli: int | None = None, n_max: int | None = None) -> MapParams:
        if self.maxcomp_per_stimulus:
            if n_stimuli is None:
                raise ParamsError("maxcomp is relative to the stream length; n_stimuli required")
            maxcomp = max(1, int(math.floor(self.maxcomp * n_stimuli)))
        else:
            maxcomp = max(1, int(self.maxcomp))
        return MapParams(
            a_t=self.a_t,
            lp=self.lp,
            beta=self.beta,
            maxcomp=maxcomp,
            e_b=self.e_b,
            e_n=self.e_n_factor * self.e_b,
            s=self.s,
            conn_thr=self.conn_thr,
            n_max=n_max,
        )


@dataclass(frozen=True)
class Art2Params:
    """ART2-with-Context parameters (``n`` is set from the input width)."""

    n: int = 0
    a: float = 10.0
    b: float = 10.0
    c: float = 0.10
    d: float = 0.9
    e: float = 0.0001
    theta: float = 0.0739221
    alpha: float = 0.8
    rho: float = 0.999
    epochs: int = 1
    n_iter: int = 1
    back: float = 0.90
    cw: float = 0.0002
    d_ctx: float = 0.9
    alpha_ctx: float = 0.80
    # recognition-time vigilance relaxation
    rho_step: float = 0.005
    rho_floor: float = 0.7

    def __post_init__(self):
        for name in ("c", "d", "back", "cw", "d_ctx", "alpha", "alpha_ctx"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ParamsError(f"{name} must lie in [0,1], got {v}")
        if self.e <= 0:
            raise ParamsError("e must be positive")
        if self.epochs < 1 or self.n_iter < 1:
            raise ParamsError("epochs and n_iter must be >= 1")
        if not 0.0 < self.rho <= 1.0:
            raise ParamsError(f"rho must lie in (0,1], got {self.rho}")


def visual_block() -> MapBlock:
    return MapBlock(a_t=0.985, lp=0.0015, beta=0.10, maxcomp=0.021, e_b=5e-4,
                    e_n_factor=12e-6, s=0.007581760, conn_thr=0.50,
                    maxcomp_per_stimulus=True)


def auditory_block() -> MapBlock:
    return MapBlock(a_t=0.935, lp=0.00001, beta=0.10, maxcomp=2.0, e_b=0.10,
                    e_n_factor=14e-6, s=0.00394, conn_thr=0.50,
                    maxcomp_per_stimulus=True)


def association_block() -> MapBlock:
    return MapBlock(a_t=0.999, lp=0.175211, beta=0.870879, maxcomp=10000,
                    e_b=0.465091, e_n_factor=0.0134102, s=1.31357,
                    conn_thr=0.986745)


CONTEXT_GRANULARITIES = ("trial", "pair")
HISTOGRAM_WEIGHTINGS = ("count", "binary")


@dataclass
class ModelConfig:
    """Everything needed to build one simulated participant."""

    visual: MapBlock = field(default_factory=visual_block)
    auditory: MapBlock = field(default_factory=auditory_block)
    context: Art2Params = field(default_factory=Art2Params)
    association: MapBlock = field(default_factory=association_block)
    context_granularity: str = "trial"
    histogram_weighting: str = "count"
    codebook_passes: int = 2

    def __post_init__(self):
        if self.context_granularity not in CONTEXT_GRANULARITIES:
            raise ParamsError(f"context_granularity must be one of {CONTEXT_GRANULARITIES}")
        if self.histogram_weighting not in HISTOGRAM_WEIGHTINGS:
            raise ParamsError(f"histogram_weighting must be one of {HISTOGRAM_WEIGHTINGS}")
        if self.codebook_passes < 1:
            raise ParamsError("codebook_passes must be >= 1")

    def as_flat(self) -> dict[str, object]:
        flat: dict[str, object] = {}
        for block in ("visual", "auditory", "association"):
            for k, v in dataclasses.asdict(getattr(self, block)).items():
                flat[f"{block}.{k}"] = v
        for k, v in dataclasses.asdict(self.context).items():
            if k != "n":
                flat[f"context.{k}"] = v
        flat["pipeline.context_granularity"] = self.context_granularity
        flat["representation.histogram_weighting"] = self.histogram_weighting
        flat["representation.codebook_passes"] = self.codebook_passes
        return flat

    def digest(self) -> str:
        text = "\n".join(f"{k}={_fmt(v)}" for k, v in sorted(self.as_flat().items()))
        return hashlib.sha256(text.encode()).hexdigest()[:16]


def _fmt(v: object) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _coerce(raw: str, current: object, key: str) -> object:
    try:
        if isinstance(current, bool):
            low = raw.lower()
            if low not in ("true", "false", "1", "0"):
                raise ValueError(raw)
            return low in ("true", "1")
        if isinstance(current, int):
            return int(raw)
        if isinstance(current, float):
            return float(raw)
    except ValueError:
        raise ParamsError(f"bad value for {key}: {raw!r}") from None
    return raw


def apply_overrides(config: ModelConfig, entries: dict[str, str]) -> ModelConfig:
    """Return a copy of ``config`` with ``entries`` applied; unknown keys raise."""
    blocks = {
        "visual": dataclasses.asdict(config.visual),
        "auditory": dataclasses.asdict(config.auditory),
        "association": dataclasses.asdict(config.association),
        "context": dataclasses.asdict(config.context),
    }
    top = {
        "pipeline.context_granularity": config.context_granularity,
        "representation.histogram_weighting": config.histogram_weighting,
        "representation.codebook_passes": config.codebook_passes,
    }
    for key, raw in entries.items():
        if key in top:
            top[key] = _coerce(raw, top[key], key)
            continue
        block, _, name = key.partition(".")
        if block not in blocks or name not in blocks[block] or (block == "context" and name == "n"):
            raise ParamsError(f"unknown parameter: {key}")
        blocks[block][name] = _coerce(raw, blocks[block][name], key)
    return ModelConfig(
        visual=MapBlock(**blocks["visual"]),
        auditory=MapBlock(**blocks["auditory"]),
        association=MapBlock(**blocks["association"]),
        context=Art2Params(**blocks["context"]),
        context_granularity=top["pipeline.context_granularity"],
        histogram_weighting=top["representation.histogram_weighting"],
        codebook_passes=top["representation.codebook_passes"],
    )


def parse_params_text(text: str) -> dict[str, str]:
    entries: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ParamsError(f"line {lineno}: expected key=value")
        key, _, value = line.partition("=")
        entries[key.strip()] = value.strip()
    return entries


def load_config(path: str | Path | None) -> ModelConfig:
    config = ModelConfig()
    if path is None:
        return config
    return apply_overrides(config, parse_params_text(Path(path).read_text()))
