"""Run configurations for point-cloud optimization, read from JSON."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .autodiff import (
    DistanceToMeasure,
    GaussianMixture,
    Integration,
    LandscapeTarget,
    LossSpec,
    NormPower,
    PipelineSpec,
)
from .errors import ConfigError, MpgradError
from .measures import BARS, RN, SignedMeasure
from .optimizer import make_schedule

MAX_SEED = 2**64 - 1


@dataclass
class PointsConfig:
    """Either a CSV file or ``count`` uniform samples from ``[low, high]^dim``."""

    file: str | None = None
    count: int = 30
    dim: int = 2
    low: float = 0.0
    high: float = 1.0


@dataclass
class ScheduleConfig:
    kind: str = "harmonic"
    a0: float = 0.6
    exponent: float = 0.75


@dataclass
class RunConfig:
    points: PointsConfig = field(default_factory=PointsConfig)
    pipeline: dict = field(default_factory=lambda: {"kind": "function_rips"})
    loss: dict = field(default_factory=lambda: {"loss": "distance", "descriptor": "hilbert", "degree": 1, "sign": -1})
    schedule: ScheduleConfig = field(default_factory=ScheduleConfig)
    epochs: int = 100
    seed: int = 7
    noise: float = 0.0
    box: list | None = None
    base_dir: str = "."

    def validate(self) -> "RunConfig":
        if not isinstance(self.epochs, int) or self.epochs < 1:
            raise ConfigError(f"epochs must be a positive integer, got {self.epochs!r}")
        check_seed(self.seed)
        if self.noise < 0:
            raise ConfigError("noise scale must be nonnegative")
        if self.box is not None and (len(self.box) != 2 or not self.box[0] < self.box[1]):
            raise ConfigError("box must be [low, high] with low < high")
        if self.points.file is None and self.points.count < 1:
            raise ConfigError("need at least one point")
        if self.points.file is not None and not self.resolve(self.points.file).exists():
            raise ConfigError(f"point file {self.points.file} does not exist")
        self.pipeline_spec()
        self.loss_spec()
        self.make_schedule()
        return self

    def resolve(self, path) -> Path:
        p = Path(path)
        return p if p.is_absolute() else Path(self.base_dir) / p

    def initial_points(self) -> np.ndarray:
        from .io import read_points
        if self.points.file is not None:
            return read_points(self.resolve(self.points.file))
        rng = np.random.default_rng(self.seed)
        return rng.uniform(self.points.low, self.points.high, size=(self.points.count, self.points.dim))

    def pipeline_spec(self) -> PipelineSpec:
        p = dict(self.pipeline)
        radius = p.pop("max_radius", None)
        try:
            return PipelineSpec(max_radius=math.inf if radius is None else float(radius), **p)
        except (TypeError, MpgradError) as e:
            raise ConfigError(f"bad pipeline section: {e}") from None

    def parameters(self) -> int:
        return 1 if self.pipeline_spec().kind == "rips" else 2

    def loss_spec(self) -> LossSpec:
        return loss_from_dict(self.loss, self.parameters(), self.base_dir)

    def make_schedule(self):
        s = self.schedule
        return make_schedule(s.kind, s.a0, s.exponent)

    def to_dict(self) -> dict:
        out = asdict(self)
        out.pop("base_dir")
        return out


def check_seed(seed) -> int:
    if not isinstance(seed, int) or isinstance(seed, bool) or not 0 <= seed <= MAX_SEED:
        raise ConfigError(f"seed must be an unsigned 64-bit integer, got {seed!r}")
    return seed


def loss_from_dict(d: dict, n: int, base_dir=".") -> LossSpec:
    """LossSpec from its JSON form.

    Keys: ``loss`` (``distance``, ``integration`` or ``landscape``),
    ``descriptor``, ``degree``, ``sign``, and per loss ``target_file``;
    ``integrand`` (``{"kind": "norm_power", "p": 2}`` or ``{"kind":
    "gaussian", "centers", "factors", "weights"}``); ``points``, ``k``,
    ``target``.
    """
    from .io import read_measure
    d = dict(d)
    kind = d.pop("loss", "distance")
    descriptor = d.pop("descriptor", "landscape" if kind == "landscape" else "hilbert")
    degree = int(d.pop("degree", 0))
    sign = int(d.pop("sign", 1))
    try:
        if kind == "distance":
            ground = RN if descriptor == "hilbert" else BARS
            tf = d.pop("target_file", None)
            if tf is None:
                target = SignedMeasure.zero(n, ground)
            else:
                p = Path(tf) if Path(tf).is_absolute() else Path(base_dir) / tf
                if not p.exists():
                    raise ConfigError(f"target file {tf} does not exist")
                target = read_measure(p, ground)
            loss = DistanceToMeasure(target)
        elif kind == "integration":
            ig = dict(d.pop("integrand", {"kind": "norm_power", "p": 2}))
            ik = ig.pop("kind", "norm_power")
            if ik == "norm_power":
                psi = NormPower(float(ig.pop("p", 2)))
            elif ik == "gaussian":
                psi = GaussianMixture(ig.pop("centers"), ig.pop("factors"), ig.pop("weights"))
            else:
                raise ConfigError(f"unknown integrand {ik!r}")
            if ig:
                raise ConfigError(f"unknown integrand keys {sorted(ig)}")
            loss = Integration(psi)
        elif kind == "landscape":
            loss = LandscapeTarget(d.pop("points"), int(d.pop("k", 1)), d.pop("target", None))
        else:
            raise ConfigError(f"unknown loss {kind!r}; use distance, integration or landscape")
        if d:
            raise ConfigError(f"unknown loss keys {sorted(d)}")
        return LossSpec(loss, descriptor, degree, sign)
    except KeyError as e:
        raise ConfigError(f"loss section is missing {e}") from None
    except ConfigError:
        raise
    except MpgradError as e:
        raise ConfigError(f"bad loss section: {e}") from None


def parse_json_arg(text: str):
    """A JSON literal, or the path of a JSON file."""
    p = Path(text)
    if p.exists():
        return json.loads(p.read_text()), p.parent
    try:
        return json.loads(text), Path(".")
    except json.JSONDecodeError as e:
        raise ConfigError(f"not a JSON value or existing file: {text!r} ({e})") from None


def load_config(path) -> RunConfig:
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file {path} does not exist")
    try:
        raw = json.loads(p.read_text())
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: invalid JSON ({e})") from None
    return config_from_dict(raw, p.parent)


def config_from_dict(raw: dict, base_dir=".") -> RunConfig:
    raw = dict(raw)
    try:
        cfg = RunConfig(
            points=PointsConfig(**raw.pop("points", {})),
            pipeline=raw.pop("pipeline", {"kind": "function_rips"}),
            loss=raw.pop("loss", RunConfig().loss),
            schedule=ScheduleConfig(**raw.pop("schedule", {})),
            base_dir=str(base_dir),
            **raw,
        )
    except TypeError as e:
        raise ConfigError(f"unknown or malformed config field: {e}") from None
    return cfg.validate()
