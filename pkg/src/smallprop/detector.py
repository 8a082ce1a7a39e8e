"""Simulated proposal generator with a pyramid-derived detectable size band.

A profile models a detector that rescales its input region to a fixed
resolution and localizes objects with fixed 10x10-cell windows on a set of
pyramid levels. An object whose rescaled bounding-box side fills between
fill_min and fill_max of some window is detectable; the detectable band over
all levels is [fill_min*cells*min(levels), fill_max*cells*max(levels)].
Emitted masks are the ground-truth masks, optionally translated by a seeded
per-object jitter, so localization quality is controllable and exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .annotations import GroundTruthObject
from .masks import BinaryMask, shift_mask
from .prng import SplitMix64, stream_seed

ALLOWED_LEVELS = (4, 8, 16, 32, 64, 128)

PRESET_LEVELS = {
    "attentionmask": (8, 16, 32, 64, 128),
    "attentionmask-4-16": (4, 8, 16),
    "fastmask": (16, 32, 64, 128),
}


@dataclass(eq=True)
class Proposal:
    """A candidate object: non-empty mask plus objectness in [0, 1]."""

    mask: BinaryMask
    objectness: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.objectness <= 1.0:
            raise ValueError(f"objectness {self.objectness} outside [0, 1]")
        if self.mask.area == 0:
            raise ValueError("proposal mask is empty")


@dataclass(eq=True)
class DetectorProfile:
    name: str
    levels: tuple[int, ...]
    input_w: int = 1280
    input_h: int = 960
    window_cells: int = 10
    fill_min: float = 0.4
    fill_max: float = 1.0
    jitter: int = 0
    objectness_noise: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        levels = tuple(sorted({int(d) for d in self.levels}))
        if not levels:
            raise ValueError("profile needs at least one pyramid level")
        bad = [d for d in levels if d not in ALLOWED_LEVELS]
        if bad:
            raise ValueError(f"unsupported pyramid levels {bad}; allowed: {ALLOWED_LEVELS}")
        self.levels = levels
        if self.input_w < 1 or self.input_h < 1:
            raise ValueError("detector input resolution must be positive")
        if self.window_cells < 1:
            raise ValueError("window_cells must be positive")
        if not 0.0 < self.fill_min < self.fill_max <= 1.0:
            raise ValueError("need 0 < fill_min < fill_max <= 1")
        if self.jitter < 0:
            raise ValueError("jitter must be non-negative")
        if not 0.0 <= self.objectness_noise < 1.0:
            raise ValueError("objectness_noise must lie in [0, 1)")


def preset(name: str, **overrides) -> DetectorProfile:
    """Build one of the named profiles, optionally overriding fields."""
    if name not in PRESET_LEVELS:
        raise ValueError(f"unknown detector preset {name!r}; choose from {sorted(PRESET_LEVELS)}")
    return DetectorProfile(name=name, levels=PRESET_LEVELS[name], **overrides)


def detectable_range(profile: DetectorProfile) -> tuple[float, float]:
    """Min and max localizable object side, in detector-input pixels."""
    s_min = profile.fill_min * profile.window_cells * min(profile.levels)
    s_max = profile.fill_max * profile.window_cells * max(profile.levels)
    return s_min, s_max


def band_score(profile: DetectorProfile, side: float) -> float:
    """Score in (0, 1] peaking at the geometric center of a level's fill band.

    Decays by half per band half-width (in log space) away from the nearest
    center, so objects marginal for every level rank lowest.
    """
    center = math.sqrt(profile.fill_min * profile.fill_max)
    half = math.log(profile.fill_max / profile.fill_min) / 2.0
    best = 0.0
    for d in profile.levels:
        fill = side / (profile.window_cells * d)
        s = 2.0 ** (-abs(math.log(fill / center)) / half)
        if s > best:
            best = s
    return best


def simulate(
    profile: DetectorProfile,
    region_w: int,
    region_h: int,
    gt: list[GroundTruthObject],
    origin: tuple[int, int] = (0, 0),
) -> list[Proposal]:
    """Emit one proposal per ground-truth object inside the detectable band.

    The region is virtually rescaled by min(input_w/region_w,
    input_h/region_h); an object is emitted iff its rescaled bbox side lies in
    the profile's detectable range. Each emitted mask is the ground-truth mask
    shifted by a jitter drawn from a stream keyed by (seed, origin,
    instance_id); draw order is dx, dy, noise. The whole function is a pure
    function of its arguments.
    """
    if region_w < 1 or region_h < 1:
        raise ValueError("region must have positive area")
    scale = min(profile.input_w / region_w, profile.input_h / region_h)
    s_min, s_max = detectable_range(profile)
    out = []
    for obj in gt:
        box = obj.mask.bbox
        side = box.w if box.w > box.h else box.h
        eff = side * scale
        if eff < s_min or eff > s_max:
            continue
        rng = SplitMix64(stream_seed(profile.seed, origin[0], origin[1], obj.instance_id))
        dx = rng.randint(-profile.jitter, profile.jitter)
        dy = rng.randint(-profile.jitter, profile.jitter)
        u = rng.random()
        mask = shift_mask(obj.mask, dx, dy)
        if mask.area == 0:
            continue
        score = (1.0 - profile.objectness_noise * u) * band_score(profile, eff)
        out.append(Proposal(mask, score))
    return out
