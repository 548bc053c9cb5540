"""Distracting-clip generation.

The flagship transform blends one randomly chosen static frame into every
frame of a clip:

    out[j] = (1 - lam) * x[j] + lam * static        lam ~ U[0, gamma]

Because the blended-in frame is constant in time, the temporal difference
of the output is exactly (1 - lam) times the temporal difference of the
input: the background is perturbed while the motion pattern survives.
The remaining variants (inter-video frame, shared Gaussian noise, mixup,
cutmix) exist for controlled comparisons; mixup and cutmix deliberately do
NOT preserve that scaling property when the donor moves.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, asdict
from typing import Optional

import numpy as np

from .errors import ConfigError
from .video import VideoClip

VARIANTS = ("intra_frame", "inter_frame", "gaussian", "mixup", "cutmix", "none")


@dataclass
class DistractorSpec:
    """Which distractor variant to apply and its parameters."""

    variant: str = "intra_frame"
    gamma: float = 0.3
    gaussian_sigma: float = 0.1
    cutmix_area_range: tuple = (0.25, 0.5)

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ConfigError(f"unknown distractor variant {self.variant!r}, expected one of {VARIANTS}")
        if not 0.0 <= self.gamma <= 1.0:
            raise ConfigError(f"gamma must be in [0, 1], got {self.gamma}")
        if self.gaussian_sigma <= 0:
            raise ConfigError(f"gaussian_sigma must be > 0, got {self.gaussian_sigma}")
        lo, hi = self.cutmix_area_range
        if not (0.0 < lo <= hi < 1.0):
            raise ConfigError(f"cutmix_area_range must satisfy 0 < lo <= hi < 1, got {(lo, hi)}")


@dataclass
class DistractorTrace:
    """Record of the randomness consumed by one distractor application.

    Serializes to one JSON line so experiment runs can keep an audit log.
    """

    variant: str
    lam: Optional[float] = None
    frame_index: Optional[int] = None
    box: Optional[tuple] = None
    noise_seed: Optional[int] = None
    donor_id: Optional[str] = None

    def to_line(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_line(cls, line: str) -> "DistractorTrace":
        d = json.loads(line)
        if d.get("box") is not None:
            d["box"] = tuple(d["box"])
        return cls(**d)


def blend_static_frame(clip: VideoClip, static_frame: np.ndarray, lam: float) -> VideoClip:
    """Convex-blend one H x W x C frame into every frame of a clip.

    lam = 0 is a bit-exact identity; no clamping is needed because the
    combination of two in-range images stays in range.
    """
    if not 0.0 <= lam <= 1.0:
        raise ConfigError(f"blend weight must be in [0, 1], got {lam}")
    if static_frame.shape != clip.frames.shape[1:]:
        raise ConfigError(
            f"static frame shape {static_frame.shape} does not match clip frames {clip.frames.shape[1:]}"
        )
    if lam == 0.0:
        return clip.copy()
    out = (1.0 - lam) * clip.frames + lam * static_frame[None]
    return VideoClip(out.astype(clip.frames.dtype), clip.video_id, clip.start_index, clip.stride)


def make_distractor(clip: VideoClip, spec: DistractorSpec,
                    donor: Optional[VideoClip] = None,
                    rng: Optional[np.random.Generator] = None) -> tuple[VideoClip, DistractorTrace]:
    """Generate the distracting counterpart of a clip.

    One parameter draw per clip; every frame receives the identical
    perturbation.  `donor` is required for the inter_frame and mixup
    variants and ignored otherwise.
    """
    if spec.variant == "none":
        return clip.copy(), DistractorTrace(variant="none")
    if rng is None:
        raise ConfigError("rng required for non-identity distractor variants")

    t, h, w, c = clip.frames.shape

    if spec.variant == "intra_frame":
        lam = float(rng.uniform(0.0, spec.gamma))
        k = int(rng.integers(0, t))
        out = blend_static_frame(clip, clip.frames[k], lam)
        return out, DistractorTrace("intra_frame", lam=lam, frame_index=k)

    if spec.variant == "inter_frame":
        _require_donor(donor, clip, frames_only=True)
        lam = float(rng.uniform(0.0, spec.gamma))
        k = int(rng.integers(0, donor.frames.shape[0]))
        out = blend_static_frame(clip, donor.frames[k], lam)
        return out, DistractorTrace("inter_frame", lam=lam, frame_index=k, donor_id=donor.video_id)

    if spec.variant == "gaussian":
        noise_seed = int(rng.integers(0, 2 ** 63 - 1))
        field = np.random.default_rng(noise_seed).normal(0.0, spec.gaussian_sigma, size=(h, w, c))
        out = np.clip(clip.frames + field[None], 0.0, 1.0).astype(clip.frames.dtype)
        return (VideoClip(out, clip.video_id, clip.start_index, clip.stride),
                DistractorTrace("gaussian", noise_seed=noise_seed))

    if spec.variant == "mixup":
        _require_donor(donor, clip, frames_only=False)
        lam = float(rng.uniform(0.0, spec.gamma))
        out = (1.0 - lam) * clip.frames + lam * donor.frames
        return (VideoClip(out.astype(clip.frames.dtype), clip.video_id, clip.start_index, clip.stride),
                DistractorTrace("mixup", lam=lam, donor_id=donor.video_id))

    if spec.variant == "cutmix":
        lo, hi = spec.cutmix_area_range
        area = float(rng.uniform(lo, hi))
        bh = max(1, int(round(h * np.sqrt(area))))
        bw = max(1, int(round(w * np.sqrt(area))))
        y0 = int(rng.integers(0, h - bh + 1))
        x0 = int(rng.integers(0, w - bw + 1))
        k = int(rng.integers(0, t))
        out = clip.frames.copy()
        out[:, y0:y0 + bh, x0:x0 + bw, :] = clip.frames[k, y0:y0 + bh, x0:x0 + bw, :]
        return (VideoClip(out, clip.video_id, clip.start_index, clip.stride),
                DistractorTrace("cutmix", frame_index=k, box=(y0, x0, bh, bw)))

    raise ConfigError(f"unknown distractor variant {spec.variant!r}")


def _require_donor(donor: Optional[VideoClip], clip: VideoClip, frames_only: bool) -> None:
    if donor is None:
        raise ConfigError("this distractor variant requires a donor clip")
    if frames_only:
        if donor.frames.shape[1:] != clip.frames.shape[1:]:
            raise ConfigError(
                f"donor frame shape {donor.frames.shape[1:]} incompatible with clip {clip.frames.shape[1:]}"
            )
    elif donor.frames.shape != clip.frames.shape:
        raise ConfigError(
            f"donor shape {donor.frames.shape} must equal clip shape {clip.frames.shape}"
        )
