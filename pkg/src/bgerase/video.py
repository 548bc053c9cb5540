"""Video clip primitives: deterministic clip sampling and temporally
consistent basic augmentations.

A clip is a T x H x W x C float array in [0, 1].  Every augmentation draws
its parameters once per clip and applies the identical transform to all
frames, so that nothing in the basic augmentation set perturbs the motion
pattern itself.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .errors import ConfigError

# Rec. 601 luma weights, used for saturation/contrast jitter.
_LUMA = np.array([0.299, 0.587, 0.114], dtype=np.float64)


@dataclass
class VideoClip:
    """A block of frames with provenance metadata.

    frames: T x H x W x C, float, values in [0, 1], T >= 2.
    """

    frames: np.ndarray
    video_id: str = ""
    start_index: int = 0
    stride: int = 1

    def __post_init__(self):
        f = np.asarray(self.frames)
        if f.ndim != 4:
            raise ConfigError(f"clip frames must be T x H x W x C, got shape {f.shape}")
        if f.shape[0] < 2:
            raise ConfigError(f"clip needs T >= 2 frames, got T={f.shape[0]}")
        lo, hi = float(f.min()), float(f.max())
        if lo < 0.0 or hi > 1.0:
            raise ConfigError(f"pixel values must lie in [0, 1], found range [{lo}, {hi}]")
        self.frames = f

    @property
    def shape(self) -> tuple:
        return self.frames.shape

    def copy(self) -> "VideoClip":
        return VideoClip(self.frames.copy(), self.video_id, self.start_index, self.stride)


@dataclass
class AugmentationSet:
    """Bounds for the basic augmentation set (rotation + color jitter).

    One parameter vector is drawn per clip and applied to every frame.
    """

    rotation_max_degrees: float = 10.0
    brightness: float = 0.2
    contrast: float = 0.2
    saturation: float = 0.2
    enable_rotation: bool = True
    enable_color: bool = True

    def __post_init__(self):
        if self.rotation_max_degrees < 0:
            raise ConfigError("rotation_max_degrees must be >= 0")
        for name in ("brightness", "contrast", "saturation"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} jitter bound must be >= 0")


@dataclass(frozen=True)
class AugmentationParams:
    """A concrete per-clip parameter draw; zero everywhere is the identity."""

    angle_degrees: float = 0.0
    brightness_delta: float = 0.0
    contrast_delta: float = 0.0
    saturation_delta: float = 0.0


def sample_clip(video: np.ndarray, length: int, stride: int,
                rng: np.random.Generator, video_id: str = "") -> VideoClip:
    """Sample `length` frames at spacing `stride` from a frame sequence.

    The start offset is chosen uniformly among all windows that fit
    `length * stride` frames.  Pure function of (video, length, stride,
    rng state).
    """
    video = np.asarray(video)
    if video.ndim != 4:
        raise ConfigError(f"video must be N x H x W x C, got shape {video.shape}")
    if length < 2 or stride < 1:
        raise ConfigError(f"need length >= 2 and stride >= 1, got length={length} stride={stride}")
    required = length * stride
    n = video.shape[0]
    if n < required:
        raise ConfigError(
            f"video too short: sampling length={length} at stride={stride} "
            f"requires {required} frames, video has {n}"
        )
    start = int(rng.integers(0, n - required + 1))
    idx = start + stride * np.arange(length)
    return VideoClip(video[idx].copy(), video_id=video_id, start_index=start, stride=stride)


def uniform_clip_starts(n_frames: int, length: int, stride: int, n_clips: int) -> list[int]:
    """Deterministic, uniformly spaced start offsets covering a video.

    Used by evaluation-time multi-clip averaging.
    """
    required = length * stride
    if n_frames < required:
        raise ConfigError(
            f"video too short: need {required} frames for length={length} stride={stride}, "
            f"have {n_frames}"
        )
    last = n_frames - required
    if n_clips == 1:
        return [last // 2]
    return [int(round(s)) for s in np.linspace(0, last, n_clips)]


def clip_at(video: np.ndarray, start: int, length: int, stride: int,
            video_id: str = "") -> VideoClip:
    """Extract the clip at a known start offset (no randomness)."""
    idx = start + stride * np.arange(length)
    if idx[-1] >= video.shape[0]:
        raise ConfigError(f"clip start {start} overruns video of {video.shape[0]} frames")
    return VideoClip(video[idx].copy(), video_id=video_id, start_index=start, stride=stride)


def random_spatial_crop(clip: VideoClip, out_h: int, out_w: int,
                        rng: np.random.Generator) -> VideoClip:
    """Crop the same out_h x out_w window from every frame."""
    t, h, w, c = clip.frames.shape
    if out_h > h or out_w > w:
        raise ConfigError(f"crop {out_h}x{out_w} larger than frame {h}x{w}")
    top = int(rng.integers(0, h - out_h + 1))
    left = int(rng.integers(0, w - out_w + 1))
    out = clip.frames[:, top:top + out_h, left:left + out_w, :].copy()
    return VideoClip(out, clip.video_id, clip.start_index, clip.stride)


def draw_augmentation_params(aug: AugmentationSet, rng: np.random.Generator) -> AugmentationParams:
    """Draw one parameter vector for a whole clip."""
    angle = float(rng.uniform(-aug.rotation_max_degrees, aug.rotation_max_degrees)) \
        if aug.enable_rotation and aug.rotation_max_degrees > 0 else 0.0
    if aug.enable_color:
        db = float(rng.uniform(-aug.brightness, aug.brightness)) if aug.brightness > 0 else 0.0
        dc = float(rng.uniform(-aug.contrast, aug.contrast)) if aug.contrast > 0 else 0.0
        ds = float(rng.uniform(-aug.saturation, aug.saturation)) if aug.saturation > 0 else 0.0
    else:
        db = dc = ds = 0.0
    return AugmentationParams(angle, db, dc, ds)


def apply_augmentation_params(clip: VideoClip, params: AugmentationParams) -> VideoClip:
    """Apply one fixed parameter vector identically to every frame.

    Sub-transforms whose delta is exactly zero are skipped, so the
    all-zero draw is a bit-exact identity.  Output is clamped to [0, 1].
    Rotation fills exposed corners by edge replication.
    """
    x = clip.frames
    touched = False

    if params.angle_degrees != 0.0:
        x = ndimage.rotate(x, params.angle_degrees, axes=(2, 1),
                           reshape=False, order=1, mode="nearest")
        touched = True

    if params.saturation_delta != 0.0 or params.contrast_delta != 0.0 or params.brightness_delta != 0.0:
        x = x.astype(np.float64, copy=not touched)
        gray = _gray(x)
        if params.saturation_delta != 0.0:
            x = gray[..., None] + (1.0 + params.saturation_delta) * (x - gray[..., None])
        if params.contrast_delta != 0.0:
            m = float(gray.mean())
            x = m + (1.0 + params.contrast_delta) * (x - m)
        if params.brightness_delta != 0.0:
            x = x + params.brightness_delta
        touched = True

    if not touched:
        return clip.copy()
    out = np.clip(x, 0.0, 1.0).astype(clip.frames.dtype)
    return VideoClip(out, clip.video_id, clip.start_index, clip.stride)


def apply_basic_augmentation(clip: VideoClip, aug: AugmentationSet,
                             rng: np.random.Generator) -> VideoClip:
    """Draw once, apply to all frames."""
    return apply_augmentation_params(clip, draw_augmentation_params(aug, rng))


def temporal_difference(clip: VideoClip) -> np.ndarray:
    """Frame-to-frame difference, shape (T-1) x H x W x C.

    The discrete time derivative of the clip; a static clip maps to zero.
    """
    if clip.frames.shape[0] < 2:
        raise ConfigError("temporal difference needs T >= 2")
    return np.diff(clip.frames, axis=0)


def _gray(x: np.ndarray) -> np.ndarray:
    if x.shape[-1] == 3:
        return x @ _LUMA
    return x.mean(axis=-1)
