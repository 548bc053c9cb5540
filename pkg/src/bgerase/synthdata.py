"""Scene-biased synthetic video benchmark.

Each video shows one sprite executing one of eight motion programs over a
procedurally textured, slowly drifting background.  The class label is the
motion program; the background texture is *associated* with a class and
chosen to match with probability `bias_rho`, so a model is free to cheat
from the background exactly as it can on real, scene-biased datasets.

Splits:

* ``train`` / ``test_inbias``: background matches the class-associated
  texture with probability rho, else uniform over the others.
* ``test_antibias``: background drawn uniformly from textures associated
  with *other* classes - the generalization probe.
* ``test_actor``: uniform mid-gray background (motion is the only cue).
* ``test_static``: one frame repeated T times (background/appearance is
  the only cue).

Backgrounds 4/5 and 6/7 are deliberately near-confusable texture pairs so
that per-class "static" decodability varies - without variance there, a
correlation between static accuracy and debiasing gain would be undefined.

On-disk format (``.bevd``, little-endian): magic ``BEVD``, u32 format
version, u16 T, H, W, C, then T*H*W*C bytes of u8 pixels, frame-major,
row-major.  The manifest is a UTF-8 JSON file.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field, asdict
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import ConfigError, DataFormatError
from .video import VideoClip, sample_clip

MAGIC = b"BEVD"
FORMAT_VERSION = 1
MANIFEST_VERSION = 1
_HEADER = struct.Struct("<4sIHHHH")

SPLITS = ("train", "test_inbias", "test_antibias", "test_actor", "test_static")

MOTION_PROGRAMS = (
    "translate_left", "translate_right", "translate_up", "translate_down",
    "orbit_cw", "orbit_ccw", "oscillate", "expand_contract",
)

_SPRITE_SHAPES = ("disc", "square", "diamond")

# (dark RGB, light RGB) palettes per background id; 4/5 and 6/7 are the
# confusable pairs.
_PALETTES = (
    ((0.45, 0.08, 0.08), (0.95, 0.35, 0.30)),
    ((0.05, 0.40, 0.10), (0.35, 0.90, 0.40)),
    ((0.05, 0.10, 0.45), (0.30, 0.45, 0.95)),
    ((0.50, 0.30, 0.02), (1.00, 0.75, 0.25)),
    ((0.04, 0.42, 0.45), (0.30, 0.90, 0.92)),
    ((0.06, 0.44, 0.42), (0.32, 0.88, 0.95)),
    ((0.45, 0.06, 0.40), (0.92, 0.35, 0.88)),
    ((0.47, 0.08, 0.38), (0.90, 0.32, 0.90)),
)


@dataclass
class VideoRecord:
    id: str
    class_label: int
    background_id: int
    split: str
    path: str


@dataclass
class SyntheticDatasetManifest:
    version: int
    num_classes: int
    bias_rho: float
    frames_per_video: int
    frame_size: tuple
    seed: int
    records: list = field(default_factory=list)

    def by_id(self, record_id: str) -> VideoRecord:
        try:
            return self._index[record_id]
        except AttributeError:
            self._index = {r.id: r for r in self.records}
            return self._index[record_id]

    def split_records(self, split: str) -> list:
        if split not in SPLITS:
            raise ConfigError(f"unknown split {split!r}, expected one of {SPLITS}")
        return [r for r in self.records if r.split == split]


# ---------------------------------------------------------------------------
# BEVD container
# ---------------------------------------------------------------------------

def write_video_file(path, frames_u8: np.ndarray) -> None:
    frames_u8 = np.ascontiguousarray(frames_u8, dtype=np.uint8)
    t, h, w, c = frames_u8.shape
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, FORMAT_VERSION, t, h, w, c))
        fh.write(frames_u8.tobytes())


def read_video_file(path) -> np.ndarray:
    """Read a BEVD file into a T x H x W x C uint8 array.

    Corruption (bad magic, impossible dims, short payload) raises
    DataFormatError naming the file and byte offset.
    """
    path = Path(path)
    with open(path, "rb") as fh:
        header = fh.read(_HEADER.size)
        if len(header) < _HEADER.size:
            raise DataFormatError(f"{path}: truncated header at offset {len(header)} (need {_HEADER.size} bytes)")
        magic, version, t, h, w, c = _HEADER.unpack(header)
        if magic != MAGIC:
            raise DataFormatError(f"{path}: bad magic {magic!r} at offset 0 (expected {MAGIC!r})")
        if version != FORMAT_VERSION:
            raise DataFormatError(f"{path}: unsupported format version {version} at offset 4")
        if min(t, h, w, c) == 0:
            raise DataFormatError(f"{path}: zero dimension in header T={t} H={h} W={w} C={c}")
        payload = fh.read(t * h * w * c + 1)
    expected = t * h * w * c
    if len(payload) < expected:
        raise DataFormatError(
            f"{path}: truncated payload at offset {_HEADER.size + len(payload)}, "
            f"expected {expected} pixel bytes, found {len(payload)}"
        )
    if len(payload) > expected:
        raise DataFormatError(f"{path}: {len(payload) - expected}+ trailing bytes after offset {_HEADER.size + expected}")
    return np.frombuffer(payload, dtype=np.uint8).reshape(t, h, w, c)


# ---------------------------------------------------------------------------
# Procedural rendering
# ---------------------------------------------------------------------------

def _rng_for(seed: int, record_index: int, stream: str) -> np.random.Generator:
    streams = {"assign": 0, "sprite": 1, "background": 2, "static": 3}
    return np.random.default_rng(np.random.SeedSequence((seed, record_index, streams[stream])))


def _render_background(bg_id: int, t: int, h: int, w: int, rng: np.random.Generator) -> np.ndarray:
    """T x H x W x 3 drifting texture in [0, 1].

    All random draws happen up front in a fixed order so the consumed
    stream does not depend on the texture family.
    """
    if bg_id == -1:
        return np.full((t, h, w, 3), 0.5, dtype=np.float64)

    phase_y, phase_x = rng.uniform(0, 64, size=2)
    angle = rng.uniform(0, 2 * np.pi)
    speed = rng.uniform(0.3, 0.8)
    brightness = rng.uniform(-0.05, 0.05)
    # sinusoid bank for the value-noise textures (drawn unconditionally to
    # keep the stream layout uniform across texture families)
    n_waves = 6
    wave_dir = rng.uniform(0, 2 * np.pi, size=n_waves)
    wave_mag = rng.uniform(0.7, 1.3, size=n_waves)
    wave_phase = rng.uniform(0, 2 * np.pi, size=n_waves)
    wave_amp = rng.uniform(0.5, 1.0, size=n_waves)

    steps = np.arange(t, dtype=np.float64)
    oy = phase_y + np.sin(angle) * speed * steps
    ox = phase_x + np.cos(angle) * speed * steps
    yy, xx = np.mgrid[0:h, 0:w].astype(np.float64)
    Y = yy[None] + oy[:, None, None]
    X = xx[None] + ox[:, None, None]

    if bg_id == 0:            # horizontal stripes
        pat = 0.5 + 0.5 * np.sin(2 * np.pi * Y / 8.0)
    elif bg_id == 1:          # checkerboard
        pat = ((np.floor(X / 8.0) + np.floor(Y / 8.0)) % 2.0)
    elif bg_id == 2:          # polka dots
        s = 12.0
        dx = (X % s) - s / 2
        dy = (Y % s) - s / 2
        pat = np.clip(4.0 - np.sqrt(dx * dx + dy * dy), 0.0, 1.0)
    elif bg_id == 3:          # diagonal sawtooth gradient
        pat = ((X + Y) % 24.0) / 24.0
    elif bg_id in (4, 5):     # vertical stripes (confusable pair)
        period = 8.0 if bg_id == 4 else 10.0
        pat = 0.5 + 0.5 * np.sin(2 * np.pi * X / period)
    elif bg_id in (6, 7):     # smooth value noise (confusable pair)
        grain = 6.0 if bg_id == 6 else 9.0
        freq = wave_mag / grain
        acc = np.zeros_like(X)
        for i in range(n_waves):
            fx = freq[i] * np.cos(wave_dir[i])
            fy = freq[i] * np.sin(wave_dir[i])
            acc += wave_amp[i] * np.sin(2 * np.pi * (fx * X + fy * Y) + wave_phase[i])
        pat = 0.5 + 0.5 * acc / np.sum(wave_amp)
    else:
        raise ConfigError(f"no texture defined for background id {bg_id}")

    dark, light = _PALETTES[bg_id]
    dark = np.asarray(dark)
    light = np.asarray(light)
    frames = dark + pat[..., None] * (light - dark) + brightness
    return np.clip(frames, 0.0, 1.0)


def _hsv_to_rgb(hue: float, sat: float, val: float) -> np.ndarray:
    i = int(hue * 6.0) % 6
    f = hue * 6.0 - int(hue * 6.0)
    p, q, u = val * (1 - sat), val * (1 - sat * f), val * (1 - sat * (1 - f))
    rgb = [(val, u, p), (q, val, p), (p, val, u), (p, q, val), (u, p, val), (val, p, q)][i]
    return np.asarray(rgb)


def _motion_positions(program: str, t: int, h: int, w: int,
                      rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray, Optional[np.ndarray]]:
    """(y, x) per frame, plus a per-frame radius for the pulsing program."""
    steps = np.arange(t, dtype=np.float64)
    cy0, cx0 = h / 2.0, w / 2.0

    if program.startswith("translate"):
        v = rng.uniform(1.0, 1.6)
        lateral = rng.uniform(-8.0, 8.0)
        path = v * (steps - (t - 1) / 2.0)
        if program == "translate_left":
            y, x = np.full(t, cy0 + lateral), cx0 - path
        elif program == "translate_right":
            y, x = np.full(t, cy0 + lateral), cx0 + path
        elif program == "translate_up":
            y, x = cy0 - path, np.full(t, cx0 + lateral)
        else:
            y, x = cy0 + path, np.full(t, cx0 + lateral)
        return y, x, None

    if program in ("orbit_cw", "orbit_ccw"):
        radius = rng.uniform(11.0, 15.0)
        cy = cy0 + rng.uniform(-3.0, 3.0)
        cx = cx0 + rng.uniform(-3.0, 3.0)
        revs = rng.uniform(0.55, 0.95)
        phase = rng.uniform(0, 2 * np.pi)
        direction = -1.0 if program == "orbit_cw" else 1.0
        theta = phase + direction * 2 * np.pi * revs * steps / t
        return cy + radius * np.sin(theta), cx + radius * np.cos(theta), None

    if program == "oscillate":
        amp = rng.uniform(11.0, 15.0)
        period = rng.uniform(10.0, 16.0)
        phase = rng.uniform(0, 2 * np.pi)
        lateral = rng.uniform(-8.0, 8.0)
        x = cx0 + amp * np.sin(2 * np.pi * steps / period + phase)
        return np.full(t, cy0 + lateral), x, None

    if program == "expand_contract":
        r0 = rng.uniform(9.0, 12.0)
        amp = rng.uniform(4.0, 6.0)
        period = rng.uniform(12.0, 20.0)
        phase = rng.uniform(0, 2 * np.pi)
        cy = cy0 + rng.uniform(-4.0, 4.0)
        cx = cx0 + rng.uniform(-4.0, 4.0)
        radius = r0 + amp * np.sin(2 * np.pi * steps / period + phase)
        return np.full(t, cy), np.full(t, cx), radius

    raise ConfigError(f"unknown motion program {program!r}")


def sprite_alpha(shape: str, y: np.ndarray, x: np.ndarray, radius: np.ndarray,
                 h: int, w: int) -> np.ndarray:
    """Soft occupancy mask, T x H x W in [0, 1], one sprite per frame."""
    yy, xx = np.mgrid[0:h, 0:w].astype(np.float64)
    dy = yy[None] - y[:, None, None]
    dx = xx[None] - x[:, None, None]
    r = radius[:, None, None]
    if shape == "disc":
        dist = np.sqrt(dy * dy + dx * dx)
    elif shape == "square":
        dist = np.maximum(np.abs(dy), np.abs(dx))
    elif shape == "diamond":
        dist = 0.75 * (np.abs(dy) + np.abs(dx))
    else:
        raise ConfigError(f"unknown sprite shape {shape!r}")
    return np.clip(r + 0.5 - dist, 0.0, 1.0)


def render_record(seed: int, record_index: int, class_label: int, background_id: int,
                  frames_per_video: int, frame_size: tuple,
                  static: bool = False) -> tuple[np.ndarray, np.ndarray]:
    """Render one record deterministically.

    Returns (frames_u8, sprite_alpha).  Sprite geometry is driven by a
    stream independent of the background stream, so regenerating the same
    record with a different background id leaves the sprite mask
    untouched.
    """
    h, w = frame_size
    t = frames_per_video
    program = MOTION_PROGRAMS[class_label]

    srng = _rng_for(seed, record_index, "sprite")
    shape = _SPRITE_SHAPES[int(srng.integers(0, len(_SPRITE_SHAPES)))]
    color = _hsv_to_rgb(float(srng.uniform(0, 1)), float(srng.uniform(0.5, 0.9)),
                        float(srng.uniform(0.85, 1.0)))
    size = float(srng.uniform(9.0, 13.0))
    y, x, radius = _motion_positions(program, t, h, w, srng)
    if radius is None:
        radius = np.full(t, size)

    alpha = sprite_alpha(shape, y, x, radius, h, w)

    brng = _rng_for(seed, record_index, "background")
    bg = _render_background(background_id, t, h, w, brng)

    frames = bg * (1.0 - alpha[..., None]) + color * alpha[..., None]

    if static:
        k = int(_rng_for(seed, record_index, "static").integers(0, t))
        frames = np.repeat(frames[k:k + 1], t, axis=0)
        alpha = np.repeat(alpha[k:k + 1], t, axis=0)

    frames_u8 = np.clip(np.round(frames * 255.0), 0, 255).astype(np.uint8)
    return frames_u8, alpha


def _choose_background(split: str, class_label: int, num_classes: int, bias_rho: float,
                       rng: np.random.Generator) -> int:
    if split == "test_actor":
        return -1
    u = float(rng.random())
    if split == "test_antibias":
        hit = False
    else:
        hit = u < bias_rho
    if hit:
        return class_label
    j = int(rng.integers(0, num_classes - 1))
    return j if j < class_label else j + 1


# ---------------------------------------------------------------------------
# Dataset generation / loading
# ---------------------------------------------------------------------------

def generate_dataset(out_dir, num_classes: int = 8, videos_per_class: int = 100,
                     bias_rho: float = 0.95, frames_per_video: int = 32,
                     frame_size: tuple = (64, 64), seed: int = 0,
                     test_videos_per_class: int = 20, actor_videos_per_class: int = 10,
                     static_videos_per_class: int = 20) -> SyntheticDatasetManifest:
    """Generate the dataset tree and manifest; deterministic given seed."""
    if num_classes < 2 or num_classes > len(MOTION_PROGRAMS):
        raise ConfigError(f"num_classes must be in [2, {len(MOTION_PROGRAMS)}], got {num_classes}")
    for name, v in (("videos_per_class", videos_per_class), ("frames_per_video", frames_per_video),
                    ("test_videos_per_class", test_videos_per_class)):
        if v <= 0:
            raise ConfigError(f"{name} must be positive, got {v}")
    if not 0.0 <= bias_rho <= 1.0:
        raise ConfigError(f"bias_rho must be in [0, 1], got {bias_rho}")

    out_dir = Path(out_dir)
    counts = {
        "train": videos_per_class,
        "test_inbias": test_videos_per_class,
        "test_antibias": test_videos_per_class,
        "test_actor": actor_videos_per_class,
        "test_static": static_videos_per_class,
    }

    manifest = SyntheticDatasetManifest(
        version=MANIFEST_VERSION, num_classes=num_classes, bias_rho=bias_rho,
        frames_per_video=frames_per_video, frame_size=tuple(frame_size), seed=seed,
    )

    index = 0
    for split in SPLITS:
        split_dir = out_dir / "videos" / split
        split_dir.mkdir(parents=True, exist_ok=True)
        for c in range(num_classes):
            for i in range(counts[split]):
                arng = _rng_for(seed, index, "assign")
                bg = _choose_background(split, c, num_classes, bias_rho, arng)
                rec_id = f"{split}_c{c}_{i:03d}"
                rel = f"videos/{split}/{rec_id}.bevd"
                frames, _ = render_record(seed, index, c, bg, frames_per_video,
                                          frame_size, static=(split == "test_static"))
                write_video_file(out_dir / rel, frames)
                manifest.records.append(VideoRecord(rec_id, c, bg, split, rel))
                index += 1

    save_manifest(manifest, out_dir / "manifest.json")
    return manifest


def save_manifest(manifest: SyntheticDatasetManifest, path) -> None:
    doc = asdict(manifest)
    doc["frame_size"] = list(manifest.frame_size)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1, sort_keys=True)


def load_manifest(path) -> SyntheticDatasetManifest:
    path = Path(path)
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise DataFormatError(f"{path}: cannot read manifest: {exc}") from exc
    if doc.get("version") != MANIFEST_VERSION:
        raise DataFormatError(f"{path}: unsupported manifest version {doc.get('version')}")
    records = [VideoRecord(**r) for r in doc.pop("records")]
    doc["frame_size"] = tuple(doc["frame_size"])
    manifest = SyntheticDatasetManifest(records=records, **doc)
    ids = [r.id for r in records]
    if len(set(ids)) != len(ids):
        raise DataFormatError(f"{path}: duplicate record ids in manifest")
    for r in records:
        if not 0 <= r.class_label < manifest.num_classes:
            raise DataFormatError(f"{path}: record {r.id} has class {r.class_label} out of range")
        if r.split not in SPLITS:
            raise DataFormatError(f"{path}: record {r.id} has unknown split {r.split!r}")
    return manifest


def verify_dataset(manifest: SyntheticDatasetManifest, root) -> int:
    """Check every record's file exists and its header matches the manifest."""
    root = Path(root)
    t = manifest.frames_per_video
    h, w = manifest.frame_size
    for r in manifest.records:
        frames = read_video_file(root / r.path)
        if frames.shape != (t, h, w, 3):
            raise DataFormatError(
                f"{root / r.path}: header dims {frames.shape} do not match manifest ({t}, {h}, {w}, 3)"
            )
    return len(manifest.records)


def load_video(manifest: SyntheticDatasetManifest, record_id: str, root) -> np.ndarray:
    rec = manifest.by_id(record_id)
    frames = read_video_file(Path(root) / rec.path)
    t = manifest.frames_per_video
    h, w = manifest.frame_size
    if frames.shape != (t, h, w, 3):
        raise DataFormatError(
            f"{rec.path}: dims {frames.shape} do not match manifest ({t}, {h}, {w}, 3)"
        )
    return frames


def load_clip(manifest: SyntheticDatasetManifest, record_id: str, length: int, stride: int,
              rng: np.random.Generator, root) -> VideoClip:
    """Decode to [0, 1] floats and sample a clip window."""
    frames = load_video(manifest, record_id, root)
    video = frames.astype(np.float32) / 255.0
    return sample_clip(video, length, stride, rng, video_id=record_id)
