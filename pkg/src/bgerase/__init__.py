"""Background-robust self-supervised video representation learning.

Library + CLI: distracting-clip generation (background erasing and its
ablation variants), consistency-regularized pretext and contrastive
pretraining on a synthetic scene-biased video benchmark, and the
matching bias diagnostics (linear probes, retrieval, static-accuracy
correlation, saliency).
"""

__version__ = "0.1.0"

from .video import (
    VideoClip, AugmentationSet, AugmentationParams,
    sample_clip, random_spatial_crop, apply_basic_augmentation,
    draw_augmentation_params, apply_augmentation_params, temporal_difference,
)
from .distractor import DistractorSpec, DistractorTrace, make_distractor, blend_static_frame
from .synthdata import (
    SyntheticDatasetManifest, VideoRecord, generate_dataset, load_manifest,
    load_clip, load_video, verify_dataset,
)
