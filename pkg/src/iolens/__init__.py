"""Intraocular-lens kinematics from cataract-surgery video streams.

The package turns per-frame segmentation masks, object detections, and
implantation-phase probabilities into three per-video measurements
(unfolding delay, instability, rotation) and runs cross-brand statistical
studies over batches of videos. A deterministic synthetic-surgery generator
provides ground truth for end-to-end verification.
"""

__version__ = "0.1.0"

from . import (  # noqa: F401
    errors,
    evalmetrics,
    geometry,
    hookpose,
    ingest,
    kinematics,
    phase,
    pipeline,
    stats,
    synth,
)
from .config import AnalysisConfig  # noqa: F401
from .pipeline import run_study, run_video  # noqa: F401
