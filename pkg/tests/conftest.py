import numpy as np
import pytest

from iolens import synth
from iolens.ingest import MaskFrame, encode_rle


def mask_from_array(arr, frame_index=0, class_label="lens") -> MaskFrame:
    arr = np.asarray(arr, dtype=bool)
    h, w = arr.shape
    return MaskFrame(
        frame_index=frame_index,
        class_label=class_label,
        width=w,
        height=h,
        rle=tuple(encode_rle(arr, w, h)),
    )


@pytest.fixture(scope="session")
def sample_video() -> synth.GeneratedVideo:
    """One quick noiseless video shared by pipeline/service/CLI tests."""
    spec = synth.SynthSpec(
        seed=7,
        n_frames=150 + 190,
        implantation_clip_range=(1, 1),
        unfold=synth.UnfoldCurve(plateau=60, midpoint=25, steepness=0.08, settle=0.12),
        drift_path=((0, (0.0, 0.0)), (90, (6.0, -4.0)), (189, (-5.0, 3.0))),
        orientation_path=((0, 20.0), (72, 20.0), (189, 55.0)),
    )
    return synth.generate_video(spec)
