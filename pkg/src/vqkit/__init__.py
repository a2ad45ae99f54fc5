"""vqkit: a fast blind video quality toolkit.

Spatial and temporal bandpass scene statistics fused with externally
computed deep semantic features, a trainable SVR head, and evaluation and
benchmark harnesses.
"""

__version__ = "0.1.0"

from .config import Config
from .deep_features import (
    DEEP_DEFAULT_DIM,
    pool_deep,
    read_deep_features,
    write_deep_features,
)
from .evaluation import (
    EvalReport,
    calibrate_mos,
    krcc,
    load_manifest,
    plcc_rmse,
    run_protocol,
    srcc,
)
from .nss import NSS34_DIM, NSS34_SLOTS, Nss34Result, fit_aggd, fit_ggd, mscn, nss34
from .pipeline import (
    SPATIAL_DIM,
    VIDEO_DIM,
    VideoFeatureVector,
    assemble_video,
    describe_feature,
    extract_video,
    read_features,
    spatial_features,
    write_features,
)
from .regressor import QualityRegressor, fit_logistic, load_model, save_model
from .temporal import TEMPORAL_DIM, haar_bank, temporal_nss, temporal_subbands
from .video_io import (
    ChunkSchedule,
    Frame,
    PixelFormat,
    VideoSource,
    build_schedule,
    parse_y4m,
    read_raw_yuv,
    write_y4m,
    yuv_to_rgb,
)

__all__ = [
    "Config",
    "DEEP_DEFAULT_DIM",
    "NSS34_DIM",
    "NSS34_SLOTS",
    "SPATIAL_DIM",
    "TEMPORAL_DIM",
    "VIDEO_DIM",
    "ChunkSchedule",
    "EvalReport",
    "Frame",
    "Nss34Result",
    "PixelFormat",
    "QualityRegressor",
    "VideoFeatureVector",
    "VideoSource",
    "assemble_video",
    "build_schedule",
    "calibrate_mos",
    "describe_feature",
    "extract_video",
    "fit_aggd",
    "fit_ggd",
    "fit_logistic",
    "haar_bank",
    "krcc",
    "load_manifest",
    "load_model",
    "mscn",
    "nss34",
    "parse_y4m",
    "plcc_rmse",
    "pool_deep",
    "read_deep_features",
    "read_features",
    "read_raw_yuv",
    "run_protocol",
    "save_model",
    "spatial_features",
    "srcc",
    "temporal_nss",
    "temporal_subbands",
    "write_deep_features",
    "write_features",
    "write_y4m",
    "yuv_to_rgb",
]
