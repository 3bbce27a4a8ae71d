"""Multi-source DOA estimation from steered-response-power spectra.

Spatial spectra are built from per-pair phase-difference feature
vectors: classical phase-transform cross-spectra, exact ground-truth
direct-path vectors, or learned features supplied through the feature
file interface. Sources are extracted per frame either by peak
detection or by iteratively removing the dominant source.
"""

from .geometry import (
    ArrayGeometry,
    CandidateGrid,
    ConfigError,
    Doa,
    MicPair,
    azimuth_error,
    builtin_array,
    make_grid,
    tdoa,
    unit_vector,
)
from .stft import StftConfig, input_features, stft
from .srp import (
    SteeringTable,
    dp_ipd_vector,
    dp_spatial_spectrum_single,
    gcc_phat_frame,
    oracle_feature_seq,
    phat_cross_spectrum,
    phat_feature_seq,
    srp_feature_spectrum,
    srp_phat_spectrum,
    target_vector,
)
from .detect import Detection, iterative_localize, localize_frames, peak_detect
from .sim import (
    MixSpec,
    Room,
    Scenario,
    ScenarioConfig,
    SourceSpec,
    Trajectory,
    image_method_rir,
    sample_scenario,
    schroeder_rt60,
    synthesize,
)
from .metrics import MetricsReport, match_frame, optimal_match_frame, score
from .config import RunConfig

__version__ = "0.1.0"
