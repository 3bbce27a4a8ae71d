"""Learned direct-path phase-difference features for SRP localization.

Trains a causal CRNN on scenes rendered by the ``srploc`` simulator and
exports per-pair feature sequences in the localizer's feature-file
format. All interaction with the localizer goes through files and its
CLI.
"""

from .data import PairSampleSet, generate_scenarios
from .export import export_features, predict_features
from .features import omega_axis, pair_planes, stft_multichannel
from .formats import (
    FeatureFile,
    Sidecar,
    nonredundant_pairs,
    read_feature_file,
    read_geometry,
    read_sidecar,
    read_wav,
    write_feature_file,
)
from .model import CausalCrnn, CrnnSpec, load_checkpoint, save_checkpoint
from .targets import target_sequence
from .train import TrainConfig, save_run, train

__version__ = "0.1.0"
