"""Adam-trained feed-forward equalization for PAM-M optical interconnects."""

from adamffe.pam import PamAlphabet, build_alphabet, demap_symbols, generate_payload, map_bits
from adamffe.channel import ChannelModel, add_awgn, apply_fir, simulate_link
from adamffe.equalizer import (
    TrainingSet,
    build_training_set,
    closed_form_solution,
    equalize,
    gradient,
    mse_cost,
)
from adamffe.trainers import (
    AdamState,
    TrainReport,
    adam_step,
    train_adam,
    train_bgd,
    train_lms,
    train_rls,
)
from adamffe.postproc import mlsd, post_filter, scan_alpha
from adamffe.metrics import (
    BerReport,
    ComplexityReport,
    ber,
    complexity_adam,
    complexity_lms,
    complexity_rls,
    net_rate,
)
from adamffe.config import ConfigError, ExperimentConfig, load_config
from adamffe.errors import DivergenceError, NumericFault, SingularityError, StageError
from adamffe.pipeline import ExperimentReport, run_experiment, run_sweep

__version__ = "0.1.0"

__all__ = [
    "PamAlphabet", "build_alphabet", "demap_symbols", "generate_payload", "map_bits",
    "ChannelModel", "add_awgn", "apply_fir", "simulate_link",
    "TrainingSet", "build_training_set", "closed_form_solution", "equalize", "gradient",
    "mse_cost",
    "AdamState", "TrainReport", "adam_step", "train_adam", "train_bgd", "train_lms", "train_rls",
    "mlsd", "post_filter", "scan_alpha",
    "BerReport", "ComplexityReport", "ber", "complexity_adam", "complexity_lms",
    "complexity_rls", "net_rate",
    "ConfigError", "ExperimentConfig", "load_config",
    "DivergenceError", "NumericFault", "SingularityError", "StageError",
    "ExperimentReport", "run_experiment", "run_sweep",
]
