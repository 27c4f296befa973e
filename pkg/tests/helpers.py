"""Shared test fixtures: small experiment configs and least-squares instances."""
import copy

import numpy as np

from adamffe.config import ExperimentConfig
from adamffe.equalizer import TrainingSet, build_training_set

SMALL = {
    "alphabet": {"levels": 4, "normalize": True},
    "frame": {"training_len": 200, "payload_len": 2000},
    "channel": {"isi_taps": [0.2, 1.0, 0.3], "delay": 0},
    "equalizer": {"taps": 11},
    "trainer": {"adam": {"algorithm": "adam", "theta": 0.05, "iterations": 100},
                "rls": {"algorithm": "rls"}},
    "postproc": {"alpha": 0.5, "mlsd": True},
    "sweep": {"snr_db": [16.0, 20.0]},
    "seeds": {"payload": 3, "noise": 4},
}


def small(**overrides) -> ExperimentConfig:
    d = copy.deepcopy(SMALL)
    for dotted, value in overrides.items():
        *parents, leaf = dotted.split("__")
        node = d
        for key in parents:
            node = node.setdefault(key, {})
        node[leaf] = value
    return ExperimentConfig.from_dict(d)


def well_conditioned(rng, M=40, N=4, noise=0.05):
    """Equalizer-like instance: targets follow a linear model of the windows plus noise."""
    while True:
        x = rng.standard_normal(M)
        R = build_training_set(x, x, N).R
        if np.linalg.cond(R) < 10:
            return TrainingSet(R, R @ rng.standard_normal(N) + noise * rng.standard_normal(len(R)))
