"""End-to-end desk-scale experiment.

Chain per SNR point: frame -> PAM map -> simulated link -> synchronization ->
training -> equalization -> post filter + MLSD -> demap -> BER.

Frame layout is ``[training | payload | guard]``. Every trainer trains on a
prefix of the training region; BER is counted on the payload region only, so
all trainers are scored on the same bits. The guard tail keeps the end of the
payload clear of the channel/equalizer edge.

Seeds: training, payload and guard bits come from independent child streams
of ``seeds.payload``; the noise realization of a point depends only on
``seeds.noise`` and its SNR value, so every trainer (and every sweep value)
sees the same channel realization at a given SNR.
"""
from __future__ import annotations

import copy
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from adamffe.channel import ChannelModel, simulate_link
from adamffe.config import TRAINER_DEFAULTS, ConfigError, ExperimentConfig, TrainerSpec
from adamffe.equalizer import build_training_set, equalize
from adamffe.errors import StageError
from adamffe.metrics import (BerReport, ComplexityReport, ber, complexity_adam, complexity_lms,
                             complexity_rls)
from adamffe.pam import PamAlphabet, build_alphabet, demap_symbols, generate_payload, map_bits
from adamffe.postproc import mlsd, post_filter, scan_alpha
from adamffe.trainers import TrainReport, train_adam, train_bgd, train_lms, train_rls

SEED_POLICY = ("bits: child streams (seeds.payload, 0|1|2) for training|payload|guard; "
               "noise: (seeds.noise, round(snr_db * 1000)); "
               "shared by all trainers and sweep values")


def _child_seed(*entropy: int) -> int:
    return int(np.random.SeedSequence(list(entropy)).generate_state(1)[0])


def noise_seed(base: int, snr_db: float) -> int:
    return _child_seed(base, int(round(snr_db * 1000)) & 0xFFFFFFFF)


class _stage:
    """Re-raise anything escaping the block as a StageError naming ``name``."""

    def __init__(self, name: str):
        self.name = name

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc is not None and not isinstance(exc, StageError) and isinstance(exc, Exception):
            raise StageError(self.name, exc) from exc
        return False


@dataclass
class Frame:
    alphabet: PamAlphabet
    training_bits: np.ndarray
    payload_bits: np.ndarray
    guard_bits: np.ndarray
    symbols: np.ndarray

    @property
    def training_len(self) -> int:
        return self.training_bits.size // self.alphabet.bits_per_symbol

    @property
    def payload_slice(self) -> slice:
        start = self.training_len
        return slice(start, start + self.payload_bits.size // self.alphabet.bits_per_symbol)


def build_frame(cfg: ExperimentConfig, payload_bits=None) -> Frame:
    """Generate the transmitted frame; ``payload_bits`` overrides the payload region."""
    alphabet = build_alphabet(cfg.alphabet.levels, cfg.alphabet.normalize)
    k = alphabet.bits_per_symbol
    seed = cfg.seeds.payload
    guard_len = cfg.equalizer.taps + len(cfg.channel.isi_taps)
    training = generate_payload(k * cfg.frame.training_len, _child_seed(seed, 0))
    if payload_bits is None:
        payload = generate_payload(k * cfg.frame.payload_len, _child_seed(seed, 1))
    else:
        payload = np.asarray(payload_bits, dtype=np.uint8).ravel()
        if payload.size != k * cfg.frame.payload_len:
            raise ValueError("payload override has the wrong number of bits")
    guard = generate_payload(k * guard_len, _child_seed(seed, 2))
    symbols = map_bits(np.concatenate([training, payload, guard]), alphabet)
    return Frame(alphabet, training, payload, guard, symbols)


def synchronize(received, reference, max_lag: int) -> int:
    """Lag in ``[0, max_lag]`` maximizing the normalized cross-correlation.

    Ties resolve to the smallest lag.
    """
    x = np.asarray(received, dtype=float).ravel()
    ref = np.asarray(reference, dtype=float).ravel()
    if max_lag < 0 or max_lag >= x.size:
        raise ValueError(f"max_lag must lie in [0, {x.size - 1}]")
    if ref.size == 0 or np.var(ref) == 0.0 or np.var(x) == 0.0:
        raise ValueError("synchronization needs non-constant received and reference signals")
    best_lag, best = 0, -np.inf
    for lag in range(max_lag + 1):
        n = min(ref.size, x.size - lag)
        seg = x[lag:lag + n]
        denom = np.linalg.norm(seg) * np.linalg.norm(ref[:n])
        score = -np.inf if denom == 0 else float(seg @ ref[:n]) / denom
        if score > best:
            best_lag, best = lag, score
    return best_lag


def train(spec: TrainerSpec, received, transmitted, N: int, offset: int,
          workers: int = 1) -> TrainReport:
    """Dispatch one trainer on ``received``/``transmitted`` training data."""
    p = spec.params
    if spec.algorithm in ("adam", "bgd"):
        ts = build_training_set(received, transmitted, N, offset)
        if spec.algorithm == "adam":
            return train_adam(ts, theta=p["theta"], beta1=p["beta1"], beta2=p["beta2"],
                              epsilon=p["epsilon"], iterations=p["iterations"], workers=workers)
        return train_bgd(ts, theta=p["theta"], iterations=p["iterations"], workers=workers)
    if spec.algorithm == "lms":
        return train_lms(received, transmitted, N, mu=p["mu"], passes=p["passes"], offset=offset)
    if spec.algorithm == "rls":
        return train_rls(received, transmitted, N, lam=p["lambda"], delta=p["delta"],
                         offset=offset)
    raise ValueError(f"unknown algorithm {spec.algorithm!r}")


def complexity_for(spec: TrainerSpec, M: int, N: int) -> ComplexityReport | None:
    """Closed-form training cost, or None for plain BGD (no closed form)."""
    if spec.algorithm == "adam":
        return complexity_adam(M, N, spec.params["iterations"])
    if spec.algorithm == "lms":
        return complexity_lms(M * spec.params["passes"], N)
    if spec.algorithm == "rls":
        return complexity_rls(M, N)
    return None


@dataclass
class TrainerResult:
    train: TrainReport
    ber_pre: BerReport
    ber_post: BerReport | None
    alpha: float | None
    equalized: np.ndarray | None = None
    decided: np.ndarray | None = None


@dataclass
class PointResult:
    snr_db: float
    lag: int
    offset: int
    trainers: dict


@dataclass
class ExperimentReport:
    config: dict
    alphabet_scale: float
    frame_layout: dict
    points: list
    complexity: dict
    seed_policy: str = SEED_POLICY
    sweep: dict = field(default_factory=dict)

    def ber_curve(self, label: str) -> list[dict]:
        """Rows for one trainer, sorted by ascending SNR."""
        rows = []
        for p in self.points:
            r = p.trainers[label]
            final = r.ber_post if r.ber_post is not None else r.ber_pre
            rows.append({"snr_db": p.snr_db, "ber_pre_mlsd": r.ber_pre.ber,
                         "ber_post_mlsd": None if r.ber_post is None else r.ber_post.ber,
                         "bit_errors": final.bit_errors, "bits_compared": final.bits_compared})
        return sorted(rows, key=lambda row: row["snr_db"])

    @property
    def labels(self) -> list[str]:
        return [t for t in self.config["trainer"]]

    def to_dict(self) -> dict:
        def trainer_dict(r: TrainerResult) -> dict:
            return {
                "algorithm": r.train.algorithm,
                "final_taps": [float(x) for x in r.train.final_taps],
                "mse_trace": [float(x) for x in r.train.mse_trace],
                "iterations_run": r.train.iterations_run,
                "update_count": r.train.update_count,
                "hyperparameters": r.train.hyperparameters,
                "alpha": r.alpha,
                "ber_pre_mlsd": _ber_dict(r.ber_pre),
                "ber_post_mlsd": None if r.ber_post is None else _ber_dict(r.ber_post),
            }

        return {
            "config": self.config,
            "alphabet_scale": self.alphabet_scale,
            "frame_layout": self.frame_layout,
            "seed_policy": self.seed_policy,
            "sweep": self.sweep,
            "complexity": {label: None if c is None else {
                "algorithm": c.algorithm, "M": c.M, "N": c.N, "I": c.I,
                "operations": c.operations, "run_mode": c.run_mode}
                for label, c in self.complexity.items()},
            "points": [{"snr_db": p.snr_db, "lag": p.lag, "offset": p.offset,
                        "trainers": {k: trainer_dict(v) for k, v in p.trainers.items()}}
                       for p in self.points],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentReport":
        def trainer(t: dict) -> TrainerResult:
            report = TrainReport(t["algorithm"], np.array(t["final_taps"]),
                                 np.array(t["mse_trace"]), t["iterations_run"],
                                 t["update_count"], t["hyperparameters"])
            post = t["ber_post_mlsd"]
            return TrainerResult(report, BerReport(t["ber_pre_mlsd"]["bit_errors"],
                                                   t["ber_pre_mlsd"]["bits_compared"]),
                                 None if post is None else BerReport(post["bit_errors"],
                                                                     post["bits_compared"]),
                                 t["alpha"])

        points = [PointResult(p["snr_db"], p["lag"], p["offset"],
                              {k: trainer(v) for k, v in p["trainers"].items()})
                  for p in d["points"]]
        complexity = {label: None if c is None else ComplexityReport(
            c["algorithm"], c["M"], c["N"], c["operations"], c["I"])
            for label, c in d["complexity"].items()}
        return cls(d["config"], d["alphabet_scale"], d["frame_layout"], points, complexity,
                   d["seed_policy"], d.get("sweep", {}))


def _ber_dict(b: BerReport) -> dict:
    return {"bit_errors": b.bit_errors, "bits_compared": b.bits_compared, "ber": b.ber}


def _decide(frame: Frame, s: np.ndarray, cfg: ExperimentConfig):
    """Post filter + MLSD over the whole aligned estimate; returns (symbols, alpha)."""
    alphabet = frame.alphabet
    alpha = cfg.postproc.alpha
    if cfg.postproc.alpha_grid is not None:
        # calibrate on the known training region only
        n = frame.training_len
        scores = scan_alpha(s[:n], frame.symbols[:n], alphabet, cfg.postproc.alpha_grid)
        alpha = min(scores, key=lambda pair: pair[1])[0]
    return mlsd(post_filter(s, alpha), alpha, alphabet), alpha


def receive(cfg: ExperimentConfig, frame: Frame, snr_db: float) -> np.ndarray:
    """Received samples for ``frame`` at one SNR point (the shared channel realization)."""
    model = ChannelModel(tuple(cfg.channel.isi_taps), snr_db,
                         noise_seed(cfg.seeds.noise, snr_db), cfg.channel.delay)
    # nominal post-ISI power keeps the noise level independent of the payload bits
    power = float(np.mean(frame.alphabet.amplitudes**2) * np.sum(np.square(cfg.channel.isi_taps)))
    return simulate_link(frame.symbols, model, power)


def run_point(cfg: ExperimentConfig, frame: Frame, snr_db: float, workers: int = 1,
              keep_samples: bool = False) -> PointResult:
    """Run every configured trainer at one SNR point on a shared channel realization."""
    N = cfg.equalizer.taps
    tx = frame.symbols
    with _stage("channel"):
        rx = receive(cfg, frame, snr_db)
    with _stage("synchronize"):
        lag = synchronize(rx, tx[:frame.training_len], cfg.equalizer.lag_window)
        offset = lag + cfg.equalizer.cursor
    pay = frame.payload_slice
    truth = frame.payload_bits
    results = {}
    for spec in cfg.trainers:
        M = cfg.training_len(spec)
        with _stage(f"train:{spec.label}"):
            report = train(spec, rx[:M], tx[:M], N, offset, workers)
        with _stage("equalize"):
            padded = np.concatenate([rx, np.zeros(max(0, offset + tx.size - rx.size))])
            s = equalize(padded, report.final_taps)[offset:offset + tx.size]
        with _stage("metrics"):
            ber_pre = ber(truth, demap_symbols(s[pay], frame.alphabet))
        decided, alpha, ber_post = None, None, None
        if cfg.postproc.mlsd:
            with _stage("postproc"):
                decided, alpha = _decide(frame, s, cfg)
            with _stage("metrics"):
                ber_post = ber(truth, demap_symbols(decided[pay], frame.alphabet))
        results[spec.label] = TrainerResult(report, ber_pre, ber_post, alpha,
                                            s if keep_samples else None,
                                            decided if keep_samples else None)
    return PointResult(float(snr_db), lag, offset, results)


def run_experiment(cfg: ExperimentConfig, workers: int = 1,
                   keep_samples: bool = False) -> ExperimentReport:
    """Execute the full chain for every trainer at every SNR point.

    Points may run concurrently (``workers > 1``); the report lists them in
    declared order and its content does not depend on ``workers``.
    """
    with _stage("frame"):
        frame = build_frame(cfg)
    with _stage("complexity"):
        complexity = {t.label: complexity_for(t, cfg.training_len(t), cfg.equalizer.taps)
                      for t in cfg.trainers}

    def point(snr):
        return run_point(cfg, frame, snr, 1, keep_samples)

    if workers > 1 and len(cfg.snr_db) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            points = list(pool.map(point, cfg.snr_db))
    else:
        points = [run_point(cfg, frame, snr, workers, keep_samples) for snr in cfg.snr_db]
    layout = {"training_len": frame.training_len,
              "payload_len": cfg.frame.payload_len,
              "guard_len": frame.guard_bits.size // frame.alphabet.bits_per_symbol,
              "bits_per_symbol": frame.alphabet.bits_per_symbol}
    return ExperimentReport(cfg.to_dict(), frame.alphabet.scale, layout, points, complexity)


# --- sweeps ---------------------------------------------------------------------

SWEEP_SPECIAL = ("trainer", "snr_db")


def sweep_config(base: ExperimentConfig, variable: str, value) -> ExperimentConfig:
    """Copy of ``base`` with one parameter replaced.

    ``variable`` is ``trainer`` (value: algorithm name), ``snr_db`` (single
    point), or a dotted config key such as ``frame.training_len`` or
    ``trainer.adam.theta``.
    """
    d = base.to_dict()
    if variable == "trainer":
        if value not in TRAINER_DEFAULTS:
            raise ValueError(f"unknown trainer algorithm {value!r}")
        existing = [t for t in base.trainers if t.label == value or t.algorithm == value]
        if existing:
            entry = copy.deepcopy(d["trainer"][existing[0].label])
            entry["algorithm"] = value
        else:
            entry = {"algorithm": value}
        d["trainer"] = {value: entry}
    elif variable == "snr_db":
        d["sweep"]["snr_db"] = [value]
    else:
        node = d
        *parents, leaf = variable.split(".")
        for key in parents:
            if not isinstance(node, dict) or key not in node:
                raise ValueError(f"unknown sweep parameter {variable!r}")
            node = node[key]
        known = isinstance(node, dict) and (leaf in node or _is_optional_key(parents, leaf))
        if not known:
            raise ValueError(f"unknown sweep parameter {variable!r}")
        node[leaf] = value
    try:
        return ExperimentConfig.from_dict(d)
    except ConfigError as exc:
        raise ValueError(f"sweep value {value!r} for {variable}: {exc}") from exc


def _is_optional_key(parents: list, leaf: str) -> bool:
    optional = {("equalizer",): {"decision_delay", "max_lag"},
                ("postproc",): {"alpha_grid"}}
    if len(parents) == 2 and parents[0] == "trainer":
        return leaf == "training_len"
    return leaf in optional.get(tuple(parents), set())


def run_sweep(base: ExperimentConfig, variable: str, values, workers: int = 1,
              keep_samples: bool = False) -> list[ExperimentReport]:
    """One report per value, all sharing the base seeds."""
    configs = [sweep_config(base, variable, v) for v in values]
    reports = []
    for value, cfg in zip(values, configs):
        report = run_experiment(cfg, workers, keep_samples)
        report.sweep = {"parameter": variable, "value": value}
        reports.append(report)
    return reports
