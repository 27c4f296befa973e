"""Experiment configuration: dataclasses plus a strict TOML loader.

Every section and key is checked; unknown keys are errors so a typo cannot
silently fall back to a default. ``to_dict``/``from_dict`` round-trip.

Example::

    [alphabet]
    levels = 8

    [frame]
    training_len = 300
    payload_len = 65536

    [trainer.adam]
    algorithm = "adam"
    theta = 0.05

    [sweep]
    snr_db = [20, 24, 28]
"""
from __future__ import annotations

import copy
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from adamffe.pam import SUPPORTED_LEVELS

TRAINER_DEFAULTS = {
    "adam": {"theta": 0.01, "beta1": 0.9, "beta2": 0.999, "epsilon": 1e-8, "iterations": 120},
    "bgd": {"theta": 0.01, "iterations": 120},
    "lms": {"mu": 1e-3, "passes": 1},
    "rls": {"lambda": 0.999, "delta": 100.0},
}
INT_PARAMS = {"iterations", "passes"}


class ConfigError(ValueError):
    """Malformed or inconsistent configuration; ``field`` is the dotted key."""

    def __init__(self, message: str, field: str | None = None, line: int | None = None,
                 source: str | None = None):
        self.reason = message
        self.field = field
        self.line = line
        self.source = source
        where = ""
        if source:
            where += f"{source}:"
        if line:
            where += f"{line}:"
        if field:
            where += f" {field}:" if where else f"{field}:"
        super().__init__(f"{where} {message}".strip())


@dataclass
class AlphabetSpec:
    levels: int = 8
    normalize: bool = True


@dataclass
class FrameSpec:
    training_len: int = 300
    payload_len: int = 65536


@dataclass
class ChannelSpec:
    isi_taps: list = field(default_factory=lambda: [0.2, 1.0, 0.3])
    delay: int = 0


@dataclass
class EqualizerSpec:
    taps: int = 21
    decision_delay: int | None = None
    max_lag: int | None = None

    @property
    def cursor(self) -> int:
        return self.taps // 2 if self.decision_delay is None else self.decision_delay

    @property
    def lag_window(self) -> int:
        return self.taps - 1 - self.cursor if self.max_lag is None else self.max_lag


@dataclass
class TrainerSpec:
    label: str
    algorithm: str
    training_len: int | None = None
    params: dict = field(default_factory=dict)


@dataclass
class PostprocSpec:
    alpha: float = 0.5
    alpha_grid: list | None = None
    mlsd: bool = True


@dataclass
class SeedSpec:
    payload: int = 1
    noise: int = 2


@dataclass
class OutputSpec:
    equalized: bool = False


@dataclass
class ExperimentConfig:
    alphabet: AlphabetSpec = field(default_factory=AlphabetSpec)
    frame: FrameSpec = field(default_factory=FrameSpec)
    channel: ChannelSpec = field(default_factory=ChannelSpec)
    equalizer: EqualizerSpec = field(default_factory=EqualizerSpec)
    trainers: list = field(default_factory=lambda: [TrainerSpec("adam", "adam", None,
                                                                dict(TRAINER_DEFAULTS["adam"]))])
    postproc: PostprocSpec = field(default_factory=PostprocSpec)
    snr_db: list = field(default_factory=lambda: [20.0, 24.0, 28.0])
    seeds: SeedSpec = field(default_factory=SeedSpec)
    output: OutputSpec = field(default_factory=OutputSpec)

    def training_len(self, trainer: TrainerSpec) -> int:
        return self.frame.training_len if trainer.training_len is None else trainer.training_len

    def to_dict(self) -> dict:
        d = {
            "alphabet": {"levels": self.alphabet.levels, "normalize": self.alphabet.normalize},
            "frame": {"training_len": self.frame.training_len,
                      "payload_len": self.frame.payload_len},
            "channel": {"isi_taps": list(self.channel.isi_taps), "delay": self.channel.delay},
            "equalizer": {"taps": self.equalizer.taps},
            "trainer": {},
            "postproc": {"alpha": self.postproc.alpha, "mlsd": self.postproc.mlsd},
            "sweep": {"snr_db": list(self.snr_db)},
            "seeds": {"payload": self.seeds.payload, "noise": self.seeds.noise},
            "output": {"equalized": self.output.equalized},
        }
        if self.equalizer.decision_delay is not None:
            d["equalizer"]["decision_delay"] = self.equalizer.decision_delay
        if self.equalizer.max_lag is not None:
            d["equalizer"]["max_lag"] = self.equalizer.max_lag
        if self.postproc.alpha_grid is not None:
            d["postproc"]["alpha_grid"] = list(self.postproc.alpha_grid)
        for t in self.trainers:
            entry = {"algorithm": t.algorithm, **t.params}
            if t.training_len is not None:
                entry["training_len"] = t.training_len
            d["trainer"][t.label] = entry
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        return _parse(copy.deepcopy(data))


# --- validation helpers -------------------------------------------------------

def _take(section: dict, key: str, path: str, kind, default, check=None):
    if key not in section:
        return default
    value = section.pop(key)
    name = f"{path}.{key}"
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"expected an integer, got {value!r}", name)
    elif kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"expected a number, got {value!r}", name)
        value = float(value)
        if not math.isfinite(value):
            raise ConfigError("must be finite", name)
    elif kind is bool:
        if not isinstance(value, bool):
            raise ConfigError(f"expected true/false, got {value!r}", name)
    elif kind is str:
        if not isinstance(value, str):
            raise ConfigError(f"expected a string, got {value!r}", name)
    elif kind is list:
        if not isinstance(value, list) or not value or any(
                isinstance(v, bool) or not isinstance(v, (int, float)) for v in value):
            raise ConfigError(f"expected a non-empty list of numbers, got {value!r}", name)
        value = [float(v) for v in value]
        if not all(math.isfinite(v) for v in value):
            raise ConfigError("entries must be finite", name)
    if check is not None:
        problem = check(value)
        if problem:
            raise ConfigError(problem, name)
    return value


def _section(data: dict, name: str) -> dict:
    section = data.pop(name, {})
    if not isinstance(section, dict):
        raise ConfigError("expected a table", name)
    return section


def _no_leftovers(section: dict, path: str):
    for key in section:
        raise ConfigError("unknown key", f"{path}.{key}" if path else key)


def _positive(v):
    return None if v > 0 else "must be positive"


def _non_negative(v):
    return None if v >= 0 else "must be >= 0"


def _parse_trainer(label: str, raw) -> TrainerSpec:
    path = f"trainer.{label}"
    if not isinstance(raw, dict):
        raise ConfigError("expected a table", path)
    algorithm = _take(raw, "algorithm", path, str, label)
    if algorithm not in TRAINER_DEFAULTS:
        raise ConfigError(f"unknown algorithm {algorithm!r}; expected one of "
                          f"{sorted(TRAINER_DEFAULTS)}", f"{path}.algorithm")
    training_len = _take(raw, "training_len", path, int, None, _positive)
    params = {}
    for key, default in TRAINER_DEFAULTS[algorithm].items():
        params[key] = _take(raw, key, path, int if key in INT_PARAMS else float, default)
    _no_leftovers(raw, path)
    checks = {
        "theta": lambda v: None if 0 < v < 1 else "must lie in (0, 1)",
        "beta1": lambda v: None if 0 <= v < 1 else "must lie in [0, 1)",
        "beta2": lambda v: None if 0 <= v < 1 else "must lie in [0, 1)",
        "epsilon": _positive,
        "iterations": lambda v: None if v >= 1 else "must be >= 1",
        "passes": lambda v: None if v >= 1 else "must be >= 1",
        "mu": _non_negative,
        "lambda": lambda v: None if 0 < v <= 1 else "must lie in (0, 1]",
        "delta": _positive,
    }
    for key, value in params.items():
        problem = checks[key](value)
        if problem:
            raise ConfigError(problem, f"{path}.{key}")
    return TrainerSpec(label, algorithm, training_len, params)


def _parse(data: dict) -> ExperimentConfig:
    if not isinstance(data, dict):
        raise ConfigError("configuration must be a table")
    s = _section(data, "alphabet")
    alphabet = AlphabetSpec(
        _take(s, "levels", "alphabet", int, 8,
              lambda v: None if v in SUPPORTED_LEVELS else f"must be one of {SUPPORTED_LEVELS}"),
        _take(s, "normalize", "alphabet", bool, True))
    _no_leftovers(s, "alphabet")

    s = _section(data, "frame")
    frame = FrameSpec(_take(s, "training_len", "frame", int, 300, _positive),
                      _take(s, "payload_len", "frame", int, 65536, _positive))
    _no_leftovers(s, "frame")

    s = _section(data, "channel")
    channel = ChannelSpec(
        _take(s, "isi_taps", "channel", list, [0.2, 1.0, 0.3],
              lambda v: None if any(v) else "needs at least one nonzero tap"),
        _take(s, "delay", "channel", int, 0, _non_negative))
    _no_leftovers(s, "channel")

    s = _section(data, "equalizer")
    equalizer = EqualizerSpec(
        _take(s, "taps", "equalizer", int, 21, _positive),
        _take(s, "decision_delay", "equalizer", int, None, _non_negative),
        _take(s, "max_lag", "equalizer", int, None, _non_negative))
    _no_leftovers(s, "equalizer")

    s = _section(data, "trainer")
    if not s:
        raise ConfigError("at least one [trainer.<label>] section is required", "trainer")
    trainers = [_parse_trainer(label, raw) for label, raw in s.items()]

    s = _section(data, "postproc")
    grid = _take(s, "alpha_grid", "postproc", list, None)
    postproc = PostprocSpec(_take(s, "alpha", "postproc", float, 0.5), grid,
                            _take(s, "mlsd", "postproc", bool, True))
    _no_leftovers(s, "postproc")

    s = _section(data, "sweep")
    snr = _take(s, "snr_db", "sweep", list, [20.0, 24.0, 28.0])
    _no_leftovers(s, "sweep")

    s = _section(data, "seeds")
    seeds = SeedSpec(_take(s, "payload", "seeds", int, 1, _non_negative),
                     _take(s, "noise", "seeds", int, 2, _non_negative))
    _no_leftovers(s, "seeds")

    s = _section(data, "output")
    output = OutputSpec(_take(s, "equalized", "output", bool, False))
    _no_leftovers(s, "output")

    _no_leftovers(data, "")
    cfg = ExperimentConfig(alphabet, frame, channel, equalizer, trainers, postproc, snr,
                           seeds, output)
    _cross_check(cfg)
    return cfg


def _cross_check(cfg: ExperimentConfig):
    N = cfg.equalizer.taps
    if cfg.equalizer.cursor > N - 1:
        raise ConfigError(f"must be <= taps - 1 = {N - 1}", "equalizer.decision_delay")
    if cfg.equalizer.lag_window + cfg.equalizer.cursor > N - 1:
        raise ConfigError(f"max_lag + decision delay must be <= taps - 1 = {N - 1}",
                          "equalizer.max_lag")
    if cfg.equalizer.lag_window >= cfg.frame.training_len:
        raise ConfigError("must be smaller than frame.training_len", "equalizer.max_lag")
    for t in cfg.trainers:
        M = cfg.training_len(t)
        if M <= N:
            raise ConfigError(f"training length {M} must exceed equalizer.taps = {N}",
                              f"trainer.{t.label}.training_len")
        if M > cfg.frame.training_len:
            raise ConfigError(f"training length {M} exceeds frame.training_len = "
                              f"{cfg.frame.training_len}", f"trainer.{t.label}.training_len")


# --- file loading ---------------------------------------------------------------

def _locate(text: str, dotted: str | None) -> int | None:
    """Best-effort line number of ``dotted`` (``section.key``) in TOML text."""
    if not dotted:
        return None
    parts = dotted.split(".")
    key = parts[-1]
    section = ".".join(parts[:-1])
    current = ""
    header = re.compile(r"^\s*\[\s*([^\]]+?)\s*\]\s*(#.*)?$")
    assign = re.compile(r"^\s*\"?" + re.escape(key) + r"\"?\s*=")
    for lineno, line in enumerate(text.splitlines(), 1):
        m = header.match(line)
        if m:
            current = m.group(1).replace('"', "").replace(" ", "")
            if current == dotted:
                return lineno
            continue
        if current == section and assign.match(line):
            return lineno
    return None


def load_config(path) -> ExperimentConfig:
    """Read and validate a TOML experiment file.

    Raises
    ------
    ConfigError
        With file, line (when locatable) and field in the message.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror or exc}", source=str(path)) from exc
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"TOML syntax error: {exc}", source=str(path)) from exc
    try:
        return ExperimentConfig.from_dict(data)
    except ConfigError as exc:
        raise ConfigError(exc.reason, exc.field, _locate(text, exc.field), str(path)) from exc


def dumps_toml(cfg: ExperimentConfig) -> str:
    """Render a config back to TOML text (round-trips through :func:`load_config`)."""
    d = cfg.to_dict()
    lines = []

    def fmt(v):
        if isinstance(v, bool):
            return "true" if v else "false"
        if isinstance(v, str):
            return '"' + v.replace("\\", "\\\\").replace('"', '\\"') + '"'
        if isinstance(v, list):
            return "[" + ", ".join(fmt(x) for x in v) + "]"
        return repr(v)

    for name, section in d.items():
        if name == "trainer":
            for label, entry in section.items():
                lines.append(f'[trainer."{label}"]')
                lines += [f"{k} = {fmt(v)}" for k, v in entry.items()]
                lines.append("")
            continue
        lines.append(f"[{name}]")
        lines += [f"{k} = {fmt(v)}" for k, v in section.items()]
        lines.append("")
    return "\n".join(lines)
