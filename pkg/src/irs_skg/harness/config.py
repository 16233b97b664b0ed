"""Experiment configuration: presets, YAML files and CLI overrides."""

import hashlib
import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any

import yaml

from irs_skg.channel import ArrayGeometry, PathStats, Topology
from irs_skg.errors import ConfigError
from irs_skg.infotheory import InnerMode, LeakageSettings
from irs_skg.sampling import PhaseAlphabet, PhaseKind
from irs_skg.schemes import FeatureMode

PRESETS_PATH = Path(__file__).parent / "presets.yaml"
DEFAULT_PRESET = "desk"

SNR_DEFINITION = (
    "eps^2 = C * mean(xi_1^2) * 10^(-snr_db/10) / 2, per real/imaginary part; "
    "mean(xi_1^2) is the mean squared largest singular value of H_AB over the calibration draws"
)
SAMPLE_DEFINITION = "one sample = one coherence round"


@dataclass
class ExperimentConfig:
    """Every knob of a run. Field names are the keys of the YAML config file."""

    n_a: int = 4
    n_b: int = 4
    n_e: int = 4
    irs_x: int = 2
    irs_y: int = 4
    eve_counts: list[int] = field(default_factory=lambda: [1, 4, 16])
    probe_length: int = 50
    trace_probe_length: int = 100  # probe length of the validation sigma-pair trace
    probe_lengths: list[int] = field(default_factory=lambda: [25, 50, 100, 200])
    row_power: float = 1.0
    snr_db: list[float] = field(default_factory=lambda: [0.0, 10.0, 20.0])
    rounds: int = 500
    mc_trials: int = 200
    bits_per_sample: int = 2
    guard_ratio: float = 0.1
    phase_alphabet: str = "continuous"
    phase_levels: int = 8
    seed: int = 42
    min_paths: int = 1
    max_paths: int = 10
    path_loss: float = 1.0
    pilot: str = "identity"  # identity | unitary
    pilot_length: int | None = None  # defaults to the antenna count
    pilot_feature: str = "rss"
    project_unit_modulus: bool = False
    top_k: int = 1
    knn_k: int = 3
    leakage_levels: int = 2
    leakage_mode: str = "analytic"
    leakage_mc_samples: int = 64
    leakage_inner_samples: int = 32
    max_hypotheses: int = 4096
    calibration_draws: int = 100
    validation_draws: int = 10_000
    validation_snr_db: float = 20.0

    def __post_init__(self):
        self.eve_counts = [int(m) for m in _as_list(self.eve_counts, "eve_counts")]
        self.probe_lengths = [int(d) for d in _as_list(self.probe_lengths, "probe_lengths")]
        self.snr_db = [float(s) for s in _as_list(self.snr_db, "snr_db")]

    @property
    def n_r(self) -> int:
        return self.irs_x * self.irs_y

    @property
    def max_eves(self) -> int:
        return max(self.eve_counts)

    def validate(self) -> "ExperimentConfig":
        """Raise ConfigError on the first invalid value; return self otherwise."""
        counts = {
            "n_a": self.n_a,
            "n_b": self.n_b,
            "n_e": self.n_e,
            "irs_x": self.irs_x,
            "irs_y": self.irs_y,
            "probe_length": self.probe_length,
            "trace_probe_length": self.trace_probe_length,
            "rounds": self.rounds,
            "mc_trials": self.mc_trials,
            "bits_per_sample": self.bits_per_sample,
            "phase_levels": self.phase_levels,
            "min_paths": self.min_paths,
            "top_k": self.top_k,
            "knn_k": self.knn_k,
            "leakage_levels": self.leakage_levels,
            "leakage_inner_samples": self.leakage_inner_samples,
            "calibration_draws": self.calibration_draws,
        }
        for name, value in counts.items():
            if int(value) < 1:
                raise ConfigError(f"{name} must be at least 1, got {value}")
        if self.rounds <= 10 * self.knn_k:
            raise ConfigError(f"rounds must exceed 10 * knn_k = {10 * self.knn_k}, got {self.rounds}")
        if not self.snr_db:
            raise ConfigError("snr_db must list at least one SNR")
        if not self.eve_counts or min(self.eve_counts) < 1:
            raise ConfigError(f"eve_counts must be a non-empty list of counts >= 1, got {self.eve_counts}")
        if not self.probe_lengths or min(self.probe_lengths) < 1:
            raise ConfigError(f"probe_lengths must be a non-empty list of counts >= 1, got {self.probe_lengths}")
        if self.max_paths < self.min_paths:
            raise ConfigError(f"max_paths ({self.max_paths}) is below min_paths ({self.min_paths})")
        if self.row_power <= 0 or self.path_loss <= 0:
            raise ConfigError("row_power and path_loss must be positive")
        if not 0.0 <= self.guard_ratio < 0.5:
            raise ConfigError(f"guard_ratio must lie in [0, 0.5), got {self.guard_ratio}")
        if self.leakage_mc_samples < 2 or self.max_hypotheses < 2:
            raise ConfigError("leakage_mc_samples and max_hypotheses must be at least 2")
        if self.validation_draws < 2:
            raise ConfigError(f"validation_draws must be at least 2, got {self.validation_draws}")
        if self.pilot not in ("identity", "unitary"):
            raise ConfigError(f"pilot must be 'identity' or 'unitary', got {self.pilot!r}")
        if self.pilot_length is not None and self.pilot_length < max(self.n_a, self.n_b):
            raise ConfigError(f"pilot_length must be at least {max(self.n_a, self.n_b)}, got {self.pilot_length}")
        if not 0 <= self.seed < 2**64:
            raise ConfigError(f"seed must fit in 64 unsigned bits, got {self.seed}")
        phase_kind = _enum_value(PhaseKind, self.phase_alphabet, "phase_alphabet")
        if phase_kind is PhaseKind.DISCRETE and self.phase_levels < 2:
            raise ConfigError(f"a discrete phase alphabet needs phase_levels >= 2, got {self.phase_levels}")
        _enum_value(FeatureMode, self.pilot_feature, "pilot_feature")
        _enum_value(InnerMode, self.leakage_mode, "leakage_mode")
        return self

    # Derived objects

    def topology(self, n_eves: int | None = None) -> Topology:
        return Topology(
            alice=ArrayGeometry.ula(self.n_a),
            bob=ArrayGeometry.ula(self.n_b),
            eve=ArrayGeometry.ula(self.n_e),
            irs=ArrayGeometry.upa(self.irs_x, self.irs_y),
            n_eves=self.max_eves if n_eves is None else n_eves,
        )

    def path_stats(self) -> PathStats:
        return PathStats(min_paths=self.min_paths, max_paths=self.max_paths, path_loss=self.path_loss)

    def alphabet(self) -> PhaseAlphabet:
        if PhaseKind(self.phase_alphabet) is PhaseKind.DISCRETE:
            return PhaseAlphabet.discrete(self.phase_levels)
        return PhaseAlphabet.continuous()

    def leakage_settings(self) -> LeakageSettings:
        return LeakageSettings(
            levels=self.leakage_levels,
            mc_samples=self.leakage_mc_samples,
            inner_mode=InnerMode(self.leakage_mode),
            inner_samples=self.leakage_inner_samples,
            max_hypotheses=self.max_hypotheses,
        )

    # Serialization

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict[str, Any] | None) -> "ExperimentConfig":
        data = dict(data or {})
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        try:
            return cls(**data)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid config: {exc}") from exc


def _as_list(value, name: str) -> list:
    if isinstance(value, (list, tuple)):
        return list(value)
    if isinstance(value, (int, float)):
        return [value]
    raise ConfigError(f"{name} must be a list, got {type(value).__name__}")


def _enum_value(enum_cls, value, name: str):
    try:
        return enum_cls(value)
    except ValueError:
        choices = ", ".join(m.value for m in enum_cls)
        raise ConfigError(f"{name} must be one of {choices}; got {value!r}") from None


def load_presets(path: Path = PRESETS_PATH) -> dict[str, dict[str, Any]]:
    with open(path) as f:
        data = yaml.safe_load(f) or {}
    return data.get("presets", {})


def load_config(path: Path) -> dict[str, Any]:
    """Read a flat YAML key-value config file."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    with open(path) as f:
        try:
            data = yaml.safe_load(f)
        except yaml.YAMLError as exc:
            raise ConfigError(f"could not parse {path}: {exc}") from exc
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError(f"{path} must hold a key-value mapping, got {type(data).__name__}")
    return data


def resolve_config(
    preset: str | None = DEFAULT_PRESET,
    config_path: Path | None = None,
    overrides: dict[str, Any] | None = None,
) -> ExperimentConfig:
    """Merge preset < config file < explicit overrides and validate the result.

    ``None`` values in ``overrides`` mean "not given" and are skipped.
    """
    merged: dict[str, Any] = {}
    if preset:
        presets = load_presets()
        if preset not in presets:
            raise ConfigError(f"unknown preset {preset!r}; available: {', '.join(sorted(presets))}")
        merged.update(presets[preset])
    if config_path is not None:
        merged.update(load_config(config_path))
    merged.update({k: v for k, v in (overrides or {}).items() if v is not None})
    return ExperimentConfig.from_dict(merged).validate()


def config_hash(config: ExperimentConfig) -> str:
    """SHA-256 of the canonical JSON form of the config."""
    canonical = json.dumps(config.to_dict(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()
