"""Small helpers shared by the test modules."""

import numpy as np

from irs_skg.harness.config import ExperimentConfig


def random_complex(gen: np.random.Generator, *shape: int) -> np.ndarray:
    return gen.standard_normal(shape) + 1j * gen.standard_normal(shape)


def haar_unitary(gen: np.random.Generator, n: int) -> np.ndarray:
    q, r = np.linalg.qr(random_complex(gen, n, n))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def tiny_config() -> ExperimentConfig:
    """Two-antenna terminals, a two-element IRS and just enough rounds for the kNN estimator."""
    return ExperimentConfig(
        n_a=2,
        n_b=2,
        n_e=2,
        irs_x=1,
        irs_y=2,
        eve_counts=[1, 2],
        probe_length=20,
        trace_probe_length=20,
        probe_lengths=[10, 20],
        snr_db=[10.0],
        rounds=60,
        mc_trials=4,
        calibration_draws=5,
        leakage_mc_samples=8,
        validation_draws=500,
        seed=7,
    ).validate()
