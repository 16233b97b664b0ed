"""Experiment runner.

Orchestrates every sweep the CLI exposes:
- Simulation (RGM singular-value pairs per SNR, plus the per-round trace)
- Attack (colluded-Eve NRMSE over SNR x Eve count)
- SKR (key MI, leakage bound and secret key rate for RGM or the pilot baseline)
- Validation (closed-form moments against Monte Carlo, sigma-pair trace, SKR versus D)

All randomness hangs off ``RngStream(config.seed)`` through integer keys, so a
report depends only on the config and never on the thread count.
"""

import logging
import math

import numpy as np
import pandas as pd
from scipy import stats

from irs_skg import __version__, linalg
from irs_skg.attack import ColludedEveAttack
from irs_skg.channel import ChannelSet, Party, build_channel_set, cascaded_channel
from irs_skg.errors import ConfigError, DegenerateInputError, NumericalError, QuadratureError
from irs_skg.harness import ExperimentReport
from irs_skg.harness.config import SAMPLE_DEFINITION, SNR_DEFINITION, ExperimentConfig, config_hash
from irs_skg.infotheory import leakage_upper_bound, mi_knn, mi_mixture_numeric, skr_lower_bound
from irs_skg.sampling import RngLike, RngStream, Role, VarianceProfile, as_generator, complex_normal
from irs_skg.schemes import (
    FeatureMode,
    PilotMatrix,
    PilotScheme,
    RgmParams,
    key_disagreement_rate,
    reconcile,
    run_protocol,
    svd_multiplications,
)
from irs_skg.theory import moment_bounds, noiseless_moments, noisy_moments
from irs_skg.workers import parallel_map

logger = logging.getLogger(__name__)

SCHEMES = ("rgm", "pilot")
COMMANDS = ("simulate", "attack", "skr", "validate")

# Stream keys under Role.TRIAL that never collide with deployment trial indices
VALIDATION_TRIAL = 2**32
DRAW_CHUNK = 500
BOUND_PROFILES = 100
MIXTURE_PHASES = 64
DOMINANT_SINGULAR = 3.0


def snr_to_noise_var(snr_db: float, row_power: float, mean_xi_sq: float) -> float:
    """Per-part noise variance ``eps^2 = C xi^2 10^(-snr/10) / 2``."""
    return row_power * mean_xi_sq * 10 ** (-snr_db / 10) / 2


def sweep_key(**parts) -> str:
    """``snr=10|M=4`` style key; insertion order is kept."""
    return "|".join(f"{name}={value:g}" if isinstance(value, float) else f"{name}={value}" for name, value in parts.items())


def _haar_unitary(n: int, gen: np.random.Generator) -> np.ndarray:
    g = gen.standard_normal((n, n)) + 1j * gen.standard_normal((n, n))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def dominant_mode_channel(n_rx: int, n_tx: int, rng: RngLike) -> np.ndarray:
    """Random-basis channel whose largest singular value clearly dominates the rest.

    The closed-form moments follow the dominant mode only, so the Monte-Carlo
    comparisons run on a channel where that mode is well separated.
    """
    gen = as_generator(rng)
    k = min(n_rx, n_tx)
    xi = np.concatenate([[DOMINANT_SINGULAR], np.linspace(0.5, 0.1, k - 1)])
    u = _haar_unitary(n_rx, gen)[:, :k]
    v = _haar_unitary(n_tx, gen)[:, :k]
    return (u * xi) @ v.conj().T


def _mean_and_stderr(values: np.ndarray) -> tuple[float, float]:
    return float(np.mean(values)), float(np.std(values, ddof=1) / np.sqrt(values.size))


class ExperimentRunner:
    """Runs sweeps for one validated config."""

    def __init__(self, config: ExperimentConfig, threads: int = 1):
        """Initialize runner.

        Args:
            config: Experiment configuration; validated here
            threads: Worker threads for Monte-Carlo rounds and trials
        """
        self.config = config.validate()
        self.threads = max(1, int(threads))
        self.root = RngStream(config.seed)
        self._mean_xi_sq: float | None = None
        self._deployments: list[ChannelSet] = []

    # Shared building blocks

    def deployments(self, count: int) -> list[ChannelSet]:
        """The first ``count`` random deployments, each carrying ``max(eve_counts)`` Eves."""
        if len(self._deployments) < count:
            cfg = self.config
            topology, path_stats, alphabet = cfg.topology(), cfg.path_stats(), cfg.alphabet()

            def build(trial: int) -> ChannelSet:
                return build_channel_set(topology, path_stats, alphabet, self.root.derive(Role.TRIAL, trial))

            self._deployments += parallel_map(build, range(len(self._deployments), count), self.threads)
        return self._deployments[:count]

    def calibrate(self) -> float:
        """Mean ``xi_1^2`` of ``H_AB`` over ``calibration_draws`` deployments with random IRS phase."""
        if self._mean_xi_sq is None:
            cfg = self.config
            stream = self.root.derive(Role.CALIBRATION)
            topology, path_stats, alphabet = cfg.topology(n_eves=0), cfg.path_stats(), cfg.alphabet()

            def draw(i: int) -> float:
                channels = build_channel_set(topology, path_stats, alphabet, stream.derive(i))
                h_ab, _ = cascaded_channel(channels)
                return linalg.largest_singular(h_ab) ** 2

            values = parallel_map(draw, range(cfg.calibration_draws), self.threads)
            self._mean_xi_sq = float(np.mean(values))
            logger.info("calibrated mean xi_1^2 = %.6g over %d draws", self._mean_xi_sq, cfg.calibration_draws)
        return self._mean_xi_sq

    def snr_to_noise_var(self, snr_db: float) -> float:
        return snr_to_noise_var(snr_db, self.config.row_power, self.calibrate())

    def rgm_params(self, noise_var: float, probe_length: int | None = None) -> RgmParams:
        cfg = self.config
        return RgmParams.uniform(
            cfg.n_a,
            cfg.n_b,
            probe_length=probe_length or cfg.probe_length,
            row_power=cfg.row_power,
            alphabet=cfg.alphabet(),
            noise_var=noise_var,
            top_k=cfg.top_k,
        )

    def pilots(self) -> tuple[PilotMatrix, PilotMatrix]:
        """Public pilots of Alice and Bob, fixed for the whole run."""
        cfg = self.config
        if cfg.pilot == "identity":
            return PilotMatrix.identity(cfg.n_a, cfg.row_power), PilotMatrix.identity(cfg.n_b, cfg.row_power)
        length = cfg.pilot_length or max(cfg.n_a, cfg.n_b)
        return (
            PilotMatrix.random_unitary(cfg.n_a, length, self.root.derive(Role.PILOT, 0), cfg.row_power),
            PilotMatrix.random_unitary(cfg.n_b, length, self.root.derive(Role.PILOT, 1), cfg.row_power),
        )

    def new_report(self, name: str) -> ExperimentReport:
        cfg = self.config
        return ExperimentReport(
            name=name,
            config=cfg.to_dict(),
            metadata={
                "version": __version__,
                "config_hash": config_hash(cfg),
                "snr_definition": SNR_DEFINITION,
                "sample_definition": SAMPLE_DEFINITION,
                "mean_xi_sq": self.calibrate(),
            },
        )

    def _key_agreement(self, report: ExperimentReport, key: str, a: np.ndarray, b: np.ndarray, seed: str) -> None:
        cfg = self.config
        try:
            key_a, key_b = reconcile(a, b, cfg.bits_per_sample, cfg.guard_ratio)
            kdr = key_disagreement_rate(key_a, key_b)
        except DegenerateInputError as exc:
            logger.warning("no key material at %s: %s", key, exc)
            report.add(key, "kdr", float("nan"), seed=seed)
            return
        report.add(key, "kdr", kdr, n=key_a.bits.size, seed=seed)
        report.add(key, "kept_fraction", len(key_a.kept_rounds) / a.size, n=a.size, seed=seed)

    # Sweeps

    def run_simulation(self) -> tuple[ExperimentReport, pd.DataFrame]:
        """RGM rounds on deployment 0 at every SNR; returns the report and the per-round trace."""
        cfg = self.config
        report = self.new_report("simulate")
        channels = self.deployments(1)[0]
        traces = []
        for i, snr in enumerate(cfg.snr_db):
            noise_var = self.snr_to_noise_var(snr)
            stream = self.root.derive(Role.ROUND, i)
            observations = run_protocol(channels, cfg.rounds, self.rgm_params(noise_var), stream, self.threads)
            sigma_a = np.array([o.sigma_a for o in observations])
            sigma_b = np.array([o.sigma_b for o in observations])
            key = sweep_key(snr=snr)
            n = sigma_a.size

            report.add(key, "noise_var", noise_var, seed=stream.lineage)
            pearson = float(stats.pearsonr(sigma_a, sigma_b)[0])
            report.add(key, "pearson", pearson, n=n, seed=stream.lineage)
            mean_a, se_a = _mean_and_stderr(sigma_a)
            mean_b, se_b = _mean_and_stderr(sigma_b)
            report.add(key, "sigma_a_mean", mean_a, se_a, n, stream.lineage)
            report.add(key, "sigma_b_mean", mean_b, se_b, n, stream.lineage)
            self._key_agreement(report, key, sigma_a, sigma_b, stream.lineage)

            traces.append(
                pd.DataFrame(
                    {
                        "round_index": [o.round_index for o in observations],
                        "sigma_a": sigma_a,
                        "sigma_b": sigma_b,
                        "snr_db": snr,
                        "seed": [o.lineage for o in observations],
                    }
                )
            )
            logger.info("simulate snr=%g dB: pearson %.4f", snr, pearson)
        return report, pd.concat(traces, ignore_index=True)

    def run_nrmse_sweep(self) -> ExperimentReport:
        """Median and IQR of the colluded attack's NRMSE for every (SNR, M) pair.

        Every (SNR, M) pair reuses the same ``mc_trials`` deployments and, for
        the Eves they share, the same noise draws.
        """
        cfg = self.config
        report = self.new_report("attack")
        pilot_a, _ = self.pilots()
        attack = ColludedEveAttack(pilot_a, project=cfg.project_unit_modulus)
        deployments = self.deployments(cfg.mc_trials)

        for i, snr in enumerate(cfg.snr_db):
            noise_var = self.snr_to_noise_var(snr)
            for m in cfg.eve_counts:

                def trial(t: int):
                    return attack.run(deployments[t].with_eves(m), noise_var, self.root.derive(Role.NOISE_E, t, i))

                results = parallel_map(trial, range(cfg.mc_trials), self.threads)
                errors = np.array([r.nrmse for r in results])
                q25, median, q75 = np.quantile(errors, [0.25, 0.5, 0.75])
                key = sweep_key(snr=snr, M=m)
                seed = self.root.derive(Role.NOISE_E, 0, i).lineage
                n = errors.size
                report.add(key, "nrmse_median", median, n=n, seed=seed)
                report.add(key, "nrmse_q25", q25, n=n, seed=seed)
                report.add(key, "nrmse_q75", q75, n=n, seed=seed)
                report.add(key, "nrmse_iqr", q75 - q25, n=n, seed=seed)
                report.add(key, "full_rank_fraction", np.mean([r.full_rank for r in results]), n=n, seed=seed)
                report.add(key, "w_error_median", np.median([r.diagnostics["w_error"] for r in results]), n=n, seed=seed)
                logger.info("attack snr=%g dB M=%d: median NRMSE %.4g", snr, m, median)
        return report

    def _leakage(self, channels: ChannelSet, profile: VarianceProfile, noise_var: float, party: Party, stream):
        try:
            return leakage_upper_bound(
                channels, profile, noise_var, stream, self.config.leakage_settings(), transmitter=party
            )
        except (NumericalError, DegenerateInputError) as exc:
            logger.warning("leakage from %s skipped: %s", party.value, exc)
            return None

    def rgm_skr_point(
        self,
        report: ExperimentReport,
        channels: ChannelSet,
        snr_index: int,
        snr: float,
        probe_length: int,
        eve_counts: list[int],
        **key_parts,
    ) -> None:
        """Key MI, KDR, leakage and SKR rows for one (SNR, D) point and every M."""
        cfg = self.config
        noise_var = self.snr_to_noise_var(snr)
        params = self.rgm_params(noise_var, probe_length)
        stream = self.root.derive(Role.ROUND, snr_index, probe_length)
        observations = run_protocol(channels, cfg.rounds, params, stream, self.threads)
        sigma_a = np.array([o.sigma_a for o in observations])
        sigma_b = np.array([o.sigma_b for o in observations])
        key_mi = mi_knn(sigma_a, sigma_b, cfg.knn_k)
        self._key_agreement(report, sweep_key(**key_parts, snr=snr), sigma_a, sigma_b, stream.lineage)

        for m in eve_counts:
            key = sweep_key(**key_parts, snr=snr, M=m)
            subset = channels.with_eves(m)
            leak_stream = self.root.derive(Role.LEAKAGE, snr_index, probe_length, m)
            leak_a = self._leakage(subset, params.profile_a, noise_var, Party.ALICE, leak_stream.derive(0))
            leak_b = self._leakage(subset, params.profile_b, noise_var, Party.BOB, leak_stream.derive(1))
            report.add(key, "key_mi", key_mi.bits, n=key_mi.sample_count, seed=stream.lineage)
            if leak_a is None or leak_b is None:
                continue
            skr = skr_lower_bound(key_mi, leak_a, leak_b)
            report.add(key, "leak_a", leak_a.bits, leak_a.stderr, leak_a.sample_count, leak_stream.lineage)
            report.add(key, "leak_b", leak_b.bits, leak_b.stderr, leak_b.sample_count, leak_stream.lineage)
            report.add(key, "skr_raw", skr.skr_raw, n=cfg.rounds, seed=stream.lineage)
            report.add(key, "skr_clamped", skr.skr_clamped, n=cfg.rounds, seed=stream.lineage)
            report.add(key, "flagged", float(skr.flagged), seed=leak_stream.lineage)
            logger.info("rgm %s: key MI %.3f, leakage %.3f, SKR %.3f bits", key, key_mi.bits, skr.leakage.bits, skr.skr_raw)

    def pilot_skr_point(
        self, report: ExperimentReport, channels: ChannelSet, snr_index: int, snr: float, eve_counts: list[int]
    ) -> None:
        """Pilot baseline: Eves' reconstructed feature stands in for the leakage."""
        cfg = self.config
        noise_var = self.snr_to_noise_var(snr)
        pilot_a, pilot_b = self.pilots()
        stream = self.root.derive(Role.ROUND, snr_index)
        for m in eve_counts:
            scheme = PilotScheme(
                pilot_a,
                pilot_b,
                FeatureMode(cfg.pilot_feature),
                attack=ColludedEveAttack(pilot_a, project=cfg.project_unit_modulus),
            )
            rounds = scheme.batch_features(
                channels.with_eves(m), noise_var, cfg.rounds, cfg.alphabet(), stream, self.threads
            )
            alice = np.concatenate([f.alice for f in rounds])
            bob = np.concatenate([f.bob for f in rounds])
            eve = np.concatenate([f.eve for f in rounds])
            key = sweep_key(scheme="pilot", snr=snr, M=m)

            key_mi = mi_knn(alice, bob, cfg.knn_k)
            leak_a = mi_knn(eve, alice, cfg.knn_k)
            leak_b = mi_knn(eve, bob, cfg.knn_k)
            skr = skr_lower_bound(key_mi, leak_a, leak_b)
            n = alice.size
            report.add(key, "key_mi", key_mi.bits, n=n, seed=stream.lineage)
            report.add(key, "leak_a", leak_a.bits, n=n, seed=stream.lineage)
            report.add(key, "leak_b", leak_b.bits, n=n, seed=stream.lineage)
            report.add(key, "skr_raw", skr.skr_raw, n=n, seed=stream.lineage)
            report.add(key, "skr_clamped", skr.skr_clamped, n=n, seed=stream.lineage)
            report.add(key, "nrmse_median", np.median([f.metadata["nrmse"] for f in rounds]), n=n, seed=stream.lineage)
            self._key_agreement(report, key, alice, bob, stream.lineage)
            logger.info("pilot %s: key MI %.3f, leakage %.3f, SKR %.3f bits", key, key_mi.bits, skr.leakage.bits, skr.skr_raw)

    def run_skr_sweep(self, scheme: str = "rgm") -> ExperimentReport:
        """Per (SNR, M): key MI, leakage, raw and clamped SKR, KDR.

        Args:
            scheme: "rgm", "pilot" or "both"
        """
        names = SCHEMES if scheme == "both" else (scheme,)
        if any(name not in SCHEMES for name in names):
            raise ConfigError(f"scheme must be one of rgm, pilot, both; got {scheme!r}")
        cfg = self.config
        report = self.new_report(f"skr-{scheme}")
        channels = self.deployments(1)[0]
        for name in names:
            for i, snr in enumerate(cfg.snr_db):
                if name == "rgm":
                    self.rgm_skr_point(report, channels, i, snr, cfg.probe_length, cfg.eve_counts, scheme="rgm")
                else:
                    self.pilot_skr_point(report, channels, i, snr, cfg.eve_counts)
        return report

    # Validation suite

    def _sigma_draws(self, h: np.ndarray, profile: VarianceProfile, noise_var: float, stream: RngStream) -> np.ndarray:
        """``validation_draws`` samples of ``sigma_max(H X + N)``."""
        draws = self.config.validation_draws

        def chunk(c: int) -> np.ndarray:
            size = min(DRAW_CHUNK, draws - c * DRAW_CHUNK)
            gen = stream.derive(c).generator()
            y = h @ complex_normal((size, *profile.deltas.shape), profile.deltas, gen)
            if noise_var > 0:
                y = y + complex_normal(y.shape, noise_var, gen)
            return np.linalg.svd(y, compute_uv=False)[:, 0]

        return np.concatenate(parallel_map(chunk, range(math.ceil(draws / DRAW_CHUNK)), self.threads))

    def _check_moments(self, report: ExperimentReport, check: str, noise_var: float) -> None:
        cfg = self.config
        stream = self.root.derive(Role.TRIAL, VALIDATION_TRIAL)
        h = dominant_mode_channel(cfg.n_b, cfg.n_a, stream.derive(0))
        profile = VarianceProfile.uniform(cfg.n_a, cfg.probe_length, cfg.row_power)
        svd = linalg.compact_svd(h)
        if noise_var > 0:
            approx = noisy_moments(svd.xi1, svd.right[:, 0], profile, noise_var)
        else:
            approx = noiseless_moments(svd.xi1, svd.right[:, 0], profile)
        target = 2 * cfg.row_power * svd.xi1**2 + 2 * cfg.probe_length * noise_var

        draw_stream = stream.derive(1, int(noise_var > 0))
        samples = self._sigma_draws(h, profile, noise_var, draw_stream)
        mean, stderr = _mean_and_stderr(samples)
        variance = float(np.var(samples, ddof=1))
        n = samples.size
        key = sweep_key(check=check, D=cfg.probe_length)
        seed = draw_stream.lineage
        report.add(key, "predicted_mean", approx.mean)
        report.add(key, "mc_mean", mean, stderr, n, seed)
        report.add(key, "mean_z", (mean - approx.mean) / stderr, n=n, seed=seed)
        report.add(key, "predicted_variance", approx.variance)
        report.add(key, "mc_variance", variance, n=n, seed=seed)
        report.add(key, "variance_rel_error", abs(variance - approx.variance) / approx.variance, n=n, seed=seed)
        report.add(key, "identity_residual", abs(approx.second_moment - target) / target)
        report.add(key, "skewness", stats.skew(samples), n=n, seed=seed)
        report.add(key, "excess_kurtosis", stats.kurtosis(samples), n=n, seed=seed)

    def _check_bounds(self, report: ExperimentReport) -> None:
        cfg = self.config
        stream = self.root.derive(Role.TRIAL, VALIDATION_TRIAL, 1)
        violations = 0
        for j in range(BOUND_PROFILES):
            profile = VarianceProfile.random(cfg.n_a, cfg.probe_length, stream.derive(j, 0), cfg.row_power)
            gen = stream.derive(j, 1).generator()
            v = gen.standard_normal(cfg.n_a) + 1j * gen.standard_normal(cfg.n_a)
            v /= np.linalg.norm(v)
            xi1 = float(gen.uniform(0.5, 2.0))
            if not moment_bounds(xi1, profile).contains(noiseless_moments(xi1, v, profile)):
                violations += 1
        report.add(sweep_key(check="bounds", D=cfg.probe_length), "violations", violations, n=BOUND_PROFILES, seed=stream.lineage)

    def _check_trace(self, report: ExperimentReport, snr: float) -> None:
        cfg = self.config
        channels = self.deployments(1)[0]
        noise_var = self.snr_to_noise_var(snr)
        params = self.rgm_params(noise_var, cfg.trace_probe_length)
        stream = self.root.derive(Role.ROUND, VALIDATION_TRIAL)
        observations = run_protocol(channels, cfg.rounds, params, stream, self.threads)
        sigma_a = np.array([o.sigma_a for o in observations])
        sigma_b = np.array([o.sigma_b for o in observations])
        key = sweep_key(check="trace", snr=snr, D=cfg.trace_probe_length)
        report.add(key, "pearson", stats.pearsonr(sigma_a, sigma_b)[0], n=sigma_a.size, seed=stream.lineage)
        self._key_agreement(report, key, sigma_a, sigma_b, stream.lineage)

        knn = mi_knn(sigma_a, sigma_b, cfg.knn_k)
        report.add(key, "knn_mi", knn.bits, n=knn.sample_count, seed=stream.lineage)
        phases = [o.irs for o in observations[:MIXTURE_PHASES]]
        try:
            mixture = mi_mixture_numeric(phases, channels, params.profile_a, params.profile_b, noise_var)
        except QuadratureError as exc:
            logger.warning("mixture MI did not converge (%.2e): %s", exc.achieved_tolerance, exc)
            return
        report.add(key, "mixture_mi", mixture.bits, n=mixture.sample_count, seed=stream.lineage)

    def _check_probe_lengths(self, report: ExperimentReport, snr: float) -> None:
        cfg = self.config
        channels = self.deployments(1)[0]
        m = min(cfg.eve_counts)
        snr_index = len(cfg.snr_db)
        for d in cfg.probe_lengths:
            self.rgm_skr_point(report, channels, snr_index, snr, d, [m], check="probe_length", D=d)
            key = sweep_key(check="complexity", D=d)
            report.add(key, "multiplications_alice", svd_multiplications(cfg.n_a, d))
            report.add(key, "multiplications_bob", svd_multiplications(cfg.n_b, d))

    def run_validation_suite(self) -> ExperimentReport:
        """Closed-form moments against Monte Carlo, bound bracketing, sigma-pair trace, SKR versus D."""
        cfg = self.config
        report = self.new_report("validate")
        snr = cfg.validation_snr_db

        logger.info("checking noise-free moments")
        self._check_moments(report, "noiseless", 0.0)
        logger.info("checking moments at %g dB", snr)
        xi1 = DOMINANT_SINGULAR
        self._check_moments(report, "noisy", snr_to_noise_var(snr, cfg.row_power, xi1**2))
        self._check_bounds(report)
        logger.info("checking sigma-pair trace")
        self._check_trace(report, snr)
        logger.info("sweeping probe length over %s", cfg.probe_lengths)
        self._check_probe_lengths(report, snr)
        return report


def run_experiment(command: str, config: ExperimentConfig, threads: int = 1, scheme: str = "rgm") -> ExperimentReport:
    """Convenience function to run one CLI command's sweep.

    Args:
        command: One of "simulate", "attack", "skr", "validate"
        config: Experiment configuration
        threads: Worker threads
        scheme: Scheme for the SKR sweep ("rgm", "pilot" or "both")

    Returns:
        ExperimentReport
    """
    runner = ExperimentRunner(config, threads)
    if command == "simulate":
        return runner.run_simulation()[0]
    if command == "attack":
        return runner.run_nrmse_sweep()
    if command == "skr":
        return runner.run_skr_sweep(scheme)
    if command == "validate":
        return runner.run_validation_suite()
    raise ConfigError(f"unknown command {command!r}; expected one of {', '.join(COMMANDS)}")
