"""Monte Carlo BER measurement over the BPSK/AWGN channel.

Every frame draws its randomness from a counter-based Philox stream
keyed by (master_seed, grid point, frame index), so results are a pure
function of the configuration: re-runs, different batch splits and
different worker counts all produce identical counts. Noise follows
sigma^2 = 1 / (2 R Eb/N0) with R the nominal code rate, so Eb is the
energy per information bit.
"""

from __future__ import annotations

import multiprocessing
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .codec import TurboCodeSpec, _encode_rsc_batch
from .decoder import _turbo_decode_batch
from .puncture import PuncturingPattern


def bpsk_map(bits) -> np.ndarray:
    """Map 0 -> +1, 1 -> -1 (unit symbol energy)."""
    return 1.0 - 2.0 * np.asarray(bits, dtype=np.float64)


def noise_variance(ebno_db: float, rate: float) -> float:
    """Per-symbol noise variance at the given Eb/N0 and code rate."""
    if not 0.0 < rate <= 1.0:
        raise ValueError(f"rate {rate} outside (0, 1]")
    return 1.0 / (2.0 * rate * 10.0 ** (ebno_db / 10.0))


def awgn(symbols, ebno_db: float, rate: float,
         rng: np.random.Generator) -> np.ndarray:
    """Add white Gaussian noise scaled for the code rate."""
    x = np.asarray(symbols, dtype=np.float64)
    sigma = np.sqrt(noise_variance(ebno_db, rate))
    return x + rng.normal(0.0, sigma, size=x.shape)


def channel_llr(received, sigma2: float) -> np.ndarray:
    """LLR of bit 0 vs 1 for a BPSK symbol in AWGN: 2 r / sigma^2."""
    if sigma2 <= 0:
        raise ValueError("sigma2 must be positive")
    return 2.0 * np.asarray(received, dtype=np.float64) / sigma2


@dataclass(frozen=True)
class SimConfig:
    """One BER run: code, Eb/N0 grid and stopping parameters.

    Per grid point, frames are simulated in fixed batches until the
    final iteration has accumulated target_bit_errors or max_frames is
    reached. frames_per_batch and workers affect speed only, not
    results; new_interleaver_per_frame redraws the permutation each
    frame to emulate the uniform interleaver.
    """

    spec: TurboCodeSpec
    ebno_db_grid: tuple = ()
    iterations: int = 8
    master_seed: int = 0
    max_frames: int = 100_000
    target_bit_errors: int = 100
    new_interleaver_per_frame: bool = False
    frames_per_batch: int = 256
    workers: int = 1

    def __post_init__(self):
        if not self.ebno_db_grid:
            raise ValueError("empty Eb/N0 grid")
        if self.iterations < 1 or self.max_frames < 1:
            raise ValueError("iterations and max_frames must be >= 1")
        if self.frames_per_batch < 1 or self.workers < 1:
            raise ValueError("frames_per_batch and workers must be >= 1")


@dataclass(frozen=True)
class BerCurvePoint:
    ebno_db: float
    iteration: int
    bit_errors: int
    bits: int
    frames: int
    ber: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "ber",
                           self.bit_errors / self.bits if self.bits else 0.0)


def _frame_rng(master_seed: int, point_index: int,
               frame_index: int) -> np.random.Generator:
    key = np.array([master_seed, point_index], dtype=np.uint64)
    counter = np.array([0, 0, 0, frame_index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key, counter=counter))


def _simulate_frames(spec: TurboCodeSpec, ebno_db: float, point_index: int,
                     master_seed: int, frame_lo: int, frame_hi: int,
                     iterations: int, new_interleaver_per_frame: bool):
    """Simulate frames [frame_lo, frame_hi); returns per-iteration error
    counts and the number of information bits."""
    n = spec.size
    trellis = spec.trellis()
    nu = trellis.nu
    b = frame_hi - frame_lo
    rate = float(spec.nominal_rate)
    sigma2 = noise_variance(ebno_db, rate)

    pattern = spec.pattern if spec.pattern is not None \
        else PuncturingPattern.all_ones()
    keep_tm = _keep_time_major(pattern, n)
    n_body = int(keep_tm.sum())
    n_tx = n_body + 2 * nu

    info = np.empty((b, n), dtype=np.int64)
    pi = np.empty((b, n), dtype=np.int64)
    received = np.empty((b, n_tx))
    for row, f in enumerate(range(frame_lo, frame_hi)):
        rng = _frame_rng(master_seed, point_index, f)
        if new_interleaver_per_frame:
            pi[row] = rng.permutation(n)
        else:
            pi[row] = spec.interleaver.pi
        info[row] = rng.integers(0, 2, size=n)
        noise = rng.normal(0.0, np.sqrt(sigma2), size=n_tx)
        received[row] = noise  # symbols added below

    parity1_full, tails = _encode_rsc_batch(trellis, info, terminate=True)
    info2 = np.take_along_axis(info, pi, axis=1)
    parity2, _ = _encode_rsc_batch(trellis, info2, terminate=False)

    streams_tm = np.stack([info, parity1_full[:, :n], parity2], axis=2)
    body = streams_tm[:, keep_tm]
    tail_bits = np.empty((b, 2 * nu), dtype=np.int64)
    tail_bits[:, 0::2] = tails
    tail_bits[:, 1::2] = parity1_full[:, n:]
    tx_bits = np.concatenate([body, tail_bits], axis=1)
    received += bpsk_map(tx_bits)

    llr = channel_llr(received, sigma2)
    llr3 = np.zeros((b, n, 3))
    llr3[:, keep_tm] = llr[:, :n_body]
    sys_llr = np.concatenate([llr3[:, :, 0], llr[:, n_body::2]], axis=1)
    par1_llr = np.concatenate([llr3[:, :, 1], llr[:, n_body + 1::2]], axis=1)
    par2_llr = llr3[:, :, 2]

    decisions, _ = _turbo_decode_batch(trellis, _BatchPermutation(pi),
                                       sys_llr, par1_llr, par2_llr,
                                       iterations)
    errors = (decisions != info[None, :, :]).sum(axis=(1, 2))
    return errors.astype(np.int64), b * n


def _keep_time_major(pattern: PuncturingPattern, n: int) -> np.ndarray:
    reps = -(-n // pattern.period)
    return np.tile(pattern.rows, reps)[:, :n].astype(bool).T


class _BatchPermutation:
    """Per-frame permutations with the Interleaver interface."""

    def __init__(self, pi: np.ndarray):
        self.pi = pi
        self.size = pi.shape[1]

    def interleave(self, x: np.ndarray) -> np.ndarray:
        return np.take_along_axis(x, self.pi, axis=1)

    def deinterleave(self, x: np.ndarray) -> np.ndarray:
        out = np.empty_like(x)
        np.put_along_axis(out, self.pi, x, axis=1)
        return out


def _worker_args(config: SimConfig, ebno_db, point_index, lo, hi):
    return (config.spec, ebno_db, point_index, config.master_seed, lo, hi,
            config.iterations, config.new_interleaver_per_frame)


def run_ber(config: SimConfig) -> list[BerCurvePoint]:
    """Simulate every grid point; one BerCurvePoint per (Eb/N0, iteration).

    Stopping is evaluated at batch boundaries on the final iteration's
    error count, so the simulated frame set depends only on the
    configuration.
    """
    executor = None
    if config.workers > 1:
        # spawned workers keep the compiled decoder kernels clear of
        # fork/threading interactions
        executor = ProcessPoolExecutor(
            max_workers=config.workers,
            mp_context=multiprocessing.get_context("spawn"))
    try:
        points = []
        for point_index, ebno_db in enumerate(config.ebno_db_grid):
            errors = np.zeros(config.iterations, dtype=np.int64)
            bits = 0
            frames = 0
            while frames < config.max_frames:
                batch = min(config.frames_per_batch,
                            config.max_frames - frames)
                lo, hi = frames, frames + batch
                if executor is None or batch < 2 * config.workers:
                    err, nb = _simulate_frames(
                        *_worker_args(config, ebno_db, point_index, lo, hi))
                    errors += err
                    bits += nb
                else:
                    bounds = np.linspace(lo, hi, config.workers + 1,
                                         dtype=np.int64)
                    jobs = [_worker_args(config, ebno_db, point_index,
                                         int(a), int(b))
                            for a, b in zip(bounds[:-1], bounds[1:])
                            if b > a]
                    for err, nb in executor.map(_simulate_frames_star, jobs):
                        errors += err
                        bits += nb
                frames = hi
                if errors[-1] >= config.target_bit_errors:
                    break
            for it in range(config.iterations):
                points.append(BerCurvePoint(
                    ebno_db=float(ebno_db), iteration=it + 1,
                    bit_errors=int(errors[it]), bits=bits, frames=frames))
        return points
    finally:
        if executor is not None:
            executor.shutdown()


def _simulate_frames_star(args):
    return _simulate_frames(*args)


def flag_anomalies(points: list[BerCurvePoint]) -> list[str]:
    """Statistical sanity warnings (never failures): BER should not rise
    with Eb/N0 at fixed iteration, nor with iterations at fixed Eb/N0,
    beyond 3 sigma of the binomial estimate."""
    flags = []
    by_iter: dict = {}
    by_point: dict = {}
    for p in points:
        by_iter.setdefault(p.iteration, []).append(p)
        by_point.setdefault(p.ebno_db, {})[p.iteration] = p
    for it, plist in by_iter.items():
        plist = sorted(plist, key=lambda p: p.ebno_db)
        for a, b in zip(plist[:-1], plist[1:]):
            if b.ber > a.ber + 3.0 * _ber_sigma(a, b):
                flags.append(
                    f"iteration {it}: BER rises from {a.ber:.3g} at "
                    f"{a.ebno_db} dB to {b.ber:.3g} at {b.ebno_db} dB")
    for ebno, its in by_point.items():
        first, last = its.get(1), its.get(max(its))
        if first and last and last.iteration > 1 and \
                last.ber > first.ber + 3.0 * _ber_sigma(first, last):
            flags.append(
                f"{ebno} dB: BER rises from {first.ber:.3g} (iteration 1) "
                f"to {last.ber:.3g} (iteration {last.iteration})")
    return flags


def _ber_sigma(a: BerCurvePoint, b: BerCurvePoint) -> float:
    var = 0.0
    for p in (a, b):
        if p.bits:
            var += max(p.ber, 1.0 / p.bits) / p.bits
    return float(np.sqrt(var))
