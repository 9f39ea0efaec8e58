"""Parallel concatenated (turbo) encoding: two identical RSC encoders
separated by a random interleaver, with optional puncturing.

Encoder 1 is terminated with nu tail bits, encoder 2 is left
unterminated. Tail bits are transmitted unpunctured after the body, as
(tail systematic, tail parity) pairs, so puncturing only touches the N
body time steps.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .puncture import PuncturingPattern, apply_pattern, pattern_rate
from .rsc import GeneratorPair, Trellis, build_trellis, encode_rsc


@dataclass(frozen=True)
class Interleaver:
    """Permutation pi of {0..N-1}; encoder 2 reads info[pi[k]] at step k."""

    pi: np.ndarray

    def __post_init__(self):
        self.pi.setflags(write=False)
        image = np.sort(self.pi)
        if not np.array_equal(image, np.arange(self.pi.size)):
            raise ValueError("pi is not a permutation")

    @property
    def size(self) -> int:
        return int(self.pi.size)

    def interleave(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(x)[..., self.pi]

    def deinterleave(self, x: np.ndarray) -> np.ndarray:
        out = np.empty_like(x)
        out[..., self.pi] = x
        return out


def random_interleaver(n: int, seed: int) -> Interleaver:
    """Uniform random interleaver from a counter-based Philox stream.

    Identical (n, seed) gives the identical permutation on every
    platform.
    """
    if n < 2:
        raise ValueError("interleaver size must be >= 2")
    rng = np.random.Generator(np.random.Philox(key=np.uint64(seed)))
    return Interleaver(pi=rng.permutation(n))


@dataclass(frozen=True)
class TurboCodeSpec:
    """One PCCC: generator pair, interleaver and optional puncturing."""

    gp: GeneratorPair
    interleaver: Interleaver
    pattern: PuncturingPattern | None = None

    @property
    def size(self) -> int:
        return self.interleaver.size

    @property
    def nominal_rate(self) -> Fraction:
        # excludes the O(nu/N) tail overhead
        if self.pattern is None:
            return Fraction(1, 3)
        return pattern_rate(self.pattern)

    def trellis(self) -> Trellis:
        return build_trellis(self.gp)


@dataclass(frozen=True)
class TurboCodeword:
    """Streams of one encoded block plus the flattened channel sequence.

    position_map lists (stream, time) per transmitted symbol; streams
    0,1,2 are the punctured body (systematic, parity1, parity2), streams
    3,4 the unpunctured tail (systematic, parity) of encoder 1.
    """

    systematic: np.ndarray
    parity1: np.ndarray
    parity2: np.ndarray
    tail_sys: np.ndarray
    tail_par: np.ndarray
    transmitted: np.ndarray
    position_map: list

    def __post_init__(self):
        for a in (self.systematic, self.parity1, self.parity2,
                  self.tail_sys, self.tail_par, self.transmitted):
            a.setflags(write=False)


def encode_pccc(spec: TurboCodeSpec, info,
                trellis: Trellis | None = None) -> TurboCodeword:
    """Encode one information block of length N = spec.size."""
    x = np.asarray(info, dtype=np.int64).ravel()
    n = spec.size
    if x.size != n:
        raise ValueError(f"info length {x.size} != interleaver size {n}")
    tr = trellis if trellis is not None else spec.trellis()

    enc1 = encode_rsc(spec.gp, x, terminate=True, trellis=tr)
    enc2 = encode_rsc(spec.gp, spec.interleaver.interleave(x),
                      terminate=False, trellis=tr)

    parity1 = enc1.parity[:n]
    tail_sys = enc1.tail
    tail_par = enc1.parity[n:]
    streams = np.stack([x, parity1, enc2.parity])

    pattern = spec.pattern if spec.pattern is not None \
        else PuncturingPattern.all_ones()
    body, position_map = apply_pattern(streams, pattern)

    tail_pairs = np.empty(2 * tr.nu, dtype=np.int64)
    tail_pairs[0::2] = tail_sys
    tail_pairs[1::2] = tail_par
    for k in range(tr.nu):
        position_map.append((3, k))
        position_map.append((4, k))

    return TurboCodeword(
        systematic=x, parity1=parity1, parity2=enc2.parity,
        tail_sys=tail_sys, tail_par=tail_par,
        transmitted=np.concatenate([body, tail_pairs]),
        position_map=position_map,
    )


def _encode_rsc_batch(trellis: Trellis, bits: np.ndarray, terminate: bool):
    """Table-driven RSC encoding of a (B, N) batch of blocks.

    Returns (parity, tails) with parity of shape (B, N + nu) when
    terminating, else (B, N); tails is (B, nu) or (B, 0). Matches
    encode_rsc row by row (covered by a test).
    """
    b, n = bits.shape
    nu = trellis.nu
    extra = nu if terminate else 0
    parity = np.empty((b, n + extra), dtype=np.int64)
    tails = np.empty((b, extra), dtype=np.int64)
    state = np.zeros(b, dtype=np.int64)
    for t in range(n):
        u = bits[:, t]
        parity[:, t] = trellis.parity[u, state]
        state = trellis.next_state[u, state]
    if terminate:
        for k in range(nu):
            u = trellis.termination_input[state]
            tails[:, k] = u
            parity[:, n + k] = trellis.parity[u, state]
            state = trellis.next_state[u, state]
    return parity, tails
