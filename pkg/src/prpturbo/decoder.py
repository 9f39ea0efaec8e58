"""Exact log-MAP (BCJR in the log domain) and iterative turbo decoding.

All soft values are log-likelihood ratios with the convention
LLR = log P(bit=0) / P(bit=1), matching a +1/-1 BPSK mapping of 0/1.
The Jacobian correction max*(a,b) = max(a,b) + log(1+exp(-|a-b|)) is
computed exactly, with no lookup tables: the compiled kernel only skips
the correction term when it falls below half an ulp of the result.

The batched helpers operate on (frames, steps) arrays so many blocks
decode in one pass; the public functions wrap single sequences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .codec import Interleaver
from .rsc import Trellis

try:
    import numba
    from numba import njit, prange

    # the TBB/OpenMP layers break under fork-based multiprocessing, which
    # the simulation harness uses for frame-level workers
    numba.config.THREADING_LAYER = "workqueue"
    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    _HAVE_NUMBA = False

LLR_CLIP = 50.0

# state metric of an unreachable state; large enough that exp() of any
# shifted difference is exactly 0.0, finite so arithmetic stays NaN-free
_NEG = -1.0e30


def _check_finite(*arrays):
    for a in arrays:
        if not np.all(np.isfinite(a)):
            raise ValueError("non-finite LLR input")


def _log_map_batch(trellis: Trellis, sys_llr, par_llr, apriori, terminated):
    """Forward/backward pass over a (B, K) batch.

    Start state is 0; the end is anchored to state 0 when terminated,
    otherwise uniform. Returns (extrinsic, aposteriori), both (B, K).
    Dispatches to a compiled per-frame kernel when numba is available;
    the numpy implementation is the reference and the fallback.
    """
    if _HAVE_NUMBA:
        psign = np.ascontiguousarray(1.0 - 2.0 * trellis.parity)
        app = _log_map_kernel(
            np.ascontiguousarray(trellis.next_state),
            psign, np.ascontiguousarray(trellis.prev_state),
            np.ascontiguousarray(trellis.prev_input),
            np.ascontiguousarray(sys_llr), np.ascontiguousarray(par_llr),
            np.ascontiguousarray(apriori), terminated)
        return app - apriori - sys_llr, app
    return _log_map_batch_numpy(trellis, sys_llr, par_llr, apriori,
                                terminated)


if _HAVE_NUMBA:

    @njit(cache=True, inline="always")
    def _lae(a: float, b: float) -> float:
        # exact max*: the correction is skipped only when it is below
        # half an ulp of the result, so the skip changes nothing
        if a < b:
            a, b = b, a
        d = a - b
        if d > 40.0:
            return a
        return a + math.log1p(math.exp(-d))

    @njit(cache=True, parallel=True)
    def _log_map_kernel(next_state, psign, prev_state, prev_input,
                        sys_llr, par_llr, apriori, terminated):
        n_frames, k = sys_llr.shape
        s_count = psign.shape[1]
        app = np.empty((n_frames, k))
        for f in prange(n_frames):
            g0 = np.empty((k, s_count))
            g1 = np.empty((k, s_count))
            for t in range(k):
                c = 0.5 * (sys_llr[f, t] + apriori[f, t])
                d = 0.5 * par_llr[f, t]
                for s in range(s_count):
                    g0[t, s] = c + d * psign[0, s]
                    g1[t, s] = -c + d * psign[1, s]

            alpha = np.empty((k + 1, s_count))
            for s in range(s_count):
                alpha[0, s] = _NEG
            alpha[0, 0] = 0.0
            for t in range(k):
                for s in range(s_count):
                    i0 = prev_state[0, s]
                    i1 = prev_state[1, s]
                    a0 = alpha[t, i0] + (g0[t, i0] if prev_input[0, s] == 0
                                         else g1[t, i0])
                    a1 = alpha[t, i1] + (g0[t, i1] if prev_input[1, s] == 0
                                         else g1[t, i1])
                    alpha[t + 1, s] = _lae(a0, a1)

            beta = np.empty(s_count)
            bnew = np.empty(s_count)
            t0 = np.empty(s_count)
            t1 = np.empty(s_count)
            for s in range(s_count):
                beta[s] = _NEG if terminated else 0.0
            if terminated:
                beta[0] = 0.0
            for t in range(k - 1, -1, -1):
                # each hypothesis is shifted by its own maximum so the
                # exp sums stay anchored at 1 whatever the LLR contrast
                mx0 = -np.inf
                mx1 = -np.inf
                for s in range(s_count):
                    t0[s] = g0[t, s] + beta[next_state[0, s]]
                    t1[s] = g1[t, s] + beta[next_state[1, s]]
                    m0 = alpha[t, s] + t0[s]
                    m1 = alpha[t, s] + t1[s]
                    if m0 > mx0:
                        mx0 = m0
                    if m1 > mx1:
                        mx1 = m1
                sum0 = 0.0
                sum1 = 0.0
                for s in range(s_count):
                    d0 = alpha[t, s] + t0[s] - mx0
                    if d0 > -40.0:
                        sum0 += math.exp(d0)
                    d1 = alpha[t, s] + t1[s] - mx1
                    if d1 > -40.0:
                        sum1 += math.exp(d1)
                    bnew[s] = _lae(t0[s], t1[s])
                app[f, t] = (mx0 + math.log(sum0)) - (mx1 + math.log(sum1))
                for s in range(s_count):
                    beta[s] = bnew[s]
        return app


def _log_map_batch_numpy(trellis: Trellis, sys_llr, par_llr, apriori,
                         terminated):
    b, k = sys_llr.shape
    s = trellis.num_states
    sp = 1.0 - 2.0 * trellis.parity          # (2, S) sign of parity bit
    ps0, ps1 = trellis.prev_state
    pu0, pu1 = trellis.prev_input
    ns0, ns1 = trellis.next_state

    c = 0.5 * (sys_llr + apriori)
    d = 0.5 * par_llr
    # gamma[t, b, u, s] = c*(1-2u) + d*(1-2*parity[u,s])
    gamma = np.empty((k, b, 2, s))
    gamma[..., 0, :] = c.T[:, :, None] + d.T[:, :, None] * sp[0]
    gamma[..., 1, :] = -c.T[:, :, None] + d.T[:, :, None] * sp[1]
    gamma_in0 = np.ascontiguousarray(gamma[:, :, pu0, ps0])
    gamma_in1 = np.ascontiguousarray(gamma[:, :, pu1, ps1])

    # forward recursion, alphas kept for the backward pass
    alpha = np.full((k + 1, b, s), _NEG)
    alpha[0, :, 0] = 0.0
    for t in range(k):
        at = alpha[t]
        np.logaddexp(at[:, ps0] + gamma_in0[t], at[:, ps1] + gamma_in1[t],
                     out=alpha[t + 1])

    if terminated:
        beta = np.full((b, s), _NEG)
        beta[:, 0] = 0.0
    else:
        beta = np.zeros((b, s))

    gamma_out0 = gamma[:, :, 0, :]
    gamma_out1 = gamma[:, :, 1, :]
    aposteriori = np.empty((b, k))
    for t in range(k - 1, -1, -1):
        t0 = gamma_out0[t] + beta[:, ns0]
        t1 = gamma_out1[t] + beta[:, ns1]
        at = alpha[t]
        # per-hypothesis max shift keeps both sums anchored at 1
        m0 = at + t0
        m1 = at + t1
        mx0 = m0.max(axis=1)
        mx1 = m1.max(axis=1)
        met0 = mx0 + np.log(np.exp(m0 - mx0[:, None]).sum(axis=1))
        met1 = mx1 + np.log(np.exp(m1 - mx1[:, None]).sum(axis=1))
        aposteriori[:, t] = met0 - met1
        beta = np.logaddexp(t0, t1)

    extrinsic = aposteriori - apriori - sys_llr
    return extrinsic, aposteriori


def log_map(trellis: Trellis, sys_llr, par_llr, apriori_llr,
            terminated: bool):
    """Single constituent-decoder pass on one sequence.

    Returns (extrinsic_llr, aposteriori_llr); the decomposition
    aposteriori = apriori + sys_llr + extrinsic holds at every position.
    """
    sys_llr = np.asarray(sys_llr, dtype=np.float64).ravel()
    par_llr = np.asarray(par_llr, dtype=np.float64).ravel()
    apriori = np.asarray(apriori_llr, dtype=np.float64).ravel()
    if not (sys_llr.size == par_llr.size == apriori.size):
        raise ValueError("sys, parity and a-priori lengths differ")
    if sys_llr.size == 0:
        raise ValueError("empty input")
    _check_finite(sys_llr, par_llr, apriori)
    ext, app = _log_map_batch(trellis, sys_llr[None, :], par_llr[None, :],
                              apriori[None, :], terminated)
    return ext[0], app[0]


@dataclass(frozen=True)
class DecoderInput:
    """Channel LLRs plus code structure for one block.

    sys_llr and par1_llr cover the N body steps plus the nu termination
    steps of encoder 1; par2_llr covers the N body steps of the
    unterminated encoder 2. Punctured positions carry LLR 0.
    """

    sys_llr: np.ndarray
    par1_llr: np.ndarray
    par2_llr: np.ndarray
    interleaver: Interleaver
    trellis: Trellis
    iterations: int = 8

    def __post_init__(self):
        n, nu = self.interleaver.size, self.trellis.nu
        if self.sys_llr.shape[-1] != n + nu or \
                self.par1_llr.shape[-1] != n + nu:
            raise ValueError(f"encoder-1 LLR streams must have length {n + nu}")
        if self.par2_llr.shape[-1] != n:
            raise ValueError(f"par2_llr must have length {n}")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")


@dataclass(frozen=True)
class DecodeResult:
    """Per-iteration hard decisions and a-posteriori LLRs, each (iters, N)."""

    decisions: np.ndarray
    aposteriori: np.ndarray


def _turbo_decode_batch(trellis: Trellis, interleaver: Interleaver,
                        sys_llr, par1_llr, par2_llr, iterations: int):
    """Iterative exchange between the two constituent decoders.

    Inputs are (B, N+nu), (B, N+nu), (B, N) channel LLR batches (clipped
    here). Decisions are taken after each full iteration from decoder
    2's deinterleaved a-posteriori. Returns (decisions, aposteriori) of
    shape (iters, B, N).
    """
    n = interleaver.size
    sys_llr = np.clip(sys_llr, -LLR_CLIP, LLR_CLIP)
    par1_llr = np.clip(par1_llr, -LLR_CLIP, LLR_CLIP)
    par2_llr = np.clip(par2_llr, -LLR_CLIP, LLR_CLIP)

    b = sys_llr.shape[0]
    nu = trellis.nu
    sys2 = interleaver.interleave(sys_llr[:, :n])
    zeros_tail = np.zeros((b, nu))
    ext2_deint = np.zeros((b, n))

    decisions = np.empty((iterations, b, n), dtype=np.int64)
    aposteriori = np.empty((iterations, b, n))
    for it in range(iterations):
        apriori1 = np.concatenate([ext2_deint, zeros_tail], axis=1)
        ext1, _ = _log_map_batch(trellis, sys_llr, par1_llr, apriori1,
                                 terminated=True)
        apriori2 = interleaver.interleave(ext1[:, :n])
        ext2, app2 = _log_map_batch(trellis, sys2, par2_llr, apriori2,
                                    terminated=False)
        ext2_deint = interleaver.deinterleave(ext2)
        app2_deint = interleaver.deinterleave(app2)
        decisions[it] = app2_deint < 0
        aposteriori[it] = app2_deint
    return decisions, aposteriori


def turbo_decode(inp: DecoderInput) -> DecodeResult:
    """Decode one block; see DecoderInput for the stream layout."""
    sys_llr = np.asarray(inp.sys_llr, dtype=np.float64)
    par1_llr = np.asarray(inp.par1_llr, dtype=np.float64)
    par2_llr = np.asarray(inp.par2_llr, dtype=np.float64)
    _check_finite(sys_llr, par1_llr, par2_llr)
    dec, app = _turbo_decode_batch(
        inp.trellis, inp.interleaver, sys_llr[None, :], par1_llr[None, :],
        par2_llr[None, :], inp.iterations)
    return DecodeResult(decisions=dec[:, 0, :], aposteriori=app[:, 0, :])
