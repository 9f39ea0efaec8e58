"""Puncturing patterns for rate-1/3 parallel concatenated codes.

A pattern is a 3xM binary matrix applied periodically to the three
output streams (systematic, parity 1, parity 2): a 0 deletes the bit, a
1 transmits it. Column 1 is active at time step 0 and the schedule
repeats with period M.

The pseudo-random pattern takes the pseudo-random block of the
encoder's impulse parity (the L bits after the leading one), circularly
shifts it right by one to form row 2, complements it to form row 1 and
leaves the second parity stream untouched (row 3 all ones). By
complementarity the resulting rate is exactly 1/2.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .rsc import GeneratorPair, feedback_period, impulse_parity, is_primitive


class PuncturingError(ValueError):
    """Pattern construction or application rejected."""


@dataclass(frozen=True)
class PuncturingPattern:
    """3xM binary matrix; rows puncture (systematic, parity1, parity2)."""

    rows: np.ndarray
    period: int

    def __post_init__(self):
        self.rows.setflags(write=False)

    @classmethod
    def from_rows(cls, rows) -> "PuncturingPattern":
        mat = np.asarray(rows, dtype=np.int64)
        if mat.ndim != 2 or mat.shape[0] != 3 or mat.shape[1] < 1:
            raise PuncturingError("pattern must be a 3xM matrix with M >= 1")
        if np.any((mat != 0) & (mat != 1)):
            raise PuncturingError("pattern entries must be 0 or 1")
        if np.any(mat.sum(axis=0) == 0):
            raise PuncturingError("pattern erases a whole time step")
        return cls(rows=mat, period=mat.shape[1])

    @classmethod
    def all_ones(cls, period: int = 1) -> "PuncturingPattern":
        return cls.from_rows(np.ones((3, period), dtype=np.int64))

    def to_text(self) -> str:
        return "\n".join("".join(str(b) for b in row) for row in self.rows)

    @classmethod
    def from_text(cls, text: str) -> "PuncturingPattern":
        parts = [p.strip() for p in text.replace("/", "\n").splitlines()
                 if p.strip()]
        if len(parts) != 3 or len({len(p) for p in parts}) != 1:
            raise PuncturingError("pattern text must hold 3 equal-length rows")
        try:
            rows = [[int(c) for c in p] for p in parts]
        except ValueError as exc:
            raise PuncturingError(f"bad pattern text: {exc}") from None
        return cls.from_rows(rows)


def build_prp_pattern(gp: GeneratorPair) -> PuncturingPattern:
    """Pseudo-random puncturing pattern of a generator pair.

    Requires a primitive feedback polynomial: only then is the impulse
    parity tail a maximal-length pseudo-random sequence.
    """
    if not is_primitive(gp):
        raise PuncturingError(
            f"feedback polynomial of {gp.octal_display} is not primitive "
            f"(period {feedback_period(gp)} != 2^{gp.nu}-1); a pseudo-random "
            "pattern exists only for primitive feedback polynomials"
        )
    L = feedback_period(gp)
    y = impulse_parity(gp, L + 1)
    pseudo_random = y[1:]
    row2 = np.roll(pseudo_random, 1)
    row1 = 1 - row2
    row3 = np.ones(L, dtype=np.int64)
    return PuncturingPattern.from_rows(np.stack([row1, row2, row3]))


def pattern_rate(p: PuncturingPattern) -> Fraction:
    """Code rate produced by the pattern: M input bits per kept bits."""
    return Fraction(p.period, int(p.rows.sum()))


def apply_pattern(streams, p: PuncturingPattern):
    """Puncture three equal-length parallel streams.

    Returns (symbols, position_map): at each time step the active column
    keeps the bits whose entry is 1, emitted in row order; the map lists
    (stream_index, time) per emitted symbol.
    """
    mat = np.asarray(streams)
    if mat.ndim != 2 or mat.shape[0] != 3:
        raise PuncturingError("expected three parallel streams")
    n_total = mat.shape[1]
    keep = _keep_mask(p, n_total)
    symbols = mat.T[keep.T]
    times, rows = np.nonzero(keep.T)
    position_map = list(zip(rows.tolist(), times.tolist()))
    return symbols, position_map


def depuncture_llr(received, p: PuncturingPattern, n_total: int) -> np.ndarray:
    """Scatter received values back onto a 3 x n_total grid.

    Punctured positions get LLR 0 (no channel information); kept
    positions receive the values in transmission order.
    """
    r = np.asarray(received, dtype=np.float64).ravel()
    keep = _keep_mask(p, n_total)
    expected = int(keep.sum())
    if r.size != expected:
        raise PuncturingError(
            f"received length {r.size} != kept positions {expected}"
        )
    out = np.zeros((3, n_total), dtype=np.float64)
    out.T[keep.T] = r
    return out


def _keep_mask(p: PuncturingPattern, n_total: int) -> np.ndarray:
    # column (t mod M) is active at time t; truncated mid-period if M∤n
    reps = -(-n_total // p.period)
    return np.tile(p.rows, reps)[:, :n_total].astype(bool)
