"""Recursive systematic convolutional (RSC) constituent codes over GF(2).

A constituent encoder is described by a feedforward/feedback polynomial
pair given in octal, e.g. (5,7) or (17,15). Polynomials are read
most-significant-digit first, so the top bit of the octal value is the
coefficient of D^nu. The encoder recursion is

    a[t] = x[t] ^ sum_{i>=1} g_r[i] * a[t-i]      (feedback)
    y[t] = sum_{i>=0} g_f[i] * a[t-i]             (parity)

with the systematic output equal to the input bit. This convention
reproduces the impulse parity (1,1,1,0) of the (5,7) code, which is
pinned by a unit test.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MAX_MEMORY = 16


class GeneratorError(ValueError):
    """Ill-formed or unsupported generator polynomial pair."""


def _parity(x: int) -> int:
    return bin(x).count("1") & 1


@dataclass(frozen=True)
class GeneratorPair:
    """Feedforward/feedback polynomial pair of an RSC encoder.

    ``g_f`` and ``g_r`` store the polynomials as integers with bit i
    holding the coefficient of D^i; ``nu`` is the encoder memory.
    """

    g_f: int
    g_r: int
    nu: int

    @property
    def octal_display(self) -> str:
        return f"({self.g_f:o},{self.g_r:o})"

    def __str__(self) -> str:
        return self.octal_display


def parse_generator_pair(g_f_octal: str, g_r_octal: str) -> GeneratorPair:
    """Parse octal polynomial strings such as ("5", "7") or ("17", "15").

    Raises GeneratorError for malformed octal, unequal degrees, a feedback
    polynomial without the degree-0 tap, equal polynomials, or nu < 2.
    """
    values = []
    for name, text in (("g_f", g_f_octal), ("g_r", g_r_octal)):
        text = text.strip()
        if not text or any(c not in "01234567" for c in text):
            raise GeneratorError(f"{name}: {text!r} is not a valid octal string")
        values.append(int(text, 8))
    g_f, g_r = values
    if g_f == 0 or g_r == 0:
        raise GeneratorError("generator polynomials must be nonzero")
    if g_f.bit_length() != g_r.bit_length():
        raise GeneratorError(
            f"generator degrees differ: ({g_f:o})_8 vs ({g_r:o})_8"
        )
    if not g_r & 1:
        raise GeneratorError(
            f"feedback polynomial ({g_r:o})_8 has no degree-0 tap"
        )
    if g_f == g_r:
        raise GeneratorError(
            f"feedforward and feedback polynomials are equal: ({g_f:o})_8"
        )
    nu = g_r.bit_length() - 1
    if nu < 2:
        raise GeneratorError(f"memory size nu={nu} < 2 is not supported")
    if nu > MAX_MEMORY:
        raise GeneratorError(f"memory size nu={nu} exceeds cap {MAX_MEMORY}")
    return GeneratorPair(g_f=g_f, g_r=g_r, nu=nu)


@dataclass(frozen=True)
class Trellis:
    """State-transition tables of an RSC encoder with 2^nu states.

    The state packs the nu most recent feedback bits (a[t-1] ... a[t-nu])
    with a[t-1] in the most significant position. Tables are indexed
    [input_bit, state]; the systematic bit of every transition equals the
    input bit.
    """

    nu: int
    num_states: int
    next_state: np.ndarray
    parity: np.ndarray
    termination_input: np.ndarray
    prev_state: np.ndarray
    prev_input: np.ndarray

    def __post_init__(self):
        for a in (self.next_state, self.parity, self.termination_input,
                  self.prev_state, self.prev_input):
            a.setflags(write=False)


def _state_mask(poly: int, nu: int) -> int:
    # taps i=1..nu of `poly` mapped onto state bit positions (nu-i)
    mask = 0
    for i in range(1, nu + 1):
        if (poly >> i) & 1:
            mask |= 1 << (nu - i)
    return mask


def build_trellis(gp: GeneratorPair) -> Trellis:
    nu = gp.nu
    num_states = 1 << nu
    fb_mask = _state_mask(gp.g_r, nu)
    pf_mask = _state_mask(gp.g_f, nu)
    gf0 = gp.g_f & 1

    next_state = np.zeros((2, num_states), dtype=np.int64)
    parity = np.zeros((2, num_states), dtype=np.int64)
    termination = np.zeros(num_states, dtype=np.int64)
    for s in range(num_states):
        fb = _parity(s & fb_mask)
        termination[s] = fb
        for u in (0, 1):
            a = u ^ fb
            next_state[u, s] = (a << (nu - 1)) | (s >> 1)
            parity[u, s] = _parity(s & pf_mask) ^ (a & gf0)

    prev_state = np.zeros((2, num_states), dtype=np.int64)
    prev_input = np.zeros((2, num_states), dtype=np.int64)
    slot = [0] * num_states
    for u in (0, 1):
        for s in range(num_states):
            ns = int(next_state[u, s])
            prev_state[slot[ns], ns] = s
            prev_input[slot[ns], ns] = u
            slot[ns] += 1
    assert all(k == 2 for k in slot)

    return Trellis(nu=nu, num_states=num_states, next_state=next_state,
                   parity=parity, termination_input=termination,
                   prev_state=prev_state, prev_input=prev_input)


@dataclass(frozen=True)
class RscOutput:
    """Systematic and parity streams of one RSC encoding.

    ``parity`` covers the input steps plus any termination steps, so
    len(parity) == len(systematic) + len(tail).
    """

    systematic: np.ndarray
    parity: np.ndarray
    tail: np.ndarray
    final_state: int

    def __post_init__(self):
        for a in (self.systematic, self.parity, self.tail):
            a.setflags(write=False)


def encode_rsc(gp: GeneratorPair, bits, terminate: bool,
               trellis: Trellis | None = None) -> RscOutput:
    """Encode a bit sequence, optionally terminating to the zero state.

    With terminate=True, nu extra steps are driven by the feedback value
    so the register flushes to zero; the extra inputs are returned as
    ``tail`` and their parity is appended to ``parity``.
    """
    x = np.asarray(bits, dtype=np.int64).ravel()
    if x.size == 0:
        raise ValueError("input must be nonempty")
    if np.any((x != 0) & (x != 1)):
        raise ValueError("input must be binary")
    tr = trellis if trellis is not None else build_trellis(gp)

    parity = np.empty(x.size + (tr.nu if terminate else 0), dtype=np.int64)
    state = 0
    for t in range(x.size):
        u = int(x[t])
        parity[t] = tr.parity[u, state]
        state = int(tr.next_state[u, state])
    tail = np.empty(tr.nu if terminate else 0, dtype=np.int64)
    if terminate:
        for k in range(tr.nu):
            u = int(tr.termination_input[state])
            tail[k] = u
            parity[x.size + k] = tr.parity[u, state]
            state = int(tr.next_state[u, state])
        assert state == 0
    return RscOutput(systematic=x, parity=parity, tail=tail,
                     final_state=state)


def impulse_parity(gp: GeneratorPair, length: int) -> np.ndarray:
    """Parity response to the input (1, 0, 0, ...) of the given length.

    For a primitive feedback polynomial the bits after the leading one
    repeat with the polynomial period.
    """
    if length < 1:
        raise ValueError("length must be >= 1")
    x = np.zeros(length, dtype=np.int64)
    x[0] = 1
    return encode_rsc(gp, x, terminate=False).parity


def feedback_period(gp: GeneratorPair) -> int:
    """Period of the feedback register, found by cycling the free-running
    (zero-input) register from the impulse state until it recurs.

    Equals the period of g_r, i.e. the smallest L with g_r | D^L + 1;
    2^nu - 1 exactly when g_r is primitive.
    """
    nu = gp.nu
    fb_mask = _state_mask(gp.g_r, nu)
    start = 1 << (nu - 1)
    state = start
    for step in range(1, (1 << nu) + 1):
        state = (_parity(state & fb_mask) << (nu - 1)) | (state >> 1)
        if state == start:
            return step
    raise AssertionError("feedback register failed to recur")


def is_primitive(gp: GeneratorPair) -> bool:
    """True iff the feedback polynomial has maximal period 2^nu - 1."""
    return feedback_period(gp) == (1 << gp.nu) - 1
