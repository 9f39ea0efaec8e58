from fractions import Fraction

import numpy as np
import pytest

from prpturbo import (
    PuncturingError,
    PuncturingPattern,
    apply_pattern,
    build_prp_pattern,
    depuncture_llr,
    feedback_period,
    impulse_parity,
    parse_generator_pair,
    pattern_rate,
)

from helpers import enumerate_primitive_feedback

EQ21 = [[1, 0, 0], [0, 1, 1], [1, 1, 1]]


def test_prp_pattern_five_seven_worked_example():
    pattern = build_prp_pattern(parse_generator_pair("5", "7"))
    assert pattern.rows.tolist() == EQ21
    assert pattern.period == 3


def test_prp_pattern_seventeen_fifteen():
    gp = parse_generator_pair("17", "15")
    pattern = build_prp_pattern(gp)
    assert pattern.period == 7
    assert pattern.rows[1].sum() == 4
    assert pattern.rows[0].sum() == 3
    y = impulse_parity(gp, 8)
    assert pattern.rows[1].tolist() == np.roll(y[1:], 1).tolist()


def test_prp_pattern_rejects_non_primitive():
    with pytest.raises(PuncturingError):
        build_prp_pattern(parse_generator_pair("15", "17"))


def test_prp_pattern_structure_all_primitive():
    for nu in range(2, 7):
        L = (1 << nu) - 1
        for g_r in enumerate_primitive_feedback(nu):
            gp = parse_generator_pair(f"{g_r ^ 0b10:o}", f"{g_r:o}")
            p = build_prp_pattern(gp)
            assert p.period == L == feedback_period(gp)
            assert np.array_equal(p.rows[0], 1 - p.rows[1])
            assert p.rows[2].all()
            assert p.rows[1].sum() == 1 << (nu - 1)
            assert pattern_rate(p) == Fraction(1, 2)


def test_pattern_rate_examples():
    assert pattern_rate(PuncturingPattern.from_rows(EQ21)) == Fraction(1, 2)
    assert pattern_rate(PuncturingPattern.all_ones(4)) == Fraction(1, 3)
    rows = [[1, 1], [0, 0], [1, 1]]
    assert pattern_rate(PuncturingPattern.from_rows(rows)) == Fraction(1, 2)


def test_pattern_validation():
    with pytest.raises(PuncturingError):
        PuncturingPattern.from_rows([[1, 0], [0, 0], [1, 0]])  # empty column
    with pytest.raises(PuncturingError):
        PuncturingPattern.from_rows([[1, 2], [1, 1], [1, 1]])
    with pytest.raises(PuncturingError):
        PuncturingPattern.from_rows([[1, 1], [1, 1]])


def test_apply_pattern_one_period():
    p = PuncturingPattern.from_rows(EQ21)
    streams = np.arange(9).reshape(3, 3)
    symbols, pos = apply_pattern(streams, p)
    assert symbols.size == 6
    assert len(pos) == 6


def test_apply_pattern_all_ones_is_time_multiplex():
    p = PuncturingPattern.all_ones()
    streams = np.array([[1, 2, 3], [4, 5, 6], [7, 8, 9]])
    symbols, pos = apply_pattern(streams, p)
    assert symbols.tolist() == [1, 4, 7, 2, 5, 8, 3, 6, 9]
    assert pos == [(0, 0), (1, 0), (2, 0), (0, 1), (1, 1), (2, 1),
                   (0, 2), (1, 2), (2, 2)]


def test_apply_pattern_single_step():
    p = PuncturingPattern.from_rows(EQ21)
    symbols, pos = apply_pattern(np.array([[1], [1], [1]]), p)
    assert symbols.tolist() == [1, 1]
    assert pos == [(0, 0), (2, 0)]


def test_apply_pattern_length_mismatch():
    p = PuncturingPattern.from_rows(EQ21)
    with pytest.raises(PuncturingError):
        apply_pattern(np.zeros((2, 5)), p)


def test_depuncture_positions():
    p = PuncturingPattern.from_rows(EQ21)
    streams = depuncture_llr([1., 2., 3., 4., 5., 6.], p, 3)
    assert streams[0].tolist() == [1., 0., 0.]
    assert streams[1].tolist() == [0., 3., 5.]
    assert streams[2].tolist() == [2., 4., 6.]


def test_depuncture_roundtrip():
    rng = np.random.default_rng(0)
    p = build_prp_pattern(parse_generator_pair("17", "15"))
    streams = rng.normal(size=(3, 25))
    symbols, _ = apply_pattern(streams, p)
    rebuilt = depuncture_llr(symbols, p, 25)
    again, _ = apply_pattern(rebuilt, p)
    assert np.array_equal(symbols, again)
    # kept positions carry the original values, the rest are zero
    mask = rebuilt != 0
    assert np.allclose(streams[mask], rebuilt[mask])


def test_depuncture_all_ones_inverts_apply():
    rng = np.random.default_rng(1)
    p = PuncturingPattern.all_ones()
    streams = rng.normal(size=(3, 11))
    symbols, _ = apply_pattern(streams, p)
    assert np.array_equal(depuncture_llr(symbols, p, 11), streams)


def test_depuncture_length_mismatch():
    p = PuncturingPattern.from_rows(EQ21)
    with pytest.raises(PuncturingError):
        depuncture_llr(np.zeros(5), p, 3)


def test_pattern_text_roundtrip():
    p = PuncturingPattern.from_rows(EQ21)
    assert p.to_text() == "100\n011\n111"
    assert PuncturingPattern.from_text("100 / 011 / 111").rows.tolist() == EQ21
    assert PuncturingPattern.from_text(p.to_text()).rows.tolist() == EQ21
    with pytest.raises(PuncturingError):
        PuncturingPattern.from_text("10 / 011 / 111")
