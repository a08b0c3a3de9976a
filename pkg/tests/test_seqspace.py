import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from approxlab.seqspace import (
    FiniteSeq,
    SpaceSpec,
    admissibility_a3_check,
    dilate,
    dilation_bound_check,
    lorentz_norm,
    lz_norm,
    norm,
    partial_norms,
    quasi_triangle_modulus,
    rearrange,
    solidity_check,
    truncated_norms,
)

# 40-digit values from tests/oracles.weighted_norm
LZ_4_2 = 5.240895868089001458
LZ_MIXED = 1.460402558684821495  # [0.3,0.9,0.1,0.5], p=1.5, r=0.7, gamma=0.5
LORENTZ_QUASI = 6.349091697296417021  # same sequence, p=0.5, r=2

nonneg = st.lists(st.floats(0, 100, allow_nan=False), min_size=1, max_size=40)
specs = st.sampled_from([SpaceSpec.lorentz(1, 1), SpaceSpec.lorentz(2, 0.5),
                         SpaceSpec.lorentz(0.5, 2), SpaceSpec.lz(1.5, 1, 1),
                         SpaceSpec.lorentz(math.inf, 0.5)])


@pytest.mark.parametrize("raw, expected", [
    ([1, 3, 2], [3, 2, 1]),
    ([5, 4, 1], [5, 4, 1]),
    ([2, 2, 0], [2, 2, 0]),
])
def test_rearrange_examples(raw, expected):
    out = rearrange(raw)
    assert out.tolist() == expected
    assert out.sorted_flag


def test_finite_seq_rejects_nan():
    with pytest.raises(ValueError):
        FiniteSeq.of([1.0, float("nan")])


@pytest.mark.parametrize("seq, p, r, expected", [
    ([1, 1, 1], 1, 1, 3.0),
    ([1, 1, 1, 1], 2, 1, math.sqrt(10)),
    ([1] * 8, math.inf, 0.5, math.sqrt(8)),
    ([2, 3, 1], 1, 1, 6.0),
])
def test_lorentz_norm_examples(seq, p, r, expected):
    assert lorentz_norm(seq, p, r) == pytest.approx(expected, rel=1e-14)


def test_lz_norm_examples():
    assert lz_norm([1, 1], 1, 1, 0) == pytest.approx(2.0, rel=1e-14)
    assert lz_norm([1, 1], 1, 1, 1) == pytest.approx(2 + math.log(2), rel=1e-14)
    # 5.24082 in the source table is a rounding slip; the defining sum gives 5.240896
    assert lz_norm([4, 2], 2, 0.5, 1) == pytest.approx(LZ_4_2, rel=1e-13)


def test_norm_against_high_precision_oracle():
    seq = [0.3, 0.9, 0.1, 0.5]
    assert lz_norm(seq, 1.5, 0.7, 0.5) == pytest.approx(LZ_MIXED, rel=1e-13)
    assert lorentz_norm(seq, 0.5, 2) == pytest.approx(LORENTZ_QUASI, rel=1e-13)


def test_spec_parse_roundtrip():
    for text in ["l:1:2", "l:inf:0.5", "lz:2:1:0.5"]:
        spec = SpaceSpec.parse(text)
        assert SpaceSpec.parse(spec.label()) == spec
        assert SpaceSpec.from_dict(spec.to_dict()) == spec
    with pytest.raises(ValueError):
        SpaceSpec.parse("l:-1:1")
    with pytest.raises(ValueError):
        SpaceSpec.lorentz(1, 0)


@given(nonneg, st.floats(0.3, 4), st.floats(0.2, 3))
def test_lorentz_equals_lz_with_zero_gamma(seq, p, r):
    a = norm(seq, SpaceSpec.lorentz(p, r))
    b = norm(seq, SpaceSpec.lz(p, r, 0.0))
    assert a == pytest.approx(b, rel=1e-12, abs=1e-300)


@given(nonneg, specs)
def test_partial_norms_non_decreasing(seq, spec):
    parts = partial_norms(seq, spec)
    assert np.all(np.diff(parts) >= -1e-12 * np.maximum(parts[1:], 1))


@given(nonneg, specs)
def test_norm_is_rearrangement_invariant(seq, spec):
    shuffled = list(reversed(seq))
    assert norm(seq, spec) == pytest.approx(norm(shuffled, spec), rel=1e-12, abs=1e-300)


@given(nonneg, nonneg, specs)
@settings(max_examples=60)
def test_quasi_triangle_modulus(a, b, spec):
    m = max(len(a), len(b))
    a = np.pad(a, (0, m - len(a)))
    b = np.pad(b, (0, m - len(b)))
    lhs = norm(a + b, spec)
    rhs = quasi_triangle_modulus(spec) * (norm(a, spec) + norm(b, spec))
    assert lhs <= rhs * (1 + 1e-12) + 1e-300


def test_geometric_sequence_converges():
    v = truncated_norms(0.5 ** np.arange(1, 31), SpaceSpec.lorentz(1, 1))
    assert v.converged
    assert v.converged_by <= 30
    assert v.value == pytest.approx(1.0, abs=1e-9)


def test_constant_prefix_diverges_linearly():
    v = truncated_norms(np.ones(4096), SpaceSpec.lorentz(1, 1))
    assert v.diverging
    assert v.rate.kind == "power"
    assert v.rate.exponent == pytest.approx(1.0, abs=0.01)


def test_log_boundary_diverges_like_loglog():
    n = np.arange(1, 2 ** 14 + 1)
    v = truncated_norms(1 / (n * (1 + np.log(n))), SpaceSpec.lorentz(1, 1))
    assert v.diverging
    assert v.rate.kind == "loglog"


def test_log_squared_converges():
    n = np.arange(1, 2 ** 14 + 1)
    v = truncated_norms(1 / (n * (1 + np.log(n)) ** 2), SpaceSpec.lorentz(1, 1))
    assert v.converged


def test_membership_invariants_for_increment_evidence():
    v = truncated_norms(0.5 ** np.arange(1, 61), SpaceSpec.lorentz(2, 1))
    assert v.evidence == "increment"
    parts = v.partial_norms
    tail = parts[int(0.75 * len(parts)):]
    assert (tail[-1] - tail[0]) / tail[-1] < 1e-6
    assert v.to_dict()["summary"].startswith("ConvergedBy")


def test_solidity_examples():
    spec = SpaceSpec.lorentz(1, 1)
    assert solidity_check([1, 0], [1, 1], spec)
    assert solidity_check([0.4, 0.2], [0.4, 0.2], spec)
    with pytest.raises(ValueError):
        solidity_check([2, 0], [1, 1], spec)


def test_solidity_random_pairs():
    rng = np.random.default_rng(11)
    grid = [SpaceSpec.lorentz(1, 1), SpaceSpec.lorentz(2, 0.5), SpaceSpec.lorentz(0.5, 1),
            SpaceSpec.lz(1, 1, 1), SpaceSpec.lorentz(math.inf, 1)]
    for spec in grid:
        for _ in range(100):
            b = rng.exponential(size=rng.integers(1, 30))
            a = b * rng.uniform(size=b.size)
            assert solidity_check(a, b, spec)


def test_a3_examples():
    spec = SpaceSpec.lorentz(1, 1)
    geo = admissibility_a3_check(spec, [0.5 ** np.arange(2 ** k) for k in range(2, 15)])
    assert geo.constant <= 4
    ones = admissibility_a3_check(spec, [np.ones(2 ** 14)])
    assert ones.constant == pytest.approx(2.0, rel=1e-3)
    n = np.arange(1, 2 ** 14 + 1, dtype=float)
    sq = admissibility_a3_check(spec, [n ** -2])
    assert math.isfinite(sq.constant) and sq.constant < 10


def test_dilate_examples():
    assert dilate([8, 4, 2, 1], 2).tolist() == [8, 8, 8, 4, 4, 2, 2, 1]
    assert dilate([5, 3, 1], 1).tolist() == [5, 3, 1]
    # floor with the index clamped at 1; the table's [3,3,3,3,1,1] is inconsistent with it
    assert dilate([3, 1], 3).tolist() == [3, 3, 3, 3, 3, 1]
    with pytest.raises(ValueError):
        dilate([1, 2], 2)


def test_dilation_bound_examples():
    rep = dilation_bound_check(0.5 ** np.arange(20), 3, 2, 1)
    assert rep.constant == pytest.approx(24.0)
    assert rep.holds
    rep1 = dilation_bound_check([3, 2, 1], 1, 2, 1)
    # C = 1 leaves the sequence unchanged, so lhs is the undilated sum itself
    assert rep1.lhs == pytest.approx(rep1.rhs / rep1.constant)
    assert rep1.holds


def test_dilation_bound_clamp_counterexample():
    # the clamped prefix copies a_1 [C] extra times and can exceed the constant
    rep = dilation_bound_check([1, 0, 0, 0], 3, 1, 1)
    assert rep.lhs_clamped == pytest.approx(5.0) and rep.rhs == pytest.approx(4.0)
    assert not rep.holds_clamped
    assert rep.lhs == pytest.approx(3.0) and rep.holds


@settings(max_examples=60)
@given(st.lists(st.floats(0, 10), min_size=1, max_size=60), st.floats(0.5, 8),
       st.sampled_from([(1, 1), (2, 1), (0.5, 1), (1, 0.5), (2, 2), (0.5, 3)]))
def test_dilation_bound_property(raw, c, pr):
    seq = sorted(raw, reverse=True)
    assert dilation_bound_check(seq, c, *pr).holds
