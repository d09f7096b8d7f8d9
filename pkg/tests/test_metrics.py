import math

import numpy as np
import pytest

from polarflip import (
    AlphaExact,
    AlphaRelu,
    BetaExact,
    BetaRelu,
    EMPTY_FLIP_SET,
    FlipSet,
    format_metric,
    p_estimate,
    parse_metric,
    q_alpha_exact,
    q_alpha_relu,
    q_beta_exact,
    q_beta_relu,
    select_candidates,
    softplus,
)
from polarflip import ScTrace

from oracles import (
    q_alpha_prob_domain,
    q_beta_prob_domain,
    random_flip_set,
    random_trace,
)


def trace_with(code, info_llrs):
    """Trace whose non-frozen decision LLRs are the given values."""
    d = np.zeros(code.N)
    d[code.info_set] = info_llrs
    u = (d < 0).astype(np.uint8)
    u[code.frozen_mask] = 0
    return ScTrace(u, d, np.ones(code.N, dtype=np.int8))


def test_p_estimate_reference_points():
    assert p_estimate(0.0) == 0.5
    assert p_estimate(math.log(3)) == pytest.approx(0.75, rel=1e-12)
    assert p_estimate(-math.log(3)) == pytest.approx(0.75, rel=1e-12)
    assert p_estimate(40.0) == pytest.approx(1.0, abs=1e-15)


def test_softplus_stability():
    xs = np.array([-30.0, -5.0, -1e-9, 0.0, 1e-9, 5.0, 30.0])
    naive = np.log1p(np.exp(xs))
    assert np.allclose(softplus(xs), naive, rtol=0, atol=1e-12)
    big = softplus(np.array([1e6, -1e6]))
    assert big[0] == 1e6 and big[1] == 0.0 and np.isfinite(big).all()


def test_q_alpha_exact_zero_llrs(p8):
    tr = trace_with(p8, np.zeros(5))
    alpha = 0.3367
    # every |L| = 0: each of the m info bits at or before the flip adds ln2/a
    val = q_alpha_exact(tr, FlipSet((7,)), p8, alpha)
    assert val == pytest.approx(5 * math.log(2) / alpha, rel=1e-12)
    val = q_alpha_exact(tr, FlipSet((3,)), p8, alpha)
    assert val == pytest.approx(1 * math.log(2) / alpha, rel=1e-12)


def test_q_alpha_exact_single_bit(p8):
    t = 2.5
    alpha = 0.5
    tr = trace_with(p8, np.array([t, 9.0, 9.0, 9.0, 9.0]))
    got = q_alpha_exact(tr, FlipSet((3,)), p8, alpha)
    assert got == pytest.approx(math.log1p(math.exp(-alpha * t)) / alpha + t, rel=1e-12)


def test_q_alpha_exact_probability_oracle(p8, fixture_code):
    rng = np.random.default_rng(30)
    for code in (p8, fixture_code):
        for _ in range(300):
            tr = random_trace(code, rng)
            E = random_flip_set(code, rng)
            alpha = float(rng.uniform(0.1, 1.5))
            want = q_alpha_prob_domain(tr, E.indices, code, alpha)
            got = q_alpha_exact(tr, E, code, alpha)
            assert got == pytest.approx(want, rel=1e-9)


def test_q_alpha_relu_is_plain_sum(p8):
    tr = trace_with(p8, np.array([4.0, -3.2, 1.0, -2.0, 5.0]))
    assert q_alpha_relu(tr, FlipSet((4,))) == pytest.approx(3.2, rel=1e-12)
    assert q_alpha_relu(tr, FlipSet((5, 6))) == pytest.approx(3.0, rel=1e-12)


def test_q_alpha_relu_collapse_exact_equality(fixture_code):
    # evaluating the unsimplified relu form at several scale parameters
    # gives literally the same number: the scale term vanishes identically
    rng = np.random.default_rng(31)
    for _ in range(200):
        tr = random_trace(fixture_code, rng)
        E = random_flip_set(fixture_code, rng)
        a = np.abs(tr.decision_llrs[fixture_code.info_set])
        r = int(np.searchsorted(fixture_code.info_set, E.indices[-1], side="right"))
        flipped = np.abs(tr.decision_llrs[np.asarray(E.indices)]).sum()
        vals = []
        for alpha in (0.1, 0.3367, 1.0):
            relu_head = np.maximum(-alpha * a[:r], 0.0).sum() / alpha
            vals.append(relu_head + flipped)
        assert vals[0] == vals[1] == vals[2] == q_alpha_relu(tr, E)


def test_q_beta_exact_equal_llrs(p8):
    beta = 1.7
    tr = trace_with(p8, np.full(5, beta))
    got = q_beta_exact(tr, FlipSet((7,)), p8, beta)
    assert got == pytest.approx(5 * math.log(2) + beta, rel=1e-12)


def test_q_beta_exact_probability_oracle(p8, fixture_code):
    rng = np.random.default_rng(32)
    for code in (p8, fixture_code):
        for _ in range(300):
            tr = random_trace(code, rng)
            E = random_flip_set(code, rng)
            beta = float(rng.uniform(0.3, 4.0))
            want = q_beta_prob_domain(tr, E.indices, code, beta)
            got = q_beta_exact(tr, E, code, beta)
            assert got == pytest.approx(want, rel=1e-9)


def test_q_beta_exact_published_offset(p8):
    # the trained offset reported for the exact metric at first order
    beta = 2.206
    tr = trace_with(p8, np.array([1.0, 9.0, 9.0, 9.0, 9.0]))
    want = q_beta_prob_domain(tr, (3,), p8, beta)
    assert q_beta_exact(tr, FlipSet((3,)), p8, beta) == pytest.approx(want, rel=1e-12)


def test_q_beta_relu_hand_example(p8):
    # |L| = 1 at the flip, one earlier info bit at 0.5, offset 2.801:
    # (2.801-1) + (2.801-0.5) + 1 = 5.102
    beta = 2.801
    tr = trace_with(p8, np.array([0.5, 1.0, 9.0, 9.0, 9.0]))
    got = q_beta_relu(tr, FlipSet((4,)), p8, beta)
    assert got == pytest.approx(5.102, rel=1e-12)


def test_q_beta_relu_clamps_when_llrs_large(p8):
    tr = trace_with(p8, np.array([5.0, 6.0, 7.0, 8.0, 9.0]))
    got = q_beta_relu(tr, FlipSet((3, 5)), p8, 2.0)
    assert got == pytest.approx(5.0 + 7.0, rel=1e-12)


def test_beta_exact_relu_gap_bound(p8, fixture_code):
    rng = np.random.default_rng(33)
    for code in (p8, fixture_code):
        for _ in range(300):
            tr = random_trace(code, rng)
            E = random_flip_set(code, rng)
            beta = float(rng.uniform(0.3, 4.0))
            gap = q_beta_exact(tr, E, code, beta) - q_beta_relu(tr, E, code, beta)
            m = int(np.searchsorted(code.info_set, E.indices[-1], side="right"))
            assert 0.0 < gap <= m * math.log(2) + 1e-12


def test_empty_flip_set_rejected(p8):
    tr = trace_with(p8, np.zeros(5))
    with pytest.raises(ValueError):
        q_alpha_exact(tr, EMPTY_FLIP_SET, p8, 1.0)
    with pytest.raises(ValueError):
        q_alpha_relu(tr, EMPTY_FLIP_SET)
    with pytest.raises(ValueError):
        q_beta_exact(tr, EMPTY_FLIP_SET, p8, 1.0)


def test_frozen_index_rejected(p8):
    tr = trace_with(p8, np.zeros(5))
    with pytest.raises(ValueError):
        q_alpha_exact(tr, FlipSet((0,)), p8, 1.0)


def test_select_candidates_relu_argmin(p8):
    tr = trace_with(p8, np.array([4.0, 0.2, 3.0, 1.0, 5.0]))
    ranked = select_candidates(tr, EMPTY_FLIP_SET, p8, AlphaRelu())
    assert ranked[0].indices == (4,)
    assert [c.indices[0] for c in ranked] == [4, 6, 5, 3, 7]


def test_select_candidates_tie_breaks_to_lower_index(p8):
    tr = trace_with(p8, np.array([2.0, 1.0, 1.0, 2.0, 3.0]))
    ranked = select_candidates(tr, EMPTY_FLIP_SET, p8, AlphaRelu())
    assert [c.indices[0] for c in ranked][:2] == [4, 5]


def test_select_candidates_respects_parent_boundary(p8):
    tr = trace_with(p8, np.array([1.0, 2.0, 3.0, 4.0, 5.0]))
    parent = FlipSet((5,), 0.0)
    ranked = select_candidates(tr, parent, p8, AlphaRelu())
    assert all(c.indices[0] == 5 and c.indices[1] > 5 for c in ranked)
    assert len(ranked) == 2
    exhausted = select_candidates(tr, FlipSet((7,), 0.0), p8, AlphaRelu())
    assert exhausted == []


def test_select_candidates_matches_q_functions(fixture_code):
    rng = np.random.default_rng(34)
    tr = random_trace(fixture_code, rng)
    parent = FlipSet((int(fixture_code.info_set[3]),), 0.0)
    for kind, q_of in [
        (AlphaExact(0.3367), lambda t, E: q_alpha_exact(t, E, fixture_code, 0.3367)),
        (AlphaRelu(), q_alpha_relu),
        (BetaExact((2.206, 1.225)), lambda t, E: q_beta_exact(t, E, fixture_code, 1.225)),
        (BetaRelu((2.801, 2.196)), lambda t, E: q_beta_relu(t, E, fixture_code, 2.196)),
    ]:
        for cand in select_candidates(tr, parent, fixture_code, kind)[:20]:
            assert cand.metric == pytest.approx(q_of(tr, cand), rel=1e-12)


def test_beta_ranking_matches_probability_argmax(fixture_code):
    rng = np.random.default_rng(35)
    for _ in range(20):
        tr = random_trace(fixture_code, rng, scale=2.0)
        ranked = select_candidates(tr, EMPTY_FLIP_SET, fixture_code, BetaExact((1.3,)))
        probs = [
            (-math.exp(-q_beta_prob_domain(tr, c.indices, fixture_code, 1.3)), c.indices)
            for c in ranked
        ]
        # most probable first means the probability sequence is nonincreasing
        values = [-p for p, _ in probs]
        assert all(a >= b - 1e-15 for a, b in zip(values, values[1:]))


def test_constant_shift_leaves_ranking_unchanged(fixture_code):
    rng = np.random.default_rng(36)
    tr = random_trace(fixture_code, rng)
    ranked = select_candidates(tr, EMPTY_FLIP_SET, fixture_code, BetaExact((2.206,)))
    beta = 2.206
    shifted = sorted(
        ((c.metric - 1 * beta, c.indices) for c in ranked),
        key=lambda t: (t[0], t[1]),
    )
    assert [i for _, i in shifted] == [c.indices for c in ranked]


def test_relu_scale_equivariance(fixture_code):
    rng = np.random.default_rng(37)
    tr = random_trace(fixture_code, rng)
    scaled = ScTrace(tr.u_hat, 3.0 * tr.decision_llrs, tr.flip_vector)
    base = select_candidates(tr, EMPTY_FLIP_SET, fixture_code, AlphaRelu())
    big = select_candidates(scaled, EMPTY_FLIP_SET, fixture_code, AlphaRelu())
    assert [c.indices for c in base] == [c.indices for c in big]
    for a, b in zip(base, big):
        assert b.metric == pytest.approx(3.0 * a.metric, rel=1e-12)


def test_metric_spec_round_trip():
    for spec in ["alpha-relu", "alpha-exact:0.3367", "beta-exact:2.206,1.225",
                 "beta-relu:2.801,2.196"]:
        assert format_metric(parse_metric(spec)) == spec
    with pytest.raises(ValueError):
        parse_metric("alpha-exact:-1")
    with pytest.raises(ValueError):
        parse_metric("beta-exact:")
    with pytest.raises(ValueError):
        parse_metric("nonsense")


def test_flip_set_validation():
    with pytest.raises(ValueError):
        FlipSet((5, 3))
    with pytest.raises(ValueError):
        FlipSet((4, 4))
    assert FlipSet((3, 5)).order == 2
