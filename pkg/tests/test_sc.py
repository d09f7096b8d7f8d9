import importlib.util

import numpy as np
import pytest

from polarflip import (
    ScWorkspace,
    build_code,
    build_flip_vector,
    encode,
    f,
    g,
    genie_decode,
    sc_decode,
    transmit,
    frame_rng,
)
from polarflip import _sc_py

from conftest import NO_CRC
from oracles import sc_reference

HAVE_CYTHON = importlib.util.find_spec("polarflip._sc_cy") is not None


def noiseless(x, mag=50.0):
    return (1.0 - 2.0 * np.asarray(x, dtype=float)) * mag


def test_f_examples():
    assert f(2.0, -3.0) == -2.0
    assert f(0.0, 5.0) == 0.0
    assert f(-1.5, -4.0) == 1.5


def test_g_examples_and_identity():
    assert g(1.5, 2.0, 0) == 3.5
    assert g(1.5, 2.0, 1) == 0.5
    rng = np.random.default_rng(0)
    for _ in range(100):
        a, b = rng.normal(size=2)
        assert g(a, b, 0) + g(a, b, 1) == pytest.approx(2 * b)


def test_noiseless_all_zero_frame(p8):
    trace = sc_decode(p8, noiseless(np.zeros(8)))
    assert not trace.u_hat.any()
    assert (trace.decision_llrs > 0).all()


def test_flip_inverts_first_info_bit(p8):
    flips = build_flip_vector((3,), p8)
    trace = sc_decode(p8, noiseless(np.zeros(8)), flips)
    assert trace.u_hat[3] == 1


def test_matches_recursive_reference_on_p8(p8):
    rng = np.random.default_rng(11)
    frozen = p8.frozen_mask
    for trial in range(1000):
        ch = rng.normal(0, 3, 8)
        tflip = np.where(rng.random(8) < 0.2, -1, 1).astype(np.int8)
        tflip[frozen] = 1
        trace = sc_decode(p8, ch, tflip)
        ref_u, ref_d = sc_reference(ch, frozen, tflip)
        assert np.array_equal(trace.u_hat, ref_u), trial
        assert np.allclose(trace.decision_llrs, ref_d, rtol=0, atol=1e-12), trial


def test_matches_recursive_reference_larger_sizes():
    rng = np.random.default_rng(12)
    for n in (4, 5, 6):
        N = 1 << n
        code = build_code(n, N // 2, NO_CRC, design_ebn0_db=1.0)
        for _ in range(100):
            ch = rng.normal(0, 2.5, N)
            trace = sc_decode(code, ch)
            ref_u, ref_d = sc_reference(ch, code.frozen_mask, np.ones(N, np.int8))
            assert np.array_equal(trace.u_hat, ref_u)
            assert np.allclose(trace.decision_llrs, ref_d, rtol=0, atol=1e-12)


def test_noiseless_identity_random_codewords():
    rng = np.random.default_rng(13)
    for n in range(1, 9):
        N = 1 << n
        K = max(1, N // 2)
        if K == N:
            continue
        code = build_code(n, K, NO_CRC, design_ebn0_db=2.0)
        for _ in range(50):
            payload = rng.integers(0, 2, K).astype(np.uint8)
            msg, x = encode(code, payload)
            frame = transmit(x, 1e-3, frame_rng(7, 0))
            trace = sc_decode(code, frame)
            assert np.array_equal(trace.u_hat, msg.u)


def test_first_info_flip_involution(fixture_code):
    # flipping only the first non-frozen bit cannot disturb earlier decisions
    code = fixture_code
    first = int(code.info_set[0])
    rng = np.random.default_rng(14)
    for trial in range(50):
        ch = rng.normal(0.5, 2.0, code.N)
        base = sc_decode(code, ch)
        if base.decision_llrs[first] == 0:
            continue
        flipped = sc_decode(code, ch, build_flip_vector((first,), code))
        assert flipped.u_hat[first] == base.u_hat[first] ^ 1
        assert np.array_equal(flipped.u_hat[:first], base.u_hat[:first])


def test_decision_llr_prefix_stability(fixture_code):
    code = fixture_code
    rng = np.random.default_rng(15)
    ch = rng.normal(0.7, 2.0, code.N)
    j = int(code.info_set[40])
    later = [int(i) for i in code.info_set[(60, 80),]]
    a = sc_decode(code, ch, build_flip_vector((j,), code))
    b = sc_decode(code, ch, build_flip_vector((j,) + tuple(later), code))
    # flip vectors agree strictly below the first divergence at later[0]
    k = later[0]
    assert np.array_equal(a.decision_llrs[:k], b.decision_llrs[:k])
    assert np.array_equal(a.u_hat[:k], b.u_hat[:k])


def test_genie_noiseless_frame(p8):
    msg, x = encode(p8, np.ones(5, dtype=np.uint8))
    ok, used = genie_decode(p8, noiseless(x), msg.u, 2)
    assert ok and used == 0


def test_genie_zero_budget_equals_plain_sc(fixture_code):
    code = fixture_code
    rng = np.random.default_rng(16)
    for trial in range(80):
        payload = rng.integers(0, 2, code.K).astype(np.uint8)
        msg, x = encode(code, payload)
        frame = transmit(x, 0.7, frame_rng(17, trial))
        trace = sc_decode(code, frame)
        ok, used = genie_decode(code, frame, msg.u, 0)
        assert ok == bool(np.array_equal(trace.u_hat, msg.u))
        assert used == 0


def test_genie_single_first_order_error(fixture_code):
    # find a frame whose plain-SC output has exactly one conditional first
    # error, then check the genie repairs it with one correction
    code = fixture_code
    found = 0
    for trial in range(400):
        rng = frame_rng(18, trial)
        payload = rng.integers(0, 2, code.K, dtype=np.uint8)
        msg, x = encode(code, payload)
        frame = transmit(x, 0.6, rng)
        ok0, _ = genie_decode(code, frame, msg.u, 0)
        if ok0:
            continue
        ok1, used = genie_decode(code, frame, msg.u, 1)
        if ok1:
            assert used == 1
            found += 1
            if found >= 5:
                break
    assert found >= 5, "simulation never produced a single-error frame"


def test_genie_success_sets_nest(fixture_code):
    code = fixture_code
    rng = np.random.default_rng(19)
    successes = {0: [], 1: [], 2: []}
    for trial in range(150):
        payload = rng.integers(0, 2, code.K).astype(np.uint8)
        msg, x = encode(code, payload)
        frame = transmit(x, 0.63, frame_rng(20, trial))
        for w in successes:
            ok, _ = genie_decode(code, frame, msg.u, w)
            successes[w].append(ok)
    for a, b in [(0, 1), (1, 2)]:
        for low, high in zip(successes[a], successes[b]):
            assert high or not low, "larger budget lost a frame"


@pytest.mark.skipif(not HAVE_CYTHON, reason="compiled kernel not built")
def test_backends_bitwise_identical():
    from polarflip import _sc_cy

    rng = np.random.default_rng(21)
    for n in (3, 6, 8):
        N = 1 << n
        frozen = (rng.random(N) < 0.45).astype(np.uint8)
        true_u = np.zeros(N, dtype=np.uint8)
        for _ in range(100):
            ch = rng.normal(0, 4, N)
            tflip = np.where(rng.random(N) < 0.1, -1, 1).astype(np.int8)
            tflip[frozen == 1] = 1
            results = []
            for mod in (_sc_py, _sc_cy):
                L = np.zeros((n + 1, N))
                B = np.zeros((n + 1, N), np.uint8)
                u = np.zeros(N, np.uint8)
                d = np.zeros(N)
                mod.sc_decode(ch, frozen, tflip, L, B, u, d)
                g_used = mod.genie_decode(ch, frozen, true_u, 2,
                                          L.copy(), B.copy(), u.copy(), d.copy())
                results.append((u.copy(), d.copy(), g_used))
            assert np.array_equal(results[0][0], results[1][0])
            assert np.array_equal(results[0][1], results[1][1])
            assert results[0][2] == results[1][2]


def test_workspace_reuse_is_clean(p8):
    ws = ScWorkspace(p8.n)
    a = sc_decode(p8, noiseless(np.zeros(8)), None, ws)
    dirty = np.array([3.0, -1, 2, -2, 1, -3, 4, -4])
    sc_decode(p8, dirty, None, ws)
    b = sc_decode(p8, noiseless(np.zeros(8)), None, ws)
    assert np.array_equal(a.u_hat, b.u_hat)
    assert np.array_equal(a.decision_llrs, b.decision_llrs)
