import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import ROWS, code_for
from tbcode import gf2_core as gf2
from tbcode.decoder import (BpOsdDecoder, DecoderConfig, InconsistentSyndrome, OracleConfig,
                            OracleDecoder, bp_decode, make_decoder, oracle_min_weight_decode,
                            osd_postprocess)

REP = np.array([[1, 1, 0], [0, 1, 1]], dtype=np.uint8)


def syndrome(H, e):
    return ((H.astype(np.int64) @ e) & 1).astype(np.uint8)


def test_zero_syndrome_converges_immediately():
    H = code_for("w5_30_4_5").h_x.to_dense()
    out = BpOsdDecoder(H, 0.01).decode_outcome(np.zeros(H.shape[0], np.uint8))
    assert out.bp_converged and out.iterations_used == 1
    assert not out.estimate.any()


@pytest.mark.parametrize("variant", ["sum_product", "min_sum"])
def test_repetition_code_example(variant):
    s = np.array([1, 0], np.uint8)
    marg, hard, ok = bp_decode(REP, s, 0.1, DecoderConfig(variant))
    assert ok and hard.tolist() == [1, 0, 0]
    assert marg[0] > 0.5 > marg[1]
    assert osd_postprocess(REP, s, np.full(3, 0.1), osd_order=0).tolist() == [1, 0, 0]


def test_osd_prefers_the_lighter_cost():
    # syndrome (1, 1) admits e = 010 and e = 101; the middle bit is cheaper
    assert osd_postprocess(REP, np.array([1, 1], np.uint8), np.full(3, 0.1), 2).tolist() == [0, 1, 0]


def test_single_errors_are_corrected_by_bp_and_by_oracle():
    H = code_for("w5_30_4_5").h_x.to_dense()
    n = H.shape[1]
    bp = BpOsdDecoder(H, 0.01)
    oracle = OracleDecoder(H, 1)
    for q in range(n):
        e = np.zeros(n, np.uint8)
        e[q] = 1
        s = syndrome(H, e)
        for est in (bp.decode(s), oracle.decode(s), oracle_min_weight_decode(H, s, 1)):
            assert np.array_equal(syndrome(H, est), s)
            assert est.sum() == 1


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 29), min_size=1, max_size=8), st.integers(0, 4))
def test_osd_output_always_satisfies_the_syndrome(supp, order):
    H = code_for("w6_30_6_4").h_z.to_dense()
    e = np.zeros(30, np.uint8)
    e[supp] = 1
    s = syndrome(H, e)
    rng = np.random.default_rng(len(supp))
    est = osd_postprocess(H, s, rng.uniform(0.01, 0.5, 30), order)
    assert np.array_equal(syndrome(H, est), s)
    dec = BpOsdDecoder(H, 0.05, DecoderConfig(max_iterations=3, osd_order=order))
    assert np.array_equal(syndrome(H, dec.decode(s)), s)


def test_inconsistent_syndrome_raises():
    H = np.array([[1, 1], [1, 1]], np.uint8)
    with pytest.raises(InconsistentSyndrome):
        osd_postprocess(H, np.array([1, 0], np.uint8), np.full(2, 0.1))


def test_oracle_returns_none_beyond_w_max():
    s = np.array([1, 0], np.uint8)
    assert oracle_min_weight_decode(REP, s, 0) is None
    assert oracle_min_weight_decode(REP, np.zeros(2, np.uint8), 0).tolist() == [0, 0, 0]
    assert oracle_min_weight_decode(REP, s, 1).tolist() == [1, 0, 0]


def test_oracle_table_matches_direct_search():
    H = code_for("w5_30_4_5").h_z.to_dense()
    table = OracleDecoder(H, 2)
    rng = np.random.default_rng(5)
    for _ in range(50):
        e = np.zeros(30, np.uint8)
        e[rng.choice(30, 2, replace=False)] = 1
        s = syndrome(H, e)
        assert np.array_equal(table.decode(s), oracle_min_weight_decode(H, s, 2))


def test_batch_decoding_matches_single_and_is_deterministic():
    H = code_for("w5_30_4_5").h_x.to_dense()
    rng = np.random.default_rng(0)
    E = (rng.random((40, 30)) < 0.08).astype(np.uint8)
    S = (E.astype(np.int64) @ H.T.astype(np.int64) & 1).astype(np.uint8)
    for cfg in (DecoderConfig(), DecoderConfig("min_sum", min_sum_scale=0.75)):
        dec = BpOsdDecoder(H, 0.05, cfg)
        batch = dec.decode_batch(S)
        assert np.array_equal(batch, BpOsdDecoder(H, 0.05, cfg).decode_batch(S))
        for row in range(0, 40, 7):
            assert np.array_equal(batch[row], dec.decode(S[row]))
        assert np.array_equal(batch.astype(np.int64) @ H.T.astype(np.int64) & 1, S)


def test_config_validation():
    for bad in (dict(max_iterations=0), dict(min_sum_scale=0), dict(osd_order=-1), dict(bp_variant="x")):
        with pytest.raises(ValueError):
            DecoderConfig(**bad)
    with pytest.raises(ValueError):
        BpOsdDecoder(REP, 0.0)


def test_make_decoder_dispatch():
    assert isinstance(make_decoder(REP, 0.1, OracleConfig(1)), OracleDecoder)
    assert isinstance(make_decoder(REP, 0.1, DecoderConfig()), BpOsdDecoder)


@pytest.mark.parametrize("row_id", sorted(ROWS))
def test_every_single_qubit_error_is_corrected(row_id):
    code = code_for(row_id)
    n = code.n
    errors = np.eye(n, dtype=np.uint8)
    for h_check, h_stab in ((code.h_x, code.h_z), (code.h_z, code.h_x)):
        H = h_check.to_dense()
        dec = BpOsdDecoder(H, 2e-3 / 3)
        S = (errors.astype(np.int64) @ H.T.astype(np.int64) & 1).astype(np.uint8)
        residual = dec.decode_batch(S) ^ errors
        stab = gf2.row_echelon(h_stab)
        assert all(stab.contains(gf2.BinaryVector.from_dense(r)) for r in residual)
