import itertools
import math

import numpy as np
import pytest

from symcalc.bitmath import BitVec
from symcalc.codes import (
    MonomialCode,
    encode,
    monomial_to_linear,
    rm_code,
)
from symcalc.construct import ConstructionRequest, construct_partially_symmetric
from symcalc.decode import (
    correlation_metric,
    ml_decode_bruteforce,
    ml_lower_bound_flag,
    permutation_decode,
    sc_decode,
    scl_decode,
)
from symcalc.sim import Bec, BiAwgn, frame_rng, transmit


# ---------------------------------------------------------------------------
# Independent reference: a direct recursive SC decoder written against the
# textbook two-stage description, operating on (llr, per-position frozen flag)
# in the standard lower-triangular convention.  Deliberately scalar and slow.


def ref_check(a, b):
    return 2 * math.atanh(math.tanh(a / 2) * math.tanh(b / 2))


def ref_sc(llr, frozen):
    n = len(llr)
    if n == 1:
        u = 0 if frozen[0] else (1 if llr[0] < 0 else 0)
        return [u], [u]
    h = n // 2
    lam_minus = [ref_check(llr[i], llr[h + i]) for i in range(h)]
    cw0, u0 = ref_sc(lam_minus, frozen[:h])
    lam_plus = [llr[h + i] + (1 - 2 * cw0[i]) * llr[i] for i in range(h)]
    cw1, u1 = ref_sc(lam_plus, frozen[h:])
    return [a ^ b for a, b in zip(cw0, cw1)] + cw1, u0 + u1


def ref_sc_decode(code: MonomialCode, llr):
    """Map to the standard domain by complementing masks and reversing coords."""
    n = code.n
    frozen = [((n - 1) ^ s) not in code.gen_set for s in range(n)]
    cw_std, _ = ref_sc(list(llr[::-1]), frozen)
    return np.array(cw_std[::-1], dtype=np.uint8)


def random_frame(code, f, db=2.0, seed=99):
    gen = monomial_to_linear(code).generator_array()
    rng = frame_rng(seed, f)
    info = rng.integers(0, 2, size=code.k, dtype=np.uint8)
    cw = (info @ gen) & 1
    llr = transmit(BiAwgn(db), cw, rng, rate=code.k / code.n)
    return cw, llr


class TestScDecode:
    def test_noiseless_rm13(self):
        code = rm_code(1, 3)
        u = BitVec(8, 0b10111)
        cw = encode(code, u)
        llr = np.where(cw.to_array() == 0, np.inf, -np.inf)
        res = sc_decode(code, llr)
        assert res.codeword == cw and res.u == u

    def test_rate_one_is_hard_decision(self):
        code = MonomialCode(3, frozenset(range(8)))
        rng = np.random.RandomState(0)
        for _ in range(20):
            llr = rng.randn(8) * 3
            res = sc_decode(code, llr)
            assert res.codeword.to_array().tolist() == (llr < 0).astype(int).tolist()

    def test_worked_four_bit_instance(self):
        code = rm_code(1, 2)
        llr = np.array([1.2, -0.4, 0.7, -2.0])
        res = sc_decode(code, llr)
        assert res.codeword.to_array().tolist() == ref_sc_decode(code, llr).tolist()

    @pytest.mark.parametrize("m,k_seed", [(3, 1), (4, 2), (5, 3)])
    def test_matches_reference_on_random_codes(self, m, k_seed):
        rng = np.random.RandomState(k_seed)
        masks = frozenset(rng.choice(1 << m, size=(1 << m) // 2, replace=False).tolist())
        code = MonomialCode(m, masks)
        for f in range(25):
            _, llr = random_frame(code, f, db=0.5, seed=k_seed)
            assert sc_decode(code, llr).codeword.to_array().tolist() == ref_sc_decode(
                code, llr
            ).tolist()

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValueError):
            sc_decode(rm_code(1, 3), np.zeros(4))

    def test_output_is_codeword(self):
        code = construct_partially_symmetric(ConstructionRequest(m=4, t=3, k=8))
        for f in range(50):
            _, llr = random_frame(code, f, db=0.0)
            res = sc_decode(code, llr)
            assert encode(code, res.u) == res.codeword

    def test_layer_perm_output_is_codeword(self):
        code = construct_partially_symmetric(ConstructionRequest(m=4, t=3, k=8))
        for perm in itertools.permutations(range(4)):
            _, llr = random_frame(code, 7, db=0.0)
            res = sc_decode(code, llr, layer_perm=perm)
            assert encode(code, res.u) == res.codeword


class TestSclDecode:
    def test_list_size_one_equals_sc(self):
        code = construct_partially_symmetric(ConstructionRequest(m=4, t=3, k=8))
        for f in range(10_000):
            _, llr = random_frame(code, f, db=1.0, seed=5)
            a = sc_decode(code, llr)
            b = scl_decode(code, llr, 1)
            assert a.codeword == b.codeword and a.metric == b.metric

    def test_large_list_equals_ml(self):
        code = construct_partially_symmetric(ConstructionRequest(m=4, t=3, k=8))
        for f in range(300):
            _, llr = random_frame(code, f, db=2.0, seed=17)
            assert scl_decode(code, llr, 256).metric == ml_decode_bruteforce(code, llr).metric

    def test_metric_never_degrades_with_list_size(self):
        code = construct_partially_symmetric(ConstructionRequest(m=4, t=3, k=8))
        for f in range(200):
            _, llr = random_frame(code, f, db=0.5, seed=23)
            metrics = [scl_decode(code, llr, L).metric for L in (1, 2, 4, 8, 32)]
            assert all(b >= a for a, b in zip(metrics, metrics[1:]))

    def test_list_sorted_and_duplicate_free(self):
        code = construct_partially_symmetric(ConstructionRequest(m=4, t=3, k=8))
        for f in range(100):
            _, llr = random_frame(code, f, db=1.0, seed=31)
            res = scl_decode(code, llr, 16)
            metrics = [m for _, m in res.candidates]
            words = [c.payload for c, _ in res.candidates]
            assert metrics == sorted(metrics, reverse=True)
            assert len(set(words)) == len(words)

    def test_candidates_are_codewords(self):
        from symcalc.bitmath import BitMatrix, rank

        code = rm_code(1, 4)
        gen = monomial_to_linear(code)
        _, llr = random_frame(code, 3, db=0.0)
        res = scl_decode(code, llr, 8)
        for cand, _ in res.candidates:
            stacked = BitMatrix.from_rows(gen.generator.row_ints() + [cand.payload], 16)
            assert rank(stacked) == code.k


class TestPermutationDecode:
    def test_identity_equals_sc(self):
        code = construct_partially_symmetric(ConstructionRequest(m=4, t=3, k=8))
        for f in range(100):
            _, llr = random_frame(code, f, db=1.5, seed=41)
            a = permutation_decode(code, llr, [tuple(range(4))])
            b = sc_decode(code, llr)
            assert a.codeword == b.codeword

    def test_empty_perm_list_rejected(self):
        with pytest.raises(ValueError):
            permutation_decode(rm_code(1, 3), np.zeros(8), [])

    def test_candidates_are_codewords(self):
        from symcalc.bitmath import BitMatrix, rank

        code = construct_partially_symmetric(ConstructionRequest(m=4, t=3, k=8))
        gen_rows = monomial_to_linear(code).generator.row_ints()
        perms = list(itertools.permutations(range(4)))[:6]
        for f in range(50):
            _, llr = random_frame(code, f, db=1.0, seed=43)
            res = permutation_decode(code, llr, perms)
            assert encode(code, res.u) == res.codeword
            for cand, _ in res.candidates:
                assert rank(BitMatrix.from_rows(gen_rows + [cand.payload], 16)) == code.k

    def test_metric_at_least_each_single_perm(self):
        code = construct_partially_symmetric(ConstructionRequest(m=4, t=3, k=8))
        perms = list(itertools.permutations(range(4)))[:8]
        for f in range(50):
            _, llr = random_frame(code, f, db=0.5, seed=47)
            best = permutation_decode(code, llr, perms).metric
            singles = [sc_decode(code, llr, layer_perm=p).metric for p in perms]
            assert best == max(singles)


class TestMlDecode:
    def test_noiseless(self):
        code = rm_code(1, 3)
        cw = encode(code, BitVec(8, 0b10110))
        llr = np.where(cw.to_array() == 0, 50.0, -50.0)
        assert ml_decode_bruteforce(code, llr).codeword == cw

    def test_metric_dominates_scl(self):
        code = construct_partially_symmetric(ConstructionRequest(m=4, t=3, k=8))
        for f in range(100):
            _, llr = random_frame(code, f, db=1.0, seed=53)
            ml = ml_decode_bruteforce(code, llr).metric
            for L in (1, 4, 16):
                assert ml >= scl_decode(code, llr, L).metric

    def test_dimension_guard(self):
        code = MonomialCode(5, frozenset(range(32)))
        with pytest.raises(ValueError):
            ml_decode_bruteforce(code, np.zeros(32))

    def test_u_reencodes(self):
        code = construct_partially_symmetric(ConstructionRequest(m=4, t=3, k=8))
        _, llr = random_frame(code, 9, db=1.0)
        res = ml_decode_bruteforce(code, llr)
        assert encode(code, res.u) == res.codeword


class TestMlLowerBoundFlag:
    def test_exact_recovery_flags_true(self):
        code = rm_code(1, 3)
        cw, llr = random_frame(code, 1, db=6.0)
        res = sc_decode(code, llr)
        if res.codeword.to_array().tolist() == cw.tolist():
            assert ml_lower_bound_flag(res, cw, llr)

    def test_noiseless_true(self):
        code = rm_code(1, 3)
        cw = encode(code, BitVec(8, 1))
        llr = np.where(cw.to_array() == 0, np.inf, -np.inf)
        res = sc_decode(code, llr)
        assert ml_lower_bound_flag(res, cw, llr)

    def test_ml_always_certified(self):
        code = construct_partially_symmetric(ConstructionRequest(m=4, t=3, k=8))
        for f in range(100):
            cw, llr = random_frame(code, f, db=0.0, seed=61)
            res = ml_decode_bruteforce(code, llr)
            assert ml_lower_bound_flag(res, cw, llr)


class TestBecBehaviour:
    def test_noiseless_bec(self):
        code = rm_code(1, 3)
        cw = encode(code, BitVec(8, 0b10011))
        rng = frame_rng(0, 0)
        llr = transmit(Bec(0.0), cw, rng)
        res = sc_decode(code, llr)
        assert res.codeword == cw and res.ties == 0

    def test_full_erasure_reports_ties(self):
        code = rm_code(1, 3)
        res = sc_decode(code, np.zeros(8))
        assert res.ties == code.k

    def test_no_tie_implies_exact_and_ge_validates(self):
        """On the BEC, SC either recovers exactly (no zero-LLR decisions) or
        reports how many erased combinations it had to guess; frames that a
        Gaussian-elimination erasure decoder cannot uniquely solve always
        show up with at least one reported guess."""
        code = construct_partially_symmetric(ConstructionRequest(m=4, t=3, k=8))
        gen = monomial_to_linear(code).generator_array()
        for f in range(400):
            rng = frame_rng(71, f)
            info = rng.integers(0, 2, size=8, dtype=np.uint8)
            cw = (info @ gen) & 1
            llr = transmit(Bec(0.35), cw, rng)
            res = sc_decode(code, llr)
            erased = llr == 0
            # GE oracle: unique completion iff the non-erased columns have full rank
            sub = gen[:, ~erased]
            _, pivots = __import__("symcalc.bitmath", fromlist=["rref"]).rref(
                __import__("symcalc.bitmath", fromlist=["BitMatrix"]).BitMatrix.from_array(sub)
            )
            unique = len(pivots) == code.k
            if res.ties == 0:
                assert res.codeword.to_array().tolist() == cw.tolist()
            if res.codeword.to_array().tolist() != cw.tolist():
                assert res.ties > 0
            if not unique:
                assert res.ties > 0

    def test_guess_free_frames_decode_exactly_rm24(self):
        code = rm_code(2, 4)
        gen = monomial_to_linear(code).generator_array()
        exact = 0
        for f in range(200):
            rng = frame_rng(73, f)
            info = rng.integers(0, 2, size=code.k, dtype=np.uint8)
            cw = (info @ gen) & 1
            llr = transmit(Bec(0.3), cw, rng)
            res = sc_decode(code, llr)
            if res.ties == 0:
                assert res.codeword.to_array().tolist() == cw.tolist()
                exact += 1
        assert exact > 0  # the property was actually exercised


def test_correlation_metric_shared_path():
    rng = np.random.RandomState(3)
    bits = rng.randint(0, 2, 16).astype(np.uint8)
    llr = rng.randn(16)
    direct = float(np.dot(np.clip(llr, -1e30, 1e30), 1.0 - 2.0 * bits.astype(float)))
    assert correlation_metric(bits, llr) == direct
    assert correlation_metric(BitVec.from_array(bits), llr) == direct
