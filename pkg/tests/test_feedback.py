"""Two-phase feedback scheme: pilot orbits, lookup tables, collision rates."""

import math
from fractions import Fraction

import numpy as np
import pytest

from permid import (
    FeedbackCode,
    Stream,
    build_feedback_code,
    build_until_target,
    eval_feedback_exact,
    eval_feedback_mc,
    feedback_counting_converse,
    max_typeclass,
    target_test,
)
from permid.combinatorics import TypeVector, type_of
from permid.errors import (
    BudgetError,
    HypothesisError,
    ValidationError,
)


def test_max_typeclass_examples():
    t, size = max_typeclass(6, 2)
    assert t == TypeVector((3, 3))
    assert size == 20

    t, size = max_typeclass(3, 3)
    assert t == TypeVector((1, 1, 1))
    assert size == 6

    t, size = max_typeclass(12, 2)
    assert t == TypeVector((6, 6))
    assert size == 924


def test_max_typeclass_two_sided_bound_integer_replay():
    # size <= q^n and q^n <= size * (2n)^(q-1), checked without floats.
    for n, q in [(1, 2), (5, 2), (12, 2), (3, 3), (5, 3), (4, 4)]:
        _, size = max_typeclass(n, q)
        assert size <= q**n
        assert q**n <= size * (2 * n) ** (q - 1)


def test_max_typeclass_tie_goes_to_first_type():
    # At n=1 every orbit has one element; the canonical-first type wins.
    t, size = max_typeclass(1, 2)
    assert t == TypeVector((1, 0))
    assert size == 1


def test_feedback_code_validations():
    good = np.ones((2, 20), dtype=np.int64)
    with pytest.raises(ValidationError):
        FeedbackCode(6, 2, 1, good)
    with pytest.raises(ValidationError):
        FeedbackCode(6, 2, 2, np.ones((2, 21), dtype=np.int64))
    with pytest.raises(ValidationError):
        FeedbackCode(6, 2, 2, np.ones((0, 20), dtype=np.int64))
    with pytest.raises(ValidationError):
        FeedbackCode(6, 2, 2, np.ones((2, 20), dtype=np.float64))
    with pytest.raises(ValidationError):
        FeedbackCode(6, 2, 2, np.zeros((2, 20), dtype=np.int64))
    with pytest.raises(ValidationError):
        FeedbackCode(6, 2, 2, np.full((2, 20), 8, dtype=np.int64))
    FeedbackCode(6, 2, 2, np.full((2, 20), 7, dtype=np.int64))


def test_flat_index_row_major():
    maps = np.ones((1, 4), dtype=np.int64)
    code = FeedbackCode(2, 2, 3, maps)
    assert code.orbit == 2
    assert code.D == 4
    assert code.flat_index((0, 0)) == 0
    assert code.flat_index((0, 1)) == 1
    assert code.flat_index((1, 0)) == 2
    assert code.flat_index((1, 1)) == 3
    with pytest.raises(ValidationError):
        code.flat_index((0,))
    with pytest.raises(ValidationError):
        code.flat_index((0, 2))


def test_build_shapes_and_ranges():
    code = build_feedback_code(6, 2, 2, 16, Stream(7))
    assert code.N == 7
    assert code.orbit == 20
    assert code.D == 20
    assert code.maps.shape == (16, 20)
    assert np.issubdtype(code.maps.dtype, np.integer)
    assert code.maps.min() >= 1
    assert code.maps.max() <= 7
    assert len(code.pilot) == 6
    assert type_of(code.pilot, 2) == code.pstar


def test_build_is_seed_deterministic():
    a = build_feedback_code(6, 2, 2, 16, Stream(7))
    b = build_feedback_code(6, 2, 2, 16, Stream(7))
    c = build_feedback_code(6, 2, 2, 16, Stream(8))
    assert np.array_equal(a.maps, b.maps)
    assert not np.array_equal(a.maps, c.maps)


def test_build_validations_and_budget():
    with pytest.raises(ValidationError):
        build_feedback_code(6, 2, 2, 0, Stream(1))
    with pytest.raises(ValidationError):
        build_feedback_code(6, 2, 1, 4, Stream(1))
    with pytest.raises(BudgetError):
        build_feedback_code(6, 2, 2, 16, Stream(1), budget=100)
    with pytest.raises(BudgetError):
        build_feedback_code(6, 2, 2, 1, Stream(1), budget=10)


def test_single_message_has_no_cross_rate():
    code = build_feedback_code(6, 2, 2, 1, Stream(3))
    report = eval_feedback_exact(code)
    assert report.M == 1
    assert report.lambda1 == 0
    assert report.lambda2 is None
    assert report.max_count == 0
    assert report.argmax_pair is None
    assert report.passed


def test_identical_tables_collide_everywhere():
    row = np.arange(20, dtype=np.int64) % 7 + 1
    code = FeedbackCode(6, 2, 2, np.stack([row, row, (row % 7) + 1]))
    report = eval_feedback_exact(code)
    assert report.lambda2 == 1
    assert report.max_count == 20
    assert report.argmax_pair == (1, 2)
    assert not report.passed


def test_disjoint_tables_never_collide():
    maps = np.stack(
        [
            np.full(20, 1, dtype=np.int64),
            np.full(20, 2, dtype=np.int64),
            np.full(20, 3, dtype=np.int64),
        ]
    )
    report = eval_feedback_exact(FeedbackCode(6, 2, 2, maps))
    assert report.lambda1 == 0
    assert report.lambda2 == 0
    assert report.max_count == 0
    assert report.passed


def test_counts_matrix_symmetric_with_zero_diagonal():
    code = build_feedback_code(6, 2, 2, 6, Stream(11))
    report = eval_feedback_exact(code)
    counts = report.counts
    assert counts.shape == (6, 6)
    assert np.array_equal(counts, counts.T)
    assert np.all(np.diag(counts) == 0)
    for j in range(6):
        for k in range(j + 1, 6):
            agree = int((code.maps[j] == code.maps[k]).sum())
            assert counts[j, k] == agree
    assert report.lambda2 == Fraction(int(counts.max()), code.D)
    assert report.target == Fraction(2, 7)


def test_counts_dropped_above_matrix_cap():
    # n=1 keeps the table tiny (D=1) while M exceeds the cap.
    code = build_feedback_code(1, 2, 2, 4097, Stream(2))
    report = eval_feedback_exact(code)
    assert report.counts is None
    # 4097 single-entry rows over two orbit values must repeat somewhere.
    assert report.lambda2 == 1


def test_mean_pair_collision_rate_near_expected():
    # Two independent uniform tables over [1..7] agree per cell with
    # probability 1/7, so the pair rate averages 1/7 over seeds. Each rate
    # is Binomial(20, 1/7)/20; three standard errors of the 200-seed mean.
    total = Fraction(0)
    for seed in range(200):
        code = build_feedback_code(6, 2, 2, 2, Stream(seed))
        total += eval_feedback_exact(code).lambda2
    mean = total / 200
    sigma = math.sqrt((1 / 7) * (6 / 7) / (20 * 200))
    assert abs(float(mean) - 1 / 7) <= 3 * sigma


def test_exact_eval_at_desk_scale():
    code = build_feedback_code(12, 2, 2, 1024, Stream(0))
    assert code.maps.shape == (1024, 924)
    report = eval_feedback_exact(code)
    assert report.lambda1 == 0
    assert report.lambda2 <= Fraction(2, 13)
    assert report.passed
    assert report.counts is not None
    j, k = report.argmax_pair
    assert report.counts[j - 1, k - 1] == report.max_count


def test_mc_matches_exact_within_four_sigma():
    code = build_feedback_code(6, 2, 2, 4, Stream(21))
    exact = eval_feedback_exact(code)
    trials = 20_000
    mc = eval_feedback_mc(code, trials, Stream(99))
    assert mc.lambda1_hat == 0.0
    for i in range(4):
        for j in range(4):
            p_hat = mc.accept_hat[i][j]
            if i == j:
                assert p_hat == 1.0
                continue
            p = exact.counts[i, j] / code.D
            if p == 0:
                assert p_hat == 0.0
            else:
                assert abs(p_hat - p) <= 4 * math.sqrt(p * (1 - p) / trials)


def test_mc_is_seed_deterministic():
    code = build_feedback_code(6, 2, 2, 3, Stream(5))
    a = eval_feedback_mc(code, 2000, Stream(1))
    b = eval_feedback_mc(code, 2000, Stream(1))
    c = eval_feedback_mc(code, 2000, Stream(2))
    assert a == b
    assert a.accept_hat != c.accept_hat
    with pytest.raises(ValidationError):
        eval_feedback_mc(code, 0, Stream(1))


def test_target_test_agrees_with_exact_rate():
    outcomes = set()
    for seed in range(50):
        code = build_feedback_code(4, 2, 2, 3, Stream(seed))
        verdict = target_test(code)
        report = eval_feedback_exact(code)
        assert verdict == (report.lambda2 <= Fraction(2, code.N))
        assert verdict == report.passed
        outcomes.add(verdict)
    assert outcomes == {True, False}


def test_target_test_rejects_identical_tables():
    row = np.arange(20, dtype=np.int64) % 7 + 1
    code = FeedbackCode(6, 2, 2, np.stack([row, row]))
    assert not target_test(code)
    single = FeedbackCode(6, 2, 2, row.reshape(1, 20))
    with pytest.raises(HypothesisError):
        target_test(single)


def test_build_until_target_success():
    result = build_until_target(6, 2, 2, 2, Stream(4), budget_draws=10)
    assert result.success
    assert 1 <= result.draws <= 10
    assert result.report.passed
    assert target_test(result.code)
    replay = eval_feedback_exact(result.code)
    assert replay.lambda2 == result.report.lambda2
    again = build_until_target(6, 2, 2, 2, Stream(4), budget_draws=10)
    assert again.draws == result.draws
    assert np.array_equal(again.code.maps, result.code.maps)


def test_build_until_target_exhaustion():
    # Ten rows of two entries over [1..3] repeat by pigeonhole, so the pair
    # rate is 1 on every draw and the 2/3 target can never pass.
    result = build_until_target(2, 2, 2, 10, Stream(1), budget_draws=4)
    assert not result.success
    assert result.draws == 4
    assert result.report.lambda2 == 1
    assert not result.report.passed
    with pytest.raises(ValidationError):
        build_until_target(2, 2, 2, 10, Stream(1), budget_draws=0)


def test_counting_converse_small_thresholds():
    assert feedback_counting_converse(1, 2, 1, 3)
    assert not feedback_counting_converse(1, 2, 1, 4)
    assert feedback_counting_converse(2, 2, 1, 15)
    assert not feedback_counting_converse(2, 2, 1, 16)


def test_counting_converse_matches_big_integer_truth():
    for n, q, l in [(1, 2, 1), (1, 2, 2), (2, 2, 1), (1, 3, 1), (3, 2, 1)]:
        limit = 2 ** (q ** (n * l))
        for M in range(1, min(limit + 5, 300)):
            assert feedback_counting_converse(n, q, l, M) == (M < limit)
        assert not feedback_counting_converse(n, q, l, limit)
        assert feedback_counting_converse(n, q, l, limit - 1)


def test_counting_converse_handles_towers():
    # 2^(2^20) has over a million bits; only bit lengths are compared.
    M = 1 << (1 << 20)
    assert not feedback_counting_converse(4, 2, 5, M)
    assert feedback_counting_converse(4, 2, 5, M - 1)
    assert not feedback_counting_converse(3, 2, 2, 1 << 64)
    assert feedback_counting_converse(3, 2, 2, (1 << 64) - 1)


def test_counting_converse_validations():
    with pytest.raises(ValidationError):
        feedback_counting_converse(0, 2, 1, 4)
    with pytest.raises(ValidationError):
        feedback_counting_converse(1, 1, 1, 4)
    with pytest.raises(ValidationError):
        feedback_counting_converse(1, 2, 0, 4)
    with pytest.raises(ValidationError):
        feedback_counting_converse(1, 2, 1, 0)
