"""
Tests for seeded parameter draws and the thread-pool runner.
"""

import threading
from fractions import Fraction

import pytest

from qvariant.analysis.errors import InvalidParameterError, VanishingDenominatorError
from qvariant.analysis.limits import restriction_holds
from qvariant.analysis.parallel import TaskResult, run_parallel
from qvariant.analysis.qcore import HalfInt, QContext
from qvariant.analysis.sampling import (
    draw_params2,
    draw_params3,
    draw_restricted_params2,
    draw_valid,
    rng_for,
    small_rational,
)


@pytest.fixture
def ctx():
    return QContext.exact(Fraction(1, 2))


class TestSampling:
    """Tests for seeded draws."""

    def test_rng_is_deterministic_per_index(self):
        """同一 (seed, index) 给出同一序列，不同 index 互不相同"""
        a = [rng_for(7, 3).random() for _ in range(3)]
        b = [rng_for(7, 3).random() for _ in range(3)]
        c = [rng_for(7, 4).random() for _ in range(3)]
        assert a == b
        assert a != c

    def test_draw_params2_is_reproducible(self, ctx):
        assert draw_params2(rng_for(1, 0), ctx) == draw_params2(rng_for(1, 0), ctx)

    def test_draw_params2_has_half_integer_lambda(self, ctx):
        for index in range(25):
            p2 = draw_params2(rng_for(11, index), ctx)
            assert isinstance(p2.lam, HalfInt)
            assert p2.t1 != p2.t2
            assert p2.t1 != 0 and p2.t2 != 0

    def test_draw_params3_has_half_integer_nu(self, ctx):
        for index in range(25):
            p3 = draw_params3(rng_for(5, index), ctx)
            assert isinstance(p3.nu, HalfInt)
            assert len({p3.t1, p3.t2, p3.t3}) == 3

    def test_restricted_draws_satisfy_restriction(self, ctx):
        for index in range(25):
            p2 = draw_restricted_params2(rng_for(3, index), ctx)
            assert restriction_holds(ctx, p2)

    def test_float_draws_use_complex_scalars(self):
        fctx = QContext.floating("0.5")
        p2 = draw_params2(rng_for(2, 0), fctx)
        assert isinstance(p2.t1, complex)

    def test_small_rational_bounds(self):
        rng = rng_for(0, 0)
        for _ in range(50):
            value = small_rational(rng, signed=False)
            assert value > 0
            assert value.numerator <= 9 and value.denominator <= 9


class TestDrawValid:
    """Tests for rejection sampling."""

    def test_rejects_until_valid(self):
        calls = {"n": 0}

        def validate(value):
            calls["n"] += 1
            if calls["n"] < 3:
                raise VanishingDenominatorError("test", calls["n"])
            return value * 2

        params, prepared = draw_valid(lambda rng: 21, rng_for(0, 0), validate)
        assert params == 21
        assert prepared == 42
        assert calls["n"] == 3

    def test_gives_up_after_attempts(self):
        def validate(_value):
            raise VanishingDenominatorError("test", 0)

        with pytest.raises(InvalidParameterError):
            draw_valid(lambda rng: 0, rng_for(0, 0), validate, attempts=4)

    def test_without_validator(self):
        params, prepared = draw_valid(lambda rng: "x", rng_for(0, 0))
        assert params == "x"
        assert prepared is None


class TestRunParallel:
    """Tests for run_parallel."""

    def test_empty(self):
        assert run_parallel([], lambda x: x) == []

    def test_results_keep_submission_order(self):
        results = run_parallel(list(range(10)), lambda x: x * x, max_workers=4)
        assert [r.index for r in results] == list(range(10))
        assert [r.value for r in results] == [x * x for x in range(10)]
        assert all(r.ok for r in results)

    def test_sequential_path(self):
        seen = []

        def fn(x):
            seen.append(threading.current_thread().name)
            return x

        results = run_parallel([1, 2, 3], fn, max_workers=1)
        assert [r.value for r in results] == [1, 2, 3]
        assert set(seen) == {threading.current_thread().name}

    def test_errors_become_records(self):
        """单个任务出错不影响其他任务"""

        def fn(x):
            if x == 2:
                raise VanishingDenominatorError("g1", 2)
            if x == 3:
                raise ValueError("boom")
            return x

        results = run_parallel([0, 1, 2, 3], fn, max_workers=2)
        assert results[0].ok and results[1].ok
        assert results[2].error_type == "VanishingDenominatorError"
        assert results[3].error_type == "ValueError"
        assert results[3].error == "boom"
        assert not results[3].ok

    def test_task_result_defaults(self):
        result = TaskResult(5, value=1)
        assert result.ok
        assert result.error_type is None
