import numpy as np
import pytest

from sparseauc.data_collection.splits import SplitPlan, holdout_split, stratified_folds
from sparseauc.errors import SplitError


def _counts(ds, indices):
    labels = ds.y[indices]
    return int(np.sum(labels == 1)), int(np.sum(labels == -1))


class TestStratifiedFolds:

    def test_perfectly_divisible(self, blobs):
        ds = blobs(l=10, pos_fraction=0.5)
        folds = stratified_folds(ds, SplitPlan(fold_count=5, seed=7))
        assert len(folds) == 5
        for train, val in folds:
            assert _counts(ds, val) == (1, 1)
            assert _counts(ds, train) == (4, 4)

    def test_folds_partition_the_examples(self, blobs):
        ds = blobs(l=37, pos_fraction=0.3)
        folds = stratified_folds(ds, SplitPlan(fold_count=4, seed=1))
        vals = np.concatenate([val for _, val in folds])
        np.testing.assert_array_equal(np.sort(vals), np.arange(ds.l))
        for train, val in folds:
            assert np.intersect1d(train, val).size == 0
            assert train.size + val.size == ds.l
            p_val, n_val = _counts(ds, val)
            assert p_val in (ds.p // 4, -(-ds.p // 4))
            assert n_val in (ds.n // 4, -(-ds.n // 4))

    def test_same_seed_same_folds(self, blobs):
        ds = blobs(l=30)
        plan = SplitPlan(fold_count=3, seed=123)
        first = stratified_folds(ds, plan)
        second = stratified_folds(ds, plan)
        for (a_train, a_val), (b_train, b_val) in zip(first, second):
            np.testing.assert_array_equal(a_train, b_train)
            np.testing.assert_array_equal(a_val, b_val)

    def test_runs_use_different_assignments(self, blobs):
        ds = blobs(l=40)
        plan = SplitPlan(fold_count=5, seed=3, runs=2)
        run0 = stratified_folds(ds, plan, run=0)
        run1 = stratified_folds(ds, plan, run=1)
        assert any(not np.array_equal(a[1], b[1]) for a, b in zip(run0, run1))

    def test_too_many_folds_for_minority_class(self, blobs):
        ds = blobs(l=20, pos_fraction=0.2)
        assert ds.p == 4
        with pytest.raises(SplitError):
            stratified_folds(ds, SplitPlan(fold_count=5))

    def test_fold_count_below_two(self, blobs):
        with pytest.raises(SplitError):
            stratified_folds(blobs(l=10), SplitPlan(fold_count=1))


class TestHoldout:

    def test_holdout_fraction_is_stratified(self, blobs):
        ds = blobs(l=50, pos_fraction=0.4)
        train, val = holdout_split(ds, 0.2, seed=5)
        assert val.size == 10
        assert _counts(ds, val) == (4, 6)
        assert np.intersect1d(train, val).size == 0

    def test_plan_in_holdout_mode(self, blobs):
        ds = blobs(l=50)
        folds = stratified_folds(ds, SplitPlan(mode='holdout-fraction', val_fraction=0.3))
        assert len(folds) == 1


class TestSplitPlan:

    def test_invalid_mode(self):
        with pytest.raises(ValueError):
            SplitPlan(mode='bootstrap')

    def test_seed_must_fit_64_bits(self):
        SplitPlan(seed=2 ** 64 - 1)
        with pytest.raises(ValueError):
            SplitPlan(seed=2 ** 64)

    def test_run_seeds_are_deterministic(self):
        plan = SplitPlan(seed=2 ** 63 + 5, runs=4)
        assert plan.run_seeds() == plan.run_seeds()
        assert len(set(plan.run_seeds())) == 4

    def test_from_config_defaults(self):
        plan = SplitPlan.from_config()
        assert (plan.fold_count, plan.runs, plan.seed) == (5, 4, 42)
