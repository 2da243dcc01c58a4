import logging

import numpy as np
import pandas as pd
import pytest
import scipy.sparse as sp

from sparseauc.data_collection.splits import SplitPlan
from sparseauc.errors import SparseAUCError
from sparseauc.model_training.greedy import EarlyStopConfig, GreedyConfig, ModelState
from sparseauc.model_training.kernel import KernelSpec
from sparseauc.pipeline import evaluation
from sparseauc.pipeline.evaluation import (
    GRID_COLUMNS,
    GridCell,
    GridSpec,
    decision_function,
    grid_search,
    predict,
    write_grid_csv,
)

SMALL_GREEDY = GreedyConfig(d_max=4, kappa=5, early_stop=EarlyStopConfig(enabled=False))


class TestPredict:

    def test_empty_model_predicts_zero(self):
        model = ModelState.empty(KernelSpec(), 1.0, dim=2)
        assert predict(model, [0.3, -1.0]) == 0.0

    def test_gaussian_on_basis_vector(self):
        x = sp.csr_matrix(np.array([[0.5, -2.0, 1.0]]))
        model = ModelState([0], [2.0], KernelSpec('gaussian', 0.7), x, 1.0)
        assert predict(model, x) == 2.0

    def test_linear_example(self):
        basis = sp.csr_matrix(np.array([[1.0], [2.0]]))
        model = ModelState([0, 1], [1.0, -1.0], KernelSpec('linear'), basis, 1.0)
        assert predict(model, [3.0]) == -3.0

    def test_unseen_feature_index_is_accepted(self):
        basis = sp.csr_matrix(np.array([[1.0, 0.0]]))
        model = ModelState([0], [1.0], KernelSpec('linear'), basis, 1.0)
        X = sp.csr_matrix(np.array([[2.0, 0.0, 5.0]]))
        np.testing.assert_array_equal(decision_function(model, X), [2.0])

    def test_feature_scale_is_applied(self):
        basis = sp.csr_matrix(np.array([[1.0]]))
        model = ModelState([0], [1.0], KernelSpec('linear'), basis, 1.0, feature_scale=[2.0])
        assert predict(model, [4.0]) == 2.0


class TestGridSpec:

    def test_rejects_empty_and_non_positive(self):
        with pytest.raises(ValueError):
            GridSpec((), (1.0,))
        with pytest.raises(ValueError):
            GridSpec((1.0,), (0.0,))

    def test_duplicates_removed_with_warning(self, caplog):
        with caplog.at_level(logging.WARNING, logger="sparseauc"):
            grid = GridSpec((1.0, 1.0, 2.0), (0.5,)).deduplicated()
        assert grid.cells() == [(1.0, 0.5), (2.0, 0.5)]
        assert "repetidos" in caplog.text


class TestGridSearch:

    def test_single_cell(self, blobs):
        ds = blobs(l=40, seed=3)
        result = grid_search(ds, GridSpec((1.0,), (1.0,)), SplitPlan(fold_count=3), SMALL_GREEDY)
        assert (result.best_C, result.best_sigma) == (1.0, 1.0)
        cell = result.cells[0]
        assert cell.valid and len(cell.fold_aucs) == 3
        assert 0.0 <= cell.mean_auc <= 1.0
        assert cell.mean_basis_count <= 4

    def test_runs_multiply_training_count(self, blobs):
        ds = blobs(l=30, seed=4)
        result = grid_search(ds, GridSpec((1.0,), (1.0,)), SplitPlan(fold_count=3, runs=2), SMALL_GREEDY)
        assert len(result.cells[0].fold_aucs) == 6

    def test_threads_do_not_change_result(self, blobs):
        ds = blobs(l=30, seed=5)
        grid = GridSpec((0.5, 2.0), (0.5, 1.5))
        single = grid_search(ds, grid, SplitPlan(fold_count=3), SMALL_GREEDY, threads=1)
        multi = grid_search(ds, grid, SplitPlan(fold_count=3), SMALL_GREEDY, threads=4)
        assert single.to_frame().equals(multi.to_frame())
        assert (single.best_C, single.best_sigma) == (multi.best_C, multi.best_sigma)

    def test_tie_goes_to_smallest_c_then_sigma(self, blobs, monkeypatch):
        def fake_cell(ds, splits, C, sigma, *args):
            return GridCell(C, sigma, mean_auc=0.9, std_auc=0.0, mean_basis_count=1.0)

        monkeypatch.setattr(evaluation, '_evaluate_cell', fake_cell)
        result = grid_search(blobs(l=20), GridSpec((4.0, 1.0), (2.0, 0.5)), SplitPlan(fold_count=2), SMALL_GREEDY)
        assert (result.best_C, result.best_sigma) == (1.0, 0.5)

    def test_invalid_cells_are_excluded(self, blobs, monkeypatch):
        def fake_cell(ds, splits, C, sigma, *args):
            if C == 1.0:
                return GridCell(C, sigma, valid=False, error="busca linear falhou")
            return GridCell(C, sigma, mean_auc=0.6, std_auc=0.0, mean_basis_count=1.0)

        monkeypatch.setattr(evaluation, '_evaluate_cell', fake_cell)
        result = grid_search(blobs(l=20), GridSpec((1.0, 2.0), (1.0,)), SplitPlan(fold_count=2), SMALL_GREEDY)
        assert result.best_C == 2.0
        assert [cell.valid for cell in result.cells] == [False, True]

    def test_all_cells_invalid(self, blobs, monkeypatch):
        monkeypatch.setattr(evaluation, '_evaluate_cell',
                            lambda ds, splits, C, sigma, *args: GridCell(C, sigma, valid=False))
        with pytest.raises(SparseAUCError):
            grid_search(blobs(l=20), GridSpec((1.0,), (1.0,)), SplitPlan(fold_count=2), SMALL_GREEDY)

    def test_csv_has_one_row_per_cell(self, blobs, tmp_path):
        ds = blobs(l=24, seed=6)
        result = grid_search(ds, GridSpec((1.0, 3.0), (0.5, 1.0, 2.0)), SplitPlan(fold_count=2), SMALL_GREEDY)
        path = tmp_path / "grid.csv"
        write_grid_csv(result, path)
        frame = pd.read_csv(path)
        assert list(frame.columns) == GRID_COLUMNS
        assert len(frame) == 6
