import logging

import numpy as np
import pandas as pd
import pytest

from main import EXIT_MISSING_FILE, main
from sparseauc.data_collection.dataset import load_dataset, to_libsvm
from sparseauc.pipeline.evaluation import decision_function
from sparseauc.pipeline.metrics import auc_from_labels
from sparseauc.pipeline.model_io import load_model

QUICK = ["--no-banner", "--dmax", "5", "--kappa", "6", "--no-early-stop"]


@pytest.fixture(autouse=True)
def reset_package_logger():
    yield
    logger = logging.getLogger("sparseauc")
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
    logger.setLevel(logging.NOTSET)


@pytest.fixture
def libsvm_file(blobs, tmp_path):
    def write(name="train.libsvm", **kwargs):
        path = tmp_path / name
        path.write_text(to_libsvm(blobs(**kwargs)))
        return str(path)
    return write


class TestTrainAndEval:

    def test_train_writes_model_and_trace(self, libsvm_file, tmp_path):
        train = libsvm_file(l=40, seed=1)
        model_out, trace_out = tmp_path / "m.model", tmp_path / "trace.csv"
        code = main(["train", train, *QUICK, "--model-out", str(model_out), "--trace-out", str(trace_out)])
        assert code == 0
        trace = pd.read_csv(trace_out)
        assert list(trace['basis_count']) == [1, 2, 3, 4, 5]
        model, manifest = load_model(model_out)
        assert model.size == 5
        assert manifest.stop_reason == 'd_max'
        assert manifest.options['greedy']['kappa'] == 6

    def test_eval_on_training_set_reproduces_trace(self, libsvm_file, tmp_path, capsys):
        train = libsvm_file(l=50, seed=2)
        model_out, trace_out = tmp_path / "m.model", tmp_path / "trace.csv"
        assert main(["train", train, *QUICK, "--scale", "--model-out", str(model_out),
                     "--trace-out", str(trace_out)]) == 0
        capsys.readouterr()

        assert main(["eval", str(model_out), train, "--no-banner"]) == 0
        out = capsys.readouterr().out
        final = pd.read_csv(trace_out, float_precision='round_trip')['train_auc'].iloc[-1]
        assert f"AUC: {final:.6f}" in out

        model, _ = load_model(model_out)
        ds = load_dataset(train)
        assert auc_from_labels(decision_function(model, ds.X), ds.y) == final

    def test_from_model_reproduces_model(self, libsvm_file, tmp_path):
        train = libsvm_file(l=40, seed=3)
        first, second = tmp_path / "a.model", tmp_path / "b.model"
        assert main(["train", train, *QUICK, "--sigma", "0.8", "--C", "3", "--model-out", str(first)]) == 0
        assert main(["train", "--no-banner", "--from-model", str(first), "--model-out", str(second)]) == 0
        a, _ = load_model(first)
        b, _ = load_model(second)
        np.testing.assert_array_equal(a.basis_index, b.basis_index)
        np.testing.assert_array_equal(a.beta, b.beta)

    def test_validation_fraction(self, libsvm_file, tmp_path):
        train = libsvm_file(l=60, seed=4)
        trace_out = tmp_path / "trace.csv"
        code = main(["train", train, "--no-banner", "--dmax", "4", "--val-frac", "0.25",
                     "--model-out", str(tmp_path / "m.model"), "--trace-out", str(trace_out)])
        assert code == 0
        assert pd.read_csv(trace_out)['val_auc'].notna().all()

    def test_dmax_zero_warns(self, libsvm_file, tmp_path, caplog):
        train = libsvm_file(l=20)
        with caplog.at_level(logging.WARNING, logger="sparseauc"):
            code = main(["train", train, "--no-banner", "--dmax", "0", "--model-out", str(tmp_path / "m.model")])
        assert code == 0
        assert "d_max = 0" in caplog.text
        model, _ = load_model(tmp_path / "m.model")
        assert model.size == 0

    def test_missing_file_exits_2_without_outputs(self, tmp_path):
        model_out = tmp_path / "m.model"
        code = main(["train", str(tmp_path / "absent.libsvm"), "--no-banner", "--model-out", str(model_out)])
        assert code == EXIT_MISSING_FILE
        assert list(tmp_path.iterdir()) == []

    def test_non_finite_value_fails_with_line_number(self, libsvm_file, tmp_path, capsys):
        train = libsvm_file(l=20, seed=9)
        with open(train, 'a') as f:
            f.write("+1 1:nan 2:inf\n")
        code = main(["train", train, "--no-banner", "--model-out", str(tmp_path / "m.model")])
        assert code == 1
        assert "linha 21" in capsys.readouterr().err
        assert not (tmp_path / "m.model").exists()

    def test_single_class_training_file_fails(self, tmp_path):
        path = tmp_path / "one.libsvm"
        path.write_text("+1 1:0.5\n+1 1:0.7\n")
        code = main(["train", str(path), "--no-banner", "--model-out", str(tmp_path / "m.model")])
        assert code == 1
        assert not (tmp_path / "m.model").exists()


class TestPredictTuneBench:

    def test_predict_csv(self, libsvm_file, tmp_path):
        train = libsvm_file(l=30, seed=5)
        model_out, out = tmp_path / "m.model", tmp_path / "scores.csv"
        assert main(["train", train, *QUICK, "--model-out", str(model_out)]) == 0
        assert main(["predict", str(model_out), train, "--no-banner", "--out", str(out)]) == 0
        frame = pd.read_csv(out)
        assert list(frame.columns) == ['index', 'label', 'score']
        assert len(frame) == 30

    def test_tune_grid_csv(self, libsvm_file, tmp_path, capsys):
        train = libsvm_file(l=36, seed=6)
        grid_out = tmp_path / "grid.csv"
        code = main(["tune", train, *QUICK, "--C-values", "0.5,2", "--sigma-values", "1",
                     "--folds", "3", "--runs", "1", "--grid-out", str(grid_out), "--threads", "2"])
        assert code == 0
        assert len(pd.read_csv(grid_out)) == 2
        assert "Melhor" in capsys.readouterr().out

    def test_bench_single_thread(self, libsvm_file, tmp_path):
        train = libsvm_file(l=30, seed=7)
        bench_out = tmp_path / "bench.csv"
        code = main(["bench", train, *QUICK, "--threads-list", "1", "--repeats", "1", "--bench-out", str(bench_out)])
        assert code == 0
        frame = pd.read_csv(bench_out)
        assert list(frame['threads']) == [1]
        assert frame['speedup_vs_1'].iloc[0] == 1.0

    def test_config(self, capsys):
        assert main(["config", "--no-banner"]) == 0
        assert capsys.readouterr().out
