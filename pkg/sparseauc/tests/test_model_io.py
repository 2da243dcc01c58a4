import json
import struct

import numpy as np
import pytest
import scipy.sparse as sp

from sparseauc.errors import ModelFormatError
from sparseauc.model_training.greedy import EarlyStopConfig, GreedyConfig, ModelState, grow
from sparseauc.model_training.kernel import KernelSpec
from sparseauc.pipeline.evaluation import decision_function
from sparseauc.pipeline.model_io import (
    MAGIC,
    RunManifest,
    deserialize_model,
    load_model,
    save_model,
    serialize_model,
)


@pytest.fixture
def trained(blobs):
    ds = blobs(l=40, dim=5, seed=13, density=0.6)
    cfg = GreedyConfig(d_max=6, kappa=8, early_stop=EarlyStopConfig(enabled=False))
    result = grow(ds, KernelSpec('gaussian', 1.3), 2.0, cfg)
    manifest = RunManifest(options={'C': 2.0, 'sigma': 1.3}, train_checksum='abc', stop_reason=result.stop_reason,
                           basis_count=result.model.size)
    return result.model, manifest


class TestRoundTrip:

    def test_predictions_are_bitwise_identical(self, trained, tmp_path):
        model, manifest = trained
        path = tmp_path / "m.model"
        save_model(model, manifest, path)
        loaded, loaded_manifest = load_model(path)

        rng = np.random.default_rng(0)
        X = sp.random(50, 5, density=0.5, random_state=rng, format='csr') * 4
        np.testing.assert_array_equal(decision_function(loaded, X), decision_function(model, X))
        np.testing.assert_array_equal(loaded.basis_index, model.basis_index)
        assert loaded.spec == model.spec and loaded.C == model.C
        assert loaded_manifest == manifest

    def test_feature_scale_is_kept(self, trained):
        model, manifest = trained
        model.feature_scale = np.array([2.0, 1.0, 0.5, 3.0, 1.0])
        loaded, _ = deserialize_model(serialize_model(model, manifest))
        np.testing.assert_array_equal(loaded.feature_scale, model.feature_scale)

    def test_manifest_keys_match_documented_format(self, trained):
        _, manifest = trained
        assert set(json.loads(manifest.to_json())) == {
            'basis_count', 'format_version', 'options', 'package_version',
            'stop_reason', 'train_checksum', 'val_checksum',
        }

    def test_empty_model(self):
        model = ModelState.empty(KernelSpec('linear'), 1.0, dim=3)
        loaded, _ = deserialize_model(serialize_model(model, RunManifest(options={})))
        assert loaded.size == 0 and loaded.dim == 3
        assert loaded.spec.kind == 'linear'


class TestCorruptFiles:

    def test_bad_magic(self, trained):
        payload = serialize_model(*trained)
        with pytest.raises(ModelFormatError):
            deserialize_model(b"NOTAMODL" + payload[len(MAGIC):])

    def test_version_mismatch(self, trained):
        payload = bytearray(serialize_model(*trained))
        payload[len(MAGIC):len(MAGIC) + 4] = struct.pack('<I', 99)
        with pytest.raises(ModelFormatError, match="99"):
            deserialize_model(bytes(payload))

    @pytest.mark.parametrize("cut", [4, 20, 200])
    def test_truncated(self, trained, cut):
        payload = serialize_model(*trained)
        with pytest.raises(ModelFormatError):
            deserialize_model(payload[:-cut])

    def test_trailing_bytes(self, trained):
        with pytest.raises(ModelFormatError):
            deserialize_model(serialize_model(*trained) + b"\0")

    def test_failed_save_leaves_no_file(self, trained, tmp_path, monkeypatch):
        path = tmp_path / "m.model"

        def boom(model, manifest):
            raise RuntimeError("falha simulada")

        monkeypatch.setattr('sparseauc.pipeline.model_io.serialize_model', boom)
        with pytest.raises(RuntimeError):
            save_model(*trained, path)
        assert list(tmp_path.iterdir()) == []
