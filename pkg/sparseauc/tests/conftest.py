import os

import numpy as np
import pytest
import scipy.sparse as sp

from sparseauc import config
from sparseauc.data_collection.dataset import Dataset
from sparseauc.model_training.kernel import KernelCache, KernelSpec
from sparseauc.model_training.objective import ObjectiveContext


def make_blobs(l=40, dim=3, seed=0, shift=1.0, pos_fraction=0.4, density=1.0):
    """Duas nuvens gaussianas deslocadas, rótulos +1/-1, as duas classes garantidas"""
    rng = np.random.default_rng(seed)
    p = max(1, min(l - 1, int(round(l * pos_fraction))))
    y = np.array([1] * p + [-1] * (l - p), dtype=np.int8)
    rng.shuffle(y)
    X = rng.normal(size=(l, dim)) + shift * (y[:, None] == 1)
    if density < 1.0:
        X[rng.random(size=X.shape) > density] = 0.0
    return Dataset(sp.csr_matrix(X), y)


@pytest.fixture
def blobs():
    return make_blobs


@pytest.fixture
def toy_1d():
    """P = {x = +1}, N = {x = -1}"""
    return Dataset(sp.csr_matrix(np.array([[1.0], [-1.0]])), np.array([1, -1]))


@pytest.fixture
def toy_1d_context(toy_1d):
    """Kernel linear, J = {exemplo positivo}, C = 1"""
    cache = KernelCache(KernelSpec('linear'), toy_1d.X, capacity=2)
    cache.append_column(0)
    return ObjectiveContext.from_dataset(cache, toy_1d, C=1.0)


@pytest.fixture
def small_chunks(monkeypatch):
    """Força blocos de uma linha para exercitar o pool de threads em dados pequenos"""
    monkeypatch.setitem(config.RUNTIME_CONFIG, 'min_chunk', 1)


@pytest.fixture
def data_dir():
    path = os.environ.get(config.RUNTIME_CONFIG['data_dir_env'])
    if not path or not os.path.isdir(path):
        pytest.skip("conjuntos de referência indisponíveis (defina SPARSEAUC_DATA_DIR)")
    return path


def random_context(rng, p, n, m, dim=3, C=None, sigma=None):
    """Contexto com kernel gaussiano, J aleatório de tamanho m"""
    l = p + n
    y = np.array([1] * p + [-1] * n, dtype=np.int8)
    ds = Dataset(sp.csr_matrix(rng.normal(size=(l, dim))), y)
    spec = KernelSpec('gaussian', sigma if sigma is not None else float(rng.uniform(0.5, 2.0)))
    cache = KernelCache(spec, ds.X, capacity=max(m, 1))
    for q in rng.choice(l, size=m, replace=False):
        cache.append_column(q)
    return ObjectiveContext.from_dataset(cache, ds, C if C is not None else float(rng.uniform(0.1, 5.0)))
