"""
Funções kernel e o cache de colunas K[:, J]

O cache guarda apenas as |J| <= d_max colunas escolhidas, numa matriz densa
l x d_max em ordem Fortran alocada uma única vez. A matriz l x l nunca é
formada.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from sparseauc.config import get_config
from sparseauc.utils.parallel import run_chunks

KINDS = ('gaussian', 'linear')


@dataclass(frozen=True)
class KernelSpec:
    kind: str = 'gaussian'
    sigma: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kernel desconhecido: {self.kind}")
        if self.kind == 'gaussian' and not self.sigma > 0:
            raise ValueError("sigma deve ser positivo para o kernel gaussiano")

    @classmethod
    def from_config(cls, **overrides):
        cfg = get_config('kernel')
        cfg.update({k: v for k, v in overrides.items() if v is not None})
        return cls(kind=cfg['kind'], sigma=float(cfg['sigma']))

    @property
    def gamma(self):
        return 1.0 / (2.0 * self.sigma ** 2)


def align_dim(X, dim):
    """Mesma matriz CSR com `dim` colunas (colunas extras são zeros)"""
    X = sp.csr_matrix(X)
    if X.shape[1] == dim:
        return X
    return sp.csr_matrix((X.data, X.indices, X.indptr), shape=(X.shape[0], dim))


def _as_row(x, dim):
    """Vetor esparso 1 x dim (aceita csr, array denso ou lista)"""
    if sp.issparse(x):
        return align_dim(x, dim)
    x = np.atleast_1d(np.asarray(x, dtype=np.float64)).ravel()
    padded = np.zeros(dim)
    padded[:x.size] = x
    return sp.csr_matrix(padded)


def _length(x):
    return x.shape[-1] if hasattr(x, 'shape') else len(x)


def kernel_eval(spec, a, b):
    """
    Avalia k(a, b) para dois vetores (esparsos ou densos)

    Simétrica por construção; o kernel gaussiano vale 1 em a == b.
    """
    dim = max(_length(a), _length(b))
    a = _as_row(a, dim)
    b = _as_row(b, dim)
    if spec.kind == 'linear':
        return float(a.multiply(b).sum())
    diff = (a - b).data
    return float(np.exp(-spec.gamma * np.dot(diff, diff)))


def squared_norms(X):
    """||x_r||^2 por linha"""
    return np.asarray(X.multiply(X).sum(axis=1)).ravel()


def kernel_column(spec, X, sq_norms, x_dense, x_sq, out, threads=1):
    """
    Preenche out[r] = k(x_r, x) para todas as linhas r de X

    Para o kernel gaussiano usa ||x_r||^2 + ||x||^2 - 2 x_r.x, limitado em 0.
    Cada linha é um produto escalar sequencial, independente das threads.
    """

    def work(start, stop):
        dots = X[start:stop] @ x_dense
        if spec.kind == 'linear':
            out[start:stop] = dots
            return
        d2 = (sq_norms[start:stop] + x_sq) - 2.0 * dots
        np.maximum(d2, 0.0, out=d2)
        out[start:stop] = np.exp(-spec.gamma * d2)

    run_chunks(work, X.shape[0], threads)
    return out


def kernel_matrix(spec, X, basis, threads=1):
    """K(X, basis) em ordem Fortran, coluna a coluna pela mesma rotina do cache"""
    dim = max(X.shape[1], basis.shape[1])
    X = align_dim(X, dim)
    basis = align_dim(basis, dim)
    sq = squared_norms(X)
    basis_sq = squared_norms(basis)
    K = np.empty((X.shape[0], basis.shape[0]), order='F')
    for c in range(basis.shape[0]):
        kernel_column(spec, X, sq, basis[c].toarray().ravel(), float(basis_sq[c]), K[:, c], threads)
    return K


class KernelCache:
    """
    Submatriz K[:, J] crescida coluna a coluna

    Args:
        spec (KernelSpec): kernel usado
        X: matriz CSR l x dim das linhas de treino
        capacity (int): máximo de colunas (d_max)
        threads (int): threads para o cálculo das colunas
    """

    def __init__(self, spec, X, capacity, threads=1):
        self.spec = spec
        self.X = sp.csr_matrix(X)
        self.capacity = int(capacity)
        self.threads = threads
        self.sq_norms = squared_norms(self.X)
        self._buffer = np.zeros((self.X.shape[0], self.capacity), order='F')
        self.basis_order = []
        self._members = set()

    @property
    def l(self):
        return self.X.shape[0]

    @property
    def size(self):
        return len(self.basis_order)

    @property
    def columns(self):
        return self._buffer[:, :self.size]

    def candidate_column(self, q, threads=None):
        """k(x_r, x_q) para todo r, num vetor de rascunho (não entra no cache)"""
        q = int(q)
        out = np.empty(self.l)
        kernel_column(self.spec, self.X, self.sq_norms, self.X[q].toarray().ravel(),
                      float(self.sq_norms[q]), out, self.threads if threads is None else threads)
        if self.spec.kind == 'gaussian':
            out[q] = 1.0
        return out

    def append_column(self, q, column=None):
        """Acrescenta a coluna do exemplo q (J é um conjunto: q repetido é erro)"""
        q = int(q)
        if q in self._members:
            raise ValueError(f"exemplo {q} já está em J")
        if not 0 <= q < self.l:
            raise ValueError(f"índice {q} fora de [0, {self.l})")
        if self.size >= self.capacity:
            raise ValueError(f"cache cheio: d_max={self.capacity}")
        if column is None:
            column = self.candidate_column(q)
        self._buffer[:, self.size] = column
        self.basis_order.append(q)
        self._members.add(q)
        return self

    def __contains__(self, q):
        return int(q) in self._members

    def scores(self, v):
        """K[:, J] v"""
        v = np.asarray(v, dtype=np.float64)
        if v.shape != (self.size,):
            raise ValueError(f"vetor de tamanho {v.shape} para |J|={self.size}")
        if self.size == 0:
            return np.zeros(self.l)
        return self.columns @ v

    def gram_block(self):
        """K[J, J]"""
        return self.columns[self.basis_order, :]

    def with_candidate(self, q, column):
        """Cópia temporária com a coluna de q acrescentada (refit completo)"""
        trial = KernelCache.__new__(KernelCache)
        trial.spec = self.spec
        trial.X = self.X
        trial.capacity = self.size + 1
        trial.threads = self.threads
        trial.sq_norms = self.sq_norms
        trial._buffer = np.empty((self.l, trial.capacity), order='F')
        trial._buffer[:, :self.size] = self.columns
        trial._buffer[:, self.size] = column
        trial.basis_order = self.basis_order + [int(q)]
        trial._members = self._members | {int(q)}
        return trial
