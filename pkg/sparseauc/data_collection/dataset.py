"""
Leitura de conjuntos de dados no formato esparso LIBSVM

Cada linha não vazia tem a forma `rótulo idx:val idx:val ...` com índices
externos a partir de 1 (convertidos para 0 internamente) e estritamente
crescentes. Os rótulos precisam ser binários {+1, -1}; outros esquemas
exigem um mapeamento explícito (remap ou conjunto de classes positivas).
"""

import gzip
import hashlib
import io
import logging
import math
import os

import numpy as np
import scipy.sparse as sp
from sklearn.preprocessing import MaxAbsScaler
from sklearn.utils.sparsefuncs import inplace_column_scale

from sparseauc.errors import DatasetParseError, LabelError

logger = logging.getLogger(__name__)


class Dataset:
    """Linhas esparsas (CSR, float64) com rótulos +1/-1"""

    def __init__(self, X, y):
        X = sp.csr_matrix(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.int8)
        if X.shape[0] != y.shape[0]:
            raise ValueError(f"{X.shape[0]} linhas para {y.shape[0]} rótulos")
        if not np.all((y == 1) | (y == -1)):
            raise LabelError("rótulos devem ser +1 ou -1", set(np.unique(y).tolist()))
        if not X.has_sorted_indices:
            X.sort_indices()
        self.X = X
        self.y = y
        self.pos_index = np.flatnonzero(y == 1)
        self.neg_index = np.flatnonzero(y == -1)

    @property
    def l(self):
        return self.X.shape[0]

    @property
    def p(self):
        return int(self.pos_index.size)

    @property
    def n(self):
        return int(self.neg_index.size)

    @property
    def dim(self):
        return self.X.shape[1]

    def subset(self, indices):
        """Novo Dataset com as linhas `indices` (mesma dimensão)"""
        indices = np.asarray(indices, dtype=np.int64)
        return Dataset(self.X[indices], self.y[indices])

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return (
            self.X.shape == other.X.shape
            and np.array_equal(self.y, other.y)
            and np.array_equal(self.X.indptr, other.X.indptr)
            and np.array_equal(self.X.indices, other.X.indices)
            and np.array_equal(self.X.data, other.X.data)
        )

    def __repr__(self):
        return f"Dataset(l={self.l}, p={self.p}, n={self.n}, dim={self.dim})"


def _parse_label(token, line_number):
    try:
        label = float(token)
    except ValueError:
        raise DatasetParseError(f"rótulo inválido '{token}'", line_number) from None
    if not math.isfinite(label):
        raise DatasetParseError(f"rótulo não finito '{token}'", line_number)
    return label


def _decode(line, line_number):
    if isinstance(line, str):
        return line
    try:
        return line.decode('utf-8')
    except UnicodeDecodeError:
        raise DatasetParseError("texto não é UTF-8 válido", line_number) from None


def _map_labels(raw, positive_classes=None, remap=False):
    """Converte rótulos brutos em +1/-1 segundo o mapeamento pedido"""
    distinct = set(np.unique(raw).tolist())

    if positive_classes is not None:
        positive = {float(c) for c in positive_classes}
        return np.where(np.isin(raw, list(positive)), 1, -1).astype(np.int8)

    if distinct <= {1.0, -1.0}:
        return raw.astype(np.int8)

    if remap and len(distinct) == 2:
        low, high = sorted(distinct)
        logger.info("Rótulos %s -> -1 e %s -> +1", low, high)
        return np.where(raw == high, 1, -1).astype(np.int8)

    raise LabelError("conjunto de rótulos não binário; use remap ou classes positivas", distinct)


def parse_libsvm(text_stream, positive_classes=None, remap=False, require_both=True):
    """
    Lê um fluxo de texto no formato LIBSVM

    Args:
        text_stream: iterável de linhas str ou bytes UTF-8 (arquivo aberto, io.StringIO, ...)
        positive_classes: rótulos que viram +1 (binarização de multiclasse)
        remap (bool): aceitar qualquer par de rótulos ({0,1}, {1,2}, ...)
        require_both (bool): exigir exemplos das duas classes

    Returns:
        Dataset
    """
    if isinstance(text_stream, str):
        text_stream = io.StringIO(text_stream)

    labels = []
    indptr = [0]
    indices = []
    values = []

    for line_number, line in enumerate(text_stream, start=1):
        line = _decode(line, line_number).split('#', 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        labels.append(_parse_label(tokens[0], line_number))

        previous = -1
        for token in tokens[1:]:
            idx_text, sep, val_text = token.partition(':')
            if not sep:
                raise DatasetParseError(f"par índice:valor inválido '{token}'", line_number)
            try:
                idx = int(idx_text)
                val = float(val_text)
            except ValueError:
                raise DatasetParseError(f"par índice:valor inválido '{token}'", line_number) from None
            if not math.isfinite(val):
                raise DatasetParseError(f"valor não finito '{token}'", line_number)
            if idx < 1:
                raise DatasetParseError(f"índice {idx} menor que 1", line_number)
            if idx - 1 <= previous:
                raise DatasetParseError("índices devem ser estritamente crescentes", line_number)
            previous = idx - 1
            indices.append(idx - 1)
            values.append(val)
        indptr.append(len(indices))

    if not labels:
        raise DatasetParseError("conjunto de dados vazio")

    y = _map_labels(np.asarray(labels), positive_classes, remap)
    p = int(np.sum(y == 1))
    if require_both and (p == 0 or p == y.size):
        raise LabelError("o conjunto precisa de exemplos das duas classes", set(np.unique(labels).tolist()))

    dim = (max(indices) + 1) if indices else 0
    X = sp.csr_matrix(
        (np.asarray(values, dtype=np.float64), np.asarray(indices, dtype=np.int32), np.asarray(indptr, dtype=np.int64)),
        shape=(len(labels), dim),
    )
    return Dataset(X, y)


def open_lines(path):
    """Abre o arquivo em modo binário (linhas decodificadas uma a uma), descomprimindo .gz"""
    if str(path).endswith('.gz'):
        return gzip.open(path, 'rb')
    return open(path, 'rb')


def load_dataset(path, positive_classes=None, remap=False, require_both=True):
    """Carrega um arquivo LIBSVM (texto ou .gz)"""
    if not os.path.exists(path):
        raise FileNotFoundError(f"arquivo não encontrado: {path}")
    with open_lines(path) as stream:
        ds = parse_libsvm(stream, positive_classes=positive_classes, remap=remap, require_both=require_both)
    logger.info("%s: l=%d p=%d n=%d dim=%d", path, ds.l, ds.p, ds.n, ds.dim)
    return ds


def file_checksum(path):
    """SHA-256 do conteúdo do arquivo (registrado no manifesto)"""
    digest = hashlib.sha256()
    with open(path, 'rb') as f:
        for block in iter(lambda: f.read(1 << 20), b''):
            digest.update(block)
    return digest.hexdigest()


def to_libsvm(ds):
    """Serializa um Dataset de volta para texto LIBSVM"""
    lines = []
    X = ds.X
    for r in range(ds.l):
        start, stop = X.indptr[r], X.indptr[r + 1]
        parts = ['+1' if ds.y[r] == 1 else '-1']
        parts.extend(f"{int(i) + 1}:{float(v)!r}" for i, v in zip(X.indices[start:stop], X.data[start:stop]))
        lines.append(' '.join(parts))
    return '\n'.join(lines) + '\n'


def fit_feature_scale(ds):
    """Fatores max-abs por feature (colunas nulas ficam com fator 1)"""
    return MaxAbsScaler().fit(ds.X).scale_.astype(np.float64)


def scale_rows(X, scale):
    """Divide cada coluna de X pelo seu fator (colunas além dos fatores ficam como estão)"""
    scale = np.asarray(scale, dtype=np.float64)
    X = sp.csr_matrix(X, dtype=np.float64, copy=True)
    if X.shape[1] > scale.size:
        # features nunca vistas no treino ficam sem escala
        scale = np.concatenate([scale, np.ones(X.shape[1] - scale.size)])
    inplace_column_scale(X, 1.0 / scale[:X.shape[1]])
    return X


def apply_feature_scale(ds, scale):
    """Divide cada feature pelo seu fator, levando os valores a [-1, 1]"""
    return Dataset(scale_rows(ds.X, scale), ds.y)
