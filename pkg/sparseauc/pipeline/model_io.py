"""
Arquivo de modelo: contêiner binário versionado com manifesto JSON embutido

Layout (tudo little-endian):

    magic         8 bytes  b"SPAUC\\0\\0\\0"
    version       uint32
    manifest_len  uint64, seguido do manifesto JSON em UTF-8
    kind          uint8    0 = gaussian, 1 = linear
    sigma, C      float64
    m, dim        uint64
    J             int64[m]
    beta          float64[m]
    nnz           uint64
    indptr        int64[m + 1]
    indices       int64[nnz]
    data          float64[nnz]
    has_scale     uint8, seguido de float64[dim] quando 1
"""

import json
import logging
import struct
from dataclasses import asdict, dataclass

import numpy as np
import scipy.sparse as sp

from sparseauc import __version__
from sparseauc.errors import ModelFormatError
from sparseauc.model_training.greedy import ModelState
from sparseauc.model_training.kernel import KernelSpec
from sparseauc.utils.files import atomic_write

logger = logging.getLogger(__name__)

MAGIC = b"SPAUC\0\0\0"
FORMAT_VERSION = 1
KIND_CODES = {'gaussian': 0, 'linear': 1}


@dataclass
class RunManifest:
    """Configuração resolvida de um treino e os checksums dos dados usados"""
    options: dict
    train_checksum: str = ''
    val_checksum: str = ''
    stop_reason: str = ''
    basis_count: int = 0
    format_version: int = FORMAT_VERSION
    package_version: str = __version__

    def to_json(self):
        return json.dumps(asdict(self), sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, text):
        try:
            return cls(**json.loads(text))
        except (TypeError, ValueError) as e:
            raise ModelFormatError(f"manifesto inválido: {e}") from None


def _array_bytes(values, dtype):
    return np.ascontiguousarray(values, dtype=np.dtype(dtype)).tobytes()


def serialize_model(model, manifest):
    """bytes do arquivo de modelo"""
    basis = sp.csr_matrix(model.basis_vectors)
    basis.sort_indices()
    manifest_bytes = manifest.to_json().encode('utf-8')
    m = model.size

    parts = [
        MAGIC,
        struct.pack('<IQ', FORMAT_VERSION, len(manifest_bytes)),
        manifest_bytes,
        struct.pack('<Bdd', KIND_CODES[model.spec.kind], model.spec.sigma, model.C),
        struct.pack('<QQ', m, basis.shape[1]),
        _array_bytes(model.basis_index, '<i8'),
        _array_bytes(model.beta, '<f8'),
        struct.pack('<Q', basis.nnz),
        _array_bytes(basis.indptr, '<i8'),
        _array_bytes(basis.indices, '<i8'),
        _array_bytes(basis.data, '<f8'),
    ]
    if model.feature_scale is None:
        parts.append(struct.pack('<B', 0))
    else:
        scale = np.ones(basis.shape[1])
        size = min(scale.size, model.feature_scale.size)
        scale[:size] = model.feature_scale[:size]
        parts.append(struct.pack('<B', 1))
        parts.append(_array_bytes(scale, '<f8'))
    return b''.join(parts)


class _Reader:
    def __init__(self, payload):
        self.payload = payload
        self.offset = 0

    def take(self, size):
        if self.offset + size > len(self.payload):
            raise ModelFormatError("arquivo de modelo truncado")
        chunk = self.payload[self.offset:self.offset + size]
        self.offset += size
        return chunk

    def unpack(self, fmt):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))

    def array(self, dtype, count):
        dtype = np.dtype(dtype)
        return np.frombuffer(self.take(dtype.itemsize * count), dtype=dtype).astype(dtype.newbyteorder('='))


def deserialize_model(payload):
    """(ModelState, RunManifest) a partir dos bytes do arquivo"""
    reader = _Reader(payload)
    if reader.take(len(MAGIC)) != MAGIC:
        raise ModelFormatError("não é um arquivo de modelo sparseauc")
    version, manifest_len = reader.unpack('<IQ')
    if version != FORMAT_VERSION:
        raise ModelFormatError(f"versão de formato {version} não suportada (esperada {FORMAT_VERSION})")
    manifest = RunManifest.from_json(reader.take(manifest_len).decode('utf-8'))

    kind_code, sigma, C = reader.unpack('<Bdd')
    kinds = {code: kind for kind, code in KIND_CODES.items()}
    if kind_code not in kinds:
        raise ModelFormatError(f"código de kernel desconhecido: {kind_code}")
    m, dim = reader.unpack('<QQ')
    basis_index = reader.array('<i8', m)
    beta = reader.array('<f8', m)
    (nnz,) = reader.unpack('<Q')
    indptr = reader.array('<i8', m + 1)
    indices = reader.array('<i8', nnz)
    data = reader.array('<f8', nnz)
    (has_scale,) = reader.unpack('<B')
    scale = reader.array('<f8', dim) if has_scale else None
    if reader.offset != len(payload):
        raise ModelFormatError("bytes extras no fim do arquivo de modelo")

    try:
        basis = sp.csr_matrix((data, indices, indptr), shape=(m, dim))
        model = ModelState(basis_index, beta, KernelSpec(kinds[kind_code], sigma), basis, C, scale)
    except ValueError as e:
        raise ModelFormatError(f"conteúdo inconsistente: {e}") from None
    return model, manifest


def save_model(model, manifest, path):
    with atomic_write(path, 'wb') as handle:
        handle.write(serialize_model(model, manifest))
    logger.info("modelo salvo em %s (|J|=%d)", path, model.size)


def load_model(path):
    with open(path, 'rb') as handle:
        payload = handle.read()
    return deserialize_model(payload)
