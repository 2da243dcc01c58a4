"""Exceções do pacote."""


class SparseAUCError(Exception):
    """Base de todos os erros do sparseauc"""


class DatasetParseError(SparseAUCError, ValueError):
    """Linha mal formada (ou arquivo vazio) no formato LIBSVM"""

    def __init__(self, message, line_number=None):
        self.line_number = line_number
        if line_number is not None:
            message = f"linha {line_number}: {message}"
        super().__init__(message)


class LabelError(SparseAUCError, ValueError):
    """Conjunto de rótulos que não é binário {+1, -1}"""

    def __init__(self, message, labels=()):
        self.labels = sorted(labels)
        super().__init__(f"{message} (rótulos encontrados: {self.labels})")


class SplitError(SparseAUCError, ValueError):
    """Divisão em folds impossível para as contagens de classe"""


class ModelFormatError(SparseAUCError):
    """Arquivo de modelo inválido ou de versão incompatível"""
