"""
Predição, AUC e busca em grade de (C, sigma) por validação cruzada
"""

import logging
from dataclasses import dataclass, field

import numpy as np
import pandas as pd
import scipy.sparse as sp
from joblib import Parallel, delayed

from sparseauc.config import get_config
from sparseauc.data_collection.dataset import scale_rows
from sparseauc.data_collection.splits import stratified_folds
from sparseauc.errors import SparseAUCError
from sparseauc.model_training.greedy import grow
from sparseauc.model_training.kernel import KernelSpec
from sparseauc.pipeline.metrics import auc_from_labels
from sparseauc.utils.files import atomic_write

logger = logging.getLogger(__name__)

GRID_COLUMNS = ['C', 'sigma', 'mean_auc', 'std_auc', 'mean_basis_count', 'valid']


def decision_function(model, X, threads=1):
    """
    f(x) para cada linha de X (escala original; os fatores do modelo são aplicados)

    Índices de feature que o treino nunca viu são aceitos: o kernel
    simplesmente os trata como coordenadas ausentes da base.
    """
    X = sp.csr_matrix(X, dtype=np.float64)
    if model.feature_scale is not None:
        X = scale_rows(X, model.feature_scale)
    return model.kernel_scores(X, threads)


def predict(model, x):
    """f(x) de um único vetor (esparso 1 x dim, denso ou lista)"""
    if sp.issparse(x):
        row = sp.csr_matrix(x)
    else:
        row = sp.csr_matrix(np.atleast_2d(np.asarray(x, dtype=np.float64)))
    return float(decision_function(model, row)[0])


@dataclass(frozen=True)
class GridSpec:
    C_values: tuple
    sigma_values: tuple

    def __post_init__(self):
        if not self.C_values or not self.sigma_values:
            raise ValueError("a grade precisa de ao menos um C e um sigma")
        if min(self.C_values) <= 0 or min(self.sigma_values) <= 0:
            raise ValueError("valores de C e sigma devem ser positivos")

    @classmethod
    def from_config(cls, C_values=None, sigma_values=None):
        cfg = get_config('grid')
        return cls(
            C_values=tuple(float(c) for c in (C_values or cfg['C_values'])),
            sigma_values=tuple(float(s) for s in (sigma_values or cfg['sigma_values'])),
        )

    def deduplicated(self):
        """Mesma grade sem valores repetidos (ordem preservada)"""
        C_values = tuple(dict.fromkeys(self.C_values))
        sigma_values = tuple(dict.fromkeys(self.sigma_values))
        if len(C_values) < len(self.C_values) or len(sigma_values) < len(self.sigma_values):
            logger.warning("valores repetidos removidos da grade")
        return GridSpec(C_values, sigma_values)

    def cells(self):
        return [(C, sigma) for C in self.C_values for sigma in self.sigma_values]


@dataclass
class GridCell:
    C: float
    sigma: float
    mean_auc: float = float('nan')
    std_auc: float = float('nan')
    mean_basis_count: float = float('nan')
    valid: bool = True
    error: str = ''
    fold_aucs: list = field(default_factory=list)


@dataclass
class GridSearchResult:
    best_C: float
    best_sigma: float
    cells: list

    def to_frame(self):
        return pd.DataFrame([{name: getattr(cell, name) for name in GRID_COLUMNS} for cell in self.cells],
                            columns=GRID_COLUMNS)


def _evaluate_cell(ds, splits, C, sigma, kind, cfg, tron_cfg, tie_credit):
    spec = KernelSpec(kind=kind, sigma=sigma)
    aucs = []
    sizes = []
    try:
        for train_idx, val_idx in splits:
            train = ds.subset(train_idx)
            val = ds.subset(val_idx)
            result = grow(train, spec, C, cfg, val=val, tron_cfg=tron_cfg, threads=1, tie_credit=tie_credit)
            if result.line_search_failed:
                return GridCell(C, sigma, valid=False, error="busca linear falhou")
            scores = result.model.kernel_scores(val.X)
            aucs.append(auc_from_labels(scores, val.y, tie_credit))
            sizes.append(result.model.size)
    except (SparseAUCError, ValueError, FloatingPointError, np.linalg.LinAlgError) as e:
        logger.warning("célula C=%g sigma=%g inválida: %s", C, sigma, e)
        return GridCell(C, sigma, valid=False, error=str(e))

    return GridCell(C, sigma, mean_auc=float(np.mean(aucs)), std_auc=float(np.std(aucs)),
                    mean_basis_count=float(np.mean(sizes)), fold_aucs=aucs)


def grid_search(ds, grid, plan, cfg, tron_cfg=None, kind='gaussian', threads=1, tie_credit=None):
    """
    AUC média de validação (runs x folds) para cada ponto da grade

    Células treinam de forma independente, em paralelo até `threads`
    workers, e são reduzidas na ordem da grade. Melhor = maior AUC média;
    empate fica com o menor C e depois o menor sigma.

    Returns:
        GridSearchResult
    """
    if tie_credit is None:
        tie_credit = get_config('eval')['tie_credit']
    grid = grid.deduplicated()
    splits = [split for run in range(plan.runs) for split in stratified_folds(ds, plan, run)]
    logger.info("grade %dx%d, %d treinos por célula", len(grid.C_values), len(grid.sigma_values), len(splits))

    jobs = (delayed(_evaluate_cell)(ds, splits, C, sigma, kind, cfg, tron_cfg, tie_credit) for C, sigma in grid.cells())
    if threads > 1:
        cells = Parallel(n_jobs=threads, prefer="threads")(jobs)
    else:
        cells = [fn(*args, **kwargs) for fn, args, kwargs in jobs]

    valid = [cell for cell in cells if cell.valid]
    if not valid:
        raise SparseAUCError("nenhuma célula da grade treinou com sucesso")
    best = min(valid, key=lambda cell: (-cell.mean_auc, cell.C, cell.sigma))
    return GridSearchResult(best.C, best.sigma, cells)


def write_grid_csv(result, path):
    with atomic_write(path) as handle:
        result.to_frame().to_csv(handle, index=False)
