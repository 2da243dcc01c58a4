"""Divisões estratificadas treino/validação (k-fold e holdout)"""

from dataclasses import dataclass

import numpy as np
from sklearn.model_selection import StratifiedKFold, StratifiedShuffleSplit

from sparseauc.config import get_config
from sparseauc.errors import SplitError

MODES = ('k-fold', 'holdout-fraction')


@dataclass(frozen=True)
class SplitPlan:
    fold_count: int = 5
    seed: int = 42
    mode: str = 'k-fold'
    val_fraction: float = 0.2
    runs: int = 1

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"modo de divisão desconhecido: {self.mode}")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ValueError("seed deve ser um inteiro sem sinal de 64 bits")
        if self.runs < 1:
            raise ValueError("runs deve ser >= 1")
        if self.mode == 'holdout-fraction' and not 0.0 < self.val_fraction < 1.0:
            raise ValueError("val_fraction deve estar em (0, 1)")

    @classmethod
    def from_config(cls, **overrides):
        cfg = get_config('cv')
        cfg['seed'] = get_config('runtime')['seed']
        cfg.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**cfg)

    def run_seeds(self):
        """Seeds de 32 bits, uma por repetição, derivadas da seed de 64 bits"""
        states = np.random.SeedSequence(int(self.seed)).generate_state(self.runs, dtype=np.uint32)
        return [int(s) for s in states]


def stratified_folds(ds, plan, run=0):
    """
    Divide {0..l-1} em pares (treino, validação) estratificados

    Em modo k-fold cada fold de validação recebe floor(p/k) ou ceil(p/k)
    positivos (e o mesmo para negativos). A atribuição depende só de
    (seed, run, índices).

    Returns:
        list de (train_indices, val_indices) como arrays int64 ordenados
    """
    seed = plan.run_seeds()[run]

    if plan.mode == 'holdout-fraction':
        return [holdout_split(ds, plan.val_fraction, seed)]

    k = int(plan.fold_count)
    if k < 2:
        raise SplitError(f"fold_count deve ser >= 2 (recebido {k})")
    if k > min(ds.p, ds.n):
        raise SplitError(f"fold_count={k} excede a menor classe (p={ds.p}, n={ds.n})")

    splitter = StratifiedKFold(n_splits=k, shuffle=True, random_state=seed)
    return [
        (np.sort(train).astype(np.int64), np.sort(val).astype(np.int64))
        for train, val in splitter.split(np.zeros((ds.l, 1)), ds.y)
    ]


def holdout_split(ds, val_fraction, seed):
    """Um único par (treino, validação) estratificado"""
    splitter = StratifiedShuffleSplit(n_splits=1, test_size=val_fraction, random_state=seed)
    try:
        train, val = next(splitter.split(np.zeros((ds.l, 1)), ds.y))
    except ValueError as e:
        raise SplitError(str(e)) from None
    return np.sort(train).astype(np.int64), np.sort(val).astype(np.int64)
