"""
Seleção gulosa de funções base (matching pursuit) para o objetivo de AUC

A cada passo sorteamos kappa candidatos fora de J, pontuamos cada um pela
queda do objetivo (Newton unidimensional ou reotimização completa), admitimos
o melhor e, quando o cronograma manda, reotimizamos todos os coeficientes
com o Newton truncado.
"""

import logging
import time
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.sparse as sp
from joblib import Parallel, delayed

from sparseauc.config import get_config
from sparseauc.model_training.kernel import (
    KernelCache,
    KernelSpec,
    align_dim,
    kernel_column,
    kernel_matrix,
    squared_norms,
)
from sparseauc.model_training.objective import (
    ObjectiveContext,
    curvature_weights,
    eval_objective,
    loss_and_weights,
)
from sparseauc.model_training.tron import TronConfig, minimize
from sparseauc.pipeline.metrics import auc_from_labels

logger = logging.getLogger(__name__)

METHODS = ('one-dim', 'full-refit')
SCHEDULES = ('always', 'geometric', 'doubling')
WARM_STARTS = ('scored', 'zero')


@dataclass(frozen=True)
class EarlyStopConfig:
    enabled: bool = True
    patience: int = 10
    min_delta: float = 1e-4

    def __post_init__(self):
        if self.patience < 1:
            raise ValueError("patience deve ser >= 1")

    @classmethod
    def from_config(cls, **overrides):
        cfg = get_config('early_stop')
        cfg.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**cfg)


@dataclass(frozen=True)
class GreedyConfig:
    d_max: int = None
    d_max_cap: int = 1000
    kappa: int = 100
    method: str = 'one-dim'
    retrain_schedule: str = 'geometric'
    retrain_ratio: float = 2 ** 0.25
    warm_start: str = 'scored'
    onedim_tol: float = 1e-6
    onedim_max_iters: int = 20
    tie_tol: float = 1e-12
    seed: int = 42
    early_stop: EarlyStopConfig = field(default_factory=EarlyStopConfig)

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"método desconhecido: {self.method}")
        if self.retrain_schedule not in SCHEDULES:
            raise ValueError(f"cronograma de retreino desconhecido: {self.retrain_schedule}")
        if self.warm_start not in WARM_STARTS:
            raise ValueError(f"warm_start desconhecido: {self.warm_start}")
        if self.kappa < 1:
            raise ValueError("kappa deve ser >= 1")
        if self.d_max is not None and self.d_max < 0:
            raise ValueError("d_max deve ser >= 0")
        if self.retrain_schedule == 'geometric' and not self.retrain_ratio > 1.0:
            raise ValueError("retrain_ratio deve ser > 1")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ValueError("seed deve ser um inteiro sem sinal de 64 bits")

    @classmethod
    def from_config(cls, early_stop=None, **overrides):
        cfg = get_config('greedy')
        cfg['seed'] = get_config('runtime')['seed']
        cfg.update({k: v for k, v in overrides.items() if v is not None})
        return cls(early_stop=early_stop or EarlyStopConfig.from_config(), **cfg)

    def resolve_d_max(self, l):
        """
        d_max efetivo para l exemplos: padrão min(l/2, d_max_cap)

        Um d_max acima de l é aceito; o crescimento para quando os
        candidatos acabam (motivo pool_exhausted).
        """
        if self.d_max is None:
            return min(l // 2, self.d_max_cap)
        return int(self.d_max)


class ModelState:
    """
    Modelo esparso f(x) = sum_c beta[c] k(x, basis_vectors[c])

    Args:
        basis_index: índices J (ordem de admissão) no conjunto de treino
        beta: coeficientes, um por função base
        spec (KernelSpec): kernel
        basis_vectors: cópia CSR das linhas selecionadas
        C (float): peso da perda usado no treino
        feature_scale: fatores max-abs aplicados às features (ou None)
    """

    def __init__(self, basis_index, beta, spec, basis_vectors, C, feature_scale=None):
        self.basis_index = np.asarray(basis_index, dtype=np.int64)
        self.beta = np.asarray(beta, dtype=np.float64)
        self.spec = spec
        self.basis_vectors = sp.csr_matrix(basis_vectors, dtype=np.float64)
        self.C = float(C)
        self.feature_scale = None if feature_scale is None else np.asarray(feature_scale, dtype=np.float64)

        m = self.basis_index.size
        if self.beta.shape != (m,) or self.basis_vectors.shape[0] != m:
            raise ValueError(f"|J|={m}, |beta|={self.beta.size}, base com {self.basis_vectors.shape[0]} linhas")
        if np.unique(self.basis_index).size != m:
            raise ValueError("J contém índices repetidos")

    @classmethod
    def empty(cls, spec, C, dim=0):
        return cls(np.zeros(0, dtype=np.int64), np.zeros(0), spec, sp.csr_matrix((0, dim)), C)

    @property
    def size(self):
        return int(self.basis_index.size)

    @property
    def dim(self):
        return self.basis_vectors.shape[1]

    def kernel_scores(self, X, threads=1):
        """f(x) para cada linha de X (já na escala do treino)"""
        X = sp.csr_matrix(X)
        if self.size == 0:
            return np.zeros(X.shape[0])
        return kernel_matrix(self.spec, X, self.basis_vectors, threads) @ self.beta

    def __repr__(self):
        return f"ModelState(|J|={self.size}, kernel={self.spec.kind}, sigma={self.spec.sigma}, C={self.C})"


@dataclass
class FitState:
    """beta corrente e sua avaliação (scores, estatísticas, objetivo)"""
    beta: np.ndarray
    result: object

    @property
    def value(self):
        return self.result.value


@dataclass
class TraceRecord:
    basis_count: int
    objective: float
    train_auc: float
    val_auc: float
    elapsed_sec: float


@dataclass
class GrowthResult:
    model: ModelState
    trace: list
    stop_reason: str
    line_search_failed: bool = False
    retrain_count: int = 0

    @property
    def pool_exhausted(self):
        return self.stop_reason == 'pool_exhausted'


def _onedim_value(ctx, state, column, b):
    scores = state.result.scores + b * column
    loss, g, index, _ = loss_and_weights(scores, ctx.pos_index, ctx.neg_index, ctx.C, threads=1)
    return loss, g, index


def score_candidate_onedim(state, ctx, q, column=None, cfg=None):
    """
    Melhor coeficiente do candidato q com beta_J congelado

    E(b) = E_ridge(beta_J) + b f(x_q) + b^2 k_qq / 2 + perda(f + b k_q),
    minimizada por Newton com salvaguarda de decréscimo.

    Returns:
        (E_q, b): E_q <= E(beta_J) sempre (b = 0 se nada melhora)
    """
    cfg = cfg or GreedyConfig()
    q = int(q)
    if q in ctx.cache:
        raise ValueError(f"candidato {q} já está em J")
    if column is None:
        column = ctx.cache.candidate_column(q, threads=1)

    base = state.value
    ridge0 = base - _onedim_value(ctx, state, column, 0.0)[0]
    f_q = float(state.result.scores[q])
    k_qq = float(column[q])

    def value_at(b):
        loss = _onedim_value(ctx, state, column, b)[0]
        return ridge0 + b * f_q + 0.5 * b * b * k_qq + loss

    b = 0.0
    current = base
    for _ in range(cfg.onedim_max_iters):
        _, g, index = _onedim_value(ctx, state, column, b)
        h = curvature_weights(index, column, ctx.pos_index, ctx.neg_index)
        first = f_q + b * k_qq + ctx.C * float(np.dot(column, g))
        second = k_qq + ctx.C * float(np.dot(column, h))
        if not (np.isfinite(second) and second > 0.0):
            break
        step = -first / second

        accepted = False
        for _ in range(30):
            trial = value_at(b + step)
            if trial <= current:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            break
        b += step
        current = trial
        if abs(step) < cfg.onedim_tol:
            break

    if current > base:
        return base, 0.0
    return current, b


def score_candidate_fullrefit(state, ctx, q, column=None, cfg=None, tron_cfg=None):
    """
    Reotimiza todos os coeficientes de J + {q}

    Parte do ótimo unidimensional, então E_q nunca fica acima do valor
    obtido por score_candidate_onedim.

    Returns:
        (E_q, beta_{J+q})
    """
    q = int(q)
    if column is None:
        column = ctx.cache.candidate_column(q, threads=1)
    _, b = score_candidate_onedim(state, ctx, q, column, cfg)
    trial_ctx = replace(ctx, cache=ctx.cache.with_candidate(q, column), threads=1)
    beta, diagnostics = minimize(trial_ctx, np.append(state.beta, b), tron_cfg)
    return diagnostics.final.value, beta


def retrain_milestones(schedule, ratio, d_max):
    """Tamanhos |J| em que o Newton truncado roda sobre todos os coeficientes"""
    if schedule == 'always':
        return set(range(1, d_max + 1))
    if schedule == 'doubling':
        ratio = 2.0
    milestones = set()
    j = 0
    while True:
        size = int(np.floor(ratio ** j * (1.0 + 1e-12)))
        if size > d_max:
            break
        milestones.add(size)
        j += 1
    return milestones


def _pick_best(candidates, results, tie_tol):
    """Menor E_q; empates dentro de tie_tol ficam com o menor índice"""
    best_value = min(r[0] for r in results)
    tied = [(int(q), r) for q, r in zip(candidates, results) if r[0] <= best_value + tie_tol]
    return min(tied, key=lambda item: item[0])


class _ValidationScorer:
    """Colunas K(X_val, x_q) crescidas junto com J"""

    def __init__(self, spec, val, X_train, capacity, threads):
        dim = max(val.dim, X_train.shape[1])
        self.spec = spec
        self.val = val
        self.X = align_dim(val.X, dim)
        self.X_train = align_dim(X_train, dim)
        self.sq_norms = squared_norms(self.X)
        self.train_sq = squared_norms(self.X_train)
        self.columns = np.zeros((val.l, capacity), order='F')
        self.size = 0
        self.threads = threads

    def append(self, q):
        kernel_column(self.spec, self.X, self.sq_norms, self.X_train[q].toarray().ravel(),
                      float(self.train_sq[q]), self.columns[:, self.size], self.threads)
        self.size += 1

    def auc(self, beta, tie_credit):
        scores = self.columns[:, :self.size] @ beta if self.size else np.zeros(self.val.l)
        return auc_from_labels(scores, self.val.y, tie_credit)


def grow(ds, spec, C, cfg=None, val=None, tron_cfg=None, threads=1, tie_credit=None):
    """
    Cresce J uma função base por vez

    Args:
        ds (Dataset): treino (as duas classes presentes)
        spec (KernelSpec): kernel
        C (float): peso da perda
        cfg (GreedyConfig): parâmetros da seleção
        val (Dataset): validação opcional (AUC no trace e parada antecipada)
        tron_cfg (TronConfig): parâmetros do Newton truncado
        threads (int): threads para colunas de kernel e candidatos

    Returns:
        GrowthResult com o modelo, um TraceRecord por admissão e o motivo da parada
    """
    cfg = cfg or GreedyConfig.from_config()
    tron_cfg = tron_cfg or TronConfig.from_config()
    spec = spec or KernelSpec.from_config()
    if tie_credit is None:
        tie_credit = get_config('eval')['tie_credit']
    if ds.p == 0 or ds.n == 0:
        raise ValueError("o treino precisa de exemplos das duas classes")

    started = time.perf_counter()
    d_max = cfg.resolve_d_max(ds.l)
    if d_max == 0:
        logger.warning("d_max = 0: modelo sem funções base (decisão constante 0)")
        return GrowthResult(ModelState.empty(spec, C, ds.dim), [], 'd_max')

    rng = np.random.default_rng(int(cfg.seed))
    capacity = min(d_max, ds.l)
    cache = KernelCache(spec, ds.X, capacity, threads)
    ctx = ObjectiveContext.from_dataset(cache, ds, C, threads)
    state = FitState(np.zeros(0), eval_objective(ctx, np.zeros(0)))
    milestones = retrain_milestones(cfg.retrain_schedule, cfg.retrain_ratio, capacity)
    scorer = _ValidationScorer(spec, val, ds.X, capacity, threads) if val is not None else None
    early = cfg.early_stop

    trace = []
    stop_reason = 'd_max'
    line_search_failed = False
    retrain_count = 0
    retrained_last = False
    best_val = -np.inf
    since_best = 0
    all_indices = np.arange(ds.l)

    while cache.size < d_max:
        pool = np.setdiff1d(all_indices, np.asarray(cache.basis_order, dtype=np.int64), assume_unique=True)
        if pool.size == 0:
            logger.warning("candidatos esgotados com |J|=%d < d_max=%d", cache.size, d_max)
            stop_reason = 'pool_exhausted'
            break
        candidates = rng.choice(pool, size=min(cfg.kappa, pool.size), replace=False)

        def score(q):
            column = cache.candidate_column(q, threads=1)
            if cfg.method == 'full-refit':
                return score_candidate_fullrefit(state, ctx, q, column, cfg, tron_cfg), column
            return score_candidate_onedim(state, ctx, q, column, cfg), column

        if threads > 1:
            scored = Parallel(n_jobs=threads, prefer="threads")(delayed(score)(q) for q in candidates)
        else:
            scored = [score(q) for q in candidates]
        columns = {int(q): column for q, (_, column) in zip(candidates, scored)}

        q_best, (E_best, coef) = _pick_best(candidates, [result for result, _ in scored], cfg.tie_tol)
        previous = state.value
        cache.append_column(q_best, columns[q_best])
        if scorer is not None:
            scorer.append(q_best)

        if cfg.method == 'full-refit':
            beta = np.asarray(coef, dtype=np.float64)
        elif cfg.warm_start == 'scored':
            beta = np.append(state.beta, coef)
        else:
            beta = np.append(state.beta, 0.0)

        retrained_last = cache.size in milestones
        if retrained_last:
            beta, diagnostics = minimize(ctx, beta, tron_cfg)
            line_search_failed |= diagnostics.line_search_failed
            retrain_count += 1
            state = FitState(beta, diagnostics.final)
        else:
            state = FitState(beta, eval_objective(ctx, beta))

        if state.value > previous + 1e-9 * max(1.0, abs(previous)):
            logger.warning("objetivo aumentou na admissão de %d: %.12g -> %.12g", q_best, previous, state.value)

        train_auc = auc_from_labels(state.result.scores, ds.y, tie_credit)
        val_auc = scorer.auc(state.beta, tie_credit) if scorer is not None else float('nan')
        trace.append(TraceRecord(cache.size, state.value, train_auc, val_auc, time.perf_counter() - started))
        logger.debug("|J|=%d q=%d E=%.10g (candidato %.10g) train_auc=%.4f val_auc=%.4f",
                     cache.size, q_best, state.value, E_best, train_auc, val_auc)

        if scorer is not None and early.enabled:
            if val_auc > best_val + early.min_delta:
                best_val = val_auc
                since_best = 0
            else:
                since_best += 1
                if since_best >= early.patience:
                    logger.info("parada antecipada com |J|=%d (melhor AUC de validação %.4f)", cache.size, best_val)
                    stop_reason = 'early_stop'
                    break

    if cache.size > 0 and not retrained_last:
        beta, diagnostics = minimize(ctx, state.beta, tron_cfg)
        line_search_failed |= diagnostics.line_search_failed
        retrain_count += 1
        state = FitState(beta, diagnostics.final)

    model = ModelState(cache.basis_order, state.beta, spec, ds.X[cache.basis_order], C)
    if trace:
        last = trace[-1]
        # AUC final pelo mesmo caminho da predição
        last.objective = state.value
        last.train_auc = auc_from_labels(model.kernel_scores(ds.X, threads), ds.y, tie_credit)
        if scorer is not None:
            last.val_auc = scorer.auc(state.beta, tie_credit)
        last.elapsed_sec = time.perf_counter() - started

    logger.info("treino concluído: |J|=%d, E=%.10g, motivo=%s, retreinos=%d",
                model.size, state.value, stop_reason, retrain_count)
    return GrowthResult(model, trace, stop_reason, line_search_failed, retrain_count)
