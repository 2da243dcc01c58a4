"""
Objetivo E(beta_J), gradiente e produto Hessiana-vetor generalizado

    E(beta) = 1/2 beta' K_JJ beta + C/2 sum_{(i,j) in SV} (1 - f_i + f_j)^2,   f = K[:, J] beta

A soma sobre pares é reescrita por exemplo a partir das PairStats:

    sum_SV r^2 = sum_i [l_i^- (1 - f_i)^2 + 2 (1 - f_i) gamma_i^-(beta, beta)] + sum_j l_j^+ f_j^2

que é a mesma expansão p_beta - 2(sum l^- f_i - sum l^+ f_j) + sum l^- f_i^2
+ sum l^+ f_j^2 - 2 sum f_i gamma_i^-, agrupada por positivo.
"""

from dataclasses import dataclass, field

import numpy as np

from sparseauc.model_training.pairstats import compute_stats_oracle, violation_index


@dataclass
class ObjectiveContext:
    cache: object
    C: float
    pos_index: np.ndarray
    neg_index: np.ndarray
    threads: int = 1

    def __post_init__(self):
        if not self.C > 0:
            raise ValueError("C deve ser positivo")

    @classmethod
    def from_dataset(cls, cache, ds, C, threads=1):
        return cls(cache=cache, C=float(C), pos_index=ds.pos_index, neg_index=ds.neg_index, threads=threads)


@dataclass
class EvalResult:
    value: float
    grad: np.ndarray
    stats: object
    scores: np.ndarray = field(repr=False)
    pair_index: object = field(repr=False)


def loss_and_weights(scores, pos_index, neg_index, C, threads=1):
    """
    Perda quadrática dos pares e pesos g por exemplo (d perda / d f = C g)

    Returns:
        (loss, g, pair_index, stats)
    """
    fp = scores[pos_index]
    fn = scores[neg_index]
    index = violation_index(fp, fn, threads)
    stats = index.stats(fp, fn)

    l_minus = stats.l_minus
    l_plus = stats.l_plus
    one_minus = 1.0 - fp
    pair_sum = (np.dot(l_minus, one_minus * one_minus)
                + 2.0 * np.dot(one_minus, stats.gamma_minus)
                + np.dot(l_plus, fn * fn))
    loss = 0.5 * C * max(pair_sum, 0.0)

    g = np.zeros(scores.size)
    g[pos_index] = l_minus * fp - stats.gamma_minus - l_minus
    g[neg_index] = l_plus * fn - stats.gamma_plus + l_plus
    return loss, g, index, stats


def curvature_weights(pair_index, s, pos_index, neg_index):
    """h por exemplo para a direção s = K v, com SV congelado em beta"""
    s_pos = s[pos_index]
    s_neg = s[neg_index]
    stats = pair_index.stats(s_pos, s_neg)
    h = np.zeros(s.size)
    h[pos_index] = stats.l_minus * s_pos - stats.gamma_minus
    h[neg_index] = stats.l_plus * s_neg - stats.gamma_plus
    return h


def eval_objective(ctx, beta):
    """E(beta), gradiente e estatísticas em beta"""
    cache = ctx.cache
    beta = np.asarray(beta, dtype=np.float64)
    if beta.shape != (cache.size,):
        raise ValueError(f"beta de tamanho {beta.shape} para |J|={cache.size}")

    scores = cache.scores(beta)
    loss, g, index, stats = loss_and_weights(scores, ctx.pos_index, ctx.neg_index, ctx.C, ctx.threads)

    K_JJ = cache.gram_block()
    K_beta = K_JJ @ beta
    value = 0.5 * float(np.dot(beta, K_beta)) + loss
    grad = K_beta + ctx.C * (cache.columns.T @ g)
    return EvalResult(value=value, grad=grad, stats=stats, scores=scores, pair_index=index)


def hessian_vec(ctx, at, v):
    """
    Produto Hessiana generalizada-vetor em beta

    Args:
        at (EvalResult): avaliação em beta (fornece o conjunto SV congelado)
        v: direção de tamanho |J|
    """
    cache = ctx.cache
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (cache.size,):
        raise ValueError(f"v de tamanho {v.shape} para |J|={cache.size}")
    s = cache.scores(v)
    h = curvature_weights(at.pair_index, s, ctx.pos_index, ctx.neg_index)
    return cache.gram_block() @ v + ctx.C * (cache.columns.T @ h)


def eval_objective_oracle(ctx, beta):
    """
    E e gradiente pela soma direta sobre todos os pares

    Returns:
        (value, grad, stats)
    """
    cache = ctx.cache
    beta = np.asarray(beta, dtype=np.float64)
    K = cache.columns
    f = K @ beta if cache.size else np.zeros(cache.l)
    K_JJ = cache.gram_block()

    value = 0.5 * float(beta @ K_JJ @ beta)
    grad = K_JJ @ beta
    for i in ctx.pos_index:
        for j in ctx.neg_index:
            if f[j] > f[i] - 1.0:
                r = 1.0 - f[i] + f[j]
                value += 0.5 * ctx.C * r * r
                grad = grad - ctx.C * r * (K[i] - K[j])
    fp, fn = f[ctx.pos_index], f[ctx.neg_index]
    return value, grad, compute_stats_oracle(fp, fn, fp, fn)
