"""
Estatísticas dos pares violadores por ordenação, somas prefixadas e busca binária

Um par (i, j), i positivo e j negativo, viola a margem quando
1 - f_i + f_j > 0. Para cada exemplo contamos os parceiros violadores da
outra classe (l_i^-, l_j^+) e somamos os valores de direção desses
parceiros (gamma_i^-, gamma_j^+), tudo em O(p log p + n log n).

O predicado usado nos dois lados é o mesmo, `f_j > fl(f_i - 1)`, então
sum(l_minus) == sum(l_plus) também em ponto flutuante. Resíduo exatamente
zero não é violação.
"""

from dataclasses import dataclass

import numpy as np

from sparseauc.utils.parallel import run_chunks


@dataclass
class PairStats:
    l_minus: np.ndarray
    l_plus: np.ndarray
    gamma_minus: np.ndarray
    gamma_plus: np.ndarray

    @property
    def p_beta(self):
        return int(self.l_minus.sum())


class PairIndex:
    """
    Resultado da ordenação e das buscas binárias para um vetor de scores

    Os limiares dependem só de beta; `stats(pos_v, neg_v)` reaproveita as
    buscas para qualquer direção v (produtos Hessiana-vetor).
    """

    def __init__(self, pos_order, neg_order, pos_cut, neg_cut):
        self.pos_order = pos_order
        self.neg_order = neg_order
        # negativos ordenados [pos_cut[i]:] violam com o positivo i
        self.pos_cut = pos_cut
        # positivos ordenados [:neg_cut[j]] violam com o negativo j
        self.neg_cut = neg_cut

    @property
    def p(self):
        return self.pos_order.size

    @property
    def n(self):
        return self.neg_order.size

    @property
    def l_minus(self):
        return self.n - self.pos_cut

    @property
    def l_plus(self):
        return self.neg_cut

    def stats(self, pos_v, neg_v):
        """l^-, l^+, gamma^-(beta, v), gamma^+(beta, v)"""
        pos_v_sorted = np.asarray(pos_v, dtype=np.float64)[self.pos_order]
        neg_v_sorted = np.asarray(neg_v, dtype=np.float64)[self.neg_order]

        # prefix[k] = soma dos k primeiros positivos; suffix[k] = soma dos negativos de k em diante
        prefix = np.zeros(self.p + 1)
        prefix[1:] = np.cumsum(pos_v_sorted)
        suffix = np.zeros(self.n + 1)
        suffix[:-1] = np.cumsum(neg_v_sorted[::-1])[::-1]

        return PairStats(
            l_minus=self.l_minus,
            l_plus=self.l_plus,
            gamma_minus=suffix[self.pos_cut],
            gamma_plus=prefix[self.neg_cut],
        )


def violation_index(pos_scores, neg_scores, threads=1):
    """
    Ordena os scores e localiza, por busca binária, os parceiros violadores

    As buscas (uma por exemplo) são independentes e rodam em blocos
    paralelos sobre arrays ordenados somente-leitura.
    """
    pos_scores = np.asarray(pos_scores, dtype=np.float64)
    neg_scores = np.asarray(neg_scores, dtype=np.float64)

    pos_order = np.argsort(pos_scores, kind='stable')
    neg_order = np.argsort(neg_scores, kind='stable')
    neg_sorted = neg_scores[neg_order]
    # arredondamento é monótono: continua ordenado
    pos_shift_sorted = pos_scores[pos_order] - 1.0
    pos_shift = pos_scores - 1.0

    pos_cut = np.empty(pos_scores.size, dtype=np.int64)
    neg_cut = np.empty(neg_scores.size, dtype=np.int64)

    def search_pos(start, stop):
        # primeiro negativo com f_j > f_i - 1
        pos_cut[start:stop] = np.searchsorted(neg_sorted, pos_shift[start:stop], side='right')

    def search_neg(start, stop):
        # quantidade de positivos com f_i - 1 < f_j
        neg_cut[start:stop] = np.searchsorted(pos_shift_sorted, neg_scores[start:stop], side='left')

    run_chunks(search_pos, pos_scores.size, threads)
    run_chunks(search_neg, neg_scores.size, threads)
    return PairIndex(pos_order, neg_order, pos_cut, neg_cut)


def compute_stats_fast(pos_scores, neg_scores, pos_v, neg_v, threads=1):
    """Estatísticas dos pares violadores em O(l log l)"""
    return violation_index(pos_scores, neg_scores, threads).stats(pos_v, neg_v)


def compute_stats_oracle(pos_scores, neg_scores, pos_v, neg_v):
    """Mesmo contrato por enumeração direta dos p*n pares"""
    pos_scores = np.asarray(pos_scores, dtype=np.float64)
    neg_scores = np.asarray(neg_scores, dtype=np.float64)
    pos_v = np.asarray(pos_v, dtype=np.float64)
    neg_v = np.asarray(neg_v, dtype=np.float64)

    p, n = pos_scores.size, neg_scores.size
    fp, fn, vp, vn = pos_scores.tolist(), neg_scores.tolist(), pos_v.tolist(), neg_v.tolist()
    l_minus = np.zeros(p, dtype=np.int64)
    l_plus = np.zeros(n, dtype=np.int64)
    gamma_minus = np.zeros(p)
    gamma_plus = np.zeros(n)
    for i in range(p):
        for j in range(n):
            if fn[j] > fp[i] - 1.0:
                l_minus[i] += 1
                l_plus[j] += 1
                gamma_minus[i] += vn[j]
                gamma_plus[j] += vp[i]
    return PairStats(l_minus, l_plus, gamma_minus, gamma_plus)
