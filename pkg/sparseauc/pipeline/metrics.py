"""AUC por ordenação e contagem de postos, e o laço O(pn) de referência"""

import numpy as np


def _check_classes(pos_scores, neg_scores):
    pos_scores = np.asarray(pos_scores, dtype=np.float64).ravel()
    neg_scores = np.asarray(neg_scores, dtype=np.float64).ravel()
    if pos_scores.size == 0 or neg_scores.size == 0:
        raise ValueError("AUC exige scores positivos e negativos")
    return pos_scores, neg_scores


def _combine(less, ties, p, n, tie_credit):
    if tie_credit == 0.5:
        return (2 * less + ties) / (2 * p * n)
    return (less + tie_credit * ties) / (p * n)


def auc(pos_scores, neg_scores, tie_credit=0.0):
    """
    Fração dos pares (positivo, negativo) com score positivo estritamente maior

    Args:
        tie_credit (float): crédito dado a pares empatados (0.0 conta empate
            como erro; 0.5 é a convenção usual)
    """
    pos_scores, neg_scores = _check_classes(pos_scores, neg_scores)
    neg_sorted = np.sort(neg_scores)
    below = np.searchsorted(neg_sorted, pos_scores, side='left')
    below_or_equal = np.searchsorted(neg_sorted, pos_scores, side='right')
    less = int(below.sum())
    ties = int((below_or_equal - below).sum())
    return _combine(less, ties, pos_scores.size, neg_scores.size, tie_credit)


def auc_oracle(pos_scores, neg_scores, tie_credit=0.0):
    """Mesma AUC enumerando os p*n pares"""
    pos_scores, neg_scores = _check_classes(pos_scores, neg_scores)
    less = 0
    ties = 0
    for fp in pos_scores.tolist():
        for fn in neg_scores.tolist():
            if fp > fn:
                less += 1
            elif fp == fn:
                ties += 1
    return _combine(less, ties, pos_scores.size, neg_scores.size, tie_credit)


def auc_from_labels(scores, y, tie_credit=0.0):
    """AUC a partir de scores por exemplo e rótulos +1/-1"""
    scores = np.asarray(scores, dtype=np.float64)
    y = np.asarray(y)
    return auc(scores[y == 1], scores[y == -1], tie_credit)
