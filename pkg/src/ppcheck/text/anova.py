"""One-way ANOVA F-value feature ranking."""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from ..errors import SingleClass


def anova_f(X, y):
    """Per-column one-way ANOVA F statistic between the label groups.

    Columns with no between-group variance score 0 (this includes constant
    columns); columns with between-group variance but none within groups
    score ``inf``.
    """
    X = check_array(X, dtype=np.float64)
    y = np.asarray(y)
    classes = np.unique(y)
    if len(classes) < 2:
        raise SingleClass()
    n, k = X.shape[0], len(classes)
    grand = X.mean(axis=0)
    ss_between = np.zeros(X.shape[1])
    ss_within = np.zeros(X.shape[1])
    for c in classes:
        Xc = X[y == c]
        mean_c = Xc.mean(axis=0)
        ss_between += len(Xc) * (mean_c - grand) ** 2
        dev = ((Xc - mean_c) ** 2).sum(axis=0)
        # exactly constant within the group: no rounding residue
        dev[np.ptp(Xc, axis=0) == 0] = 0.0
        ss_within += dev
    ss_between[np.ptp(X, axis=0) == 0] = 0.0

    df_between, df_within = k - 1, n - k
    F = np.zeros(X.shape[1])
    has_between = ss_between > 0
    has_within = ss_within > 0
    both = has_between & has_within
    if df_within > 0:
        F[both] = (ss_between[both] / df_between) / (ss_within[both] / df_within)
    else:
        F[both] = np.inf
    F[has_between & ~has_within] = np.inf
    return F


def rank_columns(scores, k):
    """Top-``k`` column indices by descending score, ties to the lower index."""
    order = np.lexsort((np.arange(len(scores)), -np.asarray(scores)))
    return order[:min(k, len(scores))]


class AnovaKBest(TransformerMixin, BaseEstimator):
    """Keep the ``k`` columns with the largest ANOVA F-value."""

    def __init__(self, k=20000):
        self.k = k

    def fit(self, X, y):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        self.scores_ = anova_f(X, y)
        self.selected_ = rank_columns(self.scores_, self.k)
        self.n_features_in_ = len(self.scores_)
        return self

    def transform(self, X):
        check_is_fitted(self, "selected_")
        X = check_array(X, dtype=np.float64)
        return X[:, self.selected_]


def anova_select(X, y, k=20000):
    return AnovaKBest(k).fit(X, y).selected_
