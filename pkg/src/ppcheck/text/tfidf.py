"""Unigram+bigram tf-idf vectorizer.

Weights are ``tf * idf`` with raw counts for tf and the smoothed
``idf(t) = ln((1 + N) / (1 + df(t))) + 1``; each document row is then
L2-normalized.  Columns follow the sorted vocabulary.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ..errors import EmptyCorpus
from .preprocess import preprocess, tokenize_ngrams


class NgramTfidfVectorizer(TransformerMixin, BaseEstimator):
    """Tf-idf over 1- and 2-grams.

    Parameters
    ----------
    lowercase_and_clean : bool, default=True
        Run :func:`preprocess` on every document before tokenizing.
    """

    def __init__(self, lowercase_and_clean=True):
        self.lowercase_and_clean = lowercase_and_clean

    def _grams(self, doc):
        if self.lowercase_and_clean:
            doc = preprocess(doc)
        return tokenize_ngrams(doc)

    def fit(self, raw_documents, y=None):
        docs = list(raw_documents)
        if not docs:
            raise EmptyCorpus("cannot fit tf-idf on an empty corpus")
        df = {}
        for doc in docs:
            for gram in self._grams(doc):
                df[gram] = df.get(gram, 0) + 1
        terms = sorted(df)
        n = len(docs)
        self.vocabulary_ = {t: i for i, t in enumerate(terms)}
        self.idf_ = np.array([np.log((1.0 + n) / (1.0 + df[t])) + 1.0 for t in terms], dtype=np.float64)
        self.n_docs_ = n
        return self

    def transform(self, raw_documents):
        check_is_fitted(self, "vocabulary_")
        docs = list(raw_documents)
        X = np.zeros((len(docs), len(self.vocabulary_)), dtype=np.float64)
        vocab = self.vocabulary_
        for row, doc in enumerate(docs):
            for gram, count in self._grams(doc).items():
                col = vocab.get(gram)
                if col is not None:
                    X[row, col] = count * self.idf_[col]
        norms = np.sqrt((X * X).sum(axis=1))
        nz = norms > 0
        X[nz] /= norms[nz, None]
        return X

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "vocabulary_")
        names = [None] * len(self.vocabulary_)
        for term, col in self.vocabulary_.items():
            names[col] = term
        return np.asarray(names, dtype=object)
