"""End-to-end text classifier: preprocess -> tf-idf -> ANOVA k-best -> classifier.

Saved models are canonical JSON documents::

    {"format": "ppcheck-text-model", "version": 1, "task": ..., "kind": ...,
     "threshold": ..., "k": ..., "classifier_params": {...},
     "vocabulary": [ngram per column], "idf": [...], "selected": [...],
     "state": {...classifier parameters...}}

Floats are stored with shortest round-trip repr, so save -> load -> save is
byte-identical.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from sklearn.base import BaseEstimator

from .. import jsonio
from ..errors import MalformedModel, SingleClass, UntrainedModel
from .anova import AnovaKBest
from .classifiers import CLASSIFIERS
from .tfidf import NgramTfidfVectorizer

MODEL_FORMAT = "ppcheck-text-model"
MODEL_VERSION = 1


class TextModel(BaseEstimator):
    """Binary text classifier with a decision threshold on P(positive).

    ``predict`` is ``predict_proba >= threshold``: a score strictly below the
    threshold is negative, a score equal to it is positive.
    """

    def __init__(self, kind="mlp", k=20000, threshold=0.5, classifier_params=None,
                 task=None):
        self.kind = kind
        self.k = k
        self.threshold = threshold
        self.classifier_params = classifier_params
        self.task = task

    def _make_classifier(self):
        if self.kind not in CLASSIFIERS:
            raise ValueError(f"unknown classifier kind {self.kind!r}")
        return CLASSIFIERS[self.kind](**(self.classifier_params or {}))

    def fit(self, texts, y):
        texts = list(texts)
        y = np.asarray(y, dtype=int)
        if len(np.unique(y)) < 2:
            raise SingleClass(self.task)
        self.vectorizer_ = NgramTfidfVectorizer().fit(texts)
        X = self.vectorizer_.transform(texts)
        self.selector_ = AnovaKBest(self.k).fit(X, y)
        self.classifier_ = self._make_classifier().fit(self.selector_.transform(X), y)
        return self

    def _check(self):
        if not hasattr(self, "classifier_"):
            raise UntrainedModel(f"model {self.task or self.kind!r} is not trained")

    def vectorize(self, texts):
        self._check()
        return self.selector_.transform(self.vectorizer_.transform(list(texts)))

    def predict_proba(self, texts_or_vectors):
        """P(positive) per input; accepts raw strings or already-selected feature rows."""
        self._check()
        if isinstance(texts_or_vectors, str):
            texts_or_vectors = [texts_or_vectors]
        if isinstance(texts_or_vectors, np.ndarray):
            X = np.atleast_2d(texts_or_vectors).astype(np.float64)
        else:
            X = self.vectorize(texts_or_vectors)
        p = self.classifier_.predict_proba(X)[:, 1]
        return np.clip(p, 0.0, 1.0)

    def predict(self, texts_or_vectors):
        return self.predict_proba(texts_or_vectors) >= self.threshold

    def score_text(self, text: str) -> float:
        return float(self.predict_proba([text])[0])

    def is_positive(self, text: str) -> bool:
        return self.score_text(text) >= self.threshold

    # ---- persistence

    def to_document(self) -> dict:
        self._check()
        return {
            "format": MODEL_FORMAT,
            "version": MODEL_VERSION,
            "task": self.task,
            "kind": self.kind,
            "threshold": self.threshold,
            "k": self.k,
            "classifier_params": _jsonable(self.classifier_params or {}),
            "vocabulary": list(self.vectorizer_.get_feature_names_out()),
            "idf": self.vectorizer_.idf_.tolist(),
            "selected": [int(i) for i in self.selector_.selected_],
            "state": self.classifier_.get_state(),
        }

    @classmethod
    def from_document(cls, doc) -> "TextModel":
        if doc.get("format") != MODEL_FORMAT or doc.get("version") != MODEL_VERSION:
            raise MalformedModel("not a ppcheck text model (format/version mismatch)")
        params = doc.get("classifier_params") or {}
        if "hidden_layer_sizes" in params:
            params = dict(params, hidden_layer_sizes=tuple(params["hidden_layer_sizes"]))
        model = cls(kind=doc["kind"], k=doc["k"], threshold=doc["threshold"],
                    classifier_params=params or None, task=doc.get("task"))
        vec = NgramTfidfVectorizer()
        vec.vocabulary_ = {term: i for i, term in enumerate(doc["vocabulary"])}
        vec.idf_ = np.asarray(doc["idf"], dtype=np.float64)
        vec.n_docs_ = None
        sel = AnovaKBest(doc["k"])
        sel.selected_ = np.asarray(doc["selected"], dtype=np.int64)
        sel.n_features_in_ = len(vec.idf_)
        model.vectorizer_ = vec
        model.selector_ = sel
        model.classifier_ = model._make_classifier().set_state(doc["state"])
        return model

    def save(self, path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        jsonio.dump(self.to_document(), path)
        return path

    @classmethod
    def load(cls, path) -> "TextModel":
        return cls.from_document(jsonio.load(path))


def _jsonable(params):
    return {k: list(v) if isinstance(v, tuple) else v for k, v in params.items()}
