from .anova import AnovaKBest, anova_f, anova_select
from .classifiers import LogisticRegressionGD, MLPBinaryClassifier, MultinomialNB
from .metrics import Confusion, confusion
from .model import TextModel
from .preprocess import preprocess, tokenize_ngrams
from .tfidf import NgramTfidfVectorizer

__all__ = [
    "AnovaKBest", "anova_f", "anova_select", "LogisticRegressionGD", "MLPBinaryClassifier",
    "MultinomialNB", "Confusion", "confusion", "TextModel", "preprocess", "tokenize_ngrams",
    "NgramTfidfVectorizer",
]
