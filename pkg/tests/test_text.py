import math
import string
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from sklearn.feature_extraction.text import TfidfVectorizer
from sklearn.feature_selection import f_classif

from ppcheck.errors import EmptyCorpus, SingleClass
from ppcheck.text import AnovaKBest, NgramTfidfVectorizer, anova_f, preprocess, tokenize_ngrams
from ppcheck.text.anova import rank_columns
from ppcheck.text.preprocess import contains_phrase

from . import oracles


def test_preprocess_examples():
    assert preprocess("We  COLLECT your-data!") == "we collect your data"
    assert preprocess("") == ""
    assert preprocess("Déjà vu") == "dj vu"


@given(st.text())
def test_preprocess_is_idempotent_and_clean(text):
    out = preprocess(text)
    assert preprocess(out) == out
    assert out == out.strip() and "  " not in out
    assert all(ch.isascii() and ch not in string.punctuation for ch in out)
    assert out == out.lower()


def test_ngrams_examples():
    assert tokenize_ngrams("we collect data") == {"we": 1, "collect": 1, "data": 1,
                                                  "we collect": 1, "collect data": 1}
    assert tokenize_ngrams("") == {}
    assert tokenize_ngrams("a a a") == {"a": 3, "a a": 2}


def test_contains_phrase_is_whole_token():
    assert contains_phrase("we collect your age", "age")
    assert not contains_phrase("we manage pages", "age")
    assert contains_phrase("your ip address here", "ip address")
    assert not contains_phrase("anything", "")


def test_idf_two_doc_example():
    vec = NgramTfidfVectorizer().fit(["a b", "a c"])
    idf = dict(zip(vec.get_feature_names_out(), vec.idf_))
    assert idf["a"] == 1.0
    assert idf["b"] == idf["c"] == pytest.approx(math.log(1.5) + 1, abs=1e-15)
    assert idf["a b"] == pytest.approx(math.log(1.5) + 1, abs=1e-15)


def test_transform_edge_cases():
    docs = ["we collect data", "we share data with partners", "hello"]
    vec = NgramTfidfVectorizer().fit(docs)
    assert not vec.transform([""]).any()
    assert not vec.transform(["zzz unseen"]).any()
    X = vec.transform(docs)
    np.testing.assert_array_equal(vec.transform([docs[1]])[0], X[1])
    np.testing.assert_allclose(np.linalg.norm(X, axis=1), 1.0, atol=1e-15)
    with pytest.raises(EmptyCorpus):
        NgramTfidfVectorizer().fit([])


words = st.sampled_from(["we", "collect", "share", "data", "gps", "your", "location", "a", "b"])
docs = st.lists(words, max_size=7).map(" ".join)
corpora = st.lists(docs, min_size=1, max_size=10).filter(lambda ds: any(ds))


@settings(max_examples=200)
@given(corpora, st.lists(docs, max_size=4))
def test_tfidf_matches_bruteforce(train, extra):
    vec = NgramTfidfVectorizer().fit(train)
    vocab, idf, rows = oracles.tfidf(train, train + extra)
    assert list(vec.get_feature_names_out()) == vocab
    np.testing.assert_allclose(vec.idf_, idf, rtol=0, atol=1e-12)
    np.testing.assert_allclose(vec.transform(train + extra), np.array(rows).reshape(len(rows), -1),
                               rtol=0, atol=1e-12)


@settings(max_examples=100)
@given(corpora)
def test_tfidf_matches_sklearn(train):
    ours = NgramTfidfVectorizer().fit(train)
    ref = TfidfVectorizer(ngram_range=(1, 2), token_pattern=r"(?u)\b\w+\b", lowercase=False,
                          norm="l2", smooth_idf=True, sublinear_tf=False).fit(train)
    assert list(ours.get_feature_names_out()) == list(ref.get_feature_names_out())
    np.testing.assert_allclose(ours.transform(train), ref.transform(train).toarray(), atol=1e-12)


labelled = st.lists(st.tuples(docs, st.integers(0, 1)), min_size=2, max_size=10).filter(
    lambda rows: len({l for _, l in rows}) == 2 and any(d for d, _ in rows))


def _close(a, b):
    if math.isinf(b):
        return math.isinf(a)
    return abs(a - b) <= 1e-12 * max(1.0, abs(b))


@settings(max_examples=200)
@given(labelled)
def test_anova_matches_bruteforce_on_tfidf(rows):
    texts, y = zip(*rows)
    X = NgramTfidfVectorizer().fit(texts).transform(texts)
    ours = anova_f(X, y)
    ref = oracles.anova_f(X.tolist(), list(y))
    assert all(_close(a, b) for a, b in zip(ours, ref)), (ours, ref)
    k = max(1, X.shape[1] // 2)
    assert rank_columns(ours, k).tolist() == oracles.top_k(ours.tolist(), k)


@settings(max_examples=100)
@given(st.integers(4, 10).flatmap(lambda n: st.tuples(
    st.lists(st.lists(st.floats(0, 1), min_size=3, max_size=3), min_size=n, max_size=n),
    st.lists(st.integers(0, 1), min_size=n, max_size=n))).filter(lambda t: len(set(t[1])) == 2))
def test_anova_matches_sklearn_on_generic_columns(data):
    X, y = np.array(data[0]), np.array(data[1])
    ours = anova_f(X, y)
    with np.errstate(all="ignore"), warnings.catch_warnings():
        warnings.simplefilter("ignore")
        ref, _ = f_classif(X, y)
    # sklearn's sum-of-squares shortcut cancels badly for near-zero F; compare the rest
    ok = np.isfinite(ref) & np.isfinite(ours) & (ref > 1e-6)
    np.testing.assert_allclose(ours[ok], ref[ok], rtol=1e-9)


def test_anova_toy_matrix():
    X = np.array([[1.0, 0.9, 0.2], [1.0, 1.1, 0.8], [1.0, 1.0, 0.5],
                  [1.0, 3.0, 0.5], [1.0, 3.2, 0.7], [1.0, 2.9, 0.6]])
    y = [0, 0, 0, 1, 1, 1]
    F = anova_f(X, y)
    assert F[0] == 0.0
    assert F[1] > F[2] > 0
    ref = oracles.anova_f(X.tolist(), y)
    assert all(_close(a, b) for a, b in zip(F, ref))
    sel = AnovaKBest(k=10).fit(X, y)
    assert sel.selected_.tolist() == [1, 2, 0]
    np.testing.assert_array_equal(sel.transform(X), X[:, [1, 2, 0]])


def test_anova_degenerate_cases():
    X = np.array([[0.0, 1.0], [0.0, 1.0], [1.0, 1.0], [1.0, 1.0]])
    F = anova_f(X, [0, 0, 1, 1])
    assert math.isinf(F[0]) and F[1] == 0.0
    with pytest.raises(SingleClass):
        anova_f(X, [1, 1, 1, 1])


def test_rank_ties_go_to_lower_index():
    assert rank_columns(np.array([1.0, 3.0, 3.0, 0.0, 3.0]), 3).tolist() == [1, 2, 4]
