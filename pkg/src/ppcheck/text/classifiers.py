"""Binary classifiers over tf-idf features: multinomial NB, logistic regression, MLP.

All three follow the scikit-learn estimator protocol and expose
``predict_proba`` with columns ``[P(y=0), P(y=1)]``.  Labels are 0/1.
"""

import numpy as np
from scipy.special import expit
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_array, check_X_y

from ..errors import NonFiniteLoss, SingleClass, UntrainedModel


def _check_binary(y, task=None):
    y = np.asarray(y)
    labels = set(np.unique(y).tolist())
    if not labels <= {0, 1}:
        raise ValueError(f"labels must be 0/1, got {sorted(labels)}")
    if len(labels) < 2:
        raise SingleClass(task)
    return y.astype(np.float64)


def _require_fitted(est, attr):
    if not hasattr(est, attr):
        raise UntrainedModel(f"{type(est).__name__} is not trained")


def _rng(seed, stream):
    # Philox is counter-based: every stream is reproducible from (seed, stream)
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, stream])))


def log_loss(p, y, eps=0.0):
    p = np.clip(p, eps, 1 - eps) if eps else p
    return float(-np.mean(y * np.log(p) + (1 - y) * np.log1p(-p)))


class _BinaryMixin(ClassifierMixin):
    classes_ = np.array([0, 1])

    def predict(self, X):
        return (self.predict_proba(X)[:, 1] >= 0.5).astype(int)


class MultinomialNB(_BinaryMixin, BaseEstimator):
    """Laplace/Lidstone-smoothed multinomial naive Bayes on non-negative features."""

    def __init__(self, alpha=1.0, fit_prior=True):
        self.alpha = alpha
        self.fit_prior = fit_prior

    def fit(self, X, y):
        X, y = check_X_y(X, y, dtype=np.float64)
        y = _check_binary(y)
        if (X < 0).any():
            raise ValueError("multinomial NB needs non-negative features")
        counts = np.vstack([X[y == c].sum(axis=0) for c in (0, 1)]) + self.alpha
        self.feature_log_prob_ = np.log(counts) - np.log(counts.sum(axis=1, keepdims=True))
        if self.fit_prior:
            prior = np.array([(y == 0).mean(), (y == 1).mean()])
        else:
            prior = np.array([0.5, 0.5])
        self.class_log_prior_ = np.log(prior)
        self.n_features_in_ = X.shape[1]
        return self

    def joint_log_likelihood(self, X):
        _require_fitted(self, "feature_log_prob_")
        X = check_array(X, dtype=np.float64)
        return X @ self.feature_log_prob_.T + self.class_log_prior_

    def predict_proba(self, X):
        # two classes: the posterior is the logistic of the log-odds, which
        # avoids subtracting two large, nearly equal log-likelihoods
        jll = self.joint_log_likelihood(X)
        d = jll[:, 1] - jll[:, 0]
        return np.column_stack([expit(-d), expit(d)])

    def get_state(self):
        return {"feature_log_prob": self.feature_log_prob_.tolist(),
                "class_log_prior": self.class_log_prior_.tolist()}

    def set_state(self, state):
        self.feature_log_prob_ = np.asarray(state["feature_log_prob"], dtype=np.float64)
        self.class_log_prior_ = np.asarray(state["class_log_prior"], dtype=np.float64)
        self.n_features_in_ = self.feature_log_prob_.shape[1]
        return self


class LogisticRegressionGD(_BinaryMixin, BaseEstimator):
    """L2-regularized logistic regression fitted by full-batch gradient descent.

    The objective is ``mean log-loss + ||w||^2 / (2 C n)``, i.e. the usual
    ``C``-weighted formulation divided by ``C n``.  The step size is capped
    at ``1 / L`` for the objective's Lipschitz constant, which makes every
    step non-increasing in loss.
    """

    def __init__(self, C=1.0, learning_rate=1.0, max_iter=500, tol=1e-7):
        self.C = C
        self.learning_rate = learning_rate
        self.max_iter = max_iter
        self.tol = tol

    def _objective(self, X, y, w, b):
        z = X @ w + b
        # log(1 + e^z) - y z, stable
        data = np.mean(np.logaddexp(0.0, z) - y * z)
        return data + (w @ w) / (2.0 * self.C * len(y)), z

    def fit(self, X, y):
        X, y = check_X_y(X, y, dtype=np.float64)
        y = _check_binary(y)
        n, d = X.shape
        lam = 1.0 / (self.C * n)
        row_sq = float(np.max((X * X).sum(axis=1))) if n else 0.0
        lipschitz = 0.25 * (row_sq + 1.0) + lam
        step = min(self.learning_rate, 1.0 / lipschitz)
        w = np.zeros(d)
        b = 0.0
        loss, z = self._objective(X, y, w, b)
        curve = [loss]
        for _ in range(self.max_iter):
            r = (expit(z) - y) / n
            w = w - step * (X.T @ r + lam * w)
            b = b - step * r.sum()
            new_loss, z = self._objective(X, y, w, b)
            if not np.isfinite(new_loss):
                raise NonFiniteLoss("logistic regression diverged")
            curve.append(new_loss)
            if loss - new_loss < self.tol:
                break
            loss = new_loss
        self.coef_ = w
        self.intercept_ = float(b)
        self.loss_curve_ = curve
        self.n_features_in_ = d
        return self

    def decision_function(self, X):
        _require_fitted(self, "coef_")
        X = check_array(X, dtype=np.float64)
        return X @ self.coef_ + self.intercept_

    def predict_proba(self, X):
        p = expit(self.decision_function(X))
        return np.column_stack([1.0 - p, p])

    def get_state(self):
        return {"coef": self.coef_.tolist(), "intercept": self.intercept_}

    def set_state(self, state):
        self.coef_ = np.asarray(state["coef"], dtype=np.float64)
        self.intercept_ = float(state["intercept"])
        self.n_features_in_ = len(self.coef_)
        return self


class MLPBinaryClassifier(_BinaryMixin, BaseEstimator):
    """Feed-forward net: ReLU hidden layers, sigmoid output, binary cross-entropy.

    Mini-batch training with Adam, inverted dropout on every hidden layer
    (training only) and early stop once the full-batch training loss falls
    below ``loss_target``.  All randomness comes from counter-based Philox
    streams keyed by ``random_state`` (0: init, 1: shuffling, 2: dropout).
    """

    def __init__(self, hidden_layer_sizes=(64, 64), learning_rate=1e-4, max_epochs=1000,
                 batch_size=128, dropout=0.2, loss_target=1e-3, random_state=0):
        self.hidden_layer_sizes = hidden_layer_sizes
        self.learning_rate = learning_rate
        self.max_epochs = max_epochs
        self.batch_size = batch_size
        self.dropout = dropout
        self.loss_target = loss_target
        self.random_state = random_state

    # ---- parameters

    def init_params(self, n_features):
        rng = _rng(self.random_state, 0)
        sizes = [n_features, *self.hidden_layer_sizes, 1]
        weights, biases = [], []
        for i, (fan_in, fan_out) in enumerate(zip(sizes[:-1], sizes[1:])):
            last = i == len(sizes) - 2
            # He-uniform before ReLU, Glorot-uniform before the sigmoid
            limit = np.sqrt(6.0 / (fan_in + fan_out)) if last else np.sqrt(6.0 / fan_in)
            weights.append(rng.uniform(-limit, limit, size=(fan_in, fan_out)))
            biases.append(np.zeros(fan_out))
        self.coefs_, self.intercepts_ = weights, biases
        self.n_features_in_ = n_features
        return self

    def _params(self):
        return self.coefs_ + self.intercepts_

    def get_flat_params(self):
        return np.concatenate([p.ravel() for p in self._params()])

    def set_flat_params(self, flat):
        offset = 0
        for p in self._params():
            p[...] = flat[offset:offset + p.size].reshape(p.shape)
            offset += p.size

    # ---- forward / backward

    def _forward(self, X, masks=None):
        acts = [X]
        h = X
        n_hidden = len(self.coefs_) - 1
        for i in range(n_hidden):
            h = np.maximum(h @ self.coefs_[i] + self.intercepts_[i], 0.0)
            if masks is not None:
                h = h * masks[i]
            acts.append(h)
        z = (h @ self.coefs_[-1] + self.intercepts_[-1])[:, 0]
        return acts, z

    def loss_and_gradient(self, X, y, masks=None):
        """Mean binary cross-entropy and its gradient w.r.t. every layer.

        Returns ``(loss, weight_grads, bias_grads)``.  ``masks`` are the
        (already rescaled) dropout multipliers per hidden layer; ``None``
        runs the deterministic network.
        """
        n = X.shape[0]
        acts, z = self._forward(X, masks)
        loss = float(np.mean(np.logaddexp(0.0, z) - y * z))
        delta = ((expit(z) - y) / n)[:, None]
        gw = [None] * len(self.coefs_)
        gb = [None] * len(self.coefs_)
        for i in range(len(self.coefs_) - 1, -1, -1):
            gw[i] = acts[i].T @ delta
            gb[i] = delta.sum(axis=0)
            if i > 0:
                delta = delta @ self.coefs_[i].T
                # ReLU gate (active units are > 0 after masking too) and dropout mask
                delta = delta * (acts[i] > 0)
                if masks is not None:
                    delta = delta * masks[i - 1]
        return loss, gw, gb

    def loss(self, X, y):
        _, z = self._forward(np.asarray(X, dtype=np.float64))
        return float(np.mean(np.logaddexp(0.0, z) - np.asarray(y) * z))

    def _dropout_masks(self, rng, n):
        if not self.dropout:
            return None
        keep = 1.0 - self.dropout
        return [(rng.random((n, width)) < keep) / keep for width in self.hidden_layer_sizes]

    def fit(self, X, y):
        X, y = check_X_y(X, y, dtype=np.float64)
        y = _check_binary(y)
        self.init_params(X.shape[1])
        shuffle_rng = _rng(self.random_state, 1)
        drop_rng = _rng(self.random_state, 2)
        params = self._params()
        m = [np.zeros_like(p) for p in params]
        v = [np.zeros_like(p) for p in params]
        beta1, beta2, eps = 0.9, 0.999, 1e-7
        t = 0
        n = X.shape[0]
        curve = []
        for _ in range(self.max_epochs):
            order = shuffle_rng.permutation(n)
            for start in range(0, n, self.batch_size):
                idx = order[start:start + self.batch_size]
                masks = self._dropout_masks(drop_rng, len(idx))
                _, gw, gb = self.loss_and_gradient(X[idx], y[idx], masks)
                t += 1
                lr_t = self.learning_rate * np.sqrt(1 - beta2 ** t) / (1 - beta1 ** t)
                for j, g in enumerate(gw + gb):
                    m[j] = beta1 * m[j] + (1 - beta1) * g
                    v[j] = beta2 * v[j] + (1 - beta2) * g * g
                    params[j] -= lr_t * m[j] / (np.sqrt(v[j]) + eps)
            epoch_loss = self.loss(X, y)
            if not np.isfinite(epoch_loss):
                raise NonFiniteLoss("MLP training diverged")
            curve.append(epoch_loss)
            if self.loss_target is not None and epoch_loss < self.loss_target:
                break
        self.loss_curve_ = curve
        self.n_epochs_ = len(curve)
        return self

    def predict_proba(self, X):
        _require_fitted(self, "coefs_")
        X = check_array(X, dtype=np.float64)
        _, z = self._forward(X)
        p = expit(z)
        return np.column_stack([1.0 - p, p])

    def get_state(self):
        return {"coefs": [w.tolist() for w in self.coefs_],
                "intercepts": [b.tolist() for b in self.intercepts_]}

    def set_state(self, state):
        self.coefs_ = [np.asarray(w, dtype=np.float64).reshape(len(w), -1) for w in state["coefs"]]
        self.intercepts_ = [np.asarray(b, dtype=np.float64) for b in state["intercepts"]]
        self.n_features_in_ = self.coefs_[0].shape[0]
        return self


CLASSIFIERS = {
    "mnb": MultinomialNB,
    "logreg": LogisticRegressionGD,
    "mlp": MLPBinaryClassifier,
}
