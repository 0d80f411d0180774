"""Bundled synthetic training corpora and model-set training.

The corpora are generated from a fixed internal seed, so they are the same
on every machine; ``train_models`` controls only the split and the
classifier seeds.  A trained model set is a directory::

    detector.json            policy-page classifier (threshold 0.90)
    cr/<task>.json           one classifier per content task
    manifest.json            training log with held-out metrics
"""

from __future__ import annotations

import random
from pathlib import Path
from typing import Optional

import numpy as np

from . import jsonio
from .corpus import FILLER, PLAIN_LABELS, NAV_LABELS, WORDS, PolicyWriter
from .cr_checker import AFFIRMATIVE_TASK, CR_TASKS, THIRD_PARTY_TASK, KeywordLexicon, default_lexicon
from .detector import DETECTOR_THRESHOLD
from .errors import SingleClass
from .psi_mapping import PsiKind
from .text.metrics import confusion
from .text.model import TextModel

CORPUS_SEED = 20210909
DETECTOR_TASK = "detector"
MODELSET_FORMAT = "ppcheck-model-set"

DETECTOR_PARAMS = {"hidden_layer_sizes": (64, 64), "learning_rate": 1e-4, "max_epochs": 1000,
                   "batch_size": 128, "dropout": 0.2, "loss_target": 1e-3}
FEATURES_K = 20000
CR_THRESHOLD = 0.5

# ---------------------------------------------------------------------------
# detector corpus

POLICY_HEADINGS = ("Privacy Policy", "Privacy Policy", "Privacy Policy", "Our Privacy Policy",
                   "Privacy Notice", "Data Protection Policy")
POLICY_EXTRA = (
    "We retain personal data only as long as necessary for the purposes described here.",
    "You have the right to request access to and deletion of your personal data.",
    "Our lawful basis for processing is your consent or our legitimate interest.",
    "If you have questions about this policy please contact our data protection officer.",
    "We do not knowingly collect information from children.",
    "Data may be transferred to servers located outside your country.",
    "You may withdraw your consent at any time in the app settings.",
    "This policy applies to all information collected through the app.",
)
TERMS = (
    "By using the app you agree to these terms of service.",
    "The license granted to you is personal and non transferable.",
    "We are not liable for any indirect or consequential damages.",
    "You must not reverse engineer or resell the app.",
    "These terms are governed by the laws of the state of Delaware.",
    "We may suspend your account if you violate these terms.",
    "Purchases of virtual coins are final and non refundable.",
    "See our privacy policy for how we handle information.",
    "Disputes will be resolved by binding arbitration.",
)
NEWS = (
    "The {w} team won the championship after a dramatic final match.",
    "Heavy rain is expected across the region this weekend.",
    "City officials announced a new plan for public transport.",
    "The museum opens a new exhibition about {w} next month.",
    "Scientists discovered a new species of frog in the rainforest.",
    "Stock markets closed higher on Friday after strong earnings.",
    "A local bakery celebrated its fiftieth anniversary with free {w}.",
    "The festival attracted thousands of visitors despite the weather.",
    "Researchers say daily walks improve sleep and mood.",
)
ABOUT = (
    "Version 2.4.1 build 118.",
    "Made with love by a small team of developers.",
    "Rate us on the store if you enjoy the app.",
    "Follow us for {w} tips and updates.",
    "Unlock all levels with the premium pass.",
    "Collect {w} and climb the leaderboard with your friends.",
    "Daily rewards reset at midnight.",
)


def _ui_text(rng):
    labels = rng.sample(PLAIN_LABELS + NAV_LABELS, rng.randint(2, 5))
    return " ".join([f"{rng.choice(WORDS).capitalize()} {rng.choice(WORDS)}"] + labels)


def detector_corpus(lexicon: Optional[KeywordLexicon] = None, n_per_class: int = 250):
    """``(texts, labels)`` of whole pages: policies (1) and other pages (0)."""
    lexicon = lexicon or default_lexicon()
    rng = random.Random(CORPUS_SEED)
    writer = PolicyWriter(lexicon, rng)
    kinds = list(PsiKind)
    texts, labels = [], []
    for _ in range(n_per_class):
        first = set(rng.sample(kinds, rng.randint(1, 5)))
        third = set(rng.sample(sorted(first, key=str), rng.randint(0, len(first))))
        body = writer.policy(first, third) + rng.sample(POLICY_EXTRA, rng.randint(0, 3))
        tail = [rng.choice(("Accept", "I Agree", "Decline", "Close"))] if rng.random() < 0.6 else []
        texts.append(" ".join([rng.choice(POLICY_HEADINGS)] + body + tail))
        labels.append(1)
    for _ in range(n_per_class):
        kind = rng.choice(("terms", "news", "ui", "about", "mixed"))
        if kind == "terms":
            parts = ["Terms and Conditions"] + rng.sample(TERMS, rng.randint(3, 6)) + ["Accept"]
        elif kind == "news":
            parts = [t.format(w=rng.choice(WORDS)) for t in rng.sample(NEWS, rng.randint(2, 5))]
        elif kind == "ui":
            parts = [_ui_text(rng)]
        elif kind == "about":
            parts = ["About"] + [t.format(w=rng.choice(WORDS)) for t in rng.sample(ABOUT, 3)]
        else:
            parts = [_ui_text(rng)] + rng.sample(FILLER, 1) + rng.sample(TERMS, 2)
        texts.append(" ".join(parts))
        labels.append(0)
    return texts, labels


# ---------------------------------------------------------------------------
# content-task corpora

def cr_corpus(task: str, lexicon: Optional[KeywordLexicon] = None, n_per_class: int = 120):
    """Sentence corpus for one content task.

    PSI task: positives are practice sentences (affirmative, negated or
    third-party) about that PSI; negatives are practice sentences about other
    PSI, sentences that name the PSI without any practice, and filler.
    Affirmative task: disclosures vs negated statements.  Third-party task:
    attributed disclosures vs first-party or negated statements.
    """
    if task not in CR_TASKS:
        raise ValueError(f"unknown content task {task!r}")
    lexicon = lexicon or default_lexicon()
    rng = random.Random(f"{CORPUS_SEED}/{task}")
    writer = PolicyWriter(lexicon, rng)
    kinds = list(PsiKind)
    pos, neg = [], []
    if task == AFFIRMATIVE_TASK:
        for _ in range(n_per_class):
            psi = rng.choice(kinds)
            pos.append(writer.first_party(psi) if rng.random() < 0.6 else writer.third_party(psi))
            neg.append(writer.negated(rng.choice(kinds)))
    elif task == THIRD_PARTY_TASK:
        for _ in range(n_per_class):
            pos.append(writer.third_party(rng.choice(kinds)))
            psi = rng.choice(kinds)
            neg.append(writer.first_party(psi) if rng.random() < 0.75 else writer.negated(psi))
    else:
        target = PsiKind(task)
        others = [k for k in kinds if k is not target]
        makers = (writer.first_party, writer.third_party, writer.negated)
        for _ in range(n_per_class):
            pos.append(rng.choice(makers)(target))
            r = rng.random()
            if r < 0.6:
                neg.append(rng.choice(makers)(rng.choice(others)))
            elif r < 0.9:
                neg.append(writer.neutral(target))
            else:
                neg.append(rng.choice(FILLER))
    texts = pos + neg
    labels = [1] * len(pos) + [0] * len(neg)
    return texts, labels


# ---------------------------------------------------------------------------
# training

def split_indices(n: int, seed: int, test_fraction: float = 0.2):
    """Seeded 80/20 permutation split; returns ``(train_idx, test_idx)``."""
    order = np.random.default_rng(seed).permutation(n)
    n_test = int(round(n * test_fraction))
    return np.sort(order[n_test:]), np.sort(order[:n_test])


def _task_spec(task, lexicon):
    if task == DETECTOR_TASK:
        return "mlp", dict(DETECTOR_PARAMS), DETECTOR_THRESHOLD
    entry = lexicon.models.get(task)
    if entry is None:
        raise ValueError(f"no model entry for task {task!r} in the lexicon")
    params = dict(entry.get("params", {}))
    if "hidden_layer_sizes" in params:
        params["hidden_layer_sizes"] = tuple(params["hidden_layer_sizes"])
    return entry["kind"], params, CR_THRESHOLD


def train_task(task, texts, labels, seed: int = 7, lexicon=None):
    """Fit one task on an 80/20 split; returns ``(model, log_entry)``."""
    lexicon = lexicon or default_lexicon()
    texts = list(texts)
    y = np.asarray(labels, dtype=int)
    if len(np.unique(y)) < 2:
        raise SingleClass(task)
    kind, params, threshold = _task_spec(task, lexicon)
    if kind == "mlp":
        params["random_state"] = seed
    train, test = split_indices(len(texts), seed)
    model = TextModel(kind=kind, k=FEATURES_K, threshold=threshold, classifier_params=params,
                      task=task)
    model.fit([texts[i] for i in train], y[train])
    pred = model.predict([texts[i] for i in test]).astype(int)
    conf = confusion(y[test], pred)
    entry = {"kind": kind, "n_train": int(len(train)), "n_test": int(len(test)),
             "n_features": int(len(model.vectorizer_.idf_)),
             "n_selected": int(len(model.selector_.selected_)),
             "held_out": conf.as_dict()}
    curve = getattr(model.classifier_, "loss_curve_", None)
    if curve:
        entry["final_training_loss"] = float(curve[-1])
        entry["iterations"] = len(curve)
    return model, entry


def bundled_corpus(task, lexicon=None):
    if task == DETECTOR_TASK:
        return detector_corpus(lexicon)
    return cr_corpus(task, lexicon)


def train_models(out_dir, seed: int = 7, tasks=None, corpora=None, lexicon=None) -> dict:
    """Train the detector and the content-task models and write a model set.

    ``tasks`` restricts training to a subset (default: all 30).  ``corpora``
    maps a task to ``(texts, labels)`` and overrides the bundled corpus.
    Returns the training log, which is also written as ``manifest.json``.
    """
    lexicon = lexicon or default_lexicon()
    out = Path(out_dir)
    all_tasks = (DETECTOR_TASK,) + CR_TASKS
    tasks = all_tasks if tasks is None else tuple(tasks)
    for task in tasks:
        if task not in all_tasks:
            raise ValueError(f"unknown task {task!r}")
    corpora = corpora or {}
    log = {}
    for task in tasks:
        texts, labels = corpora.get(task) or bundled_corpus(task, lexicon)
        model, entry = train_task(task, texts, labels, seed, lexicon)
        path = out / "detector.json" if task == DETECTOR_TASK else out / "cr" / f"{task}.json"
        model.save(path)
        log[task] = entry
    manifest_path = out / "manifest.json"
    previous = jsonio.load(manifest_path).get("tasks", {}) if manifest_path.is_file() else {}
    manifest = {"format": MODELSET_FORMAT, "version": 1, "seed": seed,
                "lexicon": lexicon.version, "corpus_seed": CORPUS_SEED,
                "tasks": dict(previous, **log)}
    jsonio.dump(manifest, manifest_path)
    return manifest
