"""Bounded exploration for the in-app privacy-policy page.

The loop reads the current page, classifies its text, and on a negative
page performs one more input, until ``max_actions`` inputs have been spent.
Input choice follows :meth:`DeviceSession.enumerate_actions` with two
adjustments: actions already tried from the same page (pages are compared
structurally) are skipped, and taps whose label reads like an acceptance
are moved behind the other navigation taps.  A page with no untried input
ends the search early.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .app_package import UiNode, extract_text
from .device import NAVIGATION_KEYWORDS, DeviceSession
from .text.preprocess import contains_phrase, preprocess

MAX_ACTIONS = 20
DETECTOR_THRESHOLD = 0.90
ACCEPT_LEXICON = ("accept", "agree", "i agree", "consent", "ok")
EXPLORATION_POLICY = "keyword-priority-dfs/v1"


@dataclass
class DetectionResult:
    policy_text: str
    policy_xml: UiNode
    actions: list
    score: float

    def to_json(self):
        return {"actions": [a.to_json() for a in self.actions], "score": self.score,
                "policy_chars": len(self.policy_text)}


@dataclass
class DetectionFailure:
    """No policy page within the action budget (TR1/TR2 violation)."""
    actions: list
    pages_seen: int
    reason: str = "policy page not reached"
    scores: list = field(default_factory=list)

    def to_json(self):
        return {"actions": [a.to_json() for a in self.actions], "pages_seen": self.pages_seen,
                "reason": self.reason}


def _matches(text, lexicon) -> bool:
    return any(contains_phrase(text, k) for k in lexicon)


def exploration_order(session: DeviceSession) -> list:
    """enumerate_actions order with acceptance-like taps last among the priority taps."""
    labels = {}
    for node in session.current_page().iter_preorder():
        if node.action_id is not None and node.action_id not in labels:
            labels[node.action_id] = preprocess(node.text)
    head, accept_like, tail = [], [], []
    for action in session.enumerate_actions():
        label = labels.get(action.action_id, "") if action.kind == "tap" else ""
        if not _matches(label, NAVIGATION_KEYWORDS):
            tail.append(action)
        elif _matches(label, ACCEPT_LEXICON):
            accept_like.append(action)
        else:
            head.append(action)
    return head + accept_like + tail


def detect(session: DeviceSession, clf, max_actions: int = MAX_ACTIONS):
    """Search the running app for its privacy-policy page.

    ``clf`` needs ``score_text(text) -> float`` and a ``threshold``
    attribute.  Returns :class:`DetectionResult` or :class:`DetectionFailure`.
    """
    actions: list = []
    tried: dict = {}
    pages_seen = 0
    scores = []
    while len(actions) < max_actions:
        page = session.current_page()
        pages_seen += 1
        text = extract_text(page)
        cleaned = preprocess(text)
        # empty pages are negative without consulting the model
        score = clf.score_text(cleaned) if cleaned else 0.0
        scores.append(score)
        if cleaned and score >= clf.threshold:
            return DetectionResult(text, page, list(actions), float(score))
        done = tried.setdefault(page, set())
        candidates = [a for a in exploration_order(session) if a not in done]
        if not candidates:
            return DetectionFailure(actions, pages_seen, "exploration exhausted", scores)
        nxt = candidates[0]
        done.add(nxt)
        session.perform(nxt)
        actions.append(nxt)
    return DetectionFailure(actions, pages_seen, "action budget exhausted", scores)
