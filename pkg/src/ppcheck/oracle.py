"""Rule-based stand-ins for the trained classifiers ("oracle mode").

Each oracle exposes the same duck-typed surface the pipeline uses on a
:class:`~ppcheck.text.model.TextModel`: ``threshold``, ``score_text`` and
``is_positive``.  Scores are exactly 0.0 or 1.0.
"""

from __future__ import annotations

from .text.preprocess import contains_phrase, preprocess

POLICY_MARKER = "privacy policy"
MIN_POLICY_TOKENS = 12


class _Oracle:
    threshold = 0.5

    def matches(self, text: str) -> bool:
        raise NotImplementedError

    def score_text(self, text: str) -> float:
        return 1.0 if self.matches(preprocess(text)) else 0.0

    def is_positive(self, text: str) -> bool:
        return self.score_text(text) >= self.threshold


class PolicyPageOracle(_Oracle):
    """A page is a policy iff its text opens with the heading "privacy policy"
    and runs for at least twelve tokens.  A lone "Privacy Policy" button or a
    terms page that merely links to the policy does not qualify."""

    def __init__(self, threshold=0.90):
        self.threshold = threshold

    def matches(self, text):
        return text.startswith(POLICY_MARKER + " ") and len(text.split()) >= MIN_POLICY_TOKENS


class PsiMentionOracle(_Oracle):
    """Sentence names the data type and a practice on it."""

    def __init__(self, data_keywords, action_keywords):
        self.data_keywords = tuple(data_keywords)
        self.action_keywords = tuple(action_keywords)

    def matches(self, text):
        return (any(contains_phrase(text, k) for k in self.data_keywords)
                and any(contains_phrase(text, k) for k in self.action_keywords))


class AffirmativeOracle(_Oracle):
    def __init__(self, negation_cues):
        self.negation_cues = tuple(negation_cues)

    def matches(self, text):
        return not any(contains_phrase(text, k) for k in self.negation_cues)


class ThirdPartyOracle(_Oracle):
    def __init__(self, cues):
        self.cues = tuple(cues)

    def matches(self, text):
        return any(contains_phrase(text, k) for k in self.cues)
