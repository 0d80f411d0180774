"""Technical-requirement tests on a detected policy page, plus the pre-acceptance API audit."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .app_package import UiNode
from .detector import ACCEPT_LEXICON, DetectionResult
from .device import BACK, HOME, RELAUNCH, Action, DeviceSession
from .errors import OffScreenError
from .text.preprocess import contains_phrase, preprocess

TR6_TIMEOUT = 10
ACCEPT_WIDGETS = ("Button", "CheckBox")

PASS = "Pass"
FAIL_TR3 = "Fail_TR3"
FAIL_TR4 = "Fail_TR4"
FAIL_TR5 = "Fail_TR5"
FAIL_TR6 = "Fail_TR6"


@dataclass
class TrVerdict:
    value: str
    evidence: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.value == PASS

    def to_json(self):
        return {"value": self.value, "evidence": self.evidence}


def contains_explicit_accept(root: UiNode) -> Optional[UiNode]:
    """First clickable Button/CheckBox whose label carries an acceptance term."""
    for node in root.iter_preorder():
        if node.widget_class in ACCEPT_WIDGETS and node.clickable:
            label = preprocess(node.text)
            if any(contains_phrase(label, term) for term in ACCEPT_LEXICON):
                return node
    return None


def _page_or_none(session):
    try:
        return session.current_page()
    except OffScreenError:
        return None


def _describe(session):
    return session.current if session.current is not None else "<off-screen>"


def test_technical_requirements(session: DeviceSession, det: DetectionResult,
                                timeout: int = TR6_TIMEOUT) -> TrVerdict:
    """Explicit acceptance, expiry and home/back checks, in that order.

    The accept widget is never tapped here.
    """
    widget = contains_explicit_accept(det.policy_xml)
    if widget is None:
        return TrVerdict(FAIL_TR3, {"reason": "no clickable accept/agree widget on the policy page"})
    evidence = {"accept_widget": {"class": widget.widget_class, "text": widget.text,
                                  "action": widget.action_id}}

    session.perform(Action.wait(timeout))
    if _page_or_none(session) != det.policy_xml:
        evidence.update(reason=f"policy page replaced after waiting {timeout}s",
                        screen_after_wait=_describe(session))
        return TrVerdict(FAIL_TR6, evidence)

    session.perform(HOME)
    session.perform(RELAUNCH)
    page_home = _page_or_none(session)
    screen_home = _describe(session)

    session.perform(BACK)
    session.perform(RELAUNCH)
    for action in det.actions:
        session.perform(action)
    page_back = _page_or_none(session)
    screen_back = _describe(session)

    evidence.update(screen_after_home=screen_home, screen_after_back=screen_back,
                    home_ok=page_home == det.policy_xml, back_ok=page_back == det.policy_xml)
    if page_home != det.policy_xml or page_back != det.policy_xml:
        evidence["reason"] = "leaving the policy page via home/back skipped it"
        return TrVerdict(FAIL_TR5, evidence)
    return TrVerdict(PASS, evidence)


def check_tr4(events, acceptance_seq: Optional[int]) -> TrVerdict:
    """Fail if any monitored call happened strictly before the acceptance tap."""
    if acceptance_seq is None:
        offending = list(events)
    else:
        offending = [e for e in events if e.seq < acceptance_seq]
    if offending:
        return TrVerdict(FAIL_TR4, {"acceptance_seq": acceptance_seq,
                                    "events_before_acceptance": [e.to_json() for e in offending]})
    return TrVerdict(PASS, {"acceptance_seq": acceptance_seq})


# keep pytest from collecting this when imported into a test module
test_technical_requirements.__test__ = False
