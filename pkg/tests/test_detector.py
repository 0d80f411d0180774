import random

import pytest
from hypothesis import given, settings, strategies as st

from ppcheck.app_package import (AppPackage, BehaviorScript, Manifest, Screen, Transition, UiNode,
                                 parse_package)
from ppcheck.corpus import _deep_policy_app, _no_policy_app
from ppcheck.detector import (MAX_ACTIONS, DetectionFailure, DetectionResult, detect,
                              exploration_order)
from ppcheck.device import Action, install_and_launch
from ppcheck.oracle import PolicyPageOracle

from . import oracles

POLICY = UiNode("LinearLayout", "", False, None, (
    UiNode("TextView", "Privacy Policy"),
    UiNode("TextView", "We collect your precise location to show trails near you."),
    UiNode("Button", "Accept", True, "accept")))


def btn(text, action):
    return UiNode("Button", text, True, action)


def make(screens, **behavior):
    initial = behavior.pop("initial", next(iter(screens)))
    return AppPackage.build(Manifest("a.b"), [], [Screen(k, v) for k, v in screens.items()],
                            BehaviorScript(initial, **behavior))


class Scorer:
    """Returns a fixed score for pages containing a marker word."""

    def __init__(self, score, threshold=0.90, marker="policy"):
        self.score, self.threshold, self.marker = score, threshold, marker
        self.calls = []

    def score_text(self, text):
        self.calls.append(text)
        return self.score if self.marker in text else 0.0


def test_policy_on_launch_screen():
    result = detect(install_and_launch(make({"p": POLICY})), PolicyPageOracle())
    assert isinstance(result, DetectionResult)
    assert result.actions == [] and result.policy_xml == POLICY
    assert result.policy_text.startswith("Privacy Policy We collect")


def test_menu_buried_fixture(fixtures_dir):
    pkg = parse_package(fixtures_dir / "menu_buried_policy")
    result = detect(install_and_launch(pkg), PolicyPageOracle())
    assert [a.action_id for a in result.actions] == ["start", "next", "open_policy"]


@pytest.mark.parametrize("score, found", [(0.89, False), (0.90, True)])
def test_threshold_boundary(score, found):
    pkg = make({"p": POLICY})
    result = detect(install_and_launch(pkg), Scorer(score))
    assert isinstance(result, DetectionResult) is found


def test_empty_pages_skip_the_model():
    pkg = make({"a": UiNode("LinearLayout", "", False, None, (btn("", "go"),)), "p": POLICY},
               transitions={("a", "go"): Transition("p")})
    scorer = Scorer(1.0)
    result = detect(install_and_launch(pkg), scorer)
    assert isinstance(result, DetectionResult)
    assert len(scorer.calls) == 1


def test_long_chain_stops_at_budget():
    pkg = _deep_policy_app("a.b", random.Random(0), ["We collect your gps."] * 12, depth=25).build([], [])
    result = detect(install_and_launch(pkg), PolicyPageOracle())
    assert isinstance(result, DetectionFailure)
    assert len(result.actions) == MAX_ACTIONS
    assert result.reason == "action budget exhausted"


def test_page_reached_by_the_last_action_is_not_classified():
    text = ["We collect your precise location while you use the app today."]
    # depth d puts the policy d + 1 taps away
    near = _deep_policy_app("a.b", random.Random(1), text, depth=MAX_ACTIONS - 2).build([], [])
    far = _deep_policy_app("a.b", random.Random(1), text, depth=MAX_ACTIONS - 1).build([], [])
    found = detect(install_and_launch(near), PolicyPageOracle())
    assert isinstance(found, DetectionResult) and len(found.actions) == MAX_ACTIONS - 1
    missed = detect(install_and_launch(far), PolicyPageOracle())
    assert isinstance(missed, DetectionFailure) and len(missed.actions) == MAX_ACTIONS


def test_custom_budget():
    pkg = _deep_policy_app("a.b", random.Random(0), ["x."], depth=5).build([], [])
    assert len(detect(install_and_launch(pkg), PolicyPageOracle(), max_actions=3).actions) == 3
    assert detect(install_and_launch(pkg), PolicyPageOracle(), max_actions=0).actions == []


def test_dead_end_exhausts_early():
    pkg = make({"a": UiNode("LinearLayout", "", False, None, (btn("Help", "h"),)),
                "b": UiNode("TextView", "help text")},
               transitions={("a", "h"): Transition("b")})
    result = detect(install_and_launch(pkg), PolicyPageOracle())
    assert result.reason == "exploration exhausted" and len(result.actions) == 1


def test_acceptance_taps_come_after_other_navigation():
    page = UiNode("LinearLayout", "", False, None, (btn("OK", "ok"), btn("Shop", "shop"),
                                                     btn("Continue", "cont")))
    s = install_and_launch(make({"a": page}))
    assert exploration_order(s) == [Action.tap("cont"), Action.tap("ok"), Action.tap("shop")]


def test_terms_page_is_not_a_policy():
    terms = UiNode("LinearLayout", "", False, None, (
        UiNode("TextView", "Terms and Conditions"),
        UiNode("TextView", "See our privacy policy for how we handle information and more."),
        btn("Accept", "accept")))
    result = detect(install_and_launch(make({"t": terms})), PolicyPageOracle())
    assert isinstance(result, DetectionFailure)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10_000), st.integers(2, 10))
def test_no_policy_graphs_spend_min_of_budget_and_reachable(seed, n):
    pkg = _no_policy_app("a.b", random.Random(seed), n_screens=n).build([], [])
    result = detect(install_and_launch(pkg), PolicyPageOracle())
    assert isinstance(result, DetectionFailure)
    assert len(result.actions) == min(MAX_ACTIONS, oracles.reachable_walk(pkg))
