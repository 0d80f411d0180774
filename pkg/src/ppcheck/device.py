"""Deterministic virtual device driven by a package's behavior script.

The simulator replaces the emulator + instrumentation stack.  Time is an
integer number of simulated seconds that only ``wait`` advances; every
monitored API call is appended to an event log with a monotone sequence
number.  Gestures the script does not define are no-ops.

Leaving the app:

* ``home`` backgrounds the app; ``relaunch`` resumes at
  ``resume_after_home[last]`` (default: the same screen).
* ``back`` closes the app; ``relaunch`` cold-starts at
  ``resume_after_back[last]`` (default: the initial screen) and replays the
  launch events.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .app_package import AppPackage, UiNode
from .errors import OffScreenError
from .text.preprocess import contains_phrase, preprocess

# matched as whole tokens, so inflected forms are listed separately
NAVIGATION_KEYWORDS = ("privacy", "policy", "terms", "continue", "next", "start", "started",
                       "ok", "accept", "agree")


@dataclass(frozen=True)
class Action:
    kind: str                      # tap | swipe | back | home | relaunch | wait
    action_id: Optional[str] = None
    seconds: int = 0

    def __post_init__(self):
        if self.kind not in ("tap", "swipe", "back", "home", "relaunch", "wait"):
            raise ValueError(f"unknown action kind {self.kind!r}")
        if self.kind == "tap" and not self.action_id:
            raise ValueError("tap needs an action_id")
        if self.kind == "wait" and (isinstance(self.seconds, bool) or self.seconds <= 0):
            raise ValueError("wait needs a positive number of seconds")

    @classmethod
    def tap(cls, action_id):
        return cls("tap", action_id)

    @classmethod
    def wait(cls, seconds):
        return cls("wait", seconds=seconds)

    def to_json(self):
        if self.kind == "tap":
            return {"kind": "tap", "action_id": self.action_id}
        if self.kind == "wait":
            return {"kind": "wait", "seconds": self.seconds}
        return {"kind": self.kind}

    @classmethod
    def from_json(cls, doc):
        return cls(doc["kind"], doc.get("action_id"), doc.get("seconds", 0))

    def __str__(self):
        if self.kind == "tap":
            return f"tap({self.action_id})"
        if self.kind == "wait":
            return f"wait({self.seconds})"
        return self.kind


SWIPE = Action("swipe")
BACK = Action("back")
HOME = Action("home")
RELAUNCH = Action("relaunch")


@dataclass(frozen=True)
class ApiEvent:
    api_method: str
    psi: tuple          # PSI kinds the method is mapped to
    sim_time: int
    seq: int

    def to_json(self):
        return {"api_method": self.api_method, "psi": [str(k) for k in self.psi],
                "sim_time": self.sim_time, "seq": self.seq}


class DeviceSession:
    """One installed app on one virtual device."""

    def __init__(self, pkg: AppPackage, monitored=None):
        self.pkg = pkg
        self.behavior = pkg.behavior
        # api_method -> psi tuple; accepts a StaticAnalysis-style dict or a set of triples
        if monitored is None:
            monitored = {}
        elif not isinstance(monitored, dict):
            table = {}
            for item in monitored:
                if isinstance(item, tuple):
                    _, api, psi = item
                    table.setdefault(api, set()).add(psi)
                else:
                    table.setdefault(item, set())
            monitored = {api: tuple(sorted(kinds, key=str)) for api, kinds in table.items()}
        self.monitored = dict(monitored)
        self.current: Optional[str] = None
        self.clock = 0
        self.events: list = []
        self.history: list = []
        self._next_seq = 0
        self._entered_at = 0
        self._last_screen: Optional[str] = None
        self._left_via: Optional[str] = None

    # ---- lifecycle

    def launch(self):
        self._enter(self.behavior.initial_screen)
        self._emit(self.behavior.launch_events)
        return self

    @property
    def off_screen(self) -> bool:
        return self.current is None

    @property
    def next_seq(self) -> int:
        """Sequence number the next emitted event will carry."""
        return self._next_seq

    def _enter(self, screen_id):
        self.current = screen_id
        self._entered_at = self.clock

    def _emit(self, methods):
        for method in methods:
            if method in self.monitored:
                self.events.append(ApiEvent(method, self.monitored[method], self.clock, self._next_seq))
                self._next_seq += 1

    # ---- observation

    def current_page(self) -> UiNode:
        if self.current is None:
            raise OffScreenError("the app is not in the foreground")
        return self.pkg.screens[self.current].root

    def enumerate_actions(self) -> list:
        """Candidate inputs for the current screen in exploration order.

        Taps on nodes whose text carries a navigation keyword come first, then
        the other tappable nodes, both in document order, then a swipe when the
        screen has a swipe successor.
        """
        if self.current is None:
            return []
        priority, rest, seen = [], [], set()
        for node in self.current_page().iter_preorder():
            if not node.clickable or node.action_id is None or node.action_id in seen:
                continue
            seen.add(node.action_id)
            text = preprocess(node.text)
            bucket = priority if any(contains_phrase(text, k) for k in NAVIGATION_KEYWORDS) else rest
            bucket.append(Action.tap(node.action_id))
        actions = priority + rest
        if self.current in self.behavior.swipe_next:
            actions.append(SWIPE)
        return actions

    def screen_actions(self) -> set:
        if self.current is None:
            return set()
        return {n.action_id for n in self.current_page().iter_preorder()
                if n.clickable and n.action_id is not None}

    # ---- input

    def perform(self, action: Action) -> "DeviceSession":
        self.history.append(action)
        kind = action.kind
        if kind == "wait":
            self._advance(action.seconds)
        elif self.current is None:
            if kind == "relaunch":
                self._relaunch()
        elif kind == "tap":
            if action.action_id in self.screen_actions():
                tr = self.behavior.transitions.get((self.current, action.action_id))
                if tr is not None:
                    self._enter(tr.next_screen)
                    self._emit(tr.api_events)
        elif kind == "swipe":
            nxt = self.behavior.swipe_next.get(self.current)
            if nxt is not None:
                self._enter(nxt)
        elif kind in ("home", "back"):
            self._last_screen = self.current
            self._left_via = kind
            self.current = None
        return self

    def _relaunch(self):
        last = self._last_screen
        if self._left_via == "home":
            self._enter(self.behavior.resume_after_home.get(last, last))
        else:
            self._enter(self.behavior.resume_after_back.get(last, self.behavior.initial_screen))
            self._emit(self.behavior.launch_events)
        self._left_via = None

    def _advance(self, seconds):
        end = self.clock + seconds
        while self.current is not None:
            timer = self.behavior.timers.get(self.current)
            if timer is None or self._entered_at + timer.after_seconds > end:
                break
            self.clock = self._entered_at + timer.after_seconds
            self._enter(timer.next_screen)
        self.clock = end

    def state(self):
        """Snapshot used by determinism checks."""
        return (self.current, self.clock, tuple(self.events), tuple(self.history))


def install_and_launch(pkg: AppPackage, monitored=None) -> DeviceSession:
    return DeviceSession(pkg, monitored).launch()


def perform(session: DeviceSession, action: Action) -> DeviceSession:
    return session.perform(action)


def current_page(session: DeviceSession) -> UiNode:
    return session.current_page()


def enumerate_actions(session: DeviceSession) -> list:
    return session.enumerate_actions()
