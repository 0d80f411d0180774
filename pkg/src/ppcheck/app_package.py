"""Simulated app package: manifest, library list, screen graph, behavior script.

Package directory layout::

    <pkg>/manifest.xml       <manifest package="a.b"><uses-permission android:name="..."/></manifest>
    <pkg>/libraries.txt      one library name per line (LF, UTF-8, may be empty)
    <pkg>/screens/<id>.xml   a single <node> tree per screen
    <pkg>/behavior.json      transitions, timers, resume maps, swipe successors

The XML dialect is a strict subset: double-quoted attributes, self-closing or
paired tags, no character data other than whitespace between elements,
the five predefined entities plus numeric character references, and an
optional ``<?xml ...?>`` prolog.  ``android:name`` is an ordinary attribute
name.  Every failure is reported as a typed :class:`PackageError`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from . import jsonio
from .errors import (
    DanglingScreenRef,
    DuplicatePermission,
    DuplicateScreen,
    MalformedBehavior,
    MalformedXml,
    MissingFile,
)

PERMISSION_PREFIX = "android.permission."


# --------------------------------------------------------------------------
# minimal XML reader

@dataclass
class _Element:
    tag: str
    attrs: dict
    children: list
    position: int


_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_.:\-]*")
_ENTITIES = {"amp": "&", "lt": "<", "gt": ">", "quot": '"', "apos": "'"}


def _unescape(raw: str, base: int) -> str:
    out = []
    i = 0
    while i < len(raw):
        ch = raw[i]
        if ch == "<":
            raise MalformedXml("'<' inside attribute value", base + i)
        if ch != "&":
            out.append(ch)
            i += 1
            continue
        end = raw.find(";", i)
        if end < 0:
            raise MalformedXml("unterminated entity", base + i)
        name = raw[i + 1:end]
        if name in _ENTITIES:
            out.append(_ENTITIES[name])
        elif re.fullmatch(r"#[0-9]{1,7}", name):
            code = int(name[1:])
            if code > 0x10FFFF or 0xD800 <= code <= 0xDFFF or code == 0:
                raise MalformedXml("invalid character reference", base + i)
            out.append(chr(code))
        elif re.fullmatch(r"#x[0-9A-Fa-f]{1,6}", name):
            code = int(name[2:], 16)
            if code > 0x10FFFF or 0xD800 <= code <= 0xDFFF or code == 0:
                raise MalformedXml("invalid character reference", base + i)
            out.append(chr(code))
        else:
            raise MalformedXml(f"unknown entity &{name};", base + i)
        i = end + 1
    return "".join(out)


class _Reader:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip_ws(self):
        n = len(self.text)
        while self.pos < n and self.text[self.pos] in " \t\r\n":
            self.pos += 1

    def skip_misc(self):
        while True:
            self.skip_ws()
            if self.text.startswith("<!--", self.pos):
                end = self.text.find("-->", self.pos + 4)
                if end < 0:
                    raise MalformedXml("unterminated comment", self.pos)
                self.pos = end + 3
            else:
                return

    def expect(self, s):
        if not self.text.startswith(s, self.pos):
            raise MalformedXml(f"expected {s!r}", self.pos)
        self.pos += len(s)

    def name(self):
        m = _NAME.match(self.text, self.pos)
        if not m:
            raise MalformedXml("expected a name", self.pos)
        self.pos = m.end()
        return m.group()

    def element(self, depth=0) -> _Element:
        if depth > 500:
            raise MalformedXml("nesting too deep", self.pos)
        start = self.pos
        self.expect("<")
        tag = self.name()
        attrs = {}
        while True:
            had_ws = self.pos < len(self.text) and self.text[self.pos] in " \t\r\n"
            self.skip_ws()
            if self.text.startswith("/>", self.pos):
                self.pos += 2
                return _Element(tag, attrs, [], start)
            if self.text.startswith(">", self.pos):
                self.pos += 1
                break
            if not had_ws:
                raise MalformedXml("expected whitespace, '>' or '/>'", self.pos)
            attr_pos = self.pos
            key = self.name()
            self.skip_ws()
            self.expect("=")
            self.skip_ws()
            self.expect('"')
            end = self.text.find('"', self.pos)
            if end < 0:
                raise MalformedXml("unterminated attribute value", self.pos)
            value = _unescape(self.text[self.pos:end], self.pos)
            self.pos = end + 1
            if key in attrs:
                raise MalformedXml(f"duplicate attribute {key!r}", attr_pos)
            attrs[key] = value
        children = []
        while True:
            self.skip_misc()
            if self.pos >= len(self.text):
                raise MalformedXml(f"unclosed element <{tag}>", start)
            if self.text.startswith("</", self.pos):
                self.pos += 2
                close_pos = self.pos
                closing = self.name()
                if closing != tag:
                    raise MalformedXml(f"mismatched </{closing}> for <{tag}>", close_pos)
                self.skip_ws()
                self.expect(">")
                return _Element(tag, attrs, children, start)
            if self.text[self.pos] != "<":
                raise MalformedXml("character data is not allowed", self.pos)
            children.append(self.element(depth + 1))

    def document(self) -> _Element:
        if self.text.startswith("﻿"):
            self.pos = 1
        self.skip_ws()
        if self.text.startswith("<?xml", self.pos):
            end = self.text.find("?>", self.pos)
            if end < 0:
                raise MalformedXml("unterminated prolog", self.pos)
            self.pos = end + 2
        self.skip_misc()
        if self.pos >= len(self.text):
            raise MalformedXml("empty document", self.pos)
        root = self.element()
        self.skip_misc()
        if self.pos != len(self.text):
            raise MalformedXml("trailing content after root element", self.pos)
        return root


def _read_xml(data, source=None) -> _Element:
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedXml("invalid UTF-8", exc.start, source) from None
    try:
        return _Reader(data).document()
    except MalformedXml as exc:
        if source and exc.source is None:
            raise MalformedXml(exc.message, exc.position, source) from None
        raise


def _escape(s: str) -> str:
    out = s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;").replace('"', "&quot;")
    return out.replace("\n", "&#10;").replace("\r", "&#13;").replace("\t", "&#9;")


# --------------------------------------------------------------------------
# manifest

@dataclass(frozen=True)
class Manifest:
    package_id: str
    permissions: tuple = ()

    def to_xml(self) -> str:
        lines = [f'<manifest package="{_escape(self.package_id)}">']
        for perm in self.permissions:
            full = perm if "." in perm else PERMISSION_PREFIX + perm
            lines.append(f'  <uses-permission android:name="{_escape(full)}"/>')
        lines.append("</manifest>")
        return "\n".join(lines) + "\n"


def parse_manifest_xml(data, source=None) -> Manifest:
    root = _read_xml(data, source)
    if root.tag != "manifest":
        raise MalformedXml(f"root element must be <manifest>, got <{root.tag}>", root.position, source)
    package_id = root.attrs.get("package", "")
    if not package_id:
        raise MalformedXml("<manifest> needs a non-empty package attribute", root.position, source)
    perms = []
    for child in root.children:
        if child.tag != "uses-permission":
            # other manifest elements (application, activity, ...) are ignored
            continue
        name = child.attrs.get("android:name")
        if not name:
            raise MalformedXml("<uses-permission> without android:name", child.position, source)
        if name.startswith(PERMISSION_PREFIX):
            name = name[len(PERMISSION_PREFIX):]
        if name in perms:
            raise DuplicatePermission(name)
        perms.append(name)
    return Manifest(package_id, tuple(perms))


# --------------------------------------------------------------------------
# UI trees

@dataclass(frozen=True)
class UiNode:
    widget_class: str
    text: str = ""
    clickable: bool = False
    action_id: Optional[str] = None
    children: tuple = ()

    def __post_init__(self):
        if self.action_id is not None and not self.clickable:
            raise ValueError("a node with an action must be clickable")

    def iter_preorder(self):
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def to_xml(self, indent=0) -> str:
        pad = "  " * indent
        attrs = f'class="{_escape(self.widget_class)}"'
        if self.text:
            attrs += f' text="{_escape(self.text)}"'
        if self.clickable:
            attrs += ' clickable="true"'
        if self.action_id is not None:
            attrs += f' action="{_escape(self.action_id)}"'
        if not self.children:
            return f"{pad}<node {attrs}/>\n"
        inner = "".join(child.to_xml(indent + 1) for child in self.children)
        return f"{pad}<node {attrs}>\n{inner}{pad}</node>\n"


def _to_node(el: _Element, source) -> UiNode:
    if el.tag != "node":
        raise MalformedXml(f"unexpected element <{el.tag}>", el.position, source)
    unknown = set(el.attrs) - {"class", "text", "clickable", "action"}
    if unknown:
        raise MalformedXml(f"unknown attribute {sorted(unknown)[0]!r}", el.position, source)
    widget = el.attrs.get("class", "")
    if not widget:
        raise MalformedXml("<node> needs a class attribute", el.position, source)
    clickable_raw = el.attrs.get("clickable", "false")
    if clickable_raw not in ("true", "false"):
        raise MalformedXml("clickable must be 'true' or 'false'", el.position, source)
    clickable = clickable_raw == "true"
    action = el.attrs.get("action")
    if action is not None and not action:
        raise MalformedXml("empty action attribute", el.position, source)
    if action is not None and not clickable:
        raise MalformedXml("a node with an action must be clickable", el.position, source)
    children = tuple(_to_node(child, source) for child in el.children)
    return UiNode(widget, el.attrs.get("text", ""), clickable, action, children)


def parse_screen_xml(data, source=None) -> UiNode:
    return _to_node(_read_xml(data, source), source)


def extract_text(root: UiNode) -> str:
    """Pre-order, single-space-joined concatenation of non-empty node texts."""
    return " ".join(node.text for node in root.iter_preorder() if node.text)


@dataclass(frozen=True)
class Screen:
    screen_id: str
    root: UiNode


# --------------------------------------------------------------------------
# behavior

@dataclass(frozen=True)
class Transition:
    next_screen: str
    api_events: tuple = ()


@dataclass(frozen=True)
class Timer:
    after_seconds: int
    next_screen: str


@dataclass(frozen=True)
class BehaviorScript:
    initial_screen: str
    transitions: dict = field(default_factory=dict)   # (screen_id, action_id) -> Transition
    launch_events: tuple = ()
    timers: dict = field(default_factory=dict)        # screen_id -> Timer
    resume_after_home: dict = field(default_factory=dict)
    resume_after_back: dict = field(default_factory=dict)
    swipe_next: dict = field(default_factory=dict)

    def referenced_screens(self):
        yield self.initial_screen, "initial_screen"
        for (src, action), tr in self.transitions.items():
            yield src, f"transitions.{src}"
            yield tr.next_screen, f"transitions.{src}.{action}"
        for src, timer in self.timers.items():
            yield src, f"timers.{src}"
            yield timer.next_screen, f"timers.{src}"
        for name in ("resume_after_home", "resume_after_back", "swipe_next"):
            for src, dst in getattr(self, name).items():
                yield src, f"{name}.{src}"
                yield dst, f"{name}.{src}"

    def to_document(self) -> dict:
        transitions = {}
        for (src, action), tr in sorted(self.transitions.items()):
            transitions.setdefault(src, {})[action] = {
                "next": tr.next_screen, "api_events": list(tr.api_events)}
        return {
            "initial_screen": self.initial_screen,
            "launch": {"api_events": list(self.launch_events)},
            "transitions": transitions,
            "timers": {s: {"after_seconds": t.after_seconds, "next": t.next_screen}
                       for s, t in sorted(self.timers.items())},
            "resume_after_home": dict(sorted(self.resume_after_home.items())),
            "resume_after_back": dict(sorted(self.resume_after_back.items())),
            "swipe_next": dict(sorted(self.swipe_next.items())),
        }


def _str_map(doc, key):
    value = doc.get(key, {})
    if not isinstance(value, dict) or not all(
            isinstance(k, str) and isinstance(v, str) and k and v for k, v in value.items()):
        raise MalformedBehavior(f"{key!r} must map screen ids to screen ids")
    return dict(value)


def _events(value, where):
    if not isinstance(value, list) or not all(isinstance(e, str) and e for e in value):
        raise MalformedBehavior(f"{where}: api_events must be a list of method names")
    return tuple(value)


def parse_behavior(text: str) -> BehaviorScript:
    try:
        doc = jsonio.loads_strict(text)
    except jsonio._DuplicateJsonKey as exc:
        raise MalformedBehavior(f"duplicate key {exc.key!r}") from None
    except ValueError as exc:
        raise MalformedBehavior(f"invalid behavior document: {exc}") from None
    if not isinstance(doc, dict):
        raise MalformedBehavior("behavior document must be an object")
    unknown = set(doc) - {"initial_screen", "launch", "transitions", "timers",
                          "resume_after_home", "resume_after_back", "swipe_next"}
    if unknown:
        raise MalformedBehavior(f"unknown keys {sorted(unknown)}")
    initial = doc.get("initial_screen")
    if not isinstance(initial, str) or not initial:
        raise MalformedBehavior("initial_screen must be a non-empty string")

    launch = doc.get("launch", {})
    if not isinstance(launch, dict) or set(launch) - {"api_events"}:
        raise MalformedBehavior("launch must be an object with api_events")
    launch_events = _events(launch.get("api_events", []), "launch")

    transitions = {}
    raw = doc.get("transitions", {})
    if not isinstance(raw, dict):
        raise MalformedBehavior("transitions must be an object")
    for src, actions in raw.items():
        if not isinstance(actions, dict):
            raise MalformedBehavior(f"transitions.{src} must be an object")
        for action, spec in actions.items():
            if not action or not isinstance(spec, dict) or set(spec) - {"next", "api_events"}:
                raise MalformedBehavior(f"transitions.{src}.{action} is malformed")
            nxt = spec.get("next")
            if not isinstance(nxt, str) or not nxt:
                raise MalformedBehavior(f"transitions.{src}.{action}.next must be a screen id")
            transitions[(src, action)] = Transition(
                nxt, _events(spec.get("api_events", []), f"transitions.{src}.{action}"))

    timers = {}
    raw = doc.get("timers", {})
    if not isinstance(raw, dict):
        raise MalformedBehavior("timers must be an object")
    for src, spec in raw.items():
        if spec is None:
            continue
        if not isinstance(spec, dict) or set(spec) != {"after_seconds", "next"}:
            raise MalformedBehavior(f"timers.{src} must have after_seconds and next")
        after = spec["after_seconds"]
        if isinstance(after, bool) or not isinstance(after, int) or after <= 0:
            raise MalformedBehavior(f"timers.{src}.after_seconds must be a positive integer")
        if not isinstance(spec["next"], str) or not spec["next"]:
            raise MalformedBehavior(f"timers.{src}.next must be a screen id")
        timers[src] = Timer(after, spec["next"])

    return BehaviorScript(
        initial_screen=initial,
        transitions=transitions,
        launch_events=launch_events,
        timers=timers,
        resume_after_home=_str_map(doc, "resume_after_home"),
        resume_after_back=_str_map(doc, "resume_after_back"),
        swipe_next=_str_map(doc, "swipe_next"),
    )


# --------------------------------------------------------------------------
# package

@dataclass(frozen=True)
class AppPackage:
    manifest: Manifest
    libraries: tuple
    screens: dict        # screen_id -> Screen
    behavior: BehaviorScript

    @property
    def app_id(self) -> str:
        return self.manifest.package_id

    @classmethod
    def build(cls, manifest, libraries, screens, behavior) -> "AppPackage":
        """Assemble and validate a package from a list of :class:`Screen`."""
        table = {}
        for screen in screens:
            if screen.screen_id in table:
                raise DuplicateScreen(screen.screen_id)
            table[screen.screen_id] = screen
        libs = []
        for lib in libraries:
            if lib not in libs:
                libs.append(lib)
        pkg = cls(manifest, tuple(libs), table, behavior)
        pkg.validate()
        return pkg

    def validate(self):
        for screen_id, where in self.behavior.referenced_screens():
            if screen_id not in self.screens:
                raise DanglingScreenRef(screen_id, where)

    def write(self, path) -> Path:
        """Serialize to the directory layout described in the module docstring."""
        root = Path(path)
        (root / "screens").mkdir(parents=True, exist_ok=True)
        (root / "manifest.xml").write_text(self.manifest.to_xml(), encoding="utf-8")
        (root / "libraries.txt").write_text("".join(f"{lib}\n" for lib in self.libraries),
                                            encoding="utf-8")
        for screen_id in sorted(self.screens):
            (root / "screens" / f"{screen_id}.xml").write_text(
                self.screens[screen_id].root.to_xml(), encoding="utf-8")
        jsonio.dump(self.behavior.to_document(), root / "behavior.json")
        return root


write_package = AppPackage.write


def _read_bytes(path: Path) -> bytes:
    if not path.is_file():
        raise MissingFile(path)
    return path.read_bytes()


def parse_package(path) -> AppPackage:
    root = Path(path)
    if not root.is_dir():
        raise MissingFile(root)
    manifest = parse_manifest_xml(_read_bytes(root / "manifest.xml"), "manifest.xml")

    raw_libs = _read_bytes(root / "libraries.txt")
    try:
        lib_text = raw_libs.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise MalformedBehavior(f"libraries.txt is not UTF-8 (offset {exc.start})") from None
    libraries = [line.strip() for line in lib_text.split("\n") if line.strip()]

    screens_dir = root / "screens"
    if not screens_dir.is_dir():
        raise MissingFile(screens_dir)
    screens = []
    for file in sorted(screens_dir.glob("*.xml")):
        source = f"screens/{file.name}"
        screens.append(Screen(file.stem, parse_screen_xml(file.read_bytes(), source)))

    behavior_bytes = _read_bytes(root / "behavior.json")
    try:
        behavior_text = behavior_bytes.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise MalformedBehavior(f"behavior.json is not UTF-8 (offset {exc.start})") from None
    behavior = parse_behavior(behavior_text)
    return AppPackage.build(manifest, libraries, screens, behavior)
