"""Synthetic app packages with known verdicts.

Every generator here builds packages whose verdict under the rule-based
oracle models is fixed by construction, so a batch run over a generated
corpus can be compared one-to-one with its label file.  Policy prose is
assembled from a small set of sentence templates whose keyword content is
controlled: a sentence mentions exactly one PSI keyword and carries a
negation cue or a third-party cue only when that is intended.
"""

from __future__ import annotations

import itertools
import random
from pathlib import Path
from typing import Optional

from . import jsonio
from .app_package import AppPackage, BehaviorScript, Manifest, Screen, Timer, Transition, UiNode
from .cr_checker import KeywordLexicon, default_lexicon
from .psi_mapping import MappingStore, PsiKind, default_store

LABELS_FORMAT = "ppcheck-labels"

VERDICTS = ("Clean", "Fail_TR1_TR2", "Fail_TR3", "Fail_TR6", "Fail_TR5", "Fail_TR4",
            "Fail_CR1_PSI", "Fail_CR1_ThirdParty", "Fail_CR1_Both", "Compliant")

# ---------------------------------------------------------------------------
# sentence templates

FIRST_PARTY = (
    "We {verb} your {kw} to provide and improve the service.",
    "The app may {verb} your {kw} while you use it.",
    "We {verb} your {kw} in order to personalize your experience.",
    "When you sign in we {verb} your {kw}.",
    "We {verb} your {kw}.",
    "We {verb} your {kw} to show content near you.",
    "Your {kw} is used by us for security and fraud prevention.",
    "We may {verb} your {kw} so that features work as expected.",
)
THIRD_PARTY = (
    "We share your {kw} with our advertising partners.",
    "Third party analytics providers may collect your {kw}.",
    "Your {kw} is shared with partners such as {lib}.",
    "Advertisers and their service providers may receive your {kw}.",
)
NEGATED = (
    "We do not {verb} your {kw}.",
    "We never {verb} your {kw}.",
    "The app will not {verb} your {kw} at any time.",
    "We never sell your {kw}.",
    "We do not {verb} your {kw} to show content near you.",
    "Your {kw} is never used for security or fraud prevention.",
)
NEUTRAL_MENTION = (
    "Learn more about {kw} in the help center.",
    "The {kw} field is optional on this form.",
    "Tap here to view your {kw} settings.",
)
FILLER = (
    "This privacy policy explains how we handle the information described below.",
    "Please read it carefully before using the app.",
    "We apply security measures to protect your data.",
    "You can reach our support team with any questions.",
    "We may update this policy from time to time.",
    "Changes take effect when they are posted in the app.",
    "Children under thirteen should ask a parent before signing up.",
)
VERBS = ("collect", "use", "access", "store", "process")

NON_PRIVACY_PERMISSIONS = ("INTERNET", "VIBRATE", "WAKE_LOCK", "RECEIVE_BOOT_COMPLETED",
                           "com.example.permission.C2D_MESSAGE")
UNMAPPED_LIBRARIES = ("OkHttp", "Glide", "Retrofit", "Lottie")

# navigation labels: the first group carries navigation keywords, the second does not
NAV_LABELS = ("Get Started", "Continue", "Next", "Start", "Let's start")
PLAIN_LABELS = ("Help", "Language", "Shop", "News", "Profile", "Play", "Gallery", "Share",
                "Settings", "Music", "Store", "Search")
WORDS = ("weather", "recipes", "puzzle", "level", "score", "friends", "photos", "music",
         "calendar", "notes", "tips", "daily", "coins", "rewards", "chapter", "guide")


def _title(text):
    return UiNode("TextView", text)


def _button(text, action, widget="Button"):
    return UiNode(widget, text, True, action)


def _layout(*children):
    return UiNode("LinearLayout", "", False, None, tuple(children))


class PolicyWriter:
    """Builds policy sentences from the lexicon for a chosen set of PSI."""

    def __init__(self, lexicon: KeywordLexicon, rng: random.Random):
        self.lex = lexicon
        self.rng = rng

    def keyword(self, psi) -> str:
        return self.rng.choice(self.lex.data_keywords[PsiKind(psi)])

    def first_party(self, psi) -> str:
        tpl = self.rng.choice(FIRST_PARTY)
        return tpl.format(verb=self.rng.choice(VERBS), kw=self.keyword(psi))

    def third_party(self, psi, libraries=("our partners",)) -> str:
        tpl = self.rng.choice(THIRD_PARTY)
        return tpl.format(kw=self.keyword(psi), lib=self.rng.choice(sorted(libraries)))

    def negated(self, psi) -> str:
        tpl = self.rng.choice(NEGATED)
        return tpl.format(verb=self.rng.choice(VERBS), kw=self.keyword(psi))

    def neutral(self, psi) -> str:
        return self.rng.choice(NEUTRAL_MENTION).format(kw=self.keyword(psi))

    def filler(self, n) -> list:
        return self.rng.sample(FILLER, n)

    def policy(self, first_party, third_party, libraries=(), negated=(), neutral=()) -> list:
        """Sentences disclosing ``first_party`` and, with attribution, ``third_party``.

        A PSI listed in both sets gets the third-party sentence only (it is
        affirmative too).  ``negated``/``neutral`` PSI get a sentence that
        mentions them without disclosing them.
        """
        libs = tuple(libraries) or ("our partners",)
        body = []
        for psi in sorted(set(first_party) - set(third_party), key=str):
            body.append(self.first_party(psi))
        for psi in sorted(third_party, key=str):
            body.append(self.third_party(psi, libs))
        for psi in sorted(negated, key=str):
            body.append(self.negated(psi))
        for psi in sorted(neutral, key=str):
            body.append(self.neutral(psi))
        self.rng.shuffle(body)
        head = self.filler(2)
        tail = self.filler(1)
        return head + body + [s for s in tail if s not in head]


# ---------------------------------------------------------------------------
# package assembly

class _Builder:
    def __init__(self, app_id):
        self.app_id = app_id
        self.screens = {}
        self.transitions = {}
        self.timers = {}
        self.resume_after_home = {}
        self.resume_after_back = {}
        self.swipe_next = {}
        self.launch_events = ()
        self.initial = None

    def screen(self, screen_id, *children):
        self.screens[screen_id] = Screen(screen_id, _layout(*children))
        if self.initial is None:
            self.initial = screen_id

    def link(self, src, action, dst, events=()):
        self.transitions[(src, action)] = Transition(dst, tuple(events))

    def build(self, permissions, libraries) -> AppPackage:
        behavior = BehaviorScript(self.initial, self.transitions, tuple(self.launch_events),
                                  self.timers, self.resume_after_home, self.resume_after_back,
                                  self.swipe_next)
        return AppPackage.build(Manifest(self.app_id, tuple(permissions)), list(libraries),
                                list(self.screens.values()), behavior)


def _policy_app(app_id, rng, sentences, accept="button", depth=None):
    """splash -> intro screens -> policy -> home, navigated by keyword buttons."""
    b = _Builder(app_id)
    depth = rng.randint(0, 3) if depth is None else depth
    chain = ["splash"] + [f"intro{i}" for i in range(1, depth + 1)] + ["policy"]
    for i, screen_id in enumerate(chain[:-1]):
        nav = f"nav_{screen_id}"
        children = [_title(f"{screen_id.capitalize()} {rng.choice(WORDS)} {rng.choice(WORDS)}")]
        extra = rng.choice(PLAIN_LABELS)
        if rng.random() < 0.5:
            children.append(_button(extra, f"extra_{screen_id}"))
            children.append(_button(rng.choice(NAV_LABELS), nav))
        else:
            children.append(_button(rng.choice(NAV_LABELS), nav))
            children.append(_button(extra, f"extra_{screen_id}"))
        b.screen(screen_id, *children)
        b.link(screen_id, nav, chain[i + 1])
        if extra == "Help":
            b.link(screen_id, f"extra_{screen_id}", "help")

    body = [_title("Privacy Policy")] + [UiNode("TextView", s) for s in sentences]
    if accept == "button":
        body.append(_button(rng.choice(("Accept", "I Agree", "Agree and continue")), "accept"))
        body.append(_button("Decline", "decline"))
    elif accept == "checkbox":
        body.append(_button("I agree to the privacy policy", "accept", widget="CheckBox"))
    elif accept == "close":
        body.append(_button("Close", "accept"))
    elif accept == "disabled":
        body.append(UiNode("Button", "Accept"))
        body.append(_button("Close", "close"))
    elif accept == "statement":
        body.append(UiNode("TextView", "By continuing you accept this policy."))
        body.append(_button("Continue", "accept"))
    else:
        raise ValueError(f"unknown accept style {accept!r}")
    b.screen("policy", *body)
    b.link("policy", "accept", "home")
    b.screen("home", _title(f"Home {rng.choice(WORDS)}"), _button("Profile", "profile"),
             _button("Play", "play"))
    b.screen("help", _title("Help center"), UiNode("TextView", "Answers to common questions."))
    return b


def _privacy_surface(rng, store: MappingStore, need):
    """Draw permissions and libraries until ``need(analysis)`` is satisfied."""
    perms_pool = sorted(store.permission_names)
    libs_pool = sorted(store.library_names)
    for _ in range(1000):
        perms = rng.sample(perms_pool, rng.randint(1, 3))
        libs = rng.sample(libs_pool, rng.randint(0, 2))
        first = set()
        for p in perms:
            first |= store.psi_for_permission(p)
        third = set()
        for lib in libs:
            third |= store.psi_for_library(lib)
        required = first | third
        apis = sorted({api for _, api, _ in store.apis_for(sorted(perms), sorted(libs))})
        choice = need(required, third, rng)
        if choice is not False:
            return sorted(perms), sorted(libs), required, third, apis, choice
    raise RuntimeError("could not draw a privacy surface meeting the constraint")


def _covered_by_coarse(psi, pool):
    return not psi.coarse and psi.family_coarse in pool


def _victim_psi(required, third, rng):
    cands = sorted((k for k in required - third if not _covered_by_coarse(k, required)), key=str)
    return rng.choice(cands) if cands else False


def _victim_tp(required, third, rng):
    cands = sorted((k for k in third if not _covered_by_coarse(k, third)), key=str)
    return rng.choice(cands) if cands else False


def _victim_both(required, third, rng):
    cands = sorted((k for k in third if not _covered_by_coarse(k, required)), key=str)
    return rng.choice(cands) if cands else False


def _anything(required, third, rng):
    return None


def _no_policy_app(app_id, rng, n_screens=None):
    """A random screen graph with no policy page anywhere."""
    b = _Builder(app_id)
    n = rng.randint(2, 8) if n_screens is None else n_screens
    ids = [f"s{i}" for i in range(n)]
    for i, sid in enumerate(ids):
        children = [_title(f"Screen {i} {rng.choice(WORDS)} {rng.choice(WORDS)}")]
        for j in range(rng.randint(0, 4)):
            label = rng.choice(NAV_LABELS + PLAIN_LABELS + ("OK", "Terms", "Privacy settings"))
            action = f"{sid}_b{j}"
            children.append(_button(label, action))
            if rng.random() < 0.8:
                b.link(sid, action, rng.choice(ids))
        if rng.random() < 0.2:
            children.append(_button("Skip", f"{sid}_dead"))
        b.screen(sid, *children)
        if rng.random() < 0.25:
            b.swipe_next[sid] = rng.choice(ids)
    return b


def _deep_policy_app(app_id, rng, sentences, depth):
    """The policy sits ``depth`` keyword taps from the splash screen."""
    return _policy_app(app_id, rng, sentences, accept="button", depth=depth)


def _terms_only_app(app_id, rng):
    b = _Builder(app_id)
    b.screen("splash", _title(f"Welcome {rng.choice(WORDS)}"), _button("Start", "start"))
    b.link("splash", "start", "terms")
    terms = ("Terms and Conditions", "By using the app you agree to these terms of service.",
             "The license granted to you is personal and non transferable.",
             "We are not liable for any indirect damages.",
             "See our privacy policy for how we handle information.")
    b.screen("terms", *[_title(t) for t in terms], _button("Accept", "accept"))
    b.link("terms", "accept", "home")
    b.screen("home", _title("Home"), _button("Profile", "profile"))
    return b


def generate_app(verdict: str, app_id: str, rng: random.Random,
                 store: Optional[MappingStore] = None,
                 lexicon: Optional[KeywordLexicon] = None) -> AppPackage:
    """One package whose oracle-mode verdict is ``verdict``."""
    store = store or default_store()
    lexicon = lexicon or default_lexicon()
    writer = PolicyWriter(lexicon, rng)
    if verdict not in VERDICTS:
        raise ValueError(f"unknown verdict {verdict!r}")

    if verdict == "Clean":
        b = _no_policy_app(app_id, rng) if rng.random() < 0.5 else _terms_only_app(app_id, rng)
        # permission-free; unmapped libraries do not touch PSI either
        libs = rng.sample(UNMAPPED_LIBRARIES, rng.randint(0, 2))
        return b.build([], sorted(libs))

    victim_rule = {"Fail_CR1_PSI": _victim_psi, "Fail_CR1_ThirdParty": _victim_tp,
                   "Fail_CR1_Both": _victim_both}.get(verdict, _anything)
    perms, libs, required, third, apis, victim = _privacy_surface(rng, store, victim_rule)
    perms = sorted(perms + rng.sample(NON_PRIVACY_PERMISSIONS, rng.randint(0, 2)))
    libs = sorted(libs + rng.sample(UNMAPPED_LIBRARIES, rng.randint(0, 1)))

    if verdict == "Fail_TR1_TR2":
        style = rng.choice(("graph", "graph", "deep", "terms"))
        if style == "graph":
            b = _no_policy_app(app_id, rng)
        elif style == "terms":
            b = _terms_only_app(app_id, rng)
        else:
            b = _deep_policy_app(app_id, rng, writer.policy(required, third, libs),
                                 depth=rng.randint(20, 24))
        return b.build(perms, libs)

    first, tp, negated, neutral = set(required), set(third), set(), set()
    if verdict == "Fail_CR1_PSI":
        first.discard(victim)
    elif verdict == "Fail_CR1_ThirdParty":
        tp.discard(victim)          # still disclosed, just not attributed
    elif verdict == "Fail_CR1_Both":
        first.discard(victim)
        tp.discard(victim)
    if victim is not None and rng.random() < 0.5:
        (negated if rng.random() < 0.5 else neutral).add(victim)
    sentences = writer.policy(first, tp, libs, negated, neutral)

    accept = "button"
    if verdict == "Fail_TR3":
        accept = rng.choice(("close", "disabled", "statement"))
    elif rng.random() < 0.3:
        accept = "checkbox"
    b = _policy_app(app_id, rng, sentences, accept=accept)
    # monitored calls after acceptance are allowed and keep the TR4 boundary honest
    b.link("policy", "accept", "home", rng.sample(apis, rng.randint(0, len(apis))))

    if verdict == "Fail_TR6":
        b.timers["policy"] = Timer(rng.randint(1, 9), "home")
    elif rng.random() < 0.3:
        b.timers["policy"] = Timer(rng.randint(11, 60), "home")
    if verdict == "Fail_TR5":
        target = rng.choice(("resume_after_home", "resume_after_back", "both"))
        if target in ("resume_after_home", "both"):
            b.resume_after_home["policy"] = "home"
        if target in ("resume_after_back", "both"):
            b.resume_after_back["policy"] = "home"
    if verdict == "Fail_TR4":
        leaked = rng.sample(apis, rng.randint(1, len(apis)))
        if rng.random() < 0.5:
            b.launch_events = tuple(leaked)
        else:
            src = "splash"
            b.link(src, f"nav_{src}", b.transitions[(src, f"nav_{src}")].next_screen, leaked)
    return b.build(perms, libs)


def _normalize_spec(spec) -> dict:
    out = {}
    for verdict, count in dict(spec).items():
        verdict = str(getattr(verdict, "value", verdict))
        if verdict not in VERDICTS:
            raise ValueError(f"unknown verdict {verdict!r}")
        if int(count) < 0:
            raise ValueError(f"negative count for {verdict}")
        out[verdict] = int(count)
    return out


def generate_corpus(spec, seed: int, out=None, store=None, lexicon=None):
    """Packages for ``{verdict: count}`` plus their label document.

    App ids are assigned after shuffling, so ids carry no hint of the class.
    Returns ``(packages, labels)``; with ``out`` both are also written there.
    """
    spec = _normalize_spec(spec)
    rng = random.Random(seed)
    plan = [v for v in VERDICTS for _ in range(spec.get(v, 0))]
    rng.shuffle(plan)
    packages, rows = [], []
    for idx, verdict in enumerate(plan):
        app_id = f"com.synth.app{idx:04d}"
        pkg = generate_app(verdict, app_id, random.Random(f"{seed}/{idx}"), store, lexicon)
        packages.append(pkg)
        rows.append({"app_id": app_id, "expected_verdict": verdict})
    labels = {"format": LABELS_FORMAT, "version": 1, "seed": seed,
              "spec": {v: spec[v] for v in VERDICTS if v in spec}, "apps": rows}
    if out is not None:
        write_corpus(packages, labels, out)
    return packages, labels


def write_corpus(packages, labels, out) -> Path:
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    for pkg in packages:
        pkg.write(out / pkg.app_id)
    jsonio.dump(labels, out / "labels.json")
    return out


# ---------------------------------------------------------------------------
# TR decision table

DECISION_FLAGS = ("accept_widget", "expires", "home_ok", "back_ok", "pre_accept_event")


def decision_table_verdict(flags: dict) -> str:
    if not flags["accept_widget"]:
        return "Fail_TR3"
    if flags["expires"]:
        return "Fail_TR6"
    if not (flags["home_ok"] and flags["back_ok"]):
        return "Fail_TR5"
    if flags["pre_accept_event"]:
        return "Fail_TR4"
    return "Compliant"


def decision_table_package(flags: dict, app_id: str) -> AppPackage:
    """Fixed location app; each flag switches one TR-relevant behaviour."""
    b = _Builder(app_id)
    b.screen("splash", _title("Welcome to Trail Maps"), _button("Get Started", "start"))
    b.link("splash", "start", "policy")
    accept = _button("I Agree", "accept") if flags["accept_widget"] else _button("Close", "accept")
    b.screen("policy", _title("Privacy Policy"),
             _title("We collect your precise location to show nearby trails."),
             _title("We may update this policy from time to time."), accept)
    b.link("policy", "accept", "home", ("getLocation()",))
    b.screen("home", _title("Nearby trails"), _button("Map", "map"))
    if flags["expires"]:
        b.timers["policy"] = Timer(5, "home")
    if not flags["home_ok"]:
        b.resume_after_home["policy"] = "home"
    if not flags["back_ok"]:
        b.resume_after_back["policy"] = "home"
    if flags["pre_accept_event"]:
        b.launch_events = ("getLocation()",)
    return b.build(["ACCESS_FINE_LOCATION"], [])


def decision_table():
    """All 32 flag combinations as ``(app_id, flags, package, expected_verdict)``."""
    rows = []
    for i, bits in enumerate(itertools.product((False, True), repeat=len(DECISION_FLAGS))):
        flags = dict(zip(DECISION_FLAGS, bits))
        app_id = f"com.table.case{i:02d}"
        rows.append((app_id, flags, decision_table_package(flags, app_id),
                     decision_table_verdict(flags)))
    return rows


def write_decision_table(out) -> Path:
    rows = decision_table()
    labels = {"format": LABELS_FORMAT, "version": 1, "seed": None, "spec": None,
              "apps": [{"app_id": a, "expected_verdict": v, "flags": f} for a, f, _, v in rows]}
    return write_corpus([pkg for _, _, pkg, _ in rows], labels, out)
