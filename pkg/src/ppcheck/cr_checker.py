"""Content check: does the policy text disclose every PSI the app touches?

A PSI counts as disclosed when some sentence that mentions one of its data
keywords is classified as (a) about that PSI and (b) affirmative.  PSI
reached through a third-party library additionally need such a sentence
classified as third-party.  A fine-grained PSI is also satisfied by a
disclosure of its family's coarse ``*_information`` member.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from . import jsonio
from .errors import MalformedModel, UntrainedModel
from .oracle import AffirmativeOracle, PsiMentionOracle, ThirdPartyOracle
from .psi_mapping import PsiKind
from .text.preprocess import contains_phrase, preprocess

AFFIRMATIVE_TASK = "performed_not_performed"
THIRD_PARTY_TASK = "third_party_first_party"
CR_TASKS = tuple(k.value for k in PsiKind) + (AFFIRMATIVE_TASK, THIRD_PARTY_TASK)


@dataclass(frozen=True)
class KeywordLexicon:
    version: str
    data_keywords: dict      # PsiKind -> tuple
    action_keywords: dict    # PsiKind -> tuple
    negation: tuple
    third_party: tuple
    models: dict             # task -> {"kind", "params", "original_model", "original_params"}

    @classmethod
    def from_document(cls, doc) -> "KeywordLexicon":
        try:
            psi = doc["psi"]
            data, action = {}, {}
            for kind in PsiKind:
                entry = psi[kind.value]
                data[kind] = tuple(entry["data"])
                action[kind] = tuple(entry["action"])
                if not data[kind]:
                    raise MalformedModel(f"lexicon: {kind} has no data keywords")
                for kw in data[kind] + action[kind]:
                    if kw != kw.lower():
                        raise MalformedModel(f"lexicon keyword {kw!r} is not lowercase")
            return cls(str(doc["version"]), data, action, tuple(doc["negation"]),
                       tuple(doc["third_party"]), dict(doc.get("models", {})))
        except KeyError as exc:
            raise MalformedModel(f"lexicon is missing {exc}") from None

    @classmethod
    def load(cls, path=None) -> "KeywordLexicon":
        if path is None:
            text = resources.files("ppcheck").joinpath("data/lexicon.json").read_text(encoding="utf-8")
            return cls.from_document(jsonio.loads_strict(text))
        return cls.from_document(jsonio.load(Path(path)))


def default_lexicon() -> KeywordLexicon:
    return KeywordLexicon.load(None)


_ABBREVIATIONS = ("e.g.", "i.e.", "etc.")
_PLACEHOLDER = "\x00"
_SPLIT = re.compile(r"(?<=[.!?])\s+")


def split_sentences(text: str) -> list:
    """Split on ``.``/``!``/``?`` followed by whitespace or end of text.

    >>> split_sentences("We use data, e.g. your IMEI, for ads.")
    ['We use data, e.g. your IMEI, for ads.']
    """
    if not text:
        return []
    protected = text
    for abbr in _ABBREVIATIONS:
        pattern = re.compile(re.escape(abbr), re.IGNORECASE)
        protected = pattern.sub(lambda m: m.group().replace(".", _PLACEHOLDER), protected)
    parts = _SPLIT.split(protected)
    out = []
    for part in parts:
        part = part.replace(_PLACEHOLDER, ".").strip()
        if part:
            out.append(part)
    return out


def filter_sentences(sentences, psi: PsiKind, lex: KeywordLexicon) -> list:
    keywords = lex.data_keywords[PsiKind(psi)]
    return [s for s in sentences if any(contains_phrase(preprocess(s), k) for k in keywords)]


class CrModels:
    """The 27 per-PSI classifiers plus the affirmative and third-party ones."""

    def __init__(self, psi_models: dict, affirmative, third_party, source="trained"):
        self.psi_models = {PsiKind(k): v for k, v in psi_models.items()}
        self.affirmative = affirmative
        self.third_party = third_party
        self.source = source

    @classmethod
    def oracle(cls, lex: KeywordLexicon) -> "CrModels":
        psi = {k: PsiMentionOracle(lex.data_keywords[k], lex.action_keywords[k]) for k in PsiKind}
        return cls(psi, AffirmativeOracle(lex.negation), ThirdPartyOracle(lex.third_party), "oracle")

    def for_psi(self, psi):
        model = self.psi_models.get(PsiKind(psi))
        if model is None:
            raise UntrainedModel(f"no classifier for PSI task {psi}")
        return model


def _positive(model, sentence) -> bool:
    if model is None:
        raise UntrainedModel("missing auxiliary classifier")
    return bool(model.is_positive(sentence))


def classify_disclosure(sentence: str, psi, models: CrModels, lex: KeywordLexicon):
    """``(mentions, affirmative, third_party)`` for one sentence and one PSI.

    Sentences without any data keyword short-circuit to all-False and the
    auxiliary classifiers are not consulted.
    """
    psi = PsiKind(psi)
    norm = preprocess(sentence)
    if not any(contains_phrase(norm, k) for k in lex.data_keywords[psi]):
        return (False, False, False)
    if not _positive(models.for_psi(psi), norm):
        return (False, False, False)
    return (True, _positive(models.affirmative, norm), _positive(models.third_party, norm))


@dataclass
class CrVerdict:
    missing_psi: frozenset
    missing_third_party: frozenset
    evidence: list = field(default_factory=list)

    @property
    def psi_ok(self) -> bool:
        return not self.missing_psi

    @property
    def third_party_ok(self) -> bool:
        return not self.missing_third_party

    def to_json(self):
        return {
            "psi_ok": self.psi_ok,
            "third_party_ok": self.third_party_ok,
            "missing_psi": sorted(str(k) for k in self.missing_psi),
            "missing_third_party": sorted(str(k) for k in self.missing_third_party),
            "evidence": self.evidence,
        }


def check_cr1(policy_text: str, required_psi, third_party_psi, models: CrModels,
              lex: KeywordLexicon) -> CrVerdict:
    required = {PsiKind(k) for k in required_psi}
    third = {PsiKind(k) for k in third_party_psi}
    if not required:
        return CrVerdict(frozenset(), frozenset())
    sentences = split_sentences(policy_text)

    to_check = set(required)
    to_check |= {k.family_coarse for k in required if not k.coarse}
    disclosed, disclosed_tp = set(), set()
    evidence = []
    for psi in sorted(to_check, key=str):
        for sentence in filter_sentences(sentences, psi, lex):
            mentions, affirmative, tp = classify_disclosure(sentence, psi, models, lex)
            evidence.append({"psi": str(psi), "sentence": sentence, "mentions": mentions,
                             "affirmative": affirmative, "third_party": tp})
            if mentions and affirmative:
                disclosed.add(psi)
                if tp:
                    disclosed_tp.add(psi)

    def covered(psi, pool):
        return psi in pool or (not psi.coarse and psi.family_coarse in pool)

    missing = frozenset(k for k in required if not covered(k, disclosed))
    missing_tp = frozenset(k for k in third if not covered(k, disclosed_tp))
    return CrVerdict(missing, missing_tp, evidence)
