"""Full compliance workflow for one package, and batch runs over a corpus."""

from __future__ import annotations

import enum
import hashlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

from . import jsonio
from .analyzer import analyze
from .app_package import AppPackage, parse_package
from .cr_checker import CR_TASKS, CrModels, KeywordLexicon, check_cr1, default_lexicon
from .detector import (DETECTOR_THRESHOLD, EXPLORATION_POLICY, MAX_ACTIONS, DetectionFailure,
                       detect)
from .device import Action, install_and_launch
from .errors import ConfigError, PpcheckError
from .oracle import PolicyPageOracle
from .psi_mapping import MappingStore
from .requirements import (TR6_TIMEOUT, check_tr4, contains_explicit_accept,
                           test_technical_requirements)
from .text.model import TextModel

REPORT_FORMAT = "ppcheck-report"
BATCH_FORMAT = "ppcheck-batch-report"


class Verdict(str, enum.Enum):
    CLEAN = "Clean"
    FAIL_TR1_TR2 = "Fail_TR1_TR2"
    FAIL_TR3 = "Fail_TR3"
    FAIL_TR6 = "Fail_TR6"
    FAIL_TR5 = "Fail_TR5"
    FAIL_TR4 = "Fail_TR4"
    FAIL_CR1_PSI = "Fail_CR1_PSI"
    FAIL_CR1_THIRD_PARTY = "Fail_CR1_ThirdParty"
    FAIL_CR1_BOTH = "Fail_CR1_Both"
    COMPLIANT = "Compliant"

    def __str__(self):
        return self.value


# the order in which the pipeline can stop
VERDICT_ORDER = tuple(Verdict)


@dataclass(frozen=True)
class PipelineConfig:
    max_actions: int = MAX_ACTIONS
    tr6_timeout: int = TR6_TIMEOUT
    detector_threshold: Optional[float] = None   # None: the detector's own threshold

    def to_json(self):
        return asdict(self)


class ModelSet:
    """Detector plus CR-task classifiers, trained or rule-based."""

    def __init__(self, detector, cr: CrModels, lexicon: KeywordLexicon, mode: str, version: str):
        self.detector = detector
        self.cr = cr
        self.lexicon = lexicon
        self.mode = mode
        self.version = version

    @classmethod
    def oracle(cls, lexicon: Optional[KeywordLexicon] = None, threshold=DETECTOR_THRESHOLD):
        lexicon = lexicon or default_lexicon()
        return cls(PolicyPageOracle(threshold), CrModels.oracle(lexicon), lexicon, "oracle",
                   f"oracle/lexicon-{lexicon.version}")

    @classmethod
    def load(cls, directory, lexicon: Optional[KeywordLexicon] = None):
        directory = Path(directory)
        lexicon = lexicon or default_lexicon()
        detector_path = directory / "detector.json"
        if not detector_path.is_file():
            raise ConfigError(f"no detector model in {directory}")
        digest = hashlib.sha256(detector_path.read_bytes())
        detector = TextModel.load(detector_path)
        psi_models, aux = {}, {}
        for task in CR_TASKS:
            path = directory / "cr" / f"{task}.json"
            if not path.is_file():
                raise ConfigError(f"missing CR model {path}")
            digest.update(path.read_bytes())
            model = TextModel.load(path)
            if task in ("performed_not_performed", "third_party_first_party"):
                aux[task] = model
            else:
                psi_models[task] = model
        cr = CrModels(psi_models, aux["performed_not_performed"], aux["third_party_first_party"])
        return cls(detector, cr, lexicon, "trained", digest.hexdigest()[:16])


class _Thresholded:
    """Read-only view of a detector with a different decision threshold."""

    def __init__(self, model, threshold):
        self.model = model
        self.threshold = threshold

    def score_text(self, text):
        return self.model.score_text(text)


@dataclass
class ComplianceReport:
    app_id: str
    verdict: str
    needs_manual_review: bool = False
    static: dict = field(default_factory=dict)
    detection: Optional[dict] = None
    technical: Optional[dict] = None
    tr4: Optional[dict] = None
    content: Optional[dict] = None
    config: dict = field(default_factory=dict)
    versions: dict = field(default_factory=dict)
    timing: dict = field(default_factory=dict)

    def to_document(self) -> dict:
        doc = asdict(self)
        doc["format"] = REPORT_FORMAT
        doc["version"] = 1
        return doc

    @classmethod
    def from_document(cls, doc) -> "ComplianceReport":
        doc = dict(doc)
        doc.pop("format", None)
        doc.pop("version", None)
        return cls(**doc)

    def dumps(self) -> str:
        return jsonio.dumps(self.to_document())


def _cr_verdict(cr) -> Verdict:
    if not cr.psi_ok and not cr.third_party_ok:
        return Verdict.FAIL_CR1_BOTH
    if not cr.psi_ok:
        return Verdict.FAIL_CR1_PSI
    if not cr.third_party_ok:
        return Verdict.FAIL_CR1_THIRD_PARTY
    return Verdict.COMPLIANT


def run_pipeline(pkg: AppPackage, store: MappingStore, models: ModelSet,
                 config: PipelineConfig = PipelineConfig()) -> ComplianceReport:
    if models is None:
        raise ConfigError("no classifiers: load a model set or use oracle mode")
    detector = models.detector
    if config.detector_threshold is not None:
        detector = _Thresholded(detector, config.detector_threshold)
    report = ComplianceReport(
        app_id=pkg.app_id,
        verdict="",
        config=dict(config.to_json(), exploration_policy=EXPLORATION_POLICY,
                    detector_threshold=detector.threshold),
        versions={"models": models.version, "mode": models.mode,
                  "lexicon": models.lexicon.version},
    )
    static = analyze(pkg, store)
    report.static = static.summary()
    if static.clean:
        report.verdict = Verdict.CLEAN.value
        report.timing = {"sim_seconds": 0, "actions": 0}
        return report

    session = install_and_launch(pkg, static.monitored_methods())

    def finish(verdict):
        report.verdict = Verdict(verdict).value
        report.timing = {"sim_seconds": session.clock, "actions": len(session.history)}
        return report

    det = detect(session, detector, config.max_actions)
    if isinstance(det, DetectionFailure):
        report.detection = dict(det.to_json(), detected=False)
        return finish(Verdict.FAIL_TR1_TR2)
    report.detection = dict(det.to_json(), detected=True)

    tr = test_technical_requirements(session, det, config.tr6_timeout)
    report.technical = tr.to_json()
    if not tr.passed:
        return finish(tr.value)

    widget = contains_explicit_accept(det.policy_xml)
    acceptance_seq = None
    if widget is not None and widget.action_id is not None:
        acceptance_seq = session.next_seq
        session.perform(Action.tap(widget.action_id))
    tr4 = check_tr4(session.events, acceptance_seq)
    report.tr4 = tr4.to_json()
    if not tr4.passed:
        return finish(tr4.value)

    cr = check_cr1(det.policy_text, static.required_psi, static.third_party_psi,
                   models.cr, models.lexicon)
    report.content = cr.to_json()
    verdict = _cr_verdict(cr)
    report.needs_manual_review = verdict is not Verdict.COMPLIANT
    return finish(verdict)


# --------------------------------------------------------------------------
# batch

def _analyze_dir(args):
    path, store, models, config = args
    try:
        pkg = parse_package(path)
        report = run_pipeline(pkg, store, models, config)
        return path.name, report.to_document(), list(pkg.manifest.permissions), list(pkg.libraries), None
    except PpcheckError as exc:
        return path.name, None, None, None, f"{type(exc).__name__}: {exc}"


def _distribution(rows, names, total):
    counts = {}
    for items in rows:
        for name in set(items):
            if name in names:
                counts[name] = counts.get(name, 0) + 1
    out = []
    for name, count in sorted(counts.items(), key=lambda kv: (-kv[1], kv[0])):
        out.append({"name": name, "count": count, "total": total,
                    "percentage": round(100.0 * count / total, 1), "ratio": f"{count}/{total}"})
    return out


def run_batch(directory, store: MappingStore, models: ModelSet,
              config: PipelineConfig = PipelineConfig(), jobs: int = 1) -> dict:
    directory = Path(directory)
    pkg_dirs = sorted((p for p in directory.iterdir() if p.is_dir()), key=lambda p: p.name)
    work = [(p, store, models, config) for p in pkg_dirs]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_analyze_dir, work, chunksize=max(1, len(work) // (4 * jobs))))
    else:
        results = [_analyze_dir(w) for w in work]

    apps, errors, perms, libs = [], [], [], []
    for name, report, permissions, libraries, error in results:
        if error is not None:
            errors.append({"package_dir": name, "error": error})
            continue
        apps.append(report)
        perms.append(permissions)
        libs.append(libraries)
    apps.sort(key=lambda r: (r["app_id"], r["verdict"]))
    histogram = {v.value: 0 for v in Verdict}
    for report in apps:
        histogram[report["verdict"]] += 1
    total = len(apps)
    return {
        "format": BATCH_FORMAT,
        "version": 1,
        "total_packages": len(pkg_dirs),
        "analyzed": total,
        "verdict_histogram": histogram,
        "permission_distribution": _distribution(perms, store.permission_names, total),
        "library_distribution": _distribution(libs, store.library_names, total),
        "apps": apps,
        "errors": errors,
    }
