"""Shared fixtures and the acceptance summary printed at the end of a run."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

import pytest

from ppcheck.cr_checker import default_lexicon
from ppcheck.pipeline import ModelSet
from ppcheck.psi_mapping import default_store

FIXTURES = Path(str(resources.files("ppcheck").joinpath("data/fixtures")))

ACCEPTANCE = {
    "test_criterion_1_decision_table": "1 decision-table exactness",
    "test_criterion_2_oracle_equivalence": "2 oracle end-to-end equivalence",
    "test_criterion_3_bound_fidelity": "3 bound fidelity",
    "test_criterion_4_numerical_core": "4 numerical core",
    "test_criterion_5_learned_model_sanity": "5 learned-model sanity",
    "test_criterion_6_determinism": "6 determinism",
}
_outcomes: dict = {}


def pytest_runtest_logreport(report):
    name = report.nodeid.split("::")[-1]
    if name not in ACCEPTANCE:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _outcomes[name] = "PASS" if report.passed else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for name, label in ACCEPTANCE.items():
        terminalreporter.write_line(f"{_outcomes.get(name, 'NOT RUN'):7} criterion {label}")


@pytest.fixture(scope="session")
def store():
    return default_store()


@pytest.fixture(scope="session")
def lexicon():
    return default_lexicon()


@pytest.fixture(scope="session")
def oracle_models(lexicon):
    return ModelSet.oracle(lexicon)


@pytest.fixture(scope="session")
def fixtures_dir():
    return FIXTURES


@pytest.fixture(scope="session")
def trained_dir(tmp_path_factory):
    """A full model set trained once per session (seed 7)."""
    from ppcheck.training import train_models
    out = tmp_path_factory.mktemp("models")
    train_models(out, seed=7)
    return out
