import json
import random
import shutil

import pytest

from ppcheck import jsonio
from ppcheck.app_package import AppPackage, BehaviorScript, Manifest, Screen, UiNode, parse_package
from ppcheck.corpus import decision_table, generate_app, generate_corpus, write_decision_table
from ppcheck.errors import ConfigError
from ppcheck.pipeline import (VERDICT_ORDER, ComplianceReport, ModelSet, PipelineConfig, Verdict,
                              run_batch, run_pipeline)


def test_verdict_taxonomy():
    assert [v.value for v in VERDICT_ORDER] == [
        "Clean", "Fail_TR1_TR2", "Fail_TR3", "Fail_TR6", "Fail_TR5", "Fail_TR4",
        "Fail_CR1_PSI", "Fail_CR1_ThirdParty", "Fail_CR1_Both", "Compliant"]


def test_no_psi_package_is_clean(store, oracle_models):
    pkg = AppPackage.build(Manifest("a.b", ("INTERNET",)), ["OkHttp"],
                           [Screen("m", UiNode("TextView", "hi"))], BehaviorScript("m"))
    report = run_pipeline(pkg, store, oracle_models)
    assert report.verdict == "Clean" and report.detection is None


def test_golden_fixture_is_compliant(fixtures_dir, store, oracle_models):
    report = run_pipeline(parse_package(fixtures_dir / "golden_compliant"), store, oracle_models)
    assert report.verdict == "Compliant" and not report.needs_manual_review
    assert report.tr4["evidence"]["acceptance_seq"] == 0
    assert report.content["psi_ok"] and report.content["third_party_ok"]
    assert report.static["third_party_psi"] == ["identifier_ad_id"]


def test_both_legs_failing(store, oracle_models):
    pkg = generate_app("Fail_CR1_Both", "x.y", random.Random(5), store)
    report = run_pipeline(pkg, store, oracle_models)
    assert report.verdict == "Fail_CR1_Both" and report.needs_manual_review
    assert report.content["missing_psi"] and report.content["missing_third_party"]


def test_missing_models_is_a_configuration_error(fixtures_dir, store):
    with pytest.raises(ConfigError):
        run_pipeline(parse_package(fixtures_dir / "golden_compliant"), store, None)
    with pytest.raises(ConfigError):
        ModelSet.load(fixtures_dir)


def test_config_threshold_does_not_mutate_shared_model(fixtures_dir, store, oracle_models):
    pkg = parse_package(fixtures_dir / "golden_compliant")
    report = run_pipeline(pkg, store, oracle_models, PipelineConfig(detector_threshold=1.5))
    assert report.verdict == "Fail_TR1_TR2"
    assert oracle_models.detector.threshold == 0.90
    assert run_pipeline(pkg, store, oracle_models).verdict == "Compliant"


def test_report_roundtrip_is_lossless(fixtures_dir, store, oracle_models):
    report = run_pipeline(parse_package(fixtures_dir / "menu_buried_policy"), store, oracle_models)
    text = report.dumps()
    again = ComplianceReport.from_document(json.loads(text))
    assert again == report and again.dumps() == text


def test_report_is_deterministic(fixtures_dir, store, oracle_models):
    pkg = parse_package(fixtures_dir / "golden_compliant")
    assert run_pipeline(pkg, store, oracle_models).dumps() == run_pipeline(pkg, store, oracle_models).dumps()


@pytest.mark.parametrize("app_id, flags, pkg, expected", decision_table(), ids=lambda v: v if isinstance(v, str) else "")
def test_decision_table_row(app_id, flags, pkg, expected, store, oracle_models):
    assert run_pipeline(pkg, store, oracle_models).verdict == expected


def test_every_verdict_is_reachable(store, oracle_models):
    packages, labels = generate_corpus({v.value: 2 for v in Verdict}, seed=3)
    got = {run_pipeline(p, store, oracle_models).verdict for p in packages}
    assert got == {v.value for v in Verdict}


def test_batch_empty_directory(tmp_path, store, oracle_models):
    report = run_batch(tmp_path, store, oracle_models)
    assert report["apps"] == [] and report["errors"] == []
    assert set(report["verdict_histogram"].values()) == {0}
    assert report["permission_distribution"] == []


def test_batch_permission_ratio(tmp_path, store, oracle_models):
    for i in range(3):
        AppPackage.build(Manifest(f"app.{i}", ("ACCESS_WIFI_STATE",)), [],
                         [Screen("m", UiNode("TextView", "hi"))], BehaviorScript("m")).write(tmp_path / str(i))
    report = run_batch(tmp_path, store, oracle_models)
    assert report["permission_distribution"] == [{"name": "ACCESS_WIFI_STATE", "count": 3, "total": 3,
                                                  "percentage": 100.0, "ratio": "3/3"}]


def test_batch_records_errors_and_continues(tmp_path, fixtures_dir, store, oracle_models):
    shutil.copytree(fixtures_dir / "golden_compliant", tmp_path / "good")
    (tmp_path / "broken").mkdir()
    (tmp_path / "broken" / "manifest.xml").write_text("<manifest")
    report = run_batch(tmp_path, store, oracle_models)
    assert [a["app_id"] for a in report["apps"]] == ["com.example.trailmaps"]
    assert report["errors"][0]["package_dir"] == "broken"
    assert "MalformedXml" in report["errors"][0]["error"]


def test_batch_decision_table_histogram(tmp_path, store, oracle_models):
    write_decision_table(tmp_path)
    labels = jsonio.load(tmp_path / "labels.json")
    report = run_batch(tmp_path, store, oracle_models)
    expected = {v.value: 0 for v in Verdict}
    for row in labels["apps"]:
        expected[row["expected_verdict"]] += 1
    assert report["verdict_histogram"] == expected


def test_parallel_batch_matches_serial(tmp_path, store, oracle_models):
    generate_corpus({v.value: 2 for v in Verdict}, seed=9, out=tmp_path)
    serial = run_batch(tmp_path, store, oracle_models, jobs=1)
    parallel = run_batch(tmp_path, store, oracle_models, jobs=3)
    assert jsonio.dumps(serial) == jsonio.dumps(parallel)
