import json

import pytest

from ppcheck import jsonio
from ppcheck.cli import main, parse_spec
from ppcheck.errors import PpcheckError


def test_analyze_oracle_writes_report(fixtures_dir, tmp_path):
    out = tmp_path / "r.json"
    assert main(["analyze", str(fixtures_dir / "golden_compliant"), "--oracle",
                 "--report-out", str(out), "--seed", "3"]) == 0
    doc = jsonio.load(out)
    assert doc["verdict"] == "Compliant" and doc["config"]["seed"] == 3


def test_analyze_to_stdout(fixtures_dir, capsys):
    assert main(["analyze", str(fixtures_dir / "menu_buried_policy"), "--oracle"]) == 0
    assert json.loads(capsys.readouterr().out)["app_id"] == "com.example.recipebox"


def test_analyze_without_models_fails(fixtures_dir, capsys):
    assert main(["analyze", str(fixtures_dir / "golden_compliant")]) == 1
    assert "no models" in capsys.readouterr().err


def test_analyze_missing_package_fails(tmp_path, capsys):
    assert main(["analyze", str(tmp_path / "nope"), "--oracle"]) == 1
    assert capsys.readouterr().err.startswith("ppcheck: error:")


def test_small_budget_flag(fixtures_dir, tmp_path):
    out = tmp_path / "r.json"
    assert main(["analyze", str(fixtures_dir / "menu_buried_policy"), "--oracle", "--ma", "2",
                 "--report-out", str(out)]) == 0
    assert jsonio.load(out)["verdict"] == "Fail_TR1_TR2"


def test_bad_flag_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["analyze"])
    assert exc.value.code == 2


def test_gen_corpus_then_batch(tmp_path):
    corpus = tmp_path / "c"
    assert main(["gen-corpus", "--spec", "Clean=2,Fail_TR6=2,Compliant=2", "--out", str(corpus)]) == 0
    out = tmp_path / "b.json"
    assert main(["batch", str(corpus), "--oracle", "--report-out", str(out)]) == 0
    doc = jsonio.load(out)
    hist = {k: v for k, v in doc["verdict_histogram"].items() if v}
    assert hist == {"Clean": 2, "Fail_TR6": 2, "Compliant": 2}


def test_gen_decision_table(tmp_path):
    assert main(["gen-corpus", "--decision-table", "--out", str(tmp_path)]) == 0
    assert len(jsonio.load(tmp_path / "labels.json")["apps"]) == 32


def test_batch_on_file_fails(tmp_path):
    f = tmp_path / "x"
    f.write_text("")
    assert main(["batch", str(f), "--oracle"]) == 1


def test_spec_parsing(tmp_path):
    assert parse_spec("Clean=5, Fail_TR6=3") == {"Clean": 5, "Fail_TR6": 3}
    assert parse_spec('{"Compliant": 4}') == {"Compliant": 4}
    path = tmp_path / "s.json"
    path.write_text('{"Fail_TR4": 1}')
    assert parse_spec(str(path)) == {"Fail_TR4": 1}
    assert sum(parse_spec(None).values()) == 200
    with pytest.raises(PpcheckError):
        parse_spec("Bogus=3")


def test_train_with_custom_corpus(tmp_path):
    corpus = tmp_path / "corpus.json"
    jsonio.dump({"texts": ["we collect your email address"] * 10 + ["the weather is nice"] * 10,
                 "labels": [1] * 10 + [0] * 10}, corpus)
    out = tmp_path / "m"
    assert main(["train", "--task", "contact_email_address", "--corpus", str(corpus),
                 "--out", str(out)]) == 0
    assert (out / "cr" / "contact_email_address.json").is_file()
    assert main(["train", "--corpus", str(corpus), "--out", str(out)]) == 1


def test_train_single_class_fails(tmp_path, capsys):
    corpus = tmp_path / "corpus.json"
    jsonio.dump({"texts": ["a", "b"], "labels": [1, 1]}, corpus)
    assert main(["train", "--task", "location_gps", "--corpus", str(corpus),
                 "--out", str(tmp_path / "m")]) == 1
    assert "location_gps" in capsys.readouterr().err


def test_analyze_with_trained_models(fixtures_dir, trained_dir, tmp_path):
    out = tmp_path / "r.json"
    assert main(["analyze", str(fixtures_dir / "golden_compliant"), "--models", str(trained_dir),
                 "--report-out", str(out)]) == 0
    doc = jsonio.load(out)
    assert doc["verdict"] == "Compliant" and doc["versions"]["mode"] == "trained"


def test_validate_mapping(capsys):
    assert main(["validate-mapping"]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["permissions"] > 0 and summary["psi_kinds"] > 0


def test_validate_bad_mapping(tmp_path):
    bad = tmp_path / "m.json"
    bad.write_text("{not json")
    assert main(["validate-mapping", str(bad)]) == 1
