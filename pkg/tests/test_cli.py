import io
import json

import pytest

from seifert_obstruct.cli import main, parse_framing, parse_multi_index, parse_params
from seifert_obstruct.config import FORMAT_ENV
from seifert_obstruct.errors import BadParameter, IndexOutOfRange, ParseError
from seifert_obstruct.observability import logger


@pytest.fixture(autouse=True)
def text_format(monkeypatch):
    monkeypatch.delenv(FORMAT_ENV, raising=False)


def run_cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out=out, err=err)
    return code, out.getvalue(), err.getvalue()


def test_sfs_text_report():
    code, out, _ = run_cli("sfs", "(+0|2/1,3/1,5/1)")
    assert code == 0
    assert "Z/31" in out
    assert "fiber order:  31" in out
    assert "-31/30" in out


def test_sfs_json_report():
    code, out, _ = run_cli("sfs", "(+1|2/1,2/-1)", "--format", "json")
    assert code == 0
    payload = json.loads(out)
    assert payload["beta1"] == 3
    assert payload["fiber_order"] is None
    assert payload["euler_number"] == "0"
    assert payload["ring_type"] == "S1 x Sigma_1"


def test_sfs_json_from_environment(monkeypatch):
    monkeypatch.setenv(FORMAT_ENV, "json")
    code, out, _ = run_cli("sfs", "(-1|)")
    assert code == 0
    payload = json.loads(out)
    assert payload["two_torsion"] is True
    assert payload["euler_number"] is None


def test_sfs_linking_form():
    code, out, _ = run_cli("sfs", "(+0|1/5)", "--linking-form")
    assert code == 0
    assert "linking form on Z/5:" in out
    code, _, err = run_cli("sfs", "(+1|2/1,2/-1)", "--linking-form")
    assert code == 3
    assert json.loads(err.splitlines()[-1])["error"] == "NotRationalHomologySphere"


def test_parse_error_shows_a_caret():
    code, _, err = run_cli("sfs", "(+0|2/1")
    assert code == 2
    assert err.startswith("parse error:")
    assert "^" in err


def test_obstruct_exit_codes():
    assert run_cli("obstruct", "--example", "prop4.2", "--r", "2")[0] == 10
    assert run_cli("obstruct", "--sfs", "(+0|2/1,3/1,5/1)")[0] == 0
    assert run_cli("obstruct", "--surgery", "whitehead")[0] == 0
    assert run_cli("obstruct", "--surgery", "unlink", "--param", "n=3", "--framing", "p=5")[0] == 0


def test_obstruct_json_report():
    code, out, _ = run_cli("obstruct", "--surgery", "borromean_framed", "--param", "p=3", "--format", "json")
    assert code == 10
    payload = json.loads(out)
    assert payload["verdict"] == "Obstructed"
    assert [rule["tag"] for rule in payload["fired_rules"]] == ["Thm1.3", "Prop4.4"]
    assert payload["descriptor"]["torsion"] == [3, 3, 3]


def test_obstruct_text_report_lists_fired_rules():
    code, out, _ = run_cli("obstruct", "--surgery", "borromean_unlink", "--param", "n=1")
    assert code == 10
    assert "fired Thm1.1" in out
    assert "fired Prop4.2" in out


def test_unknown_names_and_bad_parameters():
    code, _, err = run_cli("obstruct", "--surgery", "trefoil")
    assert code == 4
    assert json.loads(err.splitlines()[-1])["error"] == "UnknownCatalogName"
    assert run_cli("obstruct", "--surgery", "hopf", "--framing", "1,2,3")[0] == 4
    assert run_cli("obstruct", "--surgery", "hopf", "--param", "p3")[0] == 2


def test_invalid_configuration():
    code, _, err = run_cli("obstruct", "--surgery", "borromean", "--cap", "10")
    assert code == 2
    assert err.startswith("invalid input:")
    assert run_cli("obstruct", "--surgery", "borromean", "--sfs", "(+2|)")[0] == 2


def test_link_invariants_json():
    code, out, _ = run_cli("link", "borromean", "--mu", "123", "--mu", "12", "--degree", "--format", "json")
    assert code == 0
    payload = json.loads(out)
    assert payload["components"] == 3
    assert [entry["value"] for entry in payload["mu"]] == [1, 0]
    assert payload["milnor_degree"] == {"value": 3, "exact": True}


def test_link_text_report():
    code, out, _ = run_cli("link", "whitehead", "--mu", "1122", "--degree")
    assert code == 0
    assert "mu-bar(1122)" in out
    assert "milnor degree:  4" in out


def test_link_index_beyond_magnus_cap():
    code, _, err = run_cli("link", "borromean", "--mu", "1231231231")
    assert code == 3
    assert "cap" in json.loads(err.splitlines()[-1])["detail"]


def test_custom_link_file(tmp_path):
    path = tmp_path / "mine.json"
    path.write_text(
        json.dumps({"name": "mine", "linking_matrix": [[0, 1], [1, 0]], "longitudes": ["x2", "x1"]}),
        encoding="utf-8",
    )
    code, out, _ = run_cli("link", "--json", str(path), "--degree")
    assert code == 0
    assert "mine (2 components)" in out
    assert "milnor degree:  2" in out
    assert run_cli("obstruct", "--json", str(path), "--framing", "1,1")[0] == 0
    assert run_cli("link", "--json", str(tmp_path / "missing.json"))[0] == 2

    path.write_text(json.dumps({"linking_matrix": [[0]], "longitudes": 5}), encoding="utf-8")
    code, _, err = run_cli("link", "--json", str(path))
    assert code == 2
    assert err.startswith("invalid input:")


def test_examples_json():
    code, out, _ = run_cli("examples", "prop4.1", "--format", "json")
    assert code == 0
    payload = json.loads(out)
    assert len(payload["rows"]) == 3
    assert all(row["rules"] == ["Cor1.2"] for row in payload["rows"])
    assert all(report["distinct"] for report in payload["distinctions"])
    assert len(payload["distinctions"]) == 3


def test_examples_text():
    code, out, _ = run_cli("examples", "prop4.4", "--p", "3,5")
    assert code == 0
    assert "p=3 vs p=5: distinct (H_1)" in out
    assert run_cli("examples", "nope")[0] == 4


def test_schema_command():
    code, out, _ = run_cli("schema", "--model", "sfs")
    assert code == 0
    assert "fiber_order" in json.loads(out)["properties"]


def test_metrics_flag_writes_registry():
    code, _, err = run_cli("obstruct", "--sfs", "(+0|2/1,3/1,5/1)", "--metrics")
    assert code == 0
    assert "obstruction_verdict_total" in err
    assert "# TYPE obstruction_verdict_total counter" in err
    assert 'obstruction_verdict_total{verdict="ConsistentNecessaryChecksPassed"}' in err


def test_argument_parsers():
    assert parse_params(["p=3", " k = 2 "]) == {"p": "3", "k": "2"}
    with pytest.raises(ParseError):
        parse_params(["=3"])
    assert parse_multi_index("123") == (1, 2, 3)
    assert parse_multi_index("1,2,10") == (1, 2, 10)
    with pytest.raises(IndexOutOfRange):
        parse_multi_index("1a")
    assert parse_framing("0", 3) == (0, 0, 0)
    assert parse_framing("p=7", 2) == (7, 7)
    assert parse_framing("1,-2", 2) == (1, -2)
    with pytest.raises(BadParameter):
        parse_framing("1,2", 3)
    with pytest.raises(ParseError):
        parse_framing("p=x", 2)


@pytest.mark.parametrize("index", ["1a", "1,,2", "x"])
def test_malformed_multi_index_is_a_domain_error(index):
    code, _, err = run_cli("link", "borromean", "--mu", index)
    assert code == 3
    assert json.loads(err.splitlines()[-1])["error"] == "IndexOutOfRange"


def test_multi_index_outside_the_link_is_a_domain_error():
    code, _, err = run_cli("link", "borromean", "--mu", "14")
    assert code == 3
    assert json.loads(err.splitlines()[-1])["error"] == "IndexOutOfRange"


def test_logging_is_configured_once():
    run_cli("sfs", "(+0|1/5)", "--log-level", "INFO")
    code, _, err = run_cli("sfs", "(+0|1/5)", "--log-level", "INFO")
    assert code == 0
    assert len(logger.handlers) == 1
    assert sum('"cli_command"' in line for line in err.splitlines()) == 1
    _, _, quiet = run_cli("sfs", "(+0|1/5)")
    assert quiet == ""
