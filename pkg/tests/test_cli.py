import json
import shutil

import pytest
from click.testing import CliRunner

from errors import PresentationFormatError, SpaceFormatError
from hall_lie import witt_rank
from linalg import AbelianInvariants
from main import cli, inputs_digest, load_space, locate, parse_presentation, parse_space, run
from models import Command
from simplicial import reduced_homology, validate


@pytest.fixture
def runner():
    return CliRunner()


def last_json(result):
    return json.loads(result.stdout.strip().splitlines()[-1])


def test_witt_report(runner):
    result = runner.invoke(cli, ["witt", "--generators", "2", "--class", "3"])
    assert result.exit_code == 0
    report = last_json(result)
    assert report["result"] == 2
    assert report["schema"] == "kantower.report/1"
    assert report["error"] is None


def test_homology_of_sphere_file(runner, fixture_dir):
    result = runner.invoke(cli, ["homology", str(fixture_dir / "s2.json"), "--degree", "2"])
    assert result.exit_code == 0
    assert last_json(result)["result"] == {"rank": 1, "torsion": []}


def test_malformed_file_reports_position(runner, fixture_dir):
    result = runner.invoke(cli, ["homology", str(fixture_dir / "malformed.json"), "--degree", "1"])
    assert result.exit_code == 2
    error = last_json(result)["error"]
    assert error["type"] == "SpaceFormatError"
    assert (error["code"], error["line"], error["column"]) == (1, 5, 5)


def test_cross_effect_ranks_are_parsed(runner):
    result = runner.invoke(cli, ["cross-effect", "--class", "2", "--ranks", "1,1,1"])
    assert result.exit_code == 0
    assert last_json(result)["result"]["ranks"] == [3, 3, 0]
    bad = runner.invoke(cli, ["cross-effect", "--class", "2", "--ranks", "1,x"])
    assert bad.exit_code != 0


def test_loop_group_and_tower_commands(runner, fixture_dir):
    result = runner.invoke(cli, ["loop-group", str(fixture_dir / "s1.json"), "--degree", "0"])
    assert last_json(result)["result"] == {"degree": 0, "faces": [], "generators": ["s1"]}
    result = runner.invoke(cli, ["tower", "pi0", str(fixture_dir / "s1.json"), "--class", "2"])
    assert result.exit_code == 0
    layers = last_json(result)["result"]["layers"]
    assert layers == [{"rank": 1, "torsion": []}, {"rank": 0, "torsion": []}]


def test_nilq_heisenberg(runner, fixture_dir):
    result = runner.invoke(cli, ["nilq", str(fixture_dir / "heisenberg.json"), "--class", "3"])
    assert result.exit_code == 0
    assert [layer["rank"] for layer in last_json(result)["result"]["layers"]] == [2, 1, 0]


def test_bad_options_are_validation_errors(runner, fixture_dir):
    result = runner.invoke(cli, ["homology", str(fixture_dir / "s2.json"), "--degree", "-1"])
    assert result.exit_code == 2
    assert last_json(result)["error"]["type"] == "InvalidArgument"


def test_missing_input_file(runner, tmp_path):
    result = runner.invoke(cli, ["validate", str(tmp_path / "absent.json")])
    assert result.exit_code == 2
    assert last_json(result)["error"]["type"] == "InvalidArgument"


def test_recorded_cases_pass(runner, fixture_dir):
    result = runner.invoke(cli, ["fixtures", "--directory", str(fixture_dir)])
    summary = last_json(result)
    assert summary["failures"] == []
    assert summary["passed"]
    assert result.exit_code == 0


def test_perturbed_case_is_named(runner, fixture_dir, tmp_path):
    target = tmp_path / "fixtures"
    shutil.copytree(fixture_dir, target)
    cases = json.loads((target / "cases.json").read_text())
    for case in cases:
        if case["name"] == "witt-2-3":
            case["report"]["result"] = 3
    (target / "cases.json").write_text(json.dumps(cases))
    result = runner.invoke(cli, ["fixtures", "--directory", str(target)])
    assert result.exit_code == 2
    assert last_json(result)["failures"] == ["witt-2-3"]


def test_fixture_run_surfaces_caps(runner, fixture_dir, monkeypatch):
    monkeypatch.setenv("KANTOWER_MAX_CLASS", "1")
    result = runner.invoke(cli, ["fixtures", "--directory", str(fixture_dir)])
    assert result.exit_code == 3
    failures = last_json(result)["failures"]
    assert "collect-ba" in failures
    assert "hall-basis-2-3" not in failures


def test_reports_are_deterministic(runner, fixture_dir):
    args = ["layer-homotopy", str(fixture_dir / "wedge2.json"), "--class", "2", "--degree", "0"]
    first, second = runner.invoke(cli, args), runner.invoke(cli, args)
    assert last_json(first) == last_json(second)
    assert first.stdout.strip().splitlines()[-1] == second.stdout.strip().splitlines()[-1]


def test_space_output_reads_back(runner):
    result = runner.invoke(cli, ["space", "sphere", "--param", "2"])
    assert result.exit_code == 0
    X = parse_space(json.dumps(last_json(result)["result"]).encode())
    assert validate(X).ok
    assert reduced_homology(X, 2) == AbelianInvariants(1)


@pytest.mark.parametrize(
    "name,code",
    [("malformed.json", 1), ("dup_id.json", 2), ("bad_degeneracy.json", 2), ("bad_face.json", 3)],
)
def test_parse_space_error_codes(fixture_dir, name, code):
    with pytest.raises(SpaceFormatError) as info:
        parse_space((fixture_dir / name).read_bytes())
    assert info.value.code == code


def test_load_space_keeps_identity_violations_for_validate(fixture_dir):
    X = load_space((fixture_dir / "bad_face.json").read_bytes())
    assert [v.identity for v in validate(X).violations] == ["d0d1=d0d0"]


def test_non_utf8_input_is_malformed():
    with pytest.raises(SpaceFormatError) as info:
        load_space(b"\xff\xfe")
    assert info.value.code == 1


def test_presentation_schema_errors():
    with pytest.raises(PresentationFormatError):
        parse_presentation(b'{"generators": ["a"], "extra": 1}')
    with pytest.raises(PresentationFormatError):
        parse_presentation(b"{")


def test_digest_depends_on_options_and_contents():
    base = inputs_digest("witt", {"generators": 2, "class": 3}, [])
    assert base == inputs_digest("witt", {"class": 3, "generators": 2}, [])
    assert base != inputs_digest("witt", {"generators": 2, "class": 4}, [])
    assert inputs_digest("validate", {}, [b"a"]) != inputs_digest("validate", {}, [b"b"])


def test_run_rejects_wrong_input_count():
    report, code = run(Command(verb="homology", options={"degree": 1}))
    assert code == 2
    assert report.error["type"] == "InvalidArgument"


def test_hall_basis_is_capped_by_size_not_class(runner):
    result = runner.invoke(cli, ["hall-basis", "--generators", "2", "--class", "5"])
    assert result.exit_code == 0
    assert len(last_json(result)["result"]) == witt_rank(2, 5) == 6
    result = runner.invoke(cli, ["hall-basis", "--generators", "1", "--class", "40"])
    assert (result.exit_code, last_json(result)["result"]) == (0, [])
    result = runner.invoke(cli, ["hall-basis", "--generators", "20", "--class", "3"])
    assert result.exit_code == 3
    assert last_json(result)["error"]["type"] == "ResourceCapExceeded"


@pytest.mark.parametrize(
    "name,identity", [("unknown_face.json", "d0"), ("dup_id.json", "unique-id"), ("bad_degeneracy.json", "d0")]
)
def test_validate_reports_structural_violations(runner, fixture_dir, name, identity):
    result = runner.invoke(cli, ["validate", str(fixture_dir / name)])
    assert result.exit_code == 2
    report = last_json(result)
    assert report["error"] is None
    assert report["result"]["ok"] is False
    assert report["result"]["violations"][0]["identity"] == identity


def test_schema_errors_carry_position_and_rule():
    data = (
        b'{"name": "x",\n'
        b' "simplices": [[{"id": "*", "faces": []}],\n'
        b'  [{"id": "a", "faces": [{"degeneracies": []}, {"base": "*"}]}]]}'
    )
    with pytest.raises(SpaceFormatError) as info:
        parse_space(data)
    error = info.value.to_dict()
    assert (error["code"], error["line"], error["column"], error["rule"]) == (2, 3, 26, "missing")
    assert error["message"].startswith("simplices.1.0.faces.0.base")


def test_structural_errors_point_at_the_offending_face(fixture_dir):
    with pytest.raises(SpaceFormatError) as info:
        parse_space((fixture_dir / "unknown_face.json").read_bytes())
    assert (info.value.line, info.value.column, info.value.rule) == (7, 9, "d0")
    with pytest.raises(SpaceFormatError) as info:
        parse_space((fixture_dir / "bad_face.json").read_bytes())
    assert (info.value.code, info.value.line, info.value.rule) == (3, 24, "d0d1=d0d0")


def test_locate_walks_objects_and_arrays():
    text = '{"a": [1, {"b": [true, "x"]}],\n "c": {}}'
    assert locate(text, ["a", 1, "b", 1]) == (1, 24)
    assert locate(text, ["c"]) == (2, 7)
    assert locate(text, ["c", "missing"]) == (2, 7)
    assert locate(text, []) == (1, 1)


def test_error_paths_have_recorded_cases(fixture_dir):
    cases = json.loads((fixture_dir / "cases.json").read_text())
    errors = {case["report"]["error"]["type"] for case in cases if case["report"]["error"]}
    assert {"SpaceFormatError", "PresentationFormatError", "ResourceCapExceeded"} <= errors
    codes = {case["report"]["error"].get("code") for case in cases if case["report"]["error"]}
    assert {1, 2, 3} <= codes
