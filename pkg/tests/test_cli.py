import json
import subprocess
import sys

import jsonschema
import pytest

from partlogic.cli import main

from conftest import DATA

SCHEMAS = DATA / "schemas"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out.strip(), err.strip()


def d(name):
    return DATA / name


@pytest.mark.parametrize("name, count", [("pentagon.gd", "11"), ("l12.gd", "5"), ("single_context_3.gd", "3")])
def test_states_count_only(capsys, name, count):
    assert run(capsys, "states", d(name), "--count-only") == (0, count, "")


def test_partition_single_context(capsys):
    assert run(capsys, "partition", d("single_context_3.gd")) == (0, "{{1},{2},{3}}", "")


@pytest.mark.parametrize("diagram, expect", [("pentagon.gd", "eq2.json"), ("l12.gd", "l12_partition.json")])
def test_partition_expect(capsys, diagram, expect):
    code, out, _ = run(capsys, "partition", d(diagram), "--expect", d(expect))
    assert code == 0 and out.endswith(": yes")


def test_partition_expect_mismatch(capsys):
    code, out, _ = run(capsys, "partition", d("pentagon.gd"), "--expect", d("l12_partition.json"))
    assert code == 1 and out.endswith(": NO")


def test_bound_umbrella(capsys):
    code, out, _ = run(capsys, "bound", d("pentagon.gd"), d("functional_bubstairs.json"), "--umbrella")
    assert code == 0
    assert out.splitlines() == ["classical: 2", "quantum: 2.2360679774997898", "difference: 0.23606797749978981"]


def test_bound_zero(capsys, tmp_path):
    zero = tmp_path / "zero.json"
    zero.write_text("{}")
    code, out, _ = run(capsys, "bound", d("pentagon.gd"), zero, "--umbrella")
    assert out.splitlines()[:2] == ["classical: 0", "quantum: 0.0"]


def test_bound_with_rep_file(capsys, tmp_path):
    rep = tmp_path / "rep.json"
    code, text, _ = run(capsys, "umbrella")
    rep.write_text(text)
    code, out, _ = run(capsys, "bound", d("pentagon.gd"), d("functional_bubstairs.json"), "--rep", rep,
                       "--state", "0,1,0")
    assert code == 0 and out.splitlines()[1].startswith("quantum: 1.381966011250")


def test_exotic_weight_flow(capsys):
    assert run(capsys, "check-weight", d("pentagon.gd"), d("exotic_pentagon.w"))[:2] == (0, "admissible")
    code, out, _ = run(capsys, "hull-member", d("pentagon.gd"), d("exotic_pentagon.w"))
    assert out == "admissible, NOT in hull, violated inequality: 1*v1 + 1*v3 + 1*v5 + 1*v7 + 1*v9 <= 2 (value 5/2)"


def test_separable(capsys):
    assert run(capsys, "separable", d("pentagon.gd"))[1] == "separating"
    code, out, _ = run(capsys, "separable", d("pentagon_fig2f.gd"))
    assert code == 0 and out.startswith("not separating: ")


def test_implies(capsys):
    assert run(capsys, "implies", d("pentagon_inner3.gd"), "v6") == (0, "v2 v4 v8 v10", "")


def test_facets_l12(capsys):
    code, out, _ = run(capsys, "facets", d("l12.gd"))
    assert out.splitlines() == [
        "dimension 3, 5 vertices, 5 facets",
        "-1*v1 - 1*v2 + 1*v4 <= 0",
        "-1*v1 <= 0",
        "-1*v2 <= 0",
        "-1*v4 <= 0",
        "1*v1 + 1*v2 <= 1",
    ]


def test_urn_partition(capsys):
    code, out, _ = run(capsys, "urn-partition", d("urn_l12.urn"))
    assert out.splitlines() == ["orange: {{1},{2},{3,4}}", "blue: {{1},{2,4},{3}}"]


def test_urn_chsh_exact(capsys):
    assert run(capsys, "urn-chsh", d("urn_e6sq.urn")) == (0, "S exact: -2", "")


def test_urn_run_deterministic(capsys):
    a = run(capsys, "urn-run", d("urn_e6sq.urn"), "--seed", 9, "--draws", 50)
    b = run(capsys, "urn-run", d("urn_e6sq.urn"), "--seed", 9, "--draws", 50)
    assert a == b and a[0] == 0


def test_bell(capsys):
    assert run(capsys, "bell", 8) == (0, "4140", "")


@pytest.mark.parametrize(
    "argv",
    [
        ("bell", "15"),
        ("states", "/nonexistent.gd"),
        ("implies", "l12.gd", "nope"),
        ("urn-run", "urn_l12.urn"),
        ("urn-chsh", "urn_e6sq.urn", "--protocol", "sideways", "--draws", "5"),
        ("states", "pentagon.gd", "--max-nodes", "2"),
        ("hull-member", "pentagon.gd", "pentagon.gd"),
    ],
)
def test_domain_errors(capsys, argv):
    argv = [str(d(a)) if a.endswith((".gd", ".urn")) and not a.startswith("/") else a for a in argv]
    code, out, err = run(capsys, *argv)
    assert code == 1 and out == ""
    payload = json.loads(err)
    jsonschema.validate(payload, json.loads((SCHEMAS / "error.json").read_text()))


def test_vacuous_implication_error(capsys, tmp_path):
    src = tmp_path / "never.gd"
    src.write_text("a b c / c d e / e f a / a g / g c\n")
    code, _, err = run(capsys, "implies", src, "a")
    assert code == 1 and "vacuous implication" in json.loads(err)["message"]


def test_invalid_diagram(capsys, tmp_path):
    src = tmp_path / "bad.gd"
    src.write_text("a b c\na b d\n")
    code, out, _ = run(capsys, "validate", src)
    assert code == 1 and out.startswith("intertwining: ")
    code, _, err = run(capsys, "states", src)
    assert code == 1 and "intertwining violation" in err


@pytest.mark.parametrize("argv", [(), ("bogus",), ("bell",), ("bell", "x"), ("states",)])
def test_usage_errors(argv):
    with pytest.raises(SystemExit) as info:
        main(list(argv))
    assert info.value.code == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "partlogic", "bell", "4"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip() == "15"


SCHEMA_CASES = [
    ("validate", ["validate", "pentagon.gd"]),
    ("states", ["states", "l12.gd"]),
    ("states", ["states", "pentagon.gd", "--count-only"]),
    ("partition", ["partition", "pentagon.gd", "--expect", "eq2.json"]),
    ("separable", ["separable", "pentagon_fig2f.gd"]),
    ("implies", ["implies", "pentagon_inner3.gd", "v6"]),
    ("check-weight", ["check-weight", "pentagon.gd", "exotic_pentagon.w"]),
    ("hull-member", ["hull-member", "pentagon.gd", "exotic_pentagon.w"]),
    ("facets", ["facets", "pentagon.gd", "--lifted"]),
    ("bound", ["bound", "pentagon.gd", "functional_bubstairs.json", "--umbrella"]),
    ("umbrella", ["umbrella"]),
    ("check-rep", None),
    ("urn-partition", ["urn-partition", "urn_l12.urn", "--diagram"]),
    ("urn-run", ["urn-run", "urn_e6sq.urn", "--draws", "20", "--seed", "3"]),
    ("urn-chsh", ["urn-chsh", "urn_e6sq.urn", "--draws", "200"]),
    ("bell", ["bell", "5"]),
]


@pytest.mark.parametrize("schema, argv", SCHEMA_CASES, ids=[f"{s}-{i}" for i, (s, _) in enumerate(SCHEMA_CASES)])
def test_json_matches_schema(capsys, tmp_path, schema, argv):
    if argv is None:
        rep = tmp_path / "rep.json"
        code, text, _ = run(capsys, "umbrella")
        rep.write_text(text)
        argv = ["check-rep", "pentagon.gd", str(rep)]
    argv = [str(d(a)) if (d(a)).exists() and "." in a else a for a in argv]
    code, out, _ = run(capsys, *argv, "--json")
    assert code == 0
    jsonschema.validate(json.loads(out), json.loads((SCHEMAS / f"{schema}.json").read_text()))


def test_hull_member_json(capsys):
    _, out, _ = run(capsys, "hull-member", d("pentagon.gd"), d("exotic_pentagon.w"), "--json")
    data = json.loads(out)
    assert data["member"] is False and data["value"] == "5/2"
    assert data["separating"] == {"coefficients": {a: "1" for a in ("v1", "v3", "v5", "v7", "v9")}, "bound": "2"}


def test_umbrella_floats_have_17_digits(capsys):
    _, out, _ = run(capsys, "umbrella")
    data = json.loads(out)
    assert data["dimension"] == 3 and len(data["vectors"]) == 10
    # first component of every umbrella vector is 5**-0.25
    assert "0.66874030497642201" in out
