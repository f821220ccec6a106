import json
from fractions import Fraction

from sndp.cli import main
from sndp.instances import parse_instance


TRIANGLE = json.dumps({
    "vertices": ["a", "b", "c"],
    "edges": [
        {"u": "a", "v": "b", "cost": 1},
        {"u": "b", "v": "c", "cost": 1},
        {"u": "a", "v": "c", "cost": 1},
    ],
    "requirements": [
        {"u": "a", "v": "b", "r": 1},
        {"u": "b", "v": "c", "r": 1},
        {"u": "a", "v": "c", "r": 1},
    ],
})

WIDE = json.dumps({
    "vertices": ["a", "b", "c", "d", "e"],
    "edges": [
        {"u": "a", "v": "b", "cost": 2},
        {"u": "b", "v": "c", "cost": 1},
        {"u": "c", "v": "d", "cost": 3},
        {"u": "d", "v": "e", "cost": 1},
        {"u": "e", "v": "a", "cost": 2},
        {"u": "a", "v": "c", "cost": 2},
        {"u": "b", "v": "d", "cost": 1},
    ],
    "requirements": [
        {"u": "a", "v": "d", "r": 2},
        {"u": "b", "v": "e", "r": 1},
    ],
})


def run_solve(tmp_path, text, *flags):
    inst = tmp_path / "inst.json"
    inst.write_text(text)
    out = tmp_path / "report.json"
    code = main(["solve", str(inst), "--epsilon", "0.25",
                 "--out", str(out), *flags])
    assert code == 0
    return json.loads(out.read_text())


def test_solve_report_shape(tmp_path):
    doc = run_solve(tmp_path, TRIANGLE, "--seed", "7")
    assert doc["command"] == "solve"
    assert doc["instance"] == {
        "vertices": 3, "edges": 3, "requirement_pairs": 3,
        "max_requirement": 1,
    }
    assert doc["parameters"]["epsilon"] == 0.25
    assert doc["parameters"]["seed"] == 7
    assert "jobs" not in doc["parameters"]
    sol = doc["solution"]
    assert sol["cost"] == sum(
        p["cost"] * p["copies"] for p in sol["purchases"]
    )
    assert sol["cost"] == 3
    assert sol["certified_ratio"] == sol["cost"] / sol["lower_bound"]
    assert len(doc["audit"]) == sol["iterations"]
    assert "seconds" in doc["timing"]


def test_solve_rational_certificates(tmp_path):
    doc = run_solve(tmp_path, WIDE, "--rational")
    bound = Fraction(doc["certificates"]["exact_lower_bound"])
    assert 0 < bound <= doc["solution"]["cost"]


def test_reports_identical_across_jobs(tmp_path):
    one = run_solve(tmp_path, WIDE)
    three = run_solve(tmp_path, WIDE, "--jobs", "3")
    one.pop("timing")
    three.pop("timing")
    assert one == three


def test_lp_only_document(tmp_path):
    inst = tmp_path / "inst.json"
    inst.write_text(TRIANGLE)
    out = tmp_path / "lp.json"
    assert main(["lp-only", str(inst), "--epsilon", "0.5",
                 "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["command"] == "lp-only"
    lp = doc["lp"]
    assert sorted(lp["x"]) == ["0", "1", "2"]
    assert lp["preset"] == {}
    # Unpinned fractional optimum of the triangle is 3/2.
    assert lp["cost"] >= 1.5 - 1e-9
    assert lp["cost"] <= 1.5 * 1.3
    assert lp["dual_bound"] <= 1.5 + 1e-9
    assert lp["cost"] >= lp["dual_bound"]
    assert doc["stats"]["gh_trees"] > 0


def test_lp_only_preset_covers_everything(tmp_path):
    inst = tmp_path / "inst.json"
    inst.write_text(json.dumps({
        "vertices": ["a", "b"],
        "edges": [{"u": "a", "v": "b", "cost": 0}],
        "requirements": [{"u": "a", "v": "b", "r": 2}],
    }))
    out = tmp_path / "lp.json"
    assert main(["lp-only", str(inst), "--epsilon", "0.5",
                 "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["lp"] == {"cost": 0, "dual_bound": 0, "x": {},
                         "preset": {"0": 2}}


def test_gen_roundtrip_and_determinism(tmp_path):
    args = ["gen", "--vertices", "5", "--density", "0.4",
            "--rmax", "2", "--seed", "9"]
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    graph, demand, meta = parse_instance(a.read_text())
    assert graph.vertex_count == 5
    assert meta["seed"] == 9


def test_oracle_check_battery(tmp_path, capsys):
    assert main(["oracle-check", "--trials", "5",
                 "--max-vertices", "5", "--seed", "1"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 6
    assert all(line.startswith("PASS") for line in lines)


def test_exit_codes(tmp_path, capsys):
    inst = tmp_path / "inst.json"
    inst.write_text(TRIANGLE)
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["solve", str(tmp_path / "missing.json"),
                 "--epsilon", "0.5"]) == 1
    assert main(["solve", str(bad), "--epsilon", "0.5"]) == 1
    assert main(["solve", str(inst), "--epsilon", "-1",
                 "--out", str(tmp_path / "r.json")]) == 1
    assert main(["solve", str(inst), "--epsilon", "0.5",
                 "--strategy", "quantum"]) == 1
    assert main(["solve"]) == 1
    assert main([]) == 1
    assert main(["--help"]) == 0
    capsys.readouterr()
