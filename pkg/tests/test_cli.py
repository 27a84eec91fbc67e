import json
from importlib import resources

import pytest

from hodgeform.cli import main, parse_zoo_identifier


def run(args):
    return main([str(a) for a in args])


def summaries_dir():
    return resources.files("hodgeform.data").joinpath("summaries")


# ---------------------------------------------------------------------------
# generate


def test_generate_sphere_three_has_five_facets(tmp_path):
    out = tmp_path / "s3.json"
    assert run(["generate", "sphere:3", "-o", out]) == 0
    payload = json.loads(out.read_text())
    assert len(payload["facets"]) == 5


def test_generate_torus_two(tmp_path):
    out = tmp_path / "t2.json"
    assert run(["generate", "torus:2", "-o", out]) == 0
    assert len(json.loads(out.read_text())["facets"]) == 18


def test_generate_surface_two_records_negative_euler(tmp_path):
    out = tmp_path / "g2.json"
    assert run(["generate", "surface:2", "-o", out]) == 0
    from hodgeform.complexes import load_complex
    from hodgeform.homology import euler_characteristic

    assert euler_characteristic(load_complex(out)) == -2


def test_generate_unknown_identifier(tmp_path):
    assert run(["generate", "octahedron:1", "-o", tmp_path / "x.json"]) == 2


def test_generate_nested_expressions(tmp_path):
    out = tmp_path / "prod.json"
    assert run(["generate", "product:sphere:1,sphere:1", "-o", out]) == 0
    assert len(json.loads(out.read_text())["facets"]) == 18


def test_parse_zoo_identifier_file_path(tmp_path):
    out = tmp_path / "c.json"
    run(["generate", "sphere:2", "-o", out])
    K = parse_zoo_identifier(str(out))
    assert K.f_vector == (4, 6, 4)


# ---------------------------------------------------------------------------
# analyze


def test_analyze_full_pipeline(tmp_path):
    complex_path = tmp_path / "t2.json"
    run(["generate", "torus:2", "-o", complex_path])
    report_path = tmp_path / "report.json"
    assert run(["analyze", complex_path, "--all", "-o", report_path]) == 0
    report = json.loads(report_path.read_text())
    assert report["homology"]["betti"] == [1, 2, 1]
    assert report["formality"]["aggregate"] >= 0.0
    assert report["obstructions"]["verdict"] == "passes-elementary-tests"
    assert report["hodge"]["intersection"]["skew_rank"] == 2


def test_analyze_obstructed_exit_code(tmp_path):
    complex_path = tmp_path / "g2.json"
    run(["generate", "surface:2", "-o", complex_path])
    report_path = tmp_path / "report.json"
    assert run(["analyze", complex_path, "--obstructions", "-o", report_path]) == 1
    report = json.loads(report_path.read_text())
    fired = [f["rule"] for f in report["obstructions"]["fired"]]
    assert fired == ["R1", "R5"]


def test_analyze_formality_only_on_sphere(tmp_path):
    complex_path = tmp_path / "s2.json"
    run(["generate", "sphere:2", "-o", complex_path])
    report_path = tmp_path / "report.json"
    assert run(["analyze", complex_path, "--formality", "-o", report_path]) == 0
    report = json.loads(report_path.read_text())
    assert report["formality"]["aggregate"] == 0.0
    assert "homology" not in report


def test_analyze_reports_are_byte_stable(tmp_path):
    complex_path = tmp_path / "t2.json"
    run(["generate", "torus:2", "-o", complex_path])
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run(["analyze", complex_path, "--all", "-o", a])
    run(["analyze", complex_path, "--all", "-o", b])
    ra, rb = json.loads(a.read_text()), json.loads(b.read_text())
    ra.pop("timings"), rb.pop("timings")
    assert json.dumps(ra, sort_keys=True) == json.dumps(rb, sort_keys=True)


def test_analyze_with_weights_file(tmp_path):
    complex_path = tmp_path / "t2.json"
    run(["generate", "torus:2", "-o", complex_path])
    weights_path = tmp_path / "w.json"
    weights_path.write_text(
        json.dumps({"weights": [[2.0] * 9, [0.5] * 27, [1.0] * 18]})
    )
    report_path = tmp_path / "report.json"
    assert (
        run(
            [
                "analyze",
                complex_path,
                "--weights",
                weights_path,
                "--betti",
                "--hodge",
                "-o",
                report_path,
            ]
        )
        == 0
    )
    report = json.loads(report_path.read_text())
    dims = [d["dimension"] for d in report["hodge"]["degrees"]]
    assert dims == [1, 2, 1]


def test_analyze_stage_error_exit_code(tmp_path, rp2):
    # obstruction stage needs an orientable complex; the failure lands in the
    # report and flips the exit code to the numerical-failure value
    from hodgeform.complexes import save_complex

    complex_path = tmp_path / "rp2.json"
    save_complex(rp2, complex_path)
    report_path = tmp_path / "report.json"
    assert run(["analyze", complex_path, "--obstructions", "-o", report_path]) == 3
    report = json.loads(report_path.read_text())
    assert "obstructions" in report["errors"]


# ---------------------------------------------------------------------------
# check


def test_check_k3_summary(tmp_path):
    report_path = tmp_path / "k3.json"
    code = run(["check", summaries_dir() / "k3.json", "-o", report_path])
    assert code == 1
    report = json.loads(report_path.read_text())
    assert [f["rule"] for f in report["fired"]] == ["R1", "R2", "R11"]


def test_check_passing_summary_with_model(tmp_path):
    report_path = tmp_path / "out.json"
    code = run(["check", summaries_dir() / "s3xs1.json", "-o", report_path])
    assert code == 0
    assert json.loads(report_path.read_text())["model"] == "S^3 x S^1"


def test_check_first_betti_gap(tmp_path):
    summary = tmp_path / "gap.json"
    summary.write_text(
        json.dumps(
            {
                "name": "gap",
                "dimension": 4,
                "betti": [1, 3, 4, 3, 1],
                "orientable": True,
                "b_plus": 2,
                "b_minus": 2,
            }
        )
    )
    report_path = tmp_path / "out.json"
    assert run(["check", summary, "-o", report_path]) == 1
    fired = [f["rule"] for f in json.loads(report_path.read_text())["fired"]]
    assert fired == ["R3", "R7"]


def test_check_rejects_schema_violation(tmp_path):
    summary = tmp_path / "bad.json"
    summary.write_text(json.dumps({"dimension": 4}))
    assert run(["check", summary]) == 2


# ---------------------------------------------------------------------------
# search


def test_search_writes_deterministic_trace(tmp_path):
    complex_path = tmp_path / "t2.json"
    run(["generate", "torus:2", "-o", complex_path])
    out_one = tmp_path / "w1.json"
    out_two = tmp_path / "w2.json"
    args = ["--init", "random", "--seed", "3", "--max-iterations", "1"]
    assert (
        run(["search", complex_path, *args, "-o", out_one, "--trace", tmp_path / "t1.csv"])
        == 0
    )
    assert (
        run(["search", complex_path, *args, "-o", out_two, "--trace", tmp_path / "t2.csv"])
        == 0
    )
    assert (tmp_path / "t1.csv").read_bytes() == (tmp_path / "t2.csv").read_bytes()
    assert out_one.read_bytes() == out_two.read_bytes()


def test_search_on_sphere_trace_is_zero(tmp_path):
    complex_path = tmp_path / "s4.json"
    run(["generate", "sphere:4", "-o", complex_path])
    out = tmp_path / "w.json"
    trace = tmp_path / "trace.csv"
    assert run(["search", complex_path, "-o", out, "--trace", trace]) == 0
    lines = trace.read_text().strip().splitlines()
    assert lines == ["iteration,aggregate", "0,0.0"]


def test_search_weights_file_feeds_analyze(tmp_path):
    complex_path = tmp_path / "t2.json"
    run(["generate", "torus:2", "-o", complex_path])
    weights_path = tmp_path / "w.json"
    run(
        [
            "search",
            complex_path,
            "--max-iterations",
            "1",
            "-o",
            weights_path,
            "--trace",
            tmp_path / "t.csv",
        ]
    )
    report_path = tmp_path / "r.json"
    assert (
        run(
            [
                "analyze",
                complex_path,
                "--weights",
                weights_path,
                "--hodge",
                "-o",
                report_path,
            ]
        )
        == 0
    )


def test_invalid_seed_is_usage_error(tmp_path, capsys):
    complex_path = tmp_path / "t2.json"
    run(["generate", "torus:2", "-o", complex_path])
    with pytest.raises(SystemExit) as exc:
        run(["search", complex_path, "--seed", "pi", "-o", tmp_path / "w.json"])
    assert exc.value.code == 2
