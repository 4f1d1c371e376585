import io
import json
import math
from pathlib import Path

import pytest

from treespec.cli import main, run_campaign, summarize

DATA = Path(__file__).resolve().parent.parent / "data"
PI2 = math.pi ** 2


def run(*argv):
    out = io.StringIO()
    code = main([str(a) for a in argv], out=out)
    return code, out.getvalue()


def values(text):
    return [float(line.split()[1]) for line in text.splitlines() if line.startswith("lambda_")]


def test_spectrum_star3():
    code, text = run("spectrum", DATA / "star3.graph", "--k", 5)
    assert code == 0
    assert [v / PI2 for v in values(text)] == pytest.approx([0, .25, .25, 1, 2.25], rel=1e-9, abs=1e-15)


def test_spectrum_closed_form_prints_exact():
    code, text = run("spectrum", DATA / "star3.graph", "--k", 5, "--method", "closed-form")
    assert code == 0
    assert "(1/4)·π²" in text and "(9/4)·π²" in text


def test_spectrum_oracle_path():
    code, text = run("spectrum", DATA / "path.graph", "--k", 3, "--method", "oracle")
    assert code == 0
    assert [v / PI2 for v in values(text)] == pytest.approx([0, 1, 4], rel=1e-3, abs=1e-12)


def test_spectrum_loop():
    code, text = run("spectrum", DATA / "loop.graph", "--k", 2, "--format", "json")
    assert code == 0
    doc = json.loads(text)
    assert doc["values"][1] == pytest.approx(4 * PI2, rel=1e-10)


def test_spectrum_audit_annotations():
    code, text = run("spectrum", DATA / "star3.graph", "--k", 5, "--audit")
    assert code == 0
    assert "# audit" in text and "(certified)" in text


def test_closed_form_inapplicable():
    code, _ = run("spectrum", DATA / "star_1_1_sqrt2.graph", "--method", "closed-form")
    assert code == 1


def test_parse_error(tmp_path):
    bad = tmp_path / "bad.graph"
    bad.write_text('{"vertices": ["a", "b"], "edges": [{"from": "a", "to": "b", "length": {"rat": [1, 0]}}]}')
    assert run("spectrum", bad)[0] == 1
    assert run("spectrum", tmp_path / "missing.graph")[0] == 1


def test_usage_errors_exit_one():
    with pytest.raises(SystemExit) as exc:
        main(["spectrum"])
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        main(["spectrum", str(DATA / "star3.graph"), "--tol", "-1"])
    assert exc.value.code == 1


def test_bounds_csv_star3():
    code, text = run("bounds", DATA / "star3.graph", "--k", 3)
    assert code == 0
    rows = [line.split(",") for line in text.splitlines()]
    head = rows[0]
    first = dict(zip(head, rows[1]))
    assert first["eq_avg"] == "true"


def test_bounds_sqrt2_star_json():
    code, text = run("bounds", DATA / "star_1_1_sqrt2.graph", "--k", 5, "--format", "json")
    assert code == 0
    rows = json.loads(text)
    assert all(r["strict_expected"] for r in rows)
    assert not any(r["eq_dirichlet"] for r in rows)


def test_bounds_loop_not_applicable():
    code, text = run("bounds", DATA / "loop.graph", "--k", 2, "--format", "json")
    rows = json.loads(text)
    assert rows[0]["bound_avg"] is None and rows[0]["sat_kkmm"] is True


def test_verify_single_edge():
    code, text = run("verify", "--trials", 1, "--max-edges", 1)
    assert code == 0
    assert "failures: 0" in text


def test_verify_deterministic():
    a = run("verify", "--trials", 6, "--max-edges", 6, "--seed", 3, "--format", "json")
    b = run("verify", "--trials", 6, "--max-edges", 6, "--seed", 3, "--format", "json")
    assert a == b
    assert json.loads(a[1])["failures"] == 0


def test_campaign_order_independent_of_workers():
    serial = run_campaign(5, 4, 5, max_k=4, workers=1)
    pooled = run_campaign(5, 4, 5, max_k=4, workers=2)
    assert summarize(serial) == summarize(pooled)
    assert [r["trial"] for r in pooled] == [0, 1, 2, 3]


def test_example_star_limit():
    code, text = run("example", "star-limit", "--n", "2,4,8,16,32,64")
    assert code == 0
    rows = [list(map(float, l.split())) for l in text.splitlines() if not l.startswith("#")]
    gaps = [r[3] for r in rows]
    assert all(0 < r[1] < 1 for r in rows)
    assert all(a > b for a, b in zip(gaps, gaps[1:]))
    for r in rows:
        assert r[2] == pytest.approx(r[1], rel=1e-8)


def test_example_star_limit_odd():
    assert run("example", "star-limit", "--n", "2,3")[0] == 1


def test_example_loop():
    code, text = run("example", "loop", "--length", 6.283185307179586)
    fields = dict(l.split() for l in text.splitlines() if not l.startswith("#"))
    assert float(fields["lambda_2"]) == pytest.approx(1.0)
    assert float(fields["bound_lmax"]) == pytest.approx(0.25)
    assert fields["exceeds_bound"] == "true"


def test_example_gd_equality():
    code, text = run("example", "gd-equality", "--graph", DATA / "path_half_threehalf.graph")
    assert code == 0
    fields = {l.split()[0]: l.split()[1] for l in text.splitlines()}
    assert fields["x"] == "2" and fields["k"] == "4"
    assert float(fields["lambda_5"]) == pytest.approx(float(fields["lambda_4^D"]), rel=1e-9)


def test_example_gd_equality_needs_graph():
    assert run("example", "gd-equality")[0] == 1
