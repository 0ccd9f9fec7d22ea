import csv
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from udisc import io as uio
from udisc.cli import main
from udisc.mixed import MixedFamily
from udisc.pure import StateFamily


def write_json(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


def state_file(tmp_path, states, name="family.json"):
    fam = StateFamily(np.asarray(states, dtype=complex))
    return write_json(tmp_path / name, uio.state_family_to_json(fam))


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_discriminate_orthonormal(tmp_path, capsys):
    path = state_file(tmp_path, np.eye(3))
    code, out, _ = run(["discriminate", "--input", path], capsys)
    data = json.loads(out)
    assert code == 0
    assert data["verdict"]["level"] == "perfect"
    assert data["verdict"]["q_max"] == 1.0
    assert data["confusion"]["q_uniform"] == pytest.approx(1.0)


def test_discriminate_duplicate(tmp_path, capsys):
    path = state_file(tmp_path, [[1, 0], [0.6, 0.8], [1, 0]])
    code, out, _ = run(["discriminate", "--input", path], capsys)
    assert code == 2
    assert json.loads(out)["verdict"]["level"] == "none"


def test_discriminate_coherent_overlap_pair(tmp_path, capsys):
    g = math.exp(-0.5)
    path = state_file(tmp_path, [[1, 0], [g, math.sqrt(1 - g * g)]])
    out_path = tmp_path / "report.json"
    code, _, _ = run(["discriminate", "--input", path, "--output", str(out_path)], capsys)
    data = json.loads(out_path.read_text())
    assert code == 0
    assert data["verdict"]["q_max"] == pytest.approx(0.393469, abs=1e-6)
    assert data["verdict"]["q_max"] == pytest.approx(1 - g, abs=1e-12)


def test_discriminate_csv(tmp_path, capsys):
    path = state_file(tmp_path, [[1, 0], [0.6, 0.8]])
    code, out, _ = run(["discriminate", "--input", path, "--format", "csv"], capsys)
    assert code == 0
    head, table = out.split("\n\n")
    rows = list(csv.reader(table.splitlines()))
    assert rows[0] == ["outcome", "1", "2"]
    assert [r[0] for r in rows[1:]] == ["1", "2", "?"]
    assert float(rows[1][1]) == pytest.approx(0.4)


@pytest.mark.parametrize(
    "payload, field",
    [
        ({"labels": ["a"], "states": [[[1, 0]]]}, "dim"),
        ({"dim": 2, "states": [[[1, 0], [0, 0]]], "labels": ["a", "b"]}, "labels"),
        ({"dim": 2, "states": [[[1, 0]]]}, "states[0]"),
        ({"dim": 2, "states": [[[1, 0], ["x", 0]]]}, "states[0]"),
        ({"dim": 1, "states": "nope"}, "states"),
    ],
)
def test_discriminate_malformed(tmp_path, capsys, payload, field):
    path = write_json(tmp_path / "bad.json", payload)
    code, _, err = run(["discriminate", "--input", path], capsys)
    assert code == 1
    assert field in err


def test_invalid_json_text(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    code, _, err = run(["discriminate", "--input", str(path)], capsys)
    assert code == 1 and "invalid JSON" in err


def test_loader_renormalizes_with_warning(tmp_path):
    path = write_json(tmp_path / "f.json", {"dim": 2, "states": [[[2, 0], [0, 0]], [[0, 0], [1, 0]]]})
    with pytest.warns(UserWarning, match="renormalized"):
        fam = uio.load_state_family(path)
    np.testing.assert_allclose(fam.states, np.eye(2))


def mixed_file(tmp_path, rhos):
    payload = {"dim": len(rhos[0]), "rhos": uio.complex_to_json(np.asarray(rhos, dtype=complex))}
    return write_json(tmp_path / "mixed.json", payload)


def test_mixed_orthogonal(tmp_path, capsys):
    path = mixed_file(tmp_path, [np.diag([1.0, 0]), np.diag([0, 1.0])])
    code, out, _ = run(["mixed", "--input", path], capsys)
    data = json.loads(out)
    assert code == 0 and data["verdict"]["distinguishable"]
    assert data["confusion"]["distinguishes"]


def test_mixed_not_distinguishable(tmp_path, capsys):
    path = mixed_file(tmp_path, [np.eye(2) / 2, np.diag([1.0, 0])])
    code, out, _ = run(["mixed", "--input", path, "--format", "csv"], capsys)
    assert code == 2
    rows = dict(csv.reader(out.splitlines()))
    assert rows["failing_index"] == "2"


def test_mixed_bad_trace(tmp_path, capsys):
    path = mixed_file(tmp_path, [np.diag([0.9, 0])])
    code, _, err = run(["mixed", "--input", path], capsys)
    assert code == 1
    assert "rhos[0]" in err and "trace" in err


def test_mixed_round_trip_schema():
    fam = MixedFamily([np.diag([0.25, 0.75])], ("x",))
    again = uio.parse_mixed_family(uio.mixed_family_to_json(fam))
    np.testing.assert_array_equal(again.rhos, fam.rhos)
    assert again.labels == ("x",)


def scan_args(area, n_max=5):
    s = math.sqrt(area)
    return ["vnl-scan", "--omega1", f"{s!r},0", "--omega2", f"0,{s!r}", "--n-max", str(n_max)]


def test_vnl_scan_above_threshold(capsys):
    code, out, _ = run(scan_args(2 * math.pi), capsys)
    rows = list(csv.DictReader(out.splitlines()))
    assert code == 0
    assert list(rows[0]) == list(uio.SCAN_COLUMNS)
    q = [float(r["q_n"]) for r in rows]
    assert len(rows) == 5 and all(x > 0 for x in q)
    assert all(b <= a for a, b in zip(q, q[1:]))


def test_vnl_scan_below_threshold(capsys):
    code, out, _ = run(scan_args(0.5 * math.pi), capsys)
    rows = list(csv.DictReader(out.splitlines()))
    assert code == 0
    assert rows[-1]["collapsed_flag"] == "true"
    assert rows[-1]["closed_form_bound"] == ""


def test_vnl_scan_usage_errors(tmp_path, capsys):
    assert run(scan_args(2 * math.pi, n_max=0), capsys)[0] == 1
    assert run(scan_args(2 * math.pi, n_max=26), capsys)[0] == 1
    assert run(["vnl-scan", "--omega1", "1,0", "--omega2", "1,0", "--n-max", "2"], capsys)[0] == 1
    assert run(["vnl-scan", "--omega1", "bogus", "--omega2", "0,1", "--n-max", "2"], capsys)[0] == 1
    assert run(["frobnicate"], capsys)[0] == 1


def test_vnl_scan_from_file(tmp_path, capsys):
    path = write_json(tmp_path / "lattice.json", {"omega1": [2, 0], "omega2": [0, 2], "n_max": 2})
    code, out, _ = run(["vnl-scan", "--input", path, "--format", "json"], capsys)
    data = json.loads(out)
    assert code == 0 and len(data["rows"]) == 2
    assert data["rows"][1]["q_n"] == pytest.approx(0.6476824728769052, abs=1e-12)


def test_vnl_scan_deterministic(tmp_path, capsys):
    outputs = []
    for k in range(2):
        path = tmp_path / f"scan{k}.csv"
        assert main([*scan_args(2 * math.pi), "--output", str(path)]) == 0
        outputs.append(path.read_bytes())
    assert outputs[0] == outputs[1]


def test_csv_float_format():
    assert uio.fmt(1 / 3) == "0.333333333333"
    assert uio.fmt(2.5e-7) == "2.5e-07"
    assert uio.fmt(True) == "true"
    assert uio.fmt(None) == ""


def test_bounds(capsys):
    code, out, _ = run(["bounds", "--omega1", "10,0", "--omega2", "0,10"], capsys)
    data = json.loads(out)
    assert code == 0
    assert data["closed_form_bound"] == pytest.approx(2 - (1 + 2 * math.sqrt(math.pi) / 10) ** 2)
    code, out, _ = run(["bounds", "--omega1", "1,0", "--omega2", "0,1"], capsys)
    assert json.loads(out)["closed_form_bound"] is None


def test_env_tolerance(tmp_path, capsys, monkeypatch):
    path = state_file(tmp_path, [[1, 0], [0.999, math.sqrt(1 - 0.999**2)]])
    assert run(["discriminate", "--input", path], capsys)[0] == 0
    monkeypatch.setenv("UDISC_TOL", "0.01")
    assert run(["discriminate", "--input", path], capsys)[0] == 2
    assert run(["discriminate", "--input", path, "--tol", "1e-9"], capsys)[0] == 0


def test_crosscheck(capsys):
    code, out, _ = run(["crosscheck", "--seed", "7"], capsys)
    data = json.loads(out)
    assert code == 0
    assert all(c["pass"] for c in data["checks"])


def test_report_json_round_trip(tmp_path, capsys):
    path = state_file(tmp_path, [[1, 0, 0], [0.6, 0.8, 0], [0, 0.6, 0.8]])
    _, out, _ = run(["discriminate", "--input", path], capsys)
    data = json.loads(out)
    from udisc.povm import ConfusionReport, build_optimal_povm, validate
    from udisc.pure import gram

    fam = uio.load_state_family(path)
    report = validate(build_optimal_povm(fam), gram(fam))
    again = ConfusionReport.from_dict(data["confusion"])
    assert np.max(np.abs(again.q_matrix - report.q_matrix)) <= 1e-12
    assert abs(data["verdict"]["lambda_min"] - gram(fam).lambda_min) <= 1e-12


def test_module_entry_point(tmp_path):
    path = state_file(tmp_path, [[1, 0], [1, 0]])
    proc = subprocess.run([sys.executable, "-m", "udisc", "discriminate", "--input", path], capture_output=True)
    assert proc.returncode == 2
