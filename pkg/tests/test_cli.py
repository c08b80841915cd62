import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from envcap import cli
from envcap.capacity import epsilon0, uncertainty_bound
from envcap.channels import PAULI_X
from envcap.errors import NumericalError
from envcap.experiments import haar_unitary
from envcap.linalg import matrix_to_json
from envcap.qinfo import binary_entropy

FAST = ["--restarts", "4", "--threads", "1"]


def invoke(capsys, *argv):
    code = cli.run(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def invoke_json(capsys, *argv):
    code, out, err = invoke(capsys, *argv)
    assert code == 0, err
    return json.loads(out)


def test_decompose_cnot(capsys):
    res = invoke_json(capsys, "decompose", "--gate", "cnot")
    assert res["alpha_x"] == pytest.approx(math.pi / 2, abs=1e-8)
    assert res["alpha_y"] == pytest.approx(0, abs=1e-8) and res["alpha_z"] == pytest.approx(0, abs=1e-8)
    assert res["bound"] == "exact"


def test_decompose_from_file(capsys, tmp_path):
    path = tmp_path / "u.json"
    path.write_text(json.dumps(matrix_to_json(np.eye(4)[[0, 1, 3, 2]])))
    res = invoke_json(capsys, "decompose", "--file", str(path))
    assert res["alpha_x"] == pytest.approx(math.pi / 2, abs=1e-8)


def test_chi_swap_is_exact_zero(capsys):
    res = invoke_json(capsys, "chi", "--gate", "swap", "--restarts", "64")
    assert res["bits"] == 0 and res["bound"] == "exact"


def test_chi_sender_h(capsys):
    res = invoke_json(capsys, "chi", "--gate", "swap", "--sender", "H", *FAST)
    assert res["bits"] == pytest.approx(1, abs=1e-8) and res["bound"] in ("lower", "exact")


def test_minent_and_capacity_n(capsys):
    assert invoke_json(capsys, "minent", "--gate", "cnot", *FAST)["bits"] <= 1e-9
    res = invoke_json(capsys, "capacity-n", "--gate", "swap", "--n", "2", "--helper", "entangled", *FAST)
    assert res["bits"] == 0


def test_controlled_from_blocks(capsys, tmp_path):
    path = tmp_path / "blocks.json"
    path.write_text(json.dumps({"blocks": [matrix_to_json(np.eye(2)), matrix_to_json(PAULI_X)]}))
    res = invoke_json(capsys, "controlled", "--file", str(path), *FAST)
    assert res["bits"] == pytest.approx(1, abs=1e-8) and res["bound"] == "exact"
    res = invoke_json(capsys, "controlled", "--file", str(path), "--entangled", *FAST)
    assert res["bits"] == pytest.approx(1, abs=1e-6)


def test_conf_two_qubit_exact(capsys, tmp_path):
    path = tmp_path / "u.json"
    path.write_text(json.dumps(matrix_to_json(haar_unitary(4, 9))))
    res = invoke_json(capsys, "conf", "--file", str(path), "--two-qubit-exact")
    assert res["bits"] == 1.0 and res["bound"] == "exact"
    assert res["code"]["trace_distance"] == pytest.approx(2, abs=1e-9)
    res = invoke_json(capsys, "conf", "--file", str(path), *FAST)
    assert res["bits"] == pytest.approx(1, abs=1e-6)


def test_augment_swap(capsys):
    res = invoke_json(capsys, "augment", "--gate", "swap", *FAST)
    assert res["bits"] == pytest.approx(1, abs=1e-3) and res["dims"] == [8, 2, 2, 8]


def test_bounds(capsys):
    res = invoke_json(capsys, "bounds", "--d", "2", "--epsilon", "2")
    values = {v["quantity"]: v for v in res["values"]}
    assert values["uncertainty_bound"]["bits"] == pytest.approx(uncertainty_bound(2), rel=1e-14)
    assert values["continuity_bound"]["bits"] == pytest.approx(8, abs=1e-12)
    assert abs(values["uncertainty_f_at_epsilon0"]["bits"]) <= 1e-9
    assert all(v["bound"] == "exact" for v in res["values"])


def test_sweep_uc2_csv(capsys):
    code, out, _ = invoke(capsys, "sweep", "--curve", "uc2capacity", "--grid", f"0:{math.pi / 2}:33",
                          "--format", "csv")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["x", "uc2capacity [exact]"]
    assert len(rows) == 34 and all(len(r) == 2 for r in rows)
    for x, y in rows[1:]:
        assert float(y) == pytest.approx(binary_entropy((1 + math.sin(float(x))) / 2), abs=1e-12)


def test_tightrelation_crosses_zero_at_epsilon0(capsys):
    e0 = epsilon0(3)
    res = invoke_json(capsys, "sweep", "--curve", "tightrelation", "--grid", f"0:{2 * e0}:201", "--d", "3")
    xs = np.array([r[0] for r in res["rows"]])
    ys = np.array([r[1] for r in res["rows"]])
    first_zero = xs[np.argmax(ys == 0)]
    spacing = xs[1] - xs[0]
    assert e0 <= first_zero <= e0 + spacing
    assert np.all(ys[xs < e0 - spacing] > 0)


def test_uncertainty1_constant(capsys):
    res = invoke_json(capsys, "sweep", "--curve", "uncertainty1", "--grid", "0:1:11", "--d", "3")
    assert {r[1] for r in res["rows"]} == {uncertainty_bound(3)}
    assert res["bound"] == "exact"


def test_experiment_weyl_report(capsys):
    res = invoke_json(capsys, "experiment", "superadditivity-weyl", "--d", "2")
    assert res["report"]["passed"]
    code, out, _ = invoke(capsys, "experiment", "superadditivity-weyl", "--format", "text")
    assert code == 0 and "PASS" in out


def test_experiment_qutrit_report(capsys):
    res = invoke_json(capsys, "experiment", "superadditivity-qutrit", *FAST)
    assert res["report"]["passed"]
    rate = [m for m in res["report"]["measurements"] if m["name"].startswith("rate")][0]
    assert rate["value"] == pytest.approx(math.log2(3), abs=1e-12)


@pytest.mark.parametrize("argv", [
    ["chi", "--gate", "nope"],
    ["chi", "--bogus"],
    ["frobnicate"],
    ["sweep", "--curve", "uc2capacity", "--grid", "0:1:0"],
    ["sweep", "--curve", "uc2capacity", "--grid", "0:1"],
    ["bounds", "--epsilon", "3"],
    ["chi", "--gate", "swap", "--restarts", "0"],
    ["chi"],
])
def test_invalid_input_exit_code(argv):
    with pytest.raises(SystemExit) as exc:
        cli.main(argv)
    assert exc.value.code == 2


def test_non_square_matrix_file(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(matrix_to_json(np.eye(3))))
    with pytest.raises(SystemExit) as exc:
        cli.main(["decompose", "--file", str(path)])
    assert exc.value.code == 2


def test_numerical_failure_exit_code(monkeypatch):
    def fail(*_a, **_k):
        raise NumericalError("eigensolver did not converge")
    monkeypatch.setattr(cli.cap, "min_output_entropy", fail)
    with pytest.raises(SystemExit) as exc:
        cli.main(["minent", "--gate", "cnot"])
    assert exc.value.code == 3


def test_output_is_byte_identical_across_runs_and_threads(capsys, tmp_path):
    outs = []
    for threads in ("1", "1", "4"):
        path = tmp_path / f"out{len(outs)}.json"
        code, _, _ = invoke(capsys, "conf", "--gate", "uc2:0.4", "--restarts", "6", "--seed", "3",
                            "--threads", threads, "--out", str(path))
        assert code == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1] == outs[2]


def test_seed_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("ENVCAP_SEED", "7")
    a = invoke_json(capsys, "minent", "--gate", "uc2:0.3", *FAST)
    b = invoke_json(capsys, "minent", "--gate", "uc2:0.3", "--seed", "7", *FAST)
    assert a == b
    monkeypatch.setenv("ENVCAP_SEED", "seven")
    code, _, err = invoke(capsys, "minent", "--gate", "cnot", *FAST)
    assert code == 2 and "ENVCAP_SEED" in err


def test_every_text_line_has_bound_tag(capsys):
    for argv in (["bounds", "--format", "text"], ["decompose", "--gate", "dcnot", "--format", "text"],
                 ["chi", "--gate", "cnot", "--format", "text", *FAST],
                 ["sweep", "--curve", "continuity", "--grid", "0:2:5", "--format", "text"]):
        code, out, _ = invoke(capsys, *argv)
        assert code == 0
        for line in out.strip().splitlines():
            assert any(tag in line for tag in ("lower", "upper", "exact")), line


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "envcap", "decompose", "--gate", "swap"],
                          capture_output=True, text=True, check=True)
    assert json.loads(proc.stdout)["alpha_z"] == pytest.approx(math.pi / 2, abs=1e-8)
