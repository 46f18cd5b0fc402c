import json
import math
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qfdiv import cli_io
from qfdiv.convex_core import renyi
from qfdiv.sampling import random_density


def problem(family, rho1, rho2):
    return {"family": family, "rho1": cli_io.matrix_to_json(rho1), "rho2": cli_io.matrix_to_json(rho2)}


def write(tmp_path, obj, name="p.json"):
    path = tmp_path / name
    path.write_text(json.dumps(obj) if not isinstance(obj, str) else obj)
    return str(path)


def run_cli(capsys, *argv):
    code = cli_io.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@given(st.integers(0, 2**32 - 1), st.sampled_from([{"family": "kl"}, {"family": "renyi", "alpha": -0.5},
                                                   {"family": "tv"}, {"family": "fb"}]))
def test_problem_round_trip(seed, fam):
    rng = np.random.default_rng(seed)
    parsed = cli_io.parse_problem(problem(fam, random_density(3, rng), random_density(3, rng)))
    again = cli_io.parse_problem(cli_io.dump_problem(parsed))
    assert np.array_equal(again.rho1, parsed.rho1)
    assert np.array_equal(again.rho2, parsed.rho2)
    assert again.family == parsed.family


@pytest.mark.parametrize(
    "obj,field",
    [
        ({"family": {"family": "kl"}, "rho1": [[[1, 0]]], "rho2": [[[1, 0]]], "extra": 1}, "extra"),
        ({"family": {"family": "kl", "beta": 2}, "rho1": [[[1, 0]]], "rho2": [[[1, 0]]]}, "family.beta"),
        ({"family": {"family": "kl"}, "rho2": [[[1, 0]]]}, "rho1"),
        ({"family": {"family": "kl"}, "rho1": [[[1, 0], [0, 0]]], "rho2": [[[1, 0]]]}, "rho1[0]"),
        ({"family": {"family": "kl"}, "rho1": [[[1, "x"]]], "rho2": [[[1, 0]]]}, "rho1[0][0][1]"),
        ({"family": {"family": "renyi", "alpha": 1}, "rho1": [[[1, 0]]], "rho2": [[[1, 0]]]}, "family.alpha"),
        ({"family": {"family": "kl"}, "rho1": [[[-1, 0]]], "rho2": [[[1, 0]]]}, "rho1"),
    ],
)
def test_input_errors_name_the_field(obj, field):
    with pytest.raises(cli_io.InputError) as exc:
        cli_io.parse_problem(obj)
    assert str(exc.value).startswith(field)


def test_compute_command(tmp_path, capsys, rng):
    r1, r2 = random_density(2, rng), random_density(2, rng)
    path = write(tmp_path, problem({"family": "chi2"}, r1, r2))
    code, out, _ = run_cli(capsys, "compute", "-f", path)
    assert code == cli_io.EXIT_OK
    data = json.loads(out)
    assert data["path"] == "closed_form_f2"
    from qfdiv.dmin_solver import solve
    assert data["value"] == solve(renyi(2.0), r1, r2).value


def test_infinite_value_serialised_as_string(tmp_path, capsys):
    path = write(tmp_path, problem({"family": "kl"}, np.eye(2) / 2, np.diag([1.0, 0.0])))
    code, out, _ = run_cli(capsys, "compute", "-f", path)
    assert code == 0
    assert json.loads(out)["value"] == "inf"


def test_numbers_use_17_significant_digits():
    text = cli_io.dumps({"x": 0.1, "y": [1.0 / 3.0], "z": math.inf, "n": None})
    data = json.loads(text)
    assert data["x"] == 0.1 and data["z"] == "inf" and data["n"] is None
    assert "0.33333333333333331" in text


def test_exit_code_for_bad_input(tmp_path, capsys):
    path = write(tmp_path, "{not json")
    code, _, err = run_cli(capsys, "compute", "-f", path)
    assert code == cli_io.EXIT_INPUT and "invalid JSON" in err
    code, _, err = run_cli(capsys, "compute", "-f", str(tmp_path / "missing.json"))
    assert code == cli_io.EXIT_INPUT and "cannot read" in err
    path = write(tmp_path, problem({"family": "kl"}, np.eye(2) / 2, np.eye(2) / 2), "ok.json")
    code, _, err = run_cli(capsys, "compute", "-f", path, "--force-path", "bogus")
    assert code == cli_io.EXIT_INPUT and "--force-path" in err


def test_exit_code_when_not_converged(tmp_path, capsys, rng):
    path = write(tmp_path, problem({"family": "renyi", "alpha": 0.3}, random_density(3, rng), random_density(3, rng)))
    code, out, _ = run_cli(capsys, "compute", "-f", path, "--max-iter", "1")
    assert code == cli_io.EXIT_NONCONVERGED
    assert json.loads(out)["converged"] is False


def test_verify_is_deterministic(tmp_path, capsys, rng):
    path = write(tmp_path, problem({"family": "renyi", "alpha": 0.3}, random_density(2, rng), random_density(2, rng)))
    outs = [run_cli(capsys, "verify", "-f", path, "--restarts", "3", "--seed", "7")[1] for _ in range(2)]
    assert outs[0] == outs[1]
    assert abs(json.loads(outs[0])["gap"]) < 1e-6


def test_fisher_builtin_and_samples(tmp_path, capsys):
    code, out, _ = run_cli(capsys, "fisher", "--builtin", "binary-mixture", "--eta", "0.3")
    assert code == 0
    data = json.loads(out)
    assert data["J_S"] == pytest.approx(1 / 0.3 + 1 / 0.7, rel=1e-6)
    from qfdiv.fisher_info import rank2_in_3d
    h = 1e-3
    obj = {"family": {"family": "renyi", "alpha": 0.3}, "step": h,
           "samples": [cli_io.matrix_to_json(rank2_in_3d(0.2 + k * h)) for k in (-1, 0, 1)]}
    code, out, _ = run_cli(capsys, "fisher", "-f", write(tmp_path, obj))
    assert code == 0
    data = json.loads(out)
    assert data["relative_gap"] < 1e-3
    code, _, err = run_cli(capsys, "fisher", "-f", write(tmp_path, {"family": {"family": "kl"}}, "k.json"))
    assert code == cli_io.EXIT_INPUT


def test_compare_command(tmp_path, capsys):
    path = write(tmp_path, {"rho1": cli_io.matrix_to_json(np.diag([0.3, 0.7])),
                            "rho2": cli_io.matrix_to_json(np.diag([0.6, 0.4]))})
    code, out, _ = run_cli(capsys, "compare", "-f", path, "--alpha", "2")
    assert code == 0
    data = json.loads(out)
    assert data["commuting"] is True and abs(data["gap"]) <= 1e-12


def test_console_entry_point(tmp_path):
    path = write(tmp_path, problem({"family": "tv"}, np.diag([1.0, 0.0]), np.eye(2) / 2))
    out = subprocess.run([sys.executable, "-m", "qfdiv", "compute", "-f", path],
                         capture_output=True, text=True, check=True)
    assert json.loads(out.stdout)["value"] == pytest.approx(1.0)
