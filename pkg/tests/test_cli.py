import json
import subprocess
import sys

import numpy as np
import pytest

from mzi_entangle import optics, protocol
from mzi_entangle.atoms import interaction_unitary
from mzi_entangle.cli import main, parse_amplitude, parse_grid, UsageError


def run_cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def outcomes(out):
    return {o["outcome"]: o for o in json.loads(out)["outcomes"]}


def test_run_balanced(capsys):
    code, out, _ = run_cli(capsys, "run", "--atom-u", "0.7071,0.7071", "--atom-l", "0.7071,0.7071")
    assert code == 0
    o = outcomes(out)
    assert abs(o["D_l(+)"]["probability"] - 0.125) < 1e-9
    assert set(o["D_l(+)"]) == {"outcome", "probability", "conditional_atoms", "fidelity_singlet",
                                "concurrence", "qubit_leakage"}
    cond = np.array(o["D_l(+)"]["conditional_atoms"])
    assert cond.shape == (9, 9, 2)
    assert o["D_l(+)"]["concurrence"] == 1.0
    assert o["D_l(-)"]["conditional_atoms"] is None and o["D_l(-)"]["concurrence"] is None


def test_run_empty_interferometer(capsys):
    code, out, _ = run_cli(capsys, "run", "--no-atom-u", "--no-atom-l")
    assert code == 0
    assert outcomes(out)["D_u(+)"]["probability"] == 1.0


def test_run_rejects_unnormalized(capsys):
    code, out, err = run_cli(capsys, "run", "--atom-u", "0.6,0.9")
    assert code == 2 and out == ""
    assert "--atom-u" in err and "normalized" in err and len(err.strip().splitlines()) == 1


def test_run_normalize_flag(capsys):
    code, out, _ = run_cli(capsys, "run", "--atom-u", "0.6,0.9", "--atom-l", "1,0", "--normalize")
    assert code == 0
    assert abs(sum(o["probability"] for o in outcomes(out).values()) - 1) < 1e-9


def test_run_complex_and_polar_amplitudes(capsys):
    code, out, _ = run_cli(capsys, "run", "--atom-u", "0.6,0.8j", "--atom-l", "0.6@1.0,0.8@-0.5")
    assert code == 0
    # Table 1 depends on moduli only: 1/4 (0.64*0.36 + 0.36*0.64)
    assert abs(outcomes(out)["D_l(+)"]["probability"] - 0.1152) < 1e-9


def test_run_mixture_and_bell(capsys):
    code, out, _ = run_cli(capsys, "run", "--mixture", "0.8")
    assert code == 0
    o = outcomes(out)
    assert abs(o["D_l(+)"]["probability"] - 0.2) < 1e-12 and o["D_l(+)"]["fidelity_singlet"] == 1.0
    code, out, _ = run_cli(capsys, "run", "--bell", "phi-plus")
    assert code == 0 and outcomes(out)["D_l(+)"]["probability"] == 0.0


def test_run_joint_state_file(tmp_path, capsys):
    ket = np.zeros((9, 2))
    ket[1, 0] = ket[3, 0] = np.sqrt(0.5)  # Psi+
    path = tmp_path / "psi.json"
    path.write_text(json.dumps(ket.tolist()))
    code, out, _ = run_cli(capsys, "run", "--joint-state", str(path))
    assert code == 0 and abs(outcomes(out)["D_l(+)"]["probability"] - 0.25) < 1e-12

    rho = np.zeros((9, 9, 2))
    rho[4, 4, 0] = 1.0  # |m- m-><m- m-|
    path.write_text(json.dumps(rho.tolist()))
    code, out, _ = run_cli(capsys, "run", "--joint-state", str(path))
    assert code == 0 and outcomes(out)["D_u(+)"]["probability"] == 1.0

    path.write_text(json.dumps((2 * ket).tolist()))
    code, _, err = run_cli(capsys, "run", "--joint-state", str(path))
    assert code == 2 and "--joint-state" in err


@pytest.mark.parametrize("argv", [
    ["run", "--mixture", "0.8", "--bell", "psi-plus"],
    ["run", "--mixture", "0.8", "--atom-u", "1,0"],
    ["run", "--mixture", "1.5"],
    ["run", "--atom-u", "0.6"],
    ["run", "--atom-u", "abc,1"],
    ["run", "--joint-state", "/nonexistent/file.json"],
])
def test_run_invalid_inputs_exit_2(capsys, argv):
    code, _, err = run_cli(capsys, *argv)
    assert code == 2 and err.startswith("error: --")


def test_run_csv(capsys):
    code, out, _ = run_cli(capsys, "run", "--format", "csv")
    lines = out.splitlines()
    assert lines[0] == "outcome,probability,fidelity_singlet,concurrence,qubit_leakage"
    assert lines[1] == "D_l(+),0.125,1.0,1.0,0.0"
    assert lines[2] == "D_l(-),0.0,,,"


def test_output_is_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        assert main(["run", "--atom-u", "0.6,0.8j", "--atom-l", "0.8,0.6", "--output", str(p)]) == 0
    assert a.read_bytes() == b.read_bytes()
    run_cli(capsys, "purify")
    assert run_cli(capsys, "purify")[1] == run_cli(capsys, "purify")[1]


def test_sweep_examples(capsys):
    code, out, _ = run_cli(capsys, "sweep", "--grid", "0:1:0.25")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "x,p_success,concurrence" and len(lines) == 6
    assert "0.5,0.125,1.0" in lines
    assert run_cli(capsys, "sweep", "--grid", "0:0:1")[1].splitlines()[1:] == ["0.0,0.0,"]
    assert run_cli(capsys, "sweep", "--grid", "0.2:0.2:0.1")[1].splitlines()[1:] == ["0.2,0.08,1.0"]


@pytest.mark.parametrize("grid", ["0:1", "a:b:c", "0:1:0", "0:2:0.5", "1:0:0.1", "-0.5:0.5:0.5"])
def test_sweep_malformed_grid(capsys, grid):
    code, _, err = run_cli(capsys, "sweep", f"--grid={grid}")
    assert code == 2 and "--grid" in err


def test_purify_rows(capsys):
    code, out, _ = run_cli(capsys, "purify", "--fidelity-grid", "0:1:0.1")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "F,p_dl,fid_dl,p_du,fid_du,beats_pure_max"
    rows = {line.split(",")[0]: line for line in lines[1:]}
    assert len(rows) == 11
    assert rows["0.8"] == "0.8,0.2,1.0,0.3,0.666666666667,true"
    assert rows["0.5"].endswith(",false")
    assert rows["0.0"] == "0.0,0.0,,0.5,0.0,false"


def test_purify_json(capsys):
    code, out, _ = run_cli(capsys, "purify", "--fidelity-grid", "0.6", "--format", "json")
    assert code == 0
    (row,) = json.loads(out)
    assert row["beats_pure_max"] is True and row["p_dl"] == 0.15


def test_selftest_passes(capsys):
    code, out, _ = run_cli(capsys, "selftest", "--seed", "42")
    assert code == 0
    assert out.splitlines()[-1] == "8/8 suites passed"
    assert run_cli(capsys, "selftest", "--seed", "42")[1] == out


_CACHED = (optics.beam_splitter_unitary, protocol.evolution_operator)


@pytest.fixture
def clean_caches():
    # mutated operators must not leak into later tests through the caches
    yield
    for fn in _CACHED:
        fn.cache_clear()


def suite_status(out):
    return {line.split()[1].rstrip(":"): line.split()[0] for line in out.splitlines() if line[:4] in ("PASS", "FAIL")}


def test_conjugated_beam_splitters_are_unobservable(monkeypatch, capsys, clean_caches):
    # flipping i -> -i on both splitters conjugates the evolution; the lower-port amplitude
    # still carries i*i = (-i)*(-i), the upper port only a global phase, and the scattered
    # phases vanish in the photon trace, so every suite must still pass
    block = optics._beam_splitter_block
    monkeypatch.setattr(optics, "_beam_splitter_block", lambda: block().conj())
    optics.beam_splitter_unitary.cache_clear()
    protocol.evolution_operator.cache_clear()
    code, out, _ = run_cli(capsys, "selftest")
    assert code == 0, out


def test_selftest_catches_second_splitter_phase_flip(monkeypatch, capsys, clean_caches):
    bs = optics.beam_splitter_unitary()

    def mutated(u_present=True, l_present=True, pol="+"):
        return bs.conj() @ interaction_unitary("L", l_present, pol) @ interaction_unitary("U", u_present, pol) @ bs

    monkeypatch.setattr(protocol, "evolution_operator", mutated)
    code, out, _ = run_cli(capsys, "selftest")
    status = suite_status(out)
    assert code == 1
    assert status["table1"] == "FAIL"


def test_parse_helpers():
    assert parse_amplitude("0.5+0.5i") == 0.5 + 0.5j
    assert abs(parse_amplitude("1@3.141592653589793") + 1) < 1e-15
    assert parse_grid("--g", "0:1:0.1")[-1] == 1.0 and len(parse_grid("--g", "0:1:0.1")) == 11
    assert parse_grid("--g", "0.8,0.2") == [0.2, 0.8]
    assert len(parse_grid("--g", "0:1:0.001")) == 1001
    with pytest.raises(UsageError):
        parse_grid("--g", "0:1:-1")


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "mzi_entangle", "sweep", "--grid", "0.5:0.5:1"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0 and res.stdout.splitlines()[1] == "0.5,0.125,1.0"
