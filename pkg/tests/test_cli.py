import json
import shutil
import subprocess

import numpy as np
import pytest

from pencilspec.cli import main
from pencilspec.dense import random_orthogonal

SPECTRUM = [-1 + 2j, -1 - 2j, -2 + 3j, -2 - 3j]


def write(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


def matrix_file(tmp_path, name, data):
    data = np.asarray(data, dtype=float).tolist()
    return write(tmp_path / f"{name}.json", {"n": len(data), "data": data})


def spectrum_file(tmp_path, values, name="spectrum"):
    return write(tmp_path / f"{name}.json", {"values": [{"re": z.real, "im": z.imag} for z in map(complex, values)]})


def run(capsys, *argv):
    code = main([*argv, "-q"])
    out = capsys.readouterr()
    envelope = json.loads(out.out)
    assert (envelope["status"] == "ok") == (code == 0)
    return code, envelope


def pencil_files(tmp_path, m, c, k):
    return ["--mass", matrix_file(tmp_path, "m", m), "--damping", matrix_file(tmp_path, "c", c),
            "--stiffness", matrix_file(tmp_path, "k", k)]


def test_decompose_diagonal(tmp_path, capsys):
    code, env = run(capsys, "decompose", matrix_file(tmp_path, "a", np.diag([1.0, 2.0])))
    assert code == 0
    assert env["payload"]["eigenvalues"] == [1.0, 2.0]
    assert env["payload"]["projectors"][0] == {"n": 2, "data": [[1.0, 0.0], [0.0, 0.0]]}
    assert env["payload"]["projectors"][1] == {"n": 2, "data": [[0.0, 0.0], [0.0, 1.0]]}
    assert set(env["payload"]["residuals"]) == {"orthonormality", "idempotence", "annihilation", "completeness", "expansion"}
    assert env["tool_version"]
    assert env["tolerances"]["sym_tol"] == 1e-9


def test_decompose_identity_exits_3(tmp_path, capsys):
    code, env = run(capsys, "decompose", matrix_file(tmp_path, "a", np.eye(2)))
    assert code == 3
    assert env["status"] == "degenerate_eigenvalue"
    assert "degenerate eigenvalue" in env["payload"]["error"]


@pytest.mark.parametrize(
    "content",
    [
        {"n": 2, "data": [[1.0, 2.0]]},
        {"n": 2, "data": [[1.0, 2.0], [2.0]]},
        {"n": 2, "data": [[1.0, "x"], [2.0, 1.0]]},
        {"n": 1, "data": [[True]]},
        {"data": [[1.0]]},
        [1, 2],
    ],
)
def test_decompose_malformed_exits_2(tmp_path, capsys, content):
    code, env = run(capsys, "decompose", write(tmp_path / "bad.json", content))
    assert code == 2


def test_decompose_non_finite_and_unreadable(tmp_path, capsys):
    nan = tmp_path / "nan.json"
    nan.write_text('{"n": 1, "data": [[NaN]]}')
    assert run(capsys, "decompose", str(nan))[0] == 2
    garbage = tmp_path / "garbage.json"
    garbage.write_text("{not json")
    assert run(capsys, "decompose", str(garbage))[0] == 2
    assert run(capsys, "decompose", str(tmp_path / "missing.json"))[0] == 2


def test_decompose_non_symmetric_exits_2(tmp_path, capsys):
    code, env = run(capsys, "decompose", matrix_file(tmp_path, "a", [[1.0, 2.0], [0.0, 1.0]]))
    assert (code, env["status"]) == (2, "non_symmetric")


@pytest.mark.parametrize(
    "matrix, k, expected",
    [
        (np.diag([1.0, 2.0]), 3, [[1.0, 0.0], [0.0, 8.0]]),
        ([[2.0, 1.0], [1.0, 2.0]], 2, [[5.0, 4.0], [4.0, 5.0]]),
        ([[2.0, 1.0], [1.0, 2.0]], 0, [[1.0, 0.0], [0.0, 1.0]]),
    ],
)
def test_power(tmp_path, capsys, matrix, k, expected):
    code, env = run(capsys, "power", matrix_file(tmp_path, "a", matrix), str(k))
    assert code == 0
    np.testing.assert_allclose(env["payload"]["result"]["data"], expected, atol=1e-12)
    assert env["payload"]["residual"] <= 1e-12


def test_power_diagonal_residual_is_zero(tmp_path, capsys):
    _, env = run(capsys, "power", matrix_file(tmp_path, "a", np.diag([1.0, 2.0])), "3")
    assert env["payload"]["residual"] == 0.0


def test_power_negative_exits_2(tmp_path, capsys):
    assert run(capsys, "power", matrix_file(tmp_path, "a", np.diag([1.0, 2.0])), "-1")[0] == 2


def test_forward_decoupled(tmp_path, capsys):
    code, env = run(capsys, "forward", *pencil_files(tmp_path, np.eye(2), np.diag([2.0, 4.0]), np.diag([5.0, 13.0])))
    assert code == 0
    got = [complex(v["re"], v["im"]) for v in env["payload"]["spectrum"]]
    np.testing.assert_allclose(sorted(got, key=lambda z: (z.real, z.imag)), sorted(SPECTRUM, key=lambda z: (z.real, z.imag)))
    assert env["payload"]["oracle_residual"] <= 1e-10
    assert env["payload"]["commutator_norm"] == 0.0
    assert max(env["payload"]["det_residuals"]) <= 1e-12


def test_forward_no_oracle(tmp_path, capsys):
    code, env = run(capsys, "forward", "--no-oracle",
                    *pencil_files(tmp_path, np.eye(2), np.diag([2.0, 4.0]), np.diag([5.0, 13.0])))
    assert code == 0
    assert "oracle_residual" not in env["payload"]


def test_forward_non_commuting_exits_4(tmp_path, capsys):
    code, env = run(capsys, "forward", *pencil_files(tmp_path, np.eye(2), np.diag([1.0, 2.0]), [[0.0, 1.0], [1.0, 0.0]]))
    assert (code, env["status"]) == (4, "non_commuting")


def test_forward_singular_mass_exits_2(tmp_path, capsys):
    code, env = run(capsys, "forward", *pencil_files(tmp_path, [[1.0, 1.0], [1.0, 1.0]], np.eye(2), np.eye(2)))
    assert (code, env["status"]) == (2, "singular_mass")


def test_forward_overdamped_exits_2(tmp_path, capsys):
    code, env = run(capsys, "forward", *pencil_files(tmp_path, np.eye(1), [[5.0]], [[1.0]]))
    assert (code, env["status"]) == (2, "real_modes")


def test_forward_order_mismatch_exits_2(tmp_path, capsys):
    code, _ = run(capsys, "forward", *pencil_files(tmp_path, np.eye(2), np.eye(3), np.eye(2)))
    assert code == 2


def test_inverse_plain(tmp_path, capsys):
    out = tmp_path / "out"
    code, env = run(capsys, "inverse", spectrum_file(tmp_path, SPECTRUM), "--out-dir", str(out))
    assert code == 0
    assert env["payload"]["round_trip_residual"] < 1e-10
    assert env["payload"]["dressing"] == {"source": "identity"}
    m = json.loads((out / "mass.json").read_text())
    c = json.loads((out / "damping.json").read_text())
    k = json.loads((out / "stiffness.json").read_text())
    assert m == {"n": 2, "data": [[1.0, 0.0], [0.0, 1.0]]}
    assert c["data"] == [[2.0, 0.0], [0.0, 4.0]]
    assert k["data"] == [[5.0, 0.0], [0.0, 13.0]]
    cert = json.loads((out / "certificate.json").read_text())
    assert cert["alphas"] == [2.0, 4.0] and cert["betas"] == [5.0, 13.0]


def test_inverse_seeded_dressing(tmp_path, capsys):
    out = tmp_path / "out"
    code, env = run(capsys, "inverse", spectrum_file(tmp_path, SPECTRUM), "--out-dir", str(out), "--q-seed", "7")
    assert code == 0
    assert env["payload"]["dressing"] == {"source": "seed", "seed": 7}
    c = np.array(json.loads((out / "damping.json").read_text())["data"])
    assert abs(c[0, 1]) > 1e-6
    np.testing.assert_allclose(c, c.T, atol=1e-10)
    cert = json.loads((out / "certificate.json").read_text())
    np.testing.assert_array_equal(cert["basis"]["data"], random_orthogonal(2, 7))

    code, fwd = run(capsys, "forward", "--mass", str(out / "mass.json"), "--damping", str(out / "damping.json"),
                    "--stiffness", str(out / "stiffness.json"))
    assert code == 0
    got = sorted((complex(v["re"], v["im"]) for v in fwd["payload"]["spectrum"]), key=lambda z: (z.real, z.imag))
    np.testing.assert_allclose(got, sorted(SPECTRUM, key=lambda z: (z.real, z.imag)), atol=1e-10)


def test_inverse_seed_from_environment(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("PENCILSPEC_SEED", "7")
    code, env = run(capsys, "inverse", spectrum_file(tmp_path, SPECTRUM), "--out-dir", str(tmp_path / "a"))
    assert env["payload"]["dressing"] == {"source": "seed", "seed": 7}
    code, env = run(capsys, "inverse", spectrum_file(tmp_path, SPECTRUM), "--out-dir", str(tmp_path / "b"),
                    "--q-seed", "3")
    assert env["payload"]["dressing"] == {"source": "seed", "seed": 3}
    monkeypatch.setenv("PENCILSPEC_SEED", "seven")
    assert run(capsys, "inverse", spectrum_file(tmp_path, SPECTRUM), "--out-dir", str(tmp_path / "c"))[0] == 2


def test_inverse_q_file_and_mass(tmp_path, capsys):
    q = np.sqrt(0.5) * np.array([[1.0, -1.0], [1.0, 1.0]])
    out = tmp_path / "out"
    code, env = run(capsys, "inverse", spectrum_file(tmp_path, SPECTRUM), "--out-dir", str(out),
                    "--q-file", matrix_file(tmp_path, "q", q), "--mass", "2,2")
    assert code == 0
    assert env["payload"]["dressing"]["source"] == "file"
    m = np.array(json.loads((out / "mass.json").read_text())["data"])
    c = np.array(json.loads((out / "damping.json").read_text())["data"])
    k = np.array(json.loads((out / "stiffness.json").read_text())["data"])
    np.testing.assert_allclose(m, 2 * np.eye(2), atol=1e-14)
    np.testing.assert_allclose(c, [[6.0, -2.0], [-2.0, 6.0]], atol=1e-13)
    np.testing.assert_allclose(k, [[18.0, -8.0], [-8.0, 18.0]], atol=1e-13)


def test_inverse_rejects_non_orthogonal_q_file(tmp_path, capsys):
    code, env = run(capsys, "inverse", spectrum_file(tmp_path, SPECTRUM), "--out-dir", str(tmp_path),
                    "--q-file", matrix_file(tmp_path, "q", 2 * np.eye(2)))
    assert (code, env["status"]) == (2, "not_orthogonal")


@pytest.mark.parametrize(
    "values, status",
    [
        ([3 + 0j, 3 - 0j], "real_value"),
        ([1 + 1j, 1 - 1j, 2 + 1j], "odd_length"),
        ([1 + 1j, 1 - 1.5j], "unpaired_value"),
        ([1 + 1j, 1 - 1j, 1 + 1j, 1 - 1j], "duplicate_eigenvalue"),
    ],
)
def test_inverse_bad_spectra_exit_2(tmp_path, capsys, values, status):
    code, env = run(capsys, "inverse", spectrum_file(tmp_path, values), "--out-dir", str(tmp_path))
    assert (code, env["status"]) == (2, status)


def test_inverse_bad_mass_list(tmp_path, capsys):
    spec = spectrum_file(tmp_path, SPECTRUM)
    assert run(capsys, "inverse", spec, "--out-dir", str(tmp_path), "--mass", "1,x")[0] == 2
    assert run(capsys, "inverse", spec, "--out-dir", str(tmp_path), "--mass", "1")[0] == 2
    assert run(capsys, "inverse", spec, "--out-dir", str(tmp_path), "--mass", "1,-1")[0] == 2


def test_spectrum_file_schema(tmp_path, capsys):
    bad = write(tmp_path / "s.json", {"values": [{"re": 1.0}, {"re": 1.0, "im": -1.0}]})
    assert run(capsys, "inverse", bad, "--out-dir", str(tmp_path))[0] == 2
    nan = tmp_path / "nan.json"
    nan.write_text('{"values": [{"re": NaN, "im": 1}, {"re": NaN, "im": -1}]}')
    assert run(capsys, "inverse", str(nan), "--out-dir", str(tmp_path))[0] == 2


def inverse_outputs(tmp_path, capsys, values, *flags):
    out = tmp_path / "out"
    spec = spectrum_file(tmp_path, values)
    assert run(capsys, "inverse", spec, "--out-dir", str(out), *flags)[0] == 0
    return ["--mass", str(out / "mass.json"), "--damping", str(out / "damping.json"),
            "--stiffness", str(out / "stiffness.json")], spec


def test_verify_round_trip(tmp_path, capsys):
    files, spec = inverse_outputs(tmp_path, capsys, SPECTRUM, "--q-seed", "11")
    code, env = run(capsys, "verify", *files, "--spectrum", spec)
    assert code == 0
    assert env["payload"]["forward_residual"] <= 1e-8
    assert env["payload"]["oracle_residual"] <= 1e-6
    assert len(env["payload"]["det_residuals"]) == 4


def test_verify_perturbed_exits_5(tmp_path, capsys):
    files, _ = inverse_outputs(tmp_path, capsys, SPECTRUM)
    perturbed = spectrum_file(tmp_path, [SPECTRUM[0] + 1e-2, *SPECTRUM[1:]], "perturbed")
    code, env = run(capsys, "verify", *files, "--spectrum", perturbed)
    assert (code, env["status"]) == (5, "no_matching")
    assert env["payload"]["forward_residual"] == pytest.approx(1e-2, rel=1e-6)


def test_verify_loose_tolerance_accepts_perturbation(tmp_path, capsys):
    files, _ = inverse_outputs(tmp_path, capsys, SPECTRUM)
    perturbed = spectrum_file(tmp_path, [SPECTRUM[0] + 1e-2, *SPECTRUM[1:]], "perturbed")
    assert run(capsys, "verify", *files, "--spectrum", perturbed, "--tol", "0.1")[0] == 0


def test_verify_odd_length_exits_2(tmp_path, capsys):
    files, _ = inverse_outputs(tmp_path, capsys, SPECTRUM)
    odd = spectrum_file(tmp_path, SPECTRUM[:3], "odd")
    assert run(capsys, "verify", *files, "--spectrum", odd)[0] == 2


def test_verify_wrong_length_exits_2(tmp_path, capsys):
    files, _ = inverse_outputs(tmp_path, capsys, SPECTRUM)
    short = spectrum_file(tmp_path, SPECTRUM[:2], "short")
    assert run(capsys, "verify", *files, "--spectrum", short)[0] == 2


@pytest.mark.parametrize("seed", range(10))
def test_pipeline_closure(tmp_path, capsys, seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 6))
    reps = rng.uniform(-3, 0.5, n) + 1j * rng.uniform(0.1, 3, n) + 0.05 * np.arange(n)
    values = [z for r in reps for z in (r, r.conjugate())]
    files, spec = inverse_outputs(tmp_path, capsys, values, "--q-seed", str(seed))
    assert run(capsys, "verify", *files, "--spectrum", spec)[0] == 0
    assert run(capsys, "forward", *files)[0] == 0


def test_tolerance_flags_are_echoed(tmp_path, capsys):
    code, env = run(capsys, "decompose", matrix_file(tmp_path, "a", [[1.0, 2.0], [2.1, 1.0]]), "--tol-sym", "0.5")
    assert code == 0
    assert env["tolerances"]["sym_tol"] == 0.5
    assert run(capsys, "decompose", matrix_file(tmp_path, "b", np.eye(2)), "--tol-sym", "0")[0] == 2


def test_output_file_matches_stdout(tmp_path, capsys):
    target = tmp_path / "envelope.json"
    main(["decompose", matrix_file(tmp_path, "a", [[2.0, 1.0], [1.0, 2.0]]), "-q", "--output", str(target)])
    assert target.read_text() == capsys.readouterr().out


def test_summary_goes_to_stderr(tmp_path, capsys):
    main(["decompose", matrix_file(tmp_path, "a", np.diag([1.0, 2.0]))])
    err = capsys.readouterr().err
    assert err.startswith("decompose: ok")
    main(["decompose", matrix_file(tmp_path, "a", np.diag([1.0, 2.0])), "--quiet"])
    assert capsys.readouterr().err == ""


def test_envelope_key_order(tmp_path, capsys):
    main(["decompose", matrix_file(tmp_path, "a", np.diag([1.0, 2.0])), "-q"])
    assert list(json.loads(capsys.readouterr().out)) == ["status", "payload", "tolerances", "tool_version"]


def test_floats_round_trip_exactly(tmp_path, capsys):
    main(["decompose", matrix_file(tmp_path, "a", [[2.0, 1.0], [1.0, 2.0]]), "-q"])
    text = capsys.readouterr().out
    values = json.loads(text)["payload"]["eigenvalues"]
    for v in values:
        assert repr(v) in text


@pytest.mark.skipif(shutil.which("pencilspec") is None, reason="console script not installed")
def test_console_script_is_byte_stable(tmp_path):
    spec = spectrum_file(tmp_path, SPECTRUM)
    outs = []
    for _ in range(2):
        proc = subprocess.run(["pencilspec", "inverse", spec, "--out-dir", str(tmp_path / "o"), "--q-seed", "5", "-q"],
                              capture_output=True, check=False)
        assert proc.returncode == 0
        outs.append((proc.stdout, (tmp_path / "o" / "damping.json").read_bytes()))
    assert outs[0] == outs[1]
    proc = subprocess.run(["pencilspec", "decompose", str(tmp_path / "missing.json")], capture_output=True)
    assert proc.returncode == 2
    assert b"Traceback" not in proc.stderr
