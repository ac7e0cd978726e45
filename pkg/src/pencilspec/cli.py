"""Command line front end: ``pencilspec decompose|forward|inverse|power|verify``.

Every command prints one JSON envelope on stdout::

    {"status": "ok" | <error code>, "payload": {...},
     "tolerances": {...}, "tool_version": "..."}

Exit codes: 0 ok, 1 internal failure, 2 invalid input, 3 degenerate
eigenvalue, 4 non-commuting pencil or misaligned eigenbasis, 5 spectrum
mismatch.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .dense import DEFAULT_TOLERANCES, Tolerances, inf_norm, random_orthogonal
from .errors import NoMatching, PencilSpecError, ValidationError
from .files import complex_to_json, dumps, matrix_to_json, read_matrix, read_spectrum, write_json
from .forward import QuadraticPencil, commutator_norm, evaluate_pencil, pencil_spectrum
from .inverse import InverseSpec, pair_conjugates, reconstruct_pencil
from .oracle import multiset_match, oracle_spectrum
from .spectral import reconstruct, spectral_decompose, spectral_power

SEED_ENV = "PENCILSPEC_SEED"
ROUND_TRIP_TOL = 1e-8
ORACLE_TOL = 1e-6

_TOLERANCE_FLAGS = {
    "sym_tol": "--tol-sym",
    "commute_tol": "--tol-commute",
    "eig_residual_tol": "--tol-eig-residual",
    "distinct_tol": "--tol-distinct",
    "conj_pair_tol": "--tol-conj-pair",
    "root_tol": "--tol-root",
}


class RoundTripMismatch(NoMatching):
    code = "round_trip_mismatch"


def _max_offdiag(mats):
    n = len(mats)
    worst = 0.0
    for i in range(n):
        for j in range(n):
            if i != j:
                worst = max(worst, float(np.max(np.abs(mats[i] @ mats[j]))))
    return worst


def _spectral_residuals(d):
    a = d.source
    x = d.eigenvectors
    n = d.n
    return {
        "orthonormality": float(np.max(np.abs(x.T @ x - np.eye(n)))),
        "idempotence": max(float(np.max(np.abs(p @ p - p))) for p in d.projectors),
        "annihilation": _max_offdiag(d.projectors),
        "completeness": float(np.max(np.abs(sum(d.projectors) - np.eye(n)))),
        "expansion": float(np.max(np.abs(reconstruct(d) - a))),
    }


def cmd_decompose(path, tol: Tolerances = DEFAULT_TOLERANCES) -> dict:
    d = spectral_decompose(read_matrix(path), tol)
    return {
        "n": d.n,
        "eigenvalues": d.eigenvalues,
        "eigenvectors": [p.vector for p in d.pairs],
        "g_rows": d.g_rows,
        "projectors": [matrix_to_json(p) for p in d.projectors],
        "residuals": _spectral_residuals(d),
    }


def cmd_power(path, k: int, tol: Tolerances = DEFAULT_TOLERANCES) -> dict:
    if k < 0:
        raise ValidationError(f"power must be non-negative, got {k}")
    d = spectral_decompose(read_matrix(path), tol)
    result = spectral_power(d, k)
    direct = np.linalg.matrix_power(d.source, k)
    scale = max(inf_norm(direct), 1.0)
    return {
        "k": k,
        "eigenvalues": d.eigenvalues,
        "result": matrix_to_json(result),
        "residual": float(np.max(np.abs(result - direct))) / scale,
    }


def _read_pencil(mass, damping, stiffness) -> QuadraticPencil:
    return QuadraticPencil(read_matrix(mass), read_matrix(damping), read_matrix(stiffness))


def _det_residuals(pencil, values):
    return [abs(complex(np.linalg.det(evaluate_pencil(pencil, z)))) for z in values]


def cmd_forward(mass, damping, stiffness, tol: Tolerances = DEFAULT_TOLERANCES, oracle: bool = True) -> dict:
    pencil = _read_pencil(mass, damping, stiffness)
    spectrum, modal = pencil_spectrum(pencil, tol)
    c_tilde = np.linalg.solve(pencil.m, pencil.c)
    k_tilde = np.linalg.solve(pencil.m, pencil.k)
    payload = {
        "n": pencil.n,
        "spectrum": spectrum.full(),
        "alphas": modal.alphas,
        "betas": modal.betas,
        "basis": matrix_to_json(modal.basis),
        "commutator_norm": commutator_norm(c_tilde, k_tilde),
        "det_residuals": _det_residuals(pencil, spectrum.full()),
    }
    if oracle:
        match = multiset_match(spectrum.full(), oracle_spectrum(pencil, tol), ORACLE_TOL)
        payload["oracle_residual"] = match.worst
    return payload


def _parse_masses(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ValidationError(f"--mass expects comma-separated numbers, got {text!r}") from None


def _dressing(n, q_seed, q_file):
    if q_file is not None:
        return read_matrix(q_file), {"source": "file", "path": str(q_file)}
    if q_seed is None and os.environ.get(SEED_ENV):
        try:
            q_seed = int(os.environ[SEED_ENV])
        except ValueError:
            raise ValidationError(f"{SEED_ENV} must be an integer") from None
    if q_seed is None:
        return None, {"source": "identity"}
    return random_orthogonal(n, q_seed), {"source": "seed", "seed": q_seed}


def cmd_inverse(
    spectrum_path,
    out_dir=".",
    tol: Tolerances = DEFAULT_TOLERANCES,
    q_seed=None,
    q_file=None,
    masses=None,
) -> dict:
    spectrum = pair_conjugates(read_spectrum(spectrum_path), tol)
    q, q_info = _dressing(len(spectrum), q_seed, q_file)
    rec = reconstruct_pencil(InverseSpec(spectrum, q, masses), tol)

    forward, _ = pencil_spectrum(rec.pencil, tol)
    residual = multiset_match(forward.full(), spectrum.full(), np.inf).worst

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {name: out_dir / f"{name}.json" for name in ("mass", "damping", "stiffness", "certificate")}
    write_json(paths["mass"], matrix_to_json(rec.pencil.m))
    write_json(paths["damping"], matrix_to_json(rec.pencil.c))
    write_json(paths["stiffness"], matrix_to_json(rec.pencil.k))
    certificate = {
        "spectrum": [complex_to_json(z) for z in spectrum],
        "alphas": rec.modal.alphas,
        "betas": rec.modal.betas,
        "dressing": q_info,
        "basis": matrix_to_json(rec.modal.basis),
        "mass_eigenvalues": None if masses is None else list(masses),
    }
    write_json(paths["certificate"], certificate)

    payload = {
        "n": len(spectrum),
        "files": {name: str(p) for name, p in paths.items()},
        "alphas": rec.modal.alphas,
        "betas": rec.modal.betas,
        "dressing": q_info,
        "round_trip_residual": residual,
    }
    if not residual <= ROUND_TRIP_TOL:
        raise RoundTripMismatch(f"round trip residual {residual:.3g} exceeds {ROUND_TRIP_TOL:g}", worst=residual)
    return payload


def cmd_verify(mass, damping, stiffness, spectrum_path, tol: Tolerances = DEFAULT_TOLERANCES,
               match_tol: float = ORACLE_TOL) -> dict:
    values = read_spectrum(spectrum_path)
    pencil = _read_pencil(mass, damping, stiffness)
    if len(values) != 2 * pencil.n:
        raise ValidationError(f"spectrum has {len(values)} values, pencil needs {2 * pencil.n}")
    forward, _ = pencil_spectrum(pencil, tol)
    oracle = oracle_spectrum(pencil, tol)
    payload = {
        "n": pencil.n,
        "det_residuals": _det_residuals(pencil, values),
    }
    failures = []
    for name, reference in (("forward", forward.full()), ("oracle", oracle)):
        try:
            payload[f"{name}_residual"] = multiset_match(values, reference, match_tol).worst
        except NoMatching as exc:
            payload[f"{name}_residual"] = exc.worst
            failures.append(name)
    if failures:
        exc = NoMatching(
            f"spectrum does not match the {' and '.join(failures)} spectrum within {match_tol:g}"
        )
        exc.payload = payload
        raise exc
    return payload


def _tolerances_from(args) -> Tolerances:
    return Tolerances(**{name: getattr(args, name) for name in _TOLERANCE_FLAGS})


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    group = common.add_argument_group("tolerances")
    for name, flag in _TOLERANCE_FLAGS.items():
        group.add_argument(flag, dest=name, type=float, default=getattr(DEFAULT_TOLERANCES, name),
                           metavar="X", help=f"default {getattr(DEFAULT_TOLERANCES, name):g}")
    common.add_argument("--output", "-o", help="also write the JSON envelope to this file")
    common.add_argument("--quiet", "-q", action="store_true", help="suppress the summary on stderr")

    parser = argparse.ArgumentParser(
        prog="pencilspec",
        description="Spectral projectors and commuting quadratic pencils.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decompose", parents=[common], help="projector decomposition of a symmetric matrix")
    p.add_argument("matrix")

    p = sub.add_parser("power", parents=[common], help="integer power through the projector expansion")
    p.add_argument("matrix")
    p.add_argument("k", type=int)

    p = sub.add_parser("forward", parents=[common], help="spectrum of lambda^2 M + lambda C + K")
    p.add_argument("--mass", required=True)
    p.add_argument("--damping", required=True)
    p.add_argument("--stiffness", required=True)
    p.add_argument("--no-oracle", action="store_true", help="skip the determinant-polynomial cross-check")

    p = sub.add_parser(
        "inverse",
        parents=[common],
        help="build M, C, K for a conjugate-closed spectrum",
        description=(
            "Conjugates are paired with an absolute tolerance (--tol-conj-pair), "
            "suited to eigenvalues of magnitude 1 to 1e3."
        ),
    )
    p.add_argument("spectrum")
    q = p.add_mutually_exclusive_group()
    q.add_argument("--q-seed", type=int, help=f"dress with random_orthogonal(n, seed); default from ${SEED_ENV}")
    q.add_argument("--q-file", help="dress with the orthogonal matrix in this matrix file")
    p.add_argument("--mass", help="comma-separated mass eigenvalues in the shared basis")
    p.add_argument("--out-dir", default=".", help="directory for mass/damping/stiffness/certificate.json")

    p = sub.add_parser("verify", parents=[common], help="check a spectrum against a pencil")
    p.add_argument("--mass", required=True)
    p.add_argument("--damping", required=True)
    p.add_argument("--stiffness", required=True)
    p.add_argument("--spectrum", required=True)
    p.add_argument("--tol", type=float, default=ORACLE_TOL, help="matching tolerance (default %(default)g)")
    return parser


def _run(args, tol):
    if args.command == "decompose":
        return cmd_decompose(args.matrix, tol)
    if args.command == "power":
        return cmd_power(args.matrix, args.k, tol)
    if args.command == "forward":
        return cmd_forward(args.mass, args.damping, args.stiffness, tol, oracle=not args.no_oracle)
    if args.command == "inverse":
        masses = None if args.mass is None else _parse_masses(args.mass)
        return cmd_inverse(args.spectrum, args.out_dir, tol, args.q_seed, args.q_file, masses)
    if args.command == "verify":
        return cmd_verify(args.mass, args.damping, args.stiffness, args.spectrum, tol, args.tol)
    raise AssertionError(args.command)


def _summary(command, status, payload):
    if status != "ok":
        return f"{command}: {status}: {payload.get('error', '')}"
    keys = [k for k in ("n", "eigenvalues", "spectrum", "round_trip_residual", "oracle_residual",
                        "forward_residual", "residual") if k in payload]
    parts = []
    for k in keys:
        v = payload[k]
        if isinstance(v, (list, np.ndarray)):
            v = ", ".join(f"{complex(x):.6g}" if isinstance(x, complex) else f"{float(x):.6g}" for x in v)
        elif isinstance(v, float):
            v = f"{v:.3g}"
        parts.append(f"{k}={v}")
    return f"{command}: ok: " + "; ".join(parts)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    tol = DEFAULT_TOLERANCES
    try:
        tol = _tolerances_from(args)
        payload = _run(args, tol)
        status, code = "ok", 0
    except PencilSpecError as exc:
        payload = dict(getattr(exc, "payload", {}))
        payload["error"] = str(exc)
        status, code = exc.code, exc.exit_code
    except Exception as exc:  # noqa: BLE001 - last-resort mapping to exit 1
        payload = {"error": f"{type(exc).__name__}: {exc}"}
        status, code = "internal_error", 1

    envelope = {
        "status": status,
        "payload": payload,
        "tolerances": tol.as_dict(),
        "tool_version": __version__,
    }
    text = dumps(envelope)
    sys.stdout.write(text)
    if args.output:
        Path(args.output).write_text(text)
    if not args.quiet:
        print(_summary(args.command, status, payload), file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
