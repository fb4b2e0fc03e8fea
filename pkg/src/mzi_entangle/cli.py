"""Command-line front end.

    mzi-entangle run --atom-u 0.7071,0.7071 --atom-l 0.7071,0.7071
    mzi-entangle run --mixture 0.8
    mzi-entangle sweep --grid 0:1:0.25
    mzi-entangle purify --fidelity-grid 0:1:0.1
    mzi-entangle selftest --seed 42

Exit codes: 0 success, 1 self-test failure, 2 invalid input.
"""
from __future__ import annotations

import argparse
import cmath
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from .analysis import entanglement_report, purification_report, sweep_success
from .atoms import BELL_STATES, AtomAmplitudes
from .errors import InvalidInputError
from .protocol import ProtocolConfig, atom_input, bell_mixture, run
from .selftest import DEFAULT_SEED, run_all
from .state import INPUT_TOL

EXIT_OK, EXIT_SELFTEST_FAILED, EXIT_INVALID = 0, 1, 2

# amplitudes typed as decimals (0.7071) cannot be exactly normalized; within this
# squared-norm defect they are renormalized, beyond it they are rejected
DECIMAL_ENTRY_TOL = 1e-4
MAX_GRID_POINTS = 1_000_000


class UsageError(Exception):
    def __init__(self, flag: str, message: str):
        super().__init__(f"{flag}: {message}")


def _number(x):
    if x is None:
        return None
    v = float(f"{float(x):.12g}")
    return 0.0 if v == 0 else v


def _complex_pair(z: complex) -> list:
    return [_number(z.real), _number(z.imag)]


def _csv_cell(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return repr(_number(x))
    return str(x)


def parse_amplitude(text: str) -> complex:
    """``0.6``, ``0.5+0.5j`` (or ``i``), or polar ``r@theta`` with theta in radians."""
    text = text.strip()
    try:
        if "@" in text:
            r, theta = text.split("@")
            z = cmath.rect(float(r), float(theta))
        else:
            z = complex(text.replace("i", "j").replace(" ", ""))
    except ValueError:
        raise ValueError(f"cannot parse amplitude {text!r}") from None
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError(f"amplitude {text!r} is not finite")
    return z


def parse_atom(flag: str, text: str, normalize: bool) -> AtomAmplitudes:
    parts = text.split(",")
    if len(parts) != 2:
        raise UsageError(flag, f"expected two comma-separated amplitudes 'c_plus,c_minus', got {text!r}")
    try:
        cp, cm = (parse_amplitude(p) for p in parts)
    except ValueError as exc:
        raise UsageError(flag, str(exc)) from None
    norm2 = abs(cp) ** 2 + abs(cm) ** 2
    if not normalize and abs(norm2 - 1) > DECIMAL_ENTRY_TOL:
        raise UsageError(
            flag, f"amplitudes not normalized: |c+|^2 + |c-|^2 = {norm2:.6g} (pass --normalize to rescale)"
        )
    try:
        if abs(norm2 - 1) <= INPUT_TOL:
            return AtomAmplitudes(cp, cm)
        return AtomAmplitudes.normalized(cp, cm)
    except InvalidInputError as exc:
        raise UsageError(flag, str(exc)) from None


def parse_grid(flag: str, text: str) -> list[float]:
    """``start:stop:step`` (inclusive) or a comma-separated list."""
    try:
        if ":" in text:
            start, stop, step = (float(p) for p in text.split(":"))
            if not all(math.isfinite(v) for v in (start, stop, step)):
                raise ValueError
            if stop < start:
                raise UsageError(flag, f"stop {stop} is below start {start}")
            if step <= 0 and stop > start:
                raise UsageError(flag, f"step must be positive, got {step}")
            n = 1 if stop == start else int(math.floor((stop - start) / step + 1e-9)) + 1
            if n > MAX_GRID_POINTS:
                raise UsageError(flag, f"grid has {n} points, limit is {MAX_GRID_POINTS}")
            values = [round(start + k * step, 12) for k in range(n)]
        else:
            values = [float(p) for p in text.split(",")]
    except ValueError:
        raise UsageError(flag, f"malformed grid {text!r}; expected start:stop:step or a comma list") from None
    bad = [v for v in values if not (math.isfinite(v) and 0 <= v <= 1)]
    if bad:
        raise UsageError(flag, f"grid values must lie in [0, 1], got {bad[0]}")
    return sorted(values)


def _load_joint_state(flag: str, path: str):
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        arr = np.array(data, dtype=float)
    except (OSError, ValueError, TypeError) as exc:
        raise UsageError(flag, f"cannot read {path}: {exc}") from None
    if arr.shape == (9, 2):
        return arr[:, 0] + 1j * arr[:, 1]
    if arr.shape == (9, 9, 2):
        return arr[..., 0] + 1j * arr[..., 1]
    raise UsageError(flag, f"expected 9 [re, im] pairs or a 9x9 matrix of pairs, got shape {arr.shape}")


def build_config(args) -> tuple[ProtocolConfig, dict]:
    joint_flags = [f for f, v in (("--joint-state", args.joint_state), ("--bell", args.bell),
                                  ("--mixture", args.mixture)) if v is not None]
    atom_flags = [f for f, v in (("--atom-u", args.atom_u), ("--atom-l", args.atom_l)) if v is not None]
    if len(joint_flags) > 1 or (joint_flags and atom_flags):
        raise UsageError((joint_flags + atom_flags)[1], "conflicts with " + (joint_flags + atom_flags)[0])
    common = dict(
        atom_u_present=args.atom_u_present,
        atom_l_present=args.atom_l_present,
        photon_port=args.port,
        photon_pol=args.pol,
        normalize=args.normalize,
    )
    if args.mixture is not None:
        try:
            joint = bell_mixture(args.mixture)
        except InvalidInputError as exc:
            raise UsageError("--mixture", str(exc)) from None
        described = {"mixture": _number(args.mixture)}
    elif args.bell is not None:
        joint = np.array(BELL_STATES[args.bell])
        described = {"bell": args.bell}
    elif args.joint_state is not None:
        joint = _load_joint_state("--joint-state", args.joint_state)
        described = {"joint_state": args.joint_state}
    else:
        balanced = AtomAmplitudes(1 / math.sqrt(2), 1 / math.sqrt(2))
        u = parse_atom("--atom-u", args.atom_u, args.normalize) if args.atom_u else balanced
        l = parse_atom("--atom-l", args.atom_l, args.normalize) if args.atom_l else balanced
        config = ProtocolConfig(atom_u=u, atom_l=l, **common)
        described = {
            "atom_u": [_complex_pair(u.c_plus), _complex_pair(u.c_minus)],
            "atom_l": [_complex_pair(l.c_plus), _complex_pair(l.c_minus)],
        }
        return config, described
    try:
        config = ProtocolConfig(joint_input=joint, **common)
        atom_input(config)
    except InvalidInputError as exc:
        raise UsageError(joint_flags[0], str(exc)) from None
    return config, described


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_csv_cell(x) for x in row])
    return buf.getvalue()


def cmd_run(args) -> int:
    config, described = build_config(args)
    records = run(config)
    reports = [entanglement_report(r) for r in records]
    if args.format == "csv":
        header = ["outcome", "probability", "fidelity_singlet", "concurrence", "qubit_leakage"]
        rows = [[r.outcome, r.probability, r.fidelity_singlet, r.concurrence, r.qubit_leakage] for r in reports]
        _emit(_csv(header, rows), args.output)
        return EXIT_OK
    outcomes = []
    for rec, rep in zip(records, reports):
        cond = rec.conditional_atoms
        outcomes.append({
            "outcome": rec.outcome,
            "probability": _number(rec.probability),
            "conditional_atoms": None if cond is None else [[_complex_pair(z) for z in row] for row in cond],
            "fidelity_singlet": _number(rep.fidelity_singlet),
            "concurrence": _number(rep.concurrence),
            "qubit_leakage": _number(rep.qubit_leakage),
        })
    doc = {
        "config": {
            "input": described,
            "atom_u_present": config.atom_u_present,
            "atom_l_present": config.atom_l_present,
            "photon_port": config.photon_port,
            "photon_pol": config.photon_pol,
        },
        "outcomes": outcomes,
    }
    _emit(json.dumps(doc, indent=2) + "\n", args.output)
    return EXIT_OK


def cmd_sweep(args) -> int:
    grid = parse_grid("--grid", args.grid)
    rows = sweep_success(grid)
    if args.format == "json":
        doc = [{"x": _number(r.x), "p_success": _number(r.p_success), "concurrence": _number(r.concurrence)}
               for r in rows]
        _emit(json.dumps(doc, indent=2) + "\n", args.output)
    else:
        _emit(_csv(["x", "p_success", "concurrence"], [[r.x, r.p_success, r.concurrence] for r in rows]),
              args.output)
    return EXIT_OK


def cmd_purify(args) -> int:
    grid = parse_grid("--fidelity-grid", args.fidelity_grid)
    rows = purification_report(grid)
    fields = ["F", "p_dl", "fid_dl", "p_du", "fid_du", "beats_pure_max"]
    values = [[getattr(r, f) for f in fields] for r in rows]
    if args.format == "json":
        doc = [{f: (v if isinstance(v, bool) else _number(v)) for f, v in zip(fields, row)} for row in values]
        _emit(json.dumps(doc, indent=2) + "\n", args.output)
    else:
        _emit(_csv(fields, values), args.output)
    return EXIT_OK


def cmd_selftest(args) -> int:
    results = run_all(args.seed)
    lines = [r.line() for r in results]
    passed = all(r.passed for r in results)
    lines.append(f"{sum(r.passed for r in results)}/{len(results)} suites passed")
    _emit("\n".join(lines) + "\n", args.output)
    return EXIT_OK if passed else EXIT_SELFTEST_FAILED


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", metavar="PATH", help="write results here instead of stdout")

    ap = argparse.ArgumentParser(
        prog="mzi-entangle",
        description="Heralded two-atom entanglement in a Mach-Zehnder interferometer.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", parents=[common], help="simulate one configuration")
    p.add_argument("--atom-u", metavar="C+,C-", help="upper-arm atom amplitudes (default balanced)")
    p.add_argument("--atom-l", metavar="C+,C-", help="lower-arm atom amplitudes (default balanced)")
    p.add_argument("--joint-state", metavar="FILE", help="JSON two-atom ket (9 [re,im]) or density matrix (9x9)")
    p.add_argument("--bell", choices=sorted(BELL_STATES), help="start from a Bell state")
    p.add_argument("--mixture", type=float, metavar="F", help="F |Psi+><Psi+| + (1-F) |Phi+><Phi+|")
    p.add_argument("--no-atom-u", dest="atom_u_present", action="store_false", help="upper arm empty")
    p.add_argument("--no-atom-l", dest="atom_l_present", action="store_false", help="lower arm empty")
    p.add_argument("--port", choices=["lower", "upper"], default="lower", help="input port of the photon")
    p.add_argument("--pol", choices=["+", "-"], default="+", help="photon polarization")
    p.add_argument("--normalize", action="store_true", help="rescale unnormalized inputs instead of rejecting")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", parents=[common], help="success probability over |a|^2 for identical atoms")
    p.add_argument("--grid", required=True, metavar="START:STOP:STEP")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("purify", parents=[common], help="Bell-mixture input over a fidelity grid")
    p.add_argument("--fidelity-grid", default="0:1:0.1", metavar="START:STOP:STEP")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.set_defaults(func=cmd_purify)

    p = sub.add_parser("selftest", parents=[common], help="run the oracle and invariant suites")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.set_defaults(func=cmd_selftest)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    raise SystemExit(main())
