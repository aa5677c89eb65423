"""Command-line entry point ``xstates``.

Exit codes: 0 success, 1 a verification or concordance check failed,
2 bad input (arguments, tolerance overrides, malformed state files).

Every subcommand writes machine-readable records to stdout (or ``--output``).
JSON-lines output opens with a ``{"record": "header", ...}`` line and CSV
output with ``#`` comment lines; both echo the tolerances in force.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from contextlib import contextmanager
from typing import Sequence

import numpy as np

from . import __version__
from ._tolerances import DEFAULT_TOLERANCES, Tolerances
from .io import StateFileError, read_states
from .orbits import (
    KIND_BY_CODE,
    classify_rows,
    compose_rows,
    diagonalize_rows,
    gram_batch,
    mu_values_rows,
    as_rows,
)
from .sampling import Measure, SamplerConfig, region_points, sample_xstate_rows, REGION_FIELDS
from .sampling import FULL_ORDER_VERTICES, SPECTRUM_VERTICES, TETRAHEDRON_VERTICES, embed
from .separability import (
    ZETA_CRITICAL,
    verdict_from_slacks,
    critical_ratio,
    degenerate_criterion,
    degenerate_discrepancy_grid,
    elementwise_slacks_rows,
    pt_min_eigenvalue_closed_rows,
    pt_min_eigenvalue_rows,
    spectrum_angle_slacks,
    werner_threshold,
)
from .state import rows_to_dense, werner_state
from .su4 import run_all_identity_checks

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    """Raised for problems that map to exit code 2."""


# --- output ------------------------------------------------------------------

class RecordWriter:
    """Streams dict records as JSON lines or CSV with a tolerance header."""

    def __init__(self, stream, fmt: str, command: str, tol: Tolerances, extra: dict | None = None):
        self.stream = stream
        self.fmt = fmt
        self.header = {"record": "header", "command": command, "version": __version__,
                       "tolerances": tol.as_dict(), **(extra or {})}
        self._csv = None
        self._fields = None
        if fmt == "jsonl":
            self._line(json.dumps(self.header))
        else:
            tols = ",".join(f"{k}={v:g}" for k, v in tol.as_dict().items())
            self._line(f"# command: {command}")
            self._line(f"# tolerances: {tols}")
            for key, value in (extra or {}).items():
                self._line(f"# {key}: {json.dumps(value)}")

    def _line(self, text: str):
        self.stream.write(text + "\n")

    def write(self, record: dict):
        if self.fmt == "jsonl":
            self._line(json.dumps(record, default=_jsonable))
            return
        if self._csv is None:
            self._fields = list(record)
            self._csv = csv.DictWriter(self.stream, fieldnames=self._fields, lineterminator="\n")
            self._csv.writeheader()
        self._csv.writerow({k: _csv_value(record.get(k)) for k in self._fields})


def _jsonable(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serialisable: {type(obj).__name__}")


def _csv_value(v):
    if isinstance(v, (bool, np.bool_)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (list, tuple, dict)):
        return json.dumps(v, default=_jsonable)
    return v


@contextmanager
def _open_output(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def _load_rows(path: str, fmt: str | None, tol: Tolerances) -> np.ndarray:
    try:
        if path == "-":
            states = read_states(sys.stdin, fmt, tol)
        else:
            with open(path, encoding="utf-8") as fh:
                states = read_states(fh, fmt, tol)
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror or exc}") from exc
    except StateFileError as exc:
        raise InputError(f"{path}: {exc}") from exc
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from exc
    if not states:
        raise InputError(f"{path}: no states found")
    return as_rows(states)


def _input_format(args) -> str | None:
    return None if args.input_format == "auto" else args.input_format


# --- verify ------------------------------------------------------------------

def _concordance_checks(n: int, seed: int, tol: Tolerances) -> list[dict]:
    """Sampled orbit and separability concordance checks."""
    out = []

    rows = sample_xstate_rows(SamplerConfig(Measure.SPECTRUM_UNIFORM, seed, n))
    ev = np.sort(np.linalg.eigvalsh(gram_batch(rows_to_dense(rows))), axis=1)[:, ::-1]
    mu = np.sort(mu_values_rows(rows), axis=1)[:, ::-1]
    expected = np.column_stack([mu[:, 0], mu[:, 0], mu[:, 1], mu[:, 1], np.zeros((n, 3))])
    dev = float(np.abs(ev - expected).max())
    out.append(_check_record("gram spectrum pairing", n, int(np.sum(np.abs(ev - expected).max(axis=1) <= 1e-9)),
                             dev, 1e-9))

    # mix in degenerate spectra so both classification routes see every kind
    spectra, angles = diagonalize_rows(rows)
    k = n // 4
    spectra[:k, 1] = spectra[:k, 0]
    spectra[k:2 * k, 3] = spectra[k:2 * k, 2]
    spectra[2 * k:3 * k] = 0.25
    mixed = compose_rows(spectra, angles)
    by_mu, m1 = classify_rows(mixed, tol, "mu")
    by_spec, m2 = classify_rows(mixed, tol, "spectrum")
    firm = ~(m1 | m2)
    agree = int(np.sum(by_mu[firm] == by_spec[firm]))
    out.append(_check_record("orbit type agreement", int(firm.sum()), agree, 0.0, 0.0))

    spectra, angles = diagonalize_rows(rows)
    dev_rt = float(np.abs(compose_rows(spectra, angles) - rows).max())
    out.append(_check_record("diagonalization round trip", n,
                             n if dev_rt <= 1e-10 else 0, dev_rt, 1e-10))

    prow = sample_xstate_rows(SamplerConfig(Measure.PARAM_UNIFORM_REJECTION, seed, n))
    for name, r in (("element-wise vs oracle (param-uniform)", prow),
                    ("element-wise vs oracle (spectrum-uniform)", rows)):
        oracle = pt_min_eigenvalue_rows(r)
        slack = elementwise_slacks_rows(r).min(axis=1)
        firm = (np.abs(oracle) > tol.band) & (np.abs(slack) > tol.band)
        agree = int(np.sum((oracle[firm] >= 0) == (slack[firm] >= 0)))
        closed = float(np.abs(oracle - pt_min_eigenvalue_closed_rows(r)).max())
        out.append(_check_record(name, int(firm.sum()), agree, closed, tol.spectral))

    oracle = pt_min_eigenvalue_rows(rows)
    ineq = spectrum_angle_slacks(spectra, angles[:, 0], angles[:, 2]).min(axis=1)
    firm = (np.abs(oracle) > tol.band) & (np.abs(ineq) > tol.band)
    agree = int(np.sum((oracle[firm] >= 0) == (ineq[firm] >= 0)))
    out.append(_check_record("inequalities vs oracle", int(firm.sum()), agree, 0.0, 0.0))

    p = werner_threshold()
    out.append(_check_record("werner threshold", 1, int(abs(p - 1 / 3) <= 1e-9), abs(p - 1 / 3), 1e-9))
    z = critical_ratio()
    bound, _ = degenerate_criterion(ZETA_CRITICAL)
    dev = max(abs(z - ZETA_CRITICAL), abs(bound - 1.0))
    out.append(_check_record("critical ratio", 1, int(dev <= 1e-9), dev, 1e-9))
    return out


def _check_record(name, checked, matched, max_dev, tol, unit="") -> dict:
    return {"record": "check", "check": name, "passed": bool(matched == checked),
            "checked": int(checked), "matched": int(matched),
            "max_deviation": float(max_dev), "tol": float(tol), "unit": unit}


def cmd_verify(args, tol: Tolerances) -> int:
    units = {"commutator table": "commutators", "P_pi conjugation": "identities",
             "pseudospin relations": "relations", "cartan split": "pairs",
             "alpha_X closure": "pairs", "basis transcription": "generators"}
    records = []
    for rep in run_all_identity_checks():
        rec = _check_record(rep.name, rep.checked, rep.matched, rep.max_deviation, rep.tol,
                            units.get(rep.name, ""))
        rec["passed"] = rep.passed
        rec["failures"] = rep.failures
        rec["notes"] = rep.notes
        records.append(rec)
    records.extend(_concordance_checks(args.count, args.seed, tol))

    fmt = args.format or "jsonl"
    with _open_output(args.output) as out:
        w = RecordWriter(out, fmt, "verify", tol, {"seed": args.seed, "count": args.count})
        for rec in records:
            if fmt == "csv":
                rec = {k: v for k, v in rec.items() if k not in ("failures", "notes")}
            w.write(rec)

    table = sys.stderr if args.output in (None, "-") else sys.stdout
    width = max(len(r["check"]) for r in records)
    print(f"{'check':<{width}}  status  result", file=table)
    for r in records:
        status = "PASS" if r["passed"] else "FAIL"
        unit = f" {r['unit']}" if r["unit"] else ""
        print(f"{r['check']:<{width}}  {status}    {r['matched']}/{r['checked']}{unit}"
              f"  (max dev {r['max_deviation']:.1e})", file=table)
    ok = all(r["passed"] for r in records)
    print("all checks passed" if ok else "VERIFICATION FAILED", file=table)
    return EXIT_OK if ok else EXIT_FAIL


# --- classify / check-sep ----------------------------------------------------

def cmd_classify(args, tol: Tolerances) -> int:
    rows = _load_rows(args.input, _input_format(args), tol)
    codes, marginal = classify_rows(rows, tol, "mu")
    mu = mu_values_rows(rows)
    spectra, angles = diagonalize_rows(rows)
    with _open_output(args.output) as out:
        w = RecordWriter(out, args.format or "jsonl", "classify", tol)
        for i in range(rows.shape[0]):
            kind = KIND_BY_CODE[int(codes[i])]
            w.write({"index": i, "orbit_kind": kind.value, "marginal": bool(marginal[i]),
                     "orbit_dim": kind.orbit_dim, "isotropy_dim": kind.isotropy_dim,
                     "mu1": float(mu[i, 0]), "mu2": float(mu[i, 1]),
                     **dict(zip(("r1", "r2", "r3", "r4"), map(float, spectra[i]))),
                     **dict(zip(("phi1", "psi1", "phi2", "psi2"), map(float, angles[i])))})
    return EXIT_OK


def cmd_check_sep(args, tol: Tolerances) -> int:
    rows = _load_rows(args.input, _input_format(args), tol)
    slacks = elementwise_slacks_rows(rows)
    oracle = pt_min_eigenvalue_rows(rows)
    spectra, angles = diagonalize_rows(rows)
    ineq = spectrum_angle_slacks(spectra, angles[:, 0], angles[:, 2])
    status = EXIT_OK
    with _open_output(args.output) as out:
        w = RecordWriter(out, args.format or "jsonl", "check-sep", tol)
        for i in range(rows.shape[0]):
            v = verdict_from_slacks(slacks[i, 0], slacks[i, 1], tol.band)
            oracle_sep = bool(oracle[i] >= -tol.spectral)
            ineq_sep = bool(ineq[i].min() >= -tol.band)
            concordant = v.marginal or (oracle_sep == v.separable == ineq_sep)
            if not concordant:
                status = EXIT_FAIL
            w.write({"index": i, **v.as_dict(),
                     "slack_first": float(slacks[i, 0]), "slack_second": float(slacks[i, 1]),
                     "oracle_min_eigenvalue": float(oracle[i]), "oracle_separable": oracle_sep,
                     "inequalities_separable": ineq_sep, "concordant": concordant})
    return status


# --- sample ------------------------------------------------------------------

def cmd_sample(args, tol: Tolerances) -> int:
    try:
        cfg = SamplerConfig(Measure(args.measure), args.seed, args.count)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    rows = sample_xstate_rows(cfg)
    fmt = args.format or "csv"
    extra = {"measure": cfg.measure.value, "seed": cfg.seed, "count": cfg.count}
    with _open_output(args.output) as out:
        w = RecordWriter(out, fmt, "sample", tol, extra)
        for row in rows:
            d = [float(v) for v in row[:4]]
            if fmt == "jsonl":
                w.write({"d": d, "c14": {"re": float(row[4]), "im": float(row[5])},
                         "c23": {"re": float(row[6]), "im": float(row[7])}})
            else:
                w.write(dict(zip(("d1", "d2", "d3", "d4", "c14re", "c14im", "c23re", "c23im"),
                                 (float(v) for v in row))))
    return EXIT_OK


# --- sweep -------------------------------------------------------------------

def _float_list(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def cmd_sweep(args, tol: Tolerances) -> int:
    fmt = args.format or "csv"
    if args.family == "werner":
        if args.points < 2:
            raise InputError("--points must be >= 2")
        p_star = werner_threshold()
        ps = np.linspace(0.0, 1.0, args.points)
        rows = as_rows([werner_state(p) for p in ps])
        oracle = pt_min_eigenvalue_rows(rows)
        slack = elementwise_slacks_rows(rows).min(axis=1)
        with _open_output(args.output) as out:
            w = RecordWriter(out, fmt, "sweep werner", tol, {"threshold": p_star})
            for p, o, s in zip(ps, oracle, slack):
                w.write({"p": float(p), "oracle_min_eigenvalue": float(o),
                         "oracle_separable": bool(o >= -tol.spectral),
                         "elementwise_margin": float(s), "separable": bool(s >= -tol.band)})
        return EXIT_OK

    zetas = args.zeta or [0.0, 0.05, 0.1, ZETA_CRITICAL, 0.2, 0.4, 0.6, 0.8, 0.95]
    r1s = args.r1 or [0.05, 0.1, 0.2, 0.3, 0.4, 0.45]
    for z in zetas:
        if not 0.0 <= z < 1.0:
            raise InputError(f"zeta values must lie in [0, 1), got {z}")
    for r in r1s:
        if not 0.0 <= r <= 0.5:
            raise InputError(f"r1 values must lie in [0, 0.5], got {r}")
    if args.n_phi < 2:
        raise InputError("--n-phi must be >= 2")
    checks = degenerate_discrepancy_grid(zetas, r1s, args.n_phi, tol)
    summaries = [c.summary() for c in checks]
    consistent = all(c.oracle_consistent for c in checks)
    with _open_output(args.output) as out:
        w = RecordWriter(out, fmt, "sweep degenerate", tol,
                         {"zetas": zetas, "r1": r1s, "n_phi": args.n_phi})
        for c in checks:
            for rec in c.rows():
                w.write(rec)
    if args.report:
        report = {
            "tolerances": tol.as_dict(),
            "grid": {"zetas": zetas, "r1": r1s, "n_phi": args.n_phi},
            "overall_agreement_rate": float(np.mean([s["agreement_rate"] for s in summaries])),
            "oracle_consistent": consistent,
            "cases": summaries,
        }
        with open(args.report, "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=2, default=_jsonable)
    return EXIT_OK if consistent else EXIT_FAIL


# --- region-export -----------------------------------------------------------

def cmd_region_export(args, tol: Tolerances) -> int:
    if args.resolution < 2:
        raise InputError(f"--resolution must be >= 2, got {args.resolution}")
    spectra, xyz, abs_sep, full_order = region_points(args.resolution, tol.band, tol.structural)
    fmt = args.format or "csv"
    vertices = {name: {"r": SPECTRUM_VERTICES[name].tolist(), "xyz": TETRAHEDRON_VERTICES[name].tolist()}
                for name in "ABCD"}
    for name in ("C'", "D'"):
        r = FULL_ORDER_VERTICES[name]
        vertices[name] = {"r": r.tolist(), "xyz": embed(r)[0].tolist()}
    with _open_output(args.output) as out:
        w = RecordWriter(out, fmt, "region-export", tol,
                         {"resolution": args.resolution, "vertices": vertices})
        for r, p, a, f in zip(spectra, xyz, abs_sep, full_order):
            w.write(dict(zip(REGION_FIELDS, (*map(float, r), *map(float, p), bool(a), bool(f)))))
    return EXIT_OK


# --- parser ------------------------------------------------------------------

def _tolerance(text: str) -> float:
    try:
        value = float(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from exc
    if not (math.isfinite(value) and 0.0 < value <= 1e-3):
        raise argparse.ArgumentTypeError(f"tolerance must lie in (0, 1e-3], got {text}")
    return value


def _seed(text: str) -> int:
    try:
        value = int(text, 0)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from exc
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return value


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from exc
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("jsonl", "csv"), default=None,
                        help="output format (default depends on the command)")
    common.add_argument("--tol-structural", type=_tolerance, default=None, metavar="TOL",
                        help=f"validation tolerance (default {DEFAULT_TOLERANCES.structural:g})")
    common.add_argument("--tol-band", type=_tolerance, default=None, metavar="TOL",
                        help=f"marginal band half-width (default {DEFAULT_TOLERANCES.band:g})")
    common.add_argument("-o", "--output", default=None, help="output file (default stdout)")

    state_input = argparse.ArgumentParser(add_help=False)
    state_input.add_argument("input", help="state file (JSON, JSON lines or CSV rows); '-' for stdin")
    state_input.add_argument("--input-format", choices=("auto", "json", "csv"), default="auto")

    parser = argparse.ArgumentParser(prog="xstates", description="Two-qubit X-state toolkit.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", parents=[common],
                       help="run the algebra identity suite and sampled concordance checks")
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--count", type=_positive_int, default=2000)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("classify", parents=[common, state_input], help="orbit type of each state")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("check-sep", parents=[common, state_input],
                       help="PPT separability verdict of each state")
    p.set_defaults(func=cmd_check_sep)

    p = sub.add_parser("sample", parents=[common], help="seeded random X-states")
    p.add_argument("--measure", choices=[m.value for m in Measure], default=Measure.SPECTRUM_UNIFORM.value)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--count", type=_positive_int, default=10)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("sweep", parents=[common], help="parameter sweeps")
    p.add_argument("family", choices=("werner", "degenerate"))
    p.add_argument("--points", type=int, default=101, help="werner: grid size")
    p.add_argument("--zeta", type=_float_list, default=None, help="degenerate: comma-separated r4/r3 values")
    p.add_argument("--r1", type=_float_list, default=None, help="degenerate: comma-separated r1 = r2 values")
    p.add_argument("--n-phi", type=int, default=91, help="degenerate: phi2 grid size")
    p.add_argument("--report", default=None, help="degenerate: write a JSON summary here")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("region-export", parents=[common],
                       help="absolute-separability point cloud over the spectrum tetrahedron")
    p.add_argument("--resolution", type=int, default=20)
    p.set_defaults(func=cmd_region_export)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        tol = DEFAULT_TOLERANCES.with_overrides(structural=args.tol_structural, band=args.tol_band)
        started = time.perf_counter()
        code = args.func(args, tol)
    except InputError as exc:
        print(f"xstates {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"xstates {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.command == "verify":
        print(f"elapsed {time.perf_counter() - started:.2f} s", file=sys.stderr)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
