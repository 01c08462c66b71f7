"""Command-line front end.

Loads a model (builtin or JSON file), runs one analysis stage or the whole
pipeline, and emits a human-readable summary or a schema-stable JSON
document. Exit codes separate the four outcomes CI cares about:

    0  analysis completed (whatever the verdict)
    2  usage or model error (bad arguments, bad file, unknown builtin)
    3  numerical failure
    4  closure stopped by the basis cap: verdict inconclusive

JSON reports are deterministic for a fixed configuration: keys are sorted,
floats are rounded to 10 significant digits, complex numbers appear as
[re, im] pairs. Timing fields are the one intentional exception.
"""

from __future__ import annotations

import argparse
import ast
import json
import math
import sys

import numpy as np

from . import __version__
from .closure import (
    INCONCLUSIVE,
    ClosureResult,
    certify_uniqueness,
    commutant,
)
from .liouvillian import NumericalFailure, assemble, spectrum
from .modelspec import (
    ModelParseError,
    ModelSpec,
    ModelValidationError,
    build_builtin,
    load_model,
)
from .ness import (
    TRIVIAL_COMMUTANT,
    NONTRIVIAL_COMMUTANT,
    NessReport,
    full_verdict,
    per_sector_ness,
    steady_states,
)
from .symmetry import resolve_symmetry, sector_decompose, verify_invariant_blocks

SCHEMA_VERSION = "1"
COMMAND_HELP = {
    "check": "decide the uniqueness certificate (closure verdict only)",
    "ness": "solve for steady states numerically",
    "sectors": "per-sector analysis under the model's declared symmetry",
    "closure": "operator-algebra closure with full diagnostics",
    "commutant": "commutant of {H, L, L†} (uniqueness cross-check)",
    "spectrum": "eigenvalues of the vectorized generator",
    "full": "everything: certificate, commutant, sectors, kernel, checks",
}


# ---------------------------------------------------------------------------
# JSON conversion


def _round_float(v: float):
    if not math.isfinite(v):
        return None
    return float(f"{v:.10g}")


def to_jsonable(x):
    """Recursively convert report objects into JSON-safe primitives."""
    if x is None or isinstance(x, (bool, str, int)):
        return x
    if isinstance(x, float):
        return _round_float(x)
    if isinstance(x, complex):
        return [_round_float(x.real), _round_float(x.imag)]
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return _round_float(float(x))
    if isinstance(x, np.complexfloating):
        return [_round_float(float(x.real)), _round_float(float(x.imag))]
    if isinstance(x, np.ndarray):
        return to_jsonable(x.tolist())
    if isinstance(x, dict):
        return {str(k): to_jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [to_jsonable(v) for v in x]
    if hasattr(x, "mat"):  # Operator
        return to_jsonable(x.mat.tolist())
    raise TypeError(f"cannot serialize {type(x).__name__}")


def _closure_dict(c: ClosureResult) -> dict:
    return {
        "generated_dim": c.generated_dim,
        "full_dim_target": c.full_dim_target,
        "rounds": c.rounds,
        "saturated": c.saturated,
        "tol_used": c.tol_used,
        "min_accepted_ratio": c.min_accepted_ratio,
        "max_rejected_ratio": c.max_rejected_ratio,
    }


def _ness_dict(r: NessReport) -> dict:
    out = {
        "generation_verdict": r.generation_verdict,
        "closure": _closure_dict(r.closure) if r.closure else None,
        "all_lindblads_hermitian": r.all_lindblads_hermitian,
        "mixed_state_residual": r.mixed_state_residual,
        "frigerio_verdict": r.frigerio_verdict,
        "commutant_dim": r.commutant.commutant_dim if r.commutant else None,
        "symmetry": r.symmetry,
        "symmetry_check": (
            {"ok": r.symmetry_check.ok, "commutator_norms": r.symmetry_check.commutator_norms}
            if r.symmetry_check
            else None
        ),
        "sector_dims": r.sectors.dims if r.sectors else None,
        "sector_eigenvalues": (
            [complex(v) for v in r.sectors.eigenvalues] if r.sectors else None
        ),
        "per_sector": (
            [
                {
                    "index": s.index,
                    "eigenvalue": s.eigenvalue,
                    "theta": s.theta,
                    "dim": s.dim,
                    "certified": s.certified,
                    "kernel_dim": s.kernel_dim,
                    "closure": _closure_dict(s.closure),
                    "state": s.state,
                    "min_eigenvalue": s.min_eigenvalue,
                    "eigenvalue_ratio": s.eigenvalue_ratio,
                    "stationarity_norm": s.stationarity_norm,
                    "distance_to_mixed": s.distance_to_mixed,
                }
                for s in r.per_sector
            ]
            if r.per_sector is not None
            else None
        ),
        "kernel_dim": r.kernel_dim,
        "kernel_cutoff": r.kernel_cutoff,
        "kernel_sigma_below": r.kernel_sigma_below,
        "kernel_sigma_above": r.kernel_sigma_above,
        "hermitian_kernel_basis": r.hermitian_kernel_basis,
        "steady_states": r.steady_states,
        "min_eigenvalues": r.min_eigenvalues,
        "eigenvalue_ratios": r.eigenvalue_ratios,
        "stationarity_norms": r.stationarity_norms,
        "canonical_state": r.canonical_state,
        "canonical_is_positive": r.canonical_is_positive,
        "consistency": [
            {"name": c.name, "passed": c.passed, "detail": c.detail} for c in r.consistency
        ],
        "timings": r.timings,
    }
    return out


# ---------------------------------------------------------------------------
# Text rendering


def _fmt(x) -> str:
    if x is None:
        return "n/a"
    if isinstance(x, float):
        return f"{x:.3e}"
    return str(x)


def _model_line(spec: ModelSpec) -> str:
    name = spec.metadata.get("builtin", "custom model")
    return f"model: {name} ({spec.n_sites} site(s), dim {spec.dim})"


def _closure_lines(c: ClosureResult) -> list:
    status = "saturated" if c.saturated else "stopped by basis cap"
    return [
        f"closure: generated {c.generated_dim} of {c.full_dim_target} dimensions "
        f"in {c.rounds} round(s), {status}",
        f"margins: min accepted ratio {_fmt(c.min_accepted_ratio)}, "
        f"max rejected ratio {_fmt(c.max_rejected_ratio)} (tol {c.tol_used:g})",
    ]


def _sector_lines(report: NessReport) -> list:
    lines = []
    if report.symmetry is not None:
        ok = report.symmetry_check.ok if report.symmetry_check else False
        lines.append(
            f"symmetry {report.symmetry}: "
            + ("verified strong symmetry" if ok else "FAILED verification; sectors skipped")
        )
    if report.per_sector:
        for s in report.per_sector:
            ev = s.eigenvalue
            lines.append(
                f"  sector {s.index}: eigenvalue {ev.real:+.4f}{ev.imag:+.4f}i, "
                f"dim {s.dim}, "
                + ("certified" if s.certified else "not certified")
                + f", kernel dim {s.kernel_dim}, "
                f"distance to mixed {_fmt(s.distance_to_mixed)}"
            )
    return lines


def _ness_lines(report: NessReport) -> list:
    lines = [f"kernel: dim {report.kernel_dim} (cutoff {_fmt(report.kernel_cutoff)})"]
    if report.canonical_state is not None:
        lines.append(
            "canonical state: positive, "
            f"min eigenvalue {_fmt(report.min_eigenvalues[0])}, "
            f"stationarity {_fmt(report.stationarity_norms[0])}"
        )
    else:
        lines.append("canonical state: none (projection not positive); kernel basis reported")
    return lines


def _consistency_line(report: NessReport) -> str:
    total = len(report.consistency)
    passed = sum(1 for c in report.consistency if c.passed)
    line = f"consistency: {passed}/{total} passed"
    for c in report.consistency:
        if not c.passed:
            line += f"\n  FAILED {c.name}: {c.detail}"
    return line


# ---------------------------------------------------------------------------
# Command implementations: each returns (payload, text, exit_code)


def _cmd_check(spec, cfg):
    cert = certify_uniqueness(spec, tol=cfg.tol, max_basis=cfg.max_basis)
    payload = {
        "generation_verdict": cert.verdict,
        "closure": _closure_dict(cert.closure),
    }
    text = "\n".join(
        [_model_line(spec), f"generation verdict: {cert.verdict}"]
        + _closure_lines(cert.closure)
    )
    return payload, text, 4 if cert.verdict == INCONCLUSIVE else 0


def _cmd_closure(spec, cfg):
    return _cmd_check(spec, cfg)


def _cmd_commutant(spec, cfg):
    ham, jumps = spec.operators()
    gens = [ham] + list(jumps) + [j.dag() for j in jumps]
    res = commutant(gens, spec.dim, tol=cfg.tol)
    verdict = TRIVIAL_COMMUTANT if res.commutant_dim == 1 else NONTRIVIAL_COMMUTANT
    payload = {"commutant_dim": res.commutant_dim, "frigerio_verdict": verdict}
    text = "\n".join(
        [
            _model_line(spec),
            f"commutant of {{H, L, L*}}: dim {res.commutant_dim} ({verdict})",
            "note: a trivial commutant implies uniqueness only if a full-rank"
            " steady state exists",
        ]
    )
    return payload, text, 0


def _cmd_spectrum(spec, cfg):
    vals = spectrum(assemble(spec))
    payload = {
        "dim": spec.dim,
        "count": len(vals),
        "max_real_part": float(vals[0].real),
        "eigenvalues": [complex(v) for v in vals],
    }
    text = "\n".join(
        [
            _model_line(spec),
            f"spectrum: {len(vals)} eigenvalues, max real part {vals[0].real:.3e}",
            "largest (by real part):",
        ]
        + [f"  {v.real:+.6e} {v.imag:+.6e}i" for v in vals[:8]]
    )
    return payload, text, 0


def _cmd_ness(spec, cfg):
    report = steady_states(spec, tol=cfg.tol)
    payload = _ness_dict(report)
    text = "\n".join([_model_line(spec)] + _ness_lines(report))
    return payload, text, 0


def _cmd_sectors(spec, cfg):
    if not spec.declared_symmetries:
        raise ModelValidationError(
            "model declares no symmetry; the sectors command needs one"
        )
    descriptor = spec.declared_symmetries[0]
    report = per_sector_ness(spec, descriptor, tol=cfg.tol)
    s_op = resolve_symmetry(descriptor, spec)
    blocks = verify_invariant_blocks(spec, sector_decompose(s_op), seed=cfg.seed)
    payload = _ness_dict(report)
    payload["invariant_blocks"] = {
        "status": blocks.status,
        "max_leak": blocks.max_leak,
        "detail": blocks.detail,
    }
    text = "\n".join(
        [_model_line(spec)]
        + _sector_lines(report)
        + [f"invariant blocks: {blocks.status} (max leak {_fmt(blocks.max_leak)})"]
        + [_consistency_line(report)]
    )
    return payload, text, 0


def _cmd_full(spec, cfg):
    report = full_verdict(spec, tol=cfg.tol, max_basis=cfg.max_basis)
    payload = _ness_dict(report)
    lines = [_model_line(spec), f"generation verdict: {report.generation_verdict}"]
    lines += _closure_lines(report.closure)
    herm = "yes" if report.all_lindblads_hermitian else "no"
    lines.append(
        f"all jump operators Hermitian: {herm}"
        + (
            f"; ||L(I/d)|| = {_fmt(report.mixed_state_residual)}"
            if report.mixed_state_residual is not None
            else ""
        )
    )
    lines.append(
        f"commutant of {{H, L, L*}}: dim {report.commutant.commutant_dim} "
        f"({report.frigerio_verdict})"
    )
    lines += _sector_lines(report)
    lines += _ness_lines(report)
    lines.append(_consistency_line(report))
    code = 4 if report.generation_verdict == INCONCLUSIVE else 0
    return payload, "\n".join(lines), code


_IMPLS = {
    "check": _cmd_check,
    "ness": _cmd_ness,
    "sectors": _cmd_sectors,
    "closure": _cmd_closure,
    "commutant": _cmd_commutant,
    "spectrum": _cmd_spectrum,
    "full": _cmd_full,
}


# ---------------------------------------------------------------------------
# Argument handling


def _parse_param(raw: str):
    if "=" not in raw:
        raise ModelValidationError(f"parameter {raw!r} is not of the form key=value")
    key, _, value = raw.partition("=")
    if not key:
        raise ModelValidationError(f"parameter {raw!r} has an empty key")
    try:
        return key, ast.literal_eval(value)
    except (ValueError, SyntaxError):
        return key, value  # strings like bond lists stay verbatim


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    source = common.add_mutually_exclusive_group(required=True)
    source.add_argument("--builtin", metavar="NAME", help="builtin model name")
    source.add_argument("--model", metavar="PATH", help="model JSON file")
    common.add_argument(
        "-p",
        "--param",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="builtin parameter, repeatable",
    )
    common.add_argument("--tol", type=float, default=1e-9, help="numerical tolerance")
    common.add_argument(
        "--max-basis", type=int, default=None, help="cap on the closure basis size"
    )
    common.add_argument("--json", action="store_true", help="emit a JSON report")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized trials")
    common.add_argument("--out", metavar="PATH", help="write the report to a file")

    parser = argparse.ArgumentParser(
        prog="lindblad-certify",
        description="uniqueness certificates and steady-state analysis for"
        " Markovian open quantum systems",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in COMMAND_HELP.items():
        sub.add_parser(name, parents=[common], help=help_text)
    return parser


def _load_spec(args) -> ModelSpec:
    params = dict(_parse_param(raw) for raw in args.param)
    if args.builtin:
        return build_builtin(args.builtin, params)
    if params:
        raise ModelValidationError("-p parameters apply only to --builtin models")
    return load_model(args.model)


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    if args.tol <= 0:
        print("error: --tol must be positive", file=sys.stderr)
        return 2

    try:
        spec = _load_spec(args)
        payload, text, code = _IMPLS[args.command](spec, args)
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except (ModelParseError, ModelValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    if args.json:
        envelope = {
            "schema_version": SCHEMA_VERSION,
            "tool": {"name": "lindblad-certify", "version": __version__},
            "command": args.command,
            "config": {"tol": args.tol, "max_basis": args.max_basis, "seed": args.seed},
            "model": to_jsonable({**spec.to_dict(), "dim": spec.dim}),
            "report": to_jsonable(payload),
        }
        rendered = json.dumps(envelope, indent=2, sort_keys=True, allow_nan=False) + "\n"
    else:
        rendered = text + "\n"

    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(rendered)
    else:
        sys.stdout.write(rendered)
    return code
