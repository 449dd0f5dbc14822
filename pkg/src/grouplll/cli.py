"""Command-line front end.

Input is a JSON document with fields ``group``, ``g``, ``delta`` and ``H``
(an array of rows whose entries are numbers or ``"p/q"`` strings), plus an
optional ``gamma`` for ``verify``.  Numbers are read from their literal text,
so nothing is lost to binary floating point.  Command-line flags override
the document.

Exit code 0 means success and 2 means the input was rejected.  Exit code 3
means the reduction hit its iteration cap or lost precision.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import DriftError, GroupLLLError, IterationCapExceeded
from .fixtures import format_fraction, is_exact, parse_exact, parse_matrix
from .generate import random_instance
from .groups import GROUP_KINDS, OMEGA_KINDS, GroupDescriptor, get_group
from .iwasawa import COMPAT_TOLERANCE, IwasawaPair, compatibility_residual, decompose, transport
from .matrix import RationalMatrix
from .reduction import DEFAULT_REORTHO, DRIVERS, check_delta, lovasz_report, reduce

DEFAULT_DELTA = 0.75
EXIT_OK, EXIT_INPUT, EXIT_ITERATION = 0, 2, 3


class InputError(ValueError):
    """Unreadable or inconsistent command input."""


@dataclass
class JobSpec:
    command: str
    group: str
    g: Optional[int]
    delta: float
    H: Optional[list] = None
    gamma: Optional[list] = None
    max_iter: Optional[int] = None
    reortho_every: int = DEFAULT_REORTHO
    tol: float = COMPAT_TOLERANCE
    seed: int = 0
    trace: bool = False
    driver: str = "generic"
    omega: str = "entries"

    def descriptor(self) -> GroupDescriptor:
        try:
            return get_group(self.group, self.g)
        except (ValueError, TypeError, KeyError) as exc:
            raise InputError(str(exc)) from exc


# ----------------------------------------------------------------------
# helpers


def _float_list(a) -> list:
    return np.asarray(a, dtype=float).tolist()


def _int_rows(gamma) -> list:
    return [[int(x) for x in row] for row in np.asarray(gamma, dtype=object).tolist()]


def _exact_rows(m: RationalMatrix) -> list:
    return [[format_fraction(x) for x in row] for row in m.tolist()]


def _read_matrix(rows, desc: GroupDescriptor, what: str):
    try:
        vals, sigma = parse_matrix(rows)
    except (ValueError, TypeError) as exc:
        raise InputError(f"cannot read {what}: {exc}") from exc
    if vals.shape != (desc.dim, desc.dim):
        raise InputError(f"{what} must be {desc.dim}x{desc.dim}, got {vals.shape[0]}x{vals.shape[1]}")
    return vals, sigma


def _gamma_matrix(rows, desc: GroupDescriptor) -> np.ndarray:
    vals, _ = _read_matrix(rows, desc, "gamma")
    if not np.array_equal(vals, np.round(vals)):
        raise InputError("gamma must have integer entries")
    return np.array([[int(x) for x in r] for r in np.round(vals).astype(np.int64).tolist()],
                    dtype=object)


def _decomposition(spec: JobSpec, desc: GroupDescriptor):
    """``(pair, exact H or None, info dict)`` for the job's Gram matrix."""
    if spec.H is None:
        raise InputError("no Gram matrix H given")
    vals, sigma = _read_matrix(spec.H, desc, "H")
    exact = parse_exact(spec.H) if is_exact(spec.H) else None
    dec = decompose(desc, vals, sigma, tol=spec.tol)
    info = {"method": dec.method, "compatibility_residual": dec.compatibility_residual}
    if dec.fit is not None:
        info["fit_max_weighted_residual"] = dec.fit.max_weighted_residual
        info["fit_max_abs_residual"] = dec.fit.max_abs_residual
    return dec.pair, exact, info


def _reducedness(desc: GroupDescriptor, delta: float, pair: IwasawaPair, omega: str) -> dict:
    om = desc.omega_report(pair.n, omega)
    lv = lovasz_report(desc, delta, pair.a, pair.n)
    return {"omega": om, "lovasz": lv, "reduced": all(om.values()) and all(lv.values())}


# ----------------------------------------------------------------------
# commands


def cmd_decompose(spec: JobSpec) -> dict:
    desc = spec.descriptor()
    pair, _, info = _decomposition(spec, desc)
    return {"group": desc.kind, "g": desc.g, "a": _float_list(pair.a),
            "n": _float_list(pair.n), "sigma": desc.sigma(pair.a), "decomposition": info}


def cmd_reduce(spec: JobSpec) -> dict:
    desc = spec.descriptor()
    delta = check_delta(spec.delta)
    pair, exact, info = _decomposition(spec, desc)
    kwargs = dict(driver=spec.driver, omega=spec.omega, max_iter=spec.max_iter,
                  reortho_every=spec.reortho_every, tol=spec.tol, trace=spec.trace)
    if exact is not None and info["method"] == "gram-schmidt":
        res = reduce(desc, delta, exact, **kwargs)
        g = RationalMatrix(_int_rows(res.gamma))
        reduced_H = _exact_rows(g.T @ exact @ g)
    else:
        res = reduce(desc, delta, pair=pair, **kwargs)
        reduced_H = _float_list(res.reduced_gram())
    out = {"group": desc.kind, "g": desc.g, "delta": delta, "H": spec.H,
           "gamma": _int_rows(res.gamma), "a": _float_list(res.a), "n": _float_list(res.n),
           "reduced_H": reduced_H, "reflections": res.reflections,
           "sigma_initial": res.sigma_initial, "sigma_final": res.sigma_final,
           "driver": res.driver, "omega": res.omega, "decomposition": info,
           "gamma_member": bool(desc.is_integral_element(res.gamma)),
           "reduced": _reducedness(desc, delta, res.pair, res.omega)["reduced"]}
    if spec.trace:
        out["trace"] = [{"kind": s.kind, "root": s.root, "value": s.value, "sigma": s.sigma}
                        for s in res.trace.steps]
    return out


def cmd_verify(spec: JobSpec) -> dict:
    """Compatibility, reducedness of ``K a n gamma`` and membership of ``gamma``."""
    desc = spec.descriptor()
    delta = check_delta(spec.delta)
    out: dict = {"group": desc.kind, "g": desc.g, "delta": delta}
    gamma = _gamma_matrix(spec.gamma, desc) if spec.gamma is not None else None
    if gamma is not None:
        out["gamma_member"] = bool(desc.is_integral_element(gamma))
    if spec.H is not None:
        vals, _ = _read_matrix(spec.H, desc, "H")
        res = compatibility_residual(desc, vals)
        out["compatibility_residual"] = res
        out["compatible"] = res <= spec.tol
        try:
            pair, _, info = _decomposition(spec, desc)
        except GroupLLLError as exc:
            out["decomposition"] = {"error": str(exc)}
            out["reduced"] = None
            return out
        out["decomposition"] = info
        if gamma is not None:
            pair = transport(desc, pair, gamma)
        out.update(_reducedness(desc, delta, pair, spec.omega))
    return out


def cmd_gen(spec: JobSpec) -> dict:
    desc = spec.descriptor()
    inst = random_instance(desc, spec.seed)
    return {"group": desc.kind, "g": desc.g, "delta": spec.delta, "seed": spec.seed,
            "H": _exact_rows(inst.H)}


COMMANDS = {"decompose": cmd_decompose, "reduce": cmd_reduce, "verify": cmd_verify,
            "gen": cmd_gen}


# ----------------------------------------------------------------------
# argument handling


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="grouplll",
                                description="LLL-style reduction for SL, Sp, SO and G2.")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("input", nargs="?", default=None,
                   help="JSON document (path, or '-' for stdin); not used by gen")
    p.add_argument("--group", choices=GROUP_KINDS, help="group family (overrides the document)")
    p.add_argument("--g", type=int, help="rank parameter for sl, sp and so")
    p.add_argument("--delta", type=float,
                   help=f"Lovász parameter in (1/4, 1) (default {DEFAULT_DELTA})")
    p.add_argument("--max-iter", type=int, help="cap on the number of reflections")
    p.add_argument("--reortho-every", type=int, default=DEFAULT_REORTHO,
                   help="recompute (a, n) from gamma after this many reflections")
    p.add_argument("--tol", type=float, default=COMPAT_TOLERANCE,
                   help="relative tolerance of the compatibility check")
    p.add_argument("--seed", type=int, default=0, help="seed for gen")
    p.add_argument("--trace", action="store_true", help="include every RED and REFL step")
    p.add_argument("--driver", choices=DRIVERS, default="generic",
                   help="generic loop or the per-group schedules")
    p.add_argument("--omega", choices=OMEGA_KINDS, default="entries",
                   help="size-reduction domain: matrix entries or root coordinates")
    p.add_argument("-o", "--output", help="write the report here instead of stdout")
    return p


def _load_document(path: Optional[str]) -> dict:
    if path is None:
        return {}
    try:
        text = sys.stdin.read() if path == "-" else open(path, encoding="utf-8").read()
        doc = json.loads(text, parse_float=str, parse_int=str)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise InputError("input document must be a JSON object")
    return doc


def job_from_args(args: argparse.Namespace) -> JobSpec:
    doc = _load_document(args.input)
    group = args.group or doc.get("group")
    if group is None:
        raise InputError("no group given (use --group or a 'group' field)")
    g = args.g if args.g is not None else doc.get("g")
    delta = args.delta if args.delta is not None else doc.get("delta", DEFAULT_DELTA)
    try:
        g = int(g) if g is not None else None
        delta = float(delta)
    except (TypeError, ValueError) as exc:
        raise InputError(f"bad g or delta: {exc}") from exc
    if args.command in ("decompose", "reduce") and "H" not in doc:
        raise InputError(f"{args.command} needs an input document with an H field")
    return JobSpec(args.command, group, g, delta, doc.get("H"), doc.get("gamma"),
                   args.max_iter, args.reortho_every, args.tol, args.seed, args.trace,
                   args.driver, args.omega)


def run(argv: Optional[Sequence[str]] = None) -> tuple[int, str]:
    """Run a command; returns ``(exit code, text written)``."""
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        spec = job_from_args(args)
        report = COMMANDS[spec.command](spec)
    except (IterationCapExceeded, DriftError) as exc:
        return EXIT_ITERATION, json.dumps({"error": type(exc).__name__, "message": str(exc)})
    except (GroupLLLError, InputError, ValueError) as exc:
        return EXIT_INPUT, json.dumps({"error": type(exc).__name__, "message": str(exc)})
    text = json.dumps(report, sort_keys=True, indent=1)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
        return EXIT_OK, ""
    return EXIT_OK, text


def main(argv: Optional[Sequence[str]] = None) -> int:
    code, text = run(argv)
    if text:
        print(text, file=sys.stdout if code == EXIT_OK else sys.stderr)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
