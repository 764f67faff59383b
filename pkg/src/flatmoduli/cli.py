"""Command-line front end.

Every verb writes one JSON document tagged ``"schema": "flatmoduli/1"``.
Exit status: 0 on success, 2 when the library refuses the input for a
mathematical reason (the document then has a ``"reason"`` field), 1 on
internal errors, 64 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from .errors import FlatModuliError
from .homotopy import GroupPath, certify_path, deform_to_semisimple, path_even, path_odd
from .lie_core import GroupElement, GroupSpec
from .rootsys import build_root_system, build_weyl_element, verify_no_unit_eigenvalue
from .solver import SolverConfig, solve_relation
from .surface import SurfaceSig, TuplePoint
from .topology import (
    FiniteAbelianGroup,
    ObstructionClass,
    component_label,
    count_components,
)

SCHEMA = "flatmoduli/1"
EXIT_OK, EXIT_INTERNAL, EXIT_REFUSED, EXIT_USAGE = 0, 1, 2, 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def canonical(obj):
    """Round floats to 15 significant digits so output is byte-stable."""
    if isinstance(obj, float):
        return float(f"{obj:.15g}")
    if isinstance(obj, dict):
        return {k: canonical(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [canonical(v) for v in obj]
    if isinstance(obj, np.generic):
        return canonical(obj.item())
    return obj


def _group_arg(text: str):
    if text.strip().lower().startswith("pi1="):
        orders = [int(x) for x in text.split("=", 1)[1].split(",") if x.strip()]
        return FiniteAbelianGroup.from_cyclic_orders(orders)
    return GroupSpec.parse(text)


def _spec_only(group) -> GroupSpec:
    if not isinstance(group, GroupSpec):
        raise UsageError("this verb needs a concrete group (U:n, SU:n or SO3)")
    return group


def _read_json(path: str):
    return json.loads(Path(path).read_text())


# -- verbs -----------------------------------------------------------------------


def cmd_count(args) -> dict:
    sig = SurfaceSig.parse(args.surface)
    group = _group_arg(args.group)
    res = count_components(sig, group)
    return {"surface": sig.to_json(), **res.to_json()}


def _sample_one(job):
    sig, spec, bits, lift, cfg, trial = job
    report = solve_relation(sig, spec, bits, cfg, target_lift=lift)
    out = {"trial": trial, "converged": report.converged, "residual": report.residual, "iters": report.iters}
    if report.converged:
        label = component_label(report.solution)
        out["class"] = list(label[1]) if label and label[0] == "K" else (label[1] if label else None)
        out["point"] = report.solution.to_json()
    return out


def cmd_sample(args) -> dict:
    sig = SurfaceSig.parse(args.surface)
    spec = _spec_only(_group_arg(args.group))
    sig.require_allowed()
    bits = lift = None
    if args.klass is not None:
        cls = ObstructionClass.parse(args.klass)
        if spec.family == "SO3":
            if len(cls.bits) != 1:
                raise UsageError("SO3 takes a single class bit (1 = nontrivial lift)")
            lift = -1 if cls.bits[0] else 1
        else:
            bits = cls
    cfg = SolverConfig()
    if args.tolerance is not None:
        cfg = replace(cfg, residual_tol=args.tolerance)
    jobs = [(sig, spec, bits, lift, replace(cfg, seed=(args.seed, i)), i) for i in range(args.count)]
    if args.workers > 1:
        with ProcessPoolExecutor(args.workers) as pool:
            results = list(pool.map(_sample_one, jobs))
    else:
        results = [_sample_one(j) for j in jobs]
    return {
        "surface": sig.to_json(),
        "group": spec.to_json(),
        "seed": args.seed,
        "samples": sorted(results, key=lambda r: r["trial"]),
    }


def cmd_connect(args) -> dict:
    sig = SurfaceSig.parse(args.surface)
    spec = _spec_only(_group_arg(args.group))
    if sig.orientable:
        if not args.tuple:
            raise UsageError("orientable surfaces need --tuple <file>")
        x = TuplePoint.from_json(_read_json(args.tuple))
        if x.spec != spec or x.sig != sig:
            raise UsageError("tuple file does not match --surface/--group")
        path = deform_to_semisimple(x, args.steps)
    else:
        cs = [GroupElement.from_json(_read_json(p)) for p in (args.c or [])]
        for c in cs:
            if c.spec != spec:
                raise UsageError(f"matrix file is in {c.spec.label}, --group is {spec.label}")
        strict = not args.allow_noninvolutive
        if sig.crosscaps == 1:
            if len(cs) != 1:
                raise UsageError("one --c matrix is needed for an odd number of crosscaps")
            path = path_odd(cs[0], sig, args.steps, strict=strict)
        else:
            if len(cs) != 2:
                raise UsageError("two --c matrices are needed for an even number of crosscaps")
            path = path_even(cs[0], cs[1], sig, args.steps, strict=strict)
    return {"path": path.to_json(), "certificate": certify_path(path).to_json()}


def cmd_verify_weyl(args) -> dict:
    system = build_root_system(args.type, args.rank)
    w = build_weyl_element(system)
    rep = verify_no_unit_eigenvalue(w)
    return {
        "type": system.type_label,
        "rank": system.rank,
        "element": w.description,
        "eigenvalues": [[float(z.real), float(z.imag)] for z in w.eigenvalues],
        "min_distance_to_1": rep.min_distance_to_1,
        "roots_permuted": rep.root_permutation_ok,
        "root_count": len(system.numerators),
    }


def cmd_check_path(args) -> dict:
    path = GroupPath.from_json(_read_json(args.path))
    return {"tag": path.tag, "certificate": certify_path(path).to_json()}


# -- plumbing --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="flatmoduli", description="Flat connections on surfaces: counts, samples, paths.")
    sub = p.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--json", action="store_true", help="compact canonical JSON (default: indented)")
        sp.add_argument("--output", help="write to this file instead of stdout")
        sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("count", help="number of connected components")
    sp.add_argument("--surface", required=True)
    sp.add_argument("--group", required=True, help="U:n, SU:n, SO3 or pi1=d1,d2,...")
    common(sp)
    sp.set_defaults(func=cmd_count)

    sp = sub.add_parser("sample", help="numerical solutions of the surface relation")
    sp.add_argument("--surface", required=True)
    sp.add_argument("--group", required=True)
    sp.add_argument("--class", dest="klass", help="obstruction bits, e.g. 1 or 0")
    sp.add_argument("--count", type=int, default=1)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--tolerance", type=float, help="override the acceptance residual (default 1e-6)")
    common(sp)
    sp.set_defaults(func=cmd_sample)

    sp = sub.add_parser("connect", help="explicit path to a given crosscap element")
    sp.add_argument("--surface", required=True)
    sp.add_argument("--group", required=True)
    sp.add_argument("--c", action="append", help="matrix JSON file (repeat for two crosscaps)")
    sp.add_argument("--tuple", help="tuple JSON file (orientable surfaces)")
    sp.add_argument("--steps", type=int, default=100)
    sp.add_argument("--allow-noninvolutive", action="store_true",
                    help="build the path even when no central lift squares to e")
    common(sp)
    sp.set_defaults(func=cmd_connect)

    sp = sub.add_parser("verify-weyl", help="Weyl element without eigenvalue 1")
    sp.add_argument("--type", required=True, choices=list("ABCDEFG"))
    sp.add_argument("--rank", type=int, required=True)
    common(sp)
    sp.set_defaults(func=cmd_verify_weyl)

    sp = sub.add_parser("check-path", help="certify a stored path")
    sp.add_argument("--path", required=True)
    common(sp)
    sp.set_defaults(func=cmd_check_path)
    return p


def _emit(doc: dict, args, stream) -> None:
    doc = canonical({"schema": SCHEMA, "verb": getattr(args, "verb", None), **doc})
    if getattr(args, "json", False):
        text = json.dumps(doc, sort_keys=True, separators=(",", ":"))
    else:
        text = json.dumps(doc, sort_keys=True, indent=2)
    out = getattr(args, "output", None)
    if out:
        Path(out).write_text(text + "\n")
    else:
        stream.write(text + "\n")


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    try:
        doc = args.func(args)
    except UsageError as exc:
        stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except FlatModuliError as exc:
        _emit({"error": type(exc).__name__, "reason": exc.reason, "message": str(exc)}, args, stdout)
        return EXIT_REFUSED
    except (ValueError, OSError) as exc:
        stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001
        stderr.write(f"internal error: {type(exc).__name__}: {exc}\n")
        return EXIT_INTERNAL
    _emit(doc, args, stdout)
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
