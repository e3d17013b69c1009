"""Command line: ``towers [--workspace PATH] <command> ...``.

Exit codes: 0 pass, 1 certificate or property failure, 2 undecided
equivalence search, 3 input error.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path
from typing import TextIO

from .complexes import Complex, HomSpace, Undecided, find_equivalence, shift
from .heart import NotInHeart, heart_analysis, hom_discreteness_report
from .sampling import DEFAULT_SEED
from .sod import CertificateFailure, check_exceptional_collection, weaved_tower, weaved_tower_dual
from .suites import SUITES, run_suite
from .tstruct import TChain, Tower, postnikov_tower, postnikov_tower_dual, stagewise_equivalent, z_postnikov_tower
from .workspace import BUNDLED, Workspace, WorkspaceError, load_workspace

ENV_VAR = "TOWERS_WORKSPACE"
EXIT_PASS, EXIT_FAIL, EXIT_UNDECIDED, EXIT_INPUT = 0, 1, 2, 3


def resolve_workspace_path(arg: str | None) -> Path:
    """Explicit flag, then ``$TOWERS_WORKSPACE``, then the bundled A2 fixture.

    A bare name such as ``a3`` that is not an existing file selects the
    bundled fixture of that name.
    """
    raw = arg or os.environ.get(ENV_VAR) or "a2"
    path = Path(raw)
    if not path.exists() and (BUNDLED / f"{raw}.json").exists():
        return BUNDLED / f"{raw}.json"
    return path


def identify(ws: Workspace, X: Complex) -> str:
    """Name ``X`` up to quasi-isomorphism by a shifted workspace object, else by its homology."""
    if X.is_acyclic():
        return "0"
    for name in ws.names():
        Y = ws.complex(name)
        if Y.is_acyclic():
            continue
        for k in range(-3, 4):
            Z = shift(Y, k)
            if Z.homology_dims != X.homology_dims:
                continue
            try:
                if find_equivalence(Z, X) is not None:
                    return name if k == 0 else f"{name}[{k}]"
            except Undecided:
                continue
    return "H " + " ".join(f"{n}:{d}" for n, d in sorted(X.homology_dims.items()))


def tower_dot(ws: Workspace, tower: Tower, title: str) -> str:
    """Stages left to right; each edge carries ``f_j`` and the window of its cofiber."""
    objs = tower.objects
    k = len(tower.maps)
    lines = [f'digraph "{title}" {{', "  rankdir=LR;", "  node [shape=box];"]
    for i, X in enumerate(objs):
        lines.append(f'  s{i} [label="{identify(ws, X)}"];')
    for j, (w, ok) in enumerate(zip(tower.windows, tower.window_checks)):
        mark = "" if ok else " FAIL"
        lines.append(f'  s{j} -> s{j + 1} [label="f_{k - j}\\ncofib in {w}{mark}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def _print_tower(ws: Workspace, tower: Tower, out: TextIO) -> None:
    k = len(tower.maps)
    objs = tower.objects
    out.write(f"  source: {identify(ws, objs[0])}\n")
    for j, (w, C, ok) in enumerate(zip(tower.windows, tower.cofibers, tower.window_checks)):
        out.write(f"  f_{k - j}: -> {identify(ws, objs[j + 1])}   cofib = {identify(ws, C)}"
                  f" in {w}: {'ok' if ok else 'FAIL'}\n")
    out.write(f"  composite equals f in D: {'ok' if tower.composite_ok else 'FAIL'}\n")


def _emit_dot(args, text: str, out: TextIO) -> None:
    if args.dot is None:
        return
    if args.dot == "-":
        out.write(text)
    else:
        Path(args.dot).write_text(text)


def cmd_tower(ws: Workspace, args, out: TextIO) -> int:
    f = ws.morphism(args.morphism)
    try:
        chain = TChain(tuple(int(x) for x in args.chain.split(",") if x.strip()))
    except ValueError:
        raise WorkspaceError("--chain", f"expected comma separated integers, got {args.chain!r}") from None
    tower = postnikov_tower(f, chain)
    out.write(f"Postnikov tower of {args.morphism} over chain {list(chain.indices)}\n")
    _print_tower(ws, tower, out)
    dual = postnikov_tower_dual(f, chain)
    same = stagewise_equivalent(tower, dual)
    out.write(f"  agrees with pushout construction: {'ok' if same else 'FAIL'}\n")
    _emit_dot(args, tower_dot(ws, tower, args.morphism), out)
    return EXIT_PASS if tower.certified and dual.certified and same else EXIT_FAIL


def cmd_ztower(ws: Workspace, args, out: TextIO) -> int:
    f = ws.morphism(args.morphism)
    tower = z_postnikov_tower(f)
    out.write(f"Z-Postnikov tower of {args.morphism}: n0 = {tower.n0}, k0 = {tower.k0}, "
              f"nontrivial levels {tower.levels}\n")
    _print_tower(ws, tower, out)
    _emit_dot(args, tower_dot(ws, tower, args.morphism), out)
    return EXIT_PASS if tower.certified else EXIT_FAIL


def cmd_heart(ws: Workspace, args, out: TextIO) -> int:
    f = ws.morphism(args.morphism)
    a = heart_analysis(f)
    out.write(f"heart analysis of {args.morphism}\n")
    for name, X in a.objects().items():
        out.write(f"  {name} = {identify(ws, X)}\n")
    ok = a.all_in_heart()
    out.write(f"  all in heart: {'ok' if ok else 'FAIL'}\n")
    checks = [("im ~ coim", a.witness_im_coim is not None),
              ("Z_f ~ im", a.witness_zf_im is not None),
              ("ker/coker match H_0 oracle", a.matches_rep_oracle())]
    for label, good in checks:
        out.write(f"  {label}: {'ok' if good else 'FAIL'}\n")
        ok = ok and good
    dims = hom_discreteness_report(f.source, f.target, (1, 2))
    out.write(f"  dim Hom_D(X, Y[-n]) for n = 1, 2: {dims[1]}, {dims[2]}\n")
    ok = ok and not any(dims.values())
    return EXIT_PASS if ok else EXIT_FAIL


def cmd_sod(ws: Workspace, args, out: TextIO) -> int:
    blocks, names = ws.collection(args.collection)
    Y = ws.complex(args.object)
    coll = check_exceptional_collection(blocks, names)
    out.write(f"collection {args.collection} = ({', '.join(names)})\n")
    for line in coll.report_lines():
        out.write(f"  {line}\n")
    if not coll.verified:
        return EXIT_FAIL
    try:
        tower = weaved_tower(Y, coll)
    except CertificateFailure as exc:
        out.write(f"  certificate failure: {exc}\n")
        return EXIT_FAIL
    out.write(f"weaved tower of {args.object}\n")
    _print_tower(ws, tower, out)
    same = stagewise_equivalent(tower, weaved_tower_dual(Y, coll))
    out.write(f"  agrees with the opposite-order construction: {'ok' if same else 'FAIL'}\n")
    _emit_dot(args, tower_dot(ws, tower, args.object), out)
    return EXIT_PASS if tower.certified and same else EXIT_FAIL


def cmd_hom(ws: Workspace, args, out: TextIO) -> int:
    X, Y = ws.complex(args.X), ws.complex(args.Y)
    hs = HomSpace(X, Y, args.shift)
    out.write(f"dim Hom_D({args.X}, {args.Y}[{args.shift}]) = {hs.dim}\n")
    return EXIT_PASS


def cmd_verify(ws: Workspace, args, out: TextIO) -> int:
    results = run_suite(args.suite, seed=args.seed, workspace=ws)
    width = max(len(r.name) for r in results)
    out.write(f"{'check':<{width}}  result     cases  undecided  seconds\n")
    for r in results:
        status = "pass" if r.passed else ("UNDECIDED" if not r.failures else "FAIL")
        out.write(f"{r.name:<{width}}  {status:<9} {r.cases:>6} {r.undecided:>10} {r.seconds:>8.2f}\n")
        for msg in r.failures[:5]:
            out.write(f"    counterexample: {msg}\n")
    total = sum(r.seconds for r in results)
    out.write(f"total {total:.2f} s, seed {args.seed}\n")
    if any(r.failures for r in results):
        return EXIT_FAIL
    if any(r.undecided for r in results):
        return EXIT_UNDECIDED
    return EXIT_PASS


class _Parser(argparse.ArgumentParser):
    """Usage errors are input errors (exit 3), not argparse's default 2."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="towers", description=__doc__.splitlines()[0])
    ap.add_argument("--workspace", "-w", help=f"workspace JSON file (default: ${ENV_VAR} or the bundled a2)")
    sub = ap.add_subparsers(dest="command", required=True)

    def with_dot(p):
        p.add_argument("--dot", metavar="FILE", help="write the tower as DOT ('-' for stdout)")
        return p

    p = with_dot(sub.add_parser("tower", help="Postnikov tower of a morphism over a chain"))
    p.add_argument("morphism")
    p.add_argument("--chain", required=True, help="comma separated indices, e.g. 0,1")
    p.set_defaults(func=cmd_tower)

    p = with_dot(sub.add_parser("ztower", help="Z-indexed Postnikov tower of a morphism"))
    p.add_argument("morphism")
    p.set_defaults(func=cmd_ztower)

    p = sub.add_parser("heart", help="kernel, cokernel, image and coimage in the heart")
    p.add_argument("morphism")
    p.set_defaults(func=cmd_heart)

    p = with_dot(sub.add_parser("sod", help="weaved tower of an object for an exceptional collection"))
    p.add_argument("collection")
    p.add_argument("object")
    p.set_defaults(func=cmd_sod)

    p = sub.add_parser("hom", help="dimension of Hom_D(X, Y[n])")
    p.add_argument("X")
    p.add_argument("Y")
    p.add_argument("--shift", type=int, default=0)
    p.set_defaults(func=cmd_hom)

    p = sub.add_parser("verify", help="run the property suites")
    p.add_argument("--suite", default="all", choices=["all", *SUITES])
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv: list[str] | None = None, out: TextIO | None = None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        ws = load_workspace(resolve_workspace_path(args.workspace))
        return args.func(ws, args, out)
    except (WorkspaceError, NotInHeart) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Undecided as exc:
        print(f"undecided: {exc}", file=sys.stderr)
        return EXIT_UNDECIDED


if __name__ == "__main__":
    sys.exit(main())
