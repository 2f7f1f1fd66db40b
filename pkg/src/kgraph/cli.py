"""``kgraph`` command line: validate skeletons, query alignment, run the algebra and Fock checks.

Exit codes: 0 all checks pass, 1 validation failure, 2 check failure, 3 usage error.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import dataclass
from typing import Optional

from . import degree as deg
from . import fixtures
from .alignment import find_avoiding_path, is_finitely_aligned, mce, vee
from .fock import (
    FockSpace,
    avoiding_witness_holds,
    check_nica_products,
    check_relations,
    evaluate,
    faithfulness_hypothesis,
)
from .paths import Path, PathError, parse_path
from .skeleton import AssociativityError, Skeleton, SkeletonError, emit, load_skeleton_file
from .tck import new_extension_check, partition_check

EXIT_OK, EXIT_INVALID, EXIT_CHECK, EXIT_USAGE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    command: str
    file: Optional[str]
    fixture: Optional[str]
    m: Optional[int]
    seed: int
    bound: Optional[deg.Degree]
    tol: float
    fmt: str

    def __post_init__(self):
        if self.bound is not None and any(c < 0 for c in self.bound):
            raise UsageError("bound must be componentwise >= 0")
        if self.tol <= 0:
            raise UsageError("tol must be positive")


def _bound(text: str) -> deg.Degree:
    try:
        return deg.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _load(cfg: RunConfig) -> Skeleton:
    if cfg.fixture and cfg.file:
        raise UsageError("give either a file or --fixture, not both")
    if cfg.fixture:
        try:
            return fixtures.build_fixture(cfg.fixture, cfg.m, cfg.seed)
        except ValueError as exc:
            if isinstance(exc, SkeletonError):
                raise
            raise UsageError(str(exc))
    if cfg.file:
        try:
            return load_skeleton_file(cfg.file)
        except OSError as exc:
            raise UsageError(f"cannot read {cfg.file}: {exc.strerror}")
    raise UsageError("no input: pass --file PATH or --fixture NAME")


def _bound_for(cfg: RunConfig, sk: Skeleton, default: int = 2) -> deg.Degree:
    if cfg.bound is None:
        return (default,) * sk.k
    if len(cfg.bound) != sk.k:
        raise UsageError(f"bound {deg.fmt(cfg.bound)} must have {sk.k} coordinates")
    return cfg.bound


def _path(sk: Skeleton, literal: str) -> Path:
    try:
        return parse_path(sk, literal)
    except (PathError, KeyError) as exc:
        raise UsageError(f"bad path literal {literal!r}: {exc}")


def _emit(cfg: RunConfig, report: dict, text: str) -> None:
    if cfg.fmt == "json":
        print(json.dumps(report, indent=2, sort_keys=False))
    else:
        print(text)


def cmd_validate(cfg: RunConfig) -> int:
    try:
        sk = _load(cfg)
    except AssociativityError as exc:
        report = {
            "valid": False,
            "error": type(exc).__name__,
            "message": str(exc),
            "violations": [v.to_dict() for v in exc.violations],
        }
        first = exc.violations[0]
        _emit(cfg, report, f"invalid: associativity fails at triple {'.'.join(first.triple)}")
        return EXIT_INVALID
    except SkeletonError as exc:
        _emit(cfg, {"valid": False, "error": type(exc).__name__, "message": str(exc)}, f"invalid: {exc}")
        return EXIT_INVALID
    report = {"valid": True, "k": sk.k, "vertices": len(sk.vertices), "edges": len(sk.edges), "squares": len(sk.squares)}
    _emit(cfg, report, f"valid {sk.k}-graph skeleton: {len(sk.vertices)} vertices, {len(sk.edges)} edges, {len(sk.squares)} squares")
    return EXIT_OK


def cmd_fixture(cfg: RunConfig) -> int:
    sk = _load(cfg)
    print(emit(sk))
    return EXIT_OK


def cmd_mce(cfg: RunConfig, mu: str, nu: str) -> int:
    sk = _load(cfg)
    m = mce(_path(sk, mu), _path(sk, nu))
    _emit(cfg, m.to_dict(), "\n".join(p.literal for p in m) or "(empty)")
    return EXIT_OK


def cmd_vee(cfg: RunConfig, members: list[str]) -> int:
    sk = _load(cfg)
    if not members:
        raise UsageError("vee needs at least one path")
    closure = vee([_path(sk, x) for x in members])
    _emit(cfg, closure.to_dict(), "\n".join(p.literal for p in closure))
    return EXIT_OK


def cmd_align(cfg: RunConfig) -> int:
    sk = _load(cfg)
    bound = _bound_for(cfg, sk) if cfg.bound is not None else None
    report = is_finitely_aligned(sk, bound)
    d = report.to_dict()
    lines = [f"max generator MCE size: {report.max_generator_mce}"]
    if report.generator_argmax:
        lines[0] += f" at ({report.generator_argmax[0]}, {report.generator_argmax[1]})"
    if bound is not None:
        lines.append(f"max MCE size up to {deg.fmt(bound)}: {report.max_bounded_mce}")
    _emit(cfg, d, "\n".join(lines))
    return EXIT_OK


def cmd_check(cfg: RunConfig, samples: int) -> int:
    sk = _load(cfg)
    bound = _bound_for(cfg, sk)
    sp = FockSpace(sk, bound)
    relations = check_relations(sp)
    nica = []
    for p in deg.below(bound):
        for q in deg.below(bound):
            if deg.leq(deg.join(p, q), bound):
                nica.append(check_nica_products(sp, p, q))
    rng = random.Random(cfg.seed)
    partitions, extensions, warnings = [], [], []
    for _ in range(samples):
        F = fixtures.sample_admissible(sk, bound, rng)
        rep = partition_check(F)
        partitions.append(rep)
        if rep.residual and all(sp.fits(t.left) and sp.fits(t.right) for t in rep.residual.terms) \
                and not evaluate(sp, rep.residual).count_nonzero():
            warnings.append(f"nonzero partition residue vanishes on the Fock space for F={[p.literal for p in F]}")
        extensions.extend(new_extension_check(F))
    ok = (
        relations.toeplitz_ok
        and all(r.passed for r in nica)
        and all(r.ok for r in partitions)
        and all(c.ok for c in extensions)
    )
    ck = [r for r in relations.results if r.relation in ("6", "6-sink")]
    report = {
        "status": "pass" if ok else "fail",
        "bound": list(bound),
        "dimension": sp.dim,
        "relations": relations.to_dict(),
        "nica": [r.to_dict() for r in nica],
        "partition": [r.to_dict() for r in partitions],
        "newExtension": [c.to_dict() for c in extensions],
        "verdict": "Toeplitz, not Cuntz-Pimsner" if relations.toeplitz_ok and any(not r.passed for r in ck) else None,
        "warnings": warnings,
    }
    lines = [f"Fock space up to degree {deg.fmt(bound)}: dimension {sp.dim}"]
    for r in relations.results:
        if r.relation in ("6", "6-sink"):
            continue
        lines.append(f"relation ({r.relation}): {r.status} [{r.instances} instances]")
    failing6 = sorted({f"{r.witness}" for r in ck if not r.passed})
    if failing6:
        lines.append(f"relation (6): fails at {', '.join(failing6)} ({report['verdict'] or 'expected in the Fock representation'})")
    lines.append(f"nica products: {sum(r.passed for r in nica)}/{len(nica)} pass")
    lines.append(f"partition identity: {sum(r.ok for r in partitions)}/{len(partitions)} pass")
    lines.append(f"new-extension identity: {sum(c.ok for c in extensions)}/{len(extensions)} pass")
    lines.extend(f"warning: {w}" for w in warnings)
    lines.append("PASS" if ok else "FAIL")
    _emit(cfg, report, "\n".join(lines))
    return EXIT_OK if ok else EXIT_CHECK


def _parse_set(sk: Skeleton, text: str) -> tuple[deg.Degree, list[Path]]:
    if "=" not in text:
        raise UsageError(f"set {text!r} must look like 'DEGREE=path,path'")
    head, _, tail = text.partition("=")
    try:
        p = deg.parse(head)
    except ValueError as exc:
        raise UsageError(str(exc))
    if len(p) != sk.k:
        raise UsageError(f"degree {head} must have {sk.k} coordinates")
    return p, [_path(sk, x) for x in tail.split(",") if x.strip()]


def cmd_faithful(cfg: RunConfig, v: str, raw_sets: list[str]) -> int:
    sk = _load(cfg)
    if v not in sk.vertices:
        raise UsageError(f"unknown vertex {v!r}")
    sets: dict[deg.Degree, list[Path]] = {}
    for text in raw_sets:
        p, F = _parse_set(sk, text)
        sets.setdefault(p, []).extend(F)
    need = deg.join_all(list(sets) + [(1,) * sk.k], sk.k)
    bound = _bound_for(cfg, sk, default=0) if cfg.bound is not None else need
    if not deg.leq(need, bound):
        raise UsageError(f"bound {deg.fmt(bound)} is below the set degrees {deg.fmt(need)}")
    sp = FockSpace(sk, bound)
    try:
        rep = faithfulness_hypothesis(sp, v, sets)
    except ValueError as exc:
        raise UsageError(str(exc))
    report = rep.to_dict()
    ok = rep.nonzero and rep.is_diagonal_projection and rep.reduction_dominated
    generator_only = all(sum(p) == 1 for p in rep.sets)
    lines = [
        f"product at {v}: {'nonzero' if rep.nonzero else 'ZERO'}, witness {report['witness']}",
        f"generator reduction dominates: {rep.reduction_dominated}",
    ]
    if generator_only:
        forbidden = {next(i for i, c in enumerate(p, 1) if c): F for p, F in rep.sets.items()}
        mu = find_avoiding_path(sk, v, forbidden)
        holds = avoiding_witness_holds(sp, mu, forbidden) if mu is not None else None
        report["avoidingPath"] = mu.literal if mu is not None else None
        report["avoidingPathHolds"] = holds
        if holds is False:
            ok = False
        lines.append(f"avoiding path: {mu.literal if mu is not None else 'none'}")
    report["status"] = "pass" if ok else "fail"
    lines.append("PASS" if ok else "FAIL")
    _emit(cfg, report, "\n".join(lines))
    return EXIT_OK if ok else EXIT_CHECK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--file", help="skeleton JSON file")
    common.add_argument("--fixture", choices=sorted(fixtures.FIXTURES), help="built-in skeleton instead of a file")
    common.add_argument("--m", type=int, default=None, help="fixture size parameter")
    common.add_argument("--seed", type=int, default=0, help="seed for random fixtures and sampling")
    common.add_argument("--bound", type=_bound, default=None, help="degree bound N as a,b,...")
    common.add_argument("--tol", type=float, default=1e-6, help="relative tolerance for norm estimates")
    common.add_argument("--format", dest="fmt", choices=("json", "text"), default="json")

    parser = _Parser(prog="kgraph", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("validate", parents=[common], help="load a skeleton and check all axioms")
    p.add_argument("path", nargs="?", help="skeleton JSON file (same as --file)")
    p = sub.add_parser("fixture", parents=[common], help="print a built-in skeleton as JSON")
    p.add_argument("name", nargs="?", choices=sorted(fixtures.FIXTURES))
    p = sub.add_parser("mce", parents=[common], help="minimal common extensions of two paths")
    p.add_argument("mu")
    p.add_argument("nu")
    p = sub.add_parser("vee", parents=[common], help="closure of a path set under MCE")
    p.add_argument("paths", nargs="+")
    sub.add_parser("align", parents=[common], help="MCE size statistics")
    p = sub.add_parser("check", parents=[common], help="run relation, partition and Fock checks")
    p.add_argument("--samples", type=int, default=10, help="random admissible sets for the partition checks")
    p = sub.add_parser("faithful", parents=[common], help="evaluate the faithfulness hypothesis at a vertex")
    p.add_argument("vertex")
    p.add_argument("--set", dest="sets", action="append", default=[], metavar="DEG=PATHS",
                   help="finite set at a degree, e.g. 1,0=a,b (repeatable)")
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    file = args.file
    if getattr(args, "path", None):
        file = args.path
    fixture = args.fixture or getattr(args, "name", None)
    try:
        cfg = RunConfig(args.command, file, fixture, args.m, args.seed, args.bound, args.tol, args.fmt)
        if args.command == "validate":
            return cmd_validate(cfg)
        if args.command == "fixture":
            return cmd_fixture(cfg)
        if args.command == "mce":
            return cmd_mce(cfg, args.mu, args.nu)
        if args.command == "vee":
            return cmd_vee(cfg, args.paths)
        if args.command == "align":
            return cmd_align(cfg)
        if args.command == "check":
            return cmd_check(cfg, args.samples)
        if args.command == "faithful":
            return cmd_faithful(cfg, args.vertex, args.sets)
    except UsageError as exc:
        print(f"kgraph: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SkeletonError as exc:
        print(f"kgraph: invalid skeleton: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
