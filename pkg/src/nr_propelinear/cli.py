from __future__ import annotations

import argparse
import sys
from pathlib import Path

from nr_propelinear import storage
from nr_propelinear.checks import (
    UnknownSuiteError,
    SUITES,
    cached_structures,
    partitions_summary,
    run_suites,
    structure_summary,
)
from nr_propelinear.config import (
    OUTPUT_FORMATS,
    TIERS,
    ConfigError,
    RunConfig,
    load_run_config,
    tier_allows,
    with_overrides,
)
from nr_propelinear.constructions import (
    ConstructionError,
    nordstrom_robinson,
    octacode,
    reed_muller,
)
from nr_propelinear.extension import (
    ExtensionError,
    classify_extensions,
    extend_all,
    extend_structure,
    extension_report,
    verify_decomposition,
)
from nr_propelinear.gf2core import CodeError, coset_decomposition, min_distance
from nr_propelinear.partition import (
    PartitionError,
    exhaustive_partitions,
    partition_classes,
    partitions_containing,
)
from nr_propelinear.permgroup import PermGroupError, sym_of_subcode
from nr_propelinear.structure import (
    DEFAULT_ISO_BUDGET,
    StructureError,
    fingerprint,
    is_normalized,
    permutation_set,
    run_enumeration,
    validate_structure,
)

_ERRORS = (
    ConfigError,
    CodeError,
    PermGroupError,
    ConstructionError,
    StructureError,
    PartitionError,
    ExtensionError,
    storage.StorageError,
    UnknownSuiteError,
)


def _require_tier(cfg: RunConfig, required: str, command: str) -> None:
    if not tier_allows(cfg, required):
        raise ConfigError(f"{command} requires --tier {required} (current tier: {cfg.tier})")


def _emit(cfg: RunConfig, payload: dict, ok_line: str) -> None:
    if cfg.output_format == "json":
        sys.stdout.write(storage.report_json({"seed": cfg.seed, **payload}) + "\n")
        return
    sys.stdout.write(f"OK {ok_line}\n")


def _text_pairs(payload: dict) -> str:
    return " ".join(f"{k}={v}" for k, v in payload.items() if not isinstance(v, (dict, list)))


def _cmd_construct(cfg: RunConfig, args: argparse.Namespace) -> dict:
    if args.target == "octacode":
        code = octacode()
        if args.out:
            storage.save_z4_code(Path(args.out), code.elements)
        return {"target": "octacode", "n": code.length, "M": code.size, "gray_d": 6}
    if args.target == "rm":
        if len(args.params) != 2:
            raise ConstructionError("rm requires two integers: R M")
        r, m = args.params
        code = reed_muller(r, m)
        target = f"rm({r},{m})"
    elif args.params:
        raise ConstructionError(f"{args.target} takes no parameters")
    elif args.target == "nr":
        code, target = nordstrom_robinson(), "nr"
    else:
        code, target = reed_muller(2, 4), "h16"
    if args.out:
        storage.save_code(Path(args.out), code)
    d = min_distance(code) if code.size > 1 else 0
    return {"target": target, "n": code.length, "M": code.size, "d": d}


def _cmd_partitions(cfg: RunConfig, args: argparse.Namespace) -> dict:
    base = storage.load_code(Path(args.base)) if args.base else nordstrom_robinson()
    parts = partitions_containing(base)
    payload: dict = {"count": len(parts)}
    if args.verify:
        _require_tier(cfg, "medium", "partitions --verify")
        derived = sorted(p.translator_mins() for p in parts)
        payload["exhaustive_match"] = derived == exhaustive_partitions(base)
        payload["iso_classes"] = len(partition_classes(parts))
    if args.out:
        out_dir = Path(args.out)
        base_path = Path(args.base) if args.base else storage.save_code(out_dir / "base.txt", base)
        payload["manifest"] = str(storage.save_partitions(out_dir, base_path, parts))
    return payload


def _cmd_enumerate(cfg: RunConfig, args: argparse.Namespace) -> dict:
    _require_tier(cfg, "long", "enumerate-structures")
    nr = nordstrom_robinson()
    result = run_enumeration(nr, sym_of_subcode(nr), jobs=cfg.jobs, cache_dir=cfg.cache_dir)
    storage.save_structures(cfg.cache_dir / "structures", result.structures)
    return {"level_counts": result.level_counts, **structure_summary(result.structures)}


def _cmd_extend(cfg: RunConfig, args: argparse.Namespace) -> dict:
    if args.structure:
        s = storage.load_structure(Path(args.structure))
        results = extend_structure(s)
        passed = sum(verify_decomposition(r).ok for r in results)
        return {"extensions_found": len(results), "decomposition_passed": passed}
    _require_tier(cfg, "long", "extend --all-sources")
    sources = extend_all(cached_structures(cfg), jobs=cfg.jobs, cache_dir=cfg.cache_dir)
    payload = extension_report(sources, classify_extensions(sources))
    storage.write_report(cfg.cache_dir / "extensions_report.json", payload)
    return payload


def _cmd_report(cfg: RunConfig, args: argparse.Namespace) -> dict:
    if args.kind == "partitions":
        _require_tier(cfg, "medium", "report partitions")
        return {"kind": "partitions", **partitions_summary()}
    _require_tier(cfg, "long", f"report {args.kind}")
    structures_dir = cfg.cache_dir / "structures"
    if not structures_dir.is_dir() or not any(structures_dir.glob("structure_*.txt")):
        raise storage.StorageError(
            f"no structure cache under {cfg.cache_dir}: "
            "run `--tier long enumerate-structures` first"
        )
    structures = storage.load_structures(structures_dir)
    if args.kind == "structures":
        summary = structure_summary(structures, certify=args.certify, iso_budget=args.iso_budget)
        return {"kind": "structures", **summary}
    if not storage.has_extension_cache(cfg.cache_dir):
        raise storage.StorageError(
            f"no extension cache under {cfg.cache_dir}: "
            "run `--tier long extend --all-sources` first"
        )
    missing = storage.missing_extension_caches(cfg.cache_dir, structures)
    if missing:
        raise storage.StorageError(
            f"extension cache is incomplete ({len(missing)} sources missing): "
            "run `--tier long extend --all-sources` first"
        )
    sources = extend_all(structures, cache_dir=cfg.cache_dir)
    summary = classify_extensions(sources)
    return {
        "kind": "extensions",
        "conj": summary.conjugacy_classes,
        "iso_lb": summary.fingerprint_classes,
        "non_extendable_sources": len(summary.non_extendable_sources),
    }


def main(argv: list[str] | None = None) -> int:
    """Entry point for the nr-propelinear CLI.

    Commands:
    - construct: builds a code (nr, h16, octacode, rm R M) and optionally writes it.
    - verify: runs the invariant suites allowed by the tier.

    Returns:
    - 0 on success
    - 1 on failure (prints an ERROR message to stderr)
    """
    parser = argparse.ArgumentParser(prog="nr-propelinear")
    parser.add_argument("--tier", choices=TIERS, help="Highest tier allowed to run.")
    parser.add_argument("--format", choices=OUTPUT_FORMATS, help="Output format.")
    parser.add_argument("--seed", type=int, help="Seed for randomized property checks.")
    parser.add_argument("--jobs", type=int, help="Worker processes for long searches.")
    parser.add_argument("--cache-dir", help="Directory for checkpoints and caches.")
    sub = parser.add_subparsers(dest="command", required=True)

    construct = sub.add_parser("construct")
    construct.add_argument("target", choices=["nr", "h16", "octacode", "rm"])
    construct.add_argument("params", nargs="*", type=int, help="R M for rm.")
    construct.add_argument("--out", help="File to write the code to.")

    kern = sub.add_parser("kernel")
    kern.add_argument("--code", required=True, help="Code file.")

    parts = sub.add_parser("partitions")
    parts.add_argument("--base", help="Code file of the base code (default: canonical N).")
    parts.add_argument("--verify", action="store_true", help="Run the exhaustive cross-check.")
    parts.add_argument("--out", help="Directory for partition files and manifest.json.")

    sub.add_parser("enumerate-structures")

    extend = sub.add_parser("extend")
    source = extend.add_mutually_exclusive_group(required=True)
    source.add_argument("--structure", help="Structure file to extend.")
    source.add_argument("--all-sources", action="store_true", help="Extend every cached class.")

    fp = sub.add_parser("fingerprint")
    fp.add_argument("--structure", required=True, help="Structure file.")

    report = sub.add_parser("report")
    report.add_argument("kind", choices=["partitions", "structures", "extensions"])
    report.add_argument(
        "--certify",
        action="store_true",
        help="Refine structure fingerprint classes by backtracking isomorphism tests.",
    )
    report.add_argument(
        "--iso-budget",
        type=int,
        default=DEFAULT_ISO_BUDGET,
        help="Search nodes per isomorphism test before the pair is reported unknown.",
    )

    verify = sub.add_parser("verify")
    verify.add_argument(
        "--suite",
        action="append",
        choices=sorted(SUITES),
        help="Suite to run; repeatable. Defaults to every suite.",
    )

    args = parser.parse_args(argv)

    try:
        cfg = with_overrides(
            load_run_config(),
            tier=args.tier,
            output_format=args.format,
            seed=args.seed,
            jobs=args.jobs,
            cache_dir=args.cache_dir,
        )
    except ConfigError as exc:
        sys.stderr.write(f"ERROR: {exc}\n")
        return 1

    if args.command == "construct":
        try:
            payload = _cmd_construct(cfg, args)
        except _ERRORS as exc:
            sys.stderr.write(f"ERROR: {exc}\n")
            return 1
        _emit(cfg, payload, _text_pairs(payload))
        return 0

    if args.command == "kernel":
        try:
            code = storage.load_code(Path(args.code))
            d = coset_decomposition(code)
        except _ERRORS as exc:
            sys.stderr.write(f"ERROR: {exc}\n")
            return 1
        payload = {
            "n": code.length,
            "M": code.size,
            "kernel_size": d.kernel.size,
            "kernel_dim": d.kernel.size.bit_length() - 1,
            "cosets": len(d.reps) + 1,
        }
        _emit(cfg, payload, _text_pairs(payload))
        return 0

    if args.command == "partitions":
        try:
            payload = _cmd_partitions(cfg, args)
        except _ERRORS as exc:
            sys.stderr.write(f"ERROR: {exc}\n")
            return 1
        _emit(cfg, payload, _text_pairs(payload))
        return 0

    if args.command == "enumerate-structures":
        try:
            payload = _cmd_enumerate(cfg, args)
        except _ERRORS as exc:
            sys.stderr.write(f"ERROR: {exc}\n")
            return 1
        levels = ",".join(str(c) for c in payload["level_counts"])
        _emit(cfg, payload, f"levels={levels} {_text_pairs(payload)}")
        return 0

    if args.command == "extend":
        try:
            payload = _cmd_extend(cfg, args)
        except _ERRORS as exc:
            sys.stderr.write(f"ERROR: {exc}\n")
            return 1
        _emit(cfg, payload, _text_pairs(payload.get("totals", payload)))
        return 0

    if args.command == "fingerprint":
        try:
            s = storage.load_structure(Path(args.structure))
            if not validate_structure(s):
                raise StructureError("structure file does not describe a regular group")
            fpr = fingerprint(s)
        except _ERRORS as exc:
            sys.stderr.write(f"ERROR: {exc}\n")
            return 1
        payload = {
            "order": s.size,
            "permutations": int(permutation_set(s).shape[0]),
            "normalized": is_normalized(s),
            "fingerprint": fpr.as_list(),
        }
        if cfg.output_format == "text":
            for order, cent, count in fpr.counts:
                sys.stdout.write(f"{order} {cent} {count}\n")
        _emit(cfg, payload, _text_pairs(payload))
        return 0

    if args.command == "report":
        try:
            payload = _cmd_report(cfg, args)
        except _ERRORS as exc:
            sys.stderr.write(f"ERROR: {exc}\n")
            return 1
        _emit(cfg, payload, _text_pairs(payload))
        return 0

    if args.command == "verify":
        try:
            suites = run_suites(cfg, args.suite)
        except _ERRORS as exc:
            sys.stderr.write(f"ERROR: {exc}\n")
            return 1
        failed = [s for s in suites if not s.passed]
        if cfg.output_format == "json":
            sys.stdout.write(
                storage.report_json({"seed": cfg.seed, "suites": [s.as_dict() for s in suites]})
                + "\n"
            )
        else:
            for s in suites:
                status = "SKIP" if s.skipped else ("PASS" if s.passed else "FAIL")
                sys.stdout.write(f"{status} {s.name} ({s.tier})\n")
                for r in s.results:
                    if not r.passed:
                        sys.stdout.write(f"  failed {r.name}: {r.detail}\n")
        if failed:
            sys.stderr.write(f"ERROR: {len(failed)} suite(s) failed\n")
            return 1
        if cfg.output_format == "text":
            sys.stdout.write(f"OK suites={len(suites)} seed={cfg.seed}\n")
        return 0

    sys.stderr.write("ERROR: Unknown command\n")
    return 1


if __name__ == "__main__":
    raise SystemExit(main())
