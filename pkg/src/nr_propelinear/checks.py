"""Invariant suites behind `verify` and `report`.

Each suite belongs to a tier; suites above the configured tier are reported
as skipped rather than failed.
"""

from __future__ import annotations

import itertools
import sys
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from nr_propelinear import storage
from nr_propelinear.config import RunConfig, debug_enabled, tier_allows
from nr_propelinear.constructions import (
    gray_many,
    nordstrom_robinson,
    nordstrom_robinson_structure,
    octacode,
    reed_muller,
)
from nr_propelinear.extension import (
    classify_extensions,
    extend_all,
    extend_structure,
    verify_supercode_extension,
    verify_decomposition,
)
from nr_propelinear.gf2core import (
    coset_decomposition,
    dimension,
    kernel,
    min_distance,
    span,
    sumset,
    translate,
)
from nr_propelinear.partition import (
    a7_orbits,
    all_fano_planes,
    apply_point_perm,
    coset_rep_sum_in_kernel,
    disjoint_by_criterion,
    exhaustive_partitions,
    hamming_representation,
    partition_classes,
    partitions_containing,
    pasch_switch,
    plane_orbits,
    reduced_nr_codes_in_h16,
)
from nr_propelinear.permgroup import (
    Automorphism,
    action_on_cosets,
    apply,
    coset_action_images,
    compose,
    conjugate_subgroup,
    is_elementary_abelian,
    is_two_transitive,
    sym_h16,
    sym_of_subcode,
    translation_mask,
    translation_subgroup,
    transvection_perms,
)
from nr_propelinear.structure import (
    DEFAULT_ISO_BUDGET,
    NR_SYM_ORDER,
    PropStructure,
    conjugacy_classes,
    fingerprint,
    is_normalized,
    isomorphism_classes,
    normalization_bound,
    permutation_set,
    run_enumeration,
    star,
    structures_conjugate,
    validate_structure,
)

STRUCTURE_CLASSES = 338
NORMALIZED_CLASSES = 28
ISO_CLASSES = 250
NORMALIZED_ISO_CLASSES = 25
EXTENSION_CLASSES = 3057
EXTENSION_FINGERPRINT_FLOOR = 2284


def _log(msg: str) -> None:
    if not debug_enabled():
        return
    sys.stderr.write(f"[checks] {msg}\n")
    sys.stderr.flush()


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class SuiteResult:
    name: str
    tier: str
    results: list[CheckResult] = field(default_factory=list)
    skipped: bool = False

    @property
    def passed(self) -> bool:
        return self.skipped or all(r.passed for r in self.results)

    def check(self, name: str, passed: bool, detail: object = "") -> None:
        self.results.append(CheckResult(name=name, passed=bool(passed), detail=str(detail)))

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "tier": self.tier,
            "skipped": self.skipped,
            "passed": self.passed,
            "results": [
                {"name": r.name, "passed": r.passed, "detail": r.detail} for r in self.results
            ],
        }


def suite_construction(cfg: RunConfig, out: SuiteResult) -> None:
    nr = nordstrom_robinson()
    out.check("nr_parameters", nr.parameters() == (16, 256, 6), nr.parameters())
    out.check("nr_span_is_rm24", span(nr) == reed_muller(2, 4))
    out.check("nr_span_dimension", dimension(nr) == 11, dimension(nr))
    out.check("nr_kernel_is_rm14", kernel(nr) == reed_muller(1, 4))
    h16 = reed_muller(2, 4)
    out.check("h16_parameters", (h16.size, min_distance(h16)) == (2048, 4))
    out.check("rm14_size", reed_muller(1, 4).size == 32)
    out.check(
        "rm_nested",
        all(reed_muller(r, 4).is_subcode_of(reed_muller(r + 1, 4)) for r in range(4)),
    )
    digits = np.array(list(itertools.product(range(4), repeat=8)), dtype=np.int64)
    out.check("gray_injective", np.unique(gray_many(digits)).size == digits.shape[0])
    octa = octacode()
    out.check("octacode_size", octa.size == 256, octa.size)


def suite_symmetry(cfg: RunConfig, out: SuiteResult) -> None:
    h = sym_h16()
    out.check("sym_h16_order", h.order == 322_560, h.order)
    trans = translation_subgroup(h)
    out.check("translations_order", trans.order == 16, trans.order)
    out.check("translations_elementary_abelian", is_elementary_abelian(trans))
    normal = all(
        conjugate_subgroup(trans, Automorphism(0, tuple(int(v) for v in p))) == trans
        for p in transvection_perms()
    )
    out.check("translations_normal", normal)
    nr = nordstrom_robinson()
    sym = sym_of_subcode(nr)
    out.check("sym_nr_order", sym.order == NR_SYM_ORDER, sym.order)
    induced = action_on_cosets(sym, coset_decomposition(nr))
    out.check("coset_action_order", induced.order == NR_SYM_ORDER // 16, induced.order)
    out.check("coset_action_two_transitive", is_two_transitive(induced))
    images = coset_action_images(sym, coset_decomposition(nr))
    trivial = (images == np.arange(images.shape[1])).all(axis=1)
    out.check(
        "coset_action_kernel_is_translations",
        np.array_equal(trivial, translation_mask(sym)) and int(trivial.sum()) == 16,
        int(trivial.sum()),
    )


def suite_coset_sums(cfg: RunConfig, out: SuiteResult) -> None:
    nr = nordstrom_robinson()
    codes = [nr] + [translate(nr, a) for a in coset_decomposition(nr).reps]
    for i, c in enumerate(codes):
        out.check(f"rep_sum_in_kernel[{i}]", coset_rep_sum_in_kernel(c))


def suite_disjointness(cfg: RunConfig, out: SuiteResult) -> None:
    nr = nordstrom_robinson()
    report = hamming_representation(nr)
    sums = sumset(nr)
    mismatches = [
        w
        for w in reed_muller(2, 4).words
        if disjoint_by_criterion(0, w, nr, report) != (w not in sums)
    ]
    out.check("criterion_matches_brute_force", not mismatches, f"mismatches={len(mismatches)}")


def suite_hamming(cfg: RunConfig, out: SuiteResult) -> None:
    nr = nordstrom_robinson()
    report = hamming_representation(nr)
    out.check("coset_count", len(report.by_subset) == 64, len(report.by_subset))
    out.check("empty_subset_is_kernel", report.by_subset[()] == 0)
    singles = [report.subset_sum((i,)) for i in range(1, 8)]
    rebuilt = set(report.kernel.words)
    for a in singles:
        rebuilt |= set(translate(report.kernel, a).words)
    out.check("singletons_rebuild_code", rebuilt == set(nr.words))


def suite_fano(cfg: RunConfig, out: SuiteResult) -> None:
    planes = all_fano_planes()
    out.check("plane_count", len(planes) == 30, len(planes))
    first, second = a7_orbits(planes)
    out.check("a7_orbit_sizes", (len(first), len(second)) == (15, 15))
    switched = pasch_switch(first[0], 1)
    out.check("pasch_switch_crosses_orbits", switched in second)
    swapped = apply_point_perm(first[0], (2, 1, 3, 4, 5, 6, 7))
    out.check("transposition_swaps_orbits", swapped in second)
    s7 = plane_orbits(planes, [(2, 1, 3, 4, 5, 6, 7), (2, 3, 4, 5, 6, 7, 1)])
    out.check("s7_transitive", len(s7) == 1)


def suite_z4(cfg: RunConfig, out: SuiteResult) -> None:
    s = nordstrom_robinson_structure()
    out.check("z4_structure_valid", validate_structure(s))
    out.check("z4_structure_order", s.size == 256)
    out.check("z4_distinct_permutations", permutation_set(s).shape[0] == 16)
    out.check("z4_not_normalized", not is_normalized(s) and normalization_bound(s.code) == 8)
    supercode = verify_supercode_extension()
    out.check("supercode_extension", supercode.ok, ",".join(supercode.failures))
    results = extend_structure(s)
    out.check("z4_extensions_found", bool(results), len(results))
    failed = [r for r in results if not verify_decomposition(r).ok]
    out.check("decomposition_on_z4_extensions", not failed, f"failed={len(failed)}")


def suite_properties(cfg: RunConfig, out: SuiteResult) -> None:
    rng = np.random.default_rng(cfg.seed)
    n = 16
    bad = 0
    for _ in range(10_000):
        a = Automorphism(int(rng.integers(0, 1 << n)), tuple(int(v) for v in rng.permutation(n)))
        b = Automorphism(int(rng.integers(0, 1 << n)), tuple(int(v) for v in rng.permutation(n)))
        y = int(rng.integers(0, 1 << n))
        bad += apply(compose(a, b), y) != apply(a, apply(b, y))
    out.check("compose_is_action", bad == 0, f"failures={bad}")

    s = nordstrom_robinson_structure()
    words = s.code.words
    bad = 0
    for _ in range(1_000):
        x, y, z = (words[int(k)] for k in rng.integers(0, len(words), size=3))
        bad += star(s, star(s, x, y), z) != star(s, x, star(s, y, z))
    out.check("star_associative", bad == 0, f"failures={bad}")

    structures_dir = cfg.cache_dir / "structures"
    if storage.has_extension_cache(cfg.cache_dir) and structures_dir.is_dir():
        sources = extend_all(storage.load_structures(structures_dir), cache_dir=cfg.cache_dir)
        narrow = all(
            np.array_equal(permutation_set(r.extended), permutation_set(r.source))
            for src in sources
            for r in src.results
        )
        out.check("cached_extensions_narrow", narrow)


def suite_partitions(cfg: RunConfig, out: SuiteResult) -> None:
    nr = nordstrom_robinson()
    parts = partitions_containing(nr)
    out.check("partition_count", len(parts) == 30, len(parts))
    derived = sorted(p.translator_mins() for p in parts)
    exhaustive = exhaustive_partitions(nr)
    out.check("no_other_partitions", derived == exhaustive, len(exhaustive))
    classes = partition_classes(parts)
    sizes = sorted(len(c) for c in classes)
    out.check("isomorphism_classes", sizes == [15, 15], sizes)


def suite_reduced_codes(cfg: RunConfig, out: SuiteResult) -> None:
    report = reduced_nr_codes_in_h16()
    out.check("code_count", len(report.codes) == 8, len(report.codes))
    out.check("conjugation_orbit", report.orbit_size == 8, report.orbit_size)
    out.check("conjugate_symmetry_groups", report.conjugates_match)


def cached_structures(cfg: RunConfig) -> list[PropStructure]:
    """NR structure representatives from the cache, enumerating them on a miss."""
    directory = cfg.cache_dir / "structures"
    if directory.is_dir() and any(directory.glob("structure_*.txt")):
        return storage.load_structures(directory)
    nr = nordstrom_robinson()
    result = run_enumeration(nr, sym_of_subcode(nr), jobs=cfg.jobs, cache_dir=cfg.cache_dir)
    storage.save_structures(directory, result.structures)
    return result.structures


def _against_target(key: str, count: int, target: int) -> dict:
    # fingerprint counts only bound the isomorphism count from below
    return {key: count, f"{key}_exact": count == target, f"{key}_gap": target - count}


def structure_summary(
    structures: list[PropStructure],
    *,
    certify: bool = False,
    iso_budget: int = DEFAULT_ISO_BUDGET,
) -> dict:
    """Class counts for `report structures`.

    With certify, fingerprint buckets are refined by backtracking isomorphism
    tests; pairs that exhaust the budget stay apart and are listed as unknown.
    """
    normalized = [s for s in structures if is_normalized(s)]
    prints = {fingerprint(s) for s in structures}
    normalized_prints = {fingerprint(s) for s in normalized}
    summary: dict = {"conj": len(structures), "normalized_conj": len(normalized)}
    summary.update(_against_target("fingerprint_iso_lb", len(prints), ISO_CLASSES))
    summary.update(
        _against_target(
            "normalized_fingerprint_iso_lb", len(normalized_prints), NORMALIZED_ISO_CLASSES
        )
    )
    if certify:
        full = isomorphism_classes(structures, budget=iso_budget)
        norm = isomorphism_classes(normalized, budget=iso_budget)
        summary["certified_iso"] = len(full.classes)
        summary["certified_unknown_pairs"] = full.unknown_pairs
        summary["normalized_certified_iso"] = len(norm.classes)
        summary["normalized_certified_unknown_pairs"] = norm.unknown_pairs
    return summary


def _count_chain_ok(counts: list[int]) -> bool:
    steps = all(a <= b for a, b in zip(counts, counts[1:]))
    return steps and bool(counts) and counts[-1] == STRUCTURE_CLASSES


def suite_structures(cfg: RunConfig, out: SuiteResult) -> None:
    structures = cached_structures(cfg)
    summary = structure_summary(structures)
    out.check("class_count", summary["conj"] == STRUCTURE_CLASSES, summary)
    out.check("normalized_count", summary["normalized_conj"] == NORMALIZED_CLASSES)
    out.check(
        "fingerprint_iso_lb",
        summary["fingerprint_iso_lb"] <= ISO_CLASSES,
        f"count={summary['fingerprint_iso_lb']} gap={summary['fingerprint_iso_lb_gap']}",
    )
    out.check(
        "normalized_fingerprint_iso_lb",
        summary["normalized_fingerprint_iso_lb"] <= NORMALIZED_ISO_CLASSES,
        f"count={summary['normalized_fingerprint_iso_lb']} "
        f"gap={summary['normalized_fingerprint_iso_lb_gap']}",
    )
    checkpoint = storage.latest_level_checkpoint(cfg.cache_dir, 8)
    if checkpoint is not None:
        counts = checkpoint[2]
        out.check("level_count_chain", _count_chain_ok(counts), counts)
    out.check("all_valid", all(validate_structure(s) and s.size == 256 for s in structures))
    nr = nordstrom_robinson()
    sym = sym_of_subcode(nr)
    z4 = nordstrom_robinson_structure()
    hits = sum(structures_conjugate(z4, s, sym) is not None for s in structures)
    out.check("z4_structure_matches_one_class", hits == 1, hits)
    classes = conjugacy_classes(structures, sym)
    out.check("representatives_pairwise_non_conjugate", len(classes) == len(structures))


def suite_extensions(cfg: RunConfig, out: SuiteResult) -> None:
    structures = cached_structures(cfg)
    sources = extend_all(structures, jobs=cfg.jobs, cache_dir=cfg.cache_dir)
    summary = classify_extensions(sources)
    out.check(
        "non_extendable_sources",
        len(summary.non_extendable_sources) == 1,
        summary.non_extendable_sources,
    )
    out.check(
        "conjugacy_classes",
        summary.conjugacy_classes == EXTENSION_CLASSES,
        summary.conjugacy_classes,
    )
    out.check(
        "fingerprint_classes",
        summary.fingerprint_classes >= EXTENSION_FINGERPRINT_FLOOR,
        summary.fingerprint_classes,
    )


SuiteFn = Callable[[RunConfig, SuiteResult], None]

SUITES: dict[str, tuple[str, SuiteFn]] = {
    "construction": ("fast", suite_construction),
    "symmetry": ("fast", suite_symmetry),
    "coset_sums": ("fast", suite_coset_sums),
    "disjointness": ("fast", suite_disjointness),
    "hamming": ("fast", suite_hamming),
    "fano": ("fast", suite_fano),
    "z4": ("fast", suite_z4),
    "properties": ("fast", suite_properties),
    "partitions": ("medium", suite_partitions),
    "reduced_codes": ("medium", suite_reduced_codes),
    "structures": ("long", suite_structures),
    "extensions": ("long", suite_extensions),
}


class UnknownSuiteError(ValueError):
    pass


def run_suites(cfg: RunConfig, names: Iterable[str] | None = None) -> list[SuiteResult]:
    selected = list(names) if names else list(SUITES)
    unknown = [n for n in selected if n not in SUITES]
    if unknown:
        raise UnknownSuiteError(f"unknown suite: {', '.join(unknown)}")
    out = []
    for name in selected:
        tier, fn = SUITES[name]
        suite = SuiteResult(name=name, tier=tier)
        if not tier_allows(cfg, tier):
            suite.skipped = True
            out.append(suite)
            continue
        t0 = time.monotonic()
        fn(cfg, suite)
        _log(f"suite={name} passed={suite.passed} elapsed_ms={(time.monotonic() - t0) * 1000:.0f}")
        out.append(suite)
    return out


def partitions_summary() -> dict:
    nr = nordstrom_robinson()
    parts = partitions_containing(nr)
    classes = partition_classes(parts)
    return {
        "count": len(parts),
        "iso_classes": len(classes),
        "class_sizes": sorted(len(c) for c in classes),
    }

