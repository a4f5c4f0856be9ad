"""Fano planes and the partitions of H16 into translates of a Nordstrom-Robinson code.

Points of a plane are the labels 1..7 of the nontrivial kernel cosets
a_1 + Ker, ..., a_7 + Ker of the base code. A plane S yields the partition
base + sum over lines {i,j,k} of (a_i + a_j + a_k + base).
"""

from __future__ import annotations

import itertools
import sys
import time
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Sequence

import numpy as np

from nr_propelinear.config import debug_enabled
from nr_propelinear.gf2core import (
    Code,
    CosetDecomposition,
    coset_decomposition,
    coset_min,
    coset_mins,
    kernel,
    members,
    min_distance,
    span,
    translate,
)
from nr_propelinear.permgroup import (
    Automorphism,
    H16_ORDER,
    action_on_cosets,
    conjugate_subgroup,
    mapping_perms,
    permute_word_many,
    sym_of_subcode,
)

POINTS = tuple(range(1, 8))
FANO_PLANE_COUNT = 30


class PartitionError(RuntimeError):
    pass


def _log(msg: str) -> None:
    if not debug_enabled():
        return
    sys.stderr.write(f"[partition] {msg}\n")
    sys.stderr.flush()


Line = tuple[int, int, int]


@dataclass(frozen=True)
class FanoPlane:
    lines: tuple[Line, ...]

    def __post_init__(self) -> None:
        if len(self.lines) != 7:
            raise PartitionError("a Fano plane has 7 lines")
        seen: set[tuple[int, int]] = set()
        for line in self.lines:
            if len(set(line)) != 3 or not set(line) <= set(POINTS):
                raise PartitionError(f"bad line {line}")
            for pair in itertools.combinations(sorted(line), 2):
                if pair in seen:
                    raise PartitionError(f"pair {pair} lies on two lines")
                seen.add(pair)
        if len(seen) != 21:
            raise PartitionError("some pair of points lies on no line")

    @classmethod
    def from_lines(cls, lines: Sequence[Sequence[int]]) -> "FanoPlane":
        return cls(tuple(sorted(tuple(sorted(int(p) for p in line)) for line in lines)))

    def lines_through(self, point: int) -> list[Line]:
        return [line for line in self.lines if point in line]

    def third_point(self, a: int, b: int) -> int:
        for line in self.lines:
            if a in line and b in line:
                return next(p for p in line if p not in (a, b))
        raise PartitionError(f"no line through {a} and {b}")


def all_fano_planes() -> list[FanoPlane]:
    """Every Steiner triple system on 1..7, by backtracking on the smallest uncovered pair."""
    found: list[FanoPlane] = []

    def search(lines: list[Line], covered: frozenset[tuple[int, int]]) -> None:
        if len(covered) == 21:
            found.append(FanoPlane.from_lines(lines))
            return
        a, b = next(pair for pair in itertools.combinations(POINTS, 2) if pair not in covered)
        for c in POINTS:
            if c in (a, b):
                continue
            line = tuple(sorted((a, b, c)))
            pairs = set(itertools.combinations(line, 2))
            if pairs & covered:
                continue
            search(lines + [line], covered | pairs)

    search([], frozenset())
    planes = sorted(set(found), key=lambda p: p.lines)
    if len(planes) != FANO_PLANE_COUNT:
        raise PartitionError(f"found {len(planes)} Fano planes, expected {FANO_PLANE_COUNT}")
    return planes


def apply_point_perm(plane: FanoPlane, perm: Sequence[int]) -> FanoPlane:
    """perm[i - 1] is the image of point i."""
    if sorted(perm) != list(POINTS):
        raise PartitionError("point permutation must be a bijection of 1..7")
    return FanoPlane.from_lines([[perm[p - 1] for p in line] for line in plane.lines])


def _is_even(perm: Sequence[int]) -> bool:
    inversions = sum(1 for i, j in itertools.combinations(range(len(perm)), 2) if perm[i] > perm[j])
    return inversions % 2 == 0


def plane_orbits(
    planes: Sequence[FanoPlane], perms: Sequence[Sequence[int]]
) -> list[list[FanoPlane]]:
    index = {p: i for i, p in enumerate(planes)}
    parent = list(range(len(planes)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for perm in perms:
        for i, plane in enumerate(planes):
            j = index.get(apply_point_perm(plane, perm))
            if j is None:
                raise PartitionError("point permutation leaves the plane list")
            ri, rj = find(i), find(j)
            if ri != rj:
                parent[max(ri, rj)] = min(ri, rj)
    groups: dict[int, list[FanoPlane]] = {}
    for i, plane in enumerate(planes):
        groups.setdefault(find(i), []).append(plane)
    return [groups[k] for k in sorted(groups)]


def a7_orbits(planes: Sequence[FanoPlane]) -> tuple[list[FanoPlane], list[FanoPlane]]:
    evens = [p for p in itertools.permutations(POINTS) if _is_even(p)]
    orbits = plane_orbits(planes, evens)
    sizes = sorted(len(o) for o in orbits)
    if sizes != [15, 15]:
        raise PartitionError(f"A7 orbit sizes are {sizes}, expected [15, 15]")
    return orbits[0], orbits[1]


def pasch_switch(plane: FanoPlane, point: int) -> FanoPlane:
    """Swap the four lines avoiding point for the other four transversals of its pencil."""
    pencil = plane.lines_through(point)
    pairs = [tuple(q for q in line if q != point) for line in pencil]
    avoiding = {line for line in plane.lines if point not in line}
    transversals = {tuple(sorted(choice)) for choice in itertools.product(*pairs)}
    if not avoiding <= transversals:
        raise PartitionError("lines avoiding the point are not transversals")
    return FanoPlane.from_lines(list(pencil) + sorted(transversals - avoiding))


@dataclass(frozen=True)
class CosetPartitionReport:
    """H16 as the union of the 64 kernel cosets indexed by subsets of 1..7 of size <= 3."""

    decomposition: CosetDecomposition
    by_subset: dict[tuple[int, ...], int]

    @property
    def kernel(self) -> Code:
        return self.decomposition.kernel

    @property
    def reps(self) -> tuple[int, ...]:
        return self.decomposition.reps

    @cached_property
    def by_min(self) -> dict[int, tuple[int, ...]]:
        return {m: subset for subset, m in self.by_subset.items()}

    def subset_of(self, w: int) -> tuple[int, ...] | None:
        return self.by_min.get(coset_min(w, self.kernel))

    def subset_sum(self, subset: Sequence[int]) -> int:
        out = 0
        for i in subset:
            out ^= self.reps[i - 1]
        return out


def hamming_representation(n: Code) -> CosetPartitionReport:
    d = coset_decomposition(n)
    if len(d.reps) != 7 or d.kernel.size != 32:
        raise PartitionError("base code is not split into eight kernel cosets")
    by_subset: dict[tuple[int, ...], int] = {}
    for size in range(4):
        for subset in itertools.combinations(POINTS, size):
            v = 0
            for i in subset:
                v ^= d.reps[i - 1]
            by_subset[subset] = coset_min(v, d.kernel)
    if len(set(by_subset.values())) != 64:
        raise PartitionError("two subsets index the same kernel coset")
    union = np.concatenate([d.kernel.array ^ np.int64(m) for m in by_subset.values()])
    hull = span(n)
    if np.unique(union).size != hull.size or not members(hull.array, union).all():
        raise PartitionError("kernel cosets do not cover the span exactly")
    return CosetPartitionReport(decomposition=d, by_subset=by_subset)


def coset_rep_sum_in_kernel(n: Code) -> bool:
    d = coset_decomposition(n)
    total = 0
    for a in d.reps:
        total ^= a
    return total in d.kernel


def disjoint_by_criterion(
    a: int, b: int, n: Code, report: CosetPartitionReport | None = None
) -> bool:
    """a + n and b + n are disjoint iff a + b sits in a triple-sum kernel coset."""
    report = report or hamming_representation(n)
    subset = report.subset_of(a ^ b)
    if subset is None:
        raise PartitionError("a + b lies outside the span of the code")
    return len(subset) == 3


@dataclass(frozen=True)
class Partition:
    base: Code
    translators: tuple[int, ...]
    plane: FanoPlane | None = None

    def blocks(self) -> list[Code]:
        return [self.base] + [translate(self.base, t) for t in self.translators]

    def block_labels(self, report: CosetPartitionReport) -> list[tuple[int, ...]]:
        labels = [report.subset_of(t) for t in self.translators]
        if any(lab is None for lab in labels):
            raise PartitionError("translator lies outside the span of the base")
        return [()] + labels  # type: ignore[list-item]

    def translator_mins(self) -> tuple[int, ...]:
        kern = kernel(self.base)
        return tuple(sorted(coset_min(t, kern) for t in self.translators))


def verify_partition(p: Partition) -> bool:
    blocks = p.blocks()
    union = np.concatenate([b.array for b in blocks])
    hull = span(p.base)
    return (
        len(blocks) == 8
        and np.unique(union).size == union.size == hull.size
        and bool(members(hull.array, union).all())
    )


def derived_plane(p: Partition, report: CosetPartitionReport | None = None) -> FanoPlane:
    if p.plane is not None:
        return p.plane
    report = report or hamming_representation(p.base)
    labels = p.block_labels(report)[1:]
    if any(len(lab) != 3 for lab in labels):
        raise PartitionError("translators do not lie in triple-sum cosets")
    return FanoPlane.from_lines(labels)


def partitions_containing(n: Code) -> list[Partition]:
    t0 = time.monotonic()
    report = hamming_representation(n)
    out = []
    for plane in all_fano_planes():
        translators = tuple(report.subset_sum(line) for line in plane.lines)
        p = Partition(base=n, translators=translators, plane=plane)
        if not verify_partition(p):
            raise PartitionError(f"plane {plane.lines} does not give a partition")
        out.append(p)
    _log(f"partitions_containing count={len(out)} elapsed_ms={(time.monotonic() - t0) * 1000:.0f}")
    return out


def exhaustive_partitions(n: Code) -> list[tuple[int, ...]]:
    """All partitions of span(n) into n and seven translates, as sorted translator coset mins.

    Translates disjoint from n come from the 35 triple-sum cosets; a partition is
    a 7-clique of pairwise disjoint translates.
    """
    report = hamming_representation(n)
    triples = sorted(m for s, m in report.by_subset.items() if len(s) == 3)
    k = len(triples)
    adj = np.zeros((k, k), dtype=bool)
    for i in range(k):
        for j in range(i + 1, k):
            adj[i, j] = adj[j, i] = disjoint_by_criterion(triples[i], triples[j], n, report)
    found: list[tuple[int, ...]] = []

    def extend(clique: list[int], candidates: list[int]) -> None:
        if len(clique) == 7:
            found.append(tuple(triples[i] for i in clique))
            return
        for pos, c in enumerate(candidates):
            rest = [d for d in candidates[pos + 1 :] if adj[c, d]]
            if len(clique) + 1 + len(rest) >= 7:
                extend(clique + [c], rest)

    extend([], list(range(k)))
    return sorted(found)


@lru_cache(maxsize=8)
def _induced_point_perms(n: Code) -> np.ndarray:
    """Sym(n) on the seven nontrivial kernel cosets, as images of points 1..7."""
    induced = action_on_cosets(sym_of_subcode(n), coset_decomposition(n))
    return induced.perms.astype(np.int64) + 1


def partitions_isomorphic(p: Partition, q: Partition) -> bool:
    """Some coordinate symmetry of the span sends the blocks of p onto those of q.

    A symmetry must send the block holding 0 to the block holding 0, so it maps
    p.base onto q.base.
    """
    if span(p.base) != span(q.base):
        return False
    if p.base == q.base:
        plane_p, target = derived_plane(p), derived_plane(q)
        return any(
            apply_point_perm(plane_p, tuple(int(v) for v in perm)) == target
            for perm in _induced_point_perms(p.base)
        )
    cand = mapping_perms(p.base, q.base)
    if cand.shape[0] == 0:
        return False
    kern_q = kernel(q.base)
    target = np.array(q.translator_mins(), dtype=np.int64)
    images = np.stack(
        [coset_mins(permute_word_many(cand, t), kern_q) for t in p.translators], axis=1
    )
    return bool((np.sort(images, axis=1) == target).all(axis=1).any())


def partition_classes(partitions: Sequence[Partition]) -> list[list[int]]:
    classes: list[list[int]] = []
    for i, p in enumerate(partitions):
        for members_ in classes:
            if partitions_isomorphic(p, partitions[members_[0]]):
                members_.append(i)
                break
        else:
            classes.append([i])
    return classes


@dataclass(frozen=True)
class ReducedCodesReport:
    codes: list[Code]
    orbit_size: int
    conjugates_match: bool


def reduced_nr_codes_in_h16(n: Code | None = None) -> ReducedCodesReport:
    """The eight codes a + n for a in {0, a_1, ..., a_7}, cross-checked by conjugation."""
    from nr_propelinear.constructions import nordstrom_robinson

    n = n or nordstrom_robinson()
    t0 = time.monotonic()
    d = coset_decomposition(n)
    codes = [n] + [translate(n, a) for a in d.reps]
    if len(set(codes)) != 8:
        raise PartitionError("reduced translates are not distinct")
    for c in codes:
        if not c.is_reduced() or c.size != 256 or min_distance(c) != 6:
            raise PartitionError("translate is not a reduced (16, 256, 6) code")
    base_sym = sym_of_subcode(n)
    conjugates = [base_sym]
    matches = True
    for c in codes[1:]:
        transversal = mapping_perms(n, c)
        if transversal.shape[0] == 0:
            raise PartitionError("no symmetry of the span carries the base onto a translate")
        sigma = Automorphism(0, tuple(int(v) for v in transversal[0]))
        conj = conjugate_subgroup(base_sym, sigma)
        matches &= conj == sym_of_subcode(c)
        conjugates.append(conj)
    orbit_size = len(set(conjugates))
    if orbit_size != len(codes):
        raise PartitionError(f"conjugation orbit has size {orbit_size}, expected {len(codes)}")
    if H16_ORDER // base_sym.order != orbit_size:
        raise PartitionError("symmetry group of the base is not self-normalizing in Sym(H16)")
    _log(f"reduced_nr_codes_in_h16 elapsed_ms={(time.monotonic() - t0) * 1000:.0f}")
    return ReducedCodesReport(codes=codes, orbit_size=orbit_size, conjugates_match=matches)
