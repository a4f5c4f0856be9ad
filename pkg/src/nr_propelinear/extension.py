"""Narrow extensions of propelinear structures from a Nordstrom-Robinson code to H16.

A narrow extension D of (C, *) keeps the permutation set. Its identity part
V = {v : (v, id) in D} is then a subspace with V intersect C = C_id,
|V| = 8 |C_id|, pi V = V for every pi in the permutation set, and V + C = H16.
Conversely every such V gives D = {(v + x, pi_x)}. The search below walks the
subspaces V lying over one partition of H16 at a time.
"""

from __future__ import annotations

import sys
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Sequence

import numpy as np

from nr_propelinear.config import debug_enabled
from nr_propelinear.gf2core import (
    Code,
    coset_mins,
    echelon_basis,
    indices_of,
    kernel,
    members,
    reduce_word,
    span,
    span_words,
)
from nr_propelinear.partition import (
    FanoPlane,
    Partition,
    hamming_representation,
    partitions_containing,
)
from nr_propelinear.permgroup import (
    Automorphism,
    closure,
    permute_word,
    permute_words,
    sym_h16,
)
from nr_propelinear.structure import (
    PropStructure,
    StructureError,
    GroupFingerprint,
    check_structure,
    conjugacy_classes,
    fingerprint,
    identity_subcode,
    permutation_set,
    restrict_structure,
    structure_generators,
    validate_structure,
)

EXTENSION_INDEX = 8


class ExtensionError(RuntimeError):
    pass


def _log(msg: str) -> None:
    if not debug_enabled():
        return
    sys.stderr.write(f"[extension] {msg}\n")
    sys.stderr.flush()


@dataclass(frozen=True, eq=False)
class ExtensionResult:
    source: PropStructure
    partition_index: int
    partition: Partition
    generators: tuple[int, int, int]
    identity_words: np.ndarray
    extended: PropStructure

    def key(self) -> bytes:
        return self.identity_words.tobytes()


@dataclass
class SourceExtensions:
    source_id: int
    source: PropStructure
    partitions_tried: int
    results: list[ExtensionResult] = field(default_factory=list)


@dataclass(frozen=True)
class ExtensionCheck:
    ok: bool
    checks: dict[str, bool]

    @property
    def failures(self) -> list[str]:
        return [name for name, passed in self.checks.items() if not passed]


@dataclass
class ExtensionClassification:
    total_extensions: int
    conjugacy_classes: int
    fingerprint_classes: int
    non_extendable_sources: list[int]
    class_reps: list[tuple[int, int]]
    class_sizes: list[int]
    class_fingerprints: list[GroupFingerprint] = field(default_factory=list)


@lru_cache(maxsize=8)
def _partitions_for(code: Code) -> tuple[Partition, ...]:
    return tuple(partitions_containing(code))


def _perm_generators(s: PropStructure) -> list[tuple[int, ...]]:
    """Perm parts of a generating set of the structure; they generate its permutation set."""
    ident = tuple(range(s.length))
    gens = {tuple(int(v) for v in s.perms[i]) for i in structure_generators(s)}
    gens.discard(ident)
    return sorted(gens)


def _basis_lines(plane: FanoPlane) -> tuple[tuple[int, int, int], ...]:
    """Three lines whose triple-sum cosets are independent modulo the kernel."""
    l1, l2 = plane.lines[0], plane.lines[1]
    shared = (set(l1) & set(l2)).pop()
    third = next(
        line for line in plane.lines if shared in line and line not in (l1, l2)
    )
    l3 = next(line for line in plane.lines if line not in (l1, l2, third))
    return l1, l2, l3


@dataclass(frozen=True, eq=False)
class _SearchContext:
    source: PropStructure
    kernel: Code
    c_id: Code
    perm_gens: list[tuple[int, ...]]
    transversal: np.ndarray
    limit: int


def _make_context(s: PropStructure) -> _SearchContext:
    kern = kernel(s.code)
    c_id = identity_subcode(s)
    if not c_id.is_subcode_of(kern):
        raise ExtensionError("identity subcode is not inside the kernel")
    transversal = np.unique(coset_mins(kern.array, c_id))
    return _SearchContext(
        source=s,
        kernel=kern,
        c_id=c_id,
        perm_gens=_perm_generators(s),
        transversal=transversal,
        limit=len(echelon_basis(c_id.words)) + 3,
    )


def _invariant_closure(
    basis: tuple[int, ...], new: int, gens: Sequence[tuple[int, ...]], limit: int
) -> tuple[int, ...] | None:
    """Smallest pi-invariant subspace containing span(basis) and new; None past limit."""
    current = list(basis)
    queue = [new]
    while queue:
        w = reduce_word(queue.pop(), current)
        if w == 0:
            continue
        current = list(echelon_basis(current + [w]))
        if len(current) > limit:
            return None
        queue.extend(permute_word(g, w) for g in gens)
    return tuple(current)


def _admissible(ctx: _SearchContext, basis: tuple[int, ...], line_mins: np.ndarray) -> bool:
    words = span_words(basis)
    in_kernel = members(ctx.kernel.array, words)
    if int(in_kernel.sum()) != ctx.c_id.size:
        return False
    outside = words[~in_kernel]
    return bool(members(line_mins, coset_mins(outside, ctx.kernel)).all())


_Found = tuple[tuple[int, ...], tuple[int, int, int]]


def _identity_spaces(ctx: _SearchContext, partition: Partition) -> list[_Found]:
    report = hamming_representation(ctx.source.code)
    plane = partition.plane
    if plane is None:
        raise ExtensionError("partition carries no Fano plane")
    line_mins = np.sort(coset_mins(np.array(partition.translators, dtype=np.int64), ctx.kernel))
    starts = [report.subset_sum(line) for line in _basis_lines(plane)]
    base = echelon_basis(ctx.c_id.words)
    found: dict[bytes, _Found] = {}

    def search(level: int, basis: tuple[int, ...], chosen: list[int]) -> None:
        if level == 3:
            if len(basis) != ctx.limit:
                return
            key = span_words(basis).tobytes()
            found.setdefault(key, (basis, (chosen[0], chosen[1], chosen[2])))
            return
        for k in ctx.transversal.tolist():
            t = starts[level] ^ k
            grown = _invariant_closure(basis, t, ctx.perm_gens, ctx.limit)
            if grown is None or not _admissible(ctx, grown, line_mins):
                continue
            search(level + 1, grown, chosen + [t])

    search(0, base, [])
    return [found[k] for k in sorted(found)]


def _extended_structure(s: PropStructure, identity_words: np.ndarray, c_id: Code) -> PropStructure:
    reps = np.unique(coset_mins(identity_words, c_id))
    if reps.size != EXTENSION_INDEX:
        raise ExtensionError(f"identity space has {reps.size} classes over C_id, expected 8")
    xs = (reps[:, None] ^ s.code.array[None, :]).ravel()
    perms = np.tile(s.perms, (reps.size, 1))
    return PropStructure.from_elements(s.length, xs, perms)


def extend_with_partition(
    s: PropStructure, partition: Partition, partition_index: int = 0
) -> list[ExtensionResult]:
    ctx = _make_context(s)
    return _extend_with_context(ctx, partition, partition_index)


def _extend_with_context(
    ctx: _SearchContext, partition: Partition, partition_index: int
) -> list[ExtensionResult]:
    out = []
    hull = span(ctx.source.code)
    for basis, gens in _identity_spaces(ctx, partition):
        words = span_words(basis)
        extended = _extended_structure(ctx.source, words, ctx.c_id)
        if extended.code != hull:
            raise ExtensionError("identity space does not fill the span")
        out.append(
            ExtensionResult(
                source=ctx.source,
                partition_index=partition_index,
                partition=partition,
                generators=gens,
                identity_words=words,
                extended=extended,
            )
        )
    return out


def extend_structure(s: PropStructure) -> list[ExtensionResult]:
    """All narrow extensions of s to span(s.code), one per identity subspace."""
    if not validate_structure(s):
        raise ExtensionError("source structure is not valid")
    t0 = time.monotonic()
    ctx = _make_context(s)
    out: list[ExtensionResult] = []
    for idx, partition in enumerate(_partitions_for(s.code)):
        out.extend(_extend_with_context(ctx, partition, idx))
    _log(
        f"extend_structure c_id={ctx.c_id.size} found={len(out)} "
        f"elapsed_ms={(time.monotonic() - t0) * 1000:.0f}"
    )
    return out


def generated_extension(s: PropStructure, translators: Sequence[int]) -> PropStructure | None:
    """<(C, *), (t1, id), (t2, id), (t3, id)> when it is a regular group on span(C), else None."""
    n = s.length
    gens = [s.element(int(s.code.array[i])) for i in structure_generators(s)]
    gens += [Automorphism.translation(int(t), n) for t in translators]
    hull = span(s.code)
    result = closure(gens, hull.size)
    if result.exceeded or result.group is None or result.group.order != hull.size:
        return None
    group = result.group
    try:
        d = PropStructure.from_elements(n, group.shifts, group.perms)
    except StructureError:
        return None
    if d.code != hull or not check_structure(d).ok:
        return None
    return d


def _left_coset_keys(d: PropStructure, c: Code) -> set[bytes]:
    ids, distinct = d.perm_table
    moved = np.stack([permute_words(p, c.array) for p in distinct])
    keys = set()
    for x, u in zip(d.code.array.tolist(), ids.tolist()):
        keys.add(np.sort(np.int64(x) ^ moved[u]).tobytes())
    return keys


def verify_decomposition(e: ExtensionResult) -> ExtensionCheck:
    """Semidirect-type decomposition of an extension over its source."""
    d, s = e.extended, e.source
    c_id = identity_subcode(s)
    d_id = identity_subcode(d)
    checks: dict[str, bool] = {}

    closed = bool(members(d_id.array, (d_id.array[:, None] ^ d_id.array[None, :]).ravel()).all())
    checks["identity_subgroup"] = (
        c_id.is_subcode_of(d_id) and d_id.size == EXTENSION_INDEX * c_id.size and closed
    )

    checks["identity_normal"] = all(
        d_id.contains_all(permute_words(p, d_id.array)) for p in permutation_set(d)
    )

    coset_keys = _left_coset_keys(d, s.code)
    translates = {np.sort(np.int64(v) ^ s.code.array).tobytes() for v in d_id.words}
    blocks = {b.array.tobytes() for b in e.partition.blocks()}
    checks["left_cosets_are_translates"] = (
        len(coset_keys) == EXTENSION_INDEX and coset_keys == translates == blocks
    )

    checks["narrow"] = np.array_equal(permutation_set(d), permutation_set(s))
    checks["restriction"] = restrict_structure(d, s.code) == s

    complement = np.unique(span_words(echelon_basis(e.generators)))
    product = np.unique((complement[:, None] ^ s.code.array[None, :]).ravel())
    checks["factorisation"] = (
        complement.size == EXTENSION_INDEX
        and not members(c_id.array, complement[1:]).any()
        and product.size == d.size
        and d.code.contains_all(product)
    )
    return ExtensionCheck(ok=all(checks.values()), checks=checks)


def verify_supercode_extension(*, run_search: bool = True) -> ExtensionCheck:
    """The Z4-linear structure on N extends narrowly to the Z4-linear structure on H16."""
    from nr_propelinear.constructions import (
        gray_many,
        nordstrom_robinson,
        nordstrom_robinson_structure,
        nr_relabeling,
        reed_muller,
        z4_structure,
        z4_supercode,
    )

    t0 = time.monotonic()
    source = nordstrom_robinson_structure()
    supercode = z4_supercode()
    big = z4_structure(supercode, relabel=nr_relabeling())
    checks: dict[str, bool] = {}
    checks["supercode_order"] = supercode.size == 2048 and big.size == 2048
    checks["supercode_gray_image"] = big.code == reed_muller(2, 4)
    checks["subgroup"] = restrict_structure(big, nordstrom_robinson()) == source
    checks["narrow"] = np.array_equal(permutation_set(big), permutation_set(source))
    checks["sixteen_permutations"] = permutation_set(source).shape[0] == 16

    raw = z4_structure(supercode)
    pos = indices_of(raw.code.array, gray_many(supercode.elements))
    perm_ids = raw.perm_table[0][pos]
    _, doubled_ids = np.unique((2 * supercode.elements) % 4, axis=0, return_inverse=True)
    doubled_ids = doubled_ids.reshape(-1)
    pairs = np.unique(np.column_stack([perm_ids, doubled_ids]), axis=0)
    checks["perm_determined_by_double"] = (
        pairs.shape[0] == np.unique(perm_ids).size == np.unique(doubled_ids).size
    )

    if run_search:
        found = extend_structure(source)
        checks["found_by_search"] = any(r.extended == big for r in found)
    _log(f"verify_supercode_extension elapsed_ms={(time.monotonic() - t0) * 1000:.0f}")
    return ExtensionCheck(ok=all(checks.values()), checks=checks)


_Record = tuple[int, tuple[int, int, int], np.ndarray]


def _extend_source_job(
    args: tuple[int, int, np.ndarray, np.ndarray]
) -> tuple[int, list[_Record]]:
    source_id, length, xs, perms = args
    s = PropStructure.from_elements(length, xs, perms)
    results = extend_structure(s)
    return source_id, [(r.partition_index, r.generators, r.identity_words) for r in results]


def _results_from_records(
    s: PropStructure, records: Sequence[_Record]
) -> list[ExtensionResult]:
    partitions = _partitions_for(s.code)
    c_id = identity_subcode(s)
    out = []
    for idx, gens, words in records:
        words = np.asarray(words, dtype=np.int64)
        out.append(
            ExtensionResult(
                source=s,
                partition_index=int(idx),
                partition=partitions[int(idx)],
                generators=tuple(int(t) for t in gens),  # type: ignore[arg-type]
                identity_words=words,
                extended=_extended_structure(s, words, c_id),
            )
        )
    return out


def extend_all(
    structures: Sequence[PropStructure],
    *,
    jobs: int = 1,
    cache_dir: Path | None = None,
) -> list[SourceExtensions]:
    """Extensions of every source, cached per source under cache_dir."""
    from nr_propelinear import storage

    t0 = time.monotonic()
    records: dict[int, list] = {}
    pending = []
    for i, s in enumerate(structures):
        cached = storage.load_extension_cache(cache_dir, s) if cache_dir is not None else None
        if cached is not None:
            records[i] = cached
        else:
            pending.append((i, s.length, s.code.array, s.perms))

    if jobs > 1 and len(pending) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            computed = list(pool.map(_extend_source_job, pending))
    else:
        computed = [_extend_source_job(args) for args in pending]
    for source_id, recs in computed:
        records[source_id] = recs
        if cache_dir is not None:
            storage.save_extension_cache(cache_dir, structures[source_id], recs)

    out = []
    for i, s in enumerate(structures):
        out.append(
            SourceExtensions(
                source_id=i,
                source=s,
                partitions_tried=len(_partitions_for(s.code)),
                results=_results_from_records(s, records[i]),
            )
        )
    _log(
        f"extend_all sources={len(structures)} computed={len(pending)} "
        f"elapsed_ms={(time.monotonic() - t0) * 1000:.0f}"
    )
    return out


def classify_extensions(sources: Sequence[SourceExtensions]) -> ExtensionClassification:
    """Conjugacy classes of all extensions under coordinate symmetries of H16."""
    t0 = time.monotonic()
    flat: list[tuple[int, int]] = []
    structures: list[PropStructure] = []
    for src in sources:
        for j, r in enumerate(src.results):
            flat.append((src.source_id, j))
            structures.append(r.extended)
    classes = conjugacy_classes(structures, sym_h16()) if structures else []
    reps = [flat[c[0]] for c in classes]
    rep_prints = [fingerprint(structures[c[0]]) for c in classes]
    _log(
        f"classify_extensions total={len(structures)} classes={len(classes)} "
        f"elapsed_ms={(time.monotonic() - t0) * 1000:.0f}"
    )
    return ExtensionClassification(
        total_extensions=len(structures),
        conjugacy_classes=len(classes),
        fingerprint_classes=len(set(rep_prints)),
        non_extendable_sources=[src.source_id for src in sources if not src.results],
        class_reps=reps,
        class_sizes=[len(c) for c in classes],
        class_fingerprints=rep_prints,
    )


def extension_report(
    sources: Sequence[SourceExtensions],
    classification: ExtensionClassification | None = None,
) -> dict:
    rep_sources: Counter[int] = Counter()
    source_prints: dict[int, set[GroupFingerprint]] = {}
    if classification is not None:
        rep_sources.update(sid for sid, _ in classification.class_reps)
        for (sid, _), fp in zip(classification.class_reps, classification.class_fingerprints):
            source_prints.setdefault(sid, set()).add(fp)
    rows = []
    for src in sources:
        row = {
            "source_id": src.source_id,
            "partitions_tried": src.partitions_tried,
            "extensions_found": len(src.results),
        }
        if classification is not None:
            row["conjugacy_class_reps"] = rep_sources.get(src.source_id, 0)
            row["fingerprints"] = len(source_prints.get(src.source_id, ()))
        rows.append(row)
    payload: dict = {"sources": rows}
    if classification is not None:
        payload["totals"] = {
            "extensions": classification.total_extensions,
            "conjugacy_classes": classification.conjugacy_classes,
            "fingerprint_classes": classification.fingerprint_classes,
            "non_extendable_sources": classification.non_extendable_sources,
        }
    return payload
