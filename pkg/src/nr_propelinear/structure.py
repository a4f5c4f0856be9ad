"""Propelinear structures: regular groups of automorphisms of a code.

A structure on a code C assigns a permutation pi_x to every codeword x so that
{(x, pi_x)} is a group acting regularly on C. It is stored as the sorted code
plus a permutation table aligned with the code's word order.
"""

from __future__ import annotations

import hashlib
import sys
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

from nr_propelinear.config import debug_enabled
from nr_propelinear.gf2core import Code, indices_of, kernel
from nr_propelinear.permgroup import (
    Automorphism,
    PermGroupSet,
    conjugate_elements,
    cycle_type,
    index_action,
    inverse,
    inverse_perms,
    permute_rows,
    permute_word,
    permute_word_many,
    permute_words,
)

NR_SYM_ORDER = 40_320
DEFAULT_ISO_BUDGET = 200_000


class StructureError(RuntimeError):
    pass


def _log(msg: str) -> None:
    if not debug_enabled():
        return
    sys.stderr.write(f"[structure] {msg}\n")
    sys.stderr.flush()


@dataclass(frozen=True, eq=False)
class PropStructure:
    code: Code
    perms: np.ndarray

    @classmethod
    def from_elements(
        cls, length: int, xs: np.ndarray | Sequence[int], perms: np.ndarray
    ) -> "PropStructure":
        xs = np.asarray(xs, dtype=np.int64)
        order = np.argsort(xs, kind="stable")
        ordered = xs[order]
        if ordered.size > 1 and (np.diff(ordered) == 0).any():
            raise StructureError("duplicate word parts: not a regular group")
        code = Code(length=length, words=tuple(int(v) for v in ordered))
        return cls(code=code, perms=np.asarray(perms)[order].astype(np.uint8))

    @property
    def size(self) -> int:
        return self.code.size

    @property
    def length(self) -> int:
        return self.code.length

    def perm_of(self, x: int) -> tuple[int, ...]:
        return tuple(int(v) for v in self.perms[self.code.index(x)])

    def element(self, x: int) -> Automorphism:
        return Automorphism(x, self.perm_of(x))

    def elements(self) -> Iterator[Automorphism]:
        for x, p in zip(self.code.words, self.perms):
            yield Automorphism(x, tuple(int(v) for v in p))

    def key(self) -> bytes:
        return self.code.array.tobytes() + self.perms.astype(np.uint8).tobytes()

    def digest(self) -> str:
        return hashlib.sha256(self.key()).hexdigest()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PropStructure):
            return NotImplemented
        return self.length == other.length and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    @cached_property
    def perm_table(self) -> tuple[np.ndarray, np.ndarray]:
        """(ids, distinct): distinct permutations and each codeword's row in it."""
        distinct, ids = np.unique(self.perms, axis=0, return_inverse=True)
        return ids.reshape(-1).astype(np.int64), distinct

    def as_group(self) -> PermGroupSet:
        return PermGroupSet.from_arrays(self.length, self.perms, self.code.array)


@dataclass(frozen=True)
class StructureCheck:
    ok: bool
    failures: tuple[str, ...] = ()


@dataclass(frozen=True)
class GroupFingerprint:
    """Sorted multiset of (element order, centralizer order) as (order, cent, count)."""

    counts: tuple[tuple[int, int, int], ...]

    @property
    def group_order(self) -> int:
        return sum(c for _, _, c in self.counts)

    def pairs(self) -> list[tuple[int, int]]:
        out: list[tuple[int, int]] = []
        for order, cent, count in self.counts:
            out.extend([(order, cent)] * count)
        return out

    def as_list(self) -> list[list[int]]:
        return [list(t) for t in self.counts]


def star(s: PropStructure, x: int, y: int) -> int:
    if y not in s.code:
        raise StructureError(f"word {y} is not a codeword")
    return x ^ permute_word(s.perm_of(x), y)


def _permuted_code(s: PropStructure) -> np.ndarray:
    """Row u holds distinct permutation u applied to every codeword."""
    _, distinct = s.perm_table
    return np.stack([permute_words(p, s.code.array) for p in distinct])


def star_table(s: PropStructure) -> np.ndarray:
    """Index table of the group law: entry (i, j) is the index of x_i * x_j, or -1."""
    ids, _ = s.perm_table
    moved = _permuted_code(s)[ids]
    words = s.code.array[:, None] ^ moved
    return indices_of(s.code.array, words).astype(np.int64)


def _composition_ids(distinct: np.ndarray) -> np.ndarray:
    """comp[i, j] = id of the perm part of (., p_i)(., p_j), or -1 when outside."""
    u, n = distinct.shape
    lookup = {row.tobytes(): k for k, row in enumerate(distinct.astype(np.uint8))}
    prods = distinct[np.arange(u)[None, :, None], distinct[:, None, :].astype(np.intp)]
    comp = np.full((u, u), -1, dtype=np.int64)
    for i in range(u):
        for j in range(u):
            comp[i, j] = lookup.get(prods[i, j].astype(np.uint8).tobytes(), -1)
    return comp


def check_structure(s: PropStructure) -> StructureCheck:
    """Diagnose the group, regularity and code-preservation conditions."""
    failures: list[str] = []
    n, m = s.length, s.size
    if s.perms.shape != (m, n):
        return StructureCheck(False, ("permutation table has the wrong shape",))
    if not s.code.is_reduced():
        return StructureCheck(False, ("code is not reduced",))
    if not (np.sort(s.perms, axis=1) == np.arange(n)).all():
        return StructureCheck(False, ("some entry is not a permutation",))
    if not (s.perms[s.code.index(0)] == np.arange(n)).all():
        failures.append("the element at 0 is not the identity")

    table = star_table(s)
    if (table < 0).any():
        failures.append("automorphism does not preserve the code")
        return StructureCheck(False, tuple(failures))
    if not (np.sort(table, axis=1) == np.arange(m)).all():
        failures.append("y -> x*y is not a bijection of the code")

    ids, distinct = s.perm_table
    comp = _composition_ids(distinct)
    expected = comp[ids[:, None], ids[None, :]]
    if not (ids[table] == expected).all():
        failures.append("permutation of x*y differs from the composed permutations")
    return StructureCheck(not failures, tuple(failures))


def validate_structure(s: PropStructure) -> bool:
    result = check_structure(s)
    if not result.ok:
        _log(f"validate_structure failed: {'; '.join(result.failures)}")
    return result.ok


def permutation_set(s: PropStructure) -> np.ndarray:
    return s.perm_table[1]


def identity_subcode(s: PropStructure) -> Code:
    mask = (s.perms == np.arange(s.length)).all(axis=1)
    return Code.from_words(s.length, s.code.array[mask])


def normalization_bound(code: Code) -> int:
    """|C| / |Ker(C)|: the fewest distinct permutations a structure on C can use."""
    return code.size // kernel(code).size


def is_normalized(s: PropStructure) -> bool:
    return permutation_set(s).shape[0] == normalization_bound(s.code)


def restrict_structure(s: PropStructure, sub: Code) -> PropStructure:
    mask = np.isin(s.code.array, sub.array)
    return PropStructure.from_elements(s.length, s.code.array[mask], s.perms[mask])


def element_orders(s: PropStructure) -> np.ndarray:
    xs = s.code.array
    perms = s.perms.astype(np.intp)
    orders = np.ones(s.size, dtype=np.int64)
    z = xs.copy()
    active = z != 0
    k = 1
    while active.any():
        k += 1
        if k > s.size:
            raise StructureError("element order exceeds the group order")
        z[active] = xs[active] ^ permute_rows(perms[active], z[active])
        done = active & (z == 0)
        orders[done] = k
        active &= z != 0
    return orders


def centralizer_orders(s: PropStructure) -> np.ndarray:
    xs = s.code.array
    ids, distinct = s.perm_table
    moved = _permuted_code(s)
    out = np.empty(s.size, dtype=np.int64)
    for g in range(s.size):
        left = xs[g] ^ moved[ids[g]]
        right = xs ^ permute_word_many(distinct, int(xs[g]))[ids]
        out[g] = int((left == right).sum())
    return out


def fingerprint(s: PropStructure) -> GroupFingerprint:
    pairs = Counter(zip(element_orders(s).tolist(), centralizer_orders(s).tolist()))
    return GroupFingerprint(
        counts=tuple(sorted((o, c, k) for (o, c), k in pairs.items()))
    )


def conjugacy_invariant(s: PropStructure) -> tuple:
    """Cheap invariant of conjugation by coordinate permutations."""
    ids, distinct = s.perm_table
    types = [cycle_type(p) for p in distinct]
    orders = element_orders(s)
    counts = Counter((int(o), types[i]) for o, i in zip(orders, ids))
    return (s.size, tuple(sorted(counts.items())))


def structure_generators(s: PropStructure) -> list[int]:
    """Greedy generating set as codeword indices, larger element orders first."""
    table = star_table(s)
    if (table < 0).any():
        raise StructureError("structure is not closed")
    orders = element_orders(s)
    candidates = sorted(range(s.size), key=lambda i: (-int(orders[i]), i))
    inside = np.zeros(s.size, dtype=bool)
    inside[s.code.index(0)] = True
    gens: list[int] = []
    for g in candidates:
        if inside[g]:
            continue
        gens.append(g)
        while True:
            cur = np.flatnonzero(inside)
            prods = np.unique(table[np.ix_(cur, gens)])
            if inside[prods].all():
                break
            inside[prods] = True
        if inside.all():
            break
    return gens


def conjugator_candidates(
    gen_xs: Sequence[int],
    gen_perms: np.ndarray,
    target_xs: np.ndarray,
    target_perms: np.ndarray,
    sym: np.ndarray,
    sym_inv: np.ndarray,
) -> np.ndarray:
    """Rows of sym whose conjugation sends every generator into the target.

    The target is keyed by sorted word parts; conjugating (x, p) by (0, s)
    gives (s.x, s^-1 p s) in this convention.
    """
    alive = np.arange(sym.shape[0])
    for x, p in zip(gen_xs, gen_perms):
        if alive.size == 0:
            break
        block = sym[alive].astype(np.intp)
        xi = permute_word_many(block, int(x))
        pi = np.take_along_axis(sym_inv[alive], np.asarray(p, dtype=np.intp)[block], axis=1)
        pos = indices_of(target_xs, xi)
        ok = pos >= 0
        ok[ok] = (target_perms[pos[ok]] == pi[ok]).all(axis=1)
        alive = alive[ok]
    return alive


def _stab_tables(stab: PermGroupSet) -> tuple[np.ndarray, np.ndarray]:
    sym = stab.perms.astype(np.int64)
    return sym, inverse_perms(sym)


def _conjugator(
    s: PropStructure,
    gens: Sequence[int],
    t: PropStructure,
    sym: np.ndarray,
    sym_inv: np.ndarray,
) -> np.ndarray | None:
    if s.size != t.size or s.length != t.length:
        return None
    alive = conjugator_candidates(
        s.code.array[list(gens)], s.perms[list(gens)], t.code.array, t.perms, sym, sym_inv
    )
    if alive.size == 0:
        return None
    return sym[alive[0]]


def structures_conjugate(
    s: PropStructure, t: PropStructure, stab: PermGroupSet
) -> np.ndarray | None:
    """A permutation of stab conjugating s onto t, or None."""
    sym, sym_inv = _stab_tables(stab)
    return _conjugator(s, structure_generators(s), t, sym, sym_inv)


def conjugate_structure(s: PropStructure, g: Automorphism) -> PropStructure:
    xs, ps = conjugate_elements(s.code.array, s.perms.astype(np.intp), g)
    return PropStructure.from_elements(s.length, xs, ps)


def conjugacy_classes(
    structures: Sequence[PropStructure], stab: PermGroupSet
) -> list[list[int]]:
    """Partition input positions into classes under conjugation by stab."""
    t0 = time.monotonic()
    sym, sym_inv = _stab_tables(stab)
    buckets: dict[tuple, list[list[int]]] = {}
    classes: list[list[int]] = []
    for i, s in enumerate(structures):
        bucket = buckets.setdefault(conjugacy_invariant(s), [])
        gens = structure_generators(s) if bucket else []
        for members in bucket:
            if _conjugator(s, gens, structures[members[0]], sym, sym_inv) is not None:
                members.append(i)
                break
        else:
            members = [i]
            bucket.append(members)
            classes.append(members)
    _log(
        f"conjugacy_classes inputs={len(structures)} classes={len(classes)} "
        f"elapsed_ms={(time.monotonic() - t0) * 1000:.0f}"
    )
    return classes


class _BudgetExceeded(Exception):
    pass


def groups_isomorphic(
    s: PropStructure, t: PropStructure, *, budget: int = DEFAULT_ISO_BUDGET
) -> bool | None:
    """Abstract isomorphism by backtracking over generator images.

    Returns None when the node budget runs out before a decision.
    """
    if s.size != t.size:
        raise StructureError("groups_isomorphic requires equal orders")
    if fingerprint(s) != fingerprint(t):
        return False
    ts, tt = star_table(s), star_table(t)
    inv_s = list(zip(element_orders(s).tolist(), centralizer_orders(s).tolist()))
    inv_t = list(zip(element_orders(t).tolist(), centralizer_orders(t).tolist()))
    by_class: dict[tuple[int, int], list[int]] = {}
    for j, key in enumerate(inv_t):
        by_class.setdefault(key, []).append(j)
    gens = structure_generators(s)
    e_s, e_t = s.code.index(0), t.code.index(0)
    m = s.size
    nodes = 0

    def extend(images: list[int]) -> np.ndarray | None:
        phi = np.full(m, -1, dtype=np.int64)
        used = np.zeros(m, dtype=bool)
        phi[e_s] = e_t
        used[e_t] = True
        queue = [e_s]
        while queue:
            e = queue.pop()
            for g, img in zip(gens, images):
                f = ts[e, g]
                v = tt[phi[e], img]
                if phi[f] < 0:
                    if used[v]:
                        return None
                    phi[f] = v
                    used[v] = True
                    queue.append(f)
                elif phi[f] != v:
                    return None
        return phi

    def search(images: list[int], phi: np.ndarray) -> bool:
        nonlocal nodes
        k = len(images)
        if k == len(gens):
            return True
        for img in by_class.get(inv_s[gens[k]], []):
            if (phi == img).any():
                continue
            nodes += 1
            if nodes > budget:
                raise _BudgetExceeded
            nxt = extend(images + [img])
            if nxt is not None and search(images + [img], nxt):
                return True
        return False

    start = extend([])
    try:
        return search([], start)
    except _BudgetExceeded:
        _log(f"groups_isomorphic budget={budget} exceeded")
        return None


@dataclass(frozen=True)
class IsomorphismSummary:
    classes: list[list[int]]
    unknown_pairs: int


def isomorphism_classes(
    structures: Sequence[PropStructure], *, budget: int = DEFAULT_ISO_BUDGET
) -> IsomorphismSummary:
    prints = [fingerprint(s) for s in structures]
    classes: list[list[int]] = []
    unknown = 0
    for i, s in enumerate(structures):
        for members in classes:
            if prints[members[0]] != prints[i]:
                continue
            verdict = groups_isomorphic(s, structures[members[0]], budget=budget)
            if verdict is None:
                unknown += 1
            elif verdict:
                members.append(i)
                break
        else:
            classes.append([i])
    return IsomorphismSummary(classes=classes, unknown_pairs=unknown)


# Enumeration of regular subgroups of Aut(N) on the Nordstrom-Robinson code.


@dataclass(frozen=True, eq=False)
class SemiregularPartial:
    """A semiregular subgroup of Aut(N) of order 2^level.

    rows are the elements as permutations of codeword indices (row 0 is the
    identity); xs/perms are the same elements in (x, p) form. The generator
    added at step j sits at position 2^j.
    """

    level: int
    rows: np.ndarray
    xs: np.ndarray
    perms: np.ndarray

    @property
    def order(self) -> int:
        return int(self.rows.shape[0])

    @cached_property
    def orbit0(self) -> np.ndarray:
        return np.unique(self.rows[:, 0])

    def generator_positions(self) -> list[int]:
        return [1 << j for j in range(self.level)]

    def is_semiregular(self) -> bool:
        fixed = self.rows[1:] == np.arange(self.rows.shape[1])
        return not bool(fixed.any())


@dataclass(frozen=True, eq=False)
class _NRContext:
    code: Code
    sym: np.ndarray
    sym_inv: np.ndarray
    sym_rows: np.ndarray
    base_perms: np.ndarray
    base_rows: np.ndarray


def _build_context(code: Code, stab: PermGroupSet, base: PropStructure) -> _NRContext:
    t0 = time.monotonic()
    sym = stab.perms.astype(np.int64)
    sym_rows = index_action(sym, None, code).astype(np.uint8)
    base_rows = index_action(base.perms, base.code.array, code).astype(np.uint8)
    _log(f"context built elapsed_ms={(time.monotonic() - t0) * 1000:.0f}")
    return _NRContext(
        code=code,
        sym=sym,
        sym_inv=inverse_perms(sym),
        sym_rows=sym_rows,
        base_perms=base.perms.astype(np.int64),
        base_rows=base_rows,
    )


@lru_cache(maxsize=1)
def _nr_context() -> _NRContext:
    from nr_propelinear.constructions import (
        nordstrom_robinson,
        nordstrom_robinson_structure,
    )
    from nr_propelinear.permgroup import sym_of_subcode

    code = nordstrom_robinson()
    return _build_context(code, sym_of_subcode(code), nordstrom_robinson_structure())


def trivial_partial(code: Code) -> SemiregularPartial:
    return SemiregularPartial(
        level=0,
        rows=np.arange(code.size, dtype=np.uint8)[None, :],
        xs=np.zeros(1, dtype=np.int64),
        perms=np.arange(code.length, dtype=np.uint8)[None, :],
    )


def _orbit_reps(part: SemiregularPartial) -> np.ndarray:
    return np.unique(part.rows.min(axis=0))


def extension_candidates(ctx: _NRContext, part: SemiregularPartial) -> list[SemiregularPartial]:
    """Every <S, a> with a(0) at a fixed point of each S-orbit outside orbit0."""
    npts = ctx.code.size
    m = part.order
    rows = part.rows.astype(np.intp)
    points = np.broadcast_to(np.arange(npts), rows.shape)
    in_orbit = np.zeros((npts, npts), dtype=bool)
    in_orbit[points, rows] = True
    lookup0 = np.full(npts, -1, dtype=np.int64)
    lookup0[rows[:, 0]] = np.arange(m)
    gens = [rows[pos] for pos in part.generator_positions()]
    outside = np.setdiff1d(_orbit_reps(part), part.orbit0)

    out: list[SemiregularPartial] = []
    for x in outside.tolist():
        cand = ctx.base_rows[x][ctx.sym_rows]
        ok = ~in_orbit[np.arange(npts)[None, :], cand].any(axis=1)
        idx = np.flatnonzero(ok)
        cand = cand[idx].astype(np.intp)

        square = np.take_along_axis(cand, cand, axis=1)
        hit = lookup0[square[:, 0]]
        ok = hit >= 0
        ok[ok] = (rows[hit[ok]] == square[ok]).all(axis=1)
        idx, cand = idx[ok], cand[ok]

        lookup_x = np.full(npts, -1, dtype=np.int64)
        lookup_x[rows[:, x]] = np.arange(m)
        for g in gens:
            if idx.size == 0:
                break
            ag = cand[:, g]
            h = lookup_x[ag[:, 0]]
            ok = h >= 0
            ok[ok] = (np.take_along_axis(rows[h[ok]], cand[ok], axis=1) == ag[ok]).all(axis=1)
            idx, cand = idx[ok], cand[ok]

        word = int(ctx.code.array[x])
        for s_idx, a_row in zip(idx.tolist(), cand):
            a_perm = ctx.sym[s_idx][ctx.base_perms[x]]
            new_rows = np.concatenate([rows, a_row[rows]]).astype(np.uint8)
            new_xs = np.concatenate([part.xs, word ^ permute_words(a_perm, part.xs)])
            new_perms = np.concatenate([part.perms, part.perms[:, a_perm]]).astype(np.uint8)
            out.append(
                SemiregularPartial(
                    level=part.level + 1, rows=new_rows, xs=new_xs, perms=new_perms
                )
            )
    return out


def _row_orders(rows: np.ndarray) -> np.ndarray:
    rows = rows.astype(np.intp)
    orders = np.ones(rows.shape[0], dtype=np.int64)
    cur = rows.copy()
    active = cur[:, 0] != 0
    k = 1
    while active.any():
        k += 1
        cur[active] = np.take_along_axis(rows[active], cur[active], axis=1)
        done = active & (cur[:, 0] == 0)
        orders[done] = k
        active &= cur[:, 0] != 0
    return orders


def partial_invariant(part: SemiregularPartial) -> tuple:
    orders = _row_orders(part.rows)
    types = [cycle_type(p) for p in part.perms]
    return tuple(sorted(Counter(zip(orders.tolist(), types)).items()))


def partials_conjugate(ctx: _NRContext, p: SemiregularPartial, q: SemiregularPartial) -> bool:
    """Conjugacy in Aut(N), with the conjugator's image of 0 cut down to q-orbit representatives."""
    if p.order != q.order:
        return False
    gpos = p.generator_positions()
    gen_xs = p.xs[gpos]
    gen_perms = p.perms[gpos]
    for y in _orbit_reps(q).tolist():
        r = Automorphism(int(ctx.code.array[y]), tuple(int(v) for v in ctx.base_perms[y]))
        xs, ps = conjugate_elements(q.xs, q.perms.astype(np.intp), inverse(r))
        order = np.argsort(xs)
        alive = conjugator_candidates(
            gen_xs, gen_perms, xs[order], ps[order], ctx.sym, ctx.sym_inv
        )
        if alive.size:
            return True
    return False


def _extend_job(args: tuple[int, np.ndarray, np.ndarray, np.ndarray]) -> list[tuple]:
    level, rows, xs, perms = args
    part = SemiregularPartial(level=level, rows=rows, xs=xs, perms=perms)
    found = extension_candidates(_nr_context(), part)
    return [(c.rows, c.xs, c.perms) for c in found]


@dataclass
class EnumerationResult:
    structures: list[PropStructure]
    level_counts: list[int] = field(default_factory=list)


def _dedup(ctx: _NRContext, candidates: list[SemiregularPartial]) -> list[SemiregularPartial]:
    buckets: dict[tuple, list[SemiregularPartial]] = {}
    reps: list[SemiregularPartial] = []
    for cand in candidates:
        bucket = buckets.setdefault(partial_invariant(cand), [])
        if any(partials_conjugate(ctx, cand, rep) for rep in bucket):
            continue
        bucket.append(cand)
        reps.append(cand)
    return reps


def run_enumeration(
    code: Code,
    ambient_stab: PermGroupSet,
    *,
    jobs: int = 1,
    cache_dir: Path | None = None,
    top_level: int = 8,
) -> EnumerationResult:
    """Level-by-level search for semiregular 2-subgroups of Aut(N), up to conjugacy."""
    from nr_propelinear import storage
    from nr_propelinear.constructions import nordstrom_robinson

    if (
        code != nordstrom_robinson()
        or ambient_stab.order != NR_SYM_ORDER
        or not ambient_stab.is_pure()
    ):
        raise StructureError(
            "enumeration requires the Nordstrom-Robinson code and its symmetry group"
        )
    ctx = _nr_context()
    if top_level > code.size.bit_length() - 1:
        raise StructureError("top_level exceeds log2 of the code size")

    level = 0
    reps = [trivial_partial(code)]
    counts = [1]
    if cache_dir is not None:
        resumed = storage.latest_level_checkpoint(cache_dir, top_level)
        if resumed is not None:
            level, reps, counts = resumed
            _log(f"resumed at level={level} classes={len(reps)}")

    while level < top_level:
        t0 = time.monotonic()
        jobs_args = [(p.level, p.rows, p.xs, p.perms) for p in reps]
        if jobs > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                batches = list(pool.map(_extend_job, jobs_args))
        else:
            batches = [_extend_job(a) for a in jobs_args]
        candidates = [
            SemiregularPartial(level=level + 1, rows=r, xs=x, perms=p)
            for batch in batches
            for r, x, p in batch
        ]
        reps = _dedup(ctx, candidates)
        for part in reps:
            if not part.is_semiregular():
                raise StructureError(f"level {level + 1} produced a group with fixed points")
        level += 1
        counts.append(len(reps))
        _log(
            f"level={level} candidates={len(candidates)} classes={len(reps)} "
            f"elapsed_ms={(time.monotonic() - t0) * 1000:.0f}"
        )
        if cache_dir is not None:
            storage.save_level_checkpoint(cache_dir, level, reps, counts)

    structures = []
    if top_level == code.size.bit_length() - 1:
        structures = [
            PropStructure.from_elements(code.length, part.xs, part.perms) for part in reps
        ]
    return EnumerationResult(structures=structures, level_counts=counts)


def enumerate_structures(
    c: Code,
    ambient_stab: PermGroupSet,
    *,
    jobs: int = 1,
    cache_dir: Path | None = None,
) -> list[PropStructure]:
    """One representative per conjugacy class of regular subgroups of Aut(c)."""
    return run_enumeration(c, ambient_stab, jobs=jobs, cache_dir=cache_dir).structures
