"""Coordinate permutations and automorphisms (x, p) of F2^n.

Convention: p is a tuple of images and acts on words by (p.y)_i = y_{p(i)}.
An automorphism (x, p) maps y to x + p.y. compose(a, b) is the automorphism
with apply(compose(a, b), y) == apply(a, apply(b, y)).
"""

from __future__ import annotations

import itertools
import math
import sys
import time
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

from nr_propelinear.config import debug_enabled
from nr_propelinear.gf2core import (
    Code,
    CosetDecomposition,
    echelon_basis,
    indices_of,
    kernel,
    members,
    pack_bits,
    span,
    word_bits,
)

H16_ORDER = 322_560


class PermGroupError(RuntimeError):
    pass


def _log(msg: str) -> None:
    if not debug_enabled():
        return
    sys.stderr.write(f"[permgroup] {msg}\n")
    sys.stderr.flush()


def identity_perm(n: int) -> tuple[int, ...]:
    return tuple(range(n))


def is_permutation(images: Sequence[int], n: int) -> bool:
    return len(images) == n and sorted(images) == list(range(n))


@dataclass(frozen=True)
class Automorphism:
    x: int
    p: tuple[int, ...]

    def __post_init__(self) -> None:
        n = len(self.p)
        if not is_permutation(self.p, n):
            raise PermGroupError("permutation images must be a bijection of 0..n-1")
        if self.x < 0 or self.x >= 1 << n:
            raise PermGroupError("length mismatch")

    @property
    def length(self) -> int:
        return len(self.p)

    @classmethod
    def identity(cls, n: int) -> "Automorphism":
        return cls(0, identity_perm(n))

    @classmethod
    def translation(cls, t: int, n: int) -> "Automorphism":
        return cls(t, identity_perm(n))

    def is_identity(self) -> bool:
        return self.x == 0 and self.p == identity_perm(len(self.p))


def permute_word(p: Sequence[int], y: int) -> int:
    out = 0
    for i, src in enumerate(p):
        out |= ((y >> src) & 1) << i
    return out


def permute_words(p: Sequence[int] | np.ndarray, words: np.ndarray) -> np.ndarray:
    """One permutation applied to many words."""
    p = np.asarray(p, dtype=np.intp)
    return pack_bits(word_bits(words, p.size)[..., p])


def permute_word_many(perms: np.ndarray, y: int) -> np.ndarray:
    """Many permutations (rows) applied to one word."""
    bits = (np.int64(y) >> np.asarray(perms, dtype=np.int64)) & 1
    return pack_bits(bits)


def permute_rows(perms: np.ndarray, words: np.ndarray) -> np.ndarray:
    """Row k of perms applied to words[k]."""
    perms = np.asarray(perms, dtype=np.intp)
    bits = word_bits(words, perms.shape[-1])
    return pack_bits(np.take_along_axis(bits, perms, axis=-1))


def inverse_perms(perms: np.ndarray) -> np.ndarray:
    return np.argsort(perms, axis=-1).astype(perms.dtype)


def _check_lengths(a: Automorphism, n: int) -> None:
    if a.length != n:
        raise PermGroupError("length mismatch")


def apply(a: Automorphism, y: int) -> int:
    if y < 0 or y >= 1 << a.length:
        raise PermGroupError("length mismatch")
    return a.x ^ permute_word(a.p, y)


def compose(a: Automorphism, b: Automorphism) -> Automorphism:
    _check_lengths(b, a.length)
    x = a.x ^ permute_word(a.p, b.x)
    p = tuple(b.p[i] for i in a.p)
    return Automorphism(x, p)


def inverse(a: Automorphism) -> Automorphism:
    q = [0] * a.length
    for i, j in enumerate(a.p):
        q[j] = i
    return Automorphism(permute_word(q, a.x), tuple(q))


def conjugate(g: Automorphism, h: Automorphism) -> Automorphism:
    """g h g^-1."""
    return compose(compose(g, h), inverse(g))


def compose_many(
    xa: np.ndarray, pa: np.ndarray, xb: np.ndarray, pb: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Row-wise compose for arrays of word parts and permutation parts."""
    x = np.asarray(xa, dtype=np.int64) ^ permute_rows(pa, xb)
    p = np.take_along_axis(np.asarray(pb), np.asarray(pa, dtype=np.intp), axis=-1)
    return x, p


def conjugate_elements(
    xs: np.ndarray, perms: np.ndarray, g: Automorphism
) -> tuple[np.ndarray, np.ndarray]:
    gi = inverse(g)
    gp = np.array(g.p, dtype=np.intp)
    gip = np.array(gi.p, dtype=perms.dtype)
    x1 = np.int64(g.x) ^ permute_words(gp, np.asarray(xs, dtype=np.int64))
    p1 = perms[:, gp]
    x2 = x1 ^ permute_word_many(p1, gi.x)
    p2 = gip[p1]
    return x2, p2


def perm_cycles(p: Sequence[int]) -> list[tuple[int, ...]]:
    seen = [False] * len(p)
    cycles = []
    for start in range(len(p)):
        if seen[start]:
            continue
        cyc = []
        i = start
        while not seen[i]:
            seen[i] = True
            cyc.append(i)
            i = int(p[i])
        cycles.append(tuple(cyc))
    return cycles


def cycle_type(p: Sequence[int]) -> tuple[int, ...]:
    return tuple(sorted(len(c) for c in perm_cycles(p)))


def perm_order(p: Sequence[int]) -> int:
    return math.lcm(*(len(c) for c in perm_cycles(p)))


@dataclass(frozen=True, eq=False)
class PermGroupSet:
    """A set of automorphisms stored as sorted (shift, perm) rows.

    Pure permutation groups carry all-zero shifts. `closed` is False for
    sets that are not groups, such as the cosets returned by mapping filters.
    """

    degree: int
    perms: np.ndarray
    shifts: np.ndarray
    closed: bool = True
    generators: tuple[Automorphism, ...] = ()

    @classmethod
    def from_arrays(
        cls,
        degree: int,
        perms: np.ndarray,
        shifts: np.ndarray | None = None,
        *,
        closed: bool = True,
        generators: Sequence[Automorphism] = (),
    ) -> "PermGroupSet":
        perms = np.asarray(perms).reshape(-1, degree)
        if shifts is None:
            shifts = np.zeros(perms.shape[0], dtype=np.int64)
        rows = np.column_stack([np.asarray(shifts, dtype=np.int64), perms.astype(np.int64)])
        if rows.shape[0]:
            rows = np.unique(rows, axis=0)
        return cls(
            degree=degree,
            perms=rows[:, 1:].astype(np.uint8),
            shifts=rows[:, 0].copy(),
            closed=closed,
            generators=tuple(generators),
        )

    @classmethod
    def from_automorphisms(
        cls, degree: int, elements: Sequence[Automorphism], *, closed: bool = True
    ) -> "PermGroupSet":
        elements = list(elements)
        perms = np.array([e.p for e in elements], dtype=np.int64).reshape(-1, degree)
        shifts = np.array([e.x for e in elements], dtype=np.int64)
        return cls.from_arrays(degree, perms, shifts, closed=closed)

    @property
    def order(self) -> int:
        return int(self.perms.shape[0])

    def __len__(self) -> int:
        return self.order

    def is_pure(self) -> bool:
        return not bool(self.shifts.any())

    def elements(self) -> Iterator[Automorphism]:
        for x, p in zip(self.shifts, self.perms):
            yield Automorphism(int(x), tuple(int(v) for v in p))

    def key(self) -> bytes:
        return self.shifts.tobytes() + self.perms.tobytes()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PermGroupSet):
            return NotImplemented
        return self.degree == other.degree and self.key() == other.key()

    def __hash__(self) -> int:
        return hash((self.degree, self.key()))

    def __contains__(self, a: object) -> bool:
        if not isinstance(a, Automorphism) or a.length != self.degree:
            return False
        hit = (self.shifts == a.x) & (self.perms == np.array(a.p, dtype=np.uint8)).all(axis=1)
        return bool(hit.any())

    def inverse_perms(self) -> np.ndarray:
        return inverse_perms(self.perms)


@dataclass(frozen=True)
class ClosureResult:
    group: PermGroupSet | None
    exceeded: bool

    @property
    def order(self) -> int | None:
        return None if self.group is None else self.group.order


def closure(
    gens: Sequence[Automorphism], bound: int, *, degree: int | None = None
) -> ClosureResult:
    """Group generated by gens, or an exceeded marker once it outgrows bound."""
    if bound < 1:
        raise PermGroupError("bound must be >= 1")
    if degree is None:
        if not gens:
            raise PermGroupError("degree required when no generators are given")
        degree = gens[0].length
    for g in gens:
        _check_lengths(g, degree)

    ident = Automorphism.identity(degree)
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for e in frontier:
            for g in gens:
                h = compose(e, g)
                if h in seen:
                    continue
                seen.add(h)
                if len(seen) > bound:
                    return ClosureResult(group=None, exceeded=True)
                nxt.append(h)
        frontier = nxt
    group = PermGroupSet.from_automorphisms(degree, sorted(seen, key=lambda a: (a.x, a.p)))
    return ClosureResult(
        group=PermGroupSet(
            degree=group.degree,
            perms=group.perms,
            shifts=group.shifts,
            closed=True,
            generators=tuple(gens),
        ),
        exceeded=False,
    )


def _gl4_columns() -> np.ndarray:
    cols = [
        c for c in itertools.product(range(1, 16), repeat=4) if len(echelon_basis(c)) == 4
    ]
    return np.array(cols, dtype=np.int64)


@lru_cache(maxsize=1)
def sym_h16() -> PermGroupSet:
    """Affine maps v -> Av + b of F2^4 acting on the 16 coordinates.

    Coordinate i is identified with the binary expansion of i.
    """
    t0 = time.monotonic()
    cols = _gl4_columns()
    points = np.arange(16, dtype=np.int64)
    lin = np.zeros((cols.shape[0], 16), dtype=np.int64)
    for j in range(4):
        bit = (points >> j) & 1
        lin ^= cols[:, j : j + 1] * bit[None, :]
    perms = (lin[:, None, :] ^ points[None, :, None]).reshape(-1, 16)
    group = PermGroupSet.from_arrays(16, perms)
    if group.order != H16_ORDER:
        raise PermGroupError(f"affine group has order {group.order}, expected {H16_ORDER}")
    _log(f"sym_h16 order={group.order} elapsed_ms={(time.monotonic() - t0) * 1000:.0f}")
    return group


def mapping_perms(c: Code, target: Code, candidates: np.ndarray | None = None) -> np.ndarray:
    """Rows of candidates (default: sym_h16) with p.c == target, as an array."""
    if candidates is None:
        candidates = sym_h16().perms
    if c.length != target.length or c.size != target.size:
        return candidates[:0]
    order: list[int] = list(c.words)
    if c.is_reduced():
        kern = kernel(c)
        order = [w for w in c.words if w not in kern] + list(kern.words)
    cand = candidates
    for w in order:
        if cand.shape[0] == 0:
            break
        cand = cand[members(target.array, permute_word_many(cand, w))]
    return cand


def sym_of_subcode(c: Code, target: Code | None = None) -> PermGroupSet:
    """Coordinate symmetries of c, found by filtering sym_h16.

    With a target, returns the coset {p in sym_h16 : p.c == target} instead.
    """
    from nr_propelinear.constructions import reed_muller

    if c.length != 16 or c.size == 0 or span(c) != reed_muller(2, 4):
        raise PermGroupError("filter method inapplicable")
    t0 = time.monotonic()
    dest = c if target is None else target
    perms = mapping_perms(c, dest)
    _log(
        f"sym_of_subcode size={c.size} found={perms.shape[0]} "
        f"elapsed_ms={(time.monotonic() - t0) * 1000:.0f}"
    )
    return PermGroupSet.from_arrays(16, perms, closed=target is None or target == c)


def conjugate_subgroup(s: PermGroupSet, g: Automorphism) -> PermGroupSet:
    if s.degree != g.length:
        raise PermGroupError("length mismatch")
    xs, ps = conjugate_elements(s.shifts, s.perms.astype(np.intp), g)
    return PermGroupSet.from_arrays(s.degree, ps, xs, closed=s.closed)


def coset_action_images(g: PermGroupSet, d: CosetDecomposition) -> np.ndarray:
    """Induced images of every element of g on the coset labels 0..k."""
    cosets = d.cosets()
    out = np.empty((g.order, len(cosets)), dtype=np.int64)
    for label, coset in enumerate(cosets):
        imgs = np.stack([permute_word_many(g.perms, w) for w in coset.words], axis=1)
        imgs ^= g.shifts[:, None]
        labs = d.labels_of(imgs)
        if (labs < 0).any() or not (labs == labs[:, :1]).all():
            raise PermGroupError("element maps a coset off the coset system")
        out[:, label] = labs[:, 0]
    return out


def action_on_cosets(g: PermGroupSet, d: CosetDecomposition) -> PermGroupSet:
    """Permutation group induced on the nontrivial coset labels 1..k (as 0..k-1)."""
    images = coset_action_images(g, d)
    if (images[:, 0] != 0).any():
        raise PermGroupError("element moves the kernel coset")
    induced = images[:, 1:] - 1
    return PermGroupSet.from_arrays(induced.shape[1], induced)


def is_two_transitive(g: PermGroupSet) -> bool:
    k = g.degree
    pairs = {(int(p[0]), int(p[1])) for p in g.perms}
    return len(pairs) == k * (k - 1)


def translation_mask(g: PermGroupSet) -> np.ndarray:
    """Rows acting as i -> i xor b on the coordinates of F2^4."""
    points = np.arange(g.degree, dtype=np.int64)
    perms = g.perms.astype(np.int64)
    return (perms == (points[None, :] ^ perms[:, :1])).all(axis=1)


def translation_subgroup(g: PermGroupSet) -> PermGroupSet:
    mask = translation_mask(g)
    return PermGroupSet.from_arrays(g.degree, g.perms[mask], g.shifts[mask])


def transvection_perms() -> np.ndarray:
    """Coordinate perms v -> v + v_j e_i (i != j); together they generate GL(4,2)."""
    points = np.arange(16, dtype=np.int64)
    rows = [points ^ (((points >> j) & 1) << i) for i in range(4) for j in range(4) if i != j]
    return np.array(rows, dtype=np.int64)


def is_elementary_abelian(g: PermGroupSet) -> bool:
    if not g.is_pure():
        raise PermGroupError("is_elementary_abelian expects a pure permutation group")
    perms = g.perms.astype(np.intp)
    ident = np.arange(g.degree)
    if not (np.take_along_axis(perms, perms, axis=1) == ident).all():
        return False
    # products[a, b] = p_a . p_b
    products = perms[np.arange(g.order)[:, None, None], perms[None, :, :]]
    return bool((products == products.transpose(1, 0, 2)).all())


def index_action(
    perms: np.ndarray, shifts: np.ndarray | None, code: Code, *, chunk: int = 512
) -> np.ndarray:
    """Automorphisms as permutations of codeword indices.

    Row k, column i holds the index of x_k + p_k.c_i.
    """
    perms = np.asarray(perms, dtype=np.intp)
    count = perms.shape[0]
    if shifts is None:
        shifts = np.zeros(count, dtype=np.int64)
    bits = word_bits(code.array, code.length)
    out = np.empty((count, code.size), dtype=np.int32)
    for start in range(0, count, chunk):
        block = perms[start : start + chunk]
        moved = pack_bits(bits[:, block]).T
        moved ^= np.asarray(shifts[start : start + chunk], dtype=np.int64)[:, None]
        idx = indices_of(code.array, moved)
        if (idx < 0).any():
            raise PermGroupError("automorphism does not preserve the code")
        out[start : start + chunk] = idx
    return out


def group_closed(g: PermGroupSet, *, samples: int | None = None, seed: int = 0) -> bool:
    """Products of element pairs stay in g; exhaustive unless samples is given."""
    keys = {
        x.tobytes() + p.tobytes()
        for x, p in zip(g.shifts.astype(np.int64), g.perms.astype(np.uint8))
    }
    if samples is None:
        ia, ib = np.meshgrid(np.arange(g.order), np.arange(g.order), indexing="ij")
        ia, ib = ia.ravel(), ib.ravel()
    else:
        rng = np.random.default_rng(seed)
        ia = rng.integers(0, g.order, size=samples)
        ib = rng.integers(0, g.order, size=samples)
    xs, ps = compose_many(
        g.shifts[ia], g.perms[ia].astype(np.intp), g.shifts[ib], g.perms[ib]
    )
    return all(
        x.tobytes() + p.tobytes() in keys
        for x, p in zip(xs.astype(np.int64), ps.astype(np.uint8))
    )
