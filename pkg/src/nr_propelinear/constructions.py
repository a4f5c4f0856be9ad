"""Reed-Muller codes, the octacode and the Nordstrom-Robinson code.

The Nordstrom-Robinson code N is the Gray image of the octacode, relabelled
so that Ker(N) = RM(1,4) and span(N) = RM(2,4). The Z4-linear structure of
the octacode carries over to N the same way.
"""

from __future__ import annotations

import itertools
import sys
import time
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from nr_propelinear.config import debug_enabled
from nr_propelinear.gf2core import (
    Code,
    echelon_basis,
    in_span,
    kernel,
    min_distance,
    pack_bits,
    span,
    span_of_words,
    weight,
)
from nr_propelinear.permgroup import inverse_perms, permute_words
from nr_propelinear.structure import PropStructure, check_structure

# 3 + x + 2x^2 + x^3, lowest degree first: the Hensel lift of x^3 + x + 1.
OCTACODE_GENERATOR = (3, 1, 2, 1)
OCTACODE_LENGTH = 8

# Gray images of the Z4 digits as (coordinate 2i, coordinate 2i+1).
_GRAY_PAIRS = {0: (0, 0), 1: (0, 1), 2: (1, 1), 3: (1, 0)}
_GRAY_INVERSE = {pair: digit for digit, pair in _GRAY_PAIRS.items()}


class ConstructionError(RuntimeError):
    pass


def _log(msg: str) -> None:
    if not debug_enabled():
        return
    sys.stderr.write(f"[constructions] {msg}\n")
    sys.stderr.flush()


@dataclass(frozen=True, eq=False)
class Z4Code:
    length: int
    generators: tuple[tuple[int, ...], ...]
    elements: np.ndarray = field(repr=False)

    @property
    def size(self) -> int:
        return int(self.elements.shape[0])

    def gray_image(self) -> Code:
        return Code.from_words(2 * self.length, gray_many(self.elements))


@lru_cache(maxsize=None)
def reed_muller(r: int, m: int) -> Code:
    """RM(r, m): evaluations of polynomials of degree <= r on F2^m.

    Coordinate j is the point whose binary expansion is j.
    """
    if not 0 <= r <= m <= 5:
        raise ConstructionError("reed_muller requires 0 <= r <= m <= 5")
    n = 1 << m
    points = np.arange(n, dtype=np.int64)
    gens: list[int] = []
    for deg in range(r + 1):
        for subset in itertools.combinations(range(m), deg):
            mask = sum(1 << j for j in subset)
            gens.append(int(pack_bits(((points & mask) == mask).astype(np.uint8))))
    return span_of_words(n, gens)


def gray(z: Sequence[int]) -> int:
    out = 0
    for i, digit in enumerate(z):
        if digit not in _GRAY_PAIRS:
            raise ConstructionError(f"not a Z4 digit: {digit}")
        lo, hi = _GRAY_PAIRS[digit]
        out |= (lo << (2 * i)) | (hi << (2 * i + 1))
    return out


def gray_many(digits: np.ndarray) -> np.ndarray:
    """Gray images of the rows of a (M, k) array of Z4 digits."""
    d = np.asarray(digits, dtype=np.int64)
    if ((d < 0) | (d > 3)).any():
        raise ConstructionError("Z4 digits must lie in 0..3")
    bits = np.empty(d.shape[:-1] + (2 * d.shape[-1],), dtype=np.uint8)
    bits[..., 0::2] = (d == 2) | (d == 3)
    bits[..., 1::2] = (d == 1) | (d == 2)
    return pack_bits(bits)


def gray_inverse(w: int, k: int) -> tuple[int, ...]:
    if w < 0 or w >= 1 << (2 * k):
        raise ConstructionError("length mismatch")
    return tuple(
        _GRAY_INVERSE[((w >> (2 * i)) & 1, (w >> (2 * i + 1)) & 1)] for i in range(k)
    )


def z4_span(generators: Sequence[Sequence[int]], length: int) -> Z4Code:
    gens = tuple(tuple(int(v) % 4 for v in g) for g in generators)
    for g in gens:
        if len(g) != length:
            raise ConstructionError("generator length mismatch")
    elements = np.zeros((1, length), dtype=np.int64)
    for g in gens:
        row = np.array(g, dtype=np.int64)
        elements = np.unique(
            np.concatenate([(elements + k * row) % 4 for k in range(4)]), axis=0
        )
    return Z4Code(length=length, generators=gens, elements=elements)


def _octacode_rows() -> list[tuple[int, ...]]:
    rows = []
    for shift in range(4):
        cyclic = [0] * (OCTACODE_LENGTH - 1)
        for j, coeff in enumerate(OCTACODE_GENERATOR):
            cyclic[(j + shift) % len(cyclic)] = coeff
        rows.append(((-sum(cyclic)) % 4,) + tuple(cyclic))
    return rows


@lru_cache(maxsize=1)
def octacode() -> Z4Code:
    """Extended cyclic Z4 code of length 8; the parity digit comes first."""
    code = z4_span(_octacode_rows(), OCTACODE_LENGTH)
    if code.size != 256:
        raise ConstructionError(f"octacode has {code.size} elements, expected 256")
    gram = (code.elements @ code.elements.T) % 4
    if gram.any():
        raise ConstructionError("octacode is not self-orthogonal")
    image = code.gray_image()
    if image.size != 256 or min_distance(image) != 6:
        raise ConstructionError("Gray image of the octacode is not a (16, 256, 6) code")
    return code


def raw_nordstrom_robinson() -> Code:
    """Gray image of the octacode before relabelling."""
    return octacode().gray_image()


@lru_cache(maxsize=1)
def nr_relabeling() -> tuple[int, ...]:
    """Coordinate permutation taking the raw Gray image onto canonical coordinates.

    Picks weight-8 kernel words d_1..d_4 that together with the all-ones word
    span the kernel; coordinate j gets the label sum_k bit_j(d_k) 2^k.
    """
    raw = raw_nordstrom_robinson()
    kern = kernel(raw)
    ones = (1 << raw.length) - 1
    if kern.size != 32 or ones not in kern:
        raise ConstructionError("raw kernel is not a first-order Reed-Muller code")
    chosen: list[int] = []
    basis = echelon_basis([ones])
    for w in kern.words:
        if weight(w) != 8 or in_span(w, basis):
            continue
        chosen.append(w)
        basis = echelon_basis(basis + (w,))
        if len(chosen) == 4:
            break
    labels = [
        sum(((d >> j) & 1) << k for k, d in enumerate(chosen)) for j in range(raw.length)
    ]
    if len(chosen) != 4 or sorted(labels) != list(range(raw.length)):
        raise ConstructionError("kernel coordinates are not affine")
    relabel = [0] * raw.length
    for j, label in enumerate(labels):
        relabel[label] = j
    relabel_t = tuple(relabel)
    canonical = Code.from_words(raw.length, permute_words(relabel_t, raw.array))
    if kernel(canonical) != reed_muller(1, 4):
        raise ConstructionError("relabelled kernel differs from RM(1,4)")
    if span(canonical) != reed_muller(2, 4):
        raise ConstructionError("relabelled span differs from RM(2,4)")
    _log(f"nr_relabeling relabel={relabel_t}")
    return relabel_t


@lru_cache(maxsize=1)
def nordstrom_robinson() -> Code:
    t0 = time.monotonic()
    raw = raw_nordstrom_robinson()
    code = Code.from_words(raw.length, permute_words(nr_relabeling(), raw.array))
    if code.parameters() != (16, 256, 6) or not code.is_reduced():
        raise ConstructionError("relabelled Gray image is not a reduced (16, 256, 6) code")
    _log(f"nordstrom_robinson elapsed_ms={(time.monotonic() - t0) * 1000:.0f}")
    return code


def z4_structure(c: Z4Code, relabel: Sequence[int] | None = None) -> PropStructure:
    """Gray image of Z4 addition: pi_x swaps coordinates 2i, 2i+1 where digit i is odd.

    With relabel, words and permutations are moved by conjugation with (0, relabel).
    """
    words = gray_many(c.elements)
    odd = (c.elements % 2).astype(bool)
    n = 2 * c.length
    perms = np.tile(np.arange(n, dtype=np.int64), (c.size, 1))
    for i in range(c.length):
        swap = odd[:, i]
        perms[swap, 2 * i] = 2 * i + 1
        perms[swap, 2 * i + 1] = 2 * i
    if relabel is not None:
        sigma = np.asarray(relabel, dtype=np.int64)
        if sigma.shape != (n,) or sorted(sigma.tolist()) != list(range(n)):
            raise ConstructionError("relabel must be a permutation of the coordinates")
        words = permute_words(sigma, words)
        perms = inverse_perms(sigma)[perms[:, sigma]]
    result = PropStructure.from_elements(n, words, perms)
    check = check_structure(result)
    if not check.ok:
        raise ConstructionError(f"z4 structure is not regular: {check.failures[0]}")
    return result


@lru_cache(maxsize=1)
def nordstrom_robinson_structure() -> PropStructure:
    s = z4_structure(octacode(), relabel=nr_relabeling())
    if s.code != nordstrom_robinson():
        raise ConstructionError("Z4 structure does not live on the canonical code")
    return s


@lru_cache(maxsize=1)
def z4_supercode() -> Z4Code:
    """Octacode plus twice the even-weight binary code: a Z4 code whose Gray image is H16."""
    octa = octacode()
    doubled = [
        tuple(2 if j in (0, i) else 0 for j in range(OCTACODE_LENGTH))
        for i in range(1, OCTACODE_LENGTH)
    ]
    code = z4_span(list(octa.generators) + doubled, OCTACODE_LENGTH)
    if code.size != 2048:
        raise ConstructionError(f"supercode has {code.size} elements, expected 2048")
    if code.gray_image() != span(raw_nordstrom_robinson()):
        raise ConstructionError("Gray image of the supercode differs from span(N)")
    return code


def h16() -> Code:
    return reed_muller(2, 4)
