"""Binary words and codes over F2.

A word of length n is a Python int whose bit i holds coordinate i (0-based).
Codes keep their words sorted and duplicate-free so that equality, hashing
and membership are canonical.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

MAX_LENGTH = 32

_POP16 = np.array([bin(i).count("1") for i in range(1 << 16)], dtype=np.uint8)


class CodeError(RuntimeError):
    pass


def weight(w: int) -> int:
    return w.bit_count()


def distance(a: int, b: int) -> int:
    return (a ^ b).bit_count()


def popcount(values: np.ndarray) -> np.ndarray:
    """Per-entry Hamming weight of an integer array of words up to 32 bits."""
    v = np.asarray(values, dtype=np.int64)
    return (_POP16[v & 0xFFFF] + _POP16[(v >> 16) & 0xFFFF]).astype(np.int64)


def word_bits(words: np.ndarray | Sequence[int], n: int) -> np.ndarray:
    """Bit matrix of shape (len(words), n); column i is coordinate i."""
    arr = np.asarray(words, dtype=np.int64)
    return ((arr[..., None] >> np.arange(n, dtype=np.int64)) & 1).astype(np.uint8)


def pack_bits(bits: np.ndarray) -> np.ndarray:
    """Inverse of word_bits along the last axis."""
    n = bits.shape[-1]
    weights = np.left_shift(np.int64(1), np.arange(n, dtype=np.int64))
    return (bits.astype(np.int64) * weights).sum(axis=-1)


def members(sorted_words: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Boolean mask of which values occur in a sorted word array."""
    values = np.asarray(values, dtype=np.int64)
    if sorted_words.size == 0:
        return np.zeros(values.shape, dtype=bool)
    idx = np.searchsorted(sorted_words, values)
    idx = np.minimum(idx, sorted_words.size - 1)
    return sorted_words[idx] == values


def indices_of(sorted_words: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Positions of values in a sorted word array, -1 where absent."""
    values = np.asarray(values, dtype=np.int64)
    idx = np.searchsorted(sorted_words, values)
    idx = np.minimum(idx, sorted_words.size - 1)
    return np.where(sorted_words[idx] == values, idx, -1)


@dataclass(frozen=True)
class Code:
    length: int
    words: tuple[int, ...]

    def __post_init__(self) -> None:
        if not 1 <= self.length <= MAX_LENGTH:
            raise CodeError(f"code length must be in 1..{MAX_LENGTH}")
        limit = 1 << self.length
        prev = -1
        for w in self.words:
            if w <= prev:
                raise CodeError("code words must be sorted and distinct")
            if w >= limit:
                raise CodeError("word has bits beyond the code length")
            prev = w

    @classmethod
    def from_words(cls, length: int, words: Iterable[int] | np.ndarray) -> "Code":
        if not isinstance(words, np.ndarray):
            words = np.array(list(words), dtype=np.int64)
        arr = np.unique(words.astype(np.int64))
        return cls(length=length, words=tuple(int(w) for w in arr))

    @cached_property
    def array(self) -> np.ndarray:
        return np.array(self.words, dtype=np.int64)

    @cached_property
    def _word_set(self) -> frozenset[int]:
        return frozenset(self.words)

    @property
    def size(self) -> int:
        return len(self.words)

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, w: object) -> bool:
        return w in self._word_set

    def __iter__(self):
        return iter(self.words)

    def is_reduced(self) -> bool:
        return 0 in self._word_set

    def index(self, w: int) -> int:
        pos = int(np.searchsorted(self.array, w))
        if pos >= self.size or self.words[pos] != w:
            raise CodeError(f"word {w} is not a codeword")
        return pos

    def contains_all(self, values: np.ndarray) -> bool:
        return bool(members(self.array, values).all())

    def is_subcode_of(self, other: "Code") -> bool:
        return self.length == other.length and other.contains_all(self.array)

    def weight_distribution(self) -> dict[int, int]:
        weights, counts = np.unique(popcount(self.array), return_counts=True)
        return {int(w): int(c) for w, c in zip(weights, counts)}

    def parameters(self) -> tuple[int, int, int]:
        return self.length, self.size, min_distance(self)


@dataclass(frozen=True)
class CosetDecomposition:
    base: Code
    kernel: Code
    reps: tuple[int, ...]

    def cosets(self) -> list[Code]:
        out = [self.kernel]
        for a in self.reps:
            out.append(translate(self.kernel, a))
        return out

    @cached_property
    def _word_labels(self) -> np.ndarray:
        table = np.full(self.base.size, -1, dtype=np.int64)
        for label, coset in enumerate(self.cosets()):
            table[indices_of(self.base.array, coset.array)] = label
        return table

    def label_of(self, w: int) -> int:
        """0 for the kernel, i for a_i + kernel, -1 when w is outside the base code."""
        return int(self.labels_of(np.array([w], dtype=np.int64))[0])

    def labels_of(self, words: np.ndarray) -> np.ndarray:
        pos = indices_of(self.base.array, np.asarray(words, dtype=np.int64))
        return np.where(pos >= 0, self._word_labels[np.maximum(pos, 0)], -1)


def min_distance(c: Code) -> int:
    if c.size < 2:
        raise CodeError("degenerate code")
    arr = c.array
    best = c.length + 1
    chunk = 256
    for start in range(0, c.size, chunk):
        block = arr[start : start + chunk]
        diffs = block[:, None] ^ arr[None, :]
        w = popcount(diffs)
        w[diffs == 0] = c.length + 1
        best = min(best, int(w.min()))
    return best


def echelon_basis(words: Iterable[int]) -> tuple[int, ...]:
    """Basis with pairwise distinct leading bits, sorted by decreasing leading bit."""
    basis: list[int] = []
    for w in words:
        w = int(w)
        for b in basis:
            w = min(w, w ^ b)
        if w:
            basis.append(w)
            basis.sort(reverse=True)
    return tuple(basis)


def reduce_word(w: int, basis: Sequence[int]) -> int:
    for b in basis:
        w = min(w, w ^ b)
    return w


def in_span(w: int, basis: Sequence[int]) -> bool:
    return reduce_word(w, basis) == 0


def rank(words: Iterable[int]) -> int:
    return len(echelon_basis(words))


def span_words(basis: Sequence[int]) -> np.ndarray:
    out = np.zeros(1, dtype=np.int64)
    for b in basis:
        out = np.concatenate([out, out ^ np.int64(b)])
    return np.sort(out)


def span_of_words(length: int, words: Iterable[int]) -> Code:
    return Code.from_words(length, span_words(echelon_basis(words)))


def span(c: Code) -> Code:
    if c.size == 0:
        raise CodeError("span requires a nonempty code")
    return span_of_words(c.length, c.words)


def span_basis(c: Code) -> tuple[int, ...]:
    return echelon_basis(c.words)


def dimension(c: Code) -> int:
    return rank(c.words)


def is_linear(c: Code) -> bool:
    return c.is_reduced() and c.size == 1 << dimension(c)


def kernel(c: Code) -> Code:
    """{x in c : x + c = c}, tested word by word."""
    if not c.is_reduced():
        raise CodeError("kernel requires reduced code")
    arr = c.array
    keep = [int(x) for x in arr if members(arr, arr ^ x).all()]
    return Code.from_words(c.length, keep)


def coset_min(w: int, kern: Code) -> int:
    return int((kern.array ^ np.int64(w)).min())


def coset_mins(words: np.ndarray, kern: Code) -> np.ndarray:
    words = np.asarray(words, dtype=np.int64)
    return (words[..., None] ^ kern.array).min(axis=-1)


def coset_decomposition(c: Code) -> CosetDecomposition:
    kern = kernel(c)
    covered = np.zeros(c.size, dtype=bool)
    covered[indices_of(c.array, kern.array)] = True
    reps: list[int] = []
    for pos, w in enumerate(c.words):
        if covered[pos]:
            continue
        reps.append(w)
        covered[indices_of(c.array, kern.array ^ np.int64(w))] = True
    return CosetDecomposition(base=c, kernel=kern, reps=tuple(reps))


def translate(c: Code, v: int) -> Code:
    if v < 0 or v >= 1 << c.length:
        raise CodeError("length mismatch")
    return Code.from_words(c.length, c.array ^ np.int64(v))


def sumset(c: Code) -> frozenset[int]:
    arr = c.array
    return frozenset(int(v) for v in np.unique(arr[:, None] ^ arr[None, :]))
