import numpy as np
import pytest

from nr_propelinear.constructions import (
    ConstructionError,
    gray,
    gray_inverse,
    gray_many,
    h16,
    nordstrom_robinson,
    nordstrom_robinson_structure,
    octacode,
    raw_nordstrom_robinson,
    reed_muller,
    z4_span,
    z4_supercode,
)
from nr_propelinear.gf2core import dimension, is_linear, kernel, min_distance, span
from nr_propelinear.structure import (
    check_structure,
    identity_subcode,
    is_normalized,
    normalization_bound,
    permutation_set,
)


def test_reed_muller_parameters() -> None:
    assert reed_muller(1, 3).parameters() == (8, 16, 4)
    assert reed_muller(1, 4).parameters() == (16, 32, 8)
    assert reed_muller(0, 1).words == (0, 3)
    assert h16().size == 2048
    assert min_distance(h16()) == 4
    assert is_linear(h16())


def test_reed_muller_range() -> None:
    with pytest.raises(ConstructionError) as exc:
        reed_muller(3, 2)

    assert "reed_muller requires 0 <= r <= m <= 5" in str(exc.value)


def test_gray_map_digits() -> None:
    # 0 -> 00, 1 -> 01, 2 -> 11, 3 -> 10 on coordinates (2i, 2i+1)
    assert gray([0, 1, 2, 3]) == 0b01111000
    assert gray_inverse(0b01111000, 4) == (0, 1, 2, 3)
    assert gray_many(np.array([[0, 1, 2, 3]])).tolist() == [0b01111000]


def test_gray_map_rejects_bad_digit() -> None:
    with pytest.raises(ConstructionError) as exc:
        gray([0, 4])

    assert "not a Z4 digit: 4" in str(exc.value)


def test_gray_map_is_injective_on_pairs() -> None:
    digits = np.array([[a, b] for a in range(4) for b in range(4)])

    assert np.unique(gray_many(digits)).size == 16


def test_z4_span_size() -> None:
    code = z4_span([(1, 1), (0, 2)], 2)

    assert code.size == 8


def test_octacode() -> None:
    code = octacode()

    assert code.size == 256
    assert code.length == 8
    assert not ((code.elements @ code.elements.T) % 4).any()


def test_nordstrom_robinson_parameters() -> None:
    nr = nordstrom_robinson()

    assert nr.parameters() == (16, 256, 6)
    assert nr.is_reduced()
    assert nr.weight_distribution() == {0: 1, 6: 112, 8: 30, 10: 112, 16: 1}
    assert nr.is_subcode_of(h16())


def test_nordstrom_robinson_kernel_and_span() -> None:
    nr = nordstrom_robinson()

    assert kernel(nr) == reed_muller(1, 4)
    assert span(nr) == reed_muller(2, 4)
    assert dimension(nr) == 11


def test_raw_image_is_equivalent() -> None:
    raw = raw_nordstrom_robinson()

    assert raw.parameters() == (16, 256, 6)
    assert kernel(raw).size == 32


def test_z4_structure_on_nordstrom_robinson() -> None:
    s = nordstrom_robinson_structure()

    assert s.code == nordstrom_robinson()
    assert check_structure(s).ok
    assert permutation_set(s).shape[0] == 16
    assert normalization_bound(s.code) == 8
    assert not is_normalized(s)
    assert identity_subcode(s).size == 16


def test_z4_supercode_gray_image() -> None:
    code = z4_supercode()

    assert code.size == 2048
    assert code.gray_image() == span(raw_nordstrom_robinson())
    assert code.gray_image().size == 2048
