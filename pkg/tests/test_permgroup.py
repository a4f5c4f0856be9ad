from collections import Counter

import numpy as np
import pytest

from nr_propelinear.constructions import nordstrom_robinson, reed_muller
from nr_propelinear.gf2core import Code
from nr_propelinear.permgroup import (
    H16_ORDER,
    Automorphism,
    PermGroupError,
    PermGroupSet,
    apply,
    closure,
    compose,
    compose_many,
    conjugate,
    conjugate_subgroup,
    cycle_type,
    group_closed,
    index_action,
    inverse,
    is_elementary_abelian,
    is_two_transitive,
    mapping_perms,
    perm_order,
    permute_word,
    permute_words,
    sym_h16,
    sym_of_subcode,
    translation_subgroup,
    transvection_perms,
)


def test_permute_word_convention() -> None:
    # (p.y)_i = y_{p(i)}
    p = (1, 2, 0)

    assert permute_word(p, 0b001) == 0b100
    assert permute_word(p, 0b010) == 0b001
    assert permute_words(p, np.array([1, 2, 4])).tolist() == [4, 1, 2]


def test_compose_matches_application() -> None:
    a = Automorphism(0b0011, (1, 2, 3, 0))
    b = Automorphism(0b0100, (2, 0, 3, 1))

    ab = compose(a, b)

    for y in range(16):
        assert apply(ab, y) == apply(a, apply(b, y))
        assert apply(inverse(a), apply(a, y)) == y


def test_conjugate_by_identity() -> None:
    h = Automorphism(0b101, (2, 0, 1))

    assert conjugate(Automorphism.identity(3), h) == h


def test_automorphism_rejects_bad_input() -> None:
    with pytest.raises(PermGroupError) as exc:
        Automorphism(0, (0, 0, 1))
    assert "bijection" in str(exc.value)

    with pytest.raises(PermGroupError) as exc:
        Automorphism(8, (0, 1, 2))
    assert "length mismatch" in str(exc.value)


def test_compose_many_matches_compose() -> None:
    a = Automorphism(0b0011, (1, 2, 3, 0))
    b = Automorphism(0b0100, (2, 0, 3, 1))

    xs, ps = compose_many(
        np.array([a.x]), np.array([a.p]), np.array([b.x]), np.array([b.p])
    )

    ab = compose(a, b)
    assert int(xs[0]) == ab.x
    assert tuple(int(v) for v in ps[0]) == ab.p


def test_cycle_type_and_order() -> None:
    p = (1, 0, 3, 4, 2, 5)

    assert cycle_type(p) == (1, 2, 3)
    assert perm_order(p) == 6


def test_closure_of_cycle() -> None:
    gen = Automorphism(0, (1, 2, 3, 0))

    result = closure([gen], bound=100)

    assert not result.exceeded
    assert result.order == 4
    assert group_closed(result.group)


def test_closure_exceeds_bound() -> None:
    gens = [Automorphism(0, (1, 0, 2, 3)), Automorphism(0, (1, 2, 3, 0))]

    result = closure(gens, bound=10)

    assert result.exceeded
    assert result.group is None


def test_closure_with_translations() -> None:
    gens = [Automorphism.translation(0b01, 2), Automorphism(0, (1, 0))]

    result = closure(gens, bound=100)

    assert result.order == 8
    assert not result.group.is_pure()
    assert Automorphism(0b11, (1, 0)) in result.group


def test_closure_rejects_bad_bound() -> None:
    with pytest.raises(PermGroupError) as exc:
        closure([], bound=0, degree=3)

    assert "bound must be >= 1" in str(exc.value)


def test_sym_h16_is_affine_group() -> None:
    group = sym_h16()

    assert group.order == H16_ORDER
    assert is_two_transitive(group)
    assert translation_subgroup(group).order == 16
    assert group_closed(group, samples=500, seed=1)


def test_translations_are_normal_elementary_abelian() -> None:
    group = sym_h16()
    trans = translation_subgroup(group)

    assert is_elementary_abelian(trans)
    assert transvection_perms().shape == (12, 16)
    for p in transvection_perms():
        g = Automorphism(0, tuple(int(v) for v in p))
        assert g in group
        assert conjugate_subgroup(trans, g) == trans


def test_is_elementary_abelian() -> None:
    klein = PermGroupSet.from_arrays(4, [[0, 1, 2, 3], [1, 0, 3, 2], [2, 3, 0, 1], [3, 2, 1, 0]])
    cyclic = PermGroupSet.from_arrays(4, [[0, 1, 2, 3], [1, 2, 3, 0], [2, 3, 0, 1], [3, 0, 1, 2]])
    shifted = PermGroupSet.from_arrays(2, [[0, 1]], [1])

    assert is_elementary_abelian(klein)
    assert not is_elementary_abelian(cyclic)
    with pytest.raises(PermGroupError) as exc:
        is_elementary_abelian(shifted)
    assert "pure permutation group" in str(exc.value)


def test_conjugate_subgroup_preserves_order_and_cycle_types() -> None:
    base = sym_of_subcode(nordstrom_robinson())
    g = Automorphism(0, tuple(int(v) for v in transvection_perms()[0]))

    conj = conjugate_subgroup(base, g)

    assert conj.order == base.order
    assert conj.is_pure()
    assert Counter(cycle_type(p) for p in conj.perms) == Counter(
        cycle_type(p) for p in base.perms
    )
    assert Counter(perm_order(p) for p in conj.perms) == Counter(
        perm_order(p) for p in base.perms
    )


def test_sym_of_rm24_is_everything() -> None:
    rm = reed_muller(2, 4)

    assert sym_of_subcode(rm).order == H16_ORDER


def test_sym_of_subcode_inapplicable() -> None:
    with pytest.raises(PermGroupError) as exc:
        sym_of_subcode(reed_muller(1, 4))
    # RM(1,4) spans only itself
    assert "filter method inapplicable" in str(exc.value)


def test_mapping_perms_size_mismatch() -> None:
    a = Code.from_words(16, [0, 1])
    b = Code.from_words(16, [0, 1, 2])

    assert mapping_perms(a, b).shape[0] == 0


def test_index_action_rows_are_permutations() -> None:
    rm = reed_muller(1, 4)
    group = sym_h16()

    table = index_action(group.perms[:10], None, rm)

    assert table.shape == (10, 32)
    for row in table:
        assert sorted(row.tolist()) == list(range(32))


def test_index_action_rejects_non_automorphism() -> None:
    c = Code.from_words(16, [0, 1])
    swap = np.array([list(range(1, 16)) + [0]], dtype=np.uint8)

    with pytest.raises(PermGroupError) as exc:
        index_action(swap, None, c)

    assert "does not preserve the code" in str(exc.value)
