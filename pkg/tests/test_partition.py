import itertools

import pytest

from nr_propelinear.constructions import nordstrom_robinson
from nr_propelinear.gf2core import coset_decomposition, translate
from nr_propelinear.partition import (
    FANO_PLANE_COUNT,
    FanoPlane,
    Partition,
    PartitionError,
    a7_orbits,
    all_fano_planes,
    apply_point_perm,
    coset_rep_sum_in_kernel,
    derived_plane,
    disjoint_by_criterion,
    exhaustive_partitions,
    hamming_representation,
    partition_classes,
    partitions_containing,
    partitions_isomorphic,
    pasch_switch,
    plane_orbits,
    reduced_nr_codes_in_h16,
    verify_partition,
)
from nr_propelinear.permgroup import sym_of_subcode

_PLANE = FanoPlane.from_lines(
    [(1, 2, 3), (1, 4, 5), (1, 6, 7), (2, 4, 6), (2, 5, 7), (3, 4, 7), (3, 5, 6)]
)


def test_fano_plane_rejects_repeated_pair() -> None:
    with pytest.raises(PartitionError) as exc:
        FanoPlane.from_lines(
            [(1, 2, 3), (1, 2, 4), (1, 6, 7), (2, 4, 6), (2, 5, 7), (3, 4, 7), (3, 5, 6)]
        )

    assert "lies on two lines" in str(exc.value)


def test_fano_plane_queries() -> None:
    assert len(_PLANE.lines_through(4)) == 3
    assert _PLANE.third_point(2, 5) == 7
    assert _PLANE.third_point(5, 2) == 7


def test_all_fano_planes() -> None:
    planes = all_fano_planes()

    assert len(planes) == FANO_PLANE_COUNT
    assert _PLANE in planes


def test_a7_orbits_and_odd_permutation() -> None:
    planes = all_fano_planes()

    first, second = a7_orbits(planes)

    assert len(first) == len(second) == 15
    swapped = apply_point_perm(first[0], (2, 1, 3, 4, 5, 6, 7))
    assert swapped in second


def test_s7_is_transitive_on_planes() -> None:
    planes = all_fano_planes()
    gens = [(2, 1, 3, 4, 5, 6, 7), (2, 3, 4, 5, 6, 7, 1)]

    assert len(plane_orbits(planes, gens)) == 1


def test_apply_point_perm_rejects_non_bijection() -> None:
    with pytest.raises(PartitionError) as exc:
        apply_point_perm(_PLANE, (1, 1, 3, 4, 5, 6, 7))

    assert "bijection of 1..7" in str(exc.value)


def test_pasch_switch_changes_orbit() -> None:
    first, second = a7_orbits(all_fano_planes())

    switched = pasch_switch(first[0], 1)

    assert switched != first[0]
    assert switched in second
    assert first[0].lines_through(1) == switched.lines_through(1)


def test_coset_rep_sum_in_kernel() -> None:
    assert coset_rep_sum_in_kernel(nordstrom_robinson())


def test_hamming_representation_covers_h16() -> None:
    report = hamming_representation(nordstrom_robinson())

    assert len(report.by_subset) == 64
    assert sum(1 for s in report.by_subset if len(s) == 3) == 35
    assert report.subset_of(0) == ()
    assert report.subset_of(report.subset_sum((2, 5))) == (2, 5)


def test_disjointness_criterion_matches_brute_force() -> None:
    nr = nordstrom_robinson()
    report = hamming_representation(nr)
    nr_words = set(nr.words)

    for subset, m in report.by_subset.items():
        direct = not (set(translate(nr, m).words) & nr_words)
        assert disjoint_by_criterion(0, m, nr, report) == direct
        assert direct == (len(subset) == 3)


def test_disjointness_criterion_equal_and_pair() -> None:
    nr = nordstrom_robinson()
    report = hamming_representation(nr)
    a = report.subset_sum((1, 2, 4))

    assert not disjoint_by_criterion(a, a, nr, report)
    assert not disjoint_by_criterion(a, a ^ report.subset_sum((1, 2)), nr, report)


def test_disjointness_criterion_outside_span() -> None:
    with pytest.raises(PartitionError) as exc:
        disjoint_by_criterion(0, 1, nordstrom_robinson())

    assert "outside the span of the code" in str(exc.value)


def test_partitions_containing_nr() -> None:
    parts = partitions_containing(nordstrom_robinson())

    assert len(parts) == 30
    assert all(verify_partition(p) for p in parts)
    assert len({p.translator_mins() for p in parts}) == 30


def test_derived_plane_round_trip() -> None:
    nr = nordstrom_robinson()
    p = partitions_containing(nr)[3]

    bare = Partition(base=nr, translators=p.translators)

    assert derived_plane(bare) == p.plane


def test_verify_partition_rejects_overlap() -> None:
    nr = nordstrom_robinson()
    d = coset_decomposition(nr)
    bad = Partition(base=nr, translators=tuple(d.reps))

    assert not verify_partition(bad)


@pytest.mark.medium
def test_exhaustive_partitions_agree() -> None:
    nr = nordstrom_robinson()
    derived = sorted(p.translator_mins() for p in partitions_containing(nr))

    assert exhaustive_partitions(nr) == derived


@pytest.mark.medium
def test_partition_classes() -> None:
    parts = partitions_containing(nordstrom_robinson())
    first, _ = a7_orbits(all_fano_planes())
    same_orbit = [p for p in parts if p.plane in first]

    assert partitions_isomorphic(parts[0], parts[0])
    assert partitions_isomorphic(same_orbit[0], same_orbit[1])
    assert sorted(len(c) for c in partition_classes(parts)) == [15, 15]


@pytest.mark.medium
def test_reduced_nr_codes_in_h16() -> None:
    report = reduced_nr_codes_in_h16()

    assert len(report.codes) == 8
    assert report.orbit_size == 8
    assert report.conjugates_match
    assert len({sym_of_subcode(c) for c in report.codes}) == 8
    assert all(c.is_reduced() for c in report.codes)
    for a, b in itertools.combinations(report.codes, 2):
        assert a != b
