import numpy as np
import pytest

from nr_propelinear.constructions import (
    h16,
    nordstrom_robinson,
    nordstrom_robinson_structure,
)
from nr_propelinear.extension import (
    EXTENSION_INDEX,
    ExtensionError,
    classify_extensions,
    extend_all,
    extend_structure,
    extend_with_partition,
    extension_report,
    generated_extension,
    verify_supercode_extension,
    verify_decomposition,
)
from nr_propelinear.partition import partitions_containing
from nr_propelinear.permgroup import sym_of_subcode
from nr_propelinear.structure import (
    PropStructure,
    check_structure,
    enumerate_structures,
    identity_subcode,
    permutation_set,
    restrict_structure,
)


@pytest.fixture(scope="module")
def z4_extensions():
    return extend_structure(nordstrom_robinson_structure())


def test_extend_rejects_invalid_source() -> None:
    s = nordstrom_robinson_structure()
    bad = PropStructure(code=s.code, perms=np.tile(np.arange(16, dtype=np.uint8), (s.size, 1)))

    with pytest.raises(ExtensionError) as exc:
        extend_structure(bad)

    assert "source structure is not valid" in str(exc.value)


def test_z4_structure_extends(z4_extensions) -> None:
    s = nordstrom_robinson_structure()

    assert z4_extensions
    for r in z4_extensions:
        assert r.extended.code == h16()
        assert r.extended.size == 2048
        assert check_structure(r.extended).ok
        assert np.array_equal(permutation_set(r.extended), permutation_set(s))
        assert restrict_structure(r.extended, s.code) == s


def test_extensions_are_distinct(z4_extensions) -> None:
    keys = {r.extended.key() for r in z4_extensions}

    assert len(keys) == len(z4_extensions)


def test_identity_space_index(z4_extensions) -> None:
    c_id = identity_subcode(nordstrom_robinson_structure())

    for r in z4_extensions:
        assert identity_subcode(r.extended).size == EXTENSION_INDEX * c_id.size


def test_decomposition_checks(z4_extensions) -> None:
    for r in z4_extensions:
        check = verify_decomposition(r)
        assert check.ok, check.failures
        assert set(check.checks) == {
            "identity_subgroup",
            "identity_normal",
            "left_cosets_are_translates",
            "narrow",
            "restriction",
            "factorisation",
        }


def test_extend_with_partition_matches_full_search(z4_extensions) -> None:
    s = nordstrom_robinson_structure()
    parts = partitions_containing(s.code)
    idx = z4_extensions[0].partition_index

    found = extend_with_partition(s, parts[idx], idx)

    expected = [r for r in z4_extensions if r.partition_index == idx]
    assert [r.extended.key() for r in found] == [r.extended.key() for r in expected]


def test_generated_extension_agrees(z4_extensions) -> None:
    for r in z4_extensions:
        d = generated_extension(r.source, r.generators)

        assert d is not None
        assert d == r.extended


def test_generated_extension_rejects_kernel_translators() -> None:
    s = nordstrom_robinson_structure()
    c_id = identity_subcode(s)

    # translations already inside the source add nothing
    assert generated_extension(s, [int(w) for w in c_id.words[:3]]) is None


def test_z4_supercode_extension() -> None:
    check = verify_supercode_extension()

    assert check.ok, check.failures
    assert check.checks["found_by_search"]


def test_z4_supercode_extension_without_search() -> None:
    check = verify_supercode_extension(run_search=False)

    assert "found_by_search" not in check.checks
    assert check.ok


def test_extend_all_uses_cache(tmp_path, z4_extensions) -> None:
    s = nordstrom_robinson_structure()

    first = extend_all([s], cache_dir=tmp_path)
    again = extend_all([s], cache_dir=tmp_path)

    assert list((tmp_path / "extensions").glob("*.npz"))
    assert len(first[0].results) == len(again[0].results) == len(z4_extensions)
    assert first[0].partitions_tried == 30
    assert [r.extended.key() for r in again[0].results] == [
        r.extended.key() for r in z4_extensions
    ]


@pytest.mark.medium
def test_classify_and_report(z4_extensions) -> None:
    sources = extend_all([nordstrom_robinson_structure()])

    summary = classify_extensions(sources)
    payload = extension_report(sources, summary)

    assert summary.total_extensions == len(z4_extensions)
    assert 1 <= summary.conjugacy_classes <= summary.total_extensions
    assert sum(summary.class_sizes) == summary.total_extensions
    assert summary.fingerprint_classes <= summary.conjugacy_classes
    assert summary.non_extendable_sources == []
    assert payload["sources"][0]["extensions_found"] == len(z4_extensions)
    assert payload["totals"]["conjugacy_classes"] == summary.conjugacy_classes
    assert payload["sources"][0]["conjugacy_class_reps"] == summary.conjugacy_classes
    assert payload["sources"][0]["fingerprints"] == summary.fingerprint_classes


def test_report_without_classification() -> None:
    sources = extend_all([nordstrom_robinson_structure()])

    payload = extension_report(sources)

    assert "totals" not in payload
    assert payload["sources"][0]["source_id"] == 0
    assert "fingerprints" not in payload["sources"][0]


@pytest.mark.long
def test_all_sources_extension_counts(tmp_path_factory: pytest.TempPathFactory) -> None:
    nr = nordstrom_robinson()
    cache = tmp_path_factory.mktemp("extensions")
    structures = enumerate_structures(nr, sym_of_subcode(nr), cache_dir=cache)

    sources = extend_all(structures, cache_dir=cache)
    summary = classify_extensions(sources)

    assert summary.conjugacy_classes == 3057
    assert 2284 <= summary.fingerprint_classes <= 3057
    assert len(summary.non_extendable_sources) == 1
    for src in sources:
        for r in src.results:
            assert verify_decomposition(r).ok
