import json
from pathlib import Path

import numpy as np
import pytest

from nr_propelinear.constructions import nordstrom_robinson, nordstrom_robinson_structure
from nr_propelinear.gf2core import Code
from nr_propelinear.partition import partitions_containing
from nr_propelinear.storage import (
    SCHEMA_VERSION,
    StorageError,
    format_word,
    has_extension_cache,
    latest_level_checkpoint,
    load_code,
    load_extension_cache,
    load_partitions,
    load_structure,
    load_structures,
    missing_extension_caches,
    parse_code,
    parse_perm,
    parse_structure,
    parse_word,
    report_json,
    save_code,
    save_extension_cache,
    save_level_checkpoint,
    save_partitions,
    save_structure,
    save_structures,
    write_report,
)
from nr_propelinear.structure import trivial_partial


def test_word_rows_put_coordinate_zero_first() -> None:
    assert format_word(0b0011, 4) == "1100"
    assert parse_word("1100", 4) == 0b0011


def test_parse_word_rejects_bad_rows() -> None:
    with pytest.raises(StorageError) as exc:
        parse_word("110", 4)
    assert "expected 4" in str(exc.value)

    with pytest.raises(StorageError) as exc:
        parse_word("1120", 4)
    assert "only contain 0 and 1" in str(exc.value)


def test_code_file(tmp_path: Path) -> None:
    c = Code.from_words(4, [0, 3, 12])
    path = save_code(tmp_path / "codes" / "c.txt", c)

    text = path.read_text(encoding="utf-8")

    assert text.splitlines()[0] == "4 3"
    assert load_code(path) == c


def test_parse_code_header_mismatch() -> None:
    with pytest.raises(StorageError) as exc:
        parse_code("4 3\n0000\n1100\n")

    assert "header says 3" in str(exc.value)


def test_parse_code_malformed_header() -> None:
    with pytest.raises(StorageError) as exc:
        parse_code("four\n0000\n")

    assert "malformed header" in str(exc.value)


def test_load_code_missing_file(tmp_path: Path) -> None:
    with pytest.raises(StorageError) as exc:
        load_code(tmp_path / "nope.txt")

    assert "file does not exist" in str(exc.value)


def test_parse_perm() -> None:
    assert parse_perm("2 0 1", 3) == (2, 0, 1)
    with pytest.raises(StorageError) as exc:
        parse_perm("0 0 1")
    assert "not a permutation" in str(exc.value)


def test_structure_file(tmp_path: Path) -> None:
    s = nordstrom_robinson_structure()

    path = save_structure(tmp_path / "s.txt", s)

    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "16 256"
    assert len(lines) == 1 + 2 * 256
    assert load_structure(path) == s


def test_parse_structure_short_body() -> None:
    with pytest.raises(StorageError) as exc:
        parse_structure("2 2\n00\n0 1\n")

    assert "expected 4" in str(exc.value)


def test_structure_directory(tmp_path: Path) -> None:
    s = nordstrom_robinson_structure()

    paths = save_structures(tmp_path, [s, s])

    assert [p.name for p in paths] == ["structure_000.txt", "structure_001.txt"]
    assert load_structures(tmp_path) == [s, s]


def test_partition_manifest(tmp_path: Path) -> None:
    nr = nordstrom_robinson()
    parts = partitions_containing(nr)[:3]
    base_path = save_code(tmp_path / "base.txt", nr)

    manifest = save_partitions(tmp_path / "parts", base_path, parts)

    first = (tmp_path / "parts" / "partition_00.txt").read_text(encoding="utf-8").splitlines()
    assert first[0] == "blocks=8"
    assert first[1] == "0" * 16
    assert len(first) == 9
    data = json.loads(manifest.read_text(encoding="utf-8"))
    assert data["schema_version"] == SCHEMA_VERSION
    assert load_partitions(manifest) == parts


def test_level_checkpoint(tmp_path: Path) -> None:
    part = trivial_partial(nordstrom_robinson())

    save_level_checkpoint(tmp_path, 1, [part, part], [1, 2])
    resumed = latest_level_checkpoint(tmp_path, 8)

    assert resumed is not None
    level, reps, counts = resumed
    assert level == 1
    assert counts == [1, 2]
    assert len(reps) == 2
    assert np.array_equal(reps[0].rows, part.rows)
    assert latest_level_checkpoint(tmp_path / "empty", 8) is None


def test_extension_cache(tmp_path: Path) -> None:
    s = nordstrom_robinson_structure()
    words = np.arange(8, dtype=np.int64)

    assert load_extension_cache(tmp_path, s) is None
    assert not has_extension_cache(tmp_path)
    save_extension_cache(tmp_path, s, [(4, (1, 2, 3), words)])

    loaded = load_extension_cache(tmp_path, s)

    assert has_extension_cache(tmp_path)
    assert loaded is not None
    idx, gens, got = loaded[0]
    assert (idx, gens) == (4, (1, 2, 3))
    assert got.tolist() == words.tolist()


def test_empty_extension_cache(tmp_path: Path) -> None:
    s = nordstrom_robinson_structure()

    save_extension_cache(tmp_path, s, [])

    assert load_extension_cache(tmp_path, s) == []
    assert missing_extension_caches(tmp_path, [s]) == []
    assert missing_extension_caches(tmp_path / "other", [s, s]) == [0, 1]


def test_report_json(tmp_path: Path) -> None:
    body = json.loads(report_json({"b": 1, "a": [2]}))
    path = write_report(tmp_path / "r.json", {"x": 1})

    assert body == {"schema_version": SCHEMA_VERSION, "b": 1, "a": [2]}
    assert json.loads(path.read_text(encoding="utf-8"))["x"] == 1
