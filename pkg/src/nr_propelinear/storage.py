"""Text formats for codes, permutations and structures; npz caches for long runs.

Code files: a header "n M" and then M rows of n characters, character i being
coordinate i. Permutation lines hold n space-separated images.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from nr_propelinear.gf2core import Code, CodeError
from nr_propelinear.permgroup import Automorphism
from nr_propelinear.structure import PropStructure, SemiregularPartial, StructureError

SCHEMA_VERSION = 1
MANIFEST_NAME = "manifest.json"


class StorageError(RuntimeError):
    pass


def format_word(w: int, n: int) -> str:
    return "".join("1" if (w >> i) & 1 else "0" for i in range(n))


def parse_word(line: str, n: int) -> int:
    text = line.strip()
    if len(text) != n:
        raise StorageError(f"word row has length {len(text)}, expected {n}")
    if set(text) - {"0", "1"}:
        raise StorageError("word rows may only contain 0 and 1")
    return sum(1 << i for i, ch in enumerate(text) if ch == "1")


def _parse_header(line: str) -> tuple[int, int]:
    parts = line.split()
    if len(parts) != 2:
        raise StorageError(f"malformed header: {line!r}")
    try:
        return int(parts[0]), int(parts[1])
    except ValueError as exc:
        raise StorageError(f"malformed header: {line!r}") from exc


def _read(path: Path) -> str:
    if not path.is_file():
        raise StorageError(f"file does not exist: {path}")
    return path.read_text(encoding="utf-8")


def _data_lines(text: str) -> list[str]:
    return [line for line in text.splitlines() if line.strip()]


def format_code(c: Code) -> str:
    rows = [f"{c.length} {c.size}"] + [format_word(w, c.length) for w in c.words]
    return "\n".join(rows) + "\n"


def parse_code(text: str) -> Code:
    lines = _data_lines(text)
    if not lines:
        raise StorageError("code file is empty")
    n, m = _parse_header(lines[0])
    rows = lines[1:]
    if len(rows) != m:
        raise StorageError(f"code file has {len(rows)} rows, header says {m}")
    words = [parse_word(row, n) for row in rows]
    try:
        return Code.from_words(n, words)
    except CodeError as exc:
        raise StorageError(str(exc)) from exc


def save_code(path: Path, c: Code) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_code(c), encoding="utf-8")
    return path


def load_code(path: Path) -> Code:
    return parse_code(_read(path))


def format_perm(p: Sequence[int]) -> str:
    return " ".join(str(int(v)) for v in p)


def parse_perm(line: str, n: int | None = None) -> tuple[int, ...]:
    try:
        images = tuple(int(v) for v in line.split())
    except ValueError as exc:
        raise StorageError("permutation images must be integers") from exc
    if n is not None and len(images) != n:
        raise StorageError(f"permutation has {len(images)} images, expected {n}")
    if sorted(images) != list(range(len(images))):
        raise StorageError("not a permutation")
    return images


def format_automorphism(a: Automorphism) -> str:
    return f"{format_word(a.x, a.length)}\n{format_perm(a.p)}\n"


def format_z4_code(elements: np.ndarray) -> str:
    rows = [f"{elements.shape[1]} {elements.shape[0]}"]
    rows += [" ".join(str(int(d)) for d in row) for row in elements]
    return "\n".join(rows) + "\n"


def save_z4_code(path: Path, elements: np.ndarray) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_z4_code(elements), encoding="utf-8")
    return path


def format_structure(s: PropStructure) -> str:
    rows = [f"{s.length} {s.size}"]
    for x, p in zip(s.code.words, s.perms):
        rows.append(format_word(x, s.length))
        rows.append(format_perm(p))
    return "\n".join(rows) + "\n"


def parse_structure(text: str) -> PropStructure:
    lines = _data_lines(text)
    if not lines:
        raise StorageError("structure file is empty")
    n, m = _parse_header(lines[0])
    body = lines[1:]
    if len(body) != 2 * m:
        raise StorageError(f"structure file has {len(body)} lines, expected {2 * m}")
    xs = [parse_word(body[2 * k], n) for k in range(m)]
    perms = np.array([parse_perm(body[2 * k + 1], n) for k in range(m)], dtype=np.uint8)
    try:
        return PropStructure.from_elements(n, xs, perms.reshape(m, n))
    except (CodeError, StructureError) as exc:
        raise StorageError(str(exc)) from exc


def save_structure(path: Path, s: PropStructure) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_structure(s), encoding="utf-8")
    return path


def load_structure(path: Path) -> PropStructure:
    return parse_structure(_read(path))


def save_structures(directory: Path, structures: Sequence[PropStructure]) -> list[Path]:
    directory.mkdir(parents=True, exist_ok=True)
    return [
        save_structure(directory / f"structure_{i:03d}.txt", s) for i, s in enumerate(structures)
    ]


def load_structures(directory: Path) -> list[PropStructure]:
    if not directory.is_dir():
        raise StorageError(f"directory does not exist: {directory}")
    return [load_structure(p) for p in sorted(directory.glob("structure_*.txt"))]


def save_partitions(directory: Path, base_path: Path, partitions: Sequence[Any]) -> Path:
    """One translator file per partition plus manifest.json pointing at the base code."""
    directory.mkdir(parents=True, exist_ok=True)
    files = []
    planes = []
    for i, p in enumerate(partitions):
        n = p.base.length
        name = f"partition_{i:02d}.txt"
        rows = ["blocks=8", format_word(0, n)] + [format_word(t, n) for t in p.translators]
        (directory / name).write_text("\n".join(rows) + "\n", encoding="utf-8")
        files.append(name)
        planes.append([list(line) for line in p.plane.lines] if p.plane is not None else None)
    manifest = directory / MANIFEST_NAME
    write_report(
        manifest,
        {"base": str(base_path), "files": files, "planes": planes},
    )
    return manifest


def load_partitions(manifest: Path) -> list[Any]:
    from nr_propelinear.partition import FanoPlane, Partition

    try:
        data = json.loads(_read(manifest))
    except json.JSONDecodeError as exc:
        raise StorageError(f"manifest is not valid JSON: {manifest}") from exc
    base = load_code(Path(data["base"]))
    out = []
    for name, lines in zip(data["files"], data["planes"]):
        rows = _data_lines(_read(manifest.parent / name))
        if not rows or rows[0].strip() != "blocks=8" or len(rows) != 9:
            raise StorageError(f"malformed partition file: {name}")
        words = [parse_word(row, base.length) for row in rows[1:]]
        if words[0] != 0:
            raise StorageError(f"first translator of {name} is not the zero word")
        plane = FanoPlane.from_lines(lines) if lines is not None else None
        out.append(Partition(base=base, translators=tuple(words[1:]), plane=plane))
    return out


def _level_path(cache_dir: Path, level: int) -> Path:
    return cache_dir / "levels" / f"level_{level:02d}.npz"


def save_level_checkpoint(
    cache_dir: Path, level: int, reps: Sequence[SemiregularPartial], counts: Sequence[int]
) -> Path:
    path = _level_path(cache_dir, level)
    path.parent.mkdir(parents=True, exist_ok=True)
    np.savez_compressed(
        path,
        level=np.int64(level),
        rows=np.stack([p.rows for p in reps]).astype(np.uint8),
        xs=np.stack([p.xs for p in reps]).astype(np.int64),
        perms=np.stack([p.perms for p in reps]).astype(np.uint8),
        counts=np.array(counts, dtype=np.int64),
    )
    return path


def load_level_checkpoint(path: Path) -> tuple[int, list[SemiregularPartial], list[int]]:
    if not path.is_file():
        raise StorageError(f"checkpoint does not exist: {path}")
    with np.load(path) as data:
        level = int(data["level"])
        reps = [
            SemiregularPartial(level=level, rows=r, xs=x, perms=p)
            for r, x, p in zip(data["rows"], data["xs"], data["perms"])
        ]
        counts = [int(c) for c in data["counts"]]
    return level, reps, counts


def latest_level_checkpoint(
    cache_dir: Path, top_level: int
) -> tuple[int, list[SemiregularPartial], list[int]] | None:
    for level in range(top_level, 0, -1):
        path = _level_path(cache_dir, level)
        if path.is_file():
            return load_level_checkpoint(path)
    return None


def _extension_path(cache_dir: Path, s: PropStructure) -> Path:
    return cache_dir / "extensions" / f"{s.digest()}.npz"


def save_extension_cache(
    cache_dir: Path,
    s: PropStructure,
    records: Sequence[tuple[int, tuple[int, int, int], np.ndarray]],
) -> Path:
    path = _extension_path(cache_dir, s)
    path.parent.mkdir(parents=True, exist_ok=True)
    width = 0 if not records else int(np.asarray(records[0][2]).size)
    np.savez_compressed(
        path,
        partition_index=np.array([r[0] for r in records], dtype=np.int64),
        generators=np.array([r[1] for r in records], dtype=np.int64).reshape(-1, 3),
        identity_words=np.array([r[2] for r in records], dtype=np.int64).reshape(
            len(records), width
        ),
    )
    return path


def load_extension_cache(
    cache_dir: Path, s: PropStructure
) -> list[tuple[int, tuple[int, int, int], np.ndarray]] | None:
    path = _extension_path(cache_dir, s)
    if not path.is_file():
        return None
    with np.load(path) as data:
        return [
            (int(idx), tuple(int(t) for t in gens), words.copy())  # type: ignore[misc]
            for idx, gens, words in zip(
                data["partition_index"], data["generators"], data["identity_words"]
            )
        ]


def has_extension_cache(cache_dir: Path) -> bool:
    directory = cache_dir / "extensions"
    return directory.is_dir() and any(directory.glob("*.npz"))


def missing_extension_caches(cache_dir: Path, structures: Sequence[PropStructure]) -> list[int]:
    return [i for i, s in enumerate(structures) if not _extension_path(cache_dir, s).is_file()]


def report_json(payload: dict) -> str:
    body = {"schema_version": SCHEMA_VERSION, **payload}
    return json.dumps(body, indent=2, sort_keys=True)


def write_report(path: Path, payload: dict) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(report_json(payload) + "\n", encoding="utf-8")
    return path
