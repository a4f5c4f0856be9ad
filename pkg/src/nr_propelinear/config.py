from __future__ import annotations

import os
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Optional

ENV_PREFIX = "NR_PROPELINEAR_"
DEFAULT_SEED = 20240601
DEFAULT_CACHE_DIR = "./.nr_propelinear_cache"

TIERS = ("fast", "medium", "long")
OUTPUT_FORMATS = ("text", "json")

_TRUTHY = {"1", "true", "yes", "on"}


@dataclass(frozen=True)
class RunConfig:
    jobs: int
    cache_dir: Path
    tier: str
    output_format: str
    seed: int
    debug: bool = False


class ConfigError(ValueError):
    pass


def _env_or_default(name: str, default: str) -> str:
    """Read an environment variable or return a default when missing/empty."""
    value = os.getenv(name)
    if value is None or value.strip() == "":
        return default
    return value.strip()


def _optional_env(name: str) -> Optional[str]:
    value = os.getenv(name)
    if value is None:
        return None
    value = value.strip()
    return value if value != "" else None


def _parse_int(name: str, raw: str | int) -> int:
    try:
        return int(raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{name} must be an integer") from exc


def _validate(cfg: RunConfig) -> RunConfig:
    if cfg.jobs < 1:
        raise ConfigError(f"{ENV_PREFIX}JOBS must be >= 1")
    if cfg.tier not in TIERS:
        raise ConfigError(f"{ENV_PREFIX}TIER must be one of: {', '.join(TIERS)}")
    if cfg.output_format not in OUTPUT_FORMATS:
        raise ConfigError(
            f"{ENV_PREFIX}FORMAT must be one of: {', '.join(OUTPUT_FORMATS)}"
        )
    return cfg


def debug_enabled() -> bool:
    value = _optional_env(f"{ENV_PREFIX}DEBUG")
    if value is None:
        return False
    return value.lower() in _TRUTHY


def load_run_config() -> RunConfig:
    """Load run settings from environment variables.

    Optional:
    - NR_PROPELINEAR_JOBS (defaults to 1)
    - NR_PROPELINEAR_CACHE_DIR (defaults to ./.nr_propelinear_cache)
    - NR_PROPELINEAR_TIER (fast, medium or long; defaults to medium)
    - NR_PROPELINEAR_FORMAT (text or json; defaults to text)
    - NR_PROPELINEAR_SEED (defaults to 20240601)
    - NR_PROPELINEAR_DEBUG (1/true/yes/on enables stderr tracing)
    """
    jobs = _parse_int(f"{ENV_PREFIX}JOBS", _env_or_default(f"{ENV_PREFIX}JOBS", "1"))
    seed = _parse_int(
        f"{ENV_PREFIX}SEED", _env_or_default(f"{ENV_PREFIX}SEED", str(DEFAULT_SEED))
    )
    cfg = RunConfig(
        jobs=jobs,
        cache_dir=Path(_env_or_default(f"{ENV_PREFIX}CACHE_DIR", DEFAULT_CACHE_DIR)),
        tier=_env_or_default(f"{ENV_PREFIX}TIER", "medium").lower(),
        output_format=_env_or_default(f"{ENV_PREFIX}FORMAT", "text").lower(),
        seed=seed,
        debug=debug_enabled(),
    )
    return _validate(cfg)


def with_overrides(cfg: RunConfig, **changes: object) -> RunConfig:
    """Apply command-line overrides; None values leave the setting untouched."""
    updates: dict[str, object] = {}
    for key, value in changes.items():
        if value is None:
            continue
        if key in {"jobs", "seed"}:
            value = _parse_int(f"--{key}", value)  # type: ignore[arg-type]
        elif key == "cache_dir":
            value = Path(str(value))
        elif key in {"tier", "output_format"}:
            value = str(value).lower()
        updates[key] = value
    return _validate(replace(cfg, **updates))


def tier_allows(cfg: RunConfig, required: str) -> bool:
    if required not in TIERS:
        raise ConfigError(f"unknown tier: {required}")
    return TIERS.index(cfg.tier) >= TIERS.index(required)


def _split_assignment(line: str) -> tuple[str, str] | None:
    text = line.strip()
    if not text or text.startswith("#"):
        return None
    if text.startswith("export "):
        text = text[len("export ") :].lstrip()
    key, sep, value = text.partition("=")
    key = key.strip()
    if not sep or not key:
        return None
    value = value.strip()
    if len(value) >= 2 and value[0] == value[-1] and value[0] in {"'", '"'}:
        value = value[1:-1]
    return key, value


def load_env_files(
    paths: Iterable[str | Path] = (".env.local", ".env"),
    *,
    override: bool = False,
) -> None:
    """Load KEY=VALUE files into the environment.

    Variables already set win unless override=True. Missing files are skipped.
    """
    for p in paths:
        path = Path(p)
        if not path.is_file():
            continue
        for line in path.read_text(encoding="utf-8").splitlines():
            parsed = _split_assignment(line)
            if parsed is None:
                continue
            key, value = parsed
            if override or _optional_env(key) is None:
                os.environ[key] = value
