from pathlib import Path

import pytest

from nr_propelinear.config import (
    ConfigError,
    load_env_files,
    load_run_config,
    tier_allows,
    with_overrides,
)

_VARS = ("JOBS", "CACHE_DIR", "TIER", "FORMAT", "SEED", "DEBUG")


def _clear(monkeypatch: pytest.MonkeyPatch) -> None:
    for name in _VARS:
        monkeypatch.delenv(f"NR_PROPELINEAR_{name}", raising=False)


def test_load_run_config_defaults(monkeypatch: pytest.MonkeyPatch) -> None:
    _clear(monkeypatch)

    cfg = load_run_config()

    assert cfg.jobs == 1
    assert cfg.tier == "medium"
    assert cfg.output_format == "text"
    assert cfg.seed == 20240601
    assert cfg.cache_dir == Path("./.nr_propelinear_cache")
    assert cfg.debug is False


def test_load_run_config_invalid_jobs(monkeypatch: pytest.MonkeyPatch) -> None:
    _clear(monkeypatch)
    monkeypatch.setenv("NR_PROPELINEAR_JOBS", "many")

    with pytest.raises(ConfigError) as exc:
        load_run_config()

    assert "NR_PROPELINEAR_JOBS must be an integer" in str(exc.value)


def test_load_run_config_rejects_zero_jobs(monkeypatch: pytest.MonkeyPatch) -> None:
    _clear(monkeypatch)
    monkeypatch.setenv("NR_PROPELINEAR_JOBS", "0")

    with pytest.raises(ConfigError) as exc:
        load_run_config()

    assert "NR_PROPELINEAR_JOBS must be >= 1" in str(exc.value)


def test_load_run_config_unknown_tier(monkeypatch: pytest.MonkeyPatch) -> None:
    _clear(monkeypatch)
    monkeypatch.setenv("NR_PROPELINEAR_TIER", "forever")

    with pytest.raises(ConfigError) as exc:
        load_run_config()

    assert "NR_PROPELINEAR_TIER must be one of: fast, medium, long" in str(exc.value)


def test_load_run_config_success(monkeypatch: pytest.MonkeyPatch, tmp_path: Path) -> None:
    _clear(monkeypatch)
    monkeypatch.setenv("NR_PROPELINEAR_JOBS", "4")
    monkeypatch.setenv("NR_PROPELINEAR_CACHE_DIR", str(tmp_path))
    monkeypatch.setenv("NR_PROPELINEAR_TIER", "LONG")
    monkeypatch.setenv("NR_PROPELINEAR_FORMAT", "json")
    monkeypatch.setenv("NR_PROPELINEAR_SEED", "7")
    monkeypatch.setenv("NR_PROPELINEAR_DEBUG", "yes")

    cfg = load_run_config()

    assert cfg.jobs == 4
    assert cfg.cache_dir == tmp_path
    assert cfg.tier == "long"
    assert cfg.output_format == "json"
    assert cfg.seed == 7
    assert cfg.debug is True


def test_with_overrides_ignores_none(monkeypatch: pytest.MonkeyPatch) -> None:
    _clear(monkeypatch)
    cfg = load_run_config()

    updated = with_overrides(cfg, tier="fast", jobs=None, seed=3)

    assert updated.tier == "fast"
    assert updated.jobs == 1
    assert updated.seed == 3


def test_with_overrides_validates(monkeypatch: pytest.MonkeyPatch) -> None:
    _clear(monkeypatch)
    cfg = load_run_config()

    with pytest.raises(ConfigError) as exc:
        with_overrides(cfg, output_format="yaml")

    assert "NR_PROPELINEAR_FORMAT must be one of" in str(exc.value)


def test_tier_allows_orders_tiers(monkeypatch: pytest.MonkeyPatch) -> None:
    _clear(monkeypatch)
    cfg = with_overrides(load_run_config(), tier="medium")

    assert tier_allows(cfg, "fast")
    assert tier_allows(cfg, "medium")
    assert not tier_allows(cfg, "long")
    with pytest.raises(ConfigError) as exc:
        tier_allows(cfg, "slow")
    assert "unknown tier: slow" in str(exc.value)


def test_load_env_files_keeps_existing(monkeypatch: pytest.MonkeyPatch, tmp_path: Path) -> None:
    _clear(monkeypatch)
    env = tmp_path / ".env"
    env.write_text(
        "# comment\nexport NR_PROPELINEAR_JOBS=3\nNR_PROPELINEAR_SEED='11'\nnot an assignment\n",
        encoding="utf-8",
    )
    monkeypatch.setenv("NR_PROPELINEAR_SEED", "5")

    load_env_files([tmp_path / "missing.env", env])
    cfg = load_run_config()

    assert cfg.jobs == 3
    assert cfg.seed == 5


def test_load_env_files_override(monkeypatch: pytest.MonkeyPatch, tmp_path: Path) -> None:
    _clear(monkeypatch)
    env = tmp_path / ".env"
    env.write_text('NR_PROPELINEAR_SEED="11"\n', encoding="utf-8")
    monkeypatch.setenv("NR_PROPELINEAR_SEED", "5")

    load_env_files([env], override=True)

    assert load_run_config().seed == 11
