import os
import sys
from pathlib import Path

import pytest

_SRC = Path(__file__).resolve().parents[1] / "src"
if str(_SRC) not in sys.path:
    sys.path.insert(0, str(_SRC))

_TIER_RANK = {"fast": 0, "medium": 1, "long": 2}


def pytest_configure(config: pytest.Config) -> None:
    config.addinivalue_line("markers", "medium: needs NR_PROPELINEAR_TIER=medium or long")
    config.addinivalue_line("markers", "long: needs NR_PROPELINEAR_TIER=long")


def pytest_collection_modifyitems(config: pytest.Config, items: list[pytest.Item]) -> None:
    tier = os.getenv("NR_PROPELINEAR_TIER", "medium").strip().lower()
    allowed = _TIER_RANK.get(tier, 1)
    for item in items:
        for name, rank in (("medium", 1), ("long", 2)):
            if name in item.keywords and rank > allowed:
                item.add_marker(pytest.mark.skip(reason=f"needs NR_PROPELINEAR_TIER={name}"))
