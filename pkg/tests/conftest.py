import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from dhat.precubical import (  # noqa: E402
    PrecubicalSet,
    graph_complex,
    grid,
    path_complex,
)

FIXTURES = Path(__file__).parent / "fixtures"


def whisker(K: PrecubicalSet, at: str, name: str = "w") -> PrecubicalSet:
    """Attach a fresh edge leaving vertex ``at``."""
    d = K.to_dict()
    d["dims"]["0"].append(name + "v")
    d["dims"].setdefault("1", []).append(name)
    d["faces"] += [
        {"cube": name, "i": 1, "sign": "-", "target": at},
        {"cube": name, "i": 1, "sign": "+", "target": name + "v"},
    ]
    return PrecubicalSet.from_dict(d)


def invariance_corpus() -> dict:
    """Small complexes that all have at least one free edge."""
    return {
        "edge": path_complex(1),
        "path2": path_complex(2),
        "path3": path_complex(3),
        "vee": graph_complex({"a": ("u", "v"), "b": ("u", "w")}),
        "caret": graph_complex({"a": ("v", "u"), "b": ("w", "u")}),
        "diamond": graph_complex({"a": ("u", "v"), "b": ("u", "w"), "c": ("v", "x"), "d": ("w", "x")}),
        "fork3": graph_complex({"a": ("u", "v"), "b": ("u", "w"), "c": ("u", "x")}),
        "zigzag": graph_complex({"a": ("u", "v"), "b": ("w", "v"), "c": ("w", "x")}),
        "hollow": grid([1, 1], [(0, 0)]),
        "square_whisker": whisker(grid([1, 1]), "(1,1)"),
        "square_tail": whisker(grid([1, 1]), "(0,0)"),
        "annulus": grid([2, 2], [(1, 1)]),
    }


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
