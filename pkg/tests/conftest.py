import sys
from datetime import date
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from epigrowth.ingest import RegisteredPanel


@pytest.fixture
def tiny_panel():
    """Four entities with ragged, hand-written log series."""
    series = [
        np.array([0.0, 1.0, 3.0, 6.0]),
        np.array([1.0, 2.0, 2.0]),
        np.array([0.0, 1.0, 2.0, 3.0, 4.0]),
        np.array([2.0, 1.0, 0.0]),
    ]
    return RegisteredPanel(["a", "b", "c", "d"], series,
                           [date(2020, 3, 1)] * 4, threshold=1, min_length=3)


def random_ragged_panel(rng: np.random.Generator, n: int,
                        t_lo: int = 5, t_hi: int = 25) -> RegisteredPanel:
    series = [np.cumsum(rng.standard_normal(int(rng.integers(t_lo, t_hi))))
              for _ in range(n)]
    return RegisteredPanel([f"e{i:03d}" for i in range(n)], series,
                           [date(2020, 3, 1)] * n, threshold=1, min_length=2)


def write_lines(path: Path, text: str) -> Path:
    path.write_text(text.strip() + "\n", encoding="utf-8")
    return path
