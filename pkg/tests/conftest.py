import os
import random
import sys
from pathlib import Path

import pytest

PROJECT_ROOT = Path(__file__).resolve().parent.parent
if str(PROJECT_ROOT) not in sys.path:
    sys.path.insert(0, str(PROJECT_ROOT))

from seifert_obstruct.exactalg import IntMatrix  # noqa: E402
from seifert_obstruct.links import catalog  # noqa: E402
from seifert_obstruct.manifold import (  # noqa: E402
    SurgeryPresentation,
    descriptor_from_seifert,
    descriptor_from_surgery,
    s1xs2_descriptor,
    sphere_descriptor,
)
from seifert_obstruct.seifert import parse_seifert  # noqa: E402

SEED_ENV = "SEIFERT_OBSTRUCT_SEED"


@pytest.fixture
def rng() -> random.Random:
    return random.Random(int(os.getenv(SEED_ENV, "20240501")))


@pytest.fixture
def unimodular(rng):
    """Random integer matrices of determinant +-1, built from elementary operations."""

    def build(n: int, steps: int = 12) -> IntMatrix:
        rows = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
        for _ in range(steps):
            i = rng.randrange(n)
            move = rng.random()
            if move < 0.15:
                rows[i] = [-v for v in rows[i]]
            elif n > 1:
                j = rng.choice([t for t in range(n) if t != i])
                if move < 0.3:
                    rows[i], rows[j] = rows[j], rows[i]
                else:
                    c = rng.choice([-2, -1, 1, 2])
                    rows[i] = [a + c * b for a, b in zip(rows[i], rows[j])]
        return IntMatrix.from_rows(rows, n)

    return build


@pytest.fixture(scope="session")
def descriptor_pool():
    """Descriptors without 2-torsion, covering every origin and both cup form rings."""
    return {
        "S3": sphere_descriptor(),
        "S1xS2": s1xs2_descriptor(),
        "poincare": descriptor_from_seifert(parse_seifert("(+0|2/1,3/1,5/1)")),
        "L(5,1)": descriptor_from_seifert(parse_seifert("(+0|1/5)")),
        "L(7,1)": descriptor_from_surgery(SurgeryPresentation(IntMatrix.from_rows([[7]]))),
        "T3": descriptor_from_surgery(SurgeryPresentation.from_link(catalog("borromean"))),
        "borromean_3": descriptor_from_surgery(SurgeryPresentation.from_link(catalog("borromean_framed", {"p": 3}))),
    }
