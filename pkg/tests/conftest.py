import math
import random

import pytest

from linkform.pairing import BlockSum, GeneratorBlock
from linkform.seifert import SeifertPresentation, scalar_invariants

ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def random_presentation(rng: random.Random, max_fibers=5, twos=(1, 2, 4, 8, 16),
                        odd=(1, 3, 5, 7, 9)) -> SeifertPresentation:
    """A rational homology sphere with fiber orders (power of 2) * (odd part)."""
    while True:
        fibers = []
        for _ in range(rng.randint(2, max_fibers)):
            a = max(2, rng.choice(twos) * rng.choice(odd))
            b = rng.choice([b for b in range(-a, 2 * a) if math.gcd(a, b) == 1])
            fibers.append((a, b))
        P = SeifertPresentation(rng.randint(-3, 3), tuple(fibers))
        if scalar_invariants(P).AeC:
            return P


def random_blocksum(rng: random.Random, max_rank=4, kmax=3) -> BlockSum:
    """Generator sums whose group has at most ``max_rank`` cyclic factors."""
    blocks, rank = [], 0
    target = rng.randint(1, max_rank)
    while rank < target:
        k = rng.randint(1, kmax)
        kind = rng.choice(["A", "E0", "E1"] if target - rank >= 2 else ["A"])
        if kind == "A":
            blocks.append(GeneratorBlock("A", k, rng.choice([1, 3, 5, 7])))
            rank += 1
        else:
            blocks.append(GeneratorBlock(kind, k))
            rank += 2
    return BlockSum(tuple(blocks))


@pytest.fixture
def rng():
    return random.Random(20261019)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, note = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {note}")
