"""Seeded generators of random-variable pairs for tests and the ``gen`` subcommand."""

from __future__ import annotations

import math
import random
from fractions import Fraction

from .certificates import Case, classify_case
from .events import Event
from .rv import OutcomeBounds, SimpleRV, common_refinement, distribution, quantile_rv
from .scalar import ONE, SQRT2, ZERO, Scalar

BOUNDS = OutcomeBounds(0, 100)
FIVE_VALUES = (Fraction(0), Fraction(25), Fraction(50), Fraction(75), Fraction(100))


def _slots_rv(labels: list[Fraction], bounds: OutcomeBounds) -> SimpleRV:
    """Outcome labels[i] on [i/D, (i+1)/D); equal labels share one cell."""
    d = len(labels)
    groups: dict[Fraction, list] = {}
    for i, v in enumerate(labels):
        groups.setdefault(v, []).append((Fraction(i, d), Fraction(i + 1, d)))
    return SimpleRV([(Event(ivs), v) for v, ivs in groups.items()], bounds)


def case1_pair(rng: random.Random, max_cells: int = 8, values=FIVE_VALUES) -> tuple[SimpleRV, SimpleRV]:
    """Equiprobable cells, y a random permutation of x's cell values."""
    n = rng.randint(1, max_cells)
    xs = [rng.choice(values) for _ in range(n)]
    ys = xs[:]
    rng.shuffle(ys)
    cells = [Event.interval(Fraction(i, n), Fraction(i + 1, n)) for i in range(n)]
    return SimpleRV(zip(cells, xs), BOUNDS), SimpleRV(zip(cells, ys), BOUNDS)


def rational_pair(rng: random.Random, max_outcomes: int = 5, max_den: int = 12) -> tuple[SimpleRV, SimpleRV]:
    """Equal distributions with masses of denominator <= max_den, laid out differently."""
    d = rng.randint(1, max_den)
    n = rng.randint(1, min(max_outcomes, d))
    cuts = sorted(rng.sample(range(1, d), n - 1))
    sizes = [b - a for a, b in zip([0] + cuts, cuts + [d])]
    outcomes = [Fraction(v) for v in rng.sample(range(0, 101), n)]
    labels = [v for v, s in zip(outcomes, sizes) for _ in range(s)]
    blocks = list(zip(outcomes, sizes))
    rng.shuffle(blocks)
    x_labels = [v for v, s in blocks for _ in range(s)]
    y_labels = labels[:]
    rng.shuffle(y_labels)
    return _slots_rv(x_labels, BOUNDS), _slots_rv(y_labels, BOUNDS)


def _surd_point(rng: random.Random, lo: float, hi: float) -> Scalar:
    """A point of Q(sqrt2) \\ Q, roughly uniform in (lo, hi)."""
    s = Fraction(rng.choice([-1, 1]), rng.randint(2, 7))
    target = rng.uniform(lo, hi)
    q = Fraction(round((target - float(s) * math.sqrt(2)) * 64), 64)
    return Scalar(q, s)


def surd_pair(rng: random.Random, min_cell: Fraction = Fraction(1, 8)) -> tuple[SimpleRV, SimpleRV]:
    """Equal distributions whose partitions meet in at least one irrational cell.

    x lays its outcome blocks out left to right; y uses another order of the
    same blocks.  Pairs whose intersections include a cell lighter than
    ``min_cell`` are rejected, which keeps the dyadic window small.
    """
    while True:
        n = rng.choice([2, 2, 3])
        cuts = sorted(_surd_point(rng, 0.1, 0.9) for _ in range(n - 1))
        edges = [ZERO] + cuts + [ONE]
        masses = [b - a for a, b in zip(edges, edges[1:])]
        if any(m.sign() <= 0 for m in masses):
            continue
        outcomes = [Fraction(v) for v in sorted(rng.sample(range(0, 101), n))]
        order = list(range(n))
        while order == list(range(n)):
            rng.shuffle(order)
        x = SimpleRV([(Event.interval(edges[i], edges[i + 1]), outcomes[i]) for i in range(n)], BOUNDS)
        left, cells = ZERO, []
        for i in order:
            cells.append((Event.interval(left, left + masses[i]), outcomes[i]))
            left = left + masses[i]
        y = SimpleRV(cells, BOUNDS)
        if classify_case(x, y) is not Case.CASE3:
            continue
        if min(c.measure for c in common_refinement(x, y)) <= Scalar(min_cell):
            continue
        return x, y


def strict_fosd_pair(rng: random.Random) -> tuple[SimpleRV, SimpleRV]:
    """x strictly dominates y: a state-wise improvement of y, then rearranged."""
    d = rng.randint(2, 12)
    n = rng.randint(2, min(5, d))
    cuts = sorted(rng.sample(range(1, d), n - 1))
    edges = [Fraction(c, d) for c in [0] + cuts + [d]]
    cells = [Event.interval(a, b) for a, b in zip(edges, edges[1:])]
    ys = [Fraction(rng.randint(0, 90)) for _ in range(n)]
    bumps = [rng.randint(0, 10) for _ in range(n)]
    if not any(bumps):
        bumps[rng.randrange(n)] = rng.randint(1, 10)
    xs = [v + b for v, b in zip(ys, bumps)]
    y = SimpleRV(zip(cells, ys), BOUNDS)
    improved = SimpleRV(zip(cells, xs), BOUNDS)
    x = quantile_rv(distribution(improved), BOUNDS)
    return x, y


def shared_partition_pair(rng: random.Random) -> tuple[SimpleRV, SimpleRV]:
    """x >= y cell by cell on one partition, strictly on at least one cell."""
    d = rng.randint(1, 10)
    cells = [Event.interval(Fraction(i, d), Fraction(i + 1, d)) for i in range(d)]
    ys = [Fraction(rng.randint(0, 95)) for _ in range(d)]
    xs = [v + rng.randint(0, 5) for v in ys]
    k = rng.randrange(d)
    if xs[k] == ys[k]:
        xs[k] += 1
    return SimpleRV(zip(cells, xs), BOUNDS), SimpleRV(zip(cells, ys), BOUNDS)


def e3_pair() -> tuple[SimpleRV, SimpleRV]:
    """10 on [0, sqrt2/2), 20 after it; versus 20 on [0, 1 - sqrt2/2), 10 after it."""
    h = SQRT2 / 2
    x = SimpleRV.from_intervals([(0, h, 10), (h, 1, 20)], BOUNDS)
    y = SimpleRV.from_intervals([(0, 1 - h, 20), (1 - h, 1, 10)], BOUNDS)
    return x, y


def flip_pair() -> tuple[SimpleRV, SimpleRV]:
    """A pair whose dyadic construction needs balancing flips already at k = 4.

    The cross cells carry a 3-cycle of mass sqrt2/10 (10->20->30->10) laid
    over a 2-cycle of mass 7/40 (10<->20).  Cutting the (10, 20) cell alone
    gives one more full 1/16 cell than cutting its two summands separately,
    so P(X^4 = 10) and P(Y^4 = 10) differ.
    """
    t, s = SQRT2 / 10, Scalar(Fraction(7, 40))
    layout = [(t + s, 10, 20), (s, 20, 10), (t, 20, 30), (t, 30, 10), (Scalar(Fraction(1, 10)), 10, 10)]
    layout.append((ONE - sum((m for m, _, _ in layout), ZERO), 20, 20))
    left, xs, ys = ZERO, [], []
    for mass, a, b in layout:
        xs.append((left, left + mass, a))
        ys.append((left, left + mass, b))
        left = left + mass
    return SimpleRV.from_intervals(xs, BOUNDS), SimpleRV.from_intervals(ys, BOUNDS)


GENERATORS = {
    "case1": case1_pair,
    "case2": rational_pair,
    "case3": surd_pair,
    "fosd": strict_fosd_pair,
}
