"""Simple random variables on ([0, 1), Lebesgue) and their distributions."""

from __future__ import annotations

import bisect
import enum
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .events import Event, Interval, sort_by_lo, tiles_unit_interval
from .scalar import ONE, ZERO, Scalar, ScalarLike


def as_outcome(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, str)):
        try:
            return Fraction(value)
        except ValueError:
            raise ValueError(f"malformed outcome {value!r}") from None
    if isinstance(value, Scalar):
        return value.to_fraction()
    raise TypeError(f"outcomes must be rational, got {value!r}")


@dataclass(frozen=True)
class OutcomeBounds:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lo", as_outcome(self.lo))
        object.__setattr__(self, "hi", as_outcome(self.hi))
        if not self.lo < self.hi:
            raise ValueError(f"outcome bounds need lo < hi, got [{self.lo}, {self.hi}]")

    def __contains__(self, x: Fraction) -> bool:
        return self.lo <= x <= self.hi

    def intersection(self, other: OutcomeBounds) -> OutcomeBounds:
        return OutcomeBounds(max(self.lo, other.lo), min(self.hi, other.hi))

    def to_json(self) -> dict:
        return {"lo": str(self.lo), "hi": str(self.hi)}

    @classmethod
    def from_json(cls, data: dict) -> OutcomeBounds:
        return cls(as_outcome(data["lo"]), as_outcome(data["hi"]))


class SimpleRV:
    """A finite partition of [0, 1) into events, each mapped to a rational outcome."""

    __slots__ = ("cells", "bounds", "_index")

    def __init__(self, cells: Iterable[tuple[Event, object]], bounds: OutcomeBounds | None = None, *, check: bool = True):
        self.cells: tuple[tuple[Event, Fraction], ...] = tuple((e, as_outcome(x)) for e, x in cells)
        if bounds is None:
            values = [x for _, x in self.cells]
            lo, hi = min(values), max(values)
            bounds = OutcomeBounds(lo, hi if hi > lo else lo + 1)
        self.bounds = bounds
        self._index = None
        if check:
            self._validate()

    def _validate(self) -> None:
        if not self.cells:
            raise ValueError("a random variable needs at least one cell")
        for e, x in self.cells:
            if e.measure.sign() <= 0:
                raise ValueError(f"cell {e!r} has zero measure")
            if x not in self.bounds:
                raise ValueError(f"outcome {x} outside bounds [{self.bounds.lo}, {self.bounds.hi}]")
        if not tiles_unit_interval(e for e, _ in self.cells):
            raise ValueError("cells do not partition [0, 1)")

    @classmethod
    def from_intervals(cls, pairs: Sequence[tuple[ScalarLike, ScalarLike, object]], bounds: OutcomeBounds | None = None) -> SimpleRV:
        """Build from ``(lo, hi, outcome)`` triples, one interval per cell."""
        return cls([(Event.interval(lo, hi), x) for lo, hi, x in pairs], bounds)

    def __len__(self) -> int:
        return len(self.cells)

    def __repr__(self) -> str:
        body = "; ".join(f"{x} on {e!r}" for e, x in self.cells)
        return f"SimpleRV({body})"

    @property
    def outcomes(self) -> tuple[Fraction, ...]:
        return tuple(x for _, x in self.cells)

    def with_bounds(self, bounds: OutcomeBounds) -> SimpleRV:
        return SimpleRV(self.cells, bounds)

    def canonical(self) -> SimpleRV:
        """Merge cells with equal outcomes; cells ordered by outcome."""
        # group by identity first: large partitions reuse a few outcome objects
        by_id: dict[int, tuple[Fraction, list[Interval]]] = {}
        for e, x in self.cells:
            by_id.setdefault(id(x), (x, []))[1].extend(e.intervals)
        groups: dict[Fraction, list[Interval]] = defaultdict(list)
        for x, ivs in by_id.values():
            groups[x].extend(ivs)
        cells = [(Event.from_valid(groups[x]), x) for x in sorted(groups)]
        return SimpleRV(cells, self.bounds, check=False)

    @property
    def is_canonical(self) -> bool:
        xs = self.outcomes
        return all(xs[i] < xs[i + 1] for i in range(len(xs) - 1))

    def _intervals(self) -> tuple[list[Scalar], list[Interval], list[Fraction], list[float]]:
        if self._index is None:
            flat = sort_by_lo([(iv, x) for e, x in self.cells for iv in e.intervals], key=lambda p: p[0].lo)
            los = [iv.lo for iv, _ in flat]
            self._index = (los, [iv for iv, _ in flat], [x for _, x in flat], [float(v) for v in los])
        return self._index

    def _locate(self, t: Scalar) -> int:
        """Index of the last interval starting at or before t (-1 if none)."""
        los, _, _, approx = self._intervals()
        # float bisect lands next to the answer; exact comparisons settle it
        pos = bisect.bisect_right(approx, float(t)) - 1
        while pos + 1 < len(los) and los[pos + 1] <= t:
            pos += 1
        while pos >= 0 and los[pos] > t:
            pos -= 1
        return pos

    def value_at(self, t: ScalarLike) -> Fraction:
        xs = self._intervals()[2]
        pos = self._locate(Scalar.coerce(t))
        if pos < 0:
            raise ValueError(f"point {t} outside [0, 1)")
        return xs[pos]

    def value_on(self, event: Event) -> Fraction | None:
        """The outcome taken on all of ``event``, or None if it is not constant."""
        _, ivs, xs, _ = self._intervals()
        found = None
        for lo, hi in event.intervals:
            pos = self._locate(lo)
            while True:
                if pos < 0 or pos >= len(ivs):
                    return None
                if found is None:
                    found = xs[pos]
                elif xs[pos] != found:
                    return None
                if ivs[pos].hi >= hi:
                    break
                pos += 1
        return found

    def to_json(self) -> dict:
        return {
            "bounds": self.bounds.to_json(),
            "cells": [{"event": e.to_json(), "outcome": str(x)} for e, x in self.cells],
        }

    @classmethod
    def from_json(cls, data: dict) -> SimpleRV:
        try:
            bounds = OutcomeBounds.from_json(data["bounds"]) if "bounds" in data else None
            cells = [(Event.from_json(c["event"]), as_outcome(c["outcome"])) for c in data["cells"]]
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed random variable: {exc!r}") from None
        return cls(cells, bounds)


@dataclass(frozen=True)
class Distribution:
    atoms: tuple[tuple[Fraction, Scalar], ...]

    def __post_init__(self):
        atoms = tuple((as_outcome(x), Scalar.coerce(p)) for x, p in self.atoms)
        object.__setattr__(self, "atoms", atoms)
        if not atoms:
            raise ValueError("a distribution needs at least one atom")
        for i, (x, p) in enumerate(atoms):
            if p.sign() <= 0:
                raise ValueError(f"atom {x} has non-positive mass {p}")
            if i and not atoms[i - 1][0] < x:
                raise ValueError("distribution outcomes must be strictly increasing")
        total = sum((p for _, p in atoms), ZERO)
        if total != ONE:
            raise ValueError(f"distribution masses sum to {total}, not 1")

    @classmethod
    def from_masses(cls, masses: dict) -> Distribution:
        merged: dict[Fraction, Scalar] = defaultdict(lambda: ZERO)
        for x, p in masses.items():
            merged[as_outcome(x)] = merged[as_outcome(x)] + Scalar.coerce(p)
        return cls(tuple((x, merged[x]) for x in sorted(merged) if merged[x]))

    @property
    def outcomes(self) -> tuple[Fraction, ...]:
        return tuple(x for x, _ in self.atoms)

    def mass(self, x) -> Scalar:
        x = as_outcome(x)
        for y, p in self.atoms:
            if y == x:
                return p
        return ZERO

    def cdf(self, t) -> Scalar:
        total = ZERO
        for x, p in self.atoms:
            if x > t:
                break
            total = total + p
        return total

    def to_json(self) -> dict:
        return {"atoms": [{"outcome": str(x), "mass": str(p)} for x, p in self.atoms]}

    @classmethod
    def from_json(cls, data: dict) -> Distribution:
        try:
            return cls(tuple((c["outcome"], Scalar.coerce(c["mass"])) for c in data["atoms"]))
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed distribution: {exc!r}") from None


@dataclass(frozen=True)
class RefinementCell:
    event: Event
    x_val: Fraction
    y_val: Fraction

    @property
    def measure(self) -> Scalar:
        return self.event.measure


def distribution(x: SimpleRV) -> Distribution:
    masses: dict[Fraction, Scalar] = defaultdict(lambda: ZERO)
    for e, v in x.cells:
        masses[v] = masses[v] + e.measure
    return Distribution(tuple((v, masses[v]) for v in sorted(masses) if masses[v]))


def equal_in_distribution(x: SimpleRV, y: SimpleRV) -> bool:
    return distribution(x) == distribution(y)


def first_mismatch(f: Distribution, g: Distribution) -> tuple[Fraction, Scalar, Scalar] | None:
    """First outcome (in increasing order) whose masses under f and g differ."""
    for v in sorted(set(f.outcomes) | set(g.outcomes)):
        pf, pg = f.mass(v), g.mass(v)
        if pf != pg:
            return v, pf, pg
    return None


class Dominance(str, enum.Enum):
    STRICT_DOM = "STRICT_DOM"
    EQUAL = "EQUAL"
    DOMINATED = "DOMINATED"
    INCOMPARABLE = "INCOMPARABLE"


def fosd_compare_distributions(f: Distribution, g: Distribution) -> Dominance:
    le = ge = True
    for t in sorted(set(f.outcomes) | set(g.outcomes)):
        c = f.cdf(t).compare(g.cdf(t))
        if c > 0:
            le = False
        elif c < 0:
            ge = False
    if le and ge:
        return Dominance.EQUAL
    if le:
        return Dominance.STRICT_DOM
    if ge:
        return Dominance.DOMINATED
    return Dominance.INCOMPARABLE


def fosd_compare(x: SimpleRV, y: SimpleRV) -> Dominance:
    """Whether x's distribution first-order stochastically dominates y's."""
    return fosd_compare_distributions(distribution(x), distribution(y))


def common_refinement(x: SimpleRV, y: SimpleRV) -> list[RefinementCell]:
    """Non-null intersections of x's and y's cells, ordered by left endpoint."""
    xs = sort_by_lo([(iv, i) for i, (e, _) in enumerate(x.cells) for iv in e.intervals], key=lambda p: p[0].lo)
    ys = sort_by_lo([(iv, j) for j, (e, _) in enumerate(y.cells) for iv in e.intervals], key=lambda p: p[0].lo)
    pieces: dict[tuple[int, int], list[Interval]] = {}
    a = b = 0
    while a < len(xs) and b < len(ys):
        (xiv, i), (yiv, j) = xs[a], ys[b]
        lo = xiv.lo if xiv.lo >= yiv.lo else yiv.lo
        c = xiv.hi.compare(yiv.hi)
        hi = xiv.hi if c <= 0 else yiv.hi
        if lo < hi:
            run = pieces.setdefault((i, j), [])
            if run and run[-1].hi == lo:
                run[-1] = Interval(run[-1].lo, hi)
            else:
                run.append(Interval(lo, hi))
        if c <= 0:
            a += 1
        if c >= 0:
            b += 1
    return [
        RefinementCell(Event(ivs, _canonical=True), x.cells[i][1], y.cells[j][1])
        for (i, j), ivs in pieces.items()
    ]


def prob_diff_exceeds(x: SimpleRV, y: SimpleRV, eps) -> Scalar:
    """Exact measure of {|x - y| >= eps}."""
    eps = as_outcome(eps)
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    total = ZERO
    for cell in common_refinement(x, y):
        if abs(cell.x_val - cell.y_val) >= eps:
            total = total + cell.measure
    return total


def _levy_ok(f: Distribution, g: Distribution, h: Scalar) -> bool:
    # both CDFs are right-continuous steps, so checking at jump points suffices
    for t in g.outcomes:
        if g.cdf(t) > f.cdf(t + h) + h:
            return False
    for s in f.outcomes:
        if f.cdf(s) > g.cdf(s + h) + h:
            return False
    return True


def levy_distance(f: Distribution, g: Distribution) -> Scalar:
    """Lévy distance between two finite-support CDFs, computed exactly.

    The smallest admissible h is always tight at one of finitely many
    candidates: an outcome gap a - b, or a gap between CDF levels of f and g.
    Admissibility is monotone in h, so a binary search over the sorted
    candidates finds it.
    """
    if f == g:
        return ZERO
    cands: set[Scalar] = {ONE}
    for a in f.outcomes:
        for b in g.outcomes:
            if a != b:
                cands.add(Scalar(abs(a - b)))
    f_levels = [ZERO] + [f.cdf(x) for x in f.outcomes]
    g_levels = [ZERO] + [g.cdf(x) for x in g.outcomes]
    for p in f_levels:
        for q in g_levels:
            d = abs(p - q)
            if d.sign() > 0:
                cands.add(d)
    ordered = sorted(c for c in cands if c <= ONE)
    lo, hi = 0, len(ordered) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if _levy_ok(f, g, ordered[mid]):
            hi = mid
        else:
            lo = mid + 1
    return ordered[lo]


def quantile_rv(f: Distribution, bounds: OutcomeBounds | None = None) -> SimpleRV:
    """The nondecreasing step function on [0, 1) with distribution f."""
    cells = []
    left = ZERO
    for i, (x, p) in enumerate(f.atoms):
        right = ONE if i == len(f.atoms) - 1 else left + p
        cells.append((Event([Interval(left, right)], _canonical=True), x))
        left = right
    return SimpleRV(cells, bounds, check=False)
