"""Events on [0, 1): canonical finite unions of half-open intervals."""

from __future__ import annotations

from typing import Iterable, NamedTuple, Sequence

from .scalar import ONE, ZERO, Scalar, ScalarLike


class Interval(NamedTuple):
    """The half-open interval [lo, hi)."""

    lo: Scalar
    hi: Scalar

    @property
    def length(self) -> Scalar:
        return self.hi - self.lo

    @property
    def empty(self) -> bool:
        return self.lo == self.hi


def _merge_sorted(intervals: Iterable[Interval]) -> tuple[Interval, ...]:
    out: list[Interval] = []
    for iv in intervals:
        if iv.lo >= iv.hi:
            continue
        if out and iv.lo <= out[-1].hi:
            last = out[-1]
            if iv.hi > last.hi:
                out[-1] = Interval(last.lo, iv.hi)
            continue
        out.append(iv)
    return tuple(out)


def sort_by_lo(items: list, key=lambda iv: iv.lo) -> list:
    """Sort in place by an exact Scalar key, using floats first and checking the result."""
    items.sort(key=lambda it: float(key(it)))
    if any(key(items[i]) > key(items[i + 1]) for i in range(len(items) - 1)):
        items.sort(key=key)
    return items


class Event:
    """A subset of [0, 1) held as sorted, disjoint, non-adjacent intervals."""

    __slots__ = ("intervals", "_measure")

    def __init__(self, intervals: Iterable[Interval | Sequence[ScalarLike]] = (), *, _canonical: bool = False):
        if _canonical:
            self.intervals = tuple(intervals)
        else:
            ivs = []
            for iv in intervals:
                lo, hi = Scalar.coerce(iv[0]), Scalar.coerce(iv[1])
                if lo < ZERO or hi > ONE or lo > hi:
                    raise ValueError(f"interval [{lo}, {hi}) is not inside [0, 1)")
                ivs.append(Interval(lo, hi))
            self.intervals = _merge_sorted(sort_by_lo(ivs))
        self._measure = None

    @classmethod
    def from_valid(cls, intervals: Iterable[Interval]) -> Event:
        """Build from intervals already known to lie in [0, 1) with lo < hi, in any order."""
        runs: list[Interval] = []
        for iv in intervals:
            if runs and (runs[-1].hi is iv.lo or runs[-1].hi == iv.lo):
                runs[-1] = Interval(runs[-1].lo, iv.hi)
            else:
                runs.append(iv)
        return cls(_merge_sorted(sort_by_lo(runs)), _canonical=True)

    @classmethod
    def interval(cls, lo: ScalarLike, hi: ScalarLike) -> Event:
        return cls([(lo, hi)])

    @classmethod
    def full(cls) -> Event:
        return cls([Interval(ZERO, ONE)], _canonical=True)

    @property
    def measure(self) -> Scalar:
        if self._measure is None:
            total = ZERO
            for lo, hi in self.intervals:
                total = total + (hi - lo)
            self._measure = total
        return self._measure

    @property
    def is_empty(self) -> bool:
        return not self.intervals

    def __bool__(self) -> bool:
        return bool(self.intervals)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Event):
            return NotImplemented
        return self.intervals == other.intervals

    def __hash__(self) -> int:
        return hash(self.intervals)

    def __repr__(self) -> str:
        if not self.intervals:
            return "Event(empty)"
        return "Event(" + " u ".join(f"[{lo}, {hi})" for lo, hi in self.intervals) + ")"

    def __and__(self, other: Event) -> Event:
        return intersect(self, other)

    def __or__(self, other: Event) -> Event:
        return union(self, other)

    def contains_point(self, t: ScalarLike) -> bool:
        t = Scalar.coerce(t)
        return any(lo <= t < hi for lo, hi in self.intervals)

    def issubset(self, other: Event) -> bool:
        return intersect(self, other) == self

    def to_json(self) -> list[list[str]]:
        return [[str(lo), str(hi)] for lo, hi in self.intervals]

    @classmethod
    def from_json(cls, data: Sequence[Sequence[str]]) -> Event:
        try:
            pairs = [(Scalar.coerce(lo), Scalar.coerce(hi)) for lo, hi in data]
        except (TypeError, ValueError) as exc:
            raise ValueError(f"malformed event {data!r}: {exc}") from None
        return cls(pairs)


EMPTY = Event((), _canonical=True)


def intersect(a: Event, b: Event) -> Event:
    out: list[Interval] = []
    i = j = 0
    xs, ys = a.intervals, b.intervals
    while i < len(xs) and j < len(ys):
        lo = max(xs[i].lo, ys[j].lo)
        hi = min(xs[i].hi, ys[j].hi)
        if lo < hi:
            out.append(Interval(lo, hi))
        if xs[i].hi < ys[j].hi:
            i += 1
        else:
            j += 1
    # pieces of canonical inputs are never adjacent to each other
    return Event(out, _canonical=True)


def union(a: Event, b: Event) -> Event:
    return Event(_merge_sorted(sort_by_lo(list(a.intervals + b.intervals))), _canonical=True)


def complement(a: Event) -> Event:
    out: list[Interval] = []
    cursor = ZERO
    for lo, hi in a.intervals:
        if cursor < lo:
            out.append(Interval(cursor, lo))
        cursor = hi
    if cursor < ONE:
        out.append(Interval(cursor, ONE))
    return Event(out, _canonical=True)


def measure(a: Event) -> Scalar:
    return a.measure


def split_prefix(e: Event, t: ScalarLike) -> tuple[Event, Event]:
    """Split ``e`` into its leftmost part of measure exactly ``t`` and the rest."""
    t = Scalar.coerce(t)
    if t < ZERO or t > e.measure:
        raise ValueError(f"split mass {t} outside [0, {e.measure}]")
    head: list[Interval] = []
    remaining = t
    ivs = e.intervals
    for idx, iv in enumerate(ivs):
        if not remaining:
            return Event(head, _canonical=True), Event(ivs[idx:], _canonical=True)
        length = iv.hi - iv.lo
        if length <= remaining:
            head.append(iv)
            remaining = remaining - length
            continue
        cut = iv.lo + remaining
        head.append(Interval(iv.lo, cut))
        return Event(head, _canonical=True), Event((Interval(cut, iv.hi),) + ivs[idx + 1:], _canonical=True)
    return Event(head, _canonical=True), EMPTY


def carve(e: Event, piece: ScalarLike, count: int) -> tuple[list[Event], Event]:
    """Cut ``count`` consecutive leftmost pieces of measure ``piece`` from ``e``.

    Same result as ``count`` successive :func:`split_prefix` calls, walked
    in one pass.
    """
    piece = Scalar.coerce(piece)
    if piece.sign() <= 0:
        raise ValueError("piece measure must be positive")
    if piece * count > e.measure:
        raise ValueError(f"cannot carve {count} pieces of {piece} from mass {e.measure}")
    pieces: list[Event] = []
    head: list[Interval] = []
    need = piece
    ivs = e.intervals
    for idx, (lo, hi) in enumerate(ivs):
        if len(pieces) == count:
            return pieces, Event(ivs[idx:], _canonical=True)
        length = hi - lo
        if length < need:
            head.append(Interval(lo, hi))
            need = need - length
            continue
        # close the piece in progress, then cut whole pieces straight off this interval
        cut = lo + need
        head.append(Interval(lo, cut))
        pieces.append(Event(head, _canonical=True))
        head, need = [], piece
        fit = min(count - len(pieces), ((hi - cut) / piece).floor())
        for _ in range(fit):
            nxt = cut + piece
            pieces.append(Event((Interval(cut, nxt),), _canonical=True))
            cut = nxt
        if len(pieces) == count:
            rest = ((Interval(cut, hi),) if cut < hi else ()) + ivs[idx + 1:]
            return pieces, Event(rest, _canonical=True)
        if cut < hi:
            head.append(Interval(cut, hi))
            need = piece - (hi - cut)
    return pieces, Event(head, _canonical=True)


def tiles_unit_interval(events: Iterable[Event]) -> bool:
    """True iff the events are pairwise disjoint and cover [0, 1) exactly."""
    ivs = [iv for e in events for iv in e.intervals]
    if any(iv.lo >= iv.hi for iv in ivs):
        return False
    ivs.sort(key=lambda iv: float(iv.lo))
    if not _contiguous(ivs):
        # float keys can misorder nearly-equal endpoints; retry exactly
        ivs.sort(key=lambda iv: iv.lo)
        return _contiguous(ivs)
    return True


def _contiguous(ivs: list[Interval]) -> bool:
    if not ivs or ivs[0].lo != ZERO or ivs[-1].hi != ONE:
        return False
    return all(ivs[i].hi == ivs[i + 1].lo for i in range(len(ivs) - 1))
