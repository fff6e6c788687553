"""Machine-checkable witnesses that two equally distributed variables are indifferent.

Three constructions, by how the two partitions relate:

* permutation chain: both variables live on the same N equiprobable cells and
  one is a relabelling of the other, ``y_values[i] == x_values[pi_hat[i]]``;
* refinement: every intersection of the two partitions has rational measure,
  so cutting each into 1/N pieces reduces to a permutation chain;
* dyadic: some intersection is irrational.  For each k the intersections are
  cut into cells of measure 1/2^k plus one small remainder each; remainders
  and a few balancing cells are sent to a sentinel outcome, giving a pair
  with equal dyadic distributions that is certified by refinement and that
  differs from the inputs on a set of measure at most m^2/2^k.
"""

from __future__ import annotations

import enum
import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence, Union

from .events import Event, carve, tiles_unit_interval
from .rv import (
    Distribution,
    OutcomeBounds,
    RefinementCell,
    SimpleRV,
    as_outcome,
    common_refinement,
    distribution,
    first_mismatch,
)
from .scalar import ONE, ZERO, Scalar, nu

SCHEMA = "probeq.certificate/1"
DEFAULT_K_SPAN = 12


class CertificateError(ValueError):
    pass


class DistributionsDiffer(CertificateError):
    def __init__(self, outcome: Fraction, mass_x: Scalar, mass_y: Scalar):
        self.outcome, self.mass_x, self.mass_y = outcome, mass_x, mass_y
        super().__init__(f"DISTRIBUTIONS_DIFFER: outcome {outcome} has mass {mass_x} under X but {mass_y} under Y")


class Case(str, enum.Enum):
    CASE1 = "CASE1"
    CASE2 = "CASE2"
    CASE3 = "CASE3"


# -- permutations -------------------------------------------------------------

def _encode(*seqs: Sequence) -> tuple[list[list[int]], list]:
    """Replace values by small integer codes shared across the sequences."""
    index: dict = {}
    by_id: dict[int, int] = {}  # long sequences repeat a few objects; skip rehashing them

    def code(v) -> int:
        c = by_id.get(id(v))
        if c is None:
            c = by_id[id(v)] = index.setdefault(v, len(index))
        return c

    coded = [[code(v) for v in seq] for seq in seqs]
    return coded, list(index)


def stable_match(x_values: Sequence, y_values: Sequence) -> list[int]:
    """A permutation pi with ``y_values[i] == x_values[pi[i]]``.

    Cells where x and y already agree are fixed; the remaining cells are
    matched to unused x cells carrying the same outcome in index order.
    """
    n = len(x_values)
    (xs, ys), _ = _encode(x_values, y_values)
    if len(ys) != n or Counter(xs) != Counter(ys):
        raise CertificateError("x and y cell values are not permutations of each other")
    pi = [-1] * n
    free: dict[int, list[int]] = defaultdict(list)
    for i in range(n):
        if xs[i] == ys[i]:
            pi[i] = i
        else:
            free[xs[i]].append(i)
    cursor: Counter = Counter()
    for i in range(n):
        if pi[i] < 0:
            v = ys[i]
            pi[i] = free[v][cursor[v]]
            cursor[v] += 1
    return pi


def is_bijection(pi: Sequence[int]) -> bool:
    return sorted(pi) == list(range(len(pi)))


def cycle_lengths(pi: Sequence[int]) -> list[int]:
    seen = [False] * len(pi)
    lengths = []
    for start in range(len(pi)):
        if seen[start]:
            continue
        n, i = 0, start
        while not seen[i]:
            seen[i] = True
            i = pi[i]
            n += 1
        lengths.append(n)
    return lengths


def permutation_order(pi: Sequence[int]) -> int:
    return math.lcm(*cycle_lengths(pi)) if pi else 1


def _order_within_factorial(order: int, n: int) -> bool:
    if n <= 2000:
        return order <= math.factorial(n)
    # log2(n!) >= n*log2(n/e); only fall back to the exact factorial near the edge
    if order.bit_length() < n * (math.log2(n) - 1.4427) - 1:
        return True
    return order <= math.factorial(n)


def compose_power(pi: Sequence[int], t: int) -> list[int]:
    result = list(range(len(pi)))
    for _ in range(t):
        result = [pi[j] for j in result]
    return result


def step_multiset(x_values: Sequence, pi: Sequence[int], t: int) -> tuple:
    """Canonical multiset {(Z_t(i), Z_{t+1}(i))} for Z_t = pi^t applied to x.

    ``(pi Z)(i) = Z(pi(i))``, so ``Z_t(i) = x[pi^t(i)]``.  Returned as sorted
    ``(value, next_value, count)`` triples; each pair carries mass count/N.
    """
    (xs,), values = _encode(x_values)
    pt = compose_power(pi, t)
    counts = Counter((xs[pt[i]], xs[pi[pt[i]]]) for i in range(len(pi)))
    return tuple(sorted((values[a], values[b], c) for (a, b), c in counts.items()))


# -- certificate types --------------------------------------------------------

@dataclass(frozen=True)
class PermutationChainCertificate:
    cells: tuple[Event, ...]
    x_values: tuple[Fraction, ...]
    y_values: tuple[Fraction, ...]
    pi_hat: tuple[int, ...]
    order_m: int
    step_lottery: tuple[tuple[Fraction, Fraction, int], ...]

    @property
    def n_cells(self) -> int:
        return len(self.cells)


@dataclass(frozen=True)
class RefinementCertificate:
    common_denominator: int
    chain: PermutationChainCertificate

    @property
    def subcells(self) -> tuple[Event, ...]:
        return self.chain.cells


@dataclass(frozen=True)
class DyadicLevel:
    """The construction at one k.  Piece-indexed tuples align with ``pieces``."""

    k: int
    nu: tuple[int, ...]
    pieces: tuple[Event, ...]
    piece_cell: tuple[int, ...]
    piece_full: tuple[bool, ...]
    x_k: tuple[Fraction, ...]
    y_k: tuple[Fraction, ...]
    flips_x: tuple[int, ...]
    flips_y: tuple[int, ...]
    x_bar: tuple[Fraction, ...]
    y_bar: tuple[Fraction, ...]
    diff_bound: Fraction
    mismatch_bound: Fraction
    embedded: RefinementCertificate

    def _rv(self, values, bounds: OutcomeBounds) -> SimpleRV:
        return SimpleRV(zip(self.pieces, values), bounds, check=False)

    def X_k(self, bounds: OutcomeBounds) -> SimpleRV:
        return self._rv(self.x_k, bounds)

    def Y_k(self, bounds: OutcomeBounds) -> SimpleRV:
        return self._rv(self.y_k, bounds)

    def X_bar(self, bounds: OutcomeBounds) -> SimpleRV:
        return self._rv(self.x_bar, bounds)

    def Y_bar(self, bounds: OutcomeBounds) -> SimpleRV:
        return self._rv(self.y_bar, bounds)


@dataclass(frozen=True)
class DyadicCertificate:
    cells: tuple[RefinementCell, ...]
    outcomes: tuple[Fraction, ...]
    sentinel: Fraction
    bounds: OutcomeBounds
    levels: tuple[DyadicLevel, ...]

    @property
    def m(self) -> int:
        return len(self.cells)

    @property
    def k_values(self) -> list[int]:
        return [lv.k for lv in self.levels]

    def level(self, k: int) -> DyadicLevel:
        for lv in self.levels:
            if lv.k == k:
                return lv
        raise KeyError(k)


Payload = Union[PermutationChainCertificate, RefinementCertificate, DyadicCertificate]


@dataclass(frozen=True)
class EquivalenceCertificate:
    case: Case
    dist_x: Distribution
    dist_y: Distribution
    payload: Payload


# -- builders -----------------------------------------------------------------

def _chain(cells: Sequence[Event], x_values: Sequence[Fraction], y_values: Sequence[Fraction]) -> PermutationChainCertificate:
    pi = stable_match(x_values, y_values)
    return PermutationChainCertificate(
        cells=tuple(cells),
        x_values=tuple(x_values),
        y_values=tuple(y_values),
        pi_hat=tuple(pi),
        order_m=permutation_order(pi),
        step_lottery=step_multiset(x_values, pi, 0),
    )


def _require_equal(x: SimpleRV, y: SimpleRV) -> None:
    miss = first_mismatch(distribution(x), distribution(y))
    if miss is not None:
        raise DistributionsDiffer(*miss)


def classify_case(x: SimpleRV, y: SimpleRV) -> Case:
    _require_equal(x, y)
    cx, cy = x.canonical(), y.canonical()
    n = len(cx.cells)
    same_cells = {e for e, _ in cx.cells} == {e for e, _ in cy.cells}
    if same_cells and all(e.measure == Fraction(1, n) for e, _ in cx.cells):
        return Case.CASE1
    if all(cell.measure.is_rational for cell in common_refinement(cx, cy)):
        return Case.CASE2
    return Case.CASE3


def build_case1(x: SimpleRV, y: SimpleRV) -> PermutationChainCertificate:
    """Permutation chain over x's cells, which must be equiprobable with y constant on each."""
    n = len(x.cells)
    unit = Fraction(1, n)
    cells, xs, ys = [], [], []
    for e, xv in x.cells:
        if e.measure != unit:
            raise CertificateError(f"cell {e!r} has measure {e.measure}, not 1/{n}")
        yv = y.value_on(e)
        if yv is None:
            raise CertificateError(f"y is not constant on cell {e!r}")
        cells.append(e)
        xs.append(xv)
        ys.append(yv)
    return _chain(cells, xs, ys)


def build_case2(x: SimpleRV, y: SimpleRV, denominator: int | None = None) -> RefinementCertificate:
    """Cut every cell of the common refinement into pieces of measure 1/N."""
    cells = common_refinement(x, y)
    dens = []
    for cell in cells:
        if not cell.measure.is_rational:
            raise CertificateError(f"refinement cell {cell.event!r} has irrational measure {cell.measure}")
        dens.append(cell.measure.denominator)
    n = math.lcm(*dens)
    if denominator is not None:
        if denominator % n:
            raise CertificateError(f"denominator {denominator} is not a multiple of {n}")
        n = denominator
    unit = Fraction(1, n)
    subcells, xs, ys = [], [], []
    for cell in cells:
        count = cell.measure.to_fraction() * n
        pieces, _ = carve(cell.event, unit, int(count))
        subcells.extend(pieces)
        xs.extend([cell.x_val] * len(pieces))
        ys.extend([cell.y_val] * len(pieces))
    return RefinementCertificate(n, _chain(subcells, xs, ys))


def choose_sentinel(outcomes: Sequence[Fraction], bounds: OutcomeBounds) -> Fraction:
    """Midpoint of the widest gap between sorted outcomes and the bounds."""
    pts = [bounds.lo] + sorted(outcomes) + [bounds.hi]
    best = max(range(len(pts) - 1), key=lambda i: pts[i + 1] - pts[i])
    return (pts[best] + pts[best + 1]) / 2


def minimal_k(cells: Sequence[RefinementCell]) -> int:
    smallest = min(cell.measure for cell in cells)
    k = 1
    while not Scalar(Fraction(1, 1 << k)) < smallest:
        k += 1
    return k


def _dyadic_level(k: int, cells: Sequence[RefinementCell], outcomes: Sequence[Fraction],
                  c: Fraction, bounds: OutcomeBounds) -> DyadicLevel:
    unit = Fraction(1, 1 << k)
    m = len(cells)
    nus, pieces, piece_cell, piece_full = [], [], [], []
    for j, cell in enumerate(cells):
        v = nu(cell.measure, k)
        full, rest = carve(cell.event, unit, v)
        nus.append(v)
        pieces.extend(full)
        pieces.append(rest)
        piece_cell.extend([j] * (v + 1))
        piece_full.extend([True] * v + [False])
    x_k = [cells[j].x_val if f else c for j, f in zip(piece_cell, piece_full)]
    y_k = [cells[j].y_val if f else c for j, f in zip(piece_cell, piece_full)]
    count_x, count_y = Counter(), Counter()
    for j, cell in enumerate(cells):
        count_x[cell.x_val] += nus[j]
        count_y[cell.y_val] += nus[j]
    flips_x, flips_y = [], []
    for xi in outcomes:
        d = count_x[xi] - count_y[xi]
        if d > 0:
            side, carries = flips_x, [cell.x_val == xi for cell in cells]
        else:
            side, carries = flips_y, [cell.y_val == xi for cell in cells]
        need = abs(d)
        for p, (j, f) in enumerate(zip(piece_cell, piece_full)):
            if not need:
                break
            if f and carries[j]:
                side.append(p)
                need -= 1
        if need:
            raise CertificateError(f"k={k}: not enough full cells with outcome {xi} to balance")
    x_bar, y_bar = list(x_k), list(y_k)
    for p in flips_x:
        x_bar[p] = c
    for p in flips_y:
        y_bar[p] = c
    bar_x = SimpleRV(zip(pieces, x_bar), bounds, check=False).canonical()
    bar_y = SimpleRV(zip(pieces, y_bar), bounds, check=False).canonical()
    embedded = build_case2(bar_x, bar_y, denominator=1 << k)
    return DyadicLevel(
        k=k,
        nu=tuple(nus),
        pieces=tuple(pieces),
        piece_cell=tuple(piece_cell),
        piece_full=tuple(piece_full),
        x_k=tuple(x_k),
        y_k=tuple(y_k),
        flips_x=tuple(sorted(flips_x)),
        flips_y=tuple(sorted(flips_y)),
        x_bar=tuple(x_bar),
        y_bar=tuple(y_bar),
        diff_bound=Fraction(m, 1 << k),
        mismatch_bound=Fraction(m * m, 1 << k),
        embedded=embedded,
    )


def build_case3(x: SimpleRV, y: SimpleRV, k_min: int | None = None, k_max: int | None = None) -> DyadicCertificate:
    _require_equal(x, y)
    cx, cy = x.canonical(), y.canonical()
    cells = common_refinement(cx, cy)
    lowest = minimal_k(cells)
    if k_min is None:
        k_min = lowest
    elif k_min < lowest:
        raise CertificateError(
            f"k_min={k_min} too small: need 1/2^k < {min(c.measure for c in cells)}, i.e. k >= {lowest}"
        )
    if k_max is None:
        k_max = k_min + DEFAULT_K_SPAN
    if k_max < k_min:
        raise CertificateError(f"k_max={k_max} < k_min={k_min}")
    bounds = x.bounds.intersection(y.bounds)
    outcomes = cx.outcomes
    c = choose_sentinel(outcomes, bounds)
    levels = tuple(_dyadic_level(k, cells, outcomes, c, bounds) for k in range(k_min, k_max + 1))
    return DyadicCertificate(tuple(cells), outcomes, c, bounds, levels)


def certify_equivalence(x: SimpleRV, y: SimpleRV, k_min: int | None = None, k_max: int | None = None) -> EquivalenceCertificate:
    case = classify_case(x, y)
    cx, cy = x.canonical(), y.canonical()
    if case is Case.CASE1:
        payload: Payload = build_case1(cx, cy)
    elif case is Case.CASE2:
        payload = build_case2(cx, cy)
    else:
        payload = build_case3(cx, cy, k_min, k_max)
    return EquivalenceCertificate(case, distribution(x), distribution(y), payload)


# -- verification -------------------------------------------------------------

@dataclass(frozen=True)
class Obligation:
    name: str
    ok: bool
    detail: str = ""


@dataclass
class VerificationReport:
    obligations: list[Obligation] = field(default_factory=list)

    def check(self, name: str, ok: bool, detail: str = "") -> bool:
        self.obligations.append(Obligation(name, bool(ok), detail))
        return bool(ok)

    @property
    def ok(self) -> bool:
        return all(o.ok for o in self.obligations)

    def failed(self) -> list[str]:
        return [o.name for o in self.obligations if not o.ok]

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "failed": self.failed(),
            "obligations": [{"name": o.name, "ok": o.ok, "detail": o.detail} for o in self.obligations],
        }

    def to_text(self) -> str:
        lines = [f"{'PASS' if o.ok else 'FAIL'}  {o.name}" + (f"  ({o.detail})" if o.detail else "")
                 for o in self.obligations]
        lines.append(f"{'VERIFIED' if self.ok else 'REJECTED'}: {len(self.obligations) - len(self.failed())}"
                     f"/{len(self.obligations)} obligations hold")
        return "\n".join(lines)


def _verify_chain(rep: VerificationReport, cert: PermutationChainCertificate, x: SimpleRV, y: SimpleRV,
                  prefix: str, observed: tuple[list, list] | None = None) -> None:
    n = cert.n_cells
    if not rep.check(f"{prefix}.shape", n > 0 and len(cert.x_values) == n and len(cert.y_values) == n
                     and len(cert.pi_hat) == n, f"N={n}"):
        return
    rep.check(f"{prefix}.partition", tiles_unit_interval(cert.cells))
    unit = Scalar(Fraction(1, n))
    bad = [i for i, e in enumerate(cert.cells) if e.measure != unit]
    rep.check(f"{prefix}.equiprobable", not bad, f"cells {bad[:5]} not of measure 1/{n}" if bad else f"1/{n} each")
    vx, vy = observed or ([x.value_on(e) for e in cert.cells], [y.value_on(e) for e in cert.cells])
    ok = list(cert.x_values) == vx and list(cert.y_values) == vy
    rep.check(f"{prefix}.values", ok, "" if ok else "recorded cell values disagree with the inputs")
    pi = list(cert.pi_hat)
    if not rep.check(f"{prefix}.bijection", is_bijection(pi), "" if is_bijection(pi) else f"pi_hat={pi[:16]}"):
        return
    (xs, ys), _ = _encode(cert.x_values, cert.y_values)
    bad = [i for i in range(n) if ys[i] != xs[pi[i]]]
    rep.check(f"{prefix}.value_matching", not bad, f"y != x o pi_hat at {bad[:5]}" if bad else "")
    for t in (0, 1):
        rep.check(f"{prefix}.step_lottery_t{t}", step_multiset(cert.x_values, pi, t) == tuple(cert.step_lottery))
    lengths = cycle_lengths(pi)
    order = math.lcm(*lengths)
    rep.check(f"{prefix}.order",
              cert.order_m == order and all(cert.order_m % L == 0 for L in lengths)
              and _order_within_factorial(cert.order_m, n),
              f"order_m={cert.order_m}, lcm of cycle lengths={order}")


def _verify_refinement(rep: VerificationReport, cert: RefinementCertificate, x: SimpleRV, y: SimpleRV,
                       prefix: str, denominator: int | None = None) -> None:
    n = cert.common_denominator
    ok = n == cert.chain.n_cells and (denominator is None or n == denominator)
    rep.check(f"{prefix}.denominator", ok, f"N={n}, subcells={cert.chain.n_cells}")
    vx = [x.value_on(e) for e in cert.subcells]
    vy = [y.value_on(e) for e in cert.subcells]
    bad = [i for i in range(len(vx)) if vx[i] is None or vy[i] is None]
    rep.check(f"{prefix}.containment", not bad,
              f"subcells {bad[:5]} straddle refinement cells" if bad else "")
    _verify_chain(rep, cert.chain, x, y, f"{prefix}.chain", (vx, vy))


def _code_masses(pieces: Sequence[Event], codes: Sequence[int], size: int) -> list[Scalar]:
    out = [ZERO] * size
    for e, v in zip(pieces, codes):
        out[v] = out[v] + e.measure
    return out


def _verify_level(rep: VerificationReport, cert: DyadicCertificate, lv: DyadicLevel,
                  cx: SimpleRV, cy: SimpleRV, dist: Distribution) -> None:
    k, m, c = lv.k, cert.m, cert.sentinel
    p = f"dyadic.k={k}"
    unit = Scalar(Fraction(1, 1 << k))
    n_pieces = len(lv.pieces)
    aligned = all(len(t) == n_pieces for t in (lv.piece_cell, lv.piece_full, lv.x_k, lv.y_k, lv.x_bar, lv.y_bar))
    if not rep.check(f"{p}.shape", aligned and len(lv.nu) == m and all(0 <= j < m for j in lv.piece_cell)):
        return
    rep.check(f"{p}.k_range", unit < min(cell.measure for cell in cert.cells), f"1/2^{k}")
    expected_nu = [nu(cell.measure, k) for cell in cert.cells]
    rep.check(f"{p}.nu", list(lv.nu) == expected_nu, f"nu={list(lv.nu)}, expected {expected_nu}")

    # pieces tile [0,1); each lies in its T_j; each T_j holds nu_j full cells and one remainder
    problems = []
    if not tiles_unit_interval(lv.pieces):
        problems.append("pieces do not tile [0,1)")
    per_cell_full, per_cell_rem = Counter(), Counter()
    for idx, (e, j, full) in enumerate(zip(lv.pieces, lv.piece_cell, lv.piece_full)):
        cell = cert.cells[j]
        if cx.value_on(e) != cell.x_val or cy.value_on(e) != cell.y_val:
            problems.append(f"piece {idx} not inside T_{j}")
            break
        if full:
            per_cell_full[j] += 1
            if e.measure != unit:
                problems.append(f"full piece {idx} has measure {e.measure}")
                break
        else:
            per_cell_rem[j] += 1
            if not (e.measure.sign() > 0 and e.measure <= unit):
                problems.append(f"remainder piece {idx} has measure {e.measure}")
                break
    for j in range(m):
        if per_cell_full[j] != lv.nu[j] or per_cell_rem[j] != 1:
            problems.append(f"T_{j} has {per_cell_full[j]} full cells and {per_cell_rem[j]} remainders")
            break
    rep.check(f"{p}.partition", not problems, "; ".join(problems))

    # work on integer codes: outcomes[0..n-1], sentinel n (or the outcome it collides with)
    values = list(cert.outcomes)
    code = {v: i for i, v in enumerate(values)}
    if c not in code:
        code[c] = len(values)
        values.append(c)
    size, sc = len(values), code[c]
    cell_x = [code.get(cell.x_val, -1) for cell in cert.cells]
    cell_y = [code.get(cell.y_val, -1) for cell in cert.cells]
    if not rep.check(f"{p}.cell_outcomes", -1 not in cell_x and -1 not in cell_y):
        return

    # X^k, Y^k: the inputs on full cells, the sentinel on remainders
    xk = [cell_x[j] if f else sc for j, f in zip(lv.piece_cell, lv.piece_full)]
    yk = [cell_y[j] if f else sc for j, f in zip(lv.piece_cell, lv.piece_full)]
    rep.check(f"{p}.x_k_definition", tuple(values[v] for v in xk) == lv.x_k)
    rep.check(f"{p}.y_k_definition", tuple(values[v] for v in yk) == lv.y_k)

    mx, my = _code_masses(lv.pieces, xk, size), _code_masses(lv.pieces, yk, size)
    diff_ok, detail = True, []
    bound = Scalar(Fraction(m, 1 << k))
    for i, xi in enumerate(cert.outcomes):
        if abs(mx[i] - my[i]) > bound:
            diff_ok = False
            detail.append(f"|P(X^k={xi}) - P(Y^k={xi})| = {abs(mx[i] - my[i])}")
        if mx[i] > dist.mass(xi) or my[i] > dist.mass(xi):
            diff_ok = False
            detail.append(f"P(X^k={xi}) or P(Y^k={xi}) exceeds P(X={xi})")
    rep.check(f"{p}.diff_bound", diff_ok, "; ".join(detail) or f"<= {m}/2^{k}")

    # balancing flips: |d_i| 2^k full cells of the surplus side, per outcome
    flip_problems = []
    for side, flips, vals in (("x", lv.flips_x, xk), ("y", lv.flips_y, yk)):
        if len(set(flips)) != len(flips) or any(not 0 <= q < n_pieces or not lv.piece_full[q] for q in flips):
            flip_problems.append(f"{side}: flips must be distinct full pieces")
            continue
        counts = Counter(vals[q] for q in flips)
        for i, xi in enumerate(cert.outcomes):
            d = (mx[i] - my[i]) * (1 << k)
            want = d if side == "x" else -d
            if not want.is_rational or want.to_fraction().denominator != 1:
                flip_problems.append(f"d*2^k not an integer for {xi}")
            elif counts[i] != max(int(want.to_fraction()), 0):
                flip_problems.append(f"{side}: {counts[i]} flips of {xi}, expected {max(int(want.to_fraction()), 0)}")
        if any(v >= len(cert.outcomes) for v in counts):
            flip_problems.append(f"{side}: flip of a sentinel cell")
    rep.check(f"{p}.flips", not flip_problems, "; ".join(flip_problems))

    xb, yb = list(xk), list(yk)
    for q in lv.flips_x:
        if 0 <= q < n_pieces:
            xb[q] = sc
    for q in lv.flips_y:
        if 0 <= q < n_pieces:
            yb[q] = sc
    x_bar = tuple(values[v] for v in xb)
    y_bar = tuple(values[v] for v in yb)
    rep.check(f"{p}.bar_consistency", x_bar == lv.x_bar and y_bar == lv.y_bar)

    mbx, mby = _code_masses(lv.pieces, xb, size), _code_masses(lv.pieces, yb, size)
    rep.check(f"{p}.item_a", mbx == mby, "" if mbx == mby else "F(X-bar) != F(Y-bar)")

    mis_x = sum((e.measure for e, v, j in zip(lv.pieces, xb, lv.piece_cell) if v != cell_x[j]), ZERO)
    mis_y = sum((e.measure for e, v, j in zip(lv.pieces, yb, lv.piece_cell) if v != cell_y[j]), ZERO)
    bound2 = Scalar(Fraction(m * m, 1 << k))
    rep.check(f"{p}.item_b", mis_x <= bound2 and mis_y <= bound2,
              f"P(X-bar != X)={mis_x}, P(Y-bar != Y)={mis_y}, bound {m * m}/2^{k}")

    def dyadic(w: Scalar) -> bool:
        return w.is_rational and (w.to_fraction() * (1 << k)).denominator == 1

    rep.check(f"{p}.item_c", all(dyadic(w) for w in mbx) and all(dyadic(w) for w in mby),
              f"all outcome masses multiples of 1/2^{k}")
    rep.check(f"{p}.bounds_recorded",
              lv.diff_bound == Fraction(m, 1 << k) and lv.mismatch_bound == Fraction(m * m, 1 << k))

    bounds = cert.bounds
    bar_x = SimpleRV(zip(lv.pieces, x_bar), bounds, check=False).canonical()
    bar_y = SimpleRV(zip(lv.pieces, y_bar), bounds, check=False).canonical()
    sub = VerificationReport()
    _verify_refinement(sub, lv.embedded, bar_x, bar_y, "embedded", denominator=1 << k)
    rep.check(f"{p}.embedded", sub.ok, ", ".join(sub.failed()))


def _verify_dyadic(rep: VerificationReport, cert: DyadicCertificate, x: SimpleRV, y: SimpleRV) -> None:
    cx, cy = x.canonical(), y.canonical()
    actual = common_refinement(cx, cy)
    same = len(actual) == len(cert.cells) and all(
        a.event == b.event and a.x_val == b.x_val and a.y_val == b.y_val for a, b in zip(actual, cert.cells))
    if not rep.check("dyadic.refinement_cells", same, f"m={cert.m}"):
        return
    rep.check("dyadic.outcomes", tuple(cert.outcomes) == cx.outcomes)
    c = cert.sentinel
    rep.check("dyadic.sentinel", c not in cx.outcomes and c not in cy.outcomes and c in cert.bounds
              and c in x.bounds and c in y.bounds,
              f"c={c}, outcomes={[str(v) for v in cx.outcomes]}")
    ks = cert.k_values
    rep.check("dyadic.k_window", bool(ks) and ks == list(range(ks[0], ks[0] + len(ks))), f"k={ks[:1]}..{ks[-1:]}")
    dist = distribution(cx)
    for lv in cert.levels:
        _verify_level(rep, cert, lv, cx, cy, dist)


def verify_certificate(cert: EquivalenceCertificate, x: SimpleRV, y: SimpleRV) -> VerificationReport:
    rep = VerificationReport()
    fx, fy = distribution(x), distribution(y)
    rep.check("distributions", cert.dist_x == fx and cert.dist_y == fy and fx == fy)
    try:
        case = classify_case(x, y)
    except CertificateError as exc:
        rep.check("case_tag", False, str(exc))
        return rep
    rep.check("case_tag", case == cert.case, f"certificate says {cert.case.value}, inputs are {case.value}")
    cx, cy = x.canonical(), y.canonical()
    payload = cert.payload
    if isinstance(payload, PermutationChainCertificate):
        _verify_chain(rep, payload, cx, cy, "chain")
    elif isinstance(payload, RefinementCertificate):
        _verify_refinement(rep, payload, cx, cy, "refinement")
    elif isinstance(payload, DyadicCertificate):
        _verify_dyadic(rep, payload, x, y)
    else:
        rep.check("payload", False, f"unknown payload {type(payload).__name__}")
    return rep


def verify_payload(payload: Payload, x: SimpleRV, y: SimpleRV) -> VerificationReport:
    """Verify a bare builder output against the variables it was built from."""
    rep = VerificationReport()
    if isinstance(payload, PermutationChainCertificate):
        _verify_chain(rep, payload, x, y, "chain")
    elif isinstance(payload, RefinementCertificate):
        _verify_refinement(rep, payload, x, y, "refinement")
    else:
        _verify_dyadic(rep, payload, x, y)
    return rep


# -- serialization ------------------------------------------------------------

def _chain_to_json(cert: PermutationChainCertificate) -> dict:
    return {
        "type": "permutation_chain",
        "n_cells": cert.n_cells,
        "cells": [e.to_json() for e in cert.cells],
        "x_values": [str(v) for v in cert.x_values],
        "y_values": [str(v) for v in cert.y_values],
        "pi_hat": list(cert.pi_hat),
        "order_m": str(cert.order_m),
        "step_lottery": [{"x": str(a), "y": str(b), "count": c} for a, b, c in cert.step_lottery],
    }


def _chain_from_json(d: dict) -> PermutationChainCertificate:
    return PermutationChainCertificate(
        cells=tuple(Event.from_json(e) for e in d["cells"]),
        x_values=tuple(as_outcome(v) for v in d["x_values"]),
        y_values=tuple(as_outcome(v) for v in d["y_values"]),
        pi_hat=tuple(int(i) for i in d["pi_hat"]),
        order_m=int(d["order_m"]),
        step_lottery=tuple((as_outcome(s["x"]), as_outcome(s["y"]), int(s["count"])) for s in d["step_lottery"]),
    )


def _refinement_to_json(cert: RefinementCertificate) -> dict:
    return {"type": "refinement", "common_denominator": cert.common_denominator, "chain": _chain_to_json(cert.chain)}


def _refinement_from_json(d: dict) -> RefinementCertificate:
    return RefinementCertificate(int(d["common_denominator"]), _chain_from_json(d["chain"]))


def _strs(values) -> list[str]:
    return [str(v) for v in values]


def _fracs(values) -> tuple[Fraction, ...]:
    return tuple(as_outcome(v) for v in values)


def _dyadic_to_json(cert: DyadicCertificate) -> dict:
    return {
        "type": "dyadic",
        "bounds": cert.bounds.to_json(),
        "sentinel": str(cert.sentinel),
        "outcomes": _strs(cert.outcomes),
        "cells": [{"event": c.event.to_json(), "x": str(c.x_val), "y": str(c.y_val), "mass": str(c.measure)}
                  for c in cert.cells],
        "levels": [
            {
                "k": lv.k,
                "nu": list(lv.nu),
                "pieces": [e.to_json() for e in lv.pieces],
                "piece_cell": list(lv.piece_cell),
                "piece_full": list(lv.piece_full),
                "x_k": _strs(lv.x_k),
                "y_k": _strs(lv.y_k),
                "flips_x": list(lv.flips_x),
                "flips_y": list(lv.flips_y),
                "x_bar": _strs(lv.x_bar),
                "y_bar": _strs(lv.y_bar),
                "diff_bound": str(lv.diff_bound),
                "mismatch_bound": str(lv.mismatch_bound),
                "embedded": _refinement_to_json(lv.embedded),
            }
            for lv in cert.levels
        ],
    }


def _dyadic_from_json(d: dict) -> DyadicCertificate:
    levels = tuple(
        DyadicLevel(
            k=int(lv["k"]),
            nu=tuple(int(v) for v in lv["nu"]),
            pieces=tuple(Event.from_json(e) for e in lv["pieces"]),
            piece_cell=tuple(int(j) for j in lv["piece_cell"]),
            piece_full=tuple(bool(f) for f in lv["piece_full"]),
            x_k=_fracs(lv["x_k"]),
            y_k=_fracs(lv["y_k"]),
            flips_x=tuple(int(q) for q in lv["flips_x"]),
            flips_y=tuple(int(q) for q in lv["flips_y"]),
            x_bar=_fracs(lv["x_bar"]),
            y_bar=_fracs(lv["y_bar"]),
            diff_bound=as_outcome(lv["diff_bound"]),
            mismatch_bound=as_outcome(lv["mismatch_bound"]),
            embedded=_refinement_from_json(lv["embedded"]),
        )
        for lv in d["levels"]
    )
    return DyadicCertificate(
        cells=tuple(RefinementCell(Event.from_json(c["event"]), as_outcome(c["x"]), as_outcome(c["y"])) for c in d["cells"]),
        outcomes=_fracs(d["outcomes"]),
        sentinel=as_outcome(d["sentinel"]),
        bounds=OutcomeBounds.from_json(d["bounds"]),
        levels=levels,
    )


def certificate_to_json(cert: EquivalenceCertificate) -> dict:
    payload = cert.payload
    if isinstance(payload, PermutationChainCertificate):
        body = _chain_to_json(payload)
    elif isinstance(payload, RefinementCertificate):
        body = _refinement_to_json(payload)
    else:
        body = _dyadic_to_json(payload)
    return {
        "schema": SCHEMA,
        "case": cert.case.value,
        "distribution_x": cert.dist_x.to_json(),
        "distribution_y": cert.dist_y.to_json(),
        "payload": body,
    }


def certificate_from_json(data: dict) -> EquivalenceCertificate:
    if data.get("schema") != SCHEMA:
        raise ValueError(f"unsupported certificate schema {data.get('schema')!r}, expected {SCHEMA!r}")
    try:
        body = data["payload"]
        kind = body["type"]
        if kind == "permutation_chain":
            payload: Payload = _chain_from_json(body)
        elif kind == "refinement":
            payload = _refinement_from_json(body)
        elif kind == "dyadic":
            payload = _dyadic_from_json(body)
        else:
            raise ValueError(f"unknown payload type {kind!r}")
        return EquivalenceCertificate(
            Case(data["case"]),
            Distribution.from_json(data["distribution_x"]),
            Distribution.from_json(data["distribution_y"]),
            payload,
        )
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed certificate: {exc!r}") from None


def certificate_summary(cert: EquivalenceCertificate) -> dict:
    payload = cert.payload
    out: dict = {"case": cert.case.value}
    if isinstance(payload, PermutationChainCertificate):
        out.update(n_cells=payload.n_cells, order_m=str(payload.order_m))
    elif isinstance(payload, RefinementCertificate):
        out.update(common_denominator=payload.common_denominator, order_m=str(payload.chain.order_m))
    else:
        out.update(
            m=payload.m,
            sentinel=str(payload.sentinel),
            k_min=payload.k_values[0],
            k_max=payload.k_values[-1],
            levels=[{"k": lv.k, "diff_bound": str(lv.diff_bound), "mismatch_bound": str(lv.mismatch_bound),
                     "flips_x": len(lv.flips_x), "flips_y": len(lv.flips_y)} for lv in payload.levels],
        )
    return out
