"""Regret functions, regret lotteries, regret functionals and preference.

Lottery probabilities stay exact (:class:`Scalar`).  Regret values are exact
fractions for the difference and table forms and mpmath reals for utility
differences; they are only mixed with probabilities when V is evaluated.
"""

from __future__ import annotations

import enum
from bisect import bisect_right
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence, Union

import mpmath

from .rv import OutcomeBounds, SimpleRV, as_outcome, common_refinement
from .scalar import ONE, ZERO, Scalar

PRECISION = 50  # mpmath decimal digits for inexact regret values
DEFAULT_TOL = Fraction(1, 10**9)

Real = Union[Fraction, mpmath.mpf]


class RegretFunction:
    """psi(x, y): zero on the diagonal, increasing in x, decreasing in y."""

    exact = True

    def __call__(self, x: Fraction, y: Fraction, bounds: OutcomeBounds | None = None) -> Real:
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError

    @staticmethod
    def from_json(data: dict) -> RegretFunction:
        try:
            form = data["form"]
            if form == "difference":
                return Difference()
            if form == "utility_diff":
                u = data["u"]
                if u == "power":
                    shift = data.get("shift")
                    return PowerUtilityDifference(Fraction(str(data["alpha"])), None if shift is None else as_outcome(shift))
                if u in ("exponential", "exp"):
                    return ExpUtilityDifference(Fraction(str(data["beta"])))
                raise ValueError(f"unknown utility family {u!r}")
            if form == "table":
                grid = data["grid"]
                return TableRegret(
                    tuple(as_outcome(p) for p in grid["points"]),
                    tuple(tuple(as_outcome(v) for v in row) for row in grid["values"]),
                )
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed regret function spec: {exc!r}") from None
        raise ValueError(f"unknown regret function form {data.get('form')!r}")


@dataclass(frozen=True)
class Difference(RegretFunction):
    def __call__(self, x, y, bounds=None):
        return Fraction(x) - Fraction(y)

    def to_json(self):
        return {"form": "difference"}


@dataclass(frozen=True)
class PowerUtilityDifference(RegretFunction):
    """u(x) - u(y) with u(x) = (x + shift)^alpha.

    ``shift=None`` shifts by the lower outcome bound so u's domain starts at 0.
    """

    alpha: Fraction
    shift: Fraction | None = None
    exact = False

    def __post_init__(self):
        if self.alpha <= 0:
            raise ValueError("power utility needs alpha > 0")

    def utility(self, x: Fraction, bounds: OutcomeBounds | None) -> mpmath.mpf:
        shift = self.shift if self.shift is not None else (-bounds.lo if bounds else Fraction(0))
        base = Fraction(x) + shift
        if base < 0:
            raise ValueError(f"power utility undefined at {x} (shifted value {base} < 0)")
        with mpmath.workdps(PRECISION):
            return mpmath.power(mpmath.mpf(base.numerator) / base.denominator,
                                mpmath.mpf(self.alpha.numerator) / self.alpha.denominator)

    def __call__(self, x, y, bounds=None):
        if x == y:
            return mpmath.mpf(0)
        with mpmath.workdps(PRECISION):
            return self.utility(x, bounds) - self.utility(y, bounds)

    def to_json(self):
        out = {"form": "utility_diff", "u": "power", "alpha": str(self.alpha)}
        if self.shift is not None:
            out["shift"] = str(self.shift)
        return out


@dataclass(frozen=True)
class ExpUtilityDifference(RegretFunction):
    """u(x) - u(y) with u(x) = 1 - exp(-beta x)."""

    beta: Fraction
    exact = False

    def __post_init__(self):
        if self.beta <= 0:
            raise ValueError("exponential utility needs beta > 0")

    def utility(self, x: Fraction) -> mpmath.mpf:
        with mpmath.workdps(PRECISION):
            b = mpmath.mpf(self.beta.numerator) / self.beta.denominator
            return 1 - mpmath.exp(-b * mpmath.mpf(x.numerator) / x.denominator)

    def __call__(self, x, y, bounds=None):
        if x == y:
            return mpmath.mpf(0)
        with mpmath.workdps(PRECISION):
            return self.utility(Fraction(x)) - self.utility(Fraction(y))

    def to_json(self):
        return {"form": "utility_diff", "u": "exponential", "beta": str(self.beta)}


@dataclass(frozen=True)
class TableRegret(RegretFunction):
    """Bilinear interpolation of psi on a square grid of points.

    ``values[i][j]`` is psi(points[i], points[j]).
    """

    points: tuple[Fraction, ...]
    values: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        n = len(self.points)
        if n < 2 or any(self.points[i] >= self.points[i + 1] for i in range(n - 1)):
            raise ValueError("table grid points must be strictly increasing, at least two")
        if len(self.values) != n or any(len(row) != n for row in self.values):
            raise ValueError(f"table values must be a {n}x{n} matrix")

    def _locate(self, v: Fraction) -> tuple[int, Fraction]:
        pts = self.points
        if not pts[0] <= v <= pts[-1]:
            raise ValueError(f"{v} outside the table grid [{pts[0]}, {pts[-1]}]")
        i = min(bisect_right(pts, v) - 1, len(pts) - 2)
        return i, (v - pts[i]) / (pts[i + 1] - pts[i])

    def __call__(self, x, y, bounds=None):
        i, s = self._locate(Fraction(x))
        j, t = self._locate(Fraction(y))
        v = self.values
        return ((1 - s) * (1 - t) * v[i][j] + s * (1 - t) * v[i + 1][j]
                + (1 - s) * t * v[i][j + 1] + s * t * v[i + 1][j + 1])

    def to_json(self):
        return {
            "form": "table",
            "grid": {
                "points": [str(p) for p in self.points],
                "values": [[str(v) for v in row] for row in self.values],
            },
        }


@dataclass
class ValidationReport:
    valid: bool
    violations: list[str] = field(default_factory=list)

    @property
    def first_violation(self) -> str | None:
        return self.violations[0] if self.violations else None

    def to_json(self) -> dict:
        return {"valid": self.valid, "violations": self.violations}


def validate_regret_function(psi: RegretFunction, bounds: OutcomeBounds, grid_n: int = 11) -> ValidationReport:
    """Check psi(x, x) = 0 and strict monotonicity on a grid over the bounds.

    Table forms are also checked on their own grid points, where the
    interpolant takes the user's values exactly.
    """
    if grid_n < 3:
        raise ValueError("grid_n must be at least 3")
    step = (bounds.hi - bounds.lo) / (grid_n - 1)
    grids = [[bounds.lo + step * i for i in range(grid_n)]]
    if isinstance(psi, TableRegret):
        grids.insert(0, list(psi.points))
    violations: list[str] = []
    for pts in grids:
        try:
            table = [[psi(x, y, bounds) for y in pts] for x in pts]
        except ValueError as exc:
            violations.append(f"evaluation error: {exc}")
            continue
        for i, x in enumerate(pts):
            if table[i][i] != 0:
                violations.append(f"diagonal: psi({x}, {x}) = {table[i][i]} != 0")
        for j, y in enumerate(pts):
            for i in range(len(pts) - 1):
                if not table[i + 1][j] > table[i][j]:
                    violations.append(f"not strictly increasing in x at x={pts[i]}..{pts[i + 1]}, y={y}")
        for i, x in enumerate(pts):
            for j in range(len(pts) - 1):
                if not table[i][j + 1] < table[i][j]:
                    violations.append(f"not strictly decreasing in y at x={x}, y={pts[j]}..{pts[j + 1]}")
    return ValidationReport(not violations, violations)


@dataclass(frozen=True)
class RegretLottery:
    """Canonical regret lottery: values strictly increasing, exact positive probabilities."""

    atoms: tuple[tuple[Real, Scalar], ...]

    @classmethod
    def from_pairs(cls, pairs) -> RegretLottery:
        merged: dict = defaultdict(lambda: ZERO)
        for v, p in pairs:
            merged[v] = merged[v] + p
        atoms = tuple((v, merged[v]) for v in sorted(merged) if merged[v])
        total = sum((p for _, p in atoms), ZERO)
        if total != ONE:
            raise ValueError(f"lottery probabilities sum to {total}")
        return cls(atoms)

    def to_json(self) -> dict:
        return {"atoms": [{"value": _render(v), "prob": str(p)} for v, p in self.atoms]}


def _render(v: Real) -> str:
    if isinstance(v, Fraction):
        return str(v)
    return mpmath.nstr(v, 30)


def regret_lottery(psi: RegretFunction, x: SimpleRV, y: SimpleRV) -> RegretLottery:
    bounds = x.bounds if x.bounds == y.bounds else x.bounds.intersection(y.bounds)
    pairs = []
    for cell in common_refinement(x, y):
        if cell.x_val not in bounds or cell.y_val not in bounds:
            raise ValueError(f"outcome pair ({cell.x_val}, {cell.y_val}) outside [{bounds.lo}, {bounds.hi}]")
        pairs.append((psi(cell.x_val, cell.y_val, bounds), cell.measure))
    return RegretLottery.from_pairs(pairs)


class RegretFunctional:
    def __call__(self, lottery: RegretLottery):
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError

    @staticmethod
    def from_json(data: dict) -> RegretFunctional:
        form = data.get("form") if isinstance(data, dict) else None
        if form == "expectation":
            return Expectation()
        if form == "rank_dependent":
            try:
                return RankDependent(Fraction(str(data["gamma"])))
            except KeyError:
                raise ValueError("rank_dependent functional needs gamma") from None
        raise ValueError(f"unknown functional form {form!r}")


@dataclass(frozen=True)
class Expectation(RegretFunctional):
    def __call__(self, lottery):
        values = [v for v, _ in lottery.atoms]
        if all(isinstance(v, Fraction) for v in values):
            return sum((p * v for v, p in lottery.atoms), ZERO)
        with mpmath.workdps(PRECISION):
            return mpmath.fsum(p.to_mpf() * v for v, p in lottery.atoms)

    def to_json(self):
        return {"form": "expectation"}


@dataclass(frozen=True)
class RankDependent(RegretFunctional):
    """Rank-dependent value with weighting w(p) = p^gamma on tail probabilities."""

    gamma: Fraction

    def __post_init__(self):
        if self.gamma <= 0:
            raise ValueError("rank-dependent functional needs gamma > 0")

    def __call__(self, lottery):
        with mpmath.workdps(PRECISION):
            g = mpmath.mpf(self.gamma.numerator) / self.gamma.denominator
            total = mpmath.mpf(0)
            tail = ONE
            for v, p in lottery.atoms:
                upper = tail.to_mpf() ** g
                tail = tail - p
                lower = tail.to_mpf() ** g if tail else mpmath.mpf(0)
                total += _to_mpf(v) * (upper - lower)
            return total

    def to_json(self):
        return {"form": "rank_dependent", "gamma": str(self.gamma)}


def _to_mpf(v: Real) -> mpmath.mpf:
    if isinstance(v, Fraction):
        return mpmath.mpf(v.numerator) / v.denominator
    if isinstance(v, Scalar):
        return v.to_mpf()
    return mpmath.mpf(v)


class Verdict(str, enum.Enum):
    PREFER = "PREFER"
    INDIFFERENT = "INDIFFERENT"
    DISPREFER = "DISPREFER"


@dataclass(frozen=True)
class PreferResult:
    verdict: Verdict
    value: mpmath.mpf
    exact: Scalar | None = None

    def to_json(self, digits: int = 30) -> dict:
        out = {"verdict": self.verdict.value, "value": mpmath.nstr(self.value, digits)}
        if self.exact is not None:
            out["exact"] = str(self.exact)
        return out


def prefer(psi: RegretFunction, v: RegretFunctional, x: SimpleRV, y: SimpleRV,
           tol=DEFAULT_TOL, *, check: bool = True) -> PreferResult:
    """Decide x vs y by the sign of V(Psi(x, y)), indifferent within ``tol``."""
    if check:
        bounds = x.bounds if x.bounds == y.bounds else x.bounds.intersection(y.bounds)
        report = validate_regret_function(psi, bounds)
        if not report.valid:
            raise ValueError(f"invalid regret function: {report.first_violation}")
    raw = v(regret_lottery(psi, x, y))
    exact = raw if isinstance(raw, Scalar) else None
    with mpmath.workdps(PRECISION):
        value = _to_mpf(raw)
        tol_v = _to_mpf(Fraction(tol))
        if exact is not None and not exact:
            verdict = Verdict.INDIFFERENT
        elif abs(value) <= tol_v:
            verdict = Verdict.INDIFFERENT
        elif value > 0:
            verdict = Verdict.PREFER
        else:
            verdict = Verdict.DISPREFER
    return PreferResult(verdict, value, exact)
