"""Comonotone coupling and quantile (Skorokhod) representations."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath

from .events import Event, Interval
from .regret import PreferResult, RegretFunction, RegretFunctional, Verdict, prefer
from .rv import (
    Distribution,
    Dominance,
    OutcomeBounds,
    SimpleRV,
    as_outcome,
    distribution,
    fosd_compare_distributions,
    levy_distance,
    prob_diff_exceeds,
    quantile_rv,
)
from .scalar import ONE, ZERO, Scalar


@dataclass(frozen=True)
class Coupling:
    xp: SimpleRV
    yp: SimpleRV
    cells: tuple[Event, ...]

    def to_json(self) -> dict:
        return {
            "cells": [
                {"event": e.to_json(), "x": str(a), "y": str(b)}
                for e, a, b in zip(self.cells, self.xp.outcomes, self.yp.outcomes)
            ]
        }


def _cumulative(f: Distribution) -> list[Scalar]:
    out, total = [], ZERO
    for _, p in f.atoms:
        total = total + p
        out.append(total)
    return out


def comonotone_couple(f: Distribution, g: Distribution, bounds: OutcomeBounds | None = None) -> Coupling:
    """Both quantile functions on the cells where each is constant."""
    cf, cg = _cumulative(f), _cumulative(g)
    breaks = sorted(set(cf[:-1]) | set(cg[:-1]))
    edges = [ZERO] + breaks + [ONE]
    cells, xs, ys = [], [], []
    i = j = 0
    for lo, hi in zip(edges, edges[1:]):
        while cf[i] <= lo:
            i += 1
        while cg[j] <= lo:
            j += 1
        cells.append(Event([Interval(lo, hi)], _canonical=True))
        xs.append(f.atoms[i][0])
        ys.append(g.atoms[j][0])
    if bounds is None:
        lo_b, hi_b = min(xs + ys), max(xs + ys)
        bounds = OutcomeBounds(lo_b, hi_b if hi_b > lo_b else lo_b + 1)
    xp = SimpleRV(zip(cells, xs), bounds)
    yp = SimpleRV(zip(cells, ys), bounds)
    return Coupling(xp, yp, tuple(cells))


@dataclass
class SkorokhodRow:
    k: int
    distribution_matches: bool
    levy: Scalar
    prob_exceeds: dict[Fraction, Scalar] = field(default_factory=dict)

    def to_json(self, digits: int = 20) -> dict:
        with mpmath.workdps(digits + 5):
            return {
                "k": self.k,
                "distribution_matches": self.distribution_matches,
                "levy": {"exact": str(self.levy), "decimal": mpmath.nstr(self.levy.to_mpf(), digits)},
                "eps": {
                    str(e): {"exact": str(p), "decimal": mpmath.nstr(p.to_mpf(), digits)}
                    for e, p in self.prob_exceeds.items()
                },
            }


def skorokhod_represent(seq: Sequence[Distribution], target: Distribution, eps_grid: Sequence,
                        start: int = 1) -> list[SkorokhodRow]:
    """Represent every distribution and the target by quantile functions on one [0, 1).

    Rows are numbered from ``start``.
    """
    if not seq or not eps_grid:
        raise ValueError("need a nonempty sequence and eps grid")
    eps = [as_outcome(e) for e in eps_grid]
    outcomes = list(target.outcomes) + [x for f in seq for x in f.outcomes]
    lo, hi = min(outcomes), max(outcomes)
    bounds = OutcomeBounds(lo, hi if hi > lo else lo + 1)
    limit = quantile_rv(target, bounds)
    rows = []
    for k, f in enumerate(seq, start=start):
        rep = quantile_rv(f, bounds)
        rows.append(SkorokhodRow(
            k=k,
            distribution_matches=distribution(rep) == f,
            levy=levy_distance(f, target),
            prob_exceeds={e: prob_diff_exceeds(rep, limit, e) for e in eps},
        ))
    return rows


@dataclass
class FosdPreferenceReport:
    dominance: Dominance
    direct: PreferResult | None = None
    coupled: PreferResult | None = None
    coupling: Coupling | None = None
    cellwise_dominance: bool | None = None
    strict_cell: bool | None = None

    @property
    def status(self) -> str:
        return "NOT_COMPARABLE" if self.dominance is Dominance.INCOMPARABLE else self.dominance.value

    @property
    def both_prefer(self) -> bool:
        return (self.direct is not None and self.coupled is not None
                and self.direct.verdict is Verdict.PREFER and self.coupled.verdict is Verdict.PREFER)

    def to_json(self) -> dict:
        out: dict = {"status": self.status}
        if self.direct is not None:
            out["direct"] = self.direct.to_json()
        if self.coupled is not None:
            out["coupled"] = self.coupled.to_json()
            out["cellwise_dominance"] = self.cellwise_dominance
            out["strict_cell"] = self.strict_cell
            out["both_prefer"] = self.both_prefer
        return out


def check_fosd_preference(psi: RegretFunction, v: RegretFunctional, x: SimpleRV, y: SimpleRV) -> FosdPreferenceReport:
    f, g = distribution(x), distribution(y)
    dom = fosd_compare_distributions(f, g)
    if dom is Dominance.INCOMPARABLE:
        return FosdPreferenceReport(dom)
    bounds = x.bounds if x.bounds == y.bounds else x.bounds.intersection(y.bounds)
    direct = prefer(psi, v, x, y)
    report = FosdPreferenceReport(dom, direct)
    if dom is Dominance.STRICT_DOM:
        cp = comonotone_couple(f, g, bounds)
        report.coupling = cp
        report.coupled = prefer(psi, v, cp.xp, cp.yp, check=False)
        report.cellwise_dominance = all(a >= b for a, b in zip(cp.xp.outcomes, cp.yp.outcomes))
        report.strict_cell = any(a > b for a, b in zip(cp.xp.outcomes, cp.yp.outcomes))
    return report
