import random
from fractions import Fraction as F

import pytest

from probeq import (
    Difference,
    Distribution,
    Dominance,
    Expectation,
    ExpUtilityDifference,
    PowerUtilityDifference,
    RankDependent,
    Verdict,
    check_fosd_preference,
    comonotone_couple,
    distribution,
    skorokhod_represent,
)
from probeq.events import Event, tiles_unit_interval
from probeq.generators import strict_fosd_pair
from probeq.rv import fosd_compare_distributions

from conftest import BOUNDS, rv


def dist(d):
    return Distribution.from_masses(d)


def ev(lo, hi):
    return Event.interval(lo, hi)


def test_couple_examples():
    f = dist({10: F(1, 3), 30: F(2, 3)})
    cp = comonotone_couple(f, f)
    assert cp.xp.outcomes == cp.yp.outcomes
    cp = comonotone_couple(dist({20: 1}), dist({10: F(1, 2), 20: F(1, 2)}))
    assert list(cp.cells) == [ev(0, F(1, 2)), ev(F(1, 2), 1)]
    assert cp.xp.outcomes == (20, 20) and cp.yp.outcomes == (10, 20)
    cp = comonotone_couple(f, dist({10: F(1, 2), 20: F(1, 2)}))
    assert list(cp.cells) == [ev(0, F(1, 3)), ev(F(1, 3), F(1, 2)), ev(F(1, 2), 1)]
    assert cp.xp.outcomes == (10, 30, 30) and cp.yp.outcomes == (10, 10, 20)


def test_couple_preserves_marginals():
    rng = random.Random(2)
    for _ in range(200):
        x, y = strict_fosd_pair(rng)
        f, g = distribution(x), distribution(y)
        cp = comonotone_couple(f, g, BOUNDS)
        assert tiles_unit_interval(cp.cells)
        assert distribution(cp.xp) == f and distribution(cp.yp) == g


def test_fosd_gives_cellwise_dominance():
    rng = random.Random(17)
    for _ in range(1000):
        x, y = strict_fosd_pair(rng)
        f, g = distribution(x), distribution(y)
        assert fosd_compare_distributions(f, g) is Dominance.STRICT_DOM
        cp = comonotone_couple(f, g, BOUNDS)
        pairs = list(zip(cp.xp.outcomes, cp.yp.outcomes))
        assert all(a >= b for a, b in pairs)
        assert any(a > b for a, b in pairs)


def test_skorokhod_constant_sequence():
    target = dist({10: F(1, 2), 20: F(1, 2)})
    rows = skorokhod_represent([target] * 4, target, [F(1, 8), 1])
    for row in rows:
        assert row.distribution_matches and row.levy == 0
        assert all(p == 0 for p in row.prob_exceeds.values())


def test_skorokhod_shrinking_shift():
    target = dist({10: F(1, 2), 20: F(1, 2)})
    seq = [dist({10 + F(1, 2**k): F(1, 2), 20 - F(1, 2**k): F(1, 2)}) for k in range(1, 9)]
    rows = skorokhod_represent(seq, target, [F(1, 8)])
    for row in rows:
        assert row.distribution_matches
        assert row.levy == F(1, 2**row.k)
        gap = F(1, 2**row.k)
        # the quantile functions are exactly gap apart everywhere, and the event is |diff| >= eps
        assert row.prob_exceeds[F(1, 8)] == (1 if gap >= F(1, 8) else 0)
    assert rows[2].k == 3 and rows[2].prob_exceeds[F(1, 8)] == 1


def test_skorokhod_vanishing_atom():
    target = dist({10: 1})
    seq = [dist({10: 1 - F(1, 2**k), 20: F(1, 2**k)}) for k in range(1, 7)]
    rows = skorokhod_represent(seq, target, [1])
    assert [row.prob_exceeds[1] for row in rows] == [F(1, 2**k) for k in range(1, 7)]
    json_row = rows[0].to_json(5)
    assert json_row["eps"]["1"]["exact"] == "1/2" and json_row["eps"]["1"]["decimal"] == "0.5"


def test_skorokhod_rejects_empty():
    with pytest.raises(ValueError):
        skorokhod_represent([], dist({1: 1}), [1])


def test_fosd_preference_examples():
    x = rv((0, 1, 20))
    y = rv((0, F(1, 2), 10), (F(1, 2), 1, 20))
    rep = check_fosd_preference(Difference(), Expectation(), x, y)
    assert rep.status == "STRICT_DOM" and rep.both_prefer
    assert rep.direct.exact == 5 and rep.coupled.exact == 5
    rep = check_fosd_preference(Difference(), Expectation(), y, y)
    assert rep.status == "EQUAL" and rep.direct.verdict is Verdict.INDIFFERENT
    a = rv((0, F(1, 2), 0), (F(1, 2), 1, 30))
    b = rv((0, 1, 10))
    rep = check_fosd_preference(Difference(), Expectation(), a, b)
    assert rep.status == "NOT_COMPARABLE" and rep.direct is None
    assert rep.to_json() == {"status": "NOT_COMPARABLE"}


def test_fosd_preference_random():
    rng = random.Random(99)
    psis = [Difference(), PowerUtilityDifference(F(2)), ExpUtilityDifference(F(1, 10))]
    for _ in range(100):
        x, y = strict_fosd_pair(rng)
        for psi in psis:
            rep = check_fosd_preference(psi, Expectation(), x, y)
            assert rep.both_prefer and rep.cellwise_dominance and rep.strict_cell
        rep = check_fosd_preference(Difference(), Expectation(), x, y)
        assert rep.direct.exact == rep.coupled.exact


def test_fosd_preference_rank_dependent():
    rng = random.Random(5)
    for _ in range(20):
        x, y = strict_fosd_pair(rng)
        rep = check_fosd_preference(Difference(), RankDependent(F(1, 2)), x, y)
        assert rep.coupled.verdict is Verdict.PREFER
