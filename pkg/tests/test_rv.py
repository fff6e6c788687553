import random
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from probeq import (
    Distribution,
    Dominance,
    SimpleRV,
    common_refinement,
    distribution,
    equal_in_distribution,
    fosd_compare,
    levy_distance,
    prob_diff_exceeds,
    quantile_rv,
)
from probeq.rv import fosd_compare_distributions
from probeq.scalar import ONE, SQRT2, Scalar

from conftest import BOUNDS, H, rv


def dist(d):
    return Distribution.from_masses(d)


# -- distribution / equality -------------------------------------------------

def test_distribution_examples():
    assert distribution(rv((0, 1, 10))) == dist({10: 1})
    assert distribution(rv((0, H, 10), (H, 1, 20))) == dist({10: H, 20: 1 - H})
    x = rv((0, F(1, 3), 20), (F(1, 3), F(2, 3), 10), (F(2, 3), 1, 20))
    assert distribution(x) == dist({10: F(1, 3), 20: F(2, 3)})


def test_equal_in_distribution_examples(e1):
    x, y = e1
    assert equal_in_distribution(x, x)
    assert equal_in_distribution(x, y)
    assert not equal_in_distribution(x, rv((0, F(1, 3), 10), (F(1, 3), 1, 20)))


def test_invalid_rvs_rejected():
    with pytest.raises(ValueError):
        rv((0, F(1, 2), 10))  # does not cover [0, 1)
    with pytest.raises(ValueError):
        rv((0, F(1, 2), 10), (F(1, 4), 1, 20))  # overlap
    with pytest.raises(ValueError):
        rv((0, 1, 200))  # outside bounds
    with pytest.raises(ValueError):
        SimpleRV.from_intervals([(0, 1, 10), (F(1, 2), F(1, 2), 20)], BOUNDS)  # zero-measure cell
    with pytest.raises(ValueError):
        Distribution(((F(10), Scalar(F(1, 2))),))


# -- fosd --------------------------------------------------------------------

def test_fosd_examples(e1):
    x, _ = e1
    assert fosd_compare(x, x) is Dominance.EQUAL
    assert fosd_compare(rv((0, 1, 20)), x) is Dominance.STRICT_DOM
    f, g = dist({0: F(1, 2), 30: F(1, 2)}), dist({10: 1})
    assert fosd_compare_distributions(f, g) is Dominance.INCOMPARABLE


rational_dists = st.lists(
    st.tuples(st.integers(0, 20), st.integers(1, 6)), min_size=1, max_size=5
).map(lambda ps: dist({v: F(w, sum(w for _, w in ps)) for v, w in ps}) if len({v for v, _ in ps}) == len(ps)
      else dist({ps[0][0]: 1}))


@given(rational_dists, rational_dists)
def test_fosd_antisymmetry(f, g):
    a, b = fosd_compare_distributions(f, g), fosd_compare_distributions(g, f)
    flip = {Dominance.STRICT_DOM: Dominance.DOMINATED, Dominance.DOMINATED: Dominance.STRICT_DOM,
            Dominance.EQUAL: Dominance.EQUAL, Dominance.INCOMPARABLE: Dominance.INCOMPARABLE}
    assert b is flip[a]


# -- common refinement -------------------------------------------------------

def test_refinement_examples(e1, e2, e3):
    x, _ = e1
    cells = common_refinement(x, x)
    assert len(cells) == 2 and all(c.x_val == c.y_val for c in cells)
    cells = common_refinement(*e2)
    assert [(c.x_val, c.y_val) for c in cells] == [(10, 20), (20, 20), (20, 10)]
    assert all(c.measure == F(1, 3) for c in cells)
    cells = common_refinement(*e3)
    got = {(c.x_val, c.y_val): c.measure for c in cells}
    assert got == {(10, 20): 1 - H, (10, 10): SQRT2 - 1, (20, 10): 1 - H}


def _random_rv(rng, n_cuts=3):
    pts = sorted({Scalar(F(rng.randint(1, 63), 64)) for _ in range(n_cuts)} | {H * F(rng.randint(1, 9), 10)})
    edges = [Scalar(0)] + pts + [ONE]
    return rv(*[(a, b, rng.choice([0, 10, 20, 30])) for a, b in zip(edges, edges[1:])])


def test_refinement_marginals():
    rng = random.Random(11)
    for _ in range(50):
        x, y = _random_rv(rng), _random_rv(rng)
        cells = common_refinement(x, y)
        assert sum((c.measure for c in cells), Scalar(0)) == ONE
        for side, attr in ((x, "x_val"), (y, "y_val")):
            for v, p in distribution(side).atoms:
                assert sum((c.measure for c in cells if getattr(c, attr) == v), Scalar(0)) == p


# -- prob_diff_exceeds -------------------------------------------------------

def test_prob_diff_examples(e1):
    x, y = e1
    assert prob_diff_exceeds(x, x, F(1, 100)) == 0
    assert prob_diff_exceeds(x, y, 5) == 1
    assert prob_diff_exceeds(x, y, 11) == 0
    assert prob_diff_exceeds(x, y, 10) == 1  # the event is |X - Y| >= eps
    with pytest.raises(ValueError):
        prob_diff_exceeds(x, y, 0)


def test_prob_diff_nonincreasing():
    rng = random.Random(5)
    for _ in range(40):
        x, y = _random_rv(rng), _random_rv(rng)
        vals = [prob_diff_exceeds(x, y, e) for e in (F(1, 2), 5, 10, F(21, 2), 20, 30, 31)]
        assert all(a >= b for a, b in zip(vals, vals[1:]))


# -- levy distance -----------------------------------------------------------

def _cdf(f: Distribution, t: F) -> F:
    return sum((p.to_fraction() for v, p in f.atoms if v <= t), F(0))


def levy_grid_oracle(f: Distribution, g: Distribution, res: int = 1024) -> F:
    """Smallest h on the 1/res grid satisfying the Levy condition for every t.

    Both sides are right-continuous step functions of t, so testing the
    breakpoints x, x - h, x + h and one point inside every gap between them
    covers all t.
    """
    outs = sorted(set(f.outcomes) | set(g.outcomes))
    for i in range(1, res + 1):
        h = F(i, res)
        pts = sorted({p for x in outs for p in (x, x - h, x + h)})
        ts = pts + [(a + b) / 2 for a, b in zip(pts, pts[1:])] + [pts[0] - 1, pts[-1] + 1]
        if all(_cdf(f, t - h) - h <= _cdf(g, t) <= _cdf(f, t + h) + h for t in ts):
            return h
    return F(1)


def test_levy_examples():
    f = dist({10: F(1, 2), 20: F(1, 2)})
    assert levy_distance(f, f) == 0
    g = dist({10 + F(1, 8): F(1, 2), 20 - F(1, 8): F(1, 2)})
    assert levy_distance(f, g) == F(1, 8)
    assert levy_grid_oracle(f, g) == F(1, 8)


def test_levy_point_masses_one_apart():
    f, g = dist({0: 1}), dist({1: 1})
    exact = levy_distance(f, g)
    oracle = levy_grid_oracle(f, g)
    assert oracle - F(1, 1024) <= exact.to_fraction() <= oracle
    assert exact == 1


def test_levy_against_grid_oracle():
    rng = random.Random(3)
    for _ in range(6):
        a, b = rng.sample(range(9), 2)
        c, d = rng.sample(range(9), 2)
        f = dist({F(a, 4): F(1, 2), F(b, 4): F(1, 2)})
        g = dist({F(c, 4): F(1, 4), F(d, 4): F(3, 4)})
        exact = levy_distance(f, g).to_fraction()
        oracle = levy_grid_oracle(f, g)
        assert oracle - F(1, 1024) <= exact <= oracle


def test_levy_metric_properties():
    rng = random.Random(9)

    def draw():
        outs = rng.sample(range(0, 6), rng.randint(1, 3))
        ws = [rng.randint(1, 4) for _ in outs]
        return dist({F(v, 2): F(w, sum(ws)) for v, w in zip(outs, ws)})

    for _ in range(60):
        f, g, h = draw(), draw(), draw()
        dfg = levy_distance(f, g)
        assert dfg == levy_distance(g, f)
        assert (dfg == 0) == (f == g)
        assert levy_distance(f, h) <= dfg + levy_distance(g, h)


def test_levy_surd_masses():
    f = dist({10: H, 20: 1 - H})
    g = dist({10: F(1, 2), 20: F(1, 2)})
    d = levy_distance(f, g)
    assert d == H - F(1, 2)  # the CDF gap at 10; outcomes are 10 apart
    assert d > 0


# -- quantile representation -------------------------------------------------

def test_quantile_examples():
    assert quantile_rv(dist({10: 1}), BOUNDS).cells == rv((0, 1, 10)).cells
    q = quantile_rv(dist({10: F(1, 2), 20: F(1, 2)}), BOUNDS)
    assert q.cells == rv((0, F(1, 2), 10), (F(1, 2), 1, 20)).cells
    q = quantile_rv(dist({10: H, 20: 1 - H}), BOUNDS)
    assert q.cells == rv((0, H, 10), (H, 1, 20)).cells


def test_quantile_inverts_distribution():
    rng = random.Random(1)
    for _ in range(1000):
        n = rng.randint(1, 5)
        outs = sorted(rng.sample(range(0, 101), n))
        if rng.random() < 0.3 and n >= 2:
            first = H * F(rng.randint(1, 9), 10)
            rest = [(1 - first) * F(1, n - 1)] * (n - 1)
            masses = [first] + rest
        else:
            ws = [rng.randint(1, 9) for _ in range(n)]
            masses = [Scalar(F(w, sum(ws))) for w in ws]
        f = Distribution(tuple(zip(map(F, outs), masses)))
        assert distribution(quantile_rv(f, BOUNDS)) == f


def test_json_round_trip(e3):
    x, _ = e3
    assert SimpleRV.from_json(x.to_json()).cells == x.cells
    f = distribution(x)
    assert Distribution.from_json(f.to_json()) == f
    assert x.to_json()["cells"][0] == {"event": [["0", "1/2*sqrt2"]], "outcome": "10"}
