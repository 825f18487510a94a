from __future__ import annotations

import mpmath as mp
import pytest
from hypothesis import given
from hypothesis import strategies as st

from agentreg.metrics import (
    AggregationError,
    Requirement,
    SbcEstimate,
    aaqs,
    capability_match_binary,
    ceiling_stopping_n,
    kappa_from_probability,
    legal_boundary,
    probability_from_kappa,
    rsa,
    rsa_from_probability,
    sbc,
    sbc_by_slot,
    stopping_n,
    traffic_projection,
    wilson,
)
from agentreg.normalizer import CATEGORICAL, QUANTITATIVE, Constraint, SelectionFacingSchema
from agentreg.trials import TrialRecord


def mp_wilson(k: int, n: int, z: str = "1.96"):
    """Independent 40-digit evaluation of the Wilson score interval."""
    with mp.workdps(40):
        z_, k_, n_ = mp.mpf(z), mp.mpf(k), mp.mpf(n)
        p = k_ / n_
        d = 1 + z_**2 / n_
        c = (p + z_**2 / (2 * n_)) / d
        m = z_ * mp.sqrt(p * (1 - p) / n_ + z_**2 / (4 * n_**2)) / d
        return float(c - m), float(c), float(c + m)


# Frozen from mp_wilson: (k, n) -> (sbc, ci_low, ci_high)
FROZEN = {
    (40, 40): (0.45618773037480384, 0.91237546074960768, 1.0),
    (20, 40): (0.0, 0.35199278797099757, 0.64800721202900243),
    (37, 40): (0.38775957081858326, 0.80135469840902477, 0.97416444322814176),
    (937, 1124): (0.33249349908710585, 0.81072897865411498, 0.85425801952009672),
    (83, 100): (0.31779171353291937, 0.74451818766357026, 0.89106523940226848),
}


@pytest.mark.parametrize("k, n", sorted(FROZEN))
def test_wilson_matches_frozen_oracle(k, n):
    est = wilson(k, n)
    s, lo, hi = FROZEN[(k, n)]
    assert est.sbc == pytest.approx(s, abs=1e-12)
    assert est.ci_low == pytest.approx(lo, abs=1e-12)
    assert est.ci_high == pytest.approx(hi, abs=1e-12)


@given(st.integers(1, 5000).flatmap(lambda n: st.tuples(st.integers(0, n), st.just(n))))
def test_wilson_matches_live_oracle(kn):
    k, n = kn
    lo, c, hi = mp_wilson(k, n)
    est = wilson(k, n)
    assert est.center == pytest.approx(c, abs=1e-12)
    assert est.ci_low == pytest.approx(lo, abs=1e-12)
    assert est.ci_high == pytest.approx(hi, abs=1e-12)
    assert 0 < est.center < 1
    assert est.ci_low <= est.center <= est.ci_high
    assert -0.5 <= est.sbc <= 0.5


def test_wilson_exact_half():
    assert wilson(20, 40).sbc == 0.0


@pytest.mark.parametrize("k, n, z", [(0, 0, 1.96), (5, 4, 1.96), (-1, 4, 1.96), (1, 4, 0.0)])
def test_wilson_domain_errors(k, n, z):
    with pytest.raises(ValueError):
        wilson(k, n, z)


def test_published_pool_is_937_of_1124():
    est = wilson(937, 1124)
    assert round(est.sbc, 3) == 0.332
    assert (round(est.ci_low - 0.5, 3), round(est.ci_high - 0.5, 3)) == (0.311, 0.354)
    assert wilson(935, 1124).sbc == pytest.approx(0.332, abs=0.005)


@given(st.floats(0.05, 0.95), st.integers(1, 200))
def test_wilson_centre_shrinks_toward_phat(p, n):
    # same proportion at a larger n sits closer to p-hat
    k1, k2 = round(p * n), round(p * n) * 4
    c1, c2 = wilson(k1, n).center, wilson(k2, 4 * n).center
    phat = k1 / n
    assert abs(c2 - phat) <= abs(c1 - phat) + 1e-15


def test_ceiling_stopping_crossing_is_stable():
    assert ceiling_stopping_n() == 16
    assert ceiling_stopping_n() == ceiling_stopping_n()
    lo, c, hi = mp_wilson(16, 16)
    assert (hi - lo) / 2 < 0.10
    lo, c, hi = mp_wilson(14, 14)
    assert (hi - lo) / 2 >= 0.10


def test_stopping_at_half_matches_oracle():
    stream = [t % 2 == 0 for t in range(400)]
    n = stopping_n(stream, 0.10, step=2)
    oracle = next(m for m in range(2, 400, 2) if (lambda b: (b[2] - b[0]) / 2)(mp_wilson(m // 2, m)) < 0.10)
    assert n == oracle == 94


def rec(i, slot_opt, picked, condition="ON", n_tools=2):
    return TrialRecord(f"t{i}", "D01", "a", condition, "none", slot_opt if condition == "ON" else None, picked,
                       condition == "ON" and picked == slot_opt, n_tools, slot_opt)


def test_sbc_from_records():
    recs = [rec(i, i % 2, i % 2) for i in range(40)]
    assert sbc(recs).sbc == pytest.approx(0.456, abs=1e-3)
    recs = [rec(i, i % 2, 0) for i in range(40)]
    assert sbc(recs).sbc == 0.0


def test_sbc_mixed_conditions_rejected():
    with pytest.raises(AggregationError):
        sbc([rec(0, 0, 0), rec(1, 0, 1, condition="NN")])


def test_sbc_by_slot():
    recs = [rec(i, i % 2, 1) for i in range(40)]
    by = sbc_by_slot(recs)
    assert by[1].successes == 20 and by[0].successes == 0


@given(st.lists(st.booleans(), min_size=1, max_size=200))
def test_sbc_antisymmetric(hits):
    recs = [rec(i, 0, 0 if h else 1) for i, h in enumerate(hits)]
    flipped = [rec(i, 1, 0 if h else 1) for i, h in enumerate(hits)]
    assert sbc(recs).sbc == pytest.approx(-sbc(flipped).sbc, abs=1e-12)


@pytest.mark.parametrize("p, expected", [(1.0, 5.0), (0.2, 1.0), (0.234, 1.17)])
def test_rsa_examples(p, expected):
    assert rsa_from_probability(p, 5) == pytest.approx(expected, abs=1e-9)


def test_rsa_from_log():
    recs = [rec(i, i % 5, i % 5, n_tools=5) for i in range(30)]
    assert rsa(recs, 5) == 5.0
    with pytest.raises(ValueError):
        rsa([], 5)
    with pytest.raises(AggregationError):
        rsa(recs, 2)


@pytest.mark.parametrize("p, kappa, tol", [(0.94, 15.7, 0.05), (0.5, 1.0, 1e-12), (0.963, 26.0, 0.05),
                                           (0.933, 13.9, 0.05)])
def test_kappa_examples(p, kappa, tol):
    fm = kappa_from_probability(p)
    assert fm.kappa == pytest.approx(kappa, abs=tol)
    assert not fm.capped


def test_kappa_cap_policy():
    fm = kappa_from_probability(1.0, n=40)
    c = wilson(40, 40).center
    assert fm.capped and fm.kappa == pytest.approx(c / (1 - c))
    with pytest.raises(ValueError):
        kappa_from_probability(1.0)


@given(st.floats(1e-3, 1e3))
def test_kappa_probability_round_trip(k):
    assert kappa_from_probability(probability_from_kappa(k)).kappa == pytest.approx(k, rel=1e-9)


@pytest.mark.parametrize("rate, match, score, coasting", [(1.0, 1.0, 1.0, False), (1.0, 0.0, 0.0, True),
                                                          (0.5, 0.5, 0.25, False), (0.8, 0.5, 0.4, False)])
def test_aaqs_examples(rate, match, score, coasting):
    r = aaqs(rate, match)
    assert r.aaqs == pytest.approx(score)
    assert r.coasting is coasting


@given(st.floats(0, 1), st.floats(0, 1))
def test_aaqs_bounded_by_rate(rate, match):
    r = aaqs(rate, match)
    assert r.aaqs <= rate
    if match == 1.0:
        assert r.aaqs == rate


def schema(*constraints):
    return SelectionFacingSchema("f", (), "o", constraints)


def test_capability_match_examples():
    us = schema(Constraint("coverage", CATEGORICAL, ("us-only",)))
    assert capability_match_binary(us, ["coverage=international"]).score == 0.0
    five = schema(Constraint("result_cap", QUANTITATIVE, value=5, unit="results"))
    ten = schema(Constraint("result_cap", QUANTITATIVE, value=10, unit="results"))
    assert capability_match_binary(five, ["result_cap>=10 results"]).score == 0.0
    assert capability_match_binary(ten, ["result_cap>=10 results"]).score == 1.0
    glob = schema(Constraint("coverage", CATEGORICAL, ("global",)))
    assert capability_match_binary(glob, ["coverage=international"]).score == 1.0


def test_capability_match_undeclared_is_diagnosed():
    res = capability_match_binary(schema(), [Requirement.parse("latency<=100 ms")])
    assert res.score == 0.0
    assert "not declared" in res.diagnostics[0]


@pytest.mark.parametrize("legal, full, capture, inc", [(0.47, 0.48, 97.9, 0.01), (0.33, 0.31, 106.5, -0.02),
                                                       (-0.09, -0.03, None, 0.06)])
def test_legal_boundary_rows(legal, full, capture, inc):
    r = legal_boundary(legal, full)
    assert r.illegal_increment == inc
    if capture is None:
        assert r.capture_ratio is None
    else:
        assert r.capture_ratio == pytest.approx(capture, abs=0.05)


def test_legal_boundary_ci_spanning_zero():
    full = SbcEstimate.from_sbc(0.05, 20)
    assert full.spans_zero()
    assert legal_boundary(0.1, full).capture_ratio is None


def test_traffic_projection():
    t = traffic_projection(0.332, 1e6, 0.001)
    assert t.share == pytest.approx(0.832)
    assert t.redirect_points == pytest.approx(33.2)
    assert t.annual_redirect == pytest.approx(121_180.0)
    assert traffic_projection(0.0, 1e6, 0.001).annual_redirect == 0.0
    assert traffic_projection(0.456, 1e6, 0.001).annual_redirect == pytest.approx(0.456 * 1e6 * 0.001 * 365)
    with pytest.raises(ValueError):
        traffic_projection(0.3, 0, 0.001)
