"""Closed-form oscillatory chain integrals, case classification, tree amplitudes."""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest

from quinturb.oscillatory import (
    CaseTag,
    OscPoly,
    classify_leading,
    f_tree,
    f_tree_oracle,
    f_tree_symbolic,
    g_m,
    g_m_oracle,
    g_m_symbolic,
    osc_primitive,
)
from quinturb.trees import LEAF, LabelAssignment, QuinticTree, enumerate_trees
from quinturb.util import DomainError, FitResult, ResourceError

F = Fraction


def node(*children):
    return QuinticTree(tuple(children))


ONE_NODE = node(LEAF, LEAF, LEAF, LEAF, LEAF)


# -- closed-form primitives -------------------------------------------------


def test_primitive_of_constant_is_the_ring_form():
    w = F(3, 2)
    poly = osc_primitive(OscPoly.constant(1.0), w)
    for t in (0.3, 1.0, 4.7):
        expected = (np.exp(1j * float(w) * t) - 1.0) / (1j * float(w))
        assert poly.evaluate(t) == pytest.approx(expected, abs=1e-14)


def test_primitive_of_constant_at_zero_frequency_is_t():
    poly = osc_primitive(OscPoly.constant(1.0), 0)
    assert poly.as_map() == {(F(0), 1): 1.0 + 0.0j}


def test_resonant_branch_integrates_the_bare_monomial():
    # t * exp(i a t) integrated against exp(-i a t) leaves t^2 / 2
    a = F(7, 3)
    p = OscPoly.from_map({(a, 1): 1.0 + 0.0j})
    poly = osc_primitive(p, -a)
    assert poly.as_map() == {(F(0), 2): 0.5 + 0.0j}


def test_primitive_vanishes_at_zero_to_the_bit(rng):
    # Exact for a single source term: the boundary constant is the bitwise
    # negation of the power-zero oscillatory coefficient.
    for _ in range(20):
        w = F(int(rng.integers(-9, 10)), 4)
        p = int(rng.integers(0, 3))
        c = complex(rng.standard_normal(), rng.standard_normal())
        poly = osc_primitive(
            OscPoly.from_map({(w, p): c}), F(int(rng.integers(-6, 7)), 4)
        )
        assert poly.evaluate(0.0) == 0.0


def test_primitive_of_a_sum_vanishes_at_zero_to_rounding(rng):
    for _ in range(20):
        terms = {}
        for _ in range(3):
            w = F(int(rng.integers(-9, 10)), 4)
            p = int(rng.integers(0, 3))
            terms[(w, p)] = complex(rng.standard_normal(), rng.standard_normal())
        poly = osc_primitive(OscPoly.from_map(terms), F(int(rng.integers(-6, 7)), 4))
        scale = max(abs(c) for _, c in poly.terms)
        assert abs(poly.evaluate(0.0)) <= 1e-15 * scale


def test_osc_poly_conjugate_negates_frequencies():
    p = OscPoly.from_map({(F(2), 1): 1.0 + 2.0j, (F(-1, 2), 0): -0.5j})
    q = p.conjugate()
    assert q.as_map() == {(F(-2), 1): 1.0 - 2.0j, (F(1, 2), 0): 0.5j}
    for t in (0.0, 0.9, 2.2):
        assert q.evaluate(t) == pytest.approx(p.evaluate(t).conjugate())


def test_merge_many_is_order_independent(rng):
    polys = []
    for _ in range(6):
        polys.append(
            OscPoly.from_map(
                {
                    (F(int(rng.integers(-3, 4)), 2), int(rng.integers(0, 2))): complex(
                        rng.standard_normal(), rng.standard_normal()
                    )
                }
            )
        )
    forward = OscPoly.merge_many(polys)
    backward = OscPoly.merge_many(reversed(polys))
    assert forward.terms == backward.terms


def test_osc_poly_document_round_trip():
    p = OscPoly.from_map({(F(5, 4), 2): 0.25 - 1.0j, (F(0), 0): 3.0})
    assert OscPoly.from_document(p.to_document()).terms == p.terms


def test_term_rows_are_sorted_by_power_then_frequency():
    p = OscPoly.from_map({(F(1), 1): 1.0, (F(-1), 0): 2.0, (F(2), 0): 3.0})
    rows = p.term_rows()
    assert [(r[0], r[1]) for r in rows] == [(0, "-1/1"), (0, "2/1"), (1, "1/1")]


# -- chain integrals --------------------------------------------------------


def test_empty_chain_is_one():
    assert g_m([], 3.7) == 1.0
    assert g_m_oracle([], 3.7) == 1.0


def test_single_frequency_chain_matches_ring_form():
    value = g_m([F(math.pi)], 1.0)
    assert value == pytest.approx(2.0j / math.pi, abs=1e-12)


def test_two_frequency_chain_matches_oracle():
    value = g_m([F(-1), F(1)], 1.0)
    oracle = g_m_oracle([F(-1), F(1)], 1.0, tol=1e-12)
    assert value == pytest.approx(oracle, abs=1e-10)


def test_resonant_chain_fills_the_simplex_volume():
    for m in range(5):
        freqs = [F(0)] * m
        expected = 2.0**m / math.factorial(m)
        assert g_m(freqs, 2.0) == pytest.approx(expected, rel=1e-13)
        assert g_m_oracle(freqs, 2.0) == pytest.approx(expected, rel=1e-9)


def test_chain_agrees_with_oracle_on_random_instances(rng):
    worst = 0.0
    for _ in range(200):
        m = int(rng.integers(0, 5))
        lsq = int(rng.integers(1, 6)) ** 2
        freqs = []
        for _ in range(m):
            num = 0
            while num == 0:
                num = int(rng.integers(-24, 25))
            freqs.append(F(num, lsq))
        t = float(rng.uniform(0.2, 5.0))
        worst = max(worst, abs(g_m(freqs, t) - g_m_oracle(freqs, t, tol=1e-10)))
    assert worst <= 1e-8


def test_oracle_rejects_deep_nesting():
    with pytest.raises(ResourceError):
        g_m_oracle([F(1)] * 6, 1.0)


def test_chain_derivative_peels_the_outermost_level(rng):
    for _ in range(15):
        m = int(rng.integers(1, 5))
        freqs = [F(int(rng.integers(-8, 9)), 4) for _ in range(m)]
        lhs = g_m_symbolic(freqs).derivative()
        rhs = g_m_symbolic(freqs[:-1]).frequency_shift(freqs[-1])
        lm, rm = lhs.as_map(), rhs.as_map()
        scale = max((abs(c) for c in rm.values()), default=1.0)
        for key in set(lm) | set(rm):
            assert abs(lm.get(key, 0.0) - rm.get(key, 0.0)) <= 1e-12 * scale


# -- case classification ----------------------------------------------------

CASE_INSTANCES = {
    "EvenResonantChain": [F(-3, 4), F(3, 4), F(-5, 4), F(5, 4)],
    "EvenGeneric": [F(1), F(2)],
    "Odd1": [F(2, 3)],
    "Odd2": [F(3, 4), F(-3, 4), F(3, 4)],
    "Odd3": [F(3, 4), F(-3, 4), F(5, 4)],
    "Odd4": [F(5), F(2), F(-2)],
    "Odd5": [F(1), F(2), F(-3)],
    "Odd6": [F(1), F(2), F(5)],
}


def test_alternating_pairs_classify_as_resonant_chain():
    tag = classify_leading(CASE_INSTANCES["EvenResonantChain"])
    assert tag.name == "EvenResonantChain"
    assert tag.power == 2


def test_repeating_triple_classifies_with_ring_factor():
    tag = classify_leading(CASE_INSTANCES["Odd2"])
    assert tag.name == "Odd2"
    assert tag.power == 1
    assert tag.oscillation == ("ring", F(3, 4))


def test_sum_free_triple_is_the_catch_all():
    tag = classify_leading(CASE_INSTANCES["Odd6"])
    assert tag.name == "Odd6"
    assert tag.power == 0


def test_classifier_rejects_zero_frequencies():
    with pytest.raises(DomainError):
        classify_leading([F(1), F(0)])


def test_classifier_covers_every_tag():
    for want, freqs in CASE_INSTANCES.items():
        assert classify_leading(freqs).name == want


def test_fitted_growth_matches_predicted_power():
    ts = np.geomspace(1e2, 1e4, 401)
    for want, freqs in CASE_INSTANCES.items():
        tag = classify_leading(freqs)
        vals = np.abs(g_m_symbolic(freqs).evaluate_many(ts))
        fit = FitResult.loglog(ts, vals)
        assert abs(fit.slope - tag.power) <= 0.1, (want, fit.slope)


def test_predicted_moduli_match_symbolic_leading_terms():
    for want, freqs in CASE_INSTANCES.items():
        tag = classify_leading(freqs)
        if tag.modulus is None:
            continue
        poly = g_m_symbolic(freqs)
        pmax = max(p for (_, p), _ in poly.terms)
        assert pmax == tag.power
        lead = {w: c for (w, p), c in poly.terms if p == pmax}
        if tag.oscillation is None:
            assert set(lead) == {F(0)}
        elif tag.oscillation[0] == "ring":
            assert set(lead) == {F(0), tag.oscillation[1]}
        else:
            assert set(lead) == {tag.oscillation[1]}
        for c in lead.values():
            assert abs(c) == pytest.approx(tag.modulus, rel=1e-6), want


# -- tree amplitudes --------------------------------------------------------


def test_leaf_amplitude_is_one():
    for t in (0.0, 0.5, 3.0):
        assert f_tree(LEAF, LabelAssignment((3,), 1), t) == 1.0


def test_one_node_amplitude_is_minus_i_times_ring():
    asg = LabelAssignment((2, 1, 1, 0, 1), 1)
    delta = 9 - 4 + 1 - 1 + 0 - 1  # root 3, alternating square sum
    for t in (0.4, 1.0, 2.5):
        expected = -1j * (np.exp(1j * delta * t) - 1.0) / (1j * delta)
        assert f_tree(ONE_NODE, asg, t) == pytest.approx(expected, abs=1e-13)


def test_two_node_amplitude_matches_region_quadrature(rng):
    for tree in enumerate_trees(2)[:3]:
        ks = tuple(int(v) for v in rng.integers(-3, 4, size=tree.leaf_count))
        asg = LabelAssignment(ks, 2)
        assert f_tree(tree, asg, 0.8) == pytest.approx(
            f_tree_oracle(tree, asg, 0.8), abs=1e-9
        )


def test_three_node_amplitudes_match_region_quadrature(rng):
    trees = enumerate_trees(3)
    picks = rng.choice(len(trees), size=3, replace=False)
    for i in picks:
        tree = trees[int(i)]
        ks = tuple(int(v) for v in rng.integers(-3, 4, size=tree.leaf_count))
        asg = LabelAssignment(ks, 2)
        assert f_tree(tree, asg, 1.1) == pytest.approx(
            f_tree_oracle(tree, asg, 1.1), abs=1e-8
        )


def test_amplitude_prefactor_uses_the_sign_exponent():
    # A chain in slot 1 has sign exponent 2, so the prefactor is (-i)^2 = -1.
    chain = node(ONE_NODE, LEAF, LEAF, LEAF, LEAF)
    ks = (3, 1, 4, 1, 5, 9, 2, 6, 5)
    poly = f_tree_symbolic(chain, LabelAssignment(ks, 1))
    direct = OscPoly.zero()
    from quinturb.trees import linear_extensions, omega_labels, sign_exponent

    assert sign_exponent(chain) == 2
    om = omega_labels(chain, LabelAssignment(ks, 1))
    for ext in linear_extensions(chain):
        direct = direct + g_m_symbolic([F(om.values[a]) for a in ext])
    assert poly.terms == (direct * (-1.0)).terms


def test_region_oracle_rejects_deep_trees():
    deep = node(node(ONE_NODE, LEAF, LEAF, LEAF, LEAF), LEAF, LEAF, LEAF, ONE_NODE)
    with pytest.raises(ResourceError):
        f_tree_oracle(deep, LabelAssignment(tuple(range(17)), 2), 1.0)
