"""Constrained tuple enumeration, parity permutations, pairing expectations."""

from __future__ import annotations

import math
from itertools import product

import numpy as np
import pytest

from quinturb.chaos import ComplexGaussianIndexing, sample_chaos_batch
from quinturb.lattice import (
    Profile,
    RegimeParams,
    alternating_sum,
    apply_permutation,
    count_c_l,
    delta_numerator,
    enumerate_c_l,
    enumerate_c_sigma,
    enumerate_c_tree,
    kbar_numerator,
    pairing_expectation,
    parity_permutations,
    passing_permutation_count,
    tuples_to_csv,
)
from quinturb.trees import LEAF, LabelAssignment, QuinticTree, admissible
from quinturb.util import DomainError, FitResult, ResourceError

ONE_NODE = QuinticTree((LEAF,) * 5)


def wide_profile(radius: float = 1.5) -> Profile:
    return Profile("poly_bump", radius=radius, height=1.0)


# -- arithmetic helpers -----------------------------------------------------


def test_alternating_sum_signs():
    assert alternating_sum((3, 1, 4, 1, 5)) == 3 - 1 + 4 - 1 + 5
    assert alternating_sum((2,)) == 2


def test_delta_numerator_matches_definition():
    mt = (2, 1, 1, 0, 1)
    k = alternating_sum(mt)
    assert delta_numerator(mt) == k * k - 4 + 1 - 1 + 0 - 1
    with pytest.raises(DomainError):
        delta_numerator((1, 2, 3))


def test_kbar_is_the_trailing_pair_gap():
    assert kbar_numerator((9, 9, 9, 2, 7)) == 5
    with pytest.raises(DomainError):
        kbar_numerator((1, 2, 3))


# -- single-node enumeration ------------------------------------------------


def brute_force_c_l(k, params, support):
    window = support.support_window(params.lattice_size)
    wset = set(window)
    out = []
    for m1, m2, m3, m4 in product(window, repeat=4):
        m5 = k - m1 + m2 - m3 + m4
        if m5 not in wset:
            continue
        asg = LabelAssignment((m1, m2, m3, m4, m5), params.lattice_size)
        if admissible(ONE_NODE, asg, k, params.mu, params.nu):
            out.append((m1, m2, m3, m4, m5))
    return out


def test_enumeration_agrees_with_tree_admissibility():
    params = RegimeParams(lattice_size=2, rho=1.0, mu=2, nu=2)
    support = wide_profile(1.5)
    for k in (-1, 0, 2):
        got = list(enumerate_c_l(k, params, support))
        assert sorted(got) == sorted(brute_force_c_l(k, params, support))


def test_hand_window_count_matches_brute_force():
    params = RegimeParams(lattice_size=1, rho=1.0, mu=2, nu=2)
    support = wide_profile(1.5)
    assert support.support_window(1) == [-1, 0, 1]
    got = list(enumerate_c_l(0, params, support))
    assert len(got) == len(brute_force_c_l(0, params, support))
    for mt in got:
        assert alternating_sum(mt) == 0


def test_vanished_cutoffs_leave_only_the_linear_constraint():
    params = RegimeParams(lattice_size=2, rho=1.0, mu=float("inf"), nu=float("inf"))
    support = wide_profile(1.2)
    window = support.support_window(2)
    wset = set(window)
    expected = sum(
        1
        for m1, m2, m3, m4 in product(window, repeat=4)
        if (1 - m1 + m2 - m3 + m4) in wset
    )
    assert count_c_l(1, params, support) == expected


def test_emitted_tuples_reverify_exactly():
    for L in (2, 4):
        params = RegimeParams(lattice_size=L, rho=1.0, mu=3, nu=5)
        support = wide_profile(1.25)
        m_thr = params.momentum_threshold()
        d_thr = params.frequency_threshold()
        for k in (-1, 0, 1):
            for mt in enumerate_c_l(k, params, support):
                assert alternating_sum(mt) == k
                assert abs(mt[4] - mt[3]) >= m_thr
                assert abs(delta_numerator(mt)) >= d_thr


def test_stream_is_deterministic_and_lexicographic():
    params = RegimeParams(lattice_size=2, rho=1.0, mu=2, nu=2)
    support = wide_profile(1.5)
    first = list(enumerate_c_l(0, params, support))
    second = list(enumerate_c_l(0, params, support))
    assert first == second
    assert first == sorted(first)


def test_tuple_count_scales_like_fourth_power():
    support = Profile("poly_bump", radius=1.0, height=1.0)
    sizes = [8, 16, 32, 64]
    counts = [
        count_c_l(2, RegimeParams(lattice_size=L, rho=1.0, mu=8, nu=4), support)
        for L in sizes
    ]
    fit = FitResult.loglog(sizes, counts)
    assert abs(fit.slope - 4.0) <= 0.2


def test_count_matches_stream_count():
    support = Profile("poly_bump", radius=1.0, height=1.0)
    for size in (2, 4, 8):
        for k in (-2, 0, 1, 3):
            params = RegimeParams(lattice_size=size, rho=1.0, mu=8, nu=4)
            streamed = sum(1 for _ in enumerate_c_l(k, params, support))
            assert count_c_l(k, params, support) == streamed


def test_tuples_to_csv_round_trips(tmp_path):
    params = RegimeParams(lattice_size=1, rho=1.0, mu=2, nu=2)
    support = wide_profile(1.5)
    path = tmp_path / "tuples.csv"
    n = tuples_to_csv(path, enumerate_c_l(0, params, support))
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "m1,m2,m3,m4,m5,delta_num"
    assert len(lines) == n + 1
    for line, mt in zip(lines[1:], enumerate_c_l(0, params, support)):
        cells = [int(c) for c in line.split(",")]
        assert tuple(cells[:5]) == mt
        assert cells[5] == delta_numerator(mt)


# -- parity permutations ----------------------------------------------------


def test_parity_group_has_twelve_elements():
    perms = parity_permutations()
    assert len(perms) == 12
    assert len(set(perms)) == 12


def test_identity_is_a_parity_permutation():
    assert (0, 1, 2, 3, 4) in parity_permutations()


def test_adjacent_transposition_breaks_parity():
    assert (1, 0, 2, 3, 4) not in parity_permutations()


def test_parity_permutations_preserve_slot_classes():
    for perm in parity_permutations():
        for slot, src in enumerate(perm):
            assert slot % 2 == src % 2


def test_parity_permutations_form_a_group():
    perms = set(parity_permutations())
    for p in perms:
        for q in perms:
            composed = tuple(p[q[i]] for i in range(5))
            assert composed in perms


def test_apply_permutation_reads_source_indices():
    assert apply_permutation((10, 20, 30, 40, 50), (2, 1, 0, 3, 4)) == (
        30,
        20,
        10,
        40,
        50,
    )
    with pytest.raises(DomainError):
        apply_permutation((1, 2, 3), (0, 1, 2, 3, 4))


# -- sigma-constrained enumeration ------------------------------------------


def test_identity_sigma_reproduces_the_base_stream():
    params = RegimeParams(lattice_size=2, rho=1.0, mu=2, nu=2)
    support = wide_profile(1.5)
    base = list(enumerate_c_l(0, params, support))
    assert list(enumerate_c_sigma(0, (0, 1, 2, 3, 4), params, support)) == base


def test_parity_image_keeps_the_resonance_value():
    params = RegimeParams(lattice_size=2, rho=1.0, mu=2, nu=3)
    support = wide_profile(1.5)
    m_thr = params.momentum_threshold()
    for sigma in parity_permutations():
        expected = [
            mt
            for mt in enumerate_c_l(0, params, support)
            if abs(apply_permutation(mt, sigma)[4] - apply_permutation(mt, sigma)[3])
            >= m_thr
        ]
        got = list(enumerate_c_sigma(0, sigma, params, support))
        assert got == expected
        for mt in got:
            image = apply_permutation(mt, sigma)
            assert delta_numerator(image) == delta_numerator(mt)
            assert alternating_sum(image) == alternating_sum(mt)


def test_sigma_counts_match_inverse_counts():
    params = RegimeParams(lattice_size=2, rho=1.0, mu=2, nu=2)
    support = wide_profile(1.5)
    for sigma in parity_permutations():
        inverse = tuple(sigma.index(i) for i in range(5))
        n_fwd = sum(1 for _ in enumerate_c_sigma(1, sigma, params, support))
        n_bwd = sum(1 for _ in enumerate_c_sigma(1, inverse, params, support))
        assert n_fwd == n_bwd


def test_passing_count_totals_the_pairwise_cutoffs():
    mt = (3, 0, 2, 5, 9)
    m_thr = 3
    direct = 0
    for sigma in parity_permutations():
        image = apply_permutation(mt, sigma)
        if abs(image[4] - image[3]) >= m_thr:
            direct += 1
    assert passing_permutation_count(mt, m_thr) == direct


def test_tree_enumeration_reduces_to_the_five_tuple_stream():
    params = RegimeParams(lattice_size=2, rho=1.0, mu=2, nu=2)
    support = wide_profile(1.5)
    via_tree = list(enumerate_c_tree(ONE_NODE, 0, params, support))
    assert via_tree == list(enumerate_c_l(0, params, support))


def test_tree_enumeration_guards_the_candidate_grid():
    params = RegimeParams(lattice_size=8, rho=1.0, mu=2, nu=2)
    support = wide_profile(1.5)
    with pytest.raises(ResourceError):
        list(enumerate_c_tree(ONE_NODE, 0, params, support, cap=10))


# -- pairing expectations ---------------------------------------------------


def test_distinct_tuple_pairs_to_one():
    mt = (1, 2, 3, 4, 5)
    assert pairing_expectation(mt, mt) == pytest.approx(1.0)
    assert pairing_expectation(mt, mt, method="chaos") == pytest.approx(1.0)


def test_parity_breaking_transposition_pairs_to_zero():
    mt = (1, 2, 3, 4, 5)
    swapped = (2, 1, 3, 4, 5)
    assert pairing_expectation(mt, swapped) == 0.0
    assert abs(pairing_expectation(mt, swapped, method="chaos")) <= 1e-12


def test_parity_preserving_image_pairs_to_one():
    mt = (1, 2, 3, 4, 5)
    image = apply_permutation(mt, (2, 3, 4, 1, 0))
    assert pairing_expectation(mt, image) == pytest.approx(1.0)


def test_repeated_momentum_class_counting_matches_chaos_oracle():
    cases = [
        (1, 2, 1, 4, 5),
        (1, 1, 1, 2, 3),
        (0, 0, 0, 0, 0),
        (2, 2, 2, 2, 2),
        (1, 2, 1, 2, 1),
    ]
    for mt in cases:
        fast = pairing_expectation(mt, mt)
        oracle = pairing_expectation(mt, mt, method="chaos")
        assert fast == pytest.approx(oracle, rel=1e-12, abs=1e-12)


def test_repeated_momentum_expectation_matches_monte_carlo():
    from quinturb.lattice import _leaf_word

    mt = (1, 2, 1, 4, 5)
    exact = pairing_expectation(mt, mt).real
    word = _leaf_word(mt, ComplexGaussianIndexing())
    mode = alternating_sum(mt)
    vals = np.abs(sample_chaos_batch(word, mode=mode, n_samples=1_000_000, seed=5)) ** 2
    se = vals.std(ddof=1) / math.sqrt(vals.size)
    assert abs(vals.mean() - exact) <= 5.0 * se


def test_pairing_expectation_is_hermitian():
    a = (1, 2, 1, 4, 5)
    b = (1, 4, 1, 2, 5)
    for method in ("auto", "chaos"):
        fwd = pairing_expectation(a, b, method=method)
        bwd = pairing_expectation(b, a, method=method)
        assert fwd == pytest.approx(bwd.conjugate(), abs=1e-12)


def test_pairing_expectation_rejects_bad_input():
    with pytest.raises(DomainError):
        pairing_expectation((1, 2, 3), (1, 2, 3, 4, 5))
    with pytest.raises(DomainError):
        pairing_expectation((1, 2, 3, 4, 5), (1, 2, 3, 4, 5), method="nope")
