"""Chaos algebra: Wick product, splitting counts, sampling, norms."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quinturb.chaos import (
    ChaosExpansion,
    ComplexGaussianIndexing,
    GaussianSample,
    MultiIndex,
    basis_eval,
    c_alpha,
    hermite_eval,
    pair_expectation,
    sample_chaos,
    sample_chaos_batch,
    sobolev_x_norm,
    truncate_degree,
    wick_product,
)
from quinturb.util import DomainError


def unit_at(var: int, mode: int = 0, lattice_size: int = 1, value=1.0) -> ChaosExpansion:
    return ChaosExpansion(lattice_size, {MultiIndex.unit(var): {mode: value}})


def constant(value, lattice_size: int = 1, mode: int = 0) -> ChaosExpansion:
    return ChaosExpansion(lattice_size, {MultiIndex.zero(): {mode: value}})


# -- strategies -------------------------------------------------------------

finite_complex = st.builds(
    complex,
    st.floats(-2.0, 2.0, allow_nan=False),
    st.floats(-2.0, 2.0, allow_nan=False),
)

multi_indices = st.dictionaries(
    st.integers(0, 4), st.integers(1, 3), min_size=0, max_size=3
).map(MultiIndex.of)


def expansions(max_degree: int = 3, lattice_size: int = 2):
    idx = st.dictionaries(
        st.integers(0, 3), st.integers(1, max_degree), min_size=1, max_size=2
    ).map(MultiIndex.of).filter(lambda a: a.degree <= max_degree)
    modes = st.dictionaries(st.integers(-2, 2), finite_complex, min_size=1, max_size=2)
    return st.dictionaries(idx, modes, min_size=1, max_size=2).map(
        lambda coeffs: ChaosExpansion(lattice_size, coeffs)
    )


def expansion_equal(a: ChaosExpansion, b: ChaosExpansion, tol: float = 0.0) -> bool:
    keys = set(a.coeffs) | set(b.coeffs)
    scale = max(
        (abs(v) for e in (a, b) for modes in e.coeffs.values() for v in modes.values()),
        default=0.0,
    )
    for alpha in keys:
        modes = set(a.coeffs.get(alpha, {})) | set(b.coeffs.get(alpha, {}))
        for m in modes:
            diff = abs(a.coefficient(alpha, m) - b.coefficient(alpha, m))
            if diff > tol * max(scale, 1.0):
                return False
    return True


# -- multi-indices ----------------------------------------------------------


def test_multi_index_drops_zero_multiplicities():
    assert MultiIndex.of({0: 1, 1: 0}) == MultiIndex.unit(0)


def test_multi_index_rejects_nonpositive_multiplicity():
    with pytest.raises(DomainError):
        MultiIndex(((0, 0),))


def test_multi_index_equality_is_map_equality():
    assert MultiIndex(((1, 2), (0, 1))) == MultiIndex.of({0: 1, 1: 2})
    assert hash(MultiIndex(((1, 2), (0, 1)))) == hash(MultiIndex.of({0: 1, 1: 2}))


def test_multi_index_splittings_cover_all_ordered_pairs():
    alpha = MultiIndex.of({0: 2, 1: 1})
    parts = list(alpha.splittings())
    assert len(parts) == 6  # (2+1)*(1+1)
    assert all(a.add(b) == alpha for a, b in parts)


# -- Wick product -----------------------------------------------------------


def test_wick_square_of_unit_variable_weights_sqrt2():
    phi = unit_at(0)
    out = wick_product(phi, phi)
    assert out.indices() == [MultiIndex.of({0: 2})]
    assert out.coefficient(MultiIndex.of({0: 2}), 0) == pytest.approx(math.sqrt(2.0))


def test_wick_square_matches_hermite_projection_oracle():
    # Multiplying two degree-1 samples and projecting off degree <= 1 leaves
    # x^2 - 1, whose normalized basis value is (x^2 - 1)/sqrt(2).  The Wick
    # square must reproduce that sample-by-sample.
    phi = unit_at(0)
    out = wick_product(phi, phi)
    for x in (-1.3, 0.0, 0.4, 2.2):
        sample = GaussianSample({0: x}, rng_seed=0)
        got = sample_chaos(out, sample)[0]
        assert got == pytest.approx(x * x - 1.0)


def test_wick_with_constant_acts_as_scalar():
    psi = ChaosExpansion(
        1, {MultiIndex.unit(0): {0: 1.0 + 2.0j, 1: -0.5j}, MultiIndex.of({1: 2}): {0: 3.0}}
    )
    out = wick_product(constant(2.5 - 1.0j), psi)
    assert expansion_equal(out, psi.scaled(2.5 - 1.0j), tol=1e-15)


def test_wick_disjoint_variables_has_unit_weight():
    out = wick_product(unit_at(0), unit_at(1))
    assert out.coefficient(MultiIndex.of({0: 1, 1: 1}), 0) == pytest.approx(1.0)


def test_wick_convolves_modes():
    phi = unit_at(0, mode=1, lattice_size=4)
    psi = unit_at(1, mode=-3, lattice_size=4)
    out = wick_product(phi, psi)
    assert out.mode_set() == {-2}


def test_wick_rejects_mismatched_lattice_sizes():
    with pytest.raises(DomainError):
        wick_product(unit_at(0, lattice_size=1), unit_at(0, lattice_size=2))


@given(expansions(), expansions())
@settings(max_examples=40, deadline=None)
def test_wick_commutativity_exact(phi, psi):
    ab = wick_product(phi, psi)
    ba = wick_product(psi, phi)
    assert expansion_equal(ab, ba, tol=0.0)


@given(expansions(max_degree=2), expansions(max_degree=2), expansions(max_degree=2))
@settings(max_examples=25, deadline=None)
def test_wick_associativity_to_1e12(phi, psi, chi):
    left = wick_product(wick_product(phi, psi), chi)
    right = wick_product(phi, wick_product(psi, chi))
    assert expansion_equal(left, right, tol=1e-12)


@given(expansions(), expansions())
@settings(max_examples=40, deadline=None)
def test_wick_degree_additivity(phi, psi):
    out = wick_product(phi, psi)
    allowed = {d1 + d2 for d1 in phi.degrees() for d2 in psi.degrees()}
    assert out.degrees() <= allowed


# -- splitting counts -------------------------------------------------------


def test_c_alpha_unit_index_is_one():
    assert c_alpha(MultiIndex.unit(0)) == 1


def test_c_alpha_doubled_index_is_one():
    assert c_alpha(MultiIndex.of({0: 2})) == 1


def test_c_alpha_three_distinct_units_is_twelve():
    assert c_alpha(MultiIndex.of({0: 1, 1: 1, 2: 1})) == 12


def test_c_alpha_rejects_empty_index():
    with pytest.raises(DomainError):
        c_alpha(MultiIndex.zero())


def brute_force_c_alpha(alpha: MultiIndex) -> int:
    if alpha.degree == 0:
        return 0
    if alpha.degree == 1:
        return 1
    total = 0
    for a, b in alpha.splittings():
        if a.degree == 0 or b.degree == 0:
            continue  # empty parts carry weight 0
        total += brute_force_c_alpha(a) * brute_force_c_alpha(b)
    return total


def catalan(m: int) -> int:
    return math.factorial(2 * m) // (math.factorial(m) * math.factorial(m + 1))


@given(multi_indices.filter(lambda a: 1 <= a.degree <= 6))
@settings(max_examples=60, deadline=None)
def test_c_alpha_matches_closed_form_and_brute_force(alpha):
    closed = catalan(alpha.degree - 1) * math.factorial(alpha.degree) // alpha.factorial()
    assert c_alpha(alpha) == closed
    assert c_alpha(alpha) == brute_force_c_alpha(alpha)


# -- Hermite evaluation -----------------------------------------------------


@pytest.mark.parametrize("x", [-2.0, 0.0, 0.7, 3.1])
def test_hermite_order_zero_is_one(x):
    assert hermite_eval(0, x) == 1.0


def test_hermite_order_two_at_two_is_three():
    assert hermite_eval(2, 2.0) == pytest.approx(3.0)


def test_hermite_order_three_at_one_is_minus_two():
    assert hermite_eval(3, 1.0) == pytest.approx(-2.0)


def test_hermite_moments_match_orthogonality_weights(rng):
    draws = rng.standard_normal(1_000_000)
    tables = [np.ones_like(draws), draws.copy()]
    for order in range(1, 4):
        tables.append(draws * tables[order] - order * tables[order - 1])
    for m in range(5):
        for n in range(5):
            prod = tables[m] * tables[n]
            mean = prod.mean()
            se = prod.std(ddof=1) / math.sqrt(prod.size)
            expect = float(math.factorial(n)) if m == n else 0.0
            assert abs(mean - expect) <= 5.0 * max(se, 1e-12)


# -- sampling ---------------------------------------------------------------


def test_sample_chaos_constant_passes_through():
    phi = ChaosExpansion(1, {MultiIndex.zero(): {0: 2.0 + 1.0j, 3: -4.0}})
    out = sample_chaos(phi, GaussianSample({}, rng_seed=1))
    assert out == {0: 2.0 + 1.0j, 3: -4.0}


def test_sample_chaos_degree_one_is_the_draw():
    phi = unit_at(0, mode=2, lattice_size=4)
    out = sample_chaos(phi, GaussianSample({0: 1.7}, rng_seed=1))
    assert out[2] == pytest.approx(1.7)


def test_sample_chaos_missing_variable_rejected():
    with pytest.raises(DomainError):
        sample_chaos(unit_at(5), GaussianSample({0: 1.0}, rng_seed=1))


def test_sample_chaos_agrees_with_basis_eval():
    alpha = MultiIndex.of({0: 2, 1: 1})
    phi = ChaosExpansion(1, {alpha: {0: 1.5 - 0.5j}})
    values = {0: 0.8, 1: -1.1}
    got = sample_chaos(phi, GaussianSample(values, rng_seed=1))[0]
    assert got == pytest.approx((1.5 - 0.5j) * basis_eval(alpha, values))


def test_sample_mean_of_pure_second_order_element_vanishes():
    phi = ChaosExpansion(1, {MultiIndex.of({0: 2}): {0: 1.0}})
    vals = sample_chaos_batch(phi, mode=0, n_samples=100_000, seed=7)
    mean = vals.real.mean()
    se = vals.real.std(ddof=1) / math.sqrt(vals.size)
    assert abs(mean) <= 5.0 * se


def test_gaussian_sample_is_reproducible():
    a = GaussianSample.draw([3, 1, 4], rng_seed=99)
    b = GaussianSample.draw([1, 3, 4], rng_seed=99)
    assert a.values == b.values


def test_batch_sampler_is_chunk_deterministic():
    phi = ChaosExpansion(1, {MultiIndex.unit(0): {0: 1.0}, MultiIndex.of({1: 2}): {0: 2.0}})
    a = sample_chaos_batch(phi, mode=0, n_samples=5000, seed=3)
    b = sample_chaos_batch(phi, mode=0, n_samples=9000, seed=3)
    assert np.array_equal(a, b[:5000])


# -- pair expectations ------------------------------------------------------


def test_pair_expectation_of_basis_element_is_one():
    phi = unit_at(0)
    assert pair_expectation(phi, phi, 0, 0) == pytest.approx(1.0)


def test_pair_expectation_distinct_indices_is_zero():
    assert pair_expectation(unit_at(0), unit_at(1), 0, 0) == 0.0


def test_pair_expectation_matches_monte_carlo_on_degree_five(rng):
    coeffs = {}
    for alpha in (
        MultiIndex.of({0: 5}),
        MultiIndex.of({0: 3, 1: 2}),
        MultiIndex.of({0: 1, 1: 2, 2: 2}),
    ):
        coeffs[alpha] = {0: complex(rng.standard_normal(), rng.standard_normal())}
    phi = ChaosExpansion(1, coeffs)
    exact = pair_expectation(phi, phi, 0, 0)
    vals = np.abs(sample_chaos_batch(phi, mode=0, n_samples=100_000, seed=11)) ** 2
    se = vals.std(ddof=1) / math.sqrt(vals.size)
    assert abs(vals.mean() - exact.real) <= 5.0 * se


# -- Sobolev-weighted norm --------------------------------------------------


def test_initial_datum_norm_is_at_most_one(smooth_profile):
    from quinturb.lattice import RegimeParams
    from quinturb.picard import picard_recursion

    params = RegimeParams(lattice_size=4, rho=1.0, mu=4, nu=4)
    datum = picard_recursion(0, params, smooth_profile).coefficients
    s = 1.0
    xs = np.linspace(-0.6, 0.6, 4001)
    d0 = float(
        np.max((1.0 + xs * xs) ** (s / 2.0) * np.abs(smooth_profile.evaluate_array(xs)))
    )
    assert sobolev_x_norm(datum, d0, s) <= 1.0


def test_sobolev_norm_of_zero_expansion_is_zero():
    assert sobolev_x_norm(ChaosExpansion(4), 1.0, 0.5) == 0.0


def test_sobolev_norm_is_homogeneous():
    phi = ChaosExpansion(
        2, {MultiIndex.unit(0): {1: 0.3 + 0.1j}, MultiIndex.of({0: 2, 1: 1}): {-1: 2.0}}
    )
    base = sobolev_x_norm(phi, 0.7, 1.5)
    assert sobolev_x_norm(phi.scaled(-3.7j), 0.7, 1.5) == pytest.approx(3.7 * base)


def test_sobolev_norm_rejects_constant_component():
    with pytest.raises(DomainError):
        sobolev_x_norm(constant(1.0, lattice_size=2), 1.0, 0.0)


def test_sobolev_norm_rejects_nonpositive_radius():
    with pytest.raises(DomainError):
        sobolev_x_norm(unit_at(0, lattice_size=2), 0.0, 0.0)


# -- degree truncation ------------------------------------------------------


def test_truncate_above_max_degree_is_identity():
    phi = ChaosExpansion(1, {MultiIndex.of({0: 3}): {0: 1.0}, MultiIndex.unit(1): {0: 2.0}})
    assert expansion_equal(truncate_degree(phi, 3), phi)


def test_truncate_to_zero_empties_degree_one():
    assert truncate_degree(unit_at(0), 0).coeffs == {}


def test_truncate_keeps_series_term_iff_degree_fits(smooth_profile):
    from quinturb.lattice import RegimeParams
    from quinturb.picard import picard_recursion

    params = RegimeParams(lattice_size=2, rho=1.0, mu=4, nu=4)
    state = picard_recursion(1, params, smooth_profile).coefficients
    assert expansion_equal(truncate_degree(state, 5), state)
    assert truncate_degree(state, 4).coeffs == {}


# -- complex Gaussian indexing ----------------------------------------------


def test_var_id_is_injective_on_window():
    seen = {}
    for comp in (0, 1):
        for m in range(-10, 11):
            vid = ComplexGaussianIndexing.var_id(comp, m)
            assert vid not in seen
            seen[vid] = (comp, m)
            assert ComplexGaussianIndexing.inverse(vid) == (comp, m)


def test_var_id_rejects_bad_component():
    with pytest.raises(DomainError):
        ComplexGaussianIndexing.var_id(2, 0)


def test_complex_gaussian_has_unit_second_moment():
    idx = ComplexGaussianIndexing()
    g = idx.gaussian_factor(1, 3)
    assert pair_expectation(g, g, 3, 3) == pytest.approx(1.0)


def test_conjugate_factor_lands_at_negated_mode():
    idx = ComplexGaussianIndexing()
    g = idx.gaussian_factor(1, 3, conjugate=True)
    assert g.mode_set() == {-3}


def test_document_round_trip():
    phi = ChaosExpansion(
        4, {MultiIndex.of({0: 2, 3: 1}): {1: 0.5 - 2.0j}, MultiIndex.unit(1): {-2: 1.0j}}
    )
    again = ChaosExpansion.from_document(phi.to_document())
    assert expansion_equal(phi, again)
    assert again.lattice_size == 4
