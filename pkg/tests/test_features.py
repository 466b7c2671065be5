"""Monomial bases, delay embedding, and design-matrix assembly."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import ngrc
from ngrc.dynamics import IntegratorId, SystemId, Trajectory
from ngrc.features import (
    EmbeddingConfig,
    basis_to_json,
    build_design,
    column_weight,
    embed,
    embedded_matrix,
    feature_rows,
    feature_vector,
    monomial_exponents,
    x_submatrix,
)


def count_bounded_degree(n_vars: int, p: int) -> int:
    """Independent count of multi-indices with total degree <= p (recursive)."""
    if n_vars == 0:
        return 1
    total = 0
    for e in range(p + 1):
        total += count_bounded_degree(n_vars - 1, p - e)
    return total


class TestMonomialBasis:
    def test_example_k1_d2_p2(self):
        basis = monomial_exponents(1, 2, 2)
        assert basis.m == 6
        expected = {(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)}
        assert {tuple(e) for e in basis.exponents} == expected

    def test_paper_cardinalities(self):
        assert monomial_exponents(1, 3, 2).m == 10
        assert monomial_exponents(2, 3, 2).m == 28

    def test_degree_zero(self):
        basis = monomial_exponents(3, 2, 0)
        assert basis.m == 1
        assert tuple(basis.exponents[0]) == (0,) * 6

    def test_counts_match_enumeration_grid(self):
        for k in range(1, 4):
            for d in range(1, 4):
                for p in range(0, 9):
                    basis = monomial_exponents(k, d, p)
                    assert basis.m == math.comb(k * d + p, p)
                    assert basis.m == count_bounded_degree(k * d, p)

    def test_graded_lex_ordering(self):
        basis = monomial_exponents(1, 3, 3)
        degrees = basis.exponents.sum(axis=1)
        assert (np.diff(degrees) >= 0).all()
        # Constant exactly once, and first.
        assert degrees[0] == 0
        assert (degrees[1:] > 0).all()
        # Within a degree, lexicographically decreasing exponent tuples.
        for deg in range(4):
            rows = basis.exponents[degrees == deg]
            for a, b in zip(rows[:-1], rows[1:]):
                assert tuple(a) > tuple(b)

    def test_unique(self):
        basis = monomial_exponents(2, 2, 4)
        seen = {tuple(e) for e in basis.exponents}
        assert len(seen) == basis.m

    def test_overflow_guard(self):
        with pytest.raises(ValueError):
            monomial_exponents(3, 3, 40)

    def test_json_export(self):
        basis = monomial_exponents(1, 1, 2)
        assert basis_to_json(basis) == "[[0], [1], [2]]"

    def test_design_csv_export(self, tmp_path):
        from ngrc.features import design_to_csv

        traj = Trajectory(np.array([[0.1], [0.2], [0.4]]), h=1.0)
        design = build_design(
            traj, EmbeddingConfig(k=1, tau=1, d=1), monomial_exponents(1, 1, 1), 2
        )
        path = tmp_path / "design.csv"
        design_to_csv(design, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "1,x1"
        back = np.loadtxt(path, delimiter=",", skiprows=1)
        np.testing.assert_allclose(back, design.psi)

    def test_names(self):
        basis = monomial_exponents(2, 2, 2)
        names = basis.names()
        assert names[0] == "1"
        assert "x1" in names and "x1_d1" in names and "x1^2" in names


class TestEmbed:
    def test_k1_is_identity(self, lorenz_short):
        cfg = EmbeddingConfig(k=1, tau=7, d=3)
        np.testing.assert_array_equal(embed(lorenz_short, cfg, 5), lorenz_short.states[5])

    def test_definition(self):
        states = np.arange(20, dtype=float).reshape(10, 2)
        traj = Trajectory(states, h=1.0)
        cfg = EmbeddingConfig(k=2, tau=3, d=2)
        np.testing.assert_array_equal(embed(traj, cfg, 0), [0, 1, 6, 7])

    def test_slice_by_hand_oracle(self, lorenz_short):
        cfg = EmbeddingConfig(k=3, tau=15, d=3)
        n = 11
        by_hand = np.concatenate(
            [
                lorenz_short.states[n],
                lorenz_short.states[n + 15],
                lorenz_short.states[n + 30],
            ]
        )
        np.testing.assert_array_equal(embed(lorenz_short, cfg, n), by_hand)

    def test_out_of_range(self, lorenz_short):
        cfg = EmbeddingConfig(k=2, tau=10, d=3)
        with pytest.raises(ValueError):
            embed(lorenz_short, cfg, len(lorenz_short) - 5)


class TestFeatureVector:
    def test_scalar_powers(self):
        basis = monomial_exponents(1, 1, 2)
        np.testing.assert_array_equal(feature_vector([2.0], basis), [1.0, 2.0, 4.0])

    def test_zero_vector(self):
        basis = monomial_exponents(2, 2, 3)
        vec = feature_vector(np.zeros(4), basis)
        assert vec[0] == 1.0
        assert (vec[1:] == 0.0).all()

    def test_brute_force_oracle(self, rng):
        basis = monomial_exponents(2, 3, 3)
        X = rng.normal(size=6)
        got = feature_vector(X, basis)
        for j, exps in enumerate(basis.exponents):
            value = 1.0
            for q, e in enumerate(exps):
                for _ in range(int(e)):
                    value *= X[q]
            assert got[j] == pytest.approx(value, rel=1e-12, abs=1e-15)

    def test_rows_match_vector_path(self, lorenz_short):
        cfg = EmbeddingConfig(k=2, tau=4, d=3)
        basis = monomial_exponents(2, 3, 2)
        emb = embedded_matrix(lorenz_short.states, cfg, 50)
        rows = feature_rows(emb, basis)
        for r in (0, 17, 49):
            np.testing.assert_allclose(
                rows[r], feature_vector(embed(lorenz_short, cfg, r), basis), rtol=1e-14
            )


class TestBuildDesign:
    def test_hand_expansion(self):
        traj = Trajectory(np.array([[0.1], [0.2], [0.4]]), h=1.0)
        cfg = EmbeddingConfig(k=1, tau=1, d=1)
        basis = monomial_exponents(1, 1, 1)
        design = build_design(traj, cfg, basis, 2)
        np.testing.assert_allclose(
            design.psi, np.array([[1.0, 0.1], [1.0, 0.2]]) / math.sqrt(2)
        )
        np.testing.assert_allclose(design.target(0), [0.1, 0.2])

    def test_constant_series_rank_one(self):
        traj = Trajectory(np.full((30, 1), 0.7), h=1.0)
        cfg = EmbeddingConfig(k=1, tau=1, d=1)
        basis = monomial_exponents(1, 1, 3)
        design = build_design(traj, cfg, basis, 20)
        assert np.linalg.matrix_rank(design.psi) == 1

    def test_insufficient_data_names_requirement(self, lorenz_short):
        cfg = EmbeddingConfig(k=2, tau=10, d=3)
        basis = monomial_exponents(2, 3, 2)
        needed = len(lorenz_short) + 10 + 1
        with pytest.raises(ValueError, match=f"at least {needed}"):
            build_design(lorenz_short, cfg, basis, len(lorenz_short))

    def test_adjacent_delay_columns_differ_by_order_h(self, lorenz_short):
        # Columns evaluating the same monomial at consecutive points differ by
        # about h times the derivative of the monomial along the flow.
        cfg = EmbeddingConfig(k=2, tau=1, d=3)
        basis = monomial_exponents(2, 3, 2)
        n_train = 400
        design = build_design(lorenz_short, cfg, basis, n_train)
        exps = [tuple(e) for e in basis.exponents]
        j_now = exps.index((1, 0, 0, 0, 0, 0))
        j_next = exps.index((0, 0, 0, 1, 0, 0))
        diff = np.linalg.norm(design.psi[:, j_next] - design.psi[:, j_now])
        # Gradient of phi(x) = x1 along the flow is the first RHS component;
        # evaluate it on denormalized states and map back through the scale.
        raw = lorenz_short.states[:n_train] * lorenz_short.scale
        rates = np.array([ngrc.lorenz_rhs(s)[0] for s in raw]) / lorenz_short.scale[0]
        bound = 0.01 * math.sqrt(np.mean(rates**2))
        assert diff <= 1.3 * bound
        assert diff >= 0.5 * bound

    def test_gram_entries_are_birkhoff_averages(self, lorenz_short):
        cfg = EmbeddingConfig(k=2, tau=3, d=3)
        basis = monomial_exponents(2, 3, 2)
        n_train = 300
        design = build_design(lorenz_short, cfg, basis, n_train)
        gram = design.psi.T @ design.psi
        emb = embedded_matrix(lorenz_short.states, cfg, n_train)
        for i, j in ((0, 0), (1, 5), (3, 3), (2, 27), (10, 20)):
            acc = 0.0
            for n in range(n_train):
                phi = feature_vector(emb[n], basis)
                acc += phi[i] * phi[j]
            acc /= n_train
            assert gram[i, j] == pytest.approx(acc, rel=1e-12, abs=1e-15)

    @pytest.mark.parametrize("k", [2, 3])
    def test_rank_deficiency_for_unit_lag(self, lorenz_k2, k):
        cfg = EmbeddingConfig(k=k, tau=1, d=3)
        basis = monomial_exponents(k, 3, 2)
        design = build_design(lorenz_k2, cfg, basis, 2000)
        sigma = np.linalg.svd(design.psi_hat, compute_uv=False)
        assert sigma[-1] <= 1e-12 * sigma[0]


class TestColumnWeight:
    def test_three_four_five(self):
        psi_hat, norms, zero = column_weight(np.array([[3.0], [4.0]]))
        np.testing.assert_allclose(psi_hat[:, 0], [0.6, 0.8])
        assert norms[0] == pytest.approx(5.0)
        assert not zero.any()

    def test_idempotent_on_unit_columns(self, rng):
        mat = rng.normal(size=(20, 6))
        once, _, _ = column_weight(mat)
        twice, norms, _ = column_weight(once)
        np.testing.assert_allclose(once, twice, rtol=1e-14)
        np.testing.assert_allclose(norms, np.ones(6), rtol=1e-14)

    def test_random_matrix_all_unit_norms(self, rng):
        mat = rng.normal(size=(20, 6)) * rng.uniform(0.1, 50, size=6)
        psi_hat, _, _ = column_weight(mat)
        np.testing.assert_allclose(np.linalg.norm(psi_hat, axis=0), np.ones(6), atol=1e-14)

    def test_zero_column_flagged_not_divided(self):
        mat = np.array([[1.0, 0.0], [2.0, 0.0]])
        psi_hat, norms, zero = column_weight(mat)
        assert zero.tolist() == [False, True]
        np.testing.assert_array_equal(psi_hat[:, 1], [0.0, 0.0])


class TestXSubmatrix:
    def test_ar1_matches_closed_form(self, rng):
        # AR(1) with autocorrelation e^{-gamma tau}; the column-weighted probe
        # matrix has condition number sqrt((1 + r) / (1 - r)).
        gamma, n = 0.05, 20000
        rho = math.exp(-gamma)
        noise = rng.normal(size=n + 200)
        x = np.empty(n + 200)
        x[0] = 0.0
        for t in range(1, n + 200):
            x[t] = rho * x[t - 1] + noise[t]
        traj = Trajectory(x[:, None], h=1.0)
        for tau in (5, 10, 20):
            sub = x_submatrix(traj, tau, n)
            kappa = ngrc.condition_number(sub.psi_hat)
            r = math.exp(-gamma * tau)
            expected = math.sqrt((1 + r) / (1 - r))
            assert kappa == pytest.approx(expected, rel=0.05)

    def test_lorenz_kappa_decays_toward_one(self, lorenz_k2):
        values = [
            ngrc.condition_number(x_submatrix(lorenz_k2, tau, 5000).psi_hat)
            for tau in (1, 5, 20, 100)
        ]
        assert all(a > b for a, b in zip(values[:-1], values[1:]))
        assert values[-1] < 1.6

    def test_constant_series_degenerate(self):
        traj = Trajectory(np.full((200, 1), 0.3), h=1.0)
        sub = x_submatrix(traj, 5, 100)
        assert sub.degenerate
        assert ngrc.condition_number(sub.psi_hat) == ngrc.KAPPA_SENTINEL


@given(st.integers(1, 3), st.integers(1, 2), st.integers(0, 3))
@settings(max_examples=25, deadline=None)
def test_basis_size_formula(k, d, p):
    assert monomial_exponents(k, d, p).m == math.comb(k * d + p, p)


@given(st.lists(st.floats(-2, 2), min_size=4, max_size=4))
@settings(max_examples=25, deadline=None)
def test_feature_vector_constant_entry(values):
    basis = monomial_exponents(2, 2, 2)
    vec = feature_vector(np.array(values), basis)
    assert vec[0] == 1.0
