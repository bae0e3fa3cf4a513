"""Balance-sheet model: validation, pro-rata weights, bounds, generation,
and the JSON wire format."""

import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fireclear import (
    FinancialSystem,
    Uniform,
    derive_relative_liabilities,
    dump_system,
    generate_random_system,
    lattice_bounds,
    load_system,
    system_from_dict,
    system_to_dict,
    validate,
)
from fireclear.errors import InvalidDistribution, ValidationFailure


class TestValidate:
    def test_counterexample_fixture_is_valid(self, two_bank_system):
        assert validate(two_bank_system) == []

    def test_self_liability_rejected(self, two_bank_system):
        L = two_bank_system.liabilities.copy()
        L[1, 2] = 0.5
        bad = FinancialSystem(L, two_bank_system.liquid, two_bank_system.holdings)
        codes = [v.code for v in validate(bad)]
        assert codes == ["NonzeroDiagonal"]

    def test_negative_liquid_rejected(self, two_bank_system):
        bad = FinancialSystem(
            two_bank_system.liabilities, [-1.0, 0.001], two_bank_system.holdings
        )
        assert "NegativeEntry" in [v.code for v in validate(bad)]

    def test_dimension_mismatch(self):
        bad = FinancialSystem(np.zeros((2, 4)), np.zeros(2), np.zeros((2, 1)))
        assert "DimensionMismatch" in [v.code for v in validate(bad)]

    def test_nan_rejected(self):
        bad = FinancialSystem(
            [[1.0, 0.0, np.nan], [1.0, 0.0, 0.0]], [0.0, 0.0], [[1.0], [1.0]]
        )
        assert "NonFiniteEntry" in [v.code for v in validate(bad)]

    def test_all_violations_reported(self):
        bad = FinancialSystem(
            [[1.0, 0.5, 0.0], [1.0, 0.0, 0.0]], [-1.0, 0.0], [[1.0], [1.0]]
        )
        codes = {v.code for v in validate(bad)}
        assert {"NonzeroDiagonal", "NegativeEntry"} <= codes

    def test_require_valid_raises_with_all_messages(self):
        bad = FinancialSystem(
            [[1.0, 0.5, 0.0], [1.0, 0.0, 0.0]], [-1.0, 0.0], [[1.0], [1.0]]
        )
        with pytest.raises(ValidationFailure) as err:
            bad.require_valid()
        assert "NonzeroDiagonal" in str(err.value) and "NegativeEntry" in str(err.value)


class TestRelativeLiabilities:
    def test_counterexample_weights(self, two_bank_system):
        rel = derive_relative_liabilities(two_bank_system)
        assert np.allclose(rel.pbar, [2.0, 1.0])
        assert rel.A[0, 1] == pytest.approx(0.5)
        assert rel.A[1, 0] == 0.0
        assert np.allclose(rel.a0, [0.5, 1.0])

    def test_empty_network(self):
        system = FinancialSystem(np.zeros((2, 3)), np.zeros(2), np.ones((2, 1)))
        rel = derive_relative_liabilities(system)
        assert np.all(rel.pbar == 0) and np.all(rel.A == 0) and np.all(rel.a0 == 0)

    def test_overlap_study_weights(self):
        from fireclear.scenarios import diversification_system

        rel = derive_relative_liabilities(diversification_system(1.0))
        assert np.allclose(rel.pbar, [2.85, 2.0])
        assert rel.A[0, 1] == pytest.approx(1.0 / 2.85)
        assert rel.A[1, 0] == pytest.approx(0.5)

    def test_row_sums_one_or_zero(self):
        rng = np.random.default_rng(3)
        for _ in range(25):
            n = int(rng.integers(1, 6))
            L = np.zeros((n, n + 1))
            inter = rng.uniform(0, 1, (n, n)) * (rng.random((n, n)) < 0.7)
            np.fill_diagonal(inter, 0.0)
            L[:, 1:] = inter
            L[:, 0] = rng.uniform(0, 1, n) * (rng.random(n) < 0.7)
            rel = derive_relative_liabilities(
                FinancialSystem(L, rng.uniform(0, 1, n), rng.uniform(0, 1, (n, 1)))
            )
            sums = rel.A.sum(axis=1) + rel.a0
            expected = (rel.pbar > 0).astype(float)
            assert np.allclose(sums, expected, atol=1e-12)
            assert np.all((rel.A >= 0) & (rel.A <= 1))

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=60, deadline=None)
    def test_reconstruction(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(1, 7))
        L = np.zeros((n, n + 1))
        inter = rng.uniform(0, 2, (n, n))
        np.fill_diagonal(inter, 0.0)
        L[:, 1:] = inter
        L[:, 0] = rng.uniform(0, 2, n)
        system = FinancialSystem(L, rng.uniform(0, 1, n), rng.uniform(0, 1, (n, 1)))
        rel = derive_relative_liabilities(system)
        rebuilt = np.column_stack([rel.a0, rel.A]) * rel.pbar[:, None]
        assert np.allclose(rebuilt, L, atol=1e-12)


class TestLatticeBounds:
    def test_counterexample_bounds(self, two_bank_system, two_bank_idf):
        b = lattice_bounds(two_bank_system, two_bank_idf)
        assert np.allclose(b.M_top, [0.0, 0.001])
        assert np.allclose(b.q_top, [1.0])
        assert np.allclose(b.p_top, [2.0, 1.0])

    def test_exact_solvency_gives_zero_liquidity_top(self, two_bank_idf):
        system = FinancialSystem(
            [[2.0, 0.0, 0.0], [1.0, 0.0, 0.0]], [2.0, 1.0], [[1.0], [1.0]]
        )
        b = lattice_bounds(system, two_bank_idf)
        assert np.all(b.M_top == 0.0)

    def test_overlap_study_bounds_by_hand(self):
        # bank 0: (0 + 0.5*2 - 2.85)^+ = 0; bank 1: (1 + 2.85/2.85 - 2)^+ = 0
        from fireclear.scenarios import diversification_idf, diversification_system

        b = lattice_bounds(diversification_system(1.0), diversification_idf(0.0))
        assert np.allclose(b.M_top, [0.0, 0.0], atol=1e-12)

    def test_top_dominates_liquidity_at_any_payment(self, rng_seed=11):
        rng = np.random.default_rng(rng_seed)
        for _ in range(30):
            n = int(rng.integers(2, 6))
            L = np.zeros((n, n + 1))
            inter = rng.uniform(0, 1, (n, n))
            np.fill_diagonal(inter, 0.0)
            L[:, 1:] = inter
            L[:, 0] = rng.uniform(0, 1, n)
            system = FinancialSystem(L, rng.uniform(0, 3, n), rng.uniform(0, 2, (n, 1)))
            rel = derive_relative_liabilities(system)
            from fireclear import LinearInverseDemand

            idf = LinearInverseDemand(mu=[1.0], cov=[[1.0]], alpha0=0.1, alpha=np.full(n, 0.1))
            b = lattice_bounds(system, idf)
            for _ in range(20):
                p = rng.uniform(0, 1, n) * rel.pbar
                M = np.maximum(system.liquid + rel.A.T @ p - rel.pbar, 0.0)
                assert np.all(M <= b.M_top + 1e-12)


class TestGeneration:
    def test_case_study_template(self):
        system = generate_random_system(50, 1, 3.0, 4.0, 3.0, Uniform(0.0, 1.0), seed=1)
        rel = derive_relative_liabilities(system)
        assert system.n == 50 and system.m == 1
        assert np.all(rel.pbar >= 3.0) and np.all(rel.pbar <= 3.0 + 49.0)
        assert np.all(np.diagonal(system.liabilities[:, 1:]) == 0.0)
        assert np.all(system.holdings == 4.0)

    def test_degenerate_distribution(self):
        system = generate_random_system(4, 1, 1.0, 1.0, 1.0, Uniform(0.0, 0.0), seed=5)
        assert np.all(system.liabilities[:, 1:] == 0.0)

    def test_determinism(self):
        a = generate_random_system(10, 2, 1.0, 2.0, 1.5, Uniform(0.0, 1.0), seed=42)
        b = generate_random_system(10, 2, 1.0, 2.0, 1.5, Uniform(0.0, 1.0), seed=42)
        assert np.array_equal(a.liabilities, b.liabilities)
        assert np.array_equal(a.liquid, b.liquid)
        assert np.array_equal(a.holdings, b.holdings)
        c = generate_random_system(10, 2, 1.0, 2.0, 1.5, Uniform(0.0, 1.0), seed=43)
        assert not np.array_equal(a.liabilities, c.liabilities)

    def test_bad_distribution(self):
        with pytest.raises(InvalidDistribution):
            Uniform(-0.5, 1.0)
        with pytest.raises(InvalidDistribution):
            Uniform(2.0, 1.0)
        with pytest.raises(InvalidDistribution):
            generate_random_system(0, 1, 1.0, 1.0, 1.0, Uniform(0.0, 1.0), seed=1)


class TestJsonFormat:
    def test_round_trip(self, two_bank_system, tmp_path):
        path = tmp_path / "system.json"
        dump_system(two_bank_system, path)
        loaded = load_system(path)
        assert np.array_equal(loaded.liabilities, two_bank_system.liabilities)
        assert np.array_equal(loaded.liquid, two_bank_system.liquid)
        assert np.array_equal(loaded.holdings, two_bank_system.holdings)
        payload = json.loads(path.read_text())
        assert set(payload) == {"n", "m", "liabilities", "liquid", "holdings"}

    def test_loader_rejects_negative(self, two_bank_system):
        payload = system_to_dict(two_bank_system)
        payload["liquid"][0] = -0.5
        with pytest.raises(ValidationFailure):
            system_from_dict(payload)

    def test_loader_rejects_nan(self, two_bank_system):
        payload = system_to_dict(two_bank_system)
        payload["holdings"][0][0] = float("nan")
        with pytest.raises(ValidationFailure):
            system_from_dict(payload)

    def test_loader_rejects_declared_size_mismatch(self, two_bank_system):
        payload = system_to_dict(two_bank_system)
        payload["n"] = 3
        with pytest.raises(ValidationFailure):
            system_from_dict(payload)
