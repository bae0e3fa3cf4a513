"""Fictitious default algorithm: insolvency sets, the restricted inner
problem, and equivalence with from-top iteration."""

import numpy as np
import pytest

from conftest import random_clearing_instance, two_bank_greatest_oracle
from fireclear import (
    ClearingState,
    FinancialSystem,
    SolverConfig,
    derive_relative_liabilities,
    insolvency_set,
    inner_fixed_point,
    solve_fda,
    solve_greatest,
)
from fireclear.network import lattice_bounds


class TestInsolvencySet:
    def test_two_bank_top_is_all_solvent(self, two_bank_system, two_bank_rel):
        # at full payments and unit price bank 0 holds 2.35 >= 2
        state = ClearingState([2.0, 1.0], [1.0], [0.0, 0.001])
        assert insolvency_set(two_bank_system, two_bank_rel, state) == frozenset()

    def test_fully_solvent_everywhere(self, two_bank_idf):
        system = FinancialSystem(
            [[1.0, 0.0, 0.0], [1.0, 0.0, 0.0]], [2.0, 2.0], [[1.0], [1.0]]
        )
        rel = derive_relative_liabilities(system)
        for p0 in (0.0, 0.5, 1.0):
            state = ClearingState([p0, p0], [0.5], [0.0, 0.0])
            assert insolvency_set(system, rel, state) == frozenset()

    def test_no_assets_all_insolvent(self):
        system = FinancialSystem(
            [[1.0, 0.0, 0.5], [1.0, 0.0, 0.0]], [0.0, 0.0], [[0.0], [0.0]]
        )
        rel = derive_relative_liabilities(system)
        state = ClearingState([0.0, 0.0], [1.0], [0.0, 0.0])
        assert insolvency_set(system, rel, state) == frozenset({0, 1})

    def test_boundary_bank_counts_as_solvent(self, two_bank_rel, two_bank_system):
        # assets exactly equal to obligations: strict test keeps it solvent
        system = FinancialSystem(
            [[2.0, 0.0, 0.0], [1.0, 0.0, 0.0]], [2.0, 1.0], [[0.0], [0.0]]
        )
        rel = derive_relative_liabilities(system)
        state = ClearingState([2.0, 1.0], [1.0], [0.0, 0.0])
        assert insolvency_set(system, rel, state) == frozenset()


class TestInnerFixedPoint:
    def test_empty_set_on_solvent_system_is_top(self, two_bank_idf, rule, cfg):
        system = FinancialSystem(
            [[1.0, 0.0, 0.0], [1.0, 0.0, 0.0]], [2.0, 2.0], [[1.0], [1.0]]
        )
        rel = derive_relative_liabilities(system)
        state, iters, ok = inner_fixed_point(system, rel, rule, two_bank_idf, frozenset(), cfg)
        b = lattice_bounds(system, two_bank_idf)
        assert ok
        assert np.allclose(state.p, b.p_top)
        assert np.allclose(state.q, b.q_top)
        assert np.allclose(state.M, b.M_top)

    def test_forced_insolvency_of_bank_zero(self, two_bank_system, two_bank_rel, rule, two_bank_idf, cfg):
        state, _, ok = inner_fixed_point(
            two_bank_system, two_bank_rel, rule, two_bank_idf, frozenset({0}), cfg
        )
        assert ok
        # an insolvent bank pays its full asset value, capped at its
        # obligation, and dumps its whole 2.35-unit portfolio
        assert state.p[0] == pytest.approx(min(2.0, 2.35 * state.q[0]), abs=1e-8)
        assert state.q[0] == pytest.approx(1.0 - 2.35 / 16.0, abs=1e-8)
        assert state.p[1] == pytest.approx(1.0)

    def test_all_insolvent_pays_asset_value_capped(self, two_bank_system, two_bank_rel, rule, two_bank_idf, cfg):
        state, _, ok = inner_fixed_point(
            two_bank_system, two_bank_rel, rule, two_bank_idf, frozenset({0, 1}), cfg
        )
        assert ok
        assets = (
            two_bank_system.liquid
            + two_bank_system.holdings @ state.q
            + two_bank_rel.A.T @ state.p
        )
        assert np.allclose(state.p, np.minimum(two_bank_rel.pbar, assets), atol=1e-8)
        # both dump everything: q = 1 - 4.35/15 with no market makers
        assert state.q[0] == pytest.approx(1.0 - 4.35 / 15.0, abs=1e-8)


class TestSolveFda:
    def test_two_bank_greatest(self, two_bank_system, two_bank_rel, rule, two_bank_idf, cfg):
        p, q, M = two_bank_greatest_oracle()
        report, trace = solve_fda(two_bank_system, two_bank_rel, rule, two_bank_idf, cfg)
        assert report.converged and report.direction == "FDA"
        assert np.allclose(report.state.p, p, atol=1e-9)
        assert np.allclose(report.state.q, q, atol=1e-9)
        assert np.allclose(report.state.M, M, atol=1e-9)
        assert trace.outer_iterations == 2  # empty set found, then repeated

    def test_solvent_terminates_in_two_rounds(self, two_bank_idf, rule, cfg):
        system = FinancialSystem(
            [[1.0, 0.0, 0.0], [1.0, 0.0, 0.0]], [2.0, 2.0], [[1.0], [1.0]]
        )
        rel = derive_relative_liabilities(system)
        report, trace = solve_fda(system, rel, rule, two_bank_idf, cfg)
        assert trace.outer_iterations == 2
        assert trace.evaluated == [frozenset(), frozenset()]
        assert np.allclose(report.state.p, rel.pbar)

    def test_matches_from_top_on_random_systems(self, rule, cfg):
        rng = np.random.default_rng(55)
        for _ in range(40):
            system, idf = random_clearing_instance(rng, n_max=10, m_max=1)
            rel = derive_relative_liabilities(system)
            fda_report, trace = solve_fda(system, rel, rule, idf, cfg)
            top_report = solve_greatest(system, rel, rule, idf, cfg)
            assert fda_report.state.distance(top_report.state) < 1e-8
            assert trace.outer_iterations <= system.n + 1
            for earlier, later in zip(trace.evaluated, trace.evaluated[1:]):
                assert earlier <= later

    def test_trace_serializes(self, two_bank_system, two_bank_rel, rule, two_bank_idf, cfg):
        _, trace = solve_fda(two_bank_system, two_bank_rel, rule, two_bank_idf, cfg)
        payload = trace.to_dict()
        assert payload["outer_iterations"] == len(payload["insolvency_sets"])
        assert all("state" in r for r in payload["rounds"])

    def test_monotone_outer_states(self, rule, cfg):
        rng = np.random.default_rng(77)
        for _ in range(20):
            system, idf = random_clearing_instance(rng, n_max=6, m_max=1)
            rel = derive_relative_liabilities(system)
            _, trace = solve_fda(system, rel, rule, idf, cfg)
            states = [r.state for r in trace.rounds]
            for earlier, later in zip(states, states[1:]):
                assert earlier.dominates(later, slack=1e-9)
