"""
Unit Tests for the Layout Regularizer

Purpose:
    Residuals, weights, BIP assembly and the full regularize pipeline on
    small layouts whose optimum can be checked by hand or by brute force.

Usage:
    pytest src/tests/unit/test_regularizer.py -v
"""

import itertools
import math

import numpy as np
import pytest

from facreg.core.attrspace import build_model_spaces
from facreg.core.config import (
    AttributeWeights,
    Config,
    PruningConfig,
    WeightMode,
    WeightsConfig,
)
from facreg.core.geometry import make_params
from facreg.core.lp_writer import export_lp
from facreg.core.regularizer import (
    OMEGA_FLOOR,
    build_bip,
    category_margin,
    compare_pruning,
    compute_residuals,
    regularize,
    resolve_weights,
)
from facreg.core.solver import solve_bb
from facreg.errors import NoSolution, RegularizationError, SpaceMismatch
from facreg.evaluation.audit import audit_constraints, coincident_pairs
from facreg.evaluation.meanshift import meanshift_baseline
from facreg.evaluation.metrics import prf
from facreg.evaluation.noise import NoiseSpec, perturb
from facreg.io.synthetic import SyntheticSpec, generate_synthetic
from facreg.models.bip import Relation, SolveStatus
from facreg.models.layout import Component, ComponentKind, Layout
from facreg.models.spaces import Attribute


def window(ident, p, z, w=1.0, h=1.0, n=(0.0, -1.0, 0.0)):
    return Component(ident, ComponentKind.WINDOW, "window", make_params(p, z, w, h, n))


# (floors, columns, facades), at most 6 components
RANDOM_SHAPES = [(1, 2, 1), (1, 3, 1), (2, 2, 1), (2, 3, 1), (1, 2, 2), (1, 3, 2)]


def random_noisy_layout(case):
    rng = np.random.default_rng(case)
    floors, columns, facades = RANDOM_SHAPES[int(rng.integers(len(RANDOM_SHAPES)))]
    truth = generate_synthetic(SyntheticSpec(floors=floors, columns=columns, facades=facades))
    level = int(rng.integers(1, 9))
    return perturb(truth, NoiseSpec.for_truth(truth, level, int(rng.integers(1000))))


def assert_same_layout(actual, expected):
    for a, e in zip(actual.components, expected.components):
        assert a.id == e.id
        assert a.params.p == pytest.approx(e.params.p, abs=1e-9)
        assert a.params.z == pytest.approx(e.params.z, abs=1e-9)
        assert a.params.w == pytest.approx(e.params.w, abs=1e-9)
        assert a.params.h == pytest.approx(e.params.h, abs=1e-9)
        assert a.params.n == pytest.approx(e.params.n, abs=1e-9)


# ============ Residual and Weight Tests ============

class TestResiduals:
    """Tests for compute_residuals and resolve_weights"""

    def test_shapes(self, three_windows):
        """Test one row per component and one column per candidate"""
        spaces = build_model_spaces(three_windows)
        residuals = compute_residuals(three_windows, spaces)
        assert residuals[Attribute.P].shape == (3, 2)
        assert residuals[Attribute.Z].shape == (3, 2)
        assert residuals.of(Attribute.P, 2)[1] == pytest.approx(0.0)

    def test_space_mismatch(self, three_windows):
        """Test spaces of another layout are rejected"""
        spaces = build_model_spaces(three_windows)
        smaller = three_windows.with_components(list(three_windows.components[:2]))
        with pytest.raises(SpaceMismatch):
            compute_residuals(smaller, spaces)

    def test_auto_weights(self, three_windows):
        """Test auto omega is the gain times the summed nearest-candidate distance, floored"""
        spaces = build_model_spaces(three_windows)
        weights = resolve_weights(WeightsConfig(), compute_residuals(three_windows, spaces))
        # z residuals to nearest candidate: 0.05, 0.0, 0.05
        assert weights.omega[Attribute.Z] == pytest.approx(3.0 * 0.1)
        assert weights.omega[Attribute.W] == OMEGA_FLOOR

    def test_auto_gain(self, three_windows):
        """Test the gain and the data scale multiply the auto omega"""
        spaces = build_model_spaces(three_windows)
        residuals = compute_residuals(three_windows, spaces)
        config = WeightsConfig(auto_gain=1.0, data_scale=AttributeWeights(z=2.0))
        weights = resolve_weights(config, residuals)
        assert weights.omega[Attribute.Z] == pytest.approx(2.0 * 0.1)
        assert category_margin(weights, config, Attribute.Z) == pytest.approx(0.1)

    def test_zero_scale_margin_is_unbounded(self, three_windows):
        """Test a zero data scale keeps every candidate in reach"""
        spaces = build_model_spaces(three_windows)
        config = WeightsConfig(data_scale=AttributeWeights(w=0.0))
        weights = resolve_weights(config, compute_residuals(three_windows, spaces))
        assert math.isinf(category_margin(weights, config, Attribute.W))

    def test_manual_weights(self, three_windows, manual_config):
        """Test manual omega is used as configured"""
        spaces = build_model_spaces(three_windows)
        weights = resolve_weights(
            manual_config.weights, compute_residuals(three_windows, spaces)
        )
        assert weights.mode == WeightMode.MANUAL
        assert weights.omega[Attribute.P] == 0.5
        assert weights.omega[Attribute.O] == 0.0


# ============ BIP Assembly Tests ============

class TestBuildBip:
    """Tests for build_bip"""

    def test_constraint_families(self, three_windows):
        """Test the emitted rows are counted per family"""
        spaces = build_model_spaces(three_windows)
        residuals = compute_residuals(three_windows, spaces)
        weights = resolve_weights(WeightsConfig(), residuals)
        model, varmap = build_bip(three_windows, spaces, weights, Config(), residuals)
        counts = varmap.constraint_counts
        # one exactly-one row per component for P and Z; W, H, O are pinned
        assert counts["C1"] == 6
        assert counts["C2"] == 3
        assert set(counts) == {"C1", "enum", "same", "C2", "R1", "R2"}
        assert counts["R1"] == 0
        assert sum(counts.values()) == len(model.constraints)
        assert model.name == "three"

    def test_exact_grid_is_fully_fixed(self):
        """Test a noise-free grid leaves no free variables"""
        truth = generate_synthetic(SyntheticSpec(floors=2, columns=3))
        spaces = build_model_spaces(truth)
        residuals = compute_residuals(truth, spaces)
        model, _ = build_bip(truth, spaces, resolve_weights(WeightsConfig(), residuals))
        assert model.num_free == 0

    def test_margin_widens_support(self, width_fragments):
        """Test a width fragment beyond the pruning radius stays reachable"""
        spaces = build_model_spaces(width_fragments)
        assert len(spaces[Attribute.W]) == 2
        assert spaces[Attribute.W].member_map[8] == frozenset({1})
        residuals = compute_residuals(width_fragments, spaces)
        weights = resolve_weights(WeightsConfig(), residuals)
        assert weights.omega[Attribute.W] == pytest.approx(3.0 * 0.036)
        _, varmap = build_bip(width_fragments, spaces, weights, Config(), residuals)
        assert varmap.vector(Attribute.W, 8).support == frozenset({0, 1})
        assert varmap.vector(Attribute.P, 8).support == frozenset({3})

    def test_rule_gates_counted_per_family(self, stacked):
        """Test every emitted row is attributed to exactly one family"""
        spaces = build_model_spaces(stacked)
        residuals = compute_residuals(stacked, spaces)
        model, varmap = build_bip(stacked, spaces, resolve_weights(WeightsConfig(), residuals))
        counts = varmap.constraint_counts
        assert sum(counts.values()) == len(model.constraints)
        labels = [c.label for c in model.constraints]
        assert counts["C2"] == sum(1 for label in labels if label.startswith("C2 "))
        assert counts["R1"] >= sum(1 for label in labels if label.startswith("R1 "))

    def test_exports_as_lp(self, three_windows):
        """Test the built model renders as LP text"""
        spaces = build_model_spaces(three_windows)
        residuals = compute_residuals(three_windows, spaces)
        model, _ = build_bip(three_windows, spaces, resolve_weights(WeightsConfig(), residuals))
        text = export_lp(model)
        assert text.startswith("\\ three:")
        assert text.endswith("End\n")

    def test_coincident_placement_infeasible(self, stacked):
        """Test forcing two same-position components onto one z is infeasible"""
        spaces = build_model_spaces(stacked)
        residuals = compute_residuals(stacked, spaces)
        model, varmap = build_bip(stacked, spaces, resolve_weights(WeightsConfig(), residuals))
        for i in (0, 1):
            vec = varmap.vector(Attribute.Z, i)
            model.add_constraint([(1, vec.vars[0])], Relation.EQ, 1)
        assert solve_bb(model).status == SolveStatus.INFEASIBLE


# ============ Pipeline Tests ============

class TestRegularize:
    """Tests for regularize"""

    @pytest.mark.parametrize("facades", [1, 2])
    def test_zero_noise_identity(self, facades):
        """Test a clean synthetic grid is reproduced exactly"""
        truth = generate_synthetic(SyntheticSpec(floors=2, columns=3, facades=facades))
        regularized, report = regularize(truth)
        assert report.status == SolveStatus.OPTIMAL
        assert_same_layout(regularized, truth)
        scores = prf(regularized, truth)
        assert scores.precision == pytest.approx(1.0, abs=1e-9)
        assert scores.recall == pytest.approx(1.0, abs=1e-9)
        assert scores.f_score == pytest.approx(1.0, abs=1e-9)
        assert report.counts_after == report.counts_before

    def test_matches_brute_force(self, three_windows, manual_config):
        """Test the objective equals direct enumeration of candidate choices"""
        spaces = build_model_spaces(three_windows)
        residuals = compute_residuals(three_windows, spaces)
        best = float("inf")
        for ps in itertools.product(range(2), repeat=3):
            for zs in itertools.product(range(2), repeat=3):
                if any(ps[i] == ps[j] and zs[i] == zs[j] for i, j in [(0, 1), (0, 2), (1, 2)]):
                    continue
                cost = sum(residuals[Attribute.P][i, ps[i]] for i in range(3))
                cost += sum(residuals[Attribute.Z][i, zs[i]] for i in range(3))
                cost += 0.5 * len(set(ps)) + 0.5 * len(set(zs))
                best = min(best, cost)

        _, report = regularize(three_windows, manual_config)
        assert report.status == SolveStatus.OPTIMAL
        assert report.objective_value == pytest.approx(best, abs=1e-9)
        assert report.objective_value == pytest.approx(2.1, abs=1e-9)

    def test_separates_stacked_components(self, stacked):
        """Test C2 moves one of two same-position components to another z"""
        regularized, report = regularize(stacked)
        assert coincident_pairs(regularized) == []
        assert audit_constraints(regularized, build_model_spaces(stacked)).ok
        assert all(a <= b for a, b in zip(report.counts_after, report.counts_before))

    def test_prevents_overlap_that_meanshift_keeps(self, overlapping):
        """Test mean shift merges two components that regularize keeps apart"""
        baseline = meanshift_baseline(overlapping)
        assert ("a", "b") in coincident_pairs(baseline)
        spaces = build_model_spaces(overlapping)
        assert audit_constraints(baseline, spaces).of_rule("C2")

        regularized, _ = regularize(overlapping)
        assert coincident_pairs(regularized) == []
        assert audit_constraints(regularized, spaces).ok

    def test_merges_width_fragments(self, width_fragments):
        """Test a split width category is merged back when it pays off"""
        regularized, report = regularize(width_fragments)
        assert report.status == SolveStatus.OPTIMAL
        assert report.counts_before[3] == 2
        assert report.counts_after[3] == 1
        assert {c.params.w for c in regularized} == {pytest.approx(1.007)}
        assert not report.pruning_fallback

    def test_pruning_fallback(self, stacked):
        """Test an infeasible pruned model is re-solved on full supports"""
        config = Config(pruning=PruningConfig(prune_radius_factor=0.1))
        regularized, report = regularize(stacked, config)
        assert report.pruning_fallback
        assert report.status == SolveStatus.OPTIMAL
        assert report.to_dict()["pruning_fallback"] is True
        assert len(report.warnings) == 1
        assert coincident_pairs(regularized) == []

    def test_no_fallback_without_pruning(self, stacked):
        """Test an unpruned run never reports a fallback"""
        _, report = regularize(stacked, Config().with_pruning(False))
        assert not report.pruning_fallback

    def test_invalid_layout(self, three_windows):
        """Test duplicate ids are rejected before solving"""
        dup = three_windows.with_components([three_windows.components[0]] * 2)
        with pytest.raises(RegularizationError):
            regularize(dup)

    def test_report(self, three_windows):
        """Test the run report contents"""
        _, report = regularize(three_windows)
        data = report.to_dict()
        assert data["status"] == "optimal"
        assert set(data["counts_before"]) == {"p", "z", "o", "w", "h"}
        assert data["free_vars_unpruned"] >= data["free_vars_pruned"]
        assert data["warnings"] == []

    def test_report_unpruned_disabled(self, three_windows):
        """Test the unpruned count is skipped on request"""
        config = Config(report_unpruned=False)
        _, report = regularize(three_windows, config)
        assert report.free_vars_unpruned is None


class TestComparePruning:
    """Tests for compare_pruning"""

    def test_same_objective(self, three_windows):
        """Test pruning keeps the optimum when supports cover it"""
        comparison = compare_pruning(three_windows)
        assert comparison.pruned.objective_value == pytest.approx(
            comparison.unpruned.objective_value, abs=1e-9
        )
        assert comparison.pruned.free_vars <= comparison.unpruned.free_vars
        assert 0.0 <= comparison.reduction < 1.0
        assert comparison.to_dict()["pruned"]["status"] == "optimal"

    @pytest.mark.slow
    @pytest.mark.parametrize("case", range(50))
    def test_random_layouts_match_unpruned(self, case):
        """Test pruned and unpruned programs agree on feasibility and optimum"""
        noisy = random_noisy_layout(case)
        config = Config()
        spaces_full = build_model_spaces(noisy, prune_radius_factor=None)
        residuals = compute_residuals(noisy, spaces_full)
        weights = resolve_weights(config.weights, residuals)
        pruned_model, pruned_map = build_bip(
            noisy, build_model_spaces(noisy), weights, config, residuals
        )
        full_model, full_map = build_bip(noisy, spaces_full, weights, config, residuals)
        pruned = solve_bb(pruned_model)
        full = solve_bb(full_model)
        assert full.status in (SolveStatus.OPTIMAL, SolveStatus.INFEASIBLE)

        if full.status == SolveStatus.INFEASIBLE:
            assert pruned.status == SolveStatus.INFEASIBLE
            with pytest.raises(NoSolution):
                regularize(noisy, config)
            return

        _, report = regularize(noisy, config)
        assert report.objective_value >= full.objective_value - 1e-9
        if pruned.status == SolveStatus.INFEASIBLE:
            assert report.pruning_fallback
            assert report.objective_value == pytest.approx(full.objective_value, rel=1e-9, abs=1e-9)
            return

        assert pruned.objective_value >= full.objective_value - 1e-9
        inside = all(
            full_map.vector(a, i).selected(full.assignment) in pruned_map.vector(a, i).support
            for a in full_map.vectors
            for i in range(len(noisy))
        )
        if inside:
            assert pruned.objective_value == pytest.approx(
                full.objective_value, rel=1e-9, abs=1e-9
            )

    def test_pruning_shrinks_exact_grid(self):
        """Test pruning removes variables on a clean grid"""
        truth = generate_synthetic(SyntheticSpec(floors=2, columns=2))
        comparison = compare_pruning(truth)
        assert comparison.pruned.free_vars < comparison.unpruned.free_vars
        assert comparison.pruned.objective_value == pytest.approx(
            comparison.unpruned.objective_value, abs=1e-9
        )


@pytest.fixture
def three_windows():
    """Two windows stacked at x=0 and one at x=3; z clusters 0.05 and 1.0"""
    return Layout(
        (
            window("a", (0.0, 0.0), 0.0),
            window("b", (0.0, 0.0), 1.0),
            window("c", (3.0, 0.0), 0.1),
        ),
        "three",
    )


@pytest.fixture
def stacked():
    """Two pairs of components sharing position and elevation"""
    return Layout(
        (
            window("a", (0.0, 0.0), 0.0),
            window("b", (0.0, 0.0), 0.0),
            window("c", (1.0, 0.0), 0.0),
            window("d", (1.0, 0.0), 1.0),
        ),
        "stacked",
    )


@pytest.fixture
def overlapping():
    """a and b fall into the same mean-shift modes for p and z"""
    return Layout(
        (
            window("a", (0.0, 0.0), 1.0),
            window("b", (0.1, 0.0), 1.0),
            window("c", (0.0, 0.0), 3.0),
            window("d", (2.0, 0.0), 1.0),
        ),
        "overlap",
    )


@pytest.fixture
def manual_config():
    """Manual weights: 0.5 on p and z categories, nothing on the rest"""
    return Config(
        weights=WeightsConfig(
            mode=WeightMode.MANUAL,
            omega=AttributeWeights(p=0.5, z=0.5, w=0.0, h=0.0, o=0.0),
        )
    )


@pytest.fixture
def width_fragments():
    """2 floors x 5 columns; widths split into 1.000..1.014 and 1.050, 1.054"""
    widths = [1.0 + 0.002 * k for k in range(8)] + [1.05, 1.054]
    return Layout(
        tuple(
            window(f"r{f}-c{c}", (2.0 * c, 0.0), 3.0 * f, w=widths[5 * f + c])
            for f in range(2)
            for c in range(5)
        ),
        "fragments",
    )
