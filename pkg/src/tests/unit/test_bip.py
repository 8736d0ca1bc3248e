"""
Unit Tests for BIP Models

Usage:
    pytest src/tests/unit/test_bip.py -v
"""

import pytest

from facreg.errors import PartialAssignment, SolverError
from facreg.models.bip import BipModel, Relation, SelectionVector
from facreg.models.spaces import Attribute


class TestBipModel:
    """Tests for BipModel"""

    def test_new_var_indices(self):
        """Test variables are numbered in creation order"""
        model = BipModel()
        assert [model.new_var().index for _ in range(3)] == [0, 1, 2]
        assert model.num_free == 3

    def test_const_is_fixed(self):
        """Test constants leave the free set"""
        model = BipModel()
        x = model.new_var()
        one = model.const(1)
        assert one.is_fixed and one.fixed == 1
        assert model.free_vars() == [x.index]

    def test_const_rejects_non_binary(self):
        """Test const(2) raises"""
        with pytest.raises(ValueError):
            BipModel().const(2)

    def test_non_integral_coefficient(self):
        """Test constraints need integer coefficients"""
        model = BipModel()
        x = model.new_var()
        with pytest.raises(ValueError):
            model.add_constraint([(0.5, x)], Relation.LE, 1)

    def test_foreign_variable(self):
        """Test variables of another model are rejected"""
        other = BipModel()
        x = other.new_var()
        with pytest.raises(ValueError):
            BipModel().add_objective(1.0, x)

    def test_non_finite_objective(self):
        """Test infinite costs are rejected"""
        model = BipModel()
        with pytest.raises(ValueError):
            model.add_objective(float("inf"), model.new_var())

    def test_objective_coefficients_summed(self):
        """Test repeated objective terms add up"""
        model = BipModel()
        x = model.new_var()
        model.add_objective(1.5, x)
        model.add_objective(2.0, x)
        assert model.objective_coefficients() == [3.5]
        assert model.evaluate_objective((1,)) == 3.5

    def test_complete_mapping(self):
        """Test a partial mapping raises"""
        model = BipModel()
        model.new_var()
        model.new_var()
        assert model.complete({0: 1, 1: 0}) == (1, 0)
        with pytest.raises(PartialAssignment):
            model.complete({1: 0})

    def test_to_dict(self):
        """Test model serialization"""
        model = BipModel("m")
        x = model.new_var()
        model.const(0)
        model.add_constraint([(1, x)], Relation.GE, 1, "lower")
        data = model.to_dict()
        assert data["num_vars"] == 2
        assert data["num_free"] == 1
        assert data["constraints"][0]["relation"] == ">="
        assert data["fixed"] == {"1": 0}


class TestSelectionVectorModel:
    """Tests for SelectionVector.selected"""

    def test_selected(self):
        """Test the chosen candidate is found"""
        model = BipModel()
        xs = tuple(model.new_var() for _ in range(3))
        vec = SelectionVector(Attribute.H, 0, xs, frozenset({0, 1, 2}))
        assert vec.selected((0, 0, 1)) == 2

    def test_selected_needs_exactly_one(self):
        """Test two chosen candidates raise"""
        model = BipModel()
        xs = tuple(model.new_var() for _ in range(2))
        vec = SelectionVector(Attribute.H, 0, xs, frozenset({0, 1}))
        with pytest.raises(SolverError):
            vec.selected((1, 1))
