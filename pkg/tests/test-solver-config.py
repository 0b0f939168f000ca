"""
test-solver-config.py - Solver configuration loading

Verifies the precedence file < ISOCONE_DMAX < explicit overrides and the
validation of every field.
"""

import json
import sys
from pathlib import Path


# Add src to path
sys.path.append(str(Path(__file__).parent.parent / "src"))

import importlib

import pytest
from pydantic import ValidationError

from errors import InvalidInputError


solver_config = importlib.import_module("solver-config")


def test_shipped_parameter_file_matches_defaults():
    assert solver_config.load_solver_config() == solver_config.SolverConfig()


def test_sections_are_flattened(tmp_path):
    params = tmp_path / "params.json"
    params.write_text(json.dumps({
        "tolerances": {"tol": 1e-8, "notes": "membership"},
        "exact_geometry": {"dmax": 5},
    }))
    config = solver_config.load_solver_config(params)
    assert config.tol == 1e-8
    assert config.dmax == 5
    assert config.nmax == 16


def test_missing_default_file_falls_back(monkeypatch, tmp_path):
    monkeypatch.setattr(solver_config, "DEFAULT_PARAMETERS_PATH", tmp_path / "absent.json")
    assert solver_config.load_solver_config() == solver_config.SolverConfig()


def test_missing_explicit_file_is_an_error(tmp_path):
    with pytest.raises(InvalidInputError):
        solver_config.load_solver_config(tmp_path / "absent.json")


def test_precedence(monkeypatch):
    monkeypatch.setenv("ISOCONE_DMAX", "6")
    assert solver_config.load_solver_config().dmax == 6
    assert solver_config.load_solver_config(dmax=4).dmax == 4
    assert solver_config.load_solver_config(dmax=None).dmax == 6


def test_bad_environment_value(monkeypatch):
    monkeypatch.setenv("ISOCONE_DMAX", "eight")
    with pytest.raises(InvalidInputError):
        solver_config.load_solver_config()


@pytest.mark.parametrize("override", [{"tol": -1.0}, {"dmax": 0}, {"dykstra_tol": 0.0}, {"unknown": 1}])
def test_invalid_values_are_rejected(override):
    with pytest.raises(ValidationError):
        solver_config.load_solver_config(**override)


def test_config_is_frozen():
    config = solver_config.SolverConfig()
    with pytest.raises(ValidationError):
        config.tol = 1.0
