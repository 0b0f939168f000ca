"""
solver-config.py - Solver Configuration

Tolerances and caps shared by the geometry, analysis and solver modules.

Values are data-driven: they come from data/solver-parameters.json, grouped in
sections, with built-in defaults when the file is missing. The environment
variable ISOCONE_DMAX overrides the exact-geometry dimension cap, and explicit
overrides (CLI flags) win over everything else.
"""

import json
import logging
import os
from functools import lru_cache
from pathlib import Path

from pydantic import BaseModel, ConfigDict, Field, PositiveInt

from errors import InvalidInputError


logger = logging.getLogger("isocone.config")

DEFAULT_PARAMETERS_PATH = Path(__file__).parent.parent / "data" / "solver-parameters.json"
DMAX_ENV_VAR = "ISOCONE_DMAX"


class SolverConfig(BaseModel):
    """
    Immutable bundle of numerical settings.

    Attributes:
        tol: Membership / KKT tolerance, scaled by each normal's norm
        strict_tol: Margin a witness must clear to count as strictly interior
        isotonicity_tol: Slack allowed when comparing projected pairs
        rank_tol: Relative pivot threshold for rank decisions
        lp_tol: Decision margin for LP optima (redundancy, orthant containment)
        agreement_tol: Max disagreement between accepted exact candidates
        monotone_pattern_rtol: Relative tolerance when recognising chain normals
        dmax: Dimension cap for exact enumerative geometry
        nmax: Half-space cap for face enumeration
        dykstra_tol: Dykstra stopping tolerance (cycle change and residual)
        dykstra_max_iter: Dykstra cycle budget
        seed: Default seed for randomized routines
    """

    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)

    tol: float = Field(1e-9, ge=0)
    strict_tol: float = Field(1e-7, gt=0)
    isotonicity_tol: float = Field(1e-7, ge=0)
    rank_tol: float = Field(1e-10, gt=0)
    lp_tol: float = Field(1e-6, gt=0)
    agreement_tol: float = Field(1e-9, gt=0)
    monotone_pattern_rtol: float = Field(1e-12, ge=0)
    dmax: PositiveInt = 8
    nmax: PositiveInt = 16
    dykstra_tol: float = Field(1e-9, gt=0)
    dykstra_max_iter: PositiveInt = 100_000
    seed: int = 0


def _read_parameter_sections(params_path: Path, explicit: bool) -> dict:
    """Flatten the sectioned parameter file into SolverConfig field values."""
    try:
        with open(params_path) as f:
            sections = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        if explicit:
            raise InvalidInputError(f"Cannot read solver parameters from {params_path}: {e}")
        logger.warning(f"[Config] {params_path} unreadable ({e}); using built-in defaults")
        return {}

    values = {}
    for section_name, section in sections.items():
        if not isinstance(section, dict):
            raise InvalidInputError(f"Section '{section_name}' in {params_path} must be an object")
        values.update({key: value for key, value in section.items() if key != "notes"})
    return values


def load_solver_config(path=None, **overrides) -> SolverConfig:
    """
    Build a SolverConfig from the parameter file, environment and overrides.

    Args:
        path: Parameter file (default data/solver-parameters.json)
        **overrides: Field values that win over file and environment;
            None values are ignored so CLI flags can be passed through as-is

    Returns:
        SolverConfig

    Raises:
        InvalidInputError: explicit path unreadable or ISOCONE_DMAX not an integer
        pydantic.ValidationError: a value violates its field constraint
    """
    explicit = path is not None
    params_path = Path(path) if explicit else DEFAULT_PARAMETERS_PATH
    values = _read_parameter_sections(params_path, explicit)

    env_dmax = os.environ.get(DMAX_ENV_VAR)
    if env_dmax:
        try:
            values["dmax"] = int(env_dmax)
        except ValueError:
            raise InvalidInputError(f"{DMAX_ENV_VAR} must be an integer, got '{env_dmax}'")

    values.update({key: value for key, value in overrides.items() if value is not None})
    config = SolverConfig(**values)
    logger.debug(f"[Config] Loaded {config}")
    return config


@lru_cache(maxsize=1)
def default_config() -> SolverConfig:
    """Process-wide configuration used when a caller passes no config."""
    return load_solver_config()
