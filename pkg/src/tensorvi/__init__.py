"""Tensor variational inequalities: find x in X with <y - x, A x^{m-1} + q> >= 0 for all y in X."""

from .errors import DimensionError, DocumentError, ProjectionError, TviError
from .games import (GameSpec, NashReport, assemble, best_response_grid, cost, player_gradient,
                    to_tvi, verify_nash)
from .io import parse_game, parse_problem, serialize_game, serialize_problem
from .problem import (TviProblem, VerificationReport, as_affine, eval_map, natural_residual,
                      pairing, verify_solution)
from .sets import (Ball, Box, FeasibleSet, Polyhedron, Product, Simplex, WholeSpace, contains,
                   contains_origin, project)
from .solvers import (SolveReport, SolverParams, Status, gus_probe, solve_extragradient,
                      solve_fixed_point)
from .structure import (Falsified, ModulusEstimate, NotFalsified, check_pd_on, check_spd_on,
                        estimate_strong_modulus, no_strong_monotonicity_trace)
from .tensor import (DenseTensor, apply_power, contract_trailing, form_value, is_symmetric,
                     symmetrize)

__version__ = "0.1.0"

__all__ = [
    "DimensionError", "DocumentError", "ProjectionError", "TviError", "GameSpec", "NashReport",
    "assemble", "best_response_grid", "cost", "player_gradient", "to_tvi", "verify_nash",
    "parse_game", "parse_problem", "serialize_game", "serialize_problem", "TviProblem",
    "VerificationReport", "as_affine", "eval_map", "natural_residual", "pairing",
    "verify_solution", "Ball", "Box", "FeasibleSet", "Polyhedron", "Product", "Simplex",
    "WholeSpace", "contains", "contains_origin", "project", "SolveReport", "SolverParams",
    "Status", "gus_probe", "solve_extragradient", "solve_fixed_point", "Falsified",
    "ModulusEstimate", "NotFalsified", "check_pd_on", "check_spd_on", "estimate_strong_modulus",
    "no_strong_monotonicity_trace", "DenseTensor", "apply_power", "contract_trailing",
    "form_value", "is_symmetric", "symmetrize",
]
