"""Desk-scale MILP core: model, simplex, branch-and-bound, text format."""

from .backends import get_backend, solve_model_file
from .model import MilpModel, ModelBuilder, ModelError
from .solver import Solution, SolveOptions, solve, solve_lp
from .textformat import ModelFormatError, export_model, import_model

__all__ = ["MilpModel", "ModelBuilder", "ModelError", "ModelFormatError", "Solution",
           "SolveOptions", "export_model", "get_backend", "import_model", "solve",
           "solve_lp", "solve_model_file"]
