"""Linear programming: problem container and a dense two-phase simplex."""

from .kernels import BACKEND
from .model import LinearProgram, LpError, LpOutcome, dump_lp, load_lp
from .simplex import solve_lp

__all__ = ["BACKEND", "LinearProgram", "LpError", "LpOutcome", "dump_lp", "load_lp", "solve_lp"]
