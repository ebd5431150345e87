"""Exact computations with finite W-algebras U(g,e) and their translation functors."""

from .liedata import AlgebraSpec, build_gl_sl, grading_tables, parse_alg_arg
from .pbw import PBWAlgebra, PBWElement
from .walg import WAlgebra
from .trans import RepSpec, Translation, builtin_rep
from .brst import BRST

__all__ = ["AlgebraSpec", "build_gl_sl", "grading_tables", "parse_alg_arg", "PBWAlgebra",
           "PBWElement", "WAlgebra", "RepSpec", "Translation", "builtin_rep", "BRST"]
__version__ = "0.1.0"
