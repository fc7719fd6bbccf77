"""Exact semilinear algebra over Laurent series fields F_q((u)).

The ground operation is the field endomorphism phi acting as the
q-power Frobenius through u -> u^p (optionally twisting the
coefficients too).  The package computes with pairs (V, A) where A is
an invertible series matrix and v -> A phi(v) the induced semilinear
map: elementary divisor types, twisted conjugation, isomorphism tests,
point counts of lattice moduli with bounded position, and rank 2
classification on the lattice tree.

Everything is exact: series carry certified precision windows and
operations either return certified digits or raise
InsufficientPrecision.
"""

from .errors import (BoxTooLarge, DivisionByZero, FieldMismatch,
                     HypothesisViolated, InsufficientPrecision,
                     IterateEscaped, ParseError, PhimodError, Singular,
                     ValidationError)
from .fields import FieldSpec, find_irreducible
from .series import (DEFAULT_PRECISION, INF, LaurentSeries, format_series,
                     parse_series)
from .matrices import (Coweight, Lattice, SeriesMatrix, cartan_type,
                       lattice_hnf, pole_bound, relative_position)
from .conjugacy import (ConjReport, IsomReport, conj_residual, conj_solve,
                        conj_solve_report, isom_test)
from .grassmannian import (DEFAULT_BOX_LIMIT, PointReport, box_bound,
                           flat_points, kisin_points, lattice_type,
                           local_model_count)
from .tree import (BallProfile, ClassifyReport, RankOneReport, TreeVertex,
                   ball, classify, displacement, displacement_profile,
                   export_ball, frobenius_vertex, min_displacement,
                   neighbors, rank_one_subs, standard_vertex, tree_distance)
from .selftest import run_selftest

__version__ = "0.1.0"

__all__ = [
    "BallProfile", "BoxTooLarge", "ClassifyReport", "ConjReport", "Coweight",
    "DEFAULT_BOX_LIMIT", "DEFAULT_PRECISION", "DivisionByZero",
    "FieldMismatch", "FieldSpec", "HypothesisViolated", "INF", "IsomReport",
    "InsufficientPrecision", "IterateEscaped", "Lattice", "LaurentSeries",
    "ParseError", "PhimodError", "PointReport", "RankOneReport",
    "SeriesMatrix", "Singular", "TreeVertex", "ValidationError", "ball",
    "box_bound", "cartan_type", "classify", "conj_residual", "conj_solve",
    "conj_solve_report", "displacement", "displacement_profile",
    "export_ball", "find_irreducible", "flat_points", "format_series",
    "frobenius_vertex", "isom_test", "kisin_points", "lattice_hnf",
    "lattice_type", "local_model_count", "min_displacement", "neighbors",
    "parse_series", "pole_bound", "rank_one_subs", "relative_position",
    "run_selftest", "standard_vertex", "tree_distance",
]
