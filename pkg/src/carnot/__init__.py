"""Exact and numerical computations in Carnot groups."""

__version__ = "0.1.0"

from .algebra import (
    AlgVector, AlgebraError, InvalidAlgebra, StratifiedAlgebra, ValidationReport, adjoint_exp, bracket,
    dilate_alg, validate_algebra,
)
from .group import (
    GroupPoint, bch, bch_product, conjugate, dilate_group, exp_point, flow, group_inverse, identity, log_point, point,
)
from .polynomial import Polynomial
from .presets import abelian, engel, heisenberg1, load_group, parse_group_spec, preset, to_group_spec
from .fields import (
    PolyVectorField, SublevelSet, apply_field, cone, divergence, field_bracket, halfspace, pab, parse_set,
    realize_left_invariant, rloca,
)
from .nonneg import NonnegVerdict, polynomial_nonneg
from .span import (
    HalfspaceSpec, Subspace, ad_orbit_span, classify_vertical_halfspace, derived_invariants_step2,
    find_escaping_adjoint, invariant_directions, iterated_bracket_span,
)
from .measure import BallBox, ball_box, density_scan, graph_boundary, haar_scaling_check, perimeter_measure, surface_measure
from .blowup import provafis_probe, tangent_limit, translate_dilate_pullback
