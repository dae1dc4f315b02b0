"""Tensor calculus of second-gradient continua, checked numerically.

Stress/hyperstress fields are exact polynomials, parts are flat-faced
polyhedra, and every balance identity is evaluated with quadrature that is
exact for the integrand degree.
"""

__version__ = "0.1.0"

from .tensor import (Rotation, Tensor3Sym, rotate2, rotate3, t3_apply_vector, t3_contract2,
                     t3_inner)
from .fields import (PolyField, curl, div, divergence_scalar, grad, grad2_velocity, laplacian,
                     surface_div_flat, velocity_field)
from .geometry import (EdgeFrame, PolyhedralPart, build_part, canned_parts, coordinate_edge,
                       integrate_edge, integrate_face, integrate_volume, load_part)
from .traction import (edge_force, reconstruct_hyperstress, reconstruct_T, reconstruct_Ttilde,
                       simple_stress_from_tractions, simple_traction, surface_hypertraction,
                       surface_traction)
from .balance import (BalanceReport, boundary_residuals, bulk_residual, external_power,
                      global_balance, internal_power, verify_pvp)
from .invariance import (ObserverChange, find_symmetry_witness, power_invariance_residual,
                         traction_indifference_check, transform_dynamics, transform_gradients,
                         transform_velocity)
from .special import (NsAlphaDecomposition, SphericalHyperstress, classify_spherical, edge_scan,
                      forte_vianello_check, nsalpha_constitutive, nsalpha_decompose,
                      nsalpha_power_check, prove_spherical_from_zero_edges)
