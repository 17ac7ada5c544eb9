"""Set-valued discrete dynamics: shadowing decisions, orbit-space lifts,
and expansiveness certificates on finite and piecewise-linear systems."""

from .errors import (AdjacencyError, ConsistencyError, ConstructionError,
                     DomainError, PreconditionError, ResourceGuardError,
                     SvdynError)
from .expansive import (ExpansiveLiftReport, ExpansivenessCertificate,
                        certify_expansive, check_expansive_lift, quantize)
from .lifting import (LiftReport, closed_form_bound, lift_inverse,
                      lift_pseudo_orbit, match_orbit, shadow_inverse,
                      shift_gaps, transfer_shadowing_down,
                      transfer_shadowing_up)
from .orbits import (DEFAULT_DEPTH, INVERSE, LEFT, RIGHT, OrbitDistance,
                     OrbitSegment, PseudoOrbit, TruncatedOrbitPoint,
                     extend_orbit, generate_pseudo_orbit, orbit_distance,
                     prepend_head, prepend_step, shift_left, shift_right,
                     step_defect, validate_orbit, validate_pseudo_orbit)
from .rng import SplitMix64
from .shadowing import (NOT_SHADOWED, PROPERTY_FAILS, PROPERTY_HOLDS,
                        SHADOWED, NStepReport, ShadowingReport,
                        decide_finite_shadowing, decide_shadowing_property,
                        max_shadowing_slack, nstep_criterion)
from .space import (TOL, Ball, FiniteSpace, FiniteSubset, IntervalSpace,
                    IntervalUnion, as_fraction)
from .svmap import (FiniteRelation, ModulusChain, PiecewiseLinear,
                    SetValuedMap, fiber_map, folded_doubling_map,
                    identity_map, image_points, modulus, modulus_chain,
                    nearest_image_point, symmetrize, tent_family)

__version__ = "0.1.0"
