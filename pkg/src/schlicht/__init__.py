"""Numerical support-point toolkit for the univalent classes U and G.

Truncated power series, grid membership oracles, the extreme families
``z/(1-xz)**2`` and ``(z - xz**2/2)/(1-xz)**2``, linear functionals maximized
over the unit circle, and support-point certificates built from them.
"""
from .classes import (DiskGrid, MembershipVerdict, alexander_check, g_coefficient_report,
                      halfplane_field, injectivity_probe, local_univalence_check,
                      membership_ctc, membership_halfplane, membership_u, nonvanishing_check,
                      u_defect)
from .errors import (DegenerateSeriesError, DomainError, InvalidFunctionalError,
                     InvalidMeasureError, NonconstantRequiredError, NonInvertibleError,
                     OrderMismatchError, SchlichtError)
from .families import (AtomicMeasure, CirclePoint, FamilyId, extreme_function, family_series,
                       g_extreme_series, hull_function, hull_member, koebe_series, pole_set)
from .functionals import (CircleMaxResult, FunctionalSpec, G_of_x, H_of_x, evaluate_functional,
                          maximize_on_circle, nonconstancy_check, sweep, sweep_csv)
from .series import (TaylorSeries, cauchy_product, derivative, evaluate, linear_combine,
                     reciprocal)
from .support import (SupportCertificate, certify_candidate, certify_extreme_support,
                      class_support_filter, hull_support_set, hull_values,
                      second_coeff_functional)

__version__ = "0.1.0"
