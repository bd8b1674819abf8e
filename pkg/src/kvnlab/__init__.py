"""kvnlab: Koopman-von Neumann mechanics in superspace.

The exact layer (Grassmann algebra, normal-ordered operators, superfields,
local symmetries) works over Gaussian rationals and checks identities for an
exact zero. The numeric layer in :mod:`kvnlab.propagator` evolves phase-space
wavefunctions on a grid.
"""

from .errors import (
    ConfigurationError,
    DomainError,
    KvnError,
    ParseError,
    ResolutionError,
    UnsupportedHamiltonianError,
    UnsupportedInputError,
    VerificationError,
)
from .grassmann import GeneratorRegistry, Multivector, berezin, gderiv, gmul, superspace_registry
from .model import PhaseSpaceModel, corpus, model
from .parser import parse, parse_poly, pretty, to_operator, to_poly, to_superspace
from .poly import Poly, poisson
from .report import Check, Report
from .scalar import Scalar
from .superfield import (
    berezin_reduce,
    build_superfield,
    check_action_identity,
    check_berezin_identity,
    evaluate_on_superfield,
    superfield_eom,
    total_derivative_test,
)
from .superops import (
    OperatorSum,
    adjoint,
    bracket,
    charges,
    commutator,
    compose,
    lie_derivative,
    liouvillian,
    verify_charge_algebra,
)
from .superspace import Fields, SuperspaceExpression
from .symmetries import (
    LocalTransformation,
    check_generators,
    check_local_symmetries,
    check_picture_change,
    classify_observable,
    local_transform,
    picture_change,
    schrodinger_state,
    zero_form_project,
)

__version__ = "0.1.0"

__all__ = [
    "Check",
    "ConfigurationError",
    "DomainError",
    "Fields",
    "GeneratorRegistry",
    "KvnError",
    "LocalTransformation",
    "Multivector",
    "OperatorSum",
    "ParseError",
    "PhaseSpaceModel",
    "Poly",
    "Report",
    "ResolutionError",
    "Scalar",
    "SuperspaceExpression",
    "UnsupportedHamiltonianError",
    "UnsupportedInputError",
    "VerificationError",
    "adjoint",
    "berezin",
    "berezin_reduce",
    "bracket",
    "build_superfield",
    "charges",
    "check_action_identity",
    "check_berezin_identity",
    "check_generators",
    "check_local_symmetries",
    "check_picture_change",
    "classify_observable",
    "commutator",
    "compose",
    "corpus",
    "evaluate_on_superfield",
    "gderiv",
    "gmul",
    "lie_derivative",
    "liouvillian",
    "local_transform",
    "model",
    "parse",
    "parse_poly",
    "picture_change",
    "poisson",
    "pretty",
    "schrodinger_state",
    "superfield_eom",
    "superspace_registry",
    "to_operator",
    "to_poly",
    "to_superspace",
    "total_derivative_test",
    "verify_charge_algebra",
    "zero_form_project",
]
