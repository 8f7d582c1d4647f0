"""Exact certification of almost-nef tangent bundles on weak del Pezzo surfaces of degree 4."""

from .bundles import (
    ConicBundle,
    Fiber,
    degree1_bundles,
    degree2_bundles,
    ramification_class,
    relative_tangent_class,
    singular_fibers,
)
from .certifier import Certificate, CriterionReport, ZetaDecomposition, certify, criterion, verify, zeta_decomposition
from .configuration import LineDecl, SurfaceConfig, enumerate_configs, from_names, validate
from .curves import CurveRecord, EffectivityWitness, catalog, is_effective, is_effective_bruteforce
from .errors import (
    ConfigurationMismatch,
    InternalConsistencyError,
    InvalidConfiguration,
    InvalidPointRef,
    TheoremViolation,
)
from .lattice import C, DivisorClass, H, PointRef, anticanonical, intersect

__version__ = "0.1.0"
