"""Exact computations with Hecke paths and segment retractions in the SL2 masure.

Modules:

* :mod:`masurelab.exactalg`: the fields k(w) and k(w)(u) with valuations and series
* :mod:`masurelab.rootgeom`: affine roots, the Weyl group, local chambers
* :mod:`masurelab.galleries`: galleries, centrifugal folds and lifting counts
* :mod:`masurelab.heckepath`: piecewise-linear paths, verification, decorations
* :mod:`masurelab.sl2engine`: group elements, memberships and retractions
"""

from .exactalg import Field, QQ, RationalFunc, RationalU, expand_series
from .galleries import CountPoly, Gallery, Step, count_liftings_poly, brute_force_liftings, segment_count
from .heckepath import (
    PiecewisePath,
    build_path,
    crossing_events,
    decorate,
    superdecorate,
    validate_superdecoration,
    verify_hecke,
)
from .rootgeom import AffineRoot, LocalChamber, Point, Sheet, WeylElt, bruhat_leq
from .sl2engine import (
    GroupElement,
    MembershipTag,
    counterexample_report,
    membership,
    named_element,
    named_word,
    retract_segment,
)

__version__ = "0.1.0"

__all__ = [
    "Field", "QQ", "RationalFunc", "RationalU", "expand_series",
    "CountPoly", "Gallery", "Step", "count_liftings_poly", "brute_force_liftings", "segment_count",
    "PiecewisePath", "build_path", "crossing_events", "decorate", "superdecorate",
    "validate_superdecoration", "verify_hecke",
    "AffineRoot", "LocalChamber", "Point", "Sheet", "WeylElt", "bruhat_leq",
    "GroupElement", "MembershipTag", "counterexample_report", "membership",
    "named_element", "named_word", "retract_segment",
]
