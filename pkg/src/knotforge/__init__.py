"""knotforge: generation and tabulation of prime alternating knots.

The package grows the census one crossing at a time: two size-increasing
surgeries seed each level, two size-preserving moves close it, and a
flype-closure canonical key deduplicates, so each knot is counted once
(up to mirror image).
"""

from .diagram import (
    Diagram,
    canonical_code,
    faces,
    figure_eight,
    from_signed_gauss,
    mirror,
    realize_unsigned_gauss,
    to_dt_code,
    to_group_code,
    to_signed_gauss,
    torus_shadow,
    traverse,
    trefoil,
    validate,
)
from .errors import (
    CapExceeded,
    InvalidDiagram,
    Malformed,
    NonPlanar,
    NotApplicable,
    PositiveGroupError,
    StoreError,
)

__version__ = "0.1.0"
