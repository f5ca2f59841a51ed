"""2-isogeny descent on y^2 = x^3 + a x and its quadratic twists."""

__version__ = "0.1.0"

from .arith import SquareClass, factor, fundamental_discriminant, is_prime, jacobi, squarefree_class  # noqa: E402
from .descent import (  # noqa: E402
    PHI,
    PHI_HAT,
    MonicIsogenyCurve,
    PlaceSet,
    SelmerReport,
    Sha2Bound,
    bad_set,
    descend,
    field_selmer,
    kernel_quotient_dim,
    phi_selmer,
    sha2_upper_bound,
)
from .localfield import (  # noqa: E402
    Place,
    QuarticTorsor,
    SolvabilityCertificate,
    hilbert_symbol,
    local_square,
    torsor_solvable,
    torsor_solvable_unramified_2ext,
)
