"""p-adic Stark-Heegner (Darmon) points on elliptic curves of composite
conductor, built on an elementary matrix decomposition in congruence
subgroups over S-integers."""

from .errors import (InapplicableFieldError, PreconditionError,
                     PrecisionError, SearchBoundError, SHPointsError)
from .kernels import BACKEND as KERNEL_BACKEND

__version__ = "0.1.0"
