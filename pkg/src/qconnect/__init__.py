"""Connection matrices and local Galois data of fuchsian q-difference systems."""
from .errors import (
    AmbiguityError,
    ContractError,
    DomainError,
    NumericFailure,
    PoleProximityError,
    QConnectError,
    ResonanceError,
)
from .qcore import *  # noqa: F401,F403
from .thetafn import *  # noqa: F401,F403
from .matfun import *  # noqa: F401,F403
from .ratsys import *  # noqa: F401,F403
from .flatcat import *  # noqa: F401,F403
from .reduction import *  # noqa: F401,F403
from .connection import *  # noqa: F401,F403
from .confluence import *  # noqa: F401,F403

__version__ = "0.1.0"
