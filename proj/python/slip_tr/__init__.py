"""Trust-region method for integer controls with total-variation regularization."""

from ._core import *  # noqa: F401,F403
from ._core import (
    ConfigError,
    Control,
    DeconvProblem,
    Grid,
    HeatProblem,
    LabelSet,
    RadiusPolicy,
    TrustRegionConfig,
    run,
    solve_tr_dp,
)

__version__ = "0.1.0"
