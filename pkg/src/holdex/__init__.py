"""Modified Hölder exponent indicators for time series and market panels."""

__version__ = "0.1.0"

from ._kernels import BACKEND
from .errors import DataError, HoldexError, InvariantError
from .jmphe import JmpheSeries, JmpheThreshold, jmphe, jmphe_signals, panel_jmphe, sign_vote
from .mhe import (
    MpheConfig,
    MpheSeries,
    ReferenceConfig,
    mhe,
    mphe_series,
    mphe_values,
    normalize_mphe,
    reference_level,
)
from .seminorm import BetaGrid, SemiNormCurve, Window, estimate_holder_by_jump, semi_norm, semi_norm_curve
from .signals import SignalConfig, SignalEvent, detect_crossings, ema, signal_line
from .strategy import (
    BacktestResult,
    CrashEvent,
    TradeRule,
    VixConfig,
    backtest,
    combine_signals,
    detect_crashes,
    evaluate_predictions,
    max_drawdown,
    vix_signals,
)
from .testfuncs import (
    GenWeierstrassConfig,
    WeierstrassConfig,
    generalized_weierstrass,
    theoretical_pointwise_exponent,
    weierstrass,
)
from .timeseries_io import AlignedPanel, TimeSeries, align_panel, load_close_series, write_series
