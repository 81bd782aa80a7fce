"""Mean-SNR analysis of distributed beamforming with wirelessly powered relays."""

__version__ = "0.1.0"

from .analytic import (
    FormulaVariant,
    MeanSnrPrediction,
    exact_mean_snr,
    mean_x,
    predict_mean_snr,
    snr_to_db,
    var_x,
    var_y,
)
from .core import (
    ComplexGain,
    RngStream,
    SystemParams,
    draw_cn01,
    draw_cn01_array,
    draw_phase_error,
    draw_phase_error_array,
    substream,
)
from .errors import (
    DegeneratePolicyError,
    InvalidParameterError,
    SingularChannelError,
    WpdbError,
)
from .montecarlo import (
    McEstimate,
    SweepRow,
    SweepSpec,
    estimate_mean_snr,
    run_sweep,
    run_trial,
    simulate_gammas,
)
from .policies import (
    DerivedDist,
    EhPolicy,
    PowerSplitting,
    TimeSwitching,
    derived_dist,
    make_policy,
    relay_power,
)
from .signal import (
    RelayRealization,
    TrialRealization,
    instantaneous_snr,
    precoding_weight,
    received_signal,
    received_signal_reduced,
)
