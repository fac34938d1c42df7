"""QPSK link simulator: transmit chain, impairment channel, recovery loop.

The heavy lifting lives in the compiled extension; this package re-exports
its public surface.
"""

from ._core import (  # noqa: F401
    ChannelConfig,
    CmaConfig,
    RxConfig,
    RxResult,
    TxConfig,
    apply_awgn,
    apply_cfo,
    apply_multipath,
    apply_timing,
    compute_error_rates,
    compute_evm,
    decide,
    default_gray_mapping,
    design_rrc,
    detect_frames,
    diff_decode,
    diff_encode,
    find_sync,
    fir_filter,
    map_symbols,
    nco_advance,
    pack_bytes,
    polyphase_decompose,
    psd,
    qfunc,
    random_bytes,
    run_channel,
    run_rx,
    run_scenario_file,
    run_scenario_json,
    run_tx,
    shape_pulses,
    unpack_dibits,
    vector_bytes,
)

__all__ = [
    "ChannelConfig",
    "CmaConfig",
    "RxConfig",
    "RxResult",
    "TxConfig",
    "apply_awgn",
    "apply_cfo",
    "apply_multipath",
    "apply_timing",
    "compute_error_rates",
    "compute_evm",
    "decide",
    "default_gray_mapping",
    "design_rrc",
    "detect_frames",
    "diff_decode",
    "diff_encode",
    "find_sync",
    "fir_filter",
    "map_symbols",
    "nco_advance",
    "pack_bytes",
    "polyphase_decompose",
    "psd",
    "qfunc",
    "random_bytes",
    "run_channel",
    "run_rx",
    "run_scenario_file",
    "run_scenario_json",
    "run_tx",
    "shape_pulses",
    "unpack_dibits",
    "vector_bytes",
]

__version__ = "0.1.0"
