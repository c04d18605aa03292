from ._core import (
    Grid1D,
    NumericalError,
    PreconditionError,
    WaveField,
    __version__,
    airy_function,
    config_roundtrip,
    convexity_carleman,
    evaluate_criterion,
    evolve,
    experiment_names,
    free_propagate,
    gaussian_weighted_log_norm,
    hardy_threshold_exponent,
    heat_regularize,
    identity_names,
    oracle_counterexample,
    oracle_gaussian,
    relative_l2_error,
    run_experiment,
    spectral_derivative,
    threshold_scan,
    verify_identity,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
