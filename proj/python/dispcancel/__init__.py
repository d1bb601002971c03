"""Photocurrent cross-correlation toolkit for dispersion-cancellation experiments."""

from ._core import (
    ConfigurationError,
    DegenerateSourceError,
    DispcancelError,
    DomainError,
    FactorizationError,
    SemiclassicalError,
    UnsupportedError,
    ValidationError,
    WidthUndefinedError,
    Detector,
    FilterPair,
    GaussianKind,
    Source,
    SpectralGrid,
    __version__,
    analyze,
    bounds,
    classify_state,
    closed_form_gaussian,
    contrast,
    contrast_rect,
    critical_gain,
    cross_correlation,
    high_brightness_delta,
    montecarlo,
    parse_config,
    run_cli,
    signature_width,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
