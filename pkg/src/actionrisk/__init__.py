"""Skeleton-sequence action recognition with risk-aware decision support.

Submodules:
    data        dataset schema, loading, preprocessing, synthesis, splits
    engine      numpy forward/backward kernels, losses, Adam, cosine schedule
    restcn      the residual temporal conv classifier and its training loop
    evaluation  confusion matrices, metrics, cohort reports
    reasoning   risk/bias/trust, discrete Bayes nets, flu decision support
    report      report document assembly and self-consistency checks
    service     FastAPI app exposing classify / report / what-if endpoints
    cli         the `actionrisk` command-line entry point
"""

__version__ = "0.1.0"
