"""Minimax lower bounds for dictionary learning, evaluated and checked numerically.

Submodules
----------
model
    Generative model: sparse / general-covariance coefficients, noise, batches.
geometry
    Oblique-manifold predicates, neighborhoods, RIP constants.
packing
    Binary packing codes and the separated dictionary ensembles used in the
    Fano reduction.
bounds
    Closed-form lower / upper bounds and sample-size inversion.
infotheory
    Mutual-information budgets, Fano floor, minimum-distance detector.
learners
    Thresholding learner, coefficient-oracle least squares, MSE harness.
cli
    ``minimaxdl`` command line front end.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: F401
    ConfigError,
    ConstructionError,
    DimensionError,
    EnumerationCapError,
    MinimaxDLError,
    ParameterError,
    UnsupportedModelError,
)
