"""Sampled-grid pairwise likelihood for spatial error regression.

Estimates (beta, sigma^2, lambda) of a spatial error regression from a
small set of observation pairs drawn one-per-cell from spatially isolated
hexagonal grid cells, so the cost of estimation is governed by the number
of pairs rather than the dataset size.
"""

from sgpl.dgp import DGPSpec, PointSet, WeightsMatrix, gen_dataset
from sgpl.hexgrid import CellId, GridSpec
from sgpl.pairsample import PairSet, SamplerConfig, run_sgpl_sampling
from sgpl.plfit import FitOptions, NumericalError, PairData, PLFit, fit_pl

__version__ = "0.1.0"

__all__ = [
    "DGPSpec",
    "PointSet",
    "WeightsMatrix",
    "gen_dataset",
    "CellId",
    "GridSpec",
    "PairSet",
    "SamplerConfig",
    "run_sgpl_sampling",
    "FitOptions",
    "NumericalError",
    "PairData",
    "PLFit",
    "fit_pl",
    "__version__",
]
