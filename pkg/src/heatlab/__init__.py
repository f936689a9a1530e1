"""heatlab: a desk-scale numerical laboratory for the heat semigroup on R^N.

Library layers:

- grid: box discretization, quadrature, norms
- kernels: closed-form solutions (Gaussian, derivatives, dipole, ...)
- semigroup: whole-space / half-line evolution, forcing, reaction, rescaling
- diagnostics: mass and moment bookkeeping
- asymptotics: attractor errors, rate fits, counterexample, tails, fronts
- renormalized: Fokker-Planck / Ornstein-Uhlenbeck / Hamiltonian frames,
  entropy and log-Sobolev functionals
- hermite: Ornstein-Uhlenbeck eigenexpansion and spectral evolution
- cli: config-driven experiments emitting CSV + JSON reports

The direct-convolution hot loops run on a compiled Cython core when built,
with a numpy fallback selected at import (see heatlab.backend).
"""

from .backend import backend_name
from .grid import Field, GridSpec, NormKind, make_grid, norm, quadrature, sample

__all__ = [
    "Field",
    "GridSpec",
    "NormKind",
    "backend_name",
    "make_grid",
    "norm",
    "quadrature",
    "sample",
]

__version__ = "0.1.0"
