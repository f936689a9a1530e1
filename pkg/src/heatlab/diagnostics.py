"""Mass and moment bookkeeping along evolutions.

Moments are computed on the same midpoint lattice as the mass so quadrature
bias cancels in conservation drifts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import GridMismatch, TooFewPoints
from .grid import Field, compensated_sum

MASS_EPS = 1e-12


@dataclass(frozen=True)
class MomentReport:
    """Mass and first three moments of a field.

    center_of_mass and centered_second are None when |mass| <= MASS_EPS
    (zero-mass data has no center; downstream attractors must switch to
    dipole / corrector form instead of dividing by the mass).
    """

    mass: float
    first_moment: tuple
    second_moment: float
    centered_second: float | None
    third_abs: float
    center_of_mass: tuple | None


def moments(field: Field) -> MomentReport:
    grid = field.grid
    vol = grid.cell_volume
    vals = field.values
    meshes = grid.meshes()
    mass = vol * compensated_sum(vals)
    first = tuple(vol * compensated_sum(c * vals) for c in meshes)
    r2 = grid.radius_sq()
    second = vol * compensated_sum(r2 * vals)
    third = vol * compensated_sum(np.sqrt(r2) ** 3 * np.abs(vals))
    if abs(mass) > MASS_EPS:
        center = tuple(m / mass for m in first)
        shifted = sum((meshes[i] - center[i]) ** 2 for i in range(grid.dim))
        centered = vol * compensated_sum(shifted * vals)
    else:
        center = None
        centered = None
    return MomentReport(mass, first, second, centered, third, center)


@dataclass(frozen=True)
class ConservationReport:
    times: tuple
    mass_drift: float
    first_moment_drift: float
    second_moment_slope: float
    masses: tuple
    second_moments: tuple


def _check_series(fields) -> list[Field]:
    fields = list(fields)
    if len(fields) < 3:
        raise TooFewPoints(f"need >= 3 time points, got {len(fields)}")
    g = fields[0].grid
    for f in fields[1:]:
        if f.grid != g:
            raise GridMismatch("conservation series must share one grid")
    times = [f.time for f in fields]
    if any(t1 >= t2 for t1, t2 in zip(times, times[1:])):
        raise ValueError("fields must be ordered by strictly increasing time")
    return fields


def conservation_report(fields) -> ConservationReport:
    """Max drift of mass and first moment, and the fitted d/dt of the second
    moment, along a common-grid time series."""
    fields = _check_series(fields)
    reps = [moments(f) for f in fields]
    times = np.array([f.time for f in fields])
    masses = np.array([r.mass for r in reps])
    firsts = np.array([r.first_moment for r in reps])
    seconds = np.array([r.second_moment for r in reps])
    mass_drift = float(np.max(np.abs(masses - masses[0])))
    fm_drift = float(np.max(np.abs(firsts - firsts[0])))
    a = np.vstack([times, np.ones_like(times)]).T
    slope = float(np.linalg.lstsq(a, seconds, rcond=None)[0][0])
    return ConservationReport(tuple(times), mass_drift, fm_drift, slope,
                              tuple(masses), tuple(seconds))


def p_energy(field: Field, p: float) -> float:
    """integral of |u|^p (the p-energy; dissipated for p > 1)."""
    if math.isinf(p):
        return float(np.max(np.abs(field.values)))
    if not p >= 1:
        raise ValueError(f"p-energy needs p >= 1, got {p}")
    return field.grid.cell_volume * compensated_sum(np.abs(field.values) ** p)


@dataclass(frozen=True)
class EnergyDecayReport:
    p: float
    times: tuple
    energies: tuple
    nonincreasing: bool
    max_increase: float


def energy_decay_check(fields, p: float, rel_tol: float = 1e-10) -> EnergyDecayReport:
    """Assert-style report that the p-energy does not increase along a series."""
    fields = _check_series(fields)
    energies = np.array([p_energy(f, p) for f in fields])
    increases = np.diff(energies)
    scale = max(float(np.max(np.abs(energies))), 1e-300)
    max_inc = float(np.max(increases, initial=0.0)) / scale
    return EnergyDecayReport(p, tuple(f.time for f in fields), tuple(energies),
                             bool(max_inc <= rel_tol), max_inc)
