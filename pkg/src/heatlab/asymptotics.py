"""Renormalized attractor errors, rate fits, and the quantitative claims
about long-time behaviour: first/second-moment rates, higher correctors,
the no-universal-rate counterexample, tail brackets, sign-change fronts,
half-line dipole convergence, and the scaling-method experiment.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (
    MassMismatch,
    NonPositiveField,
    NoSignChangeOnGrid,
    RateNotDecreasing,
    TooFewPoints,
    ZeroErrorEntry,
)
from .grid import Field, GridSpec, NormKind, compensated_sum, norm, quadrature
from .kernels import dipole, gaussian, gaussian_derivative
from .semigroup import (
    BoundaryKind,
    GridSamples,
    HeatSolution,
    PointMasses,
    evolve,
    evolve_halfline,
    halfline_first_moment,
    halfline_norm,
    realize,
    rescale,
)

MASS_MISMATCH_RTOL = 1e-6


# ---------------------------------------------------------------------------
# attractors


@dataclass(frozen=True)
class GaussianAttractor:
    """mass * G_t."""
    mass: float = 1.0

    def evaluate(self, grid: GridSpec, t: float) -> np.ndarray:
        return gaussian(grid.meshes(), t, mass=self.mass)

    def label(self) -> str:
        return f"gaussian(mass={self.mass:g})"


@dataclass(frozen=True)
class GaussianTimeShift:
    """mass * G_{t + t0}."""
    mass: float = 1.0
    t0: float = 0.0

    def evaluate(self, grid: GridSpec, t: float) -> np.ndarray:
        return gaussian(grid.meshes(), t + self.t0, mass=self.mass)

    def label(self) -> str:
        return f"gaussian(mass={self.mass:g},t0={self.t0:g})"


@dataclass(frozen=True)
class GaussianCentered:
    """mass * G_t(x - center)."""
    mass: float = 1.0
    center: float | tuple = 0.0

    def evaluate(self, grid: GridSpec, t: float) -> np.ndarray:
        return gaussian(grid.meshes(), t, mass=self.mass, center=self.center)

    def label(self) -> str:
        return f"gaussian(mass={self.mass:g},center={self.center})"


@dataclass(frozen=True)
class DipoleAttractor:
    """strength * D(x, t); the half-line Dirichlet attractor."""
    strength: float = 1.0

    def evaluate(self, grid: GridSpec, t: float) -> np.ndarray:
        (x,) = grid.meshes()
        return dipole(x, t, self.strength)

    def label(self) -> str:
        return f"dipole(strength={self.strength:g})"

    @property
    def mass(self) -> float:
        return 0.0


@dataclass(frozen=True)
class CorrectorAttractor:
    """Truncated moment expansion
    sum_{|alpha| <= order} ((-1)^|alpha| / alpha!) m_alpha D^alpha G_t."""
    order: int
    moment_table: tuple   # ((alpha, value), ...) sorted

    @property
    def mass(self) -> float:
        table = dict(self.moment_table)
        dim = len(self.moment_table[0][0])
        return table[(0,) * dim]

    def evaluate(self, grid: GridSpec, t: float) -> np.ndarray:
        meshes = grid.meshes()
        out = np.zeros(grid.shape)
        for alpha, m_alpha in self.moment_table:
            if sum(alpha) > self.order:
                continue
            sign = (-1.0) ** sum(alpha)
            fact = math.prod(math.factorial(a) for a in alpha)
            out = out + (sign / fact) * m_alpha * gaussian_derivative(meshes, t, alpha)
        return out

    def label(self) -> str:
        return f"corrector(order={self.order})"


def multi_indices(dim: int, max_order: int):
    """All multi-indices with |alpha| <= max_order, lexicographic."""
    out = [alpha for alpha in itertools.product(range(max_order + 1), repeat=dim)
           if sum(alpha) <= max_order]
    out.sort(key=lambda a: (sum(a), a))
    return out


def moment_table(u0: Field, max_order: int) -> tuple:
    """((alpha, integral of u0 * x^alpha), ...) for |alpha| <= max_order."""
    meshes = u0.grid.meshes()
    entries = []
    for alpha in multi_indices(u0.grid.dim, max_order):
        w = np.ones(u0.grid.shape)
        for i, a in enumerate(alpha):
            if a:
                w = w * meshes[i] ** a
        entries.append((alpha, u0.grid.cell_volume
                        * compensated_sum(w * u0.values)))
    return tuple(entries)


def corrector_attractor(table, order: int) -> CorrectorAttractor:
    """Attractor built from a moment table (see :func:`moment_table`)."""
    return CorrectorAttractor(order, tuple(table))


# ---------------------------------------------------------------------------
# error series and rate fits


@dataclass(frozen=True)
class ErrorSeries:
    """Norms of (solution - attractor) along increasing times.

    renormalized = raw * t^power with the norm-dependent power that makes
    the leading Gaussian decay scale-free.
    """

    times: tuple
    raw: tuple
    renormalized: tuple
    norm_label: str
    attractor_label: str
    renorm_power: float = 0.0

    def __post_init__(self):
        t = np.asarray(self.times)
        if len(t) and (np.any(t <= 0) or np.any(np.diff(t) <= 0)):
            raise ValueError("times must be positive and strictly increasing")
        for seq in (self.raw, self.renormalized):
            a = np.asarray(seq)
            if len(a) and (np.any(~np.isfinite(a)) or np.any(a < 0)):
                raise ValueError("error entries must be finite and nonnegative")


@dataclass(frozen=True)
class RateFit:
    slope: float
    intercept: float
    slope_stderr: float
    r_squared: float
    n_points: int


def whole_space_renorm_power(kind: NormKind, dim: int) -> float:
    """t-exponent that renormalizes an L^p error against M G_t."""
    if kind.kind == "lp":
        if math.isinf(kind.p):
            return dim / 2.0
        return dim * (kind.p - 1.0) / (2.0 * kind.p)
    if kind.kind == "weighted_l1":
        return 0.0
    raise ValueError(f"no renormalization defined for norm {kind.label()}")


def halfline_renorm_power(kind: NormKind) -> float:
    """t-exponent for half-line dipole errors (t^(1/2) for sup only)."""
    if kind.kind == "lp" and math.isinf(kind.p):
        return 0.5
    return 0.0


def attractor_error(data, attractor, norm_kind: NormKind, times, grid: GridSpec,
                    boundary: BoundaryKind = BoundaryKind.WHOLE_SPACE,
                    method: str = "fft", check_mass: bool = True) -> ErrorSeries:
    """Evolve the data and norm the distance to the attractor at each time."""
    times = [float(t) for t in times]
    u0 = realize(data, grid)
    if check_mass and hasattr(attractor, "mass"):
        m_data = (quadrature(u0) if boundary == BoundaryKind.WHOLE_SPACE
                  else 2.0 * halfline_first_moment(u0))
        m_attr = (attractor.mass if boundary == BoundaryKind.WHOLE_SPACE
                  else attractor.strength)
        scale = max(abs(m_attr), abs(m_data), 1e-300)
        if abs(m_data - m_attr) > MASS_MISMATCH_RTOL * scale:
            raise MassMismatch(
                f"data invariant {m_data:.9g} vs attractor {m_attr:.9g}")
    if boundary == BoundaryKind.WHOLE_SPACE:
        power = whole_space_renorm_power(norm_kind, grid.dim)
    else:
        power = halfline_renorm_power(norm_kind)
    raw = []
    for t in times:
        if boundary == BoundaryKind.WHOLE_SPACE:
            u = evolve(GridSamples(u0), grid, t, method)
            err = u.with_values(u.values - attractor.evaluate(grid, t))
            raw.append(norm(err, norm_kind))
        else:
            u = evolve_halfline(GridSamples(u0), boundary, grid, t, method)
            err = u.with_values(u.values - attractor.evaluate(grid, t))
            raw.append(halfline_norm(err, norm_kind))
    ren = [r * t ** power for r, t in zip(raw, times)]
    return ErrorSeries(tuple(times), tuple(raw), tuple(ren),
                       norm_kind.label(), attractor.label(), power)


def dipole_error(data, times, norm_kind: NormKind, grid: GridSpec,
                 method: str = "fft") -> ErrorSeries:
    """Half-line Dirichlet error against 2 N1 D(x, t).

    The strength is twice the half-line first moment of the data, which the
    Dirichlet flow conserves.
    """
    u0 = realize(data, grid)
    strength = 2.0 * halfline_first_moment(u0)
    return attractor_error(GridSamples(u0), DipoleAttractor(strength), norm_kind,
                           times, grid, BoundaryKind.HALFLINE_DIRICHLET, method)


def fit_rate(series: ErrorSeries, window: tuple | None = None) -> RateFit:
    """Least-squares slope of log(renormalized error) against log(t)."""
    t = np.asarray(series.times)
    e = np.asarray(series.renormalized)
    if window is not None:
        keep = (t >= window[0]) & (t <= window[1])
        t, e = t[keep], e[keep]
    nonzero = e > 0
    n_dropped = int(np.sum(~nonzero))
    if n_dropped:
        warnings.warn(f"dropping {n_dropped} zero error entries from rate fit")
        t, e = t[nonzero], e[nonzero]
    if len(t) < 3:
        if n_dropped:
            raise ZeroErrorEntry(
                "too few nonzero entries to fit; data matches the attractor")
        raise TooFewPoints(f"rate fit needs >= 3 points, got {len(t)}")
    x, y = np.log(t), np.log(e)
    n = len(x)
    xbar = x.mean()
    sxx = float(np.sum((x - xbar) ** 2))
    slope = float(np.sum((x - xbar) * (y - y.mean())) / sxx)
    intercept = float(y.mean() - slope * xbar)
    resid = y - (slope * x + intercept)
    rss = float(np.sum(resid ** 2))
    tss = float(np.sum((y - y.mean()) ** 2))
    stderr = math.sqrt(rss / (n - 2) / sxx) if n > 2 else 0.0
    r2 = 1.0 if tss == 0.0 else 1.0 - rss / tss
    return RateFit(slope, intercept, stderr, r2, n)


def mixing_error(data_u, data_v, times, grid: GridSpec,
                 method: str = "fft") -> ErrorSeries:
    """||u(t) - v(t)||_1 for two equal-mass solutions (no renormalization)."""
    u0 = realize(data_u, grid)
    v0 = realize(data_v, grid)
    mu, mv = quadrature(u0), quadrature(v0)
    if abs(mu - mv) > 1e-8:
        raise MassMismatch(f"masses differ: {mu:.12g} vs {mv:.12g}")
    raw = []
    for t in times:
        du = evolve(GridSamples(u0), grid, float(t), method)
        dv = evolve(GridSamples(v0), grid, float(t), method)
        raw.append(norm(du.with_values(du.values - dv.values), NormKind.l1()))
    return ErrorSeries(tuple(float(t) for t in times), tuple(raw), tuple(raw),
                       "l1", "mixing", 0.0)


# ---------------------------------------------------------------------------
# no-rate counterexample (closed form, never evolved on a grid)


@dataclass(frozen=True)
class CounterexampleReport:
    """Point-mass construction defeating a proposed uniform rate phi.

    data is (1 - delta) delta_0 + sum m_n delta_{x_n} with |x_n| = r_n; the
    witness is the renormalized sup error at x = 0, which is available in
    closed form as a finite Gaussian sum.
    """

    masses: tuple
    radii: tuple
    times: tuple
    witness_values: tuple     # sum_j m_j (1 - exp(-r_j^2 / 4 t_n))
    witness_bounds: tuple     # n * phi(t_n)
    delta: float

    @property
    def holds(self) -> bool:
        return all(v >= b for v, b in zip(self.witness_values, self.witness_bounds))

    def point_masses(self) -> PointMasses:
        entries = [(0.0, 1.0 - self.delta)]
        entries += [(r, m) for r, m in zip(self.radii, self.masses)]
        return PointMasses(tuple(entries))


def build_counterexample(phi, n_terms: int, margin: float = 0.1,
                         search_base: float = 2.0,
                         max_exponent: int = 200) -> CounterexampleReport:
    """Choose masses m_n = 2^-n, times and radii so the renormalized error
    at x = 0 beats n * phi(t_n) for every n."""
    if not 1 <= n_terms <= 6:
        raise ValueError("n_terms must be between 1 and 6")
    grid_times = [search_base ** j for j in range(max_exponent)]
    vals = [phi(t) for t in grid_times]
    if any(b >= a for a, b in zip(vals, vals[1:])) or any(v <= 0 for v in vals):
        raise RateNotDecreasing(
            "phi must be positive and strictly decreasing on the search grid")
    masses = [2.0 ** -(n + 1) for n in range(n_terms)]
    times, radii = [], []
    t_prev = 0.0
    for n, m in enumerate(masses, start=1):
        t_n = next((t for t, v in zip(grid_times, vals)
                    if v <= m / (2.0 * n) and t >= 4.0 * t_prev), None)
        if t_n is None:
            raise ValueError("search grid exhausted; phi decreases too slowly")
        times.append(t_n)
        radii.append(2.0 * math.sqrt(t_n * math.log(2.0)) * (1.0 + margin))
        t_prev = t_n
    witness, bounds = [], []
    for n, t_n in enumerate(times, start=1):
        s = math.fsum(m * (1.0 - math.exp(-r * r / (4.0 * t_n)))
                      for m, r in zip(masses, radii))
        witness.append(s)
        bounds.append(n * phi(t_n))
    return CounterexampleReport(tuple(masses), tuple(radii), tuple(times),
                                tuple(witness), tuple(bounds), math.fsum(masses))


# ---------------------------------------------------------------------------
# tails


@dataclass(frozen=True)
class TailReport:
    radii: tuple
    neg_log_ratio: tuple        # -log(u/M) at the sampled nodes
    quadratic_ratio: tuple      # (-log(u/M)) / |x|^2
    lower_bound: tuple
    upper_bound: tuple
    inside_bracket: bool
    sup_ratio_deviation: float  # sup |ratio - 1/(4t)| on the outer half


def tail_profile(field: Field, mass: float, support_center: float = 0.0,
                 support_radius: float = 1.0,
                 annulus: tuple = (5.0, 15.0)) -> TailReport:
    """Check the universal quadratic-exponential tail of compactly
    supported data against the two-sided moved-mass bounds.

    For data supported in B_R(x_c), every annulus sample of -log(u/M) must
    lie between (N/2) log(4 pi t) + (|x - x_c| -+ R)^2 / 4t.
    """
    if mass <= 0:
        raise ValueError("tail_profile needs positive mass")
    grid = field.grid
    t = field.time
    r = np.sqrt(grid.radius_sq())
    sel = (r >= annulus[0]) & (r <= annulus[1])
    if not np.any(sel):
        raise ValueError("annulus contains no grid nodes")
    u = field.values[sel]
    if np.any(u <= 0):
        raise NonPositiveField("solution must be positive on the annulus")
    rr = r[sel]
    dist = np.abs(rr - abs(support_center))
    neg_log = -np.log(u / mass)
    prefix = 0.5 * grid.dim * math.log(4.0 * math.pi * t)
    lo = prefix + (dist - support_radius) ** 2 / (4.0 * t)
    hi = prefix + (dist + support_radius) ** 2 / (4.0 * t)
    ratio = neg_log / rr ** 2
    inside = bool(np.all((neg_log >= lo - 1e-12) & (neg_log <= hi + 1e-12)))
    outer = rr >= 0.5 * (annulus[0] + annulus[1])
    sup_dev = float(np.max(np.abs(ratio[outer] - 1.0 / (4.0 * t))))
    order = np.argsort(rr)
    return TailReport(tuple(rr[order]), tuple(neg_log[order]),
                      tuple(ratio[order]), tuple(lo[order]), tuple(hi[order]),
                      inside, sup_dev)


# ---------------------------------------------------------------------------
# sign-change front


@dataclass(frozen=True)
class FrontReport:
    times: tuple
    positions: tuple
    predicted: tuple      # h/2 + (2t/h) log(1/eps)
    slope: float          # fitted d r / d t
    expected_slope: float


def sign_change_front(eps: float, separation: float, times, grid: GridSpec,
                      method: str = "fft") -> FrontReport:
    """Zero crossing of the solution with data delta_0 - eps delta_h.

    The crossing is located by linear interpolation between the bracketing
    nodes and compared with the closed-form crossing of
    G_t(x) = eps G_t(x - h).
    """
    if not 0 < eps <= 1:
        raise ValueError("eps must be in (0, 1]")
    if grid.dim != 1:
        raise ValueError("sign-change front is one-dimensional")
    h = separation
    data = PointMasses(((0.0, 1.0), (h, -eps)))
    x = grid.axis_nodes()
    positions, predicted = [], []
    for t in times:
        t = float(t)
        u = evolve(data, grid, t, method).values
        # a genuine crossing has a jump well above roundoff noise
        jump_floor = 1024 * np.finfo(float).eps * np.max(np.abs(u))
        candidates = ((u[:-1] > 0) & (u[1:] < 0)
                      & (u[:-1] - u[1:] > jump_floor) & (x[:-1] > 0))
        crossing = None
        hits = np.nonzero(candidates)[0]
        if hits.size:
            crossing = hits[0]
        if crossing is None:
            raise NoSignChangeOnGrid(
                f"no sign change on the grid at t={t}; enlarge the box")
        i = crossing
        positions.append(float(x[i] - u[i] * grid.spacing / (u[i + 1] - u[i])))
        predicted.append(h / 2.0 + (2.0 * t / h) * math.log(1.0 / eps))
    tarr = np.asarray([float(t) for t in times])
    a = np.vstack([tarr, np.ones_like(tarr)]).T
    slope = float(np.linalg.lstsq(a, np.asarray(positions), rcond=None)[0][0])
    return FrontReport(tuple(tarr), tuple(positions), tuple(predicted),
                       slope, 2.0 * math.log(1.0 / eps) / h)


# ---------------------------------------------------------------------------
# scaling experiment


@dataclass(frozen=True)
class ScalingReport:
    ks: tuple
    sup_distances: tuple
    l1_distances: tuple
    renorm_sup_errors: tuple   # t^(N/2) sup error at t = k^2, matching points
    renorm_l1_errors: tuple
    mass: float

    @property
    def strictly_decreasing(self) -> bool:
        d = self.sup_distances
        return all(b < a for a, b in zip(d, d[1:]))


def scaling_experiment(data, ks, grid: GridSpec) -> ScalingReport:
    """Distance of the rescaled solution at time 1 from M G_1, next to the
    renormalized error at t = k^2 evaluated on the matching point set."""
    ks = [float(k) for k in ks]
    if any(k <= 0 for k in ks):
        raise ValueError("scaling parameters must be positive")
    sol = HeatSolution(data, grid)
    mass = sol.mass
    x = grid.axis_nodes()
    keep = np.abs(x) <= grid.half_width / max(ks)
    pts = x[keep]
    cell = grid.spacing ** grid.dim
    sup_d, l1_d, sup_e, l1_e = [], [], [], []
    for k in ks:
        axes = (pts,) * grid.dim
        scaled = rescale(sol, k).eval_axes(axes, 1.0)
        target = gaussian(np.meshgrid(*axes, indexing="ij")
                          if grid.dim > 1 else pts, 1.0, mass=mass)
        diff = scaled - target
        sup_d.append(float(np.max(np.abs(diff))))
        l1_d.append(cell * float(np.sum(np.abs(diff))))
        # same points through the unscaled error at t = k^2
        y_axes = (k * pts,) * grid.dim
        u = sol.eval_axes(y_axes, k * k)
        g = gaussian(np.meshgrid(*y_axes, indexing="ij")
                     if grid.dim > 1 else k * pts, k * k, mass=mass)
        sup_e.append((k * k) ** (grid.dim / 2.0) * float(np.max(np.abs(u - g))))
        l1_e.append((k * grid.spacing) ** grid.dim * float(np.sum(np.abs(u - g))))
    return ScalingReport(tuple(ks), tuple(sup_d), tuple(l1_d),
                         tuple(sup_e), tuple(l1_e), mass)
