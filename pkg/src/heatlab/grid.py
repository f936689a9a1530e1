"""Truncated-box discretization of R^N with midpoint nodes, quadrature, norms.

The box is [-half_width, half_width]^dim with ``points_per_axis`` uniform
cells per axis and nodes at cell midpoints, so no node sits on the boundary
or at the origin.  All integrals are midpoint-rule sums accumulated with
compensated summation (``math.fsum``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    GridMismatch,
    NonFiniteSample,
    NonPositiveExtent,
    OddPointCount,
    OverflowInInverseGaussWeight,
    UnsupportedDimension,
)

_LOG_FLOAT_MAX = math.log(np.finfo(float).max)


@dataclass(frozen=True)
class GridSpec:
    """Centered box in R^dim with a midpoint lattice.

    Nodes along each axis are x_i = -half_width + (i + 1/2) * spacing,
    i = 0..points_per_axis-1, enumerated row-major.
    """

    dim: int
    half_width: float
    points_per_axis: int

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_width / self.points_per_axis

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.points_per_axis,) * self.dim

    @property
    def node_count(self) -> int:
        return self.points_per_axis ** self.dim

    @property
    def cell_volume(self) -> float:
        return self.spacing ** self.dim

    def axis_nodes(self) -> np.ndarray:
        """1D node coordinates shared by every axis."""
        i = np.arange(self.points_per_axis)
        return -self.half_width + (i + 0.5) * self.spacing

    def meshes(self) -> tuple[np.ndarray, ...]:
        """Coordinate arrays of shape ``self.shape``, one per axis."""
        x = self.axis_nodes()
        return np.meshgrid(*([x] * self.dim), indexing="ij")

    def radius_sq(self) -> np.ndarray:
        """|x|^2 at every node."""
        out = np.zeros(self.shape)
        for c in self.meshes():
            out = out + c * c
        return out

    def scaled(self, factor: float) -> "GridSpec":
        """Grid whose nodes are exactly ``factor`` times this grid's nodes."""
        return GridSpec(self.dim, self.half_width * factor, self.points_per_axis)


def make_grid(dim: int, half_width: float, points_per_axis: int) -> GridSpec:
    """Validated constructor for :class:`GridSpec`."""
    if dim not in (1, 2, 3):
        raise UnsupportedDimension(f"dim must be 1, 2 or 3, got {dim}")
    if not half_width > 0:
        raise NonPositiveExtent(f"half_width must be positive, got {half_width}")
    n = int(points_per_axis)
    if n != points_per_axis or n % 2 != 0 or n < 8:
        raise OddPointCount(
            f"points_per_axis must be an even integer >= 8, got {points_per_axis}")
    return GridSpec(dim, float(half_width), n)


@dataclass(frozen=True)
class Field:
    """Sampled real function on a grid at a diffusion time.

    diffusivity is 1 (u_t = Lap u) or 1/2 (u_t = Lap u / 2); operations
    refuse to mix fields that disagree on grid or diffusivity.
    """

    grid: GridSpec
    values: np.ndarray = field(repr=False)
    time: float = 0.0
    diffusivity: float = 1.0

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != self.grid.shape:
            raise GridMismatch(f"values shape {v.shape} != grid shape {self.grid.shape}")
        if not np.all(np.isfinite(v)):
            bad = np.argwhere(~np.isfinite(v))[0]
            raise NonFiniteSample(f"non-finite value at node index {tuple(bad)}")
        if self.time < 0:
            raise ValueError("time must be nonnegative")
        if self.diffusivity not in (1.0, 0.5):
            raise ValueError("diffusivity must be 1 or 1/2")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def with_values(self, values, time=None) -> "Field":
        return Field(self.grid, values, self.time if time is None else time,
                     self.diffusivity)


class NormKind:
    """Norm selector: Lp (p in [1, inf]), |x|-weighted L1, or Gaussian-weighted L2.

    The Gaussian-weighted kinds are fixed to the stationary
    G = (2 pi)^(-N/2) exp(-|x|^2/2).
    """

    def __init__(self, kind: str, p: float | None = None):
        if kind == "lp":
            if p is None or not p >= 1:
                raise ValueError("Lp norm needs p >= 1")
        elif kind not in ("weighted_l1", "l2_gauss", "l2_inv_gauss"):
            raise ValueError(f"unknown norm kind {kind!r}")
        self.kind = kind
        self.p = float(p) if p is not None else None

    @classmethod
    def lp(cls, p: float) -> "NormKind":
        return cls("lp", p)

    @classmethod
    def l1(cls) -> "NormKind":
        return cls("lp", 1.0)

    @classmethod
    def sup(cls) -> "NormKind":
        return cls("lp", math.inf)

    @classmethod
    def weighted_l1(cls) -> "NormKind":
        return cls("weighted_l1")

    @classmethod
    def l2_gauss(cls) -> "NormKind":
        return cls("l2_gauss")

    @classmethod
    def l2_inv_gauss(cls) -> "NormKind":
        return cls("l2_inv_gauss")

    def label(self) -> str:
        if self.kind == "lp":
            if math.isinf(self.p):
                return "sup"
            if self.p == 1.0:
                return "l1"
            return f"l{self.p:g}"
        return {"weighted_l1": "l1w", "l2_gauss": "l2mu",
                "l2_inv_gauss": "l2invmu"}[self.kind]

    def __eq__(self, other):
        return (isinstance(other, NormKind)
                and self.kind == other.kind and self.p == other.p)

    def __repr__(self):
        return f"NormKind({self.label()})"


def compensated_sum(values: np.ndarray) -> float:
    """Exact-order compensated sum of all entries."""
    return math.fsum(np.asarray(values, dtype=float).ravel())


def sample(grid: GridSpec, f, time: float = 0.0, diffusivity: float = 1.0) -> Field:
    """Sample a pointwise function onto the grid.

    ``f`` is called with one coordinate array per axis (meshgrid layout) and
    must return finite values at every node.
    """
    with np.errstate(all="ignore"):
        vals = np.asarray(f(*grid.meshes()), dtype=float)
    vals = np.broadcast_to(vals, grid.shape)
    if not np.all(np.isfinite(vals)):
        bad = np.argwhere(~np.isfinite(vals))[0]
        coords = tuple(float(m[tuple(bad)]) for m in grid.meshes())
        raise NonFiniteSample(f"f is not finite at node {coords}")
    return Field(grid, vals, time, diffusivity)


def quadrature(field: Field, weight=None) -> float:
    """Midpoint-rule integral of field (optionally times a weight function)."""
    vals = field.values
    if weight is not None:
        try:
            with np.errstate(all="ignore"):
                w = np.broadcast_to(np.asarray(weight(*field.grid.meshes()),
                                               dtype=float), field.grid.shape)
        except Exception as exc:
            raise GridMismatch(f"weight sampling failed: {exc}") from exc
        if not np.all(np.isfinite(w)):
            raise GridMismatch("weight is not finite on the grid")
        vals = vals * w
    return field.grid.cell_volume * compensated_sum(vals)


def log_stationary_gaussian(grid: GridSpec) -> np.ndarray:
    """log G at the nodes, G = (2 pi)^(-N/2) exp(-|x|^2/2)."""
    return -0.5 * grid.radius_sq() - 0.5 * grid.dim * math.log(2.0 * math.pi)


def stationary_gaussian(grid: GridSpec) -> np.ndarray:
    """The stationary unit Gaussian G at the nodes."""
    return np.exp(log_stationary_gaussian(grid))


def gauss_weighted_integral(field_values: np.ndarray, grid: GridSpec,
                            extra=None) -> float:
    """integral of values * G dx (times optional extra node weights)."""
    g = stationary_gaussian(grid)
    vals = field_values * g if extra is None else field_values * g * extra
    return grid.cell_volume * compensated_sum(vals)


def check_inverse_gauss_box(grid: GridSpec):
    """Refuse boxes whose corners overflow exp(+|x|^2/2)."""
    corner_sq = grid.dim * grid.half_width ** 2
    if corner_sq / 2.0 > _LOG_FLOAT_MAX / 2.0:
        raise OverflowInInverseGaussWeight(
            f"|x|^2/2 = {corner_sq / 2:.3g} exceeds {_LOG_FLOAT_MAX / 2:.3g} "
            "at the box corner; shrink the box")


def norm(field: Field, kind: NormKind) -> float:
    """Discrete norm of the field under the requested kind."""
    vals = field.values
    grid = field.grid
    if kind.kind == "lp":
        if math.isinf(kind.p):
            return float(np.max(np.abs(vals)))
        if kind.p == 1.0:
            return grid.cell_volume * compensated_sum(np.abs(vals))
        s = grid.cell_volume * compensated_sum(np.abs(vals) ** kind.p)
        return s ** (1.0 / kind.p)
    if kind.kind == "weighted_l1":
        r = np.sqrt(grid.radius_sq())
        return grid.cell_volume * compensated_sum(r * np.abs(vals))
    if kind.kind == "l2_gauss":
        return math.sqrt(max(gauss_weighted_integral(vals * vals, grid), 0.0))
    if kind.kind == "l2_inv_gauss":
        check_inverse_gauss_box(grid)
        inv_g = np.exp(-log_stationary_gaussian(grid))
        s = grid.cell_volume * compensated_sum(vals * vals * inv_g)
        return math.sqrt(max(s, 0.0))
    raise ValueError(f"unhandled norm kind {kind.kind}")


def combine(a: float, fa: Field, b: float = 0.0, fb: Field | None = None) -> Field:
    """a*fa + b*fb with grid/diffusivity compatibility checks."""
    if fb is None:
        return fa.with_values(a * fa.values)
    ensure_compatible(fa, fb)
    return fa.with_values(a * fa.values + b * fb.values)


def ensure_compatible(fa: Field, fb: Field):
    """Raise GridMismatch unless the two fields can be combined."""
    if fa.grid != fb.grid:
        raise GridMismatch(f"grids differ: {fa.grid} vs {fb.grid}")
    if fa.diffusivity != fb.diffusivity:
        raise GridMismatch(
            f"diffusivities differ: {fa.diffusivity} vs {fb.diffusivity}")


def suggested_half_width(center_radius: float, t_max: float,
                         tail_tol: float = 1e-8) -> float:
    """Box half-width so the Gaussian tail mass outside stays below tail_tol."""
    if not 0 < tail_tol < 1:
        raise ValueError("tail_tol must be in (0, 1)")
    return center_radius + 2.0 * math.sqrt(4.0 * t_max * math.log(1.0 / tail_tol))
