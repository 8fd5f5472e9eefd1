"""Fourier collocation grids on symmetric periodic boxes.

Everything downstream works on the box ``[-L, L]^d`` with an odd number of
collocation points per axis, ``2N + 1``, so that resolved wavenumbers form
the symmetric set ``{-N, ..., N}``.  Coefficient arrays and value arrays are
stored as d-dimensional arrays of shape ``(2N+1,)*d``; axis ``j`` is indexed
by ``k_j + N`` (wavenumbers) or by the matching collocation index.  Flattened
vectors always use C order, which makes the first axis the slowest: the same
lexicographic order the moment matrices assume.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "GridSpec",
    "GridField",
    "SpectralField",
    "make_grid",
    "sample",
    "analyze",
    "synthesize",
    "truncate",
    "l2_norm",
    "h1_seminorm",
    "discrete_inner",
    "conjugate_asymmetry",
    "dump_coefficients",
]


@dataclass(frozen=True)
class GridSpec:
    """Geometry of a collocation grid.

    Parameters
    ----------
    dim : int
        Spatial dimension, 1 to 3.
    modes : int
        One-sided mode bound N; the grid has 2N+1 points per axis.
    half_width : float
        Box half width L; the domain is ``[-L, L]^dim``.
    """

    dim: int
    modes: int
    half_width: float

    def __post_init__(self) -> None:
        if self.dim not in (1, 2, 3):
            raise ValueError(f"dim must be 1, 2 or 3, got {self.dim}")
        if self.modes < 1:
            raise ValueError(f"modes must be >= 1, got {self.modes}")
        if not (np.isfinite(self.half_width) and self.half_width > 0):
            raise ValueError(f"half_width must be positive, got {self.half_width}")

    @property
    def points_per_axis(self) -> int:
        return 2 * self.modes + 1

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.points_per_axis,) * self.dim

    @property
    def size(self) -> int:
        return self.points_per_axis**self.dim

    @property
    def cell_volume(self) -> float:
        """Quadrature weight (2L)^d / (2N+1)^d of one collocation point."""
        return (2.0 * self.half_width) ** self.dim / self.size

    @property
    def volume(self) -> float:
        return (2.0 * self.half_width) ** self.dim

    def mode_values(self) -> np.ndarray:
        """Wavenumbers -N..N along one axis."""
        return np.arange(-self.modes, self.modes + 1)

    def axis_points(self) -> np.ndarray:
        """Collocation points 2Lk/(2N+1), k = -N..N, along one axis."""
        return (2.0 * self.half_width / self.points_per_axis) * self.mode_values()

    def meshgrid(self) -> tuple[np.ndarray, ...]:
        """Open (broadcastable) meshgrid of collocation coordinates."""
        x = self.axis_points()
        return tuple(np.meshgrid(*([x] * self.dim), indexing="ij", sparse=True))


@dataclass(frozen=True)
class GridField:
    """Real nodal values on a collocation grid."""

    spec: GridSpec
    values: np.ndarray

    def __post_init__(self) -> None:
        if self.values.shape != self.spec.shape:
            raise ValueError(
                f"value array shape {self.values.shape} does not match grid {self.spec.shape}"
            )
        if np.iscomplexobj(self.values):
            raise ValueError("nodal values must be real")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("nodal values must be finite")

    def ravel(self) -> np.ndarray:
        """Flat C-order copy of the values (lexicographic point order)."""
        return self.values.ravel()


@dataclass(frozen=True)
class SpectralField:
    """Fourier coefficients on the symmetric mode cube {-N..N}^d.

    Entry ``coeffs[k_1 + N, ..., k_d + N]`` multiplies
    ``exp(i (pi/L) k . x)``.  Fields representing real functions satisfy
    ``coeffs(-k) == conj(coeffs(k))``; construction does not force this, use
    :func:`conjugate_asymmetry` to measure it.
    """

    spec: GridSpec
    coeffs: np.ndarray

    def __post_init__(self) -> None:
        if self.coeffs.shape != self.spec.shape:
            raise ValueError(
                f"coefficient array shape {self.coeffs.shape} does not match grid {self.spec.shape}"
            )
        if not np.all(np.isfinite(self.coeffs)):
            raise ValueError("coefficients must be finite")

    def __add__(self, other: "SpectralField") -> "SpectralField":
        _require_same_spec(self.spec, other.spec)
        return SpectralField(self.spec, self.coeffs + other.coeffs)

    def __sub__(self, other: "SpectralField") -> "SpectralField":
        _require_same_spec(self.spec, other.spec)
        return SpectralField(self.spec, self.coeffs - other.coeffs)

    def __mul__(self, scalar: float) -> "SpectralField":
        return SpectralField(self.spec, self.coeffs * scalar)

    __rmul__ = __mul__


def _require_same_spec(a: GridSpec, b: GridSpec) -> None:
    if a != b:
        raise ValueError(f"grids differ: {a} vs {b}")


def make_grid(dim: int, modes: int, half_width: float = np.pi) -> GridSpec:
    """Build a grid specification; see :class:`GridSpec` for the fields."""
    return GridSpec(dim=dim, modes=modes, half_width=float(half_width))


def sample(fn, spec: GridSpec) -> GridField:
    """Sample ``fn(x_1, ..., x_d)`` on the collocation grid.

    ``fn`` must broadcast over coordinate arrays.  The result is the nodal
    field of the trigonometric interpolant's data.
    """
    coords = spec.meshgrid()
    values = np.broadcast_to(np.asarray(fn(*coords), dtype=float), spec.shape)
    return GridField(spec, np.array(values))


def analyze(field: GridField) -> SpectralField:
    """Forward transform: nodal values to symmetric-cube coefficients.

    Computes ``(2N+1)^{-d} sum_j g(x_j) exp(-i k . (pi/L) x_j)`` for every
    mode k in the cube, then symmetrizes so that ``c(-k) == conj(c(k))``
    holds exactly for the (real) input.
    """
    v = np.asarray(field.values, dtype=float)
    c = np.fft.fftshift(np.fft.fftn(np.fft.ifftshift(v))) / field.spec.size
    # Average with the reflected conjugate: exact conjugate symmetry, and a
    # no-op up to rounding for real input.
    c = 0.5 * (c + np.conj(c[(slice(None, None, -1),) * field.spec.dim]))
    return SpectralField(field.spec, c)


def synthesize(field: SpectralField) -> GridField:
    """Inverse transform: coefficients to real nodal values.

    The imaginary residue (rounding level for conjugate-symmetric input) is
    discarded.
    """
    c = np.asarray(field.coeffs, dtype=complex)
    v = np.fft.fftshift(np.fft.ifftn(np.fft.ifftshift(c))) * field.spec.size
    return GridField(field.spec, np.ascontiguousarray(v.real))


def truncate(field, modes: int) -> SpectralField:
    """Restrict to the central mode cube {-modes..modes}^d.

    Accepts a :class:`SpectralField`, or a :class:`GridField` which is
    analyzed first.  For a field sampled on a fine grid this realizes the
    orthogonal projection onto the coarse trig space, up to the sampling
    (aliasing) error of the fine representation.
    """
    if isinstance(field, GridField):
        field = analyze(field)
    src = field.spec
    if modes > src.modes:
        raise ValueError(f"cannot truncate to {modes} modes from a {src.modes}-mode field")
    lo, hi = src.modes - modes, src.modes + modes + 1
    sl = (slice(lo, hi),) * src.dim
    out_spec = GridSpec(src.dim, modes, src.half_width)
    return SpectralField(out_spec, np.ascontiguousarray(field.coeffs[sl]))


def l2_norm(field) -> float:
    """L2 norm over the box.

    For a :class:`SpectralField` this is ``(2L)^{d/2} sqrt(sum |c_k|^2)``
    (Parseval).  For a :class:`GridField` the same quantity is computed from
    the discrete quadrature, which agrees on trig-space functions.
    """
    if isinstance(field, GridField):
        return float(np.sqrt(field.spec.cell_volume * np.sum(field.values**2)))
    return float(
        np.sqrt(field.spec.volume * np.sum(np.abs(field.coeffs) ** 2))
    )


def h1_seminorm(field: SpectralField) -> float:
    """Coefficient-space H1 seminorm: sqrt(sum |k (pi/L)|^2 |c_k|^2).

    No volume factor is applied; this is the normalization the monomial
    growth bounds are stated in.
    """
    spec = field.spec
    k = spec.mode_values() * (np.pi / spec.half_width)
    ksq = k**2
    total = 0.0
    for axis in range(spec.dim):
        shape = [1] * spec.dim
        shape[axis] = spec.points_per_axis
        total += np.sum(ksq.reshape(shape) * np.abs(field.coeffs) ** 2)
    return float(np.sqrt(total))


def discrete_inner(g: GridField, w: GridField) -> float:
    """Quadrature inner product (2L)^d/(2N+1)^d sum_k g(x_k) w(x_k)."""
    _require_same_spec(g.spec, w.spec)
    return float(g.spec.cell_volume * np.sum(g.values * w.values))


def conjugate_asymmetry(field: SpectralField) -> float:
    """Max-norm violation of c(-k) == conj(c(k))."""
    rev = np.conj(field.coeffs[(slice(None, None, -1),) * field.spec.dim])
    return float(np.max(np.abs(field.coeffs - rev)))


def dump_coefficients(field: SpectralField, path) -> None:
    """Write coefficients as CSV rows ``k_1, ..., k_d, re, im``.

    Rows follow the lexicographic (C order) mode layout, so output is
    deterministic for a fixed field.
    """
    spec = field.spec
    k = spec.mode_values()
    grids = np.meshgrid(*([k] * spec.dim), indexing="ij")
    cols = [g.ravel() for g in grids]
    flat = field.coeffs.ravel()
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(f"k{j + 1}" for j in range(spec.dim)) + ",re,im\n")
        for row in range(flat.size):
            idx = ",".join(str(int(c[row])) for c in cols)
            fh.write(f"{idx},{flat[row].real:.17g},{flat[row].imag:.17g}\n")
