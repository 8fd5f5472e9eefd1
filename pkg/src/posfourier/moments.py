"""Moment systems built from exact Fourier coefficients of monomials.

A moment basis is a list of polynomial components (mass, momentum, energy by
default).  Its discrete moment system is the matrix that maps nodal values on
a collocation grid to the moments of the underlying trig-space function; the
matrix entries are exact because the Fourier coefficients of ``t^n`` on
``[-pi, pi]`` satisfy a closed two-term recursion in ``n``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grid import GridField, GridSpec, SpectralField, synthesize

__all__ = [
    "DegenerateMomentSystem",
    "MonomialTerm",
    "MomentBasis",
    "MomentSystem",
    "monomial_fourier_1d",
    "monomial_spectrum",
    "build_moment_system",
    "moments_of",
    "reference_moments",
    "dump_matrix",
]

RANK_RTOL = 1e-10


class DegenerateMomentSystem(ValueError):
    """The projected basis lost rank on the given grid."""

    def __init__(self, message: str, singular_values: np.ndarray):
        super().__init__(message)
        self.singular_values = singular_values


def monomial_fourier_1d(m: int, n: int) -> complex:
    """Fourier coefficient of t^n at wavenumber m on [-pi, pi].

    Returns ``(1/2pi) integral t^n exp(-i m t) dt``.  For m = 0 the value is
    closed form; otherwise integration by parts twice gives a recursion in n
    whose base cases are F(m, 0) = 0 and F(m, -1) = 0.
    """
    if n < 0:
        raise ValueError(f"power must be >= 0, got {n}")
    if m == 0:
        return complex(((-1.0) ** n + 1.0) * np.pi**n / (2.0 * (n + 1)))
    sign = -1.0 if m % 2 else 1.0
    prev2 = 0.0 + 0.0j  # F(m, p - 2), seeds both parity chains
    value = 0.0 + 0.0j  # F(m, 0)
    for p in range(1 + (n % 2 == 0), n + 1, 2):
        if p % 2:
            value = 1j * sign * np.pi ** (p - 1) / m - p * (p - 1) / m**2 * prev2
        else:
            value = sign * p * np.pi ** (p - 2) / m**2 - p * (p - 1) / m**2 * prev2
        prev2 = value
    return complex(value)


def _fourier_profile(power: int, modes: int) -> np.ndarray:
    """Vector of F(k, power) for k = -modes..modes, same recursion as above."""
    k = np.arange(-modes, modes + 1, dtype=float)
    nonzero = k != 0
    if power == 0:
        return np.where(nonzero, 0.0, 1.0).astype(complex)
    ksafe = np.where(nonzero, k, 1.0)
    sign = np.where((np.arange(-modes, modes + 1) % 2) != 0, -1.0, 1.0)
    # The recursion couples powers of equal parity; both chains start from
    # zero because F(k, 0) = 0 = F(k, -1) away from k = 0.
    value = np.zeros(2 * modes + 1, dtype=complex)
    for p in range(2 - (power % 2), power + 1, 2):
        if p % 2:
            value = 1j * sign * np.pi ** (p - 1) / ksafe - p * (p - 1) / ksafe**2 * value
        else:
            value = sign * p * np.pi ** (p - 2) / ksafe**2 - p * (p - 1) / ksafe**2 * value
    center = ((-1.0) ** power + 1.0) * np.pi**power / (2.0 * (power + 1))
    return np.where(nonzero, value, center)


@dataclass(frozen=True)
class MonomialTerm:
    """One term ``coefficient * x^powers`` of a basis component."""

    coefficient: float
    powers: tuple[int, ...]

    def __post_init__(self) -> None:
        if any(p < 0 for p in self.powers):
            raise ValueError(f"powers must be nonnegative, got {self.powers}")


@dataclass(frozen=True)
class MomentBasis:
    """Polynomial moment functionals, one component per row of the system.

    Components are tuples of :class:`MonomialTerm`.  One component must be a
    plain nonzero constant: its moment bounds the feasible set of the
    nonnegative projection.
    """

    dim: int
    components: tuple[tuple[MonomialTerm, ...], ...]

    def __post_init__(self) -> None:
        if not self.components:
            raise ValueError("basis needs at least one component")
        for comp in self.components:
            for term in comp:
                if len(term.powers) != self.dim:
                    raise ValueError(
                        f"term {term} does not match basis dimension {self.dim}"
                    )
        if self.constant_index is None:
            raise ValueError("basis must contain a constant component")
        self._check_independent()

    def _check_independent(self) -> None:
        powers = sorted({t.powers for comp in self.components for t in comp})
        col = {p: i for i, p in enumerate(powers)}
        mat = np.zeros((len(self.components), len(powers)))
        for i, comp in enumerate(self.components):
            for term in comp:
                mat[i, col[term.powers]] += term.coefficient
        if np.linalg.matrix_rank(mat) < len(self.components):
            raise ValueError("basis components are linearly dependent as polynomials")

    @property
    def size(self) -> int:
        return len(self.components)

    @property
    def constant_index(self):
        zero = (0,) * self.dim
        for i, comp in enumerate(self.components):
            if (
                len(comp) == 1
                and comp[0].powers == zero
                and comp[0].coefficient != 0.0
            ):
                return i
        return None

    @classmethod
    def default(cls, dim: int) -> "MomentBasis":
        """Mass, each momentum component, and energy |x|^2."""
        zero = (0,) * dim
        comps = [(MonomialTerm(1.0, zero),)]
        for j in range(dim):
            p = [0] * dim
            p[j] = 1
            comps.append((MonomialTerm(1.0, tuple(p)),))
        energy = []
        for j in range(dim):
            p = [0] * dim
            p[j] = 2
            energy.append(MonomialTerm(1.0, tuple(p)))
        comps.append(tuple(energy))
        return cls(dim=dim, components=tuple(comps))

    @classmethod
    def mass_only(cls, dim: int) -> "MomentBasis":
        return cls(dim=dim, components=((MonomialTerm(1.0, (0,) * dim),),))

    @classmethod
    def mass_energy(cls, dim: int) -> "MomentBasis":
        full = cls.default(dim)
        return cls(dim=dim, components=(full.components[0], full.components[-1]))


def monomial_spectrum(alpha: tuple[int, ...], grid: GridSpec) -> SpectralField:
    """Truncated Fourier coefficients of x^alpha on the grid's box.

    Per axis the coefficients are F(k, alpha_j) rescaled by (L/pi)^alpha_j,
    from the substitution x = (L/pi) t; the d-dimensional coefficient is the
    product over axes.
    """
    if len(alpha) != grid.dim:
        raise ValueError(f"alpha {alpha} does not match grid dimension {grid.dim}")
    scale = (grid.half_width / np.pi) ** sum(alpha)
    coeffs = np.asarray(scale, dtype=complex)
    for a in alpha:
        coeffs = np.multiply.outer(coeffs, _fourier_profile(a, grid.modes))
    return SpectralField(grid, np.ascontiguousarray(coeffs))


def component_spectrum(component, grid: GridSpec) -> SpectralField:
    """Truncated coefficients of one polynomial basis component."""
    coeffs = np.zeros(grid.shape, dtype=complex)
    for term in component:
        coeffs += term.coefficient * monomial_spectrum(term.powers, grid).coeffs
    return SpectralField(grid, coeffs)


@dataclass(frozen=True)
class MomentSystem:
    """Discrete moment map on a fixed grid.

    ``matrix`` has shape (M, (2N+1)^d); entry (j, k) is the quadrature weight
    times the projected basis component j evaluated at collocation point k
    (lexicographic order).  ``spectra`` keeps the truncated coefficients of
    each component for exact pairing against spectral fields.
    """

    basis: MomentBasis
    grid: GridSpec
    matrix: np.ndarray
    spectra: tuple[SpectralField, ...]
    singular_values: np.ndarray
    rank: int
    row_space: np.ndarray = field(repr=False, default=None)

    @property
    def size(self) -> int:
        return self.basis.size

    @property
    def is_full_rank(self) -> bool:
        return self.rank == self.basis.size


def build_moment_system(
    basis: MomentBasis, grid: GridSpec, *, allow_degenerate: bool = False
) -> MomentSystem:
    """Assemble the moment matrix and its rank diagnostics.

    Raises :class:`DegenerateMomentSystem` when the projected components are
    numerically dependent (rank below M at relative tolerance 1e-10), unless
    ``allow_degenerate`` is set, in which case the rank and an orthonormal
    basis of the row space are recorded for the reduced solver path.
    """
    if basis.dim != grid.dim:
        raise ValueError(f"basis dimension {basis.dim} does not match grid {grid.dim}")
    spectra = tuple(component_spectrum(comp, grid) for comp in basis.components)
    rows = [grid.cell_volume * synthesize(s).values.ravel() for s in spectra]
    matrix = np.vstack(rows)
    u, sv, _ = np.linalg.svd(matrix, full_matrices=False)
    rank = int(np.sum(sv > RANK_RTOL * sv[0]))
    if rank < basis.size and not allow_degenerate:
        raise DegenerateMomentSystem(
            f"moment system rank {rank} < {basis.size} on N={grid.modes} grid "
            f"(singular values {sv})",
            sv,
        )
    return MomentSystem(
        basis=basis,
        grid=grid,
        matrix=matrix,
        spectra=spectra,
        singular_values=sv,
        rank=rank,
        row_space=np.ascontiguousarray(u[:, :rank]),
    )


def moments_of(f, system: MomentSystem) -> np.ndarray:
    """Moments of a trig-space function.

    For a :class:`SpectralField` the exact pairing
    ``(2L)^d sum_k mhat_k conj(fhat_k)`` is used; for a :class:`GridField`
    the moment matrix is applied to the nodal values.  The two agree to
    rounding for consistent fields.
    """
    if isinstance(f, GridField):
        if f.spec != system.grid:
            raise ValueError("field grid does not match moment system grid")
        return system.matrix @ f.ravel()
    if f.spec != system.grid:
        raise ValueError("field grid does not match moment system grid")
    volume = system.grid.volume
    out = np.empty(system.size)
    for j, s in enumerate(system.spectra):
        out[j] = float(np.sum(s.coeffs * np.conj(f.coeffs)).real) * volume
    return out


def _component_pairing(component, fine: SpectralField) -> float:
    """Exact moment of the fine interpolant against one basis component."""
    grid = fine.spec
    scale_base = grid.half_width / np.pi
    total = 0.0
    for term in component:
        # sum_k mhat_k conj(fhat_k) done axis by axis; only the real part
        # survives for conjugate-symmetric fields.
        contracted = fine.coeffs
        for axis in range(grid.dim):
            prof = np.conj(_fourier_profile(term.powers[axis], grid.modes))
            contracted = np.tensordot(prof, contracted, axes=(0, 0))
        total += term.coefficient * scale_base ** sum(term.powers) * float(
            np.real(contracted)
        )
    return grid.volume * total


def reference_moments(
    f,
    basis: MomentBasis,
    grid: GridSpec,
    oversample: int = 4,
    *,
    self_check: bool = False,
):
    """Quadrature reference for the moments of a black-box function.

    Samples ``f`` on a grid refined by ``oversample`` and pairs the fine
    interpolant with the exact monomial coefficients.  This equals a trapezoid
    rule whose weights are the projected basis polynomials, and it is
    spectrally accurate whenever the integrand is smooth and periodic.  With
    ``self_check`` the moments are also computed at half the oversampling and
    the worst relative change is returned alongside.
    """
    from .grid import analyze, make_grid, sample

    if oversample < 1:
        raise ValueError("oversample must be >= 1")

    def at(factor: int) -> np.ndarray:
        fine_grid = make_grid(grid.dim, factor * grid.modes, grid.half_width)
        fine = analyze(sample(f, fine_grid))
        return np.array([_component_pairing(c, fine) for c in basis.components])

    rho = at(oversample)
    if not self_check:
        return rho
    coarse = at(max(1, oversample // 2))
    scale = np.maximum(np.abs(rho), 1e-300)
    return rho, float(np.max(np.abs(rho - coarse) / scale))


def dump_matrix(system: MomentSystem, path) -> None:
    """Write the moment matrix as CSV, one row per component."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("component," + ",".join(f"p{j}" for j in range(system.matrix.shape[1])) + "\n")
        for i in range(system.size):
            row = ",".join(f"{v:.17g}" for v in system.matrix[i])
            fh.write(f"{i},{row}\n")
