"""Slow reference solvers used to validate the fast paths.

``brute_force_qp`` enumerates active sets of the nonnegative moment
projection, so it is exponential in the node count and deliberately refuses
anything beyond a handful of points.  ``oversampled_error`` estimates a
truncation error by analyzing a function on a much finer grid and summing
the coefficient energy outside the coarse band.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .grid import SpectralField, analyze, make_grid, sample
from .projection import QPInstance

__all__ = [
    "TooLarge",
    "Infeasible",
    "OracleSolution",
    "brute_force_qp",
    "oversampled_error",
]

MAX_ORACLE_POINTS = 20


class TooLarge(ValueError):
    """Raised when the instance exceeds the enumeration budget."""


class Infeasible(RuntimeError):
    """Raised when no nonnegative vector attains the target moments."""


@dataclass(frozen=True)
class OracleSolution:
    """Optimal point of one enumerated projection problem."""

    solution: np.ndarray
    multiplier: np.ndarray
    inequality_multiplier: np.ndarray
    active: np.ndarray
    objective: float


def brute_force_qp(instance: QPInstance, tol: float = 1e-11) -> OracleSolution:
    """Solve the nonnegative moment projection by active-set enumeration.

    Walks all candidate active sets in order of increasing size.  For each,
    the free entries solve the equality-constrained projection and the
    candidate is accepted once primal feasibility (free entries nonnegative)
    and dual feasibility (multipliers of the pinned entries nonnegative)
    both hold; for this convex problem that certificate is optimality.
    Raises ``Infeasible`` when every set fails, with a cheap screen first:
    a sign-definite moment row whose target has the impossible sign.
    """
    f = instance.nodal
    matrix = instance.system.matrix
    rho = instance.rho
    n = f.size
    if n > MAX_ORACLE_POINTS:
        raise TooLarge(f"{n} nodes exceeds the enumeration budget of {MAX_ORACLE_POINTS}")

    scale = 1.0 + float(np.max(np.abs(rho)))
    for row, target in zip(matrix, rho):
        if np.all(row >= 0.0) and target < -tol * scale:
            raise Infeasible("nonnegative moment row with a negative target")
        if np.all(row <= 0.0) and target > tol * scale:
            raise Infeasible("nonpositive moment row with a positive target")

    indices = np.arange(n)
    for size in range(n + 1):
        for active in itertools.combinations(indices, size):
            mask = np.zeros(n, dtype=bool)
            mask[list(active)] = True
            free = ~mask
            sub = matrix[:, free]
            # Equality projection on the free block: g_F = f_F + M_F^T lam / 2.
            gram = sub @ sub.T
            residual = rho - sub @ f[free]
            lam, *_ = np.linalg.lstsq(gram, 2.0 * residual, rcond=None)
            g_free = f[free] + 0.5 * (sub.T @ lam)
            if np.max(np.abs(sub @ g_free - rho)) > tol * scale:
                continue  # this free set cannot reach the target
            if free.any() and np.min(g_free) < -tol:
                continue
            mu_active = -2.0 * f[mask] - (matrix[:, mask].T @ lam)
            if mask.any() and np.min(mu_active) < -tol * (1.0 + np.max(np.abs(f))):
                continue
            g = np.zeros(n)
            g[free] = np.maximum(g_free, 0.0)
            mu = np.zeros(n)
            mu[mask] = mu_active
            diff = g - f
            return OracleSolution(
                solution=g,
                multiplier=np.asarray(lam, dtype=float),
                inequality_multiplier=mu,
                active=mask,
                objective=float(diff @ diff),
            )
    raise Infeasible("no active set admits a feasible optimal point")


def oversampled_error(fn, spec, oversample: int = 4):
    """Truncation error of ``fn`` past the band of ``spec``, by oversampling.

    Samples on a grid with ``oversample`` times the modes, analyzes, and
    returns ``(tail_norm, fine_field)`` where the tail norm collects the
    coefficient energy outside the coarse band (the L2 distance between the
    fine interpolant and its truncation).
    """
    if oversample < 2:
        raise ValueError("oversample must be at least 2")
    fine_spec = make_grid(spec.dim, oversample * spec.modes, spec.half_width)
    fine = analyze(sample(fn, fine_spec))
    coeff = fine.coeffs
    inner = slice(
        fine_spec.modes - spec.modes, fine_spec.modes + spec.modes + 1
    )
    mask = np.ones(fine_spec.shape, dtype=bool)
    mask[(inner,) * spec.dim] = False
    tail_sq = float(np.sum(np.abs(coeff[mask]) ** 2))
    norm = (2.0 * spec.half_width) ** (spec.dim / 2.0) * np.sqrt(tail_sq)
    return norm, SpectralField(fine_spec, coeff)
