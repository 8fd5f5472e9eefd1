"""Nodal projection onto moment constraints and nonnegativity.

Given nodal values ``f`` of a trig-space function, the projection solves

    min ||g - f||^2   subject to   M g = rho  (and optionally g >= 0)

with the plain Euclidean norm on nodal vectors; the quadrature weight in the
moment matrix makes the constraint equal the continuous moments.  The
equality-only variant is a linear solve.  The nonnegative variant is solved
through its dual, a concave piecewise-quadratic maximization in the M
multipliers, by a semismooth Newton iteration with Armijo backtracking.  The
generalized Hessian uses the active-set element of the clip function's
subdifferential: a diagonal indicator of the strictly positive entries.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .moments import MomentSystem

__all__ = [
    "CONVERGED",
    "MAX_ITERATIONS",
    "LINE_SEARCH_STALL",
    "QPInstance",
    "SSNParams",
    "KKTReport",
    "SolveReport",
    "moments_only_project",
    "dual_eval",
    "ssn_solve",
    "kkt_check",
    "nondegeneracy_probe",
    "write_trace",
]

CONVERGED = "converged"
MAX_ITERATIONS = "max_iterations"
LINE_SEARCH_STALL = "line_search_stall"


@dataclass(frozen=True)
class QPInstance:
    """One projection problem: nodal data, moment system, target moments."""

    nodal: np.ndarray
    system: MomentSystem
    rho: np.ndarray

    def __post_init__(self) -> None:
        nodal = np.ascontiguousarray(np.asarray(self.nodal, dtype=float).ravel())
        object.__setattr__(self, "nodal", nodal)
        rho = np.ascontiguousarray(np.asarray(self.rho, dtype=float).ravel())
        object.__setattr__(self, "rho", rho)
        if self.nodal.shape != (self.system.grid.size,):
            raise ValueError(
                f"nodal vector length {self.nodal.size} does not match grid size "
                f"{self.system.grid.size}"
            )
        if self.rho.shape != (self.system.size,):
            raise ValueError(
                f"target moments length {self.rho.size} does not match basis size "
                f"{self.system.size}"
            )
        if not (np.all(np.isfinite(self.nodal)) and np.all(np.isfinite(self.rho))):
            raise ValueError("instance data must be finite")


@dataclass(frozen=True)
class SSNParams:
    """Solver knobs; the defaults are the ones every reported run uses.

    ``grad_tol`` of None resolves to ``1e-11 * (1 + max|rho|)`` per instance.
    """

    curvature_shift: float = 0.5  # multiplies the residual-sized Hessian shift
    curvature_cap: float = 0.1  # ceiling on the residual used in the shift
    armijo_slope: float = 1e-4
    backtrack_factor: float = 0.5
    grad_tol: float | None = None
    max_iterations: int = 100
    max_line_search: int = 50

    def resolve_tol(self, rho: np.ndarray) -> float:
        if self.grad_tol is not None:
            return self.grad_tol
        return 1e-11 * (1.0 + float(np.max(np.abs(rho))))


@dataclass(frozen=True)
class KKTReport:
    """Residuals of the optimality system for a candidate (g, lambda)."""

    moment_residual: float
    min_value: float
    reconstruction_gap: float
    complementarity: float
    tolerance: float
    passed: bool


@dataclass
class SolveReport:
    """Outcome of one dual Newton solve, with per-iteration history."""

    status: str
    solution: np.ndarray
    multiplier: np.ndarray
    iterations: int
    grad_norms: list[float] = field(default_factory=list)
    objective_values: list[float] = field(default_factory=list)
    step_sizes: list[float] = field(default_factory=list)
    line_search_counts: list[int] = field(default_factory=list)
    active_counts: list[int] = field(default_factory=list)
    kkt: KKTReport | None = None

    @property
    def converged(self) -> bool:
        return self.status == CONVERGED


def _effective_system(instance: QPInstance):
    """Reduce to the row space when the moment matrix lost rank.

    Returns (matrix, rho, lift) where ``lift`` maps reduced multipliers back
    to the full space.  For the usual full-rank case this is the identity
    passthrough.  A target outside the row space is unreachable and rejected.
    """
    system = instance.system
    if system.is_full_rank:
        return system.matrix, instance.rho, None
    q = system.row_space
    rho_eff = q.T @ instance.rho
    residual = instance.rho - q @ rho_eff
    if np.max(np.abs(residual)) > 1e-10 * (1.0 + np.max(np.abs(instance.rho))):
        raise ValueError(
            "target moments are not reachable: component outside the row space "
            f"of the rank-{system.rank} moment map"
        )
    return q.T @ system.matrix, rho_eff, q


def moments_only_project(instance: QPInstance) -> np.ndarray:
    """Closest nodal vector with the prescribed moments (no sign constraint).

    Solves the normal equations of ``min ||g - f||^2 s.t. M g = rho``:
    ``g = f + (1/2) M^T lam`` with ``lam = 2 (M M^T)^{-1} (rho - M f)``.
    """
    matrix, rho, _ = _effective_system(instance)
    gram = matrix @ matrix.T
    lam = 2.0 * np.linalg.solve(gram, rho - matrix @ instance.nodal)
    return instance.nodal + 0.5 * (matrix.T @ lam)


def dual_eval(lam: np.ndarray, instance: QPInstance):
    """Dual objective and gradient at a multiplier, full coordinates.

    Phi(lam) = -||clip(f + M^T lam / 2)||^2 + lam . rho + ||f||^2 and
    grad Phi = rho - M clip(f + M^T lam / 2).  Phi is concave; its unique
    maximizer reconstructs the projection as the clipped argument.
    """
    lam = np.asarray(lam, dtype=float)
    f = instance.nodal
    w = f + 0.5 * (instance.system.matrix.T @ lam)
    g = np.maximum(w, 0.0)
    phi = -float(g @ g) + float(lam @ instance.rho) + float(f @ f)
    grad = instance.rho - instance.system.matrix @ g
    return phi, grad


def ssn_solve(
    instance: QPInstance,
    params: SSNParams | None = None,
    initial_multiplier: np.ndarray | None = None,
) -> SolveReport:
    """Dual semismooth Newton solve of the nonnegative moment projection.

    Iterates on the multiplier: build the active set of strictly positive
    entries of ``f + M^T lam / 2``, take a Newton step against the
    regularized generalized Hessian ``M Diag(u) M^T / 2 + eps I`` with
    ``eps = shift * min(cap, ||grad||)``, and backtrack until the Armijo
    ascent condition holds.  Stops when the gradient norm falls below the
    tolerance; the history lists carry one entry per evaluated iterate.
    """
    params = params or SSNParams()
    matrix, rho, lift = _effective_system(instance)
    f = instance.nodal
    tol = params.resolve_tol(instance.rho)

    if initial_multiplier is not None:
        lam = np.asarray(initial_multiplier, dtype=float).copy()
        if lift is not None:
            lam = lift.T @ lam
    else:
        lam = np.zeros(matrix.shape[0])

    def evaluate(l):
        w = f + 0.5 * (matrix.T @ l)
        g = np.maximum(w, 0.0)
        grad = rho - matrix @ g
        return w, g, grad

    report = SolveReport(
        status=MAX_ITERATIONS,
        solution=np.empty(0),
        multiplier=np.empty(0),
        iterations=0,
    )

    w, g, grad = evaluate(lam)
    phi = -float(g @ g) + float(lam @ rho) + float(f @ f)
    for _ in range(params.max_iterations):
        grad_norm = float(np.linalg.norm(grad))
        report.grad_norms.append(grad_norm)
        report.objective_values.append(phi)
        report.active_counts.append(int(np.count_nonzero(w > 0.0)))
        if grad_norm <= tol:
            report.status = CONVERGED
            break

        active = w > 0.0
        eps = params.curvature_shift * min(params.curvature_cap, grad_norm)
        hess = 0.5 * ((matrix * active) @ matrix.T)
        hess[np.diag_indices_from(hess)] += eps
        direction = np.linalg.solve(hess, grad)
        slope = float(grad @ direction)

        # The ascent test measures the objective change in product form,
        # -(g_t - g).(g_t + g) + step d.rho.  Near the maximizer the true
        # gain sinks below the rounding noise of re-evaluating g, so a step
        # is also accepted when the shortfall is within that noise bound;
        # rejecting there would stall on measurement error, not on ascent.
        step = 1.0
        accepted = False
        for backtracks in range(params.max_line_search + 1):
            trial = lam + step * direction
            w_t, g_t, grad_t = evaluate(trial)
            gain = -float((g_t - g) @ (g_t + g)) + step * float(direction @ rho)
            noise = 8.0 * np.finfo(float).eps * (
                float(g @ g) + float(g_t @ g_t)
                + step * float(np.abs(direction) @ np.abs(rho))
            )
            if gain >= params.armijo_slope * step * slope - noise:
                accepted = True
                break
            step *= params.backtrack_factor
        report.step_sizes.append(step)
        report.line_search_counts.append(backtracks)
        if not accepted:
            report.status = LINE_SEARCH_STALL
            break
        lam, w, g, grad = trial, w_t, g_t, grad_t
        phi += gain
        report.iterations += 1
    else:
        grad_norm = float(np.linalg.norm(grad))
        report.grad_norms.append(grad_norm)
        report.objective_values.append(phi)
        report.active_counts.append(int(np.count_nonzero(w > 0.0)))
        if grad_norm <= tol:
            report.status = CONVERGED

    full_lam = lam if lift is None else lift @ lam
    report.solution = g
    report.multiplier = full_lam
    report.kkt = kkt_check(g, full_lam, instance)
    return report


def kkt_check(
    g: np.ndarray, lam: np.ndarray, instance: QPInstance, tol: float = 1e-10
) -> KKTReport:
    """Optimality residuals for a candidate primal-dual pair.

    Checks the moment constraint, nonnegativity, reconstruction of g as the
    clipped dual argument, and complementary slackness; all in max norm with
    the tolerance scaled by the data magnitude.
    """
    g = np.asarray(g, dtype=float).ravel()
    w = instance.nodal + 0.5 * (instance.system.matrix.T @ np.asarray(lam, dtype=float))
    moment_residual = float(np.max(np.abs(instance.system.matrix @ g - instance.rho)))
    min_value = float(np.min(g))
    reconstruction_gap = float(np.max(np.abs(g - np.maximum(w, 0.0))))
    complementarity = float(np.max(np.abs(g * (g - w))))
    scale = 1.0 + float(np.max(np.abs(instance.nodal))) + float(np.max(np.abs(instance.rho)))
    passed = (
        moment_residual <= tol * scale
        and min_value >= -tol
        and reconstruction_gap <= tol * scale
        and complementarity <= tol * scale**2
    )
    return KKTReport(
        moment_residual=moment_residual,
        min_value=min_value,
        reconstruction_gap=reconstruction_gap,
        complementarity=complementarity,
        tolerance=tol,
        passed=passed,
    )


def nondegeneracy_probe(g: np.ndarray, instance: QPInstance, rtol: float = 1e-10):
    """Check whether the support columns of M span its whole row space.

    This is the constraint-nondegeneracy condition under which the Newton
    iteration is locally quadratic.  Returns (holds, diagnostics).
    """
    g = np.asarray(g, dtype=float).ravel()
    support = g > 0.0
    matrix = instance.system.matrix
    if not np.any(support):
        sub_rank = 0
    else:
        sv = np.linalg.svd(matrix[:, support], compute_uv=False)
        sub_rank = int(np.sum(sv > rtol * sv[0])) if sv.size and sv[0] > 0 else 0
    full_rank = instance.system.rank
    return sub_rank == full_rank, {
        "support_size": int(np.count_nonzero(support)),
        "support_rank": sub_rank,
        "system_rank": full_rank,
    }


def write_trace(report: SolveReport, path) -> None:
    """Dump the per-iteration history as CSV."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("iteration,objective,grad_norm,step_size,line_search,active_count\n")
        for i in range(len(report.grad_norms)):
            step = report.step_sizes[i] if i < len(report.step_sizes) else ""
            ls = report.line_search_counts[i] if i < len(report.line_search_counts) else ""
            fh.write(
                f"{i},{report.objective_values[i]:.17g},{report.grad_norms[i]:.17g},"
                f"{step},{ls},{report.active_counts[i]}\n"
            )
