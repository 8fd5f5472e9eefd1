"""Command line front end: error tables, relaxation runs, and self checks.

Four subcommands emit deterministic CSV artifacts.  ``convergence`` builds
the projection error table of a separable density, ``bkw`` and ``riemann``
integrate the homogeneous relaxation problems, and ``selftest`` runs the
library invariant suites at small sizes.  Floats are printed with 17
significant digits, so identical parameters reproduce identical bytes; every
CSV header carries a digest of the run manifest, and the manifest itself is
written next to the CSVs with the full command line and wall time.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import boltzmann
from .boltzmann import SimConfig, bhat_xi_eta, collision_apply, collision_direct, run_simulation
from .grid import GridField, analyze, make_grid, sample, synthesize
from .moments import MomentBasis, build_moment_system, monomial_fourier_1d, reference_moments
from .oracles import brute_force_qp, oversampled_error
from .projection import QPInstance, SSNParams, kkt_check, ssn_solve, write_trace
from .testfunctions import (
    band_field,
    cosine_power,
    exact_moments,
    projection_errors,
    smooth_exponential,
    tail_norm,
)

__all__ = ["main", "build_parser", "RunManifest"]

_BASES = {
    "full": MomentBasis.default,
    "mass-energy": MomentBasis.mass_energy,
    "mass": MomentBasis.mass_only,
}

# Runs at or past this mode count take minutes per simulated time unit and
# are refused without --confirm-long.
_LONG_RUN_MODES = 16


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return "%.17g" % float(value)


def _build_id() -> str:
    """Digest of the package sources, standing in for a commit id."""
    digest = hashlib.sha256()
    for path in sorted(Path(__file__).parent.glob("*.py")):
        digest.update(path.name.encode())
        digest.update(path.read_bytes())
    return digest.hexdigest()[:12]


@dataclass
class RunManifest:
    """Everything needed to re-run a command and check its outputs."""

    command: str
    argv: list[str]
    config: dict
    solver: dict
    build: str
    outputs: list[str] = field(default_factory=list)
    wall_time_s: float | None = None

    def digest(self) -> str:
        # Wall time stays out of the digest so that identical parameters
        # keep producing byte-identical CSV files.
        payload = {
            "command": self.command,
            "config": self.config,
            "solver": self.solver,
            "build": self.build,
            "outputs": self.outputs,
        }
        blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def write(self, directory: Path, name: str) -> None:
        data = dict(
            command=self.command,
            argv=self.argv,
            config=self.config,
            solver=self.solver,
            build=self.build,
            outputs=self.outputs,
            digest=self.digest(),
            wall_time_s=self.wall_time_s,
        )
        path = directory / name
        path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _write_csv(directory: Path, name: str, manifest: RunManifest, columns, rows) -> None:
    lines = [
        f"# posfourier {manifest.command}",
        f"# manifest-digest: {manifest.digest()}",
        ",".join(columns),
    ]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    (directory / name).write_text("\n".join(lines) + "\n", encoding="utf-8")


_PLOT_BODIES = {
    "convergence": (
        'set logscale xy\nset xlabel "N"\nset ylabel "L2 error"\n'
        'plot "{csv}" using 1:5 with linespoints title "total", '
        '"" using 1:4 with linespoints title "truncation", '
        '"" using 1:2 with linespoints title "positive gap"\n'
    ),
    "series": (
        'set xlabel "t"\n'
        'plot "{csv}" using 1:2 with lines title "L2 error", '
        '"" using 1:4 with lines title "min value"\n'
    ),
    "slice": (
        'set xlabel "v1"\nset ylabel "f"\n'
        'plot "{csv}" using 1:2 with linespoints title "slice y=z=0"\n'
    ),
}


def _write_plot_script(directory: Path, csv_name: str, kind: str) -> str:
    name = csv_name + ".gnuplot"
    body = (
        "# companion plot script; run: gnuplot -p {name}\n"
        'set datafile separator ","\nset key autotitle columnhead\n'
    ).format(name=name) + _PLOT_BODIES[kind].format(csv=csv_name)
    (directory / name).write_text(body, encoding="utf-8")
    return name


def _parse_n_list(text: str, parser: argparse.ArgumentParser) -> list[int]:
    try:
        values = [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        parser.error(f"--n expects comma-separated integers, got {text!r}")
    if not values or any(v < 1 for v in values):
        parser.error("--n entries must be positive")
    if values != sorted(set(values)):
        parser.error("--n entries must be strictly ascending")
    return values


def _ensure_out(args, parser: argparse.ArgumentParser) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if not out.is_dir():
        parser.error(f"--out {out} is not a directory")
    return out


def _require_dim3(args, parser: argparse.ArgumentParser) -> None:
    if args.dim != 3:
        parser.error("only the three-dimensional problems are wired to the CLI")


# ---------------------------------------------------------------------------
# convergence


def _cmd_convergence(args, parser, argv) -> int:
    _require_dim3(args, parser)
    if args.q == "smooth":
        sf, tag = smooth_exponential(), "smooth"
    else:
        try:
            exponent = float(args.q)
        except ValueError:
            parser.error(f"--q must be a positive number or 'smooth', got {args.q!r}")
        if exponent <= 0:
            parser.error("--q must be positive")
        sf, tag = cosine_power(exponent), f"q{args.q}"
    n_list = _parse_n_list(args.n, parser)
    if args.oversample < 8:
        parser.error("--oversample must be at least 8")
    basis = _BASES[args.basis](3)
    fine_modes = args.oversample * n_list[-1]
    out = _ensure_out(args, parser)

    start = time.perf_counter()
    rows = []
    failures = 0
    previous = None  # (modes, total) of the last successful row
    last_good = None
    for modes in n_list:
        try:
            row = projection_errors(sf, modes, fine_modes, basis)
        except RuntimeError as exc:
            print(f"convergence: n={modes}: {exc}", file=sys.stderr)
            rows.append((modes, None, None, None, None, None, None, "error"))
            failures += 1
            continue
        order = None
        if previous is not None and row.total > 0:
            order = math.log(previous[1] / row.total) / math.log(modes / previous[0])
        rows.append(
            (
                modes,
                row.positive_gap,
                row.moment_gap,
                row.tail,
                row.total,
                order,
                row.iterations,
                "ok",
            )
        )
        previous = (modes, row.total)
        last_good = modes

    csv_name = f"convergence_{tag}.csv"
    manifest = RunManifest(
        command="convergence",
        argv=argv,
        config=dict(
            dim=args.dim,
            q=args.q,
            n=n_list,
            basis=args.basis,
            oversample=args.oversample,
            fine_modes=fine_modes,
        ),
        solver=asdict(SSNParams()),
        build=_build_id(),
        outputs=[csv_name],
    )
    if args.plot_scripts:
        manifest.outputs.append(csv_name + ".gnuplot")
    _write_csv(
        out,
        csv_name,
        manifest,
        ("n", "positive_gap", "moment_gap", "tail", "total", "order", "ssn_iters", "status"),
        rows,
    )
    if args.plot_scripts:
        _write_plot_script(out, csv_name, "convergence")
    if args.trace and last_good is not None:
        # Re-solve the largest successful resolution with history recording.
        spectral = band_field(sf, last_good, fine_modes)
        system = build_moment_system(basis, spectral.spec)
        instance = QPInstance(
            nodal=synthesize(spectral).ravel(),
            system=system,
            rho=exact_moments(sf, basis),
        )
        write_trace(ssn_solve(instance), args.trace)
    manifest.wall_time_s = time.perf_counter() - start
    manifest.write(out, f"manifest_convergence_{tag}.json")
    return 1 if failures else 0


# ---------------------------------------------------------------------------
# relaxation runs


def _estimate_minutes(cfg: SimConfig) -> float:
    """Scale a small timed collision up to the requested size."""
    probe = 8
    table = boltzmann.build_kernel_table(probe, cfg.radius, cfg.half_width)
    spec = make_grid(3, probe, cfg.half_width)
    fhat = analyze(sample(lambda x, y, z: np.exp(-(x**2 + y**2 + z**2)), spec))
    collision_apply(fhat, table)  # compile before timing
    start = time.perf_counter()
    collision_apply(fhat, table)
    per_apply = time.perf_counter() - start
    scale = ((2.0 * cfg.modes + 1.0) / (2.0 * probe + 1.0)) ** 6
    stages = 1 if cfg.scheme == "euler" else 3
    return per_apply * scale * stages * cfg.n_steps / 60.0


def _make_config(args, parser, initial: str) -> SimConfig:
    n_list = _parse_n_list(args.n, parser)
    if len(n_list) != 1:
        parser.error("this subcommand takes a single --n value")
    try:
        return SimConfig(
            modes=n_list[0],
            radius=args.radius,
            half_width=args.domain_half_width,
            dt=args.dt,
            t_final=args.t_final,
            scheme=args.scheme,
            method=args.method,
            initial=initial,
        )
    except ValueError as exc:
        parser.error(str(exc))


def _gate_long_run(cfg: SimConfig, args, command: str) -> bool:
    if cfg.modes < _LONG_RUN_MODES or args.confirm_long:
        return True
    minutes = _estimate_minutes(cfg)
    print(
        f"{command}: n={cfg.modes} over {cfg.n_steps} steps is a long run "
        f"(estimated {minutes:.1f} min); pass --confirm-long to proceed",
        file=sys.stderr,
    )
    return False


def _series_rows(rows):
    return [
        (r.t, r.l2_error, r.moment_drift, r.min_value, r.ssn_iterations)
        for r in rows
    ]


def _run_manifest(command, argv, cfg: SimConfig, ssn: SSNParams) -> RunManifest:
    return RunManifest(
        command=command,
        argv=argv,
        config=asdict(cfg),
        solver=asdict(ssn),
        build=_build_id(),
    )


_SERIES_COLUMNS = ("t", "l2_err", "moment_err", "min_val", "ssn_iters")


def _cmd_bkw(args, parser, argv) -> int:
    _require_dim3(args, parser)
    cfg = _make_config(args, parser, "bkw")
    out = _ensure_out(args, parser)
    if not _gate_long_run(cfg, args, "bkw"):
        return 2
    start = time.perf_counter()
    rows, state, ctx = run_simulation(cfg)
    tag = f"{cfg.method}_n{cfg.modes}"
    series_name = f"bkw_{tag}_series.csv"
    summary_name = f"bkw_{tag}_summary.csv"
    manifest = _run_manifest("bkw", argv, cfg, ctx.ssn_params)
    manifest.outputs = [series_name, summary_name]
    if args.plot_scripts:
        manifest.outputs.append(series_name + ".gnuplot")
    last = rows[-1]
    _write_csv(out, series_name, manifest, _SERIES_COLUMNS, _series_rows(rows))
    _write_csv(
        out,
        summary_name,
        manifest,
        ("n", "method", "scheme", "dt", "t_final", "l2_err", "moment_err", "min_val", "ssn_iters"),
        [
            (
                cfg.modes,
                cfg.method,
                cfg.scheme,
                cfg.dt,
                cfg.t_final,
                last.l2_error,
                last.moment_drift,
                last.min_value,
                last.ssn_iterations,
            )
        ],
    )
    if args.plot_scripts:
        _write_plot_script(out, series_name, "series")
    manifest.wall_time_s = time.perf_counter() - start
    manifest.write(out, f"manifest_bkw_{tag}.json")
    return 0


def _cmd_riemann(args, parser, argv) -> int:
    _require_dim3(args, parser)
    cfg = _make_config(args, parser, "riemann")
    out = _ensure_out(args, parser)
    if not _gate_long_run(cfg, args, "riemann"):
        return 2
    start = time.perf_counter()
    rows, state, ctx = run_simulation(cfg)
    tag = f"{cfg.method}_n{cfg.modes}"
    series_name = f"riemann_{tag}_series.csv"
    slice_name = f"riemann_{tag}_slice.csv"
    manifest = _run_manifest("riemann", argv, cfg, ctx.ssn_params)
    manifest.outputs = [series_name, slice_name]
    if args.plot_scripts:
        manifest.outputs.append(slice_name + ".gnuplot")
    _write_csv(out, series_name, manifest, _SERIES_COLUMNS, _series_rows(rows))
    center = cfg.modes
    axis = ctx.spec.axis_points()
    values = state.nodal.values[:, center, center]
    _write_csv(
        out,
        slice_name,
        manifest,
        ("v1", "f"),
        list(zip(axis, values)),
    )
    if args.plot_scripts:
        _write_plot_script(out, slice_name, "slice")
    manifest.wall_time_s = time.perf_counter() - start
    manifest.write(out, f"manifest_riemann_{tag}.json")
    return 0


# ---------------------------------------------------------------------------
# selftest


def _random_instance(rng, dim: int, modes: int):
    spec = make_grid(dim, modes)
    system = build_moment_system(MomentBasis.default(dim), spec)
    nodal = rng.normal(size=spec.size)
    rho = system.matrix @ rng.uniform(0.05, 1.5, size=spec.size)
    return QPInstance(nodal=nodal, system=system, rho=rho)


def _suite_grid_roundtrip(rng) -> None:
    for dim in (1, 2, 3):
        spec = make_grid(dim, 3)
        f = GridField(spec, rng.normal(size=spec.shape))
        coeffs = analyze(f)
        back = synthesize(coeffs)
        assert np.max(np.abs(back.values - f.values)) < 1e-12
        nodal_sq = spec.cell_volume * float(np.sum(f.values**2))
        spectral_sq = (2.0 * spec.half_width) ** dim * float(
            np.sum(np.abs(coeffs.coeffs) ** 2)
        )
        assert abs(nodal_sq - spectral_sq) < 1e-12 * (1.0 + nodal_sq)


def _suite_moment_quadrature(rng) -> None:
    from scipy.integrate import quad

    for m, n in ((0, 2), (1, 1), (3, 4), (7, 3), (12, 6)):
        re, _ = quad(lambda t: t**n * math.cos(m * t), -math.pi, math.pi, limit=200)
        im, _ = quad(lambda t: -(t**n) * math.sin(m * t), -math.pi, math.pi, limit=200)
        value = monomial_fourier_1d(m, n)
        assert abs(value - complex(re, im) / (2 * math.pi)) < 1e-12


def _suite_moment_system(rng) -> None:
    spec = make_grid(3, 2)
    system = build_moment_system(MomentBasis.default(3), spec)
    assert system.rank == 5
    # The mass row is the plain quadrature weight at every node.
    assert np.max(np.abs(system.matrix[0] - spec.cell_volume)) < 1e-14


def _suite_projection_oracle(rng) -> None:
    for _ in range(12):
        dim = int(rng.integers(1, 3))
        modes = int(rng.integers(1, 3)) if dim == 1 else 1
        inst = _random_instance(rng, dim, modes)
        report = ssn_solve(inst)
        assert report.converged
        oracle = brute_force_qp(inst)
        assert np.max(np.abs(report.solution - oracle.solution)) < 1e-8
        assert kkt_check(report.solution, report.multiplier, inst, tol=1e-10).passed


def _suite_projection_monotone(rng) -> None:
    for _ in range(8):
        inst = _random_instance(rng, 1, 3)
        report = ssn_solve(inst)
        assert report.converged
        values = report.objective_values
        floor = 4.0 * np.finfo(float).eps * (1.0 + np.max(np.abs(values)))
        assert all(b >= a - floor for a, b in zip(values, values[1:]))


def _kernel_reference(xi: float, eta: float, radius: float = 3.0) -> float:
    from scipy.integrate import quad

    value, _ = quad(
        lambda r: r**2 * np.sinc(r * xi / np.pi) * np.sinc(r * eta / np.pi),
        0.0,
        1.0,
        limit=400,
        epsabs=1e-14,
    )
    return 32.0 * math.pi * radius**3 * value


def _suite_kernel_closed_form(rng) -> None:
    for xi, eta in ((0.0, 0.0), (0.7, 0.2), (3.0, 1.0), (9.0, 4.5), (0.03, 0.01)):
        mine = float(bhat_xi_eta(xi, eta, 3.0))
        assert abs(mine - _kernel_reference(xi, eta)) < 1e-10 * (1.0 + abs(mine))


def _suite_kernel_singular_lines(rng) -> None:
    # Continuity across the series/general-branch boundaries; a build with
    # the branch thresholds disabled fails here by design.
    points = [
        (1e-8, 2e-8),
        (0.02, 0.02),
        (0.3, 0.3),
        (0.3, 0.3 * (1.0 + 1e-10)),
        (2.0, 2.0 * (1.0 + 1e-10)),
        (7.0, 7.0 - 1e-9),
    ]
    for xi, eta in points:
        mine = float(bhat_xi_eta(xi, eta, 3.0))
        ref = _kernel_reference(xi, eta)
        assert math.isfinite(mine)
        assert abs(mine - ref) <= 1e-8 * (1.0 + abs(ref))


def _suite_collision_reference(rng) -> None:
    for modes in (1, 2):
        spec = make_grid(3, modes, boltzmann.DEALIAS_FACTOR * 3.0)
        f = GridField(spec, rng.normal(size=spec.shape) ** 2)
        fhat = analyze(f)
        table = boltzmann.build_kernel_table(modes, 3.0, spec.half_width)
        fast = collision_apply(fhat, table)
        slow = collision_direct(fhat, 3.0)
        scale = float(np.max(np.abs(slow.coeffs))) + 1.0
        assert np.max(np.abs(fast.coeffs - slow.coeffs)) < 1e-13 * scale
        center = (modes,) * 3
        assert fast.coeffs[center] == 0.0


def _suite_conservation(rng) -> None:
    cfg = SimConfig(modes=2, dt=0.01, t_final=0.2, method="spectral", scheme="ssprk3")
    rows, state, ctx = run_simulation(cfg)
    start_mass = ctx.rho_target[0]
    final_mass = float(ctx.system.matrix[0] @ state.nodal.ravel())
    assert abs(final_mass - start_mass) < 1e-12 * (1.0 + abs(start_mass))
    cfg = SimConfig(modes=2, dt=0.01, t_final=0.05, method="positive", scheme="euler")
    rows, state, ctx = run_simulation(cfg)
    assert all(abs(r.moment_drift) < 1e-12 for r in rows)
    assert all(r.min_value >= 0.0 for r in rows)


def _suite_separable_tails(rng) -> None:
    assert tail_norm(cosine_power(1), 2, fine_modes=512) < 1e-12
    assert tail_norm(cosine_power(2), 2, fine_modes=512) < 1e-12
    sf = smooth_exponential()
    spec = make_grid(3, 2, math.pi)
    # The oracle misses the energy beyond its own fine band, so it needs a
    # wide margin before the comparison tightens below 1e-8.
    oracle, _ = oversampled_error(sf, spec, oversample=32)
    assert abs(tail_norm(sf, 2) - oracle) < 1e-8 * oracle
    mine = exact_moments(sf)
    ref = reference_moments(sf, MomentBasis.default(3), make_grid(3, 16, math.pi))
    assert np.max(np.abs(mine - ref) / (1.0 + np.abs(ref))) < 1e-8


def _suite_relaxation_reference(rng) -> None:
    spec = make_grid(3, 12, boltzmann.DEALIAS_FACTOR * 3.0)
    f = sample(lambda x, y, z: boltzmann.bkw_exact(0.0, x, y, z), spec)
    x, y, z = spec.meshgrid()
    mass = spec.cell_volume * float(np.sum(f.values))
    energy = spec.cell_volume * float(np.sum(f.values * (x * x + y * y + z * z)))
    assert abs(mass - 1.0) < 1e-8
    assert abs(energy - 3.0) < 1e-7
    assert float(np.min(f.values)) > -1e-12
    grid = np.linspace(-4.0, 4.0, 9)
    late = boltzmann.bkw_exact(1e3, grid, 0.0, 0.0)
    maxwell = np.exp(-(grid**2) / 2.0) / (2.0 * math.pi) ** 1.5
    assert np.max(np.abs(late - maxwell)) < 1e-10


_SUITES = (
    ("grid-roundtrip", _suite_grid_roundtrip),
    ("moment-quadrature", _suite_moment_quadrature),
    ("moment-system", _suite_moment_system),
    ("projection-oracle", _suite_projection_oracle),
    ("projection-monotone", _suite_projection_monotone),
    ("kernel-closed-form", _suite_kernel_closed_form),
    ("kernel-singular-lines", _suite_kernel_singular_lines),
    ("collision-reference", _suite_collision_reference),
    ("conservation", _suite_conservation),
    ("separable-tails", _suite_separable_tails),
    ("relaxation-reference", _suite_relaxation_reference),
)


def _cmd_selftest(args, parser, argv) -> int:
    start = time.perf_counter()
    failures = 0
    for index, (name, fn) in enumerate(_SUITES):
        suite_start = time.perf_counter()
        try:
            fn(np.random.default_rng(args.seed + index))
            verdict = "pass"
        except Exception as exc:  # noqa: BLE001 -- report every suite
            verdict = f"FAIL ({type(exc).__name__}: {exc})"
            failures += 1
        print(f"{name}: {verdict}  [{time.perf_counter() - suite_start:.2f}s]")
    total = time.perf_counter() - start
    print(f"{len(_SUITES) - failures}/{len(_SUITES)} suites passed in {total:.1f}s")
    return 1 if failures else 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="posfourier",
        description="Positive moment-preserving Fourier projections and "
        "homogeneous relaxation runs.",
        epilog="Arguments can be read from a file with @path, one token per line.",
        fromfile_prefix_chars="@",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    conv = sub.add_parser(
        "convergence", help="projection error table for a separable density"
    )
    conv.add_argument("--dim", type=int, default=3)
    conv.add_argument(
        "--q", default="smooth", help="cosine-power exponent, or 'smooth'"
    )
    conv.add_argument(
        "--n", default="2,4,8,16,32", help="comma-separated ascending mode counts"
    )
    conv.add_argument("--basis", choices=sorted(_BASES), default="full")
    conv.add_argument(
        "--oversample",
        type=int,
        default=2048,
        help="reference transform holds oversample*max(n) modes per axis",
    )
    conv.add_argument("--out", required=True, help="output directory")
    conv.add_argument(
        "--trace", default=None, help="write the last solve's iteration history here"
    )
    conv.add_argument("--plot-scripts", action="store_true")
    conv.set_defaults(func=_cmd_convergence)

    for name, n_default, t_default, helptext in (
        ("bkw", "8", 0.1, "closed-form relaxation benchmark run"),
        ("riemann", "16", 0.5, "discontinuous two-temperature initial value run"),
    ):
        cmd = sub.add_parser(name, help=helptext)
        cmd.add_argument("--dim", type=int, default=3)
        cmd.add_argument("--n", default=n_default)
        cmd.add_argument("--scheme", choices=("euler", "ssprk3"), default="ssprk3")
        cmd.add_argument(
            "--method", choices=("spectral", "moment", "positive"), default="positive"
        )
        cmd.add_argument("--dt", type=float, default=0.01)
        cmd.add_argument("--t-final", type=float, default=t_default)
        cmd.add_argument("--radius", type=float, default=3.0)
        cmd.add_argument("--domain-half-width", type=float, default=None)
        cmd.add_argument("--out", required=True, help="output directory")
        cmd.add_argument("--confirm-long", action="store_true")
        cmd.add_argument("--plot-scripts", action="store_true")
        cmd.set_defaults(func=_cmd_bkw if name == "bkw" else _cmd_riemann)

    st = sub.add_parser("selftest", help="run the library invariant suites")
    st.add_argument("--seed", type=int, default=20260801)
    st.set_defaults(func=_cmd_selftest)
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, parser, argv)
    except SystemExit as exc:  # parser.error inside a subcommand
        return int(exc.code or 0)
    except boltzmann.NonFiniteState as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 1
    except RuntimeError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
