"""Command-line interface.

One subcommand per report or primitive:

    paul, pb, pb-discrete, amplified-pb   phase distributions
    amplify, attenuate                    channel application (matrix out)
    ratio, table1, fig1a, fig1b           convergence studies
    nonlinear                             quadratic-schedule scan
    checks                                property suite

Every run echoes its fully resolved configuration (defaults included)
into the output header; numerical warnings are captured and emitted as
structured header comments, never dropped.  Output is CSV (default) or
JSON; ``--plot PATH`` additionally renders the report as a figure.

Exit codes: 0 success, 2 usage error, 3 numerical-validation failure.
"""

from __future__ import annotations

import argparse
import io
import json
import sys
import warnings

import numpy as np

from . import __version__, checks, experiments, fock, phase
from .channels import (
    AttenuatorParams,
    attenuator_apply,
    default_out_cutoff,
    qla_apply,
)
from .fock import DensityMatrix, FockVector, StateSpecError, parse_state_spec

__all__ = ["run", "emit", "main"]

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3


def _fmt(value) -> str:
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def emit(records: list[dict], meta: dict, fmt: str) -> str:
    """Serialize homogeneous row records with a metadata header.

    CSV carries the metadata as '#'-prefixed comments above the header
    row; JSON wraps everything as {"meta": ..., "rows": ...}.  Floats are
    written with 17 significant digits so re-parsing is lossless.
    """
    if fmt == "json":
        return json.dumps({"meta": meta, "rows": records}, indent=2) + "\n"
    if fmt != "csv":
        raise ValueError(f"unknown format {fmt!r}")
    buf = io.StringIO()
    for key, value in meta.items():
        if key == "warnings":
            for w in value:
                buf.write(f"# warning: {w}\n")
        elif key == "config":
            for ck, cv in value.items():
                buf.write(f"# config {ck}={_fmt(cv)}\n")
        else:
            buf.write(f"# {key}={_fmt(value)}\n")
    if records:
        columns = list(records[0])
        buf.write(",".join(columns) + "\n")
        for row in records:
            buf.write(",".join(_fmt(row[col]) for col in columns) + "\n")
    return buf.getvalue()


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="phasekit",
        description="Quantum phase distributions on truncated Fock spaces")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add(name, help_text, *, state=False, s=False, eps=False, kappa=False,
            lam=False, grid=False, cutoff=False, samples=False, seed=False,
            terms=False, phi=False, norm=False, io_flags=True):
        p = sub.add_parser(name, help=help_text)
        if state:
            p.add_argument("--state", required=True,
                           help="state spec: coherent:r=..,psi=.. | thermal:beta=.. "
                                "| fock:n=.. | random:dim=..,seed=..")
        if cutoff:
            p.add_argument("--cutoff", type=int, default=None,
                           help="Fock cutoff (default: per-state heuristic)")
        if s:
            p.add_argument("--s", type=int, default=None,
                           help="Pegg-Barnett dimension parameter s")
        if eps:
            p.add_argument("--eps", type=float, default=None,
                           help="per-step amplification strength")
        if kappa:
            p.add_argument("--kappa", type=float, default=None,
                           help="total amplification strength (>= 1)")
        if lam:
            p.add_argument("--lam", type=float, default=None,
                           help="attenuator transmissivity in [0, 1]")
        if grid:
            p.add_argument("--grid", type=int, default=512,
                           help="phase-grid size (default 512)")
        if samples:
            p.add_argument("--samples", type=int, default=1000)
        if seed:
            p.add_argument("--seed", type=int, default=0)
        if terms:
            p.add_argument("--terms", type=int, default=100)
        if phi:
            p.add_argument("--phi", type=float, default=0.3,
                           help="phase angle in radians")
        if norm:
            p.add_argument("--normalization", choices=("channel", "riemann"),
                           default=None,
                           help="amplified-kernel normalization")
        if io_flags:
            p.add_argument("--format", choices=("csv", "json"), default="csv")
            p.add_argument("--out", default="-",
                           help="output path ('-' for stdout)")
            p.add_argument("--plot", default=None,
                           help="also render a figure to this path")
        return p

    add("paul", "Paul phase distribution of a state",
        state=True, cutoff=True, grid=True)
    add("pb", "Pegg-Barnett continuous phase density",
        state=True, cutoff=True, s=True, grid=True)
    add("pb-discrete", "Pegg-Barnett discrete phase probabilities",
        state=True, cutoff=True, s=True)
    add("amplified-pb", "Pegg-Barnett density of the amplified state",
        state=True, cutoff=True, s=True, eps=True, grid=True, norm=True)
    add("amplify", "apply the quantum limited amplifier",
        state=True, cutoff=True, kappa=True)
    add("attenuate", "apply the quantum limited attenuator",
        state=True, cutoff=True, lam=True)
    add("ratio", "amplified Pegg-Barnett / Paul density ratio",
        state=True, cutoff=True, s=True, eps=True, phi=True, norm=True)
    add("table1", "ratio statistics over random qubit states",
        samples=True, seed=True, phi=True, norm=True)
    add("fig1a", "coherent-state Paul vs Pegg-Barnett densities",
        grid=True, terms=True)
    add("fig1b", "coherent-state ratio convergence scan",
        eps=True, terms=True, norm=True)
    add("nonlinear", "thermal scan under the quadratic schedule",
        state=True, eps=True)
    add("checks", "run the property suite", seed=True, io_flags=False)
    return parser


def _load_state(args) -> tuple[FockVector | DensityMatrix, int]:
    cutoff = args.cutoff
    if cutoff is None:
        cutoff = fock.default_cutoff_for_spec(args.state)
    return parse_state_spec(args.state, cutoff), cutoff


def _as_density(state) -> DensityMatrix:
    if isinstance(state, FockVector):
        return fock.pure_density(state)
    return state


def _require(args, *names):
    for name in names:
        if getattr(args, name) is None:
            raise StateSpecError(f"--{name.replace('_', '-')} is required "
                                 f"for this subcommand")


def _matrix_rows(rho: DensityMatrix) -> list[dict]:
    rows = []
    for m in range(rho.cutoff + 1):
        for n in range(rho.cutoff + 1):
            value = rho.entries[m, n]
            rows.append({"m": m, "n": n, "re": float(value.real),
                         "im": float(value.imag)})
    return rows


def _cmd_paul(args, config):
    state, cutoff = _load_state(args)
    config.update(state=args.state, cutoff=cutoff, grid=args.grid)
    rho = _as_density(state)
    cfg = phase.QuadratureConfig.for_state(rho, grid_size=args.grid)
    dist = phase.paul_distribution(rho, cfg)
    config.update(r_max=cfg.r_max, radial_nodes=cfg.radial_nodes,
                  quad_error=dist.quad_error)
    rows = [{"phi": float(p), "density": float(d)}
            for p, d in zip(dist.grid.points, dist.density)]
    return rows, "phase_distribution"


def _resolve_s(args, rho: DensityMatrix) -> int:
    return rho.cutoff if args.s is None else args.s


def _cmd_pb(args, config):
    state, cutoff = _load_state(args)
    rho = _as_density(state)
    s = _resolve_s(args, rho)
    config.update(state=args.state, cutoff=cutoff, s=s, grid=args.grid)
    pts = phase.PhaseGrid(args.grid).points
    dens = phase.pb_continuous_density(rho, s, pts)
    rows = [{"phi": float(p), "density": float(d)} for p, d in zip(pts, dens)]
    return rows, "phase_distribution"


def _cmd_pb_discrete(args, config):
    state, cutoff = _load_state(args)
    rho = _as_density(state)
    s = _resolve_s(args, rho)
    config.update(state=args.state, cutoff=cutoff, s=s)
    probs = phase.pb_discrete_distribution(rho, s)
    theta = 2.0 * np.pi * np.arange(s + 1) / (s + 1)
    rows = [{"t": int(t), "theta": float(th), "probability": float(p)}
            for t, (th, p) in enumerate(zip(theta, probs))]
    return rows, "discrete_distribution"


def _cmd_amplified_pb(args, config):
    _require(args, "eps")
    state, cutoff = _load_state(args)
    rho = _as_density(state)
    s = _resolve_s(args, rho)
    norm = args.normalization or "channel"
    config.update(state=args.state, cutoff=cutoff, s=s, eps=args.eps,
                  kappa=1.0 + s * args.eps, grid=args.grid, normalization=norm)
    pts = phase.PhaseGrid(args.grid).points
    if isinstance(state, FockVector):
        dens = phase.pb_amplified_profile(state, s, args.eps, pts,
                                          normalization=norm)
    else:
        kernel = phase.amplified_kernel_matrix(rho.cutoff, s, args.eps,
                                               normalization=norm)
        dens = phase.amplified_density_from_kernel(kernel, rho.entries, pts)
    rows = [{"phi": float(p), "density": float(d)} for p, d in zip(pts, dens)]
    return rows, "phase_distribution"


def _cmd_amplify(args, config):
    _require(args, "kappa")
    state, cutoff = _load_state(args)
    rho = _as_density(state)
    out_cutoff = default_out_cutoff(args.kappa, rho.cutoff)
    out = qla_apply(rho, args.kappa, out_cutoff)
    config.update(state=args.state, cutoff=cutoff, kappa=args.kappa,
                  out_cutoff=out_cutoff, trace=out.trace,
                  trace_deficit=out.trace_deficit)
    return _matrix_rows(out), "matrix"


def _cmd_attenuate(args, config):
    _require(args, "lam")
    state, cutoff = _load_state(args)
    rho = _as_density(state)
    out = attenuator_apply(rho, AttenuatorParams(args.lam))
    config.update(state=args.state, cutoff=cutoff, lam=args.lam,
                  trace=out.trace, trace_deficit=out.trace_deficit)
    return _matrix_rows(out), "matrix"


def _cmd_ratio(args, config):
    _require(args, "s", "eps")
    state, cutoff = _load_state(args)
    rho = _as_density(state)
    norm = args.normalization or "channel"
    config.update(state=args.state, cutoff=cutoff, s=args.s, eps=args.eps,
                  phi=args.phi, normalization=norm)
    value = experiments.ratio_R(rho, args.s, args.eps, args.phi,
                                normalization=norm)
    rows = [{"s": args.s, "eps": args.eps, "phi": args.phi, "ratio": value}]
    return rows, "ratio"


def _cmd_table1(args, config):
    norm = args.normalization or "riemann"
    config.update(samples=args.samples, seed=args.seed, phi=args.phi,
                  normalization=norm)
    report = experiments.table1_run(args.samples, args.seed, args.phi,
                                    normalization=norm)
    return report.rows(), "ratio_report"


def _cmd_fig1a(args, config):
    config.update(grid=args.grid, terms=args.terms, psi=np.pi,
                  r_prime_list="0.5,2")
    rows = experiments.figure1a_run(grid=phase.PhaseGrid(args.grid),
                                    terms=args.terms)
    return rows, "fig1a"


def _cmd_fig1b(args, config):
    eps = 0.01 if args.eps is None else args.eps
    norm = args.normalization or "riemann"
    config.update(eps=eps, terms=args.terms, r_prime=2.0, psi=np.pi,
                  normalization=norm)
    rows = experiments.figure1b_run(eps=eps, terms=args.terms,
                                    normalization=norm)
    return rows, "fig1b"


def _cmd_nonlinear(args, config):
    _require(args, "eps")
    kind, fields = fock.parse_spec_fields(args.state)
    if kind != "thermal":
        raise StateSpecError("nonlinear scan requires a thermal state spec")
    beta = fields["beta"]
    s_list = (100, 200, 400)
    config.update(state=args.state, eps=args.eps,
                  s_list=",".join(map(str, s_list)))
    rows = experiments.nonlinear_amplification_scan(beta, args.eps, s_list)
    return rows, "nonlinear"


_COMMANDS = {
    "paul": (_cmd_paul, "plot_phase_distribution"),
    "pb": (_cmd_pb, "plot_phase_distribution"),
    "pb-discrete": (_cmd_pb_discrete, "plot_discrete_distribution"),
    "amplified-pb": (_cmd_amplified_pb, "plot_phase_distribution"),
    "amplify": (_cmd_amplify, "plot_matrix_diagonal"),
    "attenuate": (_cmd_attenuate, "plot_matrix_diagonal"),
    "ratio": (_cmd_ratio, None),
    "table1": (_cmd_table1, "plot_table1"),
    "fig1a": (_cmd_fig1a, "plot_fig1a"),
    "fig1b": (_cmd_fig1b, "plot_fig1b"),
    "nonlinear": (_cmd_nonlinear, "plot_nonlinear"),
}


def _run_checks(args) -> int:
    results = checks.run_all_checks(args.seed)
    failed = 0
    for name, passed, detail in results:
        status = "PASS" if passed else "FAIL"
        print(f"{status} {name}: {detail}")
        failed += not passed
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_NUMERICAL


def run(argv) -> int:
    """Parse argv, dispatch, and write the emitted records.

    Returns the exit status; diagnostics go to stderr.  Numerical warnings
    raised during computation are collected into the output header.
    """
    parser = _build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as exc:
        return int(exc.code or 0)

    if args.subcommand == "checks":
        return _run_checks(args)

    handler, plotter_name = _COMMANDS[args.subcommand]
    config: dict = {}
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", fock.NumericsWarning)
            rows, schema = handler(args, config)
        warn_messages = [str(w.message) for w in caught
                         if issubclass(w.category, fock.NumericsWarning)]
    except StateSpecError as exc:
        print(f"phasekit: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, OverflowError, FloatingPointError) as exc:
        print(f"phasekit: numerical validation failed: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL

    meta = {
        "tool": "phasekit",
        "version": __version__,
        "subcommand": args.subcommand,
        "schema": schema,
        "config": dict(sorted(config.items())),
        "warnings": warn_messages,
    }
    text = emit(rows, meta, args.format)
    if args.out == "-":
        sys.stdout.write(text)
    else:
        try:
            with open(args.out, "w") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"phasekit: cannot write {args.out}: {exc}", file=sys.stderr)
            return EXIT_NUMERICAL

    if args.plot:
        from . import plotting

        plotter = getattr(plotting, plotter_name) if plotter_name else None
        if plotter is None:
            print(f"phasekit: no figure defined for {args.subcommand}",
                  file=sys.stderr)
            return EXIT_USAGE
        try:
            plotter(rows, args.plot)
        except OSError as exc:
            print(f"phasekit: cannot write {args.plot}: {exc}", file=sys.stderr)
            return EXIT_NUMERICAL
    return EXIT_OK


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
