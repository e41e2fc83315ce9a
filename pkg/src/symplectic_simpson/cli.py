"""Command-line front end.

Three subcommands write CSV to ``--out`` (or stdout):

``simulate``   one trajectory: ``t, p, q, H, H_d``
``converge``   max-norm error table with pairwise orders
``stability``  characteristic-root scan over ``s = omega*h``

With ``--out`` a sidecar ``<out>.manifest`` (``key=value`` lines) records the
command, every parameter, the package version and a timestamp.

Exit codes: 0 success, 2 stability/domain violation, 64 usage error.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import io
import math
import sys
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from . import __version__
from .analysis import ExperimentSpec, Scheme, convergence_study, run_trajectory
from .errors import ConfigurationError, DomainError, SingularEliminationError, StabilityWindowError
from .oscillator import OscillatorConfig, stability_analysis

EXIT_OK = 0
EXIT_DOMAIN = 2
EXIT_USAGE = 64


class UsageError(Exception):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fmt(x: float) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if math.isnan(x):
        return ""
    return format(float(x), ".17g")


def _mesh_list(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid mesh list {text!r}")


def _add_oscillator_flags(p: argparse.ArgumentParser):
    p.add_argument("--mass", type=float, default=1.0, help="mass m (default 1)")
    p.add_argument(
        "--omega", type=float, default=2.0 * math.pi, help="angular frequency (default 2*pi)"
    )
    p.add_argument("--periods", type=float, default=1.0, help="number of periods (default 1)")
    p.add_argument("--out", type=Path, default=None, help="output CSV path (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(
        prog="symplectic-simpson",
        description="Newmark and Simpson variational integrators for the harmonic oscillator.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    sim = sub.add_parser("simulate", help="write one trajectory as CSV")
    sim.add_argument("--scheme", choices=[s.value for s in Scheme], default="simpson")
    sim.add_argument("--steps", type=int, default=15, help="number of steps N (default 15)")
    _add_oscillator_flags(sim)

    conv = sub.add_parser("converge", help="write a max-norm convergence table as CSV")
    conv.add_argument(
        "--scheme", choices=[Scheme.NEWMARK.value, Scheme.SIMPSON.value], default="simpson"
    )
    conv.add_argument(
        "--meshes", type=_mesh_list, default=[10, 20, 40], help='comma list, default "10,20,40"'
    )
    _add_oscillator_flags(conv)

    stab = sub.add_parser("stability", help="scan the characteristic roots over omega*h")
    stab.add_argument("--s-min", type=float, default=0.1)
    stab.add_argument("--s-max", type=float, default=2.8)
    stab.add_argument("--points", type=int, default=28)
    stab.add_argument("--out", type=Path, default=None, help="output CSV path (default stdout)")
    return parser


def _write_csv(header: Sequence[str], rows: Iterable[Sequence], out: Optional[Path]):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([v if isinstance(v, str) else _fmt(v) for v in row])
    if out is None:
        sys.stdout.write(buf.getvalue())
    else:
        out.write_text(buf.getvalue())


def _write_manifest(out: Optional[Path], command: str, params: dict):
    if out is None:
        return
    lines = [f"command={command}"]
    lines += [f"{key}={value}" for key, value in sorted(params.items())]
    lines += [
        f"version={__version__}",
        f"timestamp={_dt.datetime.now(_dt.timezone.utc).isoformat()}",
    ]
    Path(f"{out}.manifest").write_text("\n".join(lines) + "\n")


def _params(args) -> dict:
    skip = {"command", "out"}
    params = {}
    for key, value in vars(args).items():
        if key in skip:
            continue
        if isinstance(value, float):
            value = _fmt(value)
        elif isinstance(value, list):
            value = ",".join(str(v) for v in value)
        params[key] = value
    return params


def cmd_simulate(args) -> int:
    if args.steps < 2:
        raise UsageError("--steps must be >= 2")
    spec = ExperimentSpec(
        m=args.mass,
        omega=args.omega,
        period_count=args.periods,
        mesh_counts=(args.steps,),
        scheme=Scheme(args.scheme),
    )
    rec = run_trajectory(spec, args.steps)
    rows = zip(rec.times, rec.p, rec.q, rec.energies_exact, rec.energies_discrete)
    _write_csv(("t", "p", "q", "H", "H_d"), rows, args.out)
    _write_manifest(args.out, "simulate", _params(args))
    return EXIT_OK


def cmd_converge(args) -> int:
    spec = ExperimentSpec(
        m=args.mass,
        omega=args.omega,
        period_count=args.periods,
        mesh_counts=tuple(args.meshes),
        scheme=Scheme(args.scheme),
    )
    report = convergence_study(spec)
    _write_csv(("quantity", "N", "error", "order", "verdict"), report.rows(), args.out)
    _write_manifest(args.out, "converge", _params(args))
    return EXIT_OK


def cmd_stability(args) -> int:
    if args.points < 1:
        raise UsageError("--points must be >= 1")
    if not (math.isfinite(args.s_min) and math.isfinite(args.s_max)):
        raise UsageError("--s-min and --s-max must be finite")
    if args.s_min < 0 or args.s_max < args.s_min:
        raise UsageError("need 0 <= --s-min <= --s-max")
    if args.points > 1 and args.s_max == args.s_min:
        raise UsageError("several points need --s-max > --s-min")

    s_values = np.linspace(args.s_min, args.s_max, args.points)
    rows = []
    for s in s_values:
        v = stability_analysis(OscillatorConfig(1.0, float(s), 1.0))
        rows.append((v.s, v.discriminant, v.root_modulus, "1" if v.stable else "0"))
    _write_csv(("s", "discriminant", "root_modulus", "stable"), rows, args.out)
    _write_manifest(args.out, "stability", _params(args))
    return EXIT_OK


_COMMANDS = {"simulate": cmd_simulate, "converge": cmd_converge, "stability": cmd_stability}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (StabilityWindowError, SingularEliminationError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (UsageError, ConfigurationError) as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
