"""
Command line interface for finch
Usage: finch <command> --metric <spec> [options]

Commands:
  analyze     metric tensor, curvature and first integrals at one point
  verify      check a theorem on a sampled region (exit 0 pass, 1 fail, 4 hypotheses fail)
  geodesic    integrate a geodesic and write it as CSV
  pair-check  test whether two metrics are projectively related
"""
import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from .config import Config, setup_logging
from .errors import FinchError, ParamError, StepFailure
from .metrics import load_metric_spec, parse_volume_expression, sample_fiber_points, validate_metric
from .models.geometry import FiberPoint
from .models.reports import Adaptive, Trajectory, parse_controller
from .services.curvature import PointGeometry, connection_trace_residual, spray_residual
from .services.flow import integrate_geodesic, track_first_integrals
from .services.integrals import (
    alpha_form,
    bordered_det_checks,
    integral_values,
    projective_factor,
    rapcsak_residual,
)
from .services.verification import verdict_exit_code, verify_theorem1, verify_theorem2

logger = logging.getLogger(__name__)


def _vector(text: str, name: str) -> List[float]:
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise ParamError(f"{name} must be a comma separated list of numbers, got {text!r}")


def _load(args, source: str):
    spec = load_metric_spec(source, args.dim)
    return spec, spec.kernel()


def _volume(args, spec):
    if args.volume is None:
        return spec.volume()
    return parse_volume_expression(args.volume, spec.dim)


def _emit(text: str, out: Optional[str]):
    if out:
        Path(out).write_text(text)
        logger.debug("wrote %s", out)
    else:
        sys.stdout.write(text)


def _emit_json(report: dict, out: Optional[str]):
    _emit(json.dumps(report, indent=2) + "\n", out)


def analyze_command(args, config: Config) -> int:
    """Everything computable at one fibre point"""
    spec, kernel = _load(args, args.metric)
    volume = _volume(args, spec)
    x = _vector(args.x, "--x") if args.x else [0.0] * spec.dim
    point = FiberPoint(x, _vector(args.y, "--y"))

    geometry = PointGeometry(kernel, point, volume, "full", config.JET_ORDERS)
    report = {
        "metric": spec.to_dict(),
        "seed": args.seed,
        "point": point.to_dict(),
        "metric_jet": geometry.metric_jet().to_dict(),
        "spray": geometry.spray_data().to_dict(),
        "curvature": geometry.curvature_pack().to_dict(),
    }
    aux_kernel = _load(args, args.aux)[1] if args.aux else None
    report["integrals"] = integral_values(kernel, volume, point, aux_kernel).to_dict()
    report["identities"] = {
        **bordered_det_checks(kernel, aux_kernel, point).to_dict(),
        "spray_residual": float(np.linalg.norm(spray_residual(kernel, point))),
        "connection_trace_residual": connection_trace_residual(kernel, point),
        "alpha": alpha_form(kernel, volume, point).to_dict(),
    }
    if args.validate:
        report["validation"] = validate_metric(kernel, args.samples or config.SAMPLES, args.seed).to_dict()
    _emit_json(report, args.out)
    return 0


def verify_command(args, config: Config) -> int:
    """Check theorem 1 or 2 and exit with the verdict"""
    spec, kernel = _load(args, args.metric)
    check = verify_theorem1 if args.theorem == 1 else verify_theorem2
    verdict = check(
        kernel,
        _volume(args, spec),
        sample_count=args.samples or config.SAMPLES,
        trajectory_count=config.TRAJECTORIES if args.trajectories is None else args.trajectories,
        seed=args.seed,
        tolerances=config.tolerances(args.tol),
    )
    _emit_json(verdict.to_dict(), args.out)
    code = verdict_exit_code(verdict)
    if code:
        print(f"verdict: {verdict.verdict.value}", file=sys.stderr)
    return code


def _csv(kernel, traj: Trajectory, which: Sequence[str], comments: List[str]) -> str:
    n = kernel.dim
    header = ["t"] + [f"x{i + 1}" for i in range(n)] + [f"y{i + 1}" for i in range(n)] + list(which)
    lines = [f"# {c}" for c in comments] + [",".join(header)]
    for k in range(len(traj)):
        row = [traj.times[k], *traj.xs[k], *traj.ys[k], *(traj.tracked[name][k] for name in which)]
        lines.append(",".join(f"{float(v):.17g}" for v in row))
    return "\n".join(lines) + "\n"


def geodesic_command(args, config: Config) -> int:
    """Integrate one geodesic; CSV of t, x, y and the tracked quantities"""
    spec, kernel = _load(args, args.metric)
    volume = _volume(args, spec)
    aux_kernel = _load(args, args.aux)[1] if args.aux else None
    which = [name.strip() for name in args.track.split(",") if name.strip()]
    if args.controller.strip() == "adaptive":
        controller = Adaptive(config.RTOL, config.ATOL)
    else:
        controller = parse_controller(args.controller)
    t_end = config.T_END if args.t is None else args.t

    comments = [f"metric: {kernel.label}", f"controller: {controller.describe()}"]
    failure = None
    try:
        traj = integrate_geodesic(kernel, _vector(args.x0, "--x0"), _vector(args.y0, "--y0"), t_end, controller)
    except StepFailure as e:
        failure = e
        traj = e.partial
    report = track_first_integrals(kernel, traj, which, aux_kernel, volume, max_states=args.max_states)
    comments.append(f"status: {traj.status.value}")
    text = _csv(kernel, traj, which, comments)
    if failure is not None:
        text += "# truncated\n"
    _emit(text, args.out)

    if failure is not None:
        print(f"E{failure.exit_code} {failure.code}: {failure}", file=sys.stderr)
    print(report.summary(), file=sys.stderr)
    return failure.exit_code if failure is not None else 0


def pair_check_command(args, config: Config) -> int:
    """Rapcsak residual and projective factors of (metric, aux) over sampled points"""
    spec, kernel = _load(args, args.metric)
    aux_spec, aux_kernel = _load(args, args.aux)
    if aux_spec.dim != spec.dim:
        raise ParamError(f"paired metrics differ in dimension ({spec.dim} vs {aux_spec.dim})")
    rng = np.random.default_rng(args.seed)
    count = args.samples or config.SAMPLES
    tol = config.TOL if args.tol is None else args.tol

    rapcsak, trace_log, trace_det = [], [], []
    for point in sample_fiber_points(kernel, count, rng):
        residual = rapcsak_residual(kernel, aux_kernel, point)
        rapcsak.append(float(np.linalg.norm(residual)) / (1.0 + float(np.linalg.norm(point.y))))
        factors = projective_factor(kernel, aux_kernel, point)
        trace_log.append(factors.gap)
        trace_det.append(abs(factors.P_trace - factors.P_det))

    rapcsak_max = max(rapcsak)
    report = {
        "metric": spec.to_dict(),
        "aux": aux_spec.to_dict(),
        "seed": args.seed,
        "samples": count,
        "tol": tol,
        "rapcsak_max": rapcsak_max,
        "P_trace_vs_log_max_gap": max(trace_log),
        "P_trace_vs_det_max_gap": max(trace_det),
        "projectively_related": rapcsak_max <= tol,
    }
    _emit_json(report, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--metric', required=True,
                        help='Metric spec: builtin name, inline JSON or path to a JSON file')
    common.add_argument('--dim', type=int, default=None, help='Dimension for a bare builtin name (default 2)')
    common.add_argument('--seed', type=int, default=None, help='Random seed (default 42)')
    common.add_argument('--tol', type=float, default=None, help='Verdict tolerance (default 1e-6)')
    common.add_argument('--out', default=None, help='Output file (default stdout)')
    common.add_argument('--volume', default=None, help='Volume density sigma(x) (default "1")')
    common.add_argument('--verbose', action='store_true', help='Debug logging to stderr')

    parser = argparse.ArgumentParser(
        prog='finch',
        description="Non-Riemannian curvature and first integrals of Finsler metrics",
    )
    subparsers = parser.add_subparsers(dest='command', help='Command to run')

    # Analyze command
    analyze_parser = subparsers.add_parser('analyze', parents=[common], help='Report all quantities at one point')
    analyze_parser.add_argument('--x', default=None, help='Base point, comma separated (default origin)')
    analyze_parser.add_argument('--y', required=True, help='Tangent vector, comma separated')
    analyze_parser.add_argument('--aux', default=None, help='Auxiliary metric spec for I0, P and Rapcsak')
    analyze_parser.add_argument('--validate', action='store_true', help='Also sample-check the Finsler axioms')
    analyze_parser.add_argument('--samples', type=int, default=None, help='Samples for --validate')
    analyze_parser.set_defaults(func=analyze_command)

    # Verify command
    verify_parser = subparsers.add_parser('verify', parents=[common], help='Check a theorem on a sampled region')
    verify_parser.add_argument('--theorem', type=int, choices=(1, 2), required=True)
    verify_parser.add_argument('--samples', type=int, default=None, help='Sample points (default 100)')
    verify_parser.add_argument('--trajectories', type=int, default=None, help='Geodesics to follow (default 10)')
    verify_parser.set_defaults(func=verify_command)

    # Geodesic command
    geodesic_parser = subparsers.add_parser('geodesic', parents=[common], help='Integrate a geodesic to CSV')
    geodesic_parser.add_argument('--x0', required=True, help='Start point, comma separated')
    geodesic_parser.add_argument('--y0', required=True, help='Start velocity, comma separated')
    geodesic_parser.add_argument('--t', type=float, default=None, help='End time, may be negative (default 3)')
    geodesic_parser.add_argument('--controller', default='adaptive',
                                 help='rk4:<dt> or adaptive[:<rtol>[:<atol>]]')
    geodesic_parser.add_argument('--track', default='F', help='Quantities to track: F,lambda,I0,f')
    geodesic_parser.add_argument('--aux', default=None, help='Auxiliary metric spec (needed for I0)')
    geodesic_parser.add_argument('--max-states', type=int, default=None,
                                 help='Evaluate tracked quantities at most at this many states')
    geodesic_parser.set_defaults(func=geodesic_command)

    # Pair-check command
    pair_parser = subparsers.add_parser('pair-check', parents=[common], help='Test projective relatedness')
    pair_parser.add_argument('--aux', required=True, help='Second metric spec')
    pair_parser.add_argument('--samples', type=int, default=None, help='Sample points (default 100)')
    pair_parser.set_defaults(func=pair_check_command)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if not args.command:
        parser.print_help()
        return 2

    config = Config()
    setup_logging(args.verbose or config.DEBUG)
    if args.seed is None:
        args.seed = config.SEED

    try:
        if args.seed < 0:
            raise ParamError(f"--seed must be non-negative, got {args.seed}")
        return args.func(args, config)
    except FinchError as e:
        print(f"E{e.exit_code} {e.code}: {e}", file=sys.stderr)
        return e.exit_code
    except OSError as e:
        print(f"E2 io: {e}", file=sys.stderr)
        return 2
    except ValueError as e:
        logger.debug("invalid input", exc_info=True)
        print(f"E2 param: {e}", file=sys.stderr)
        return 2


if __name__ == '__main__':
    sys.exit(main())
