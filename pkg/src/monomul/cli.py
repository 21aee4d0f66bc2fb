"""
Command-line interface.

    monomul convolve --op mconv --lhs a.json --rhs b.json --order 16
    monomul oracle --u1 1,0.3 --u2 0.8 --c1 0,0 --c2 1,0 --order 8 --dim 64
    monomul flow --generator g.json --tau-list 0.5,1 --measure-out m.json
    monomul divide --measure mu.json --depth 3 --op mconv
    monomul density --measure mu.json --points 512
    monomul selftest

Errors are reported as one JSON object on stderr.  Exit status 2 means bad
input, 3 a numerical failure, 1 a failed self-test.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import io as mio
from .acceptance import CRITERIA, DEFAULT_SEED
from .convolution import MCONV, MCONV0, ConvolutionPair, convolve, convolve_pair
from .exceptions import InputError, NumericalError
from .measures import (
    CIRCLE,
    HANKEL_RANK_TOL,
    AtomicMeasure,
    eval_psi,
    poisson_density,
    prony_recover,
    stieltjes_density,
)
from .operator_model import SECOND, ShiftPolyVariable, oracle_moments, realize_pair
from .semigroup import (
    divisibility_chain,
    integrate_flow,
    semigroup_measures,
    validate_generator,
)
from .series import DEFAULT_ORDER, moments_from_psi

EXIT_INPUT = 2
EXIT_NUMERIC = 3
EXIT_SELFTEST = 1


class CLIInputError(InputError):
    pass


def _complex_pair(text: str) -> complex:
    try:
        parts = [float(x) for x in text.split(",")]
    except ValueError:
        raise CLIInputError(f"expected RE,IM but got {text!r}") from None
    if len(parts) == 1:
        return complex(parts[0])
    if len(parts) != 2:
        raise CLIInputError(f"expected RE,IM but got {text!r}")
    return complex(parts[0], parts[1])


def _coeff_list(text: str) -> list[complex]:
    try:
        return [complex(x.strip().replace(" ", "")) for x in text.split(",")]
    except ValueError:
        raise CLIInputError(f"cannot parse coefficients {text!r}") from None


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise CLIInputError(f"cannot parse number list {text!r}") from None


def _complex_list(text: str) -> np.ndarray:
    try:
        return np.array([complex(x.strip()) for x in text.split(",") if x.strip()])
    except ValueError:
        raise CLIInputError(f"cannot parse point list {text!r}") from None


def _emit(text: str, path: str | None):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _measure_atoms_guess(*measures) -> int | None:
    counts = [len(m.weights) for m in measures if isinstance(m, AtomicMeasure)]
    if len(counts) != len(measures):
        return None
    return int(np.prod(counts))


def _identify(moments, domain, k, tol):
    k = min(k, moments.order // 2)
    if k < 1:
        return None
    try:
        return prony_recover(moments, k, domain, tol)
    except NumericalError:
        return None


# -- commands -------------------------------------------------------------

def cmd_convolve(args) -> int:
    lhs, rhs = mio.read_measure(args.lhs), mio.read_measure(args.rhs)
    if args.op == "pair":
        c1 = _complex_pair(args.c1) if args.c1 else 1.0
        c2 = _complex_pair(args.c2) if args.c2 else 1.0
        res = convolve_pair(ConvolutionPair(lhs, c1), ConvolutionPair(rhs, c2), args.order)
        m, c = res.dist, res.c
    else:
        m, c = convolve(args.op, lhs, rhs, args.order), None
    _emit(mio.write_rows(["n", "re", "im"], mio.moments_rows(m.moments)), args.out)
    if args.measure_out and lhs.domain == rhs.domain:
        k = args.atoms or _measure_atoms_guess(lhs, rhs) or 4
        mu = _identify(m, lhs.domain, k, args.tol)
        if mu is not None:
            data = mio.measure_to_dict(mu)
            if c is not None:
                data["c"] = [c.real, c.imag]
            _emit(mio.dumps(data), args.measure_out)
    return 0


def cmd_oracle(args) -> int:
    v1 = ShiftPolyVariable(_coeff_list(args.u1), _complex_pair(args.c1))
    v2 = ShiftPolyVariable(_coeff_list(args.u2), _complex_pair(args.c2), SECOND)
    oracle = oracle_moments(realize_pair(v1, v2, args.dim), ["x1", "x2"], args.order)
    m1 = moments_from_psi(v1.psi_series(args.order))
    m2 = moments_from_psi(v2.psi_series(args.order))
    pred = convolve_pair(ConvolutionPair(m1, v1.c), ConvolutionPair(m2, v2.c), args.order).dist.moments
    rows = ((n, o.real, o.imag, p.real, p.imag, abs(o - p))
            for n, (o, p) in enumerate(zip(oracle, pred), start=1))
    header = ["n", "oracle_re", "oracle_im", "series_re", "series_im", "abs_err"]
    _emit(mio.write_rows(header, rows), args.out)
    return 0


def cmd_flow(args) -> int:
    g = mio.read_generator(args.generator)
    report = validate_generator(g)
    if not report.ok:
        raise CLIInputError(f"generator fails the sign conditions (worst margin {report.worst_margin:.3g})")
    taus = _float_list(args.tau_list)
    points = semigroup_measures(g, taus, args.order, args.convention, args.atoms or 4)
    rows = []
    for p in points:
        rows += list(mio.moments_rows(p.moments.moments, p.tau))
    _emit(mio.write_rows(["tau", "n", "re", "im"], rows), args.out)
    if args.measure_out:
        data = [{"tau": p.tau, "measure": None if p.measure is None else mio.measure_to_dict(p.measure)}
                for p in points]
        if len(data) == 1:
            data = data[0]["measure"]
        _emit(mio.dumps(data), args.measure_out)
    if args.points:
        z = _complex_list(args.points)
        traj = integrate_flow(g, z, taus, args.scheme, args.convention)
        rows = [(t, zz.real, zz.imag, e.real, e.imag)
                for t, etas in zip(traj.taus, traj.eta) for zz, e in zip(z, etas)]
        _emit(mio.write_rows(["tau", "z_re", "z_im", "eta_re", "eta_im"], rows), args.points_out)
    return 0


def cmd_divide(args) -> int:
    mu = mio.read_measure(args.measure)
    chain = divisibility_chain(mu, args.depth, args.op, order=args.order)
    rows, measures = [], []
    for level, m in enumerate(chain, start=1):
        tau = 2.0**-level
        rows += list(mio.moments_rows(m.moments, level, tau))
        k = args.atoms or _measure_atoms_guess(mu) or 4
        found = _identify(m, mu.domain, k, args.tol)
        measures.append({"level": level, "tau": tau,
                         "measure": None if found is None else mio.measure_to_dict(found)})
    _emit(mio.write_rows(["level", "tau", "n", "re", "im"], rows), args.out)
    if args.measure_out:
        _emit(mio.dumps(measures), args.measure_out)
    return 0


def cmd_density(args) -> int:
    mu = mio.read_measure(args.measure)
    if mu.domain == CIRCLE:
        grid = 2 * np.pi * np.arange(args.points) / args.points
        dens = poisson_density(mu, grid, args.radius)
    else:
        tmax = args.tmax if args.tmax is not None else 1.25 * mu.support[1] + 1.0
        grid = np.linspace(0.0, tmax, args.points)
        dens = stieltjes_density(lambda z: eval_psi(mu, z), grid, args.epsilon)
    _emit(mio.density_csv(grid, dens), args.out)
    return 0


def cmd_selftest(args) -> int:
    rows = []
    ok = True
    for i, fn in enumerate(CRITERIA):
        kwargs = {}
        if args.seed is not None and "seed" in fn.__code__.co_varnames:
            kwargs["seed"] = args.seed + i
        res = fn(**kwargs)
        ok &= res.passed
        rows.append(res.line())
    sys.stdout.write("\n".join(rows) + "\n")
    sys.stdout.write(("all criteria passed" if ok else "SOME CRITERIA FAILED") + "\n")
    return 0 if ok else EXIT_SELFTEST


# -- parser ---------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None,
                        help="random seed (falls back to $MONOMUL_SEED)")
    common.add_argument("--order", type=int, default=DEFAULT_ORDER, help="truncation order N")
    common.add_argument("--dim", type=int, default=64, help="operator-model dimension d")
    common.add_argument("--tol", type=float, default=HANKEL_RANK_TOL,
                        help="rank threshold used to identify atomic outputs")
    common.add_argument("--out", default=None, help="CSV output path (default stdout)")

    parser = argparse.ArgumentParser(prog="monomul", description=__doc__.split("\n\n")[0].strip())
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("convolve", parents=[common], help="convolve two measures")
    p.add_argument("--op", choices=[MCONV, MCONV0, "pair"], required=True)
    p.add_argument("--lhs", required=True)
    p.add_argument("--rhs", required=True)
    p.add_argument("--c1", default=None, help="RE,IM (pair only)")
    p.add_argument("--c2", default=None, help="RE,IM (pair only)")
    p.add_argument("--atoms", type=int, default=None, help="max atoms for identification")
    p.add_argument("--measure-out", default=None)
    p.set_defaults(func=cmd_convolve)

    p = sub.add_parser("oracle", parents=[common], help="operator model vs series engine")
    p.add_argument("--u1", required=True, help="comma-separated coefficients of u1")
    p.add_argument("--u2", required=True, help="comma-separated coefficients of u2")
    p.add_argument("--c1", default="1,0")
    p.add_argument("--c2", default="1,0")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("flow", parents=[common], help="semigroup generated by a generator")
    p.add_argument("--generator", required=True)
    p.add_argument("--tau-list", required=True, help="comma-separated times")
    p.add_argument("--scheme", choices=["rk", "euler_exp", "crosscheck"], default="rk")
    p.add_argument("--convention", choices=[MCONV0, MCONV], default=MCONV0)
    p.add_argument("--atoms", type=int, default=None)
    p.add_argument("--measure-out", default=None)
    p.add_argument("--points", default=None, help="comma-separated complex points for pointwise eta")
    p.add_argument("--points-out", default=None)
    p.set_defaults(func=cmd_flow)

    p = sub.add_parser("divide", parents=[common], help="dyadic root chain")
    p.add_argument("--measure", required=True)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--op", choices=[MCONV, MCONV0], default=MCONV)
    p.add_argument("--atoms", type=int, default=None)
    p.add_argument("--measure-out", default=None)
    p.set_defaults(func=cmd_divide)

    p = sub.add_parser("density", parents=[common], help="smoothed density of a measure")
    p.add_argument("--measure", required=True)
    p.add_argument("--points", type=int, default=512)
    p.add_argument("--epsilon", type=float, default=1e-3)
    p.add_argument("--radius", type=float, default=0.99)
    p.add_argument("--tmax", type=float, default=None)
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("selftest", parents=[common], help="run the acceptance criteria")
    p.set_defaults(func=cmd_selftest)
    return parser


def _validate(args):
    if args.seed is None and os.environ.get("MONOMUL_SEED"):
        try:
            args.seed = int(os.environ["MONOMUL_SEED"])
        except ValueError:
            raise CLIInputError("MONOMUL_SEED must be an integer") from None
    if args.order < 1:
        raise CLIInputError("--order must be >= 1")
    if args.dim < 2:
        raise CLIInputError("--dim must be >= 2")
    for name in ("lhs", "rhs", "measure", "generator"):
        path = getattr(args, name, None)
        if path is not None and not os.path.isfile(path):
            raise CLIInputError(f"--{name}: no such file {path!r}")


def _fail(exc: Exception, code: int) -> int:
    kind = "input" if code == EXIT_INPUT else "numerical"
    sys.stderr.write(json.dumps({"error": type(exc).__name__, "kind": kind, "message": str(exc)}) + "\n")
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        _validate(args)
        return args.func(args)
    except NumericalError as exc:
        return _fail(exc, EXIT_NUMERIC)
    except (ValueError, KeyError, TypeError, OSError, json.JSONDecodeError) as exc:
        return _fail(exc, EXIT_INPUT)


if __name__ == "__main__":
    sys.exit(main())
