"""``qwalk`` command line: ``simulate``, ``density``, ``verify``.

Exit codes: 0 ok, 1 a verification check failed, 2 invalid parameters
(including a non-unitary coin), 3 I/O failure, 4 lattice solve did not
converge.
"""

from __future__ import annotations

import argparse
import io
import json
import sys

import numpy as np

from . import ctqw, density, dtqw, verify
from .core import NonUnitary, hadamard, make_coin
from .elliptic import NoConvergence

EXIT_OK, EXIT_FAIL, EXIT_PARAMS, EXIT_IO, EXIT_NOCONV = 0, 1, 2, 3, 4
DENSITY_MARGIN = 1e-4


def fmt(v: float) -> str:
    return format(float(v), ".17g")


def _write(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    with open(out, "w", newline="\n", encoding="utf-8") as fh:
        fh.write(text)


def _csv(header: list[str], rows) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(row) + "\n")
    return buf.getvalue()


# -- simulate --------------------------------------------------------------

def _simulate(args) -> int:
    if args.walk == "dtqw":
        if args.coin is not None:
            coin = make_coin(*(complex(v) for v in args.coin))
        else:
            coin = hadamard()
        if args.t < 0 or args.t != int(args.t):
            raise ValueError("dtqw needs a nonnegative integer time")
        state = dtqw.dtqw_evolve(coin, int(args.t))
    else:
        if args.nu is None or not args.nu > 0:
            raise ValueError("ctqw needs --nu > 0")
        if args.backend == "integrate":
            state = ctqw.ctqw_integrate(args.nu, args.t, args.step)
        else:
            state = ctqw.ctqw_closed_form(args.nu, args.t)

    probs = state.probabilities()
    keep = probs != 0.0
    xs = state.positions[keep]
    ps = probs[keep]
    amps = np.asarray(state.amps)[keep]

    if args.format == "json":
        rows = []
        for i, (x, p) in enumerate(zip(xs, ps)):
            row = {"x": int(x), "p": float(p)}
            if args.amplitudes:
                a = np.atleast_1d(amps[i])
                row["amplitude"] = [[float(c.real), float(c.imag)] for c in a]
            rows.append(row)
        doc = {"schema": verify.SCHEMA, "walk": args.walk, "t": state.t, "rows": rows}
        _write(json.dumps(doc, indent=1) + "\n", args.out)
        return EXIT_OK

    header = ["x", "p"]
    if args.amplitudes:
        header += ["re0", "im0", "re1", "im1"] if args.walk == "dtqw" else ["re", "im"]
    lines = []
    for i, (x, p) in enumerate(zip(xs, ps)):
        row = [str(int(x)), fmt(p)]
        if args.amplitudes:
            for c in np.atleast_1d(amps[i]):
                row += [fmt(c.real), fmt(c.imag)]
        lines.append(row)
    _write(_csv(header, lines), args.out)
    return EXIT_OK


# -- density ---------------------------------------------------------------

def density_grid(p: density.DensityProfile, grid: int) -> np.ndarray:
    """Grid on the open support with the endpoints pulled in by ``1e-4``.

    Symmetric supports get an exactly antisymmetric grid so that an odd
    grid contains ``x = 0``.
    """
    lo, hi = p.support
    xs = np.linspace(lo + DENSITY_MARGIN, hi - DENSITY_MARGIN, grid)
    if lo == -hi:
        xs = 0.5 * (xs - xs[::-1])
    return xs


def _density(args) -> int:
    if args.grid < 2:
        raise ValueError("--grid must be at least 2")
    param = args.a if args.kind in ("konno_d", "measure_d") else args.nu
    if param is None:
        raise ValueError(f"{args.kind} needs {'--a' if args.kind.endswith('_d') else '--nu'}")
    p = density.profile(args.kind, param)
    xs = density_grid(p, args.grid)
    fs = p.value(xs)
    _write(_csv(["x", "f"], ([fmt(x), fmt(f)] for x, f in zip(xs, fs))), args.out)
    return EXIT_OK


# -- verify ----------------------------------------------------------------

def _parse_tol(items) -> dict:
    out = {}
    for item in items or ():
        key, _, val = item.partition("=")
        if not _:
            raise ValueError(f"--tol expects KEY=VALUE, got {item!r}")
        out[key] = float(val)
    return out


def _verify(args) -> int:
    opts = {
        "a_values": tuple(args.a) if args.a else None,
        "nu": args.nu,
        "walk": args.walk,
        "t": args.t,
        "printed": args.printed,
        "tol": _parse_tol(args.tol),
    }
    rep = verify.run_suite(args.suite, opts)
    _write(json.dumps(rep, indent=1) + "\n", args.out)
    return EXIT_OK if verify.all_passed(rep) else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qwalk", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="evolve a walk and write its distribution")
    sim.add_argument("walk", choices=("dtqw", "ctqw"))
    coin = sim.add_mutually_exclusive_group()
    coin.add_argument("--hadamard", action="store_true", help="a=b=c=1/sqrt2, d=-1/sqrt2 (default)")
    coin.add_argument("--coin", nargs=4, metavar=("A", "B", "C", "D"), help="coin entries, Python complex syntax")
    sim.add_argument("--nu", type=float, default=None)
    sim.add_argument("-t", "--time", dest="t", type=float, required=True)
    sim.add_argument("--backend", choices=("closed", "integrate"), default="closed")
    sim.add_argument("--step", type=float, default=None, help="RK4 step for --backend integrate")
    sim.add_argument("--amplitudes", action="store_true")
    sim.add_argument("--format", choices=("csv", "json"), default="csv")
    sim.add_argument("-o", "--out", default=None)
    sim.set_defaults(func=_simulate)

    den = sub.add_parser("density", help="tabulate a limit density")
    den.add_argument("kind", choices=density.KINDS)
    den.add_argument("--a", type=float, default=None, help="|a| for konno_d / measure_d")
    den.add_argument("--nu", type=float, default=None)
    den.add_argument("--grid", type=int, default=2001)
    den.add_argument("-o", "--out", default=None)
    den.set_defaults(func=_density)

    ver = sub.add_parser("verify", help="run a verification suite and print a JSON report")
    ver.add_argument("suite", choices=verify.SUITES + ("all",))
    ver.add_argument("--a", type=float, action="append", help="|a| (repeatable)")
    ver.add_argument("--nu", type=float, default=None)
    ver.add_argument("--walk", choices=("dtqw", "ctqw"), default=None)
    ver.add_argument("--t", type=int, default=None)
    ver.add_argument("--printed", action="store_true", help="also check the gauge and couplings exactly as printed")
    ver.add_argument("--tol", action="append", metavar="KEY=VALUE", help="override a tolerance")
    ver.add_argument("-o", "--out", default=None)
    ver.set_defaults(func=_verify)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except NonUnitary as exc:
        print(f"qwalk: {exc}", file=sys.stderr)
        return EXIT_PARAMS
    except NoConvergence as exc:
        print(f"qwalk: {exc}", file=sys.stderr)
        return EXIT_NOCONV
    except OSError as exc:
        print(f"qwalk: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, KeyError) as exc:
        print(f"qwalk: {exc}", file=sys.stderr)
        return EXIT_PARAMS


if __name__ == "__main__":
    sys.exit(main())
