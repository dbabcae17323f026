"""Command-line surface: amplitudes, duality residuals, circuit sweeps, observables.

Every data-producing subcommand emits CSV with one metadata comment line
(version, parameters, seed) followed by a header row; row order is
deterministic and shots-mode output is bit-identical for a fixed seed.
Relative ``--output`` paths resolve against $BSPDC_OUTDIR when it is set.
"""
from __future__ import annotations

import argparse
import csv
import math
import os
import sys
from typing import Iterable, Sequence

from . import __version__
from .devices import (
    BeamSplitter,
    ParametricAmplifier,
    bs_amplitude,
    exponential_oracle,
    pdc_amplitude,
)
from .duality import duality_sweep, find_sign_mismatches
from .fock import FockState2, TruncationPolicy
from .observables import mean_photons_ratio, quadrature_fluctuation
from .qpdc import QpdcSpec, qpdc_amplitudes, run_qpdc


def _parse_state(text: str) -> FockState2:
    try:
        n, m = (int(part) for part in text.split(","))
        return FockState2(n, m)
    except (ValueError, TypeError) as exc:
        raise argparse.ArgumentTypeError(f"expected 'n,m' with non-negative integers, got {text!r}") from exc


def _parse_floats(text: str) -> list[float]:
    return [float(part) for part in text.split(",")]


def _parse_ints(text: str) -> list[int]:
    return [int(part) for part in text.split(",")]


def _parse_range(text: str) -> list[float]:
    """Inclusive numeric grid 'start:stop:step'."""
    try:
        start, stop, step = (float(part) for part in text.split(":"))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected 'start:stop:step', got {text!r}") from exc
    if step <= 0:
        raise argparse.ArgumentTypeError("step must be positive")
    grid = []
    k = 0
    while True:
        value = start + k * step
        if value > stop + 1e-12:
            break
        grid.append(round(value, 12))
        k += 1
    return grid


def _resolve_output(path: str | None):
    if path is None:
        return sys.stdout, False
    outdir = os.environ.get("BSPDC_OUTDIR")
    if outdir and not os.path.isabs(path):
        path = os.path.join(outdir, path)
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    return open(path, "w", newline=""), True


def _emit_csv(path: str | None, meta: str, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    stream, close = _resolve_output(path)
    try:
        stream.write(f"# bspdc {__version__} {meta}\n")
        writer = csv.writer(stream)
        writer.writerow(header)
        writer.writerows(rows)
    finally:
        if close:
            stream.close()


def _cmd_amplitude(args: argparse.Namespace) -> int:
    state_in, state_out = args.state_in, args.state_out
    if args.bs:
        device = BeamSplitter(args.eta)
        value, provenance = bs_amplitude(device, state_in, state_out), "sector"
    else:
        device = ParametricAmplifier(args.g)
        value, provenance = pdc_amplitude(device, state_in, state_out), "disentangled"
    if args.oracle:
        policy = TruncationPolicy(max(state_in.total, state_out.total) + args.oracle_headroom)
        matrix = exponential_oracle(device, policy)
        value = matrix[policy.index_of(state_out), policy.index_of(state_in)]
        provenance = "oracle"
    print(f"amplitude={value.real:.12g}{value.imag:+.12g}j provenance={provenance}")
    return 0


def _cmd_duality(args: argparse.Namespace) -> int:
    worst = duality_sweep(args.g, args.max_total)
    rows = []
    failed = False
    for inst in worst:
        flips = len(find_sign_mismatches(inst.g, args.max_total, args.tolerance))
        rows.append(
            (
                inst.g, f"{inst.residual:.6e}", inst.l, inst.s, inst.n, inst.m,
                f"{inst.lhs.real:.12e}", f"{inst.lhs.imag:.12e}",
                f"{inst.rhs.real:.12e}", f"{inst.rhs.imag:.12e}", flips,
            )
        )
        if inst.residual > args.tolerance or flips:
            failed = True
    meta = f"duality-check g={','.join(str(g) for g in args.g)} max_total={args.max_total} tolerance={args.tolerance}"
    header = ("g", "max_residual", "l", "s", "n", "m", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "sign_mismatches")
    _emit_csv(args.output, meta, header, rows)
    return 1 if failed else 0


def _cmd_qpdc(args: argparse.Namespace) -> int:
    gains = args.g_range if args.g_range else args.g
    mode = "shots" if args.shots else "exact"
    rows = []
    for g in gains:
        spec = QpdcSpec(
            g=g, q=args.q, input=args.input, mode=mode,
            shots=args.shots or 2000, seed=args.seed,
        )
        if args.method == "matrix":
            outcomes = [(out, prob, 0.0, prob * g / 4.0) for out, prob in qpdc_amplitudes(spec)]
        else:
            outcomes = [(o.output, o.probability, o.stderr, o.raw_frequency) for o in run_qpdc(spec)]
        for out, prob, stderr, raw in outcomes:
            rows.append(
                (
                    g, f"{args.input.n},{args.input.m}", f"{out.n},{out.m}",
                    f"{prob:.12e}", f"{stderr:.12e}", mode,
                    args.shots or "", "" if args.seed is None else args.seed,
                    f"{raw:.12e}",
                )
            )
    meta = (
        f"qpdc input={args.input.n},{args.input.m} q={args.q} method={args.method} "
        f"mode={mode} shots={args.shots or ''} seed={'' if args.seed is None else args.seed}"
    )
    header = ("g", "input", "output", "probability", "stderr", "mode", "shots", "seed", "raw_frequency")
    _emit_csv(args.output, meta, header, rows)
    return 0


def _cmd_observables(args: argparse.Namespace) -> int:
    gains = args.g_range if args.g_range else args.g
    if args.kind == "ratio":
        rows = [
            (g, q, f"{mean_photons_ratio(g, q):.12e}")
            for q in args.q_list
            for g in gains
        ]
        header = ("g", "q", "ratio")
    else:
        thetas = args.theta_range
        rows = [
            (g, q, theta, f"{quadrature_fluctuation(g, q, theta, renormalized=args.renormalized):.12e}")
            for g in gains
            for q in args.q_list
            for theta in thetas
        ]
        header = ("g", "q", "theta", "fluctuation")
    meta = f"observables kind={args.kind} renormalized={getattr(args, 'renormalized', False)}"
    _emit_csv(args.output, meta, header, rows)
    return 0


def _cmd_self_test(args: argparse.Namespace) -> int:
    failures = 0

    def report(name: str, ok: bool) -> None:
        nonlocal failures
        print(f"{'PASS' if ok else 'FAIL'} {name}")
        failures += 0 if ok else 1

    grid = [1.0, 1.25, 1.5, 2.0, 3.0, 4.0, 8.0]
    worst = 0.0
    for g in grid:
        eta = 1.0 / g
        bs, pa = BeamSplitter(eta), ParametricAmplifier(g)
        pairs = [
            (bs_amplitude(bs, (0, 0), (0, 0)), 1.0),
            (bs_amplitude(bs, (1, 1), (1, 1)), 2 * eta - 1),
            (bs_amplitude(bs, (0, 1), (0, 1)), math.sqrt(eta)),
            (pdc_amplitude(pa, (0, 0), (0, 0)), 1 / math.sqrt(g)),
            (pdc_amplitude(pa, (1, 1), (1, 1)), (2 - g) / g**1.5),
            (pdc_amplitude(pa, (0, 1), (0, 1)), 1 / g),
        ]
        worst = max(worst, max(abs(v - e) for v, e in pairs))
    report("closed-form transition amplitudes", worst < 1e-10)

    sweep = duality_sweep([1.0, 2.0, 4.0], 4)
    report("duality residuals", max(inst.residual for inst in sweep) < 1e-8)

    dip = run_qpdc(QpdcSpec(g=2.0, q=1, input=(1, 1)))
    dip_prob = {tuple(o.output): o.probability for o in dip}[(1, 1)]
    report("two-photon interference dip", dip_prob < 1e-10)

    report("photon-ratio closed form", abs(mean_photons_ratio(2.0, 2) - 0.5) < 1e-15)
    return 1 if failures else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bspdc", description=__doc__)
    parser.add_argument("--version", action="version", version=f"bspdc {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="{amplitude,duality-check,qpdc,observables}")

    amp = sub.add_parser("amplitude", help="single transition amplitude of either device")
    device = amp.add_mutually_exclusive_group(required=True)
    device.add_argument("--bs", action="store_true", help="beam splitter (requires --eta)")
    device.add_argument("--pdc", action="store_true", help="parametric amplifier (requires --g)")
    amp.add_argument("--eta", type=float, help="beam-splitter transmittance in [0, 1]")
    amp.add_argument("--g", type=float, help="amplifier gain >= 1")
    amp.add_argument("--in", dest="state_in", type=_parse_state, required=True, metavar="n,m")
    amp.add_argument("--out", dest="state_out", type=_parse_state, required=True, metavar="n,m")
    amp.add_argument("--oracle", action="store_true", help="evaluate via the exponential oracle instead")
    amp.add_argument("--oracle-headroom", type=int, default=24, help="cutoff margin for --oracle")
    amp.set_defaults(func=_cmd_amplitude)

    dual = sub.add_parser("duality-check", help="worst duality residual per gain; nonzero exit over tolerance")
    dual.add_argument("--g", type=_parse_floats, default=[1.0, 1.25, 1.5, 2.0, 3.0, 4.0, 8.0], metavar="g1,g2,...")
    dual.add_argument("--max-total", type=int, default=6)
    dual.add_argument("--tolerance", type=float, default=1e-8)
    dual.add_argument("--output", help="CSV path (default: stdout)")
    dual.set_defaults(func=_cmd_duality)

    qp = sub.add_parser("qpdc", help="order-1 amplifier transition probabilities, exact or sampled")
    qp.add_argument("--input", type=_parse_state, required=True, metavar="n,m")
    qp.add_argument("--g", type=_parse_floats, default=[2.0], metavar="g1,g2,...")
    qp.add_argument("--g-range", type=_parse_range, metavar="start:stop:step")
    qp.add_argument("--q", type=int, default=1)
    qp.add_argument("--method", choices=("circuit", "matrix"), default="circuit",
                    help="circuit evaluation or the direct amplitude path (any q)")
    mode = qp.add_mutually_exclusive_group()
    mode.add_argument("--exact", action="store_true", help="exact post-selection (default)")
    mode.add_argument("--shots", type=int, help="sampled evaluation with this many shots")
    qp.add_argument("--seed", type=int)
    qp.add_argument("--output", help="CSV path (default: stdout)")
    qp.set_defaults(func=_cmd_qpdc)

    ob = sub.add_parser("observables", help="photon-number ratio and quadrature fluctuation tables")
    ob.add_argument("--kind", choices=("ratio", "fluctuation"), required=True)
    ob.add_argument("--g", type=_parse_floats, default=[1.25, 1.5, 2.0, 3.0, 4.0], metavar="g1,g2,...")
    ob.add_argument("--g-range", type=_parse_range, metavar="start:stop:step")
    ob.add_argument("--q-list", type=_parse_ints, default=[1, 2, 3, 4, 5, 6], metavar="q1,q2,...")
    ob.add_argument("--theta-range", type=_parse_range, default=_parse_range("0:3.2:0.1"), metavar="start:stop:step")
    ob.add_argument("--renormalized", action="store_true", help="unit-norm ladder convention")
    ob.add_argument("--output", help="CSV path (default: stdout)")
    ob.set_defaults(func=_cmd_observables)

    selftest = sub.add_parser("self-test")
    selftest.set_defaults(func=_cmd_self_test)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "bs", False) and args.eta is None:
        parser.error("--bs requires --eta")
    if getattr(args, "pdc", False) and args.g is None:
        parser.error("--pdc requires --g")
    try:
        return args.func(args)
    except ValueError as exc:
        parser.exit(2, f"error: {exc}\n")


if __name__ == "__main__":
    sys.exit(main())
