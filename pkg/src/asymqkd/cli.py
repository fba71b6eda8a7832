"""Command-line front end.

Five subcommands expose the library as reproducible experiments:

* ``rates``       one-way key rates plus the one-rejection two-way rate
* ``threshold``   bisected noise threshold for one protocol variant
* ``sweep-fig1``  Y-basis vs baseline thresholds across channel shapes
* ``sweep-fig2``  rate-vs-noise curves with two-way crossing points
* ``simulate``    one seeded Monte Carlo protocol run

Every output starts with ``#`` header lines carrying a schema version and
the fully resolved configuration (and seed where one is used), so a stored
file is self-describing and a rerun with the same flags is byte-identical.
Numbers are printed with ``repr`` to keep golden files exact; fractions,
never percentages.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from .channel import Basis, PauliRates, flip_rates
from .distill import modified_rate_one_bstep
from .keyrates import (
    rate_bb84_symmetrized,
    rate_single_basis,
    rate_sixstate_mixed,
    rate_sixstate_separate,
)
from .sim import EveModel, ProtocolParams, eve_intercept_resend, eve_matched_basis_probe, run_protocol
from .threshold import (
    ChannelFamily,
    ProtocolVariant,
    SearchParams,
    ThresholdSearchError,
    sweep_fig1,
    threshold_total_noise,
)
from . import channel as _channel

_BASIS_BY_LETTER = {"Z": Basis.Z, "X": Basis.X, "Y": Basis.Y}


def _add_channel_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("channel (q-triple or family form)")
    group.add_argument("--qx", type=float, help="sigma_x rate q_x0")
    group.add_argument("--qy", type=float, help="sigma_y rate q_y0")
    group.add_argument("--qz", type=float, help="sigma_z rate q_z0")
    group.add_argument("--family-ratio", type=float, metavar="R",
                       help="channel shape q_y0/q_x0 with q_x0 = q_z0")
    group.add_argument("--scale", type=float, help="total noise along the family ray")


def _resolve_channel(parser: argparse.ArgumentParser, args: argparse.Namespace) -> PauliRates:
    triple = (args.qx, args.qy, args.qz)
    if all(v is not None for v in triple):
        if args.family_ratio is not None or args.scale is not None:
            parser.error("give either --qx/--qy/--qz or --family-ratio/--scale, not both")
        try:
            return PauliRates.from_error_rates(args.qx, args.qy, args.qz)
        except ValueError as exc:
            parser.error(f"invalid channel: {exc}")
    if args.family_ratio is not None and args.scale is not None:
        try:
            return ChannelFamily.from_y_ratio(args.family_ratio).rates_at(args.scale)
        except ValueError as exc:
            parser.error(f"invalid channel family: {exc}")
    parser.error("channel required: --qx/--qy/--qz or --family-ratio with --scale")
    raise AssertionError  # parser.error exits


def _parse_grid(text: str) -> list[float]:
    try:
        lo_s, hi_s, step_s = text.split(":")
        lo, hi, step = float(lo_s), float(hi_s), float(step_s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must be lo:hi:step, got {text!r}")
    if step <= 0.0 or hi < lo:
        raise argparse.ArgumentTypeError(f"grid needs step > 0 and hi >= lo, got {text!r}")
    count = int(round((hi - lo) / step)) + 1
    return [lo + i * step for i in range(count)]


def _parse_eve(text: str) -> Optional[EveModel]:
    cleaned = text.strip().lower()
    if cleaned in ("none", ""):
        return None
    if cleaned in ("match", "match-prep", "match-prep-probe"):
        return eve_matched_basis_probe()
    letters = [c for c in text.upper() if c not in ", "]
    if not letters or any(c not in _BASIS_BY_LETTER for c in letters):
        raise argparse.ArgumentTypeError(
            f"eve must be 'none', 'match-prep', or bases from Z/X/Y, got {text!r}"
        )
    return eve_intercept_resend(tuple(_BASIS_BY_LETTER[c] for c in letters))


def _emit(text: str, out_path: Optional[str]) -> None:
    if out_path is None:
        sys.stdout.write(text)
    else:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _channel_echo(rates: PauliRates) -> str:
    return (
        f"q_i={rates.q_i!r} q_x={rates.q_x!r} q_y={rates.q_y!r} q_z={rates.q_z!r}"
    )


def _cmd_rates(parser: argparse.ArgumentParser, args: argparse.Namespace) -> int:
    rates = _resolve_channel(parser, args)
    flips = flip_rates(rates)
    values = [
        ("bit_flip_rate", flips.p_x),
        ("phase_flip_rate", flips.p_z),
        ("rate_bb84_symmetrized", rate_bb84_symmetrized(rates)),
        ("rate_single_basis", rate_single_basis(rates)),
        ("rate_sixstate_mixed", rate_sixstate_mixed(rates)),
        ("rate_sixstate_separate", rate_sixstate_separate(rates)),
        ("rate_two_way_one_reject", modified_rate_one_bstep(rates)),
    ]
    by_name = dict(values)
    lines = [
        "# schema: asymqkd.rates.v1",
        f"# config: {_channel_echo(rates)}",
        "quantity,value",
    ]
    lines.extend(f"{name},{value!r}" for name, value in values)
    lines.append(
        "# note: rate_single_basis - rate_bb84_symmetrized = "
        f"{by_name['rate_single_basis'] - by_name['rate_bb84_symmetrized']!r} (never negative)"
    )
    lines.append(
        "# note: rate_sixstate_separate - rate_sixstate_mixed = "
        f"{by_name['rate_sixstate_separate'] - by_name['rate_sixstate_mixed']!r} (never negative)"
    )
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_threshold(parser: argparse.ArgumentParser, args: argparse.Namespace) -> int:
    if args.family_ratio is None:
        parser.error("threshold needs --family-ratio")
    variant = ProtocolVariant(args.variant)
    family = ChannelFamily.from_y_ratio(args.family_ratio)
    params = SearchParams(target=args.target)
    header = [
        "# schema: asymqkd.threshold.v1",
        f"# config: variant={variant.value} family_ratio={args.family_ratio!r} "
        f"tol={args.tol!r} target={args.target!r} m_max={params.m_max} k_max={params.k_max}",
    ]
    try:
        result = threshold_total_noise(family, variant, tol=args.tol, params=params)
    except ThresholdSearchError as exc:
        _emit("\n".join(header + [f"# error: {exc}"]) + "\n", args.out)
        return 1
    lines = header + [
        "variant,family_ratio,threshold,bracket_low,bracket_high",
        f"{variant.value},{args.family_ratio!r},{result.threshold!r},"
        f"{result.bracket.low!r},{result.bracket.high!r}",
    ]
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_sweep_fig1(parser: argparse.ArgumentParser, args: argparse.Namespace) -> int:
    ratios = args.grid
    rows = sweep_fig1(ratios, tol=args.tol, params=SearchParams(target=args.target))
    lines = [
        "# schema: asymqkd.sweep_fig1.v1",
        f"# config: grid={args.grid_text} tol={args.tol!r} target={args.target!r}",
        "q_y0_over_q_x0,q_y0,Q_t0_ybasis,Q_t0_chau,note",
    ]
    for row in rows:
        note = (row.error or "").replace(",", ";")
        lines.append(
            f"{row.y_ratio!r},{row.q_y0_at_threshold!r},"
            f"{row.threshold_ybasis!r},{row.threshold_chau!r},{note}"
        )
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def _fig2_point(q_y0: float, total: float) -> tuple[float, float]:
    """(one-way r', two-way one-rejection R) at q_x0 = q_z0 = (Q - q_y0)/2."""
    q_x0 = (total - q_y0) / 2.0
    rates = PauliRates.from_error_rates(q_x0, q_y0, q_x0)
    one_way = rate_sixstate_separate(rates)
    two_way = modified_rate_one_bstep(_channel.conjugate(rates, Basis.Y))
    return one_way, two_way


def _cmd_sweep_fig2(parser: argparse.ArgumentParser, args: argparse.Namespace) -> int:
    cases = [float(c) for c in args.cases.split(",")]
    grid = args.grid
    lines = [
        "# schema: asymqkd.sweep_fig2.v1",
        f"# config: cases={args.cases} grid={args.grid_text}",
        "q_y0,total_noise,rate_one_way,rate_two_way",
    ]
    crossings = []
    for q_y0 in cases:
        gap_prev: Optional[float] = None
        total_prev = 0.0
        crossing: Optional[float] = None
        for total in grid:
            if total < q_y0 or total > 1.0:
                lines.append(f"{q_y0!r},{total!r},nan,nan")
                continue
            one_way, two_way = _fig2_point(q_y0, total)
            lines.append(f"{q_y0!r},{total!r},{one_way!r},{two_way!r}")
            gap = two_way - one_way
            if crossing is None and gap > 0.0 and gap_prev is not None and gap_prev <= 0.0:
                lo, hi = total_prev, total
                for _ in range(80):
                    mid = 0.5 * (lo + hi)
                    one_mid, two_mid = _fig2_point(q_y0, mid)
                    if two_mid - one_mid > 0.0:
                        hi = mid
                    else:
                        lo = mid
                crossing = 0.5 * (lo + hi)
            gap_prev, total_prev = gap, total
        crossings.append((q_y0, crossing))
    for q_y0, crossing in crossings:
        where = repr(crossing) if crossing is not None else "none-in-grid"
        lines.append(f"# crossing: q_y0={q_y0!r} total_noise={where}")
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_simulate(parser: argparse.ArgumentParser, args: argparse.Namespace) -> int:
    rates = _resolve_channel(parser, args)
    try:
        params = ProtocolParams(
            n=args.n,
            delta=args.delta,
            b_rounds=args.b_rounds,
            p_group=args.p_group,
            target=args.target,
            abort_sigma=args.abort_sigma,
        )
    except ValueError as exc:
        parser.error(f"invalid protocol parameters: {exc}")
    report = run_protocol(rates, params, seed=args.seed, eve=args.eve)
    sys.stdout.write(report.to_text())
    if args.out is not None:
        _emit(report.to_csv(), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="asymqkd",
        description="Key rates, distillation thresholds and Monte Carlo runs "
        "for QKD over asymmetric Pauli channels.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_rates = sub.add_parser("rates", help="one-way and two-way key rates of a channel")
    _add_channel_flags(p_rates)
    p_rates.add_argument("--out", help="write CSV here instead of stdout")
    p_rates.set_defaults(func=_cmd_rates)

    p_thr = sub.add_parser("threshold", help="total-noise threshold of a protocol variant")
    p_thr.add_argument("--variant", required=True,
                       choices=[v.value for v in ProtocolVariant])
    p_thr.add_argument("--family-ratio", type=float, required=True, metavar="R",
                       help="channel shape q_y0/q_x0 with q_x0 = q_z0")
    p_thr.add_argument("--tol", type=float, default=1e-4)
    p_thr.add_argument("--target", type=float, default=0.05)
    p_thr.add_argument("--out")
    p_thr.set_defaults(func=_cmd_threshold)

    p_f1 = sub.add_parser("sweep-fig1", help="thresholds across q_y0/q_x0 shapes")
    p_f1.add_argument("--grid", type=str, default="0.0:1.0:0.05", metavar="LO:HI:STEP")
    p_f1.add_argument("--tol", type=float, default=1e-4)
    p_f1.add_argument("--target", type=float, default=0.05)
    p_f1.add_argument("--out")
    p_f1.set_defaults(func=_cmd_sweep_fig1)

    p_f2 = sub.add_parser("sweep-fig2", help="rate-vs-noise curves and crossings")
    p_f2.add_argument("--cases", type=str, default="0.0,0.005,0.01,0.02",
                      help="comma-separated q_y0 values")
    p_f2.add_argument("--grid", type=str, default="0.0:0.5:0.0025", metavar="LO:HI:STEP")
    p_f2.add_argument("--out")
    p_f2.set_defaults(func=_cmd_sweep_fig2)

    p_sim = sub.add_parser("simulate", help="one seeded Monte Carlo protocol run")
    _add_channel_flags(p_sim)
    p_sim.add_argument("--n", type=int, default=10_000, help="key-bit block size")
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--delta", type=float, default=2.0)
    p_sim.add_argument("--b-rounds", type=int, default=2)
    p_sim.add_argument("--p-group", type=int, default=3)
    p_sim.add_argument("--target", type=float, default=0.05)
    p_sim.add_argument("--abort-sigma", type=float, default=3.0)
    p_sim.add_argument("--eve", type=_parse_eve, default=None,
                       help="'none', 'match-prep', or bases e.g. ZX or Z,X,Y")
    p_sim.add_argument("--out", help="also write the CSV form here")
    p_sim.set_defaults(func=_cmd_simulate)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if hasattr(args, "grid"):
        args.grid_text = args.grid
        try:
            args.grid = _parse_grid(args.grid)
        except argparse.ArgumentTypeError as exc:
            parser.error(str(exc))
    return args.func(parser, args)


def entry_point() -> None:
    sys.exit(main())
