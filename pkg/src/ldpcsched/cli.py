"""``ldpcsched`` command line.

Exit status is 0 on success, 1 on usage or parameter errors and 2 on runtime
failures (construction, I/O, decoding).
"""
from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from . import harness
from .channel import awgn_transmit, bpsk_modulate, channel_llrs, ebno_db_to_noise_variance, random_stream
from .codes import CodeSpec, construct_regular_code, load_alist, save_alist
from .exceptions import ConfigError, LdpcError
from .instrumentation import REFERENCE_PLATFORM, model_row, model_rows_csv, reference_latency_rows
from .schedulers import ALGORITHMS, DecoderConfig, canonical_algorithm, decode

USAGE_ERROR = 1
RUNTIME_ERROR = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE_ERROR, f"{self.prog}: error: {message}\n")


def _decoder_flags(p: argparse.ArgumentParser, many: bool = True):
    d = DecoderConfig()
    if many:
        p.add_argument("--decoders", default="arcid,rbp,flooding",
                       help="comma-separated decoders (%(default)s); one of " + ", ".join(ALGORITHMS))
    else:
        p.add_argument("--decoder", default="arcid", help="decoder name (%(default)s)")
    p.add_argument("--t-max", type=int, default=d.t_max, help="iteration cap (%(default)s)")
    p.add_argument("--alpha", type=float, default=d.alpha, help="R_v weight (%(default)s)")
    p.add_argument("--beta", type=float, default=d.beta, help="belief-change weight (%(default)s)")
    p.add_argument("--gamma", type=float, default=d.gamma, help="activation threshold (%(default)s)")
    p.add_argument("--lambda", dest="lambda_", type=float, default=d.lambda_,
                   help="active-subset ratio (%(default)s)")
    p.add_argument("--decay", type=float, default=d.decay, help="RD-RBP residual decay (%(default)s)")
    p.add_argument("--list-size", type=int, default=d.list_size, help="List-RBP batch size (%(default)s)")


def _code_flags(p: argparse.ArgumentParser):
    p.add_argument("--code", default="512,256,3,6",
                   help="ALIST path or 'n,m,dv,dc' for a generated code (%(default)s)")
    p.add_argument("--code-seed", type=int, default=1, help="construction seed for generated codes (%(default)s)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ldpcsched", description="LDPC decoding schedules: codes, sweeps and cost models.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    fmt = argparse.ArgumentDefaultsHelpFormatter

    p = sub.add_parser("gen-code", help="construct a regular code and write it as ALIST")
    p.add_argument("--n", type=int, required=True, help="code length")
    p.add_argument("--m", type=int, required=True, help="number of checks")
    p.add_argument("--dv", type=int, required=True, help="variable degree")
    p.add_argument("--dc", type=int, required=True, help="check degree")
    p.add_argument("--seed", type=int, default=1, help="construction seed (%(default)s)")
    p.add_argument("--out", required=True, help="output ALIST path")

    p = sub.add_parser("decode", help="decode one frame")
    _code_flags(p)
    _decoder_flags(p, many=False)
    p.add_argument("--llrs", help="text or .npy file with n channel LLRs; omitted: simulate one frame")
    p.add_argument("--snr", type=float, default=3.5, help="Eb/N0 in dB for the simulated frame (%(default)s)")
    p.add_argument("--seed", type=int, default=1, help="noise seed for the simulated frame (%(default)s)")
    p.add_argument("--out", help="write final posterior LLRs, one per line")

    p = sub.add_parser("sweep", help="BER/FER versus Eb/N0")
    _code_flags(p)
    _decoder_flags(p)
    p.add_argument("--snr-list", default="0:0.5:4.5", help="start:step:stop and/or comma list (%(default)s)")
    p.add_argument("--max-cw", type=int, default=1_000_000, help="codewords per point (%(default)s)")
    p.add_argument("--max-errors", type=int, default=100, help="frame errors that end a point (%(default)s)")
    p.add_argument("--seed", type=int, default=1, help="master noise seed (%(default)s)")
    p.add_argument("--transmission", choices=harness.TRANSMISSIONS, default="all_zero",
                   help="transmitted words (%(default)s)")
    p.add_argument("--workers", type=int, default=1, help="worker processes (%(default)s)")
    p.add_argument("--plan", help="plan file; replaces the code, decoder and sweep flags")
    p.add_argument("--out", default="sweep.csv", help="output CSV (%(default)s)")

    p = sub.add_parser("profile", help="BER versus iteration cap at one Eb/N0")
    _code_flags(p)
    _decoder_flags(p)
    p.add_argument("--snr", type=float, default=3.5, help="Eb/N0 in dB (%(default)s)")
    p.add_argument("--max-cw", type=int, default=5000, help="codewords per decoder (%(default)s)")
    p.add_argument("--seed", type=int, default=1, help="master noise seed (%(default)s)")
    p.add_argument("--workers", type=int, default=1, help="worker processes (%(default)s)")
    p.add_argument("--out", default="profile.csv", help="output CSV (%(default)s)")

    ref = REFERENCE_PLATFORM
    p = sub.add_parser("model", help="analytic operations, latency and memory")
    p.add_argument("--decoder", default="arcid", help="bp, lbp, rbp, rd_rbp, list_rbp, rp or arcid (%(default)s)")
    for name in ("n", "m", "e", "dv", "dc", "k"):
        p.add_argument(f"--{name}", type=int, default=ref[name], help="(%(default)s)")
    p.add_argument("--i-avg", type=float, default=4.5, help="average iterations (%(default)s)")
    p.add_argument("--fclk", type=float, default=ref["f_clk"], help="clock in Hz (%(default)s)")
    p.add_argument("--eta", type=float, default=ref["eta"], help="parallel efficiency (%(default)s)")
    p.add_argument("--out", help="optional CSV output")
    for action in sub.choices.values():
        action.formatter_class = fmt
    return parser


# -- helpers ----------------------------------------------------------------------------------


def _decoder_configs(args, names: str) -> tuple[DecoderConfig, ...]:
    items = [s.strip() for s in names.split(",") if s.strip()]
    if not items:
        raise UsageError("no decoders given")
    return tuple(
        DecoderConfig(algorithm=canonical_algorithm(a), t_max=args.t_max, alpha=args.alpha, beta=args.beta,
                      gamma=args.gamma, lambda_=args.lambda_, decay=args.decay, list_size=args.list_size)
        for a in items
    )


def _echo(pairs):
    for key, value in pairs:
        print(f"# {key} = {value}")


def _graph(args):
    spec, path = harness.resolve_code(args.code)
    if path is not None:
        return load_alist(path)
    return construct_regular_code(spec, args.code_seed)


# -- subcommands --------------------------------------------------------------------------


def cmd_gen_code(args):
    spec = CodeSpec(args.n, args.m, args.dv, args.dc)
    spec.check_regular()
    _echo([("n", args.n), ("m", args.m), ("dv", args.dv), ("dc", args.dc), ("seed", args.seed), ("out", args.out)])
    graph = construct_regular_code(spec, args.seed)
    save_alist(graph, args.out)
    print(f"E = {graph.num_edges}")
    print(f"variable degrees: {sorted(set(graph.var_degree.tolist()))}, "
          f"check degrees: {sorted(set(graph.check_degree.tolist()))}, 4-cycles: {graph.count_4cycles()}")


def cmd_decode(args):
    (config,) = _decoder_configs(args, args.decoder)
    graph = _graph(args)
    pairs = [("code", args.code), ("code_seed", args.code_seed)]
    pairs += [(k, v) for k, v in config.as_dict().items()]
    if args.llrs:
        llrs = np.load(args.llrs) if args.llrs.endswith(".npy") else np.loadtxt(args.llrs, ndmin=1)
        llrs = np.ravel(llrs)
        pairs.append(("llrs", args.llrs))
        codeword = None
    else:
        rate = (graph.n - graph.m) / graph.n
        var = ebno_db_to_noise_variance(args.snr, rate)
        stream = random_stream(args.seed, 0, 0)
        codeword = np.zeros(graph.n, dtype=np.uint8)
        llrs = channel_llrs(awgn_transmit(bpsk_modulate(codeword), var, stream), var)
        pairs += [("snr_db", args.snr), ("seed", args.seed)]
    _echo(pairs)
    result = decode(graph, llrs, config)
    print(f"converged = {result.converged}")
    print(f"iterations = {result.iterations_used}")
    if codeword is not None:
        print(f"bit_errors = {int((result.decoded != codeword).sum())}")
    print("decoded = " + "".join(map(str, result.decoded.tolist())))
    if args.out:
        np.savetxt(args.out, result.final_posterior, fmt="%.17g")


def _print_table(header, rows):
    print("  ".join(f"{h:>12}" for h in header))
    for row in rows:
        print("  ".join(f"{v:>12.4g}" if isinstance(v, float) else f"{v!s:>12}" for v in row))


def cmd_sweep(args):
    if args.plan:
        plan = harness.load_plan(args.plan)
    else:
        spec, path = harness.resolve_code(args.code)
        plan = harness.ExperimentPlan(
            code=spec, alist_path=path, code_seed=args.code_seed,
            decoders=_decoder_configs(args, args.decoders),
            snr_points_db=harness.parse_snr_list(args.snr_list),
            max_codewords=args.max_cw, max_error_events=args.max_errors,
            master_seed=args.seed, transmission=args.transmission,
        )
    meta = plan.describe()
    _echo(meta + [("workers", args.workers)])
    report = harness.run_sweep(plan, workers=args.workers)
    harness.write_report_csv(report, args.out, meta=meta)
    _print_table(("decoder", "snr_db", "codewords", "ber", "fer", "avg_iters", "stop"),
                 [(r.decoder, r.snr_db, r.codewords, r.ber, r.fer, r.avg_iters, r.stop_reason)
                  for r in report.rows])


def cmd_profile(args):
    spec, path = harness.resolve_code(args.code)
    plan = harness.ExperimentPlan(
        code=spec, alist_path=path, code_seed=args.code_seed,
        decoders=_decoder_configs(args, args.decoders), snr_points_db=(args.snr,),
        max_codewords=args.max_cw, master_seed=args.seed,
    )
    meta = plan.describe()
    _echo(meta + [("workers", args.workers)])
    profile = harness.iteration_profile(plan, args.snr, workers=args.workers)
    harness.write_profile_csv(profile, args.out, meta=meta)
    _print_table(("decoder", "iteration", "ber", "fer"),
                 [(r.decoder, r.iteration, r.ber, r.fer) for r in profile.rows])


def cmd_model(args):
    row = model_row(args.decoder, args.n, args.m, args.e, args.dv, args.dc, args.k,
                    args.i_avg, args.fclk, args.eta)
    _echo([("decoder", row["decoder"]), ("n", args.n), ("m", args.m), ("e", args.e), ("dv", args.dv),
           ("dc", args.dc), ("k", args.k), ("i_avg", args.i_avg), ("fclk", args.fclk), ("eta", args.eta)])
    print(f"ops_per_iter = {row['ops_per_iter']}")
    print(f"latency_ms = {row['latency_s'] * 1e3:.4f}")
    print(f"memory_bytes = {row['memory_bytes']}")
    print("reference latency check:")
    for ref in reference_latency_rows():
        flag = "ok" if ref["consistent"] else "INCONSISTENT"
        print(f"  {ref['decoder']:>6} {ref['i_avg']:>6g} it: formula {ref['formula_s'] * 1e3:.2f} ms, "
              f"cited {ref['cited_s'] * 1e3:.2f} ms [{flag}]")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(model_rows_csv([row]))


COMMANDS = {
    "gen-code": cmd_gen_code,
    "decode": cmd_decode,
    "sweep": cmd_sweep,
    "profile": cmd_profile,
    "model": cmd_model,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        COMMANDS[args.command](args)
    except (UsageError, ConfigError) as exc:
        print(f"ldpcsched {args.command}: error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except (LdpcError, OSError, ValueError) as exc:
        print(f"ldpcsched {args.command}: {exc}", file=sys.stderr)
        return RUNTIME_ERROR
    return 0


if __name__ == "__main__":
    sys.exit(main())
