"""Command-line entry point.

Payload (table files, keystream bytes, CSV, results) goes to stdout or
``--out``; diagnostics go to stderr.  Exit status: 0 success, 1 domain
error, 2 usage error.
"""

import argparse
import sys

from . import cryptanalysis, experiments, ring
from .combinadic import binomial, compose, decompose, min_tumbler_count
from .engine import EngineConfig, InitVector, ReduceOp, generate, pack_bits, unpack_bits
from .errors import TumblerError


def _hex_int(text):
    try:
        value = int(text, 16)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a hexadecimal integer: {text!r}")
    if value < 0:
        raise argparse.ArgumentTypeError("seed must be non-negative")
    return value


def _power_of_two(text):
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if not ring.is_power_of_two(value):
        raise argparse.ArgumentTypeError(f"{value} is not a power of two")
    return value


def _iv(text):
    try:
        return InitVector.from_hex(text)
    except (ValueError, TumblerError) as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _emit_bytes(data, out):
    if out is None or out == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
    else:
        with open(out, "wb") as f:
            f.write(data)


def _emit_text(text, out):
    if out is None or out == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(out, "w", newline="") as f:
            f.write(text)


def cmd_table_gen(args):
    table = ring.generate_table(args.size, args.gen_seed)
    _emit_bytes(ring.serialize(table), args.out)
    print(f"size={table.size} popcount={table.popcount()}", file=sys.stderr)


def cmd_decompose(args):
    count = args.count or min_tumbler_count(args.table_size, args.seed)
    d = decompose(args.seed, count, args.table_size)
    _emit_text(" ".join(map(str, d.terms)) + "\n", args.out)


def cmd_compose(args):
    if args.count is not None and args.count != len(args.tumblers):
        raise TumblerError(f"--count {args.count} does not match {len(args.tumblers)} tumblers")
    if args.table_size is not None and max(args.tumblers) >= args.table_size:
        raise TumblerError(f"tumbler {max(args.tumblers)} outside a {args.table_size}-bit table")
    _emit_text(hex(compose(args.tumblers)) + "\n", args.out)


def cmd_keystream(args):
    jp = ring.load(args.table)
    config = EngineConfig(jp.size, args.tumblers, extra_final_churn=args.extra_churn,
                          reduce_op=args.op, oscillator_enabled=args.oscillator,
                          oscillator_seed=args.oscillator_seed)
    bits = generate(jp, args.seed, args.iv, config, args.bits)
    _emit_bytes(pack_bits(bits), args.out)
    print(f"bits={args.bits} table_size={jp.size} tumblers={args.tumblers} op={config.reduce_op.value}",
          file=sys.stderr)


def cmd_attack(args):
    instance = cryptanalysis.AttackInstance(ring.load(args.table), ring.load(args.target), args.t, args.op)
    found = cryptanalysis.mitm_attack(instance)
    _emit_text("".join(" ".join(map(str, c)) + "\n" for c in found), args.out)
    print(f"{len(found)} candidate set(s)", file=sys.stderr)


def cmd_secure_params(args):
    T = cryptanalysis.min_secure_expanded_count(args.table_size, args.initial_count)
    cost = cryptanalysis.attack_cost(args.table_size, T)
    baseline = cryptanalysis.log2_exact(binomial(args.table_size, args.initial_count)) - 1
    _emit_text(f"T={T}\n"
               f"log2_list_size={cost.log2_list_size:.6f}\n"
               f"log2_lower_bound={cost.log2_lower_bound:.6f}\n"
               f"log2_brute_force={baseline:.6f}\n", args.out)


def cmd_cycle_scan(args):
    text = experiments.cycle_histogram(args.sizes, args.counts, args.trials,
                                       base_seed=args.base_seed, reduce_op=args.op,
                                       max_iterations=args.max_iterations,
                                       allow_large=args.allow_large)
    _emit_text(text, args.out)
    print(f"{text.count(chr(10)) - 1} rows", file=sys.stderr)


def cmd_stats(args):
    with open(args.input, "rb") as f:
        bits = unpack_bits(f.read(), args.bits)
    report = experiments.keystream_stats(bits, chunk_width=args.chunk_width)
    lines = [f"{t.name} statistic={t.statistic:.4f} threshold={t.threshold:.4f} "
             f"{'PASS' if t.passed else 'FAIL'}" for t in report.tests]
    _emit_text("\n".join(lines) + "\n", args.out)


def build_parser():
    p = argparse.ArgumentParser(prog="tumbler", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("table-gen", help="write a balanced JP-Table file")
    s.add_argument("--size", type=_power_of_two, required=True)
    s.add_argument("--gen-seed", type=lambda x: int(x, 0), default=0)
    s.add_argument("--out")
    s.set_defaults(func=cmd_table_gen)

    s = sub.add_parser("decompose", help="seed (hex) to descending tumbler list")
    s.add_argument("--seed", type=_hex_int, required=True)
    s.add_argument("--count", type=int, help="defaults to the minimum count")
    s.add_argument("--table-size", type=int, default=65536)
    s.add_argument("--out")
    s.set_defaults(func=cmd_decompose)

    s = sub.add_parser("compose", help="tumbler list to seed (hex)")
    s.add_argument("--tumblers", type=int, nargs="+", required=True)
    s.add_argument("--count", type=int)
    s.add_argument("--table-size", type=int)
    s.add_argument("--out")
    s.set_defaults(func=cmd_compose)

    s = sub.add_parser("keystream", help="generate packed keystream bytes")
    s.add_argument("--table", required=True)
    s.add_argument("--seed", type=_hex_int, required=True)
    s.add_argument("--iv", type=_iv, default=InitVector.empty())
    s.add_argument("--tumblers", type=int, required=True, help="expanded tumbler count M'")
    s.add_argument("--op", choices=[o.value for o in ReduceOp], default="xor")
    s.add_argument("--bits", type=int, required=True)
    s.add_argument("--extra-churn", action="store_true")
    s.add_argument("--oscillator", action="store_true")
    s.add_argument("--oscillator-seed", type=lambda x: int(x, 0), default=0)
    s.add_argument("--out")
    s.set_defaults(func=cmd_keystream)

    s = sub.add_parser("attack", help="meet-in-the-middle tumbler recovery")
    s.add_argument("--table", required=True, help="master ring file")
    s.add_argument("--target", required=True, help="churn output ring file")
    s.add_argument("--t", type=int, required=True, help="even tumbler count")
    s.add_argument("--op", choices=[o.value for o in ReduceOp], default="xor")
    s.add_argument("--out")
    s.set_defaults(func=cmd_attack)

    s = sub.add_parser("secure-params", help="smallest safe expanded tumbler count")
    s.add_argument("--table-size", type=int, default=65536)
    s.add_argument("--initial-count", type=int, required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_secure_params)

    s = sub.add_parser("cycle-scan", help="limit-cycle CSV over table sizes and counts")
    s.add_argument("--sizes", type=_power_of_two, nargs="+", required=True)
    s.add_argument("--counts", type=int, nargs="+", required=True)
    s.add_argument("--trials", type=int, default=20)
    s.add_argument("--op", choices=[o.value for o in ReduceOp], default="adc")
    s.add_argument("--base-seed", type=int, default=0)
    s.add_argument("--max-iterations", type=int, default=100_000)
    s.add_argument("--allow-large", action="store_true")
    s.add_argument("--out")
    s.set_defaults(func=cmd_cycle_scan)

    s = sub.add_parser("stats", help="monobit, runs, chi-square and serial tests")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--bits", type=int, help="use only the first N bits")
    s.add_argument("--chunk-width", type=int, default=8)
    s.add_argument("--out")
    s.set_defaults(func=cmd_stats)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except (TumblerError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
