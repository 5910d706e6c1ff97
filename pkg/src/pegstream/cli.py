"""Command-line front end.

    pegstream --grammar g.peg --input data --stats

reads the grammar, streams the input through a parser one byte at a time,
and writes the emitted code bits to stdout. Exit status: 0 accept,
1 reject, 2 usage or grammar error, 3 divergence (the program does not
handle the input), 4 oracle mismatch under --oracle-check.

Bit output modes: ascii '0'/'1' characters (default), --packed (8-byte
big-endian bit count, then MSB-first packed bytes), or --quiet. With
--stats a key=value record goes to stderr. --report DIR additionally
writes a per-symbol trace.csv and a table-occupancy figure into DIR.
"""

from __future__ import annotations

import argparse
import sys
import time

from . import report as report_mod
from .driver import ACCEPT, Parser
from .expand import INFINITE, DivergenceError
from .grammar import GrammarError, load_program
from .oracle import build_code, full_table
from .table import END_MARK

EXIT_ACCEPT = 0
EXIT_REJECT = 1
EXIT_USAGE = 2
EXIT_DIVERGENCE = 3
EXIT_MISMATCH = 4


def byte_display(b):
    if b == END_MARK:
        return "#"
    if 32 <= b < 127:
        return chr(b)
    return f"\\x{b:02x}"


def parse_depth(text):
    if text == "inf":
        return INFINITE
    try:
        d = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("speculation depth must be an integer or 'inf'")
    if d < 0:
        raise argparse.ArgumentTypeError("speculation depth must be >= 0")
    return d


def build_arg_parser():
    ap = argparse.ArgumentParser(
        prog="pegstream",
        description="Streaming PEG parser emitting bit-coded parse decisions.",
    )
    ap.add_argument("--grammar", required=True, help="grammar file")
    ap.add_argument("--input", default="-", help="input file, or - for stdin")
    ap.add_argument("--spec-depth", type=parse_depth, default=INFINITE,
                    metavar="N|inf", help="speculation budget (default inf)")
    ap.add_argument("--stats", action="store_true",
                    help="print a key=value stats record to stderr")
    ap.add_argument("--trace-tables", action="store_true",
                    help="dump the table to stderr after every update")
    ap.add_argument("--trace-expansion", action="store_true",
                    help="print every expansion transition to stderr")
    ap.add_argument("--oracle-check", action="store_true",
                    help="cross-check the streamed result against the full table")
    ap.add_argument("--packed", action="store_true", help="binary bit output")
    ap.add_argument("--quiet", action="store_true", help="suppress bit output")
    ap.add_argument("--spec-head-check", action="store_true",
                    help="allow the free head inspection at depth 0")
    ap.add_argument("--report", metavar="DIR", default=None,
                    help="write trace.csv and figures into DIR")
    ap.add_argument("--block-size", type=int, default=64 * 1024,
                    help="input read block size (default 64 KiB)")
    return ap


def report_stats(stats, verdict, input_len, rules, wall_time):
    lines = [
        f"max_cols={stats.max_cols}",
        f"resolved_entries={stats.resolved_entries}",
        f"non_immediate_entries={stats.non_immediate_entries}",
        f"speculation_steps={stats.speculation_steps}",
        f"visited_entries={stats.visited_entries}",
        f"expansion_steps={stats.expansion_steps}",
        f"verdict={verdict}",
        f"input_len={input_len}",
        f"rules={rules}",
        f"wall_time_s={wall_time:.6f}",
    ]
    return "\n".join(lines) + "\n"


def parse_stats_record(text):
    out = {}
    for line in text.splitlines():
        if not line.strip():
            continue
        key, _, value = line.partition("=")
        out[key] = value
    return out


def _iter_blocks(path, block_size):
    if path == "-":
        stream = sys.stdin.buffer
        while True:
            block = stream.read(block_size)
            if not block:
                return
            yield block
    else:
        with open(path, "rb") as fh:
            while True:
                block = fh.read(block_size)
                if not block:
                    return
                yield block


def pack_bits(bits):
    header = len(bits).to_bytes(8, "big")
    out = bytearray(header)
    for i in range(0, len(bits), 8):
        chunk = bits[i : i + 8]
        out.append(int(chunk.ljust(8, "0"), 2))
    return bytes(out)


def run_cli(args):
    err = sys.stderr
    try:
        with open(args.grammar, "rb") as fh:
            program = load_program(fh.read())
    except OSError as e:
        print(f"pegstream: cannot read grammar: {e}", file=err)
        return EXIT_USAGE
    except GrammarError as e:
        print(f"pegstream: grammar error: {e}", file=err)
        return EXIT_USAGE

    ascii_out = not (args.packed or args.quiet)
    on_table = None
    if args.trace_tables:
        def on_table(parser, byte):
            err.write(f"== after byte {parser.fed} ({byte_display(byte)}) ==\n")
            err.write(parser.table.dump(program.names))

    on_transition = None
    if args.trace_expansion:
        names = program.names

        def fmt(stack, off):
            text = " ".join(names[i] for i in reversed(stack)) or "ε"
            return f"({text}, {off})"

        def on_transition(before, label, after):
            err.write(f"{fmt(*before)} -{label or 'ε'}-> {fmt(*after)}\n")

    parser = Parser(
        program,
        depth=args.spec_depth,
        head_check=args.spec_head_check,
        on_table=on_table,
        on_transition=on_transition,
    )

    trace_rows = [] if args.report else None
    kept_input = bytearray() if args.oracle_check else None
    all_bits = [] if (args.packed or args.report or args.oracle_check) else None
    start = time.monotonic()
    pos = 0
    try:
        for block in _iter_blocks(args.input, args.block_size):
            if kept_input is not None:
                kept_input.extend(block)
            for b in block:
                bits = parser.feed(b)
                pos += 1
                if ascii_out and bits:
                    sys.stdout.write(bits)
                if all_bits is not None and bits:
                    all_bits.append(bits)
                if trace_rows is not None:
                    trace_rows.append((pos, byte_display(b), parser.stored_cols,
                                       bits, parser.table.resolved_total))
        bits, verdict = parser.finish()
    except OSError as e:
        print(f"pegstream: cannot read input: {e}", file=err)
        return EXIT_USAGE
    except DivergenceError as e:
        print(f"pegstream: divergence: {e}", file=err)
        return EXIT_DIVERGENCE
    wall = time.monotonic() - start
    pos += 1
    if ascii_out:
        if bits:
            sys.stdout.write(bits)
        sys.stdout.flush()
    if all_bits is not None and bits:
        all_bits.append(bits)
    if trace_rows is not None:
        trace_rows.append((pos, byte_display(END_MARK), parser.stored_cols,
                           bits, parser.table.resolved_total))
    if args.packed:
        sys.stdout.buffer.write(pack_bits("".join(all_bits)))
        sys.stdout.buffer.flush()

    if args.stats:
        err.write(report_stats(parser.stats(), verdict, pos - 1, len(program.rules), wall))

    if args.report:
        code = "".join(all_bits) if all_bits is not None else ""
        report_mod.write_report(args.report, trace_rows, parser.stats(),
                                verdict, code, args.spec_depth)

    status = EXIT_ACCEPT if verdict == ACCEPT else EXIT_REJECT

    if args.oracle_check:
        t = full_table(program, bytes(kept_input))
        cell = t.read(program.start, 0)
        want_verdict = ACCEPT if cell >= 0 else "reject"
        want_code = build_code(program, t, program.start) if cell >= 0 else ""
        got_code = "".join(all_bits)
        if want_verdict != verdict or (verdict == ACCEPT and want_code != got_code):
            print(
                "pegstream: oracle mismatch: "
                f"streamed ({verdict}, {got_code!r}) vs full table "
                f"({want_verdict}, {want_code!r})",
                file=err,
            )
            return EXIT_MISMATCH

    return status


def main(argv=None):
    ap = build_arg_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else 0
    if args.packed and args.quiet:
        print("pegstream: --packed and --quiet are mutually exclusive", file=sys.stderr)
        return EXIT_USAGE
    return run_cli(args)


if __name__ == "__main__":
    sys.exit(main())
