"""Command-line entry point: ``xpathhw <command> ...``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .datapath import DatapathConfig, area_report, lower_to_datapath
from .dictionary import Dictionary, encode_document
from .errors import XPathHwError
from .metrics import format_table, run_grid, default_doc_set, trend_check
from .netlist import emit_netlist
from .oracle import match_document
from .profile import parse_profiles, read_profile_lines
from .regex import build_prefix_forest, dump_irs, format_forest, lower_profile
from .simulator import format_matches, parse_matches, run_stream
from .workload import (
    DEFAULT_FANOUT,
    DEFAULT_NOISE,
    DEFAULT_ROOTS,
    DEFAULT_SHARED_PREFIX_RATE,
    DEFAULT_TAGS,
    WorkloadParams,
    default_dictionary,
    write_workload,
)


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x]


def _load_profiles(args):
    dictionary = Dictionary.load(args.dict) if args.dict else None
    raws = read_profile_lines(args.profiles)
    return parse_profiles(raws, dictionary), dictionary


def _load_docs(args, dictionary):
    docs = []
    for name in args.docs:
        data = Path(name).read_bytes()
        if args.encode:
            if dictionary is None:
                raise SystemExit("error: --encode needs --dict")
            data = encode_document(data, dictionary)
        docs.append((Path(name).name, data))
    return docs


def _config(args) -> DatapathConfig:
    return DatapathConfig(args.prefix_share, args.char_decode, args.stack_depth)


def _compile(args):
    asts, _ = _load_profiles(args)
    irs = [lower_profile(a) for a in asts]
    forest = build_prefix_forest(irs)
    return irs, forest, lower_to_datapath(forest, _config(args))


def cmd_gen(args) -> int:
    params = WorkloadParams(
        count=args.count, length=args.length, axis_mix=args.axis_mix,
        shared_prefix_rate=args.shared_prefix_rate, floating_rate=args.floating_rate,
        noise=args.noise, n_tags=args.tags, fanout=args.fanout, roots=args.roots,
        docs=args.docs, doc_size=args.doc_size, max_depth=args.max_depth, seed=args.seed,
    )
    manifest = write_workload(args.out, params)
    print(f"wrote {params.count} profiles and {len(manifest['documents'])} documents to {args.out}")
    return 0


def cmd_compile(args) -> int:
    irs, forest, dp = _compile(args)
    report = area_report(dp)
    sys.stdout.write(format_forest(forest))
    sys.stdout.write(report.to_json())
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "ir.txt").write_text(dump_irs(irs), encoding="utf-8")
        (out / "forest.txt").write_text(format_forest(forest), encoding="utf-8")
        (out / "netlist.vhd").write_text(emit_netlist(dp), encoding="utf-8")
        (out / "area.json").write_text(report.to_json(), encoding="utf-8")
    return 0


def _write_matches(args, events) -> None:
    text = format_matches(events)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_run(args) -> int:
    _, dictionary = _load_profiles(args)
    _, _, dp = _compile(args)
    docs = _load_docs(args, dictionary)
    result = run_stream(dp, docs)
    events = [e for per_doc in result.events for e in per_doc]
    _write_matches(args, events)
    status = 0
    for (name, _), err in zip(docs, result.errors):
        if err is not None:
            print(f"error: {err.kind}: {name}: {err}", file=sys.stderr)
            status = 2
    print(result.stats, file=sys.stderr)
    return status


def cmd_oracle(args) -> int:
    asts, dictionary = _load_profiles(args)
    events = []
    for name, doc in _load_docs(args, dictionary):
        events.extend(match_document(doc, asts, name))
    _write_matches(args, events)
    return 0


def cmd_diff(args) -> int:
    left = set(parse_matches(Path(args.left).read_text(encoding="utf-8")))
    right = set(parse_matches(Path(args.right).read_text(encoding="utf-8")))
    if left == right:
        print(f"EQUIVALENT ({len(left)} matches)")
        return 0
    first = min(left ^ right)
    side = args.left if first in left else args.right
    print(f"DIVERGENT: first difference doc_id={first[0]} profile_id={first[1]} "
          f"byte_offset={first[2]} only in {side}")
    return 1


def cmd_bench(args) -> int:
    dictionary = default_dictionary(args.tags)
    docs = default_doc_set(dictionary, args.docs, args.doc_size, args.seed)
    table = run_grid(args.counts, args.lengths, doc_set=docs, axis_mix=args.axis_mix,
                     shared_prefix_rate=args.shared_prefix_rate, seed=args.seed, dictionary=dictionary)
    if args.out:
        Path(args.out).write_text(table.to_csv(), encoding="utf-8")
    sys.stdout.write(format_table(table.rows))
    report = trend_check(table)
    sys.stdout.write(str(report))
    return 0 if report.passed else 1


def _compile_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--profiles", required=True, help="one XPath profile per line")
    p.add_argument("--dict", help="dictionary TSV; omit when profiles already use tag codes")
    p.add_argument("--prefix-share", action="store_true", help="share common profile prefixes")
    p.add_argument("--char-decode", action="store_true", help="use the 256-line character pre-decoder")
    p.add_argument("--stack-depth", type=int, default=64, help="tag stack capacity")


def build_parser() -> tuple[argparse.ArgumentParser, dict]:
    parser = argparse.ArgumentParser(prog="xpathhw", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--config", help="JSON file of option defaults; command-line flags win")
    sub = parser.add_subparsers(dest="command", required=True)
    subs = {}

    p = subs["gen"] = sub.add_parser("gen", help="generate profiles, documents and a dictionary")
    p.add_argument("--out", required=True)
    p.add_argument("--count", type=int, default=16)
    p.add_argument("--length", type=int, default=2)
    p.add_argument("--axis-mix", type=float, default=0.5)
    p.add_argument("--shared-prefix-rate", type=float, default=DEFAULT_SHARED_PREFIX_RATE)
    p.add_argument("--floating-rate", type=float, default=0.0)
    p.add_argument("--noise", type=float, default=DEFAULT_NOISE)
    p.add_argument("--tags", type=int, default=DEFAULT_TAGS)
    p.add_argument("--fanout", type=int, default=DEFAULT_FANOUT)
    p.add_argument("--roots", type=int, default=DEFAULT_ROOTS)
    p.add_argument("--docs", type=int, default=4)
    p.add_argument("--doc-size", type=int, default=4096)
    p.add_argument("--max-depth", type=int, default=10)
    p.add_argument("--seed", type=int, default=1)
    p.set_defaults(func=cmd_gen)

    p = subs["compile"] = sub.add_parser("compile", help="profiles -> IR, forest, netlist, area report")
    _compile_flags(p)
    p.add_argument("--out", help="directory for ir.txt, forest.txt, netlist.vhd, area.json")
    p.set_defaults(func=cmd_compile)

    p = subs["run"] = sub.add_parser("run", help="simulate the datapath over documents")
    _compile_flags(p)
    p.add_argument("--out", help="match CSV (default: stdout)")
    p.add_argument("--encode", action="store_true", help="documents use original tag names")
    p.add_argument("docs", nargs="+")
    p.set_defaults(func=cmd_run)

    p = subs["oracle"] = sub.add_parser("oracle", help="reference matches by tree search")
    p.add_argument("--profiles", required=True)
    p.add_argument("--dict")
    p.add_argument("--out")
    p.add_argument("--encode", action="store_true")
    p.add_argument("docs", nargs="+")
    p.set_defaults(func=cmd_oracle)

    p = subs["diff"] = sub.add_parser("diff", help="compare two match CSV files")
    p.add_argument("left")
    p.add_argument("right")
    p.set_defaults(func=cmd_diff)

    p = subs["bench"] = sub.add_parser("bench", help="area/throughput grid and trend report")
    p.add_argument("--counts", type=_int_list, default=[16, 64, 256, 1024])
    p.add_argument("--lengths", type=_int_list, default=[2, 4, 6])
    p.add_argument("--axis-mix", type=float, default=0.5)
    p.add_argument("--shared-prefix-rate", type=float, default=DEFAULT_SHARED_PREFIX_RATE)
    p.add_argument("--tags", type=int, default=DEFAULT_TAGS)
    p.add_argument("--docs", type=int, default=2)
    p.add_argument("--doc-size", type=int, default=4096)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="table CSV")
    p.set_defaults(func=cmd_bench)
    return parser, subs


def main(argv: list[str] | None = None) -> int:
    parser, subs = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            defaults = json.load(fh)
        subs[args.command].set_defaults(**{k.replace("-", "_"): v for k, v in defaults.items()})
        args = parser.parse_args(argv)
    try:
        return args.func(args)
    except XPathHwError as exc:
        print(f"error: {exc.kind}: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
