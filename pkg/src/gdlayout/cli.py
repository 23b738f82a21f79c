"""Command-line entry points: generate, layout, eval, serve.

Exit codes: 0 success, 2 invalid configuration/input, 3 aborted on a
non-finite loss or gradient.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import ConfigError, RunConfig, load_layout_json, save_layout_json
from .criteria import KINDS
from .graphs import GENERATORS, GraphFormatError, load_edge_list, load_matrix_market, save_edge_list
from .optimizer import init_layout, run_layout
from .svg import render_svg

EXIT_BADCONFIG = 2
EXIT_NUMERIC = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gdlayout",
        description="Multicriteria graph layout by stochastic gradient descent.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("generate", help="write a generated graph as an edge list")
    p_gen.add_argument("kind", help=f"one of: {', '.join(sorted(GENERATORS))}")
    p_gen.add_argument("args", nargs="*", type=int, help="generator arguments")
    p_gen.add_argument("-o", "--output", help="output path (default: stdout)")

    p_lay = sub.add_parser("layout", help="optimize a layout from a YAML config")
    p_lay.add_argument("config", help="path to the run configuration")
    p_lay.add_argument("--seed", type=int, help="override the config seed")
    p_lay.add_argument("--maxiter", type=int, help="override optimizer.maxiter")

    p_eval = sub.add_parser("eval", help="evaluate a layout against a graph")
    p_eval.add_argument("graph", help="edge-list or .mtx graph file")
    p_eval.add_argument("layout", help="layout JSON file")
    p_eval.add_argument("--method", default="layout", help="method label for the CSV row")
    p_eval.add_argument("--header", action="store_true", help="print the CSV header too")

    p_srv = sub.add_parser("serve", help="run the interactive steering service")
    p_srv.add_argument("config", help="path to the run configuration")
    p_srv.add_argument("--host", default="127.0.0.1")
    p_srv.add_argument("--port", type=int, default=8765)
    p_srv.add_argument("--every", type=int, default=1, help="iterations per state frame")
    return parser


def cmd_generate(args) -> int:
    if args.kind not in GENERATORS:
        print(
            f"unknown generator {args.kind!r}; available: {', '.join(sorted(GENERATORS))}",
            file=sys.stderr,
        )
        return EXIT_BADCONFIG
    try:
        g = GENERATORS[args.kind](*args.args)
    except (TypeError, ValueError) as exc:
        print(f"bad generator arguments: {exc}", file=sys.stderr)
        return EXIT_BADCONFIG
    text = save_edge_list(g)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_layout(args) -> int:
    try:
        cfg = RunConfig.from_yaml(Path(args.config).read_text())
    except FileNotFoundError:
        print(f"config not found: {args.config}", file=sys.stderr)
        return EXIT_BADCONFIG
    except ConfigError as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return EXIT_BADCONFIG
    if args.seed is not None:
        cfg.seed = args.seed
    if args.maxiter is not None:
        cfg.optimizer["maxiter"] = args.maxiter
    zero_iterations = cfg.optimizer.get("maxiter") == 0
    if zero_iterations:
        cfg.optimizer = dict(cfg.optimizer, maxiter=1)
    try:
        g = cfg.build_graph()
        configs = cfg.build_criteria()
        opt = cfg.build_optimizer()
    except (ConfigError, GraphFormatError, ValueError) as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return EXIT_BADCONFIG
    init = init_layout(g.n, cfg.seed)
    if zero_iterations:
        layout, trace = init, None
    else:
        try:
            layout, trace = run_layout(g, configs, opt, init)
        except RuntimeError as exc:
            print(f"aborted: {exc}", file=sys.stderr)
            return EXIT_NUMERIC
    out = cfg.output
    layout_path = out.get("layout", "layout.json")
    Path(layout_path).parent.mkdir(parents=True, exist_ok=True)
    Path(layout_path).write_text(save_layout_json(layout, g.name, cfg.seed))
    if out.get("svg"):
        Path(out["svg"]).parent.mkdir(parents=True, exist_ok=True)
        Path(out["svg"]).write_text(render_svg(g, layout))
    if trace is not None and out.get("trace_csv"):
        Path(out["trace_csv"]).parent.mkdir(parents=True, exist_ok=True)
        Path(out["trace_csv"]).write_text(trace.to_csv())
    if trace is not None and out.get("trace_json"):
        Path(out["trace_json"]).parent.mkdir(parents=True, exist_ok=True)
        Path(out["trace_json"]).write_text(trace.to_json())
    iterations = trace.iterations[-1] if trace and trace.iterations else 0
    print(f"wrote {layout_path} after {iterations} iterations")
    return 0


def _load_graph_file(path: str):
    p = Path(path)
    text = p.read_text()
    if p.suffix in (".mtx", ".mm"):
        return load_matrix_market(text, name=p.stem)
    return load_edge_list(text, name=p.stem)


def cmd_eval(args) -> int:
    from .quality import CSV_HEADER, csv_row, evaluate_all

    try:
        g = _load_graph_file(args.graph)
    except (FileNotFoundError, GraphFormatError) as exc:
        print(f"bad graph file: {exc}", file=sys.stderr)
        return EXIT_BADCONFIG
    try:
        layout, name, _seed = load_layout_json(Path(args.layout).read_text())
    except (FileNotFoundError, ConfigError, ValueError) as exc:
        print(f"bad layout file: {exc}", file=sys.stderr)
        return EXIT_BADCONFIG
    if layout.shape[0] != g.n:
        print(
            f"layout has {layout.shape[0]} nodes but graph has {g.n}", file=sys.stderr
        )
        return EXIT_BADCONFIG
    report = evaluate_all(g, layout)
    if args.header:
        print(CSV_HEADER)
    print(csv_row(args.method, g.name, report))
    return 0


def cmd_serve(args) -> int:
    from .service import serve

    try:
        cfg = RunConfig.from_yaml(Path(args.config).read_text())
    except FileNotFoundError:
        print(f"config not found: {args.config}", file=sys.stderr)
        return EXIT_BADCONFIG
    except ConfigError as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return EXIT_BADCONFIG
    print(f"steering service on ws://{args.host}:{args.port}")
    serve(cfg, host=args.host, port=args.port, every_k=args.every)
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command == "generate":
        return cmd_generate(args)
    if args.command == "layout":
        return cmd_layout(args)
    if args.command == "eval":
        return cmd_eval(args)
    if args.command == "serve":
        return cmd_serve(args)
    parser.error("unknown command")
    return EXIT_BADCONFIG


if __name__ == "__main__":
    sys.exit(main())
