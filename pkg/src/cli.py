"""Command-line front end.

Exit status: 0 true or success, 1 false, 2 error, 3 bounded and inconclusive.
Reports go to stdout, diagnostics to stderr.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional

import networkx as nx

from src.automata.nfta import to_graph, to_json
from src.automata.tree import Tree, format_label, parse_tree
from src.core.config import create_services, get_config
from src.core.errors import Cpg2kitError
from src.core.logger import logger, set_level
from src.encoding.enc_trees import enc_trees_automaton
from src.npt.translate import simulation_matches, translate_to_cps
from src.presentation.oprel import transition_relation_automaton
from src.presentation.reachable import reachable_configs_automaton
from src.pushdown.explore import exploration_graph, to_dot
from src.pushdown.loader import format_spec
from src.pushdown.stack import format_stack
from src.reachability.dfa import Dfa, load_dfa
from src.services.analysis_service import AnalysisService

EXIT_TRUE = 0
EXIT_FALSE = 1
EXIT_ERROR = 2
EXIT_INCONCLUSIVE = 3


def _print_json(data: Any) -> None:
    print(json.dumps(data, ensure_ascii=False, indent=2))


def _write_dot(path: Optional[str], graph: nx.MultiDiGraph) -> None:
    if path:
        Path(path).write_text(to_dot(graph), encoding="utf-8")
        logger.info(f"Wrote DOT to {path}")


def tree_graph(t: Tree) -> nx.MultiDiGraph:
    g = nx.MultiDiGraph()
    for d, x in t.items:
        g.add_node(d or ".", label=format_label(x))
        if d:
            g.add_edge(d[:-1] or ".", d, label=d[-1])
    return g


def _languages(pairs: Iterable[str]) -> Dict[str, Dfa]:
    languages = {}
    for pair in pairs:
        name, sep, path = pair.partition("=")
        if not sep:
            raise ValueError(f"expected NAME=FILE, got {pair!r}")
        languages[name] = load_dfa(path)
    return languages


# -- subcommands ------------------------------------------------------------------


def explore(service: AnalysisService, args: argparse.Namespace) -> int:
    result = service.explore(args.spec, args.steps)
    if args.json:
        _print_json(
            {
                "configurations": service.configurations(result),
                "edges": [[str(c), str(label), str(d)] for c, label, d in result.edges],
            }
        )
    else:
        for c in result.configs:
            print(f"{result.depth[c]}\t{c}")
    _write_dot(args.dot, exploration_graph(result))
    return EXIT_TRUE


def encode_cmd(service: AnalysisService, args: argparse.Namespace) -> int:
    t = service.encode(args.spec, args.state, args.stack)
    sys.stdout.write(service.render_tree(t))
    _write_dot(args.dot, tree_graph(t))
    return EXIT_TRUE


def decode_cmd(service: AnalysisService, args: argparse.Namespace) -> int:
    t = parse_tree(Path(args.tree).read_text(encoding="utf-8"))
    c = service.decode(t, args.spec)
    if args.json:
        _print_json({"state": str(c.state), "stack": format_stack(c.stack)})
    else:
        print(c)
    return EXIT_TRUE


def milestones_cmd(service: AnalysisService, args: argparse.Namespace) -> int:
    nodes = service.milestones(args.spec, args.state, args.stack)
    if args.json:
        _print_json(nodes)
    else:
        for d, s in nodes.items():
            print(f"{d}\t{s}")
    return EXIT_TRUE


def _report_counts(service: AnalysisService, args: argparse.Namespace, counts) -> int:
    exact = service.exact(args.spec, args.threshold)
    if args.json:
        _print_json(dict(counts.to_json(), exact=exact))
    elif args.table:
        print(counts.to_frame().to_string())
    else:
        source = args.source
        if args.to is not None:
            total = counts(source, args.to)
        else:
            total = sum(counts(source, q) for q in counts.successors(source))
        print(total)
    if not exact:
        logger.warning("Counts are lower bounds: the simulator horizon was reached")
    return EXIT_TRUE


def returns_cmd(service: AnalysisService, args: argparse.Namespace) -> int:
    counts = service.count_returns(args.spec, args.stack, args.threshold)
    return _report_counts(service, args, counts)


def loops_cmd(service: AnalysisService, args: argparse.Namespace) -> int:
    counts = service.count_loops(args.spec, args.stack, args.threshold, args.kind.replace("-", "_"))
    return _report_counts(service, args, counts)


def reach_cmd(service: AnalysisService, args: argparse.Namespace) -> int:
    cps = service.load(args.spec)
    source = service.configuration(cps, args.source, args.stack)
    target = service.configuration(cps, args.to_state, args.to_stack)
    reachable = service.reach(cps, source, target)
    print(str(reachable).lower())
    return EXIT_TRUE if reachable else EXIT_FALSE


def check_cmd(service: AnalysisService, args: argparse.Namespace) -> int:
    verdict = service.check(args.spec, args.formula, args.bound, _languages(args.dfa))
    if args.json:
        _print_json(verdict.to_json())
    else:
        print(verdict)
    if not verdict.conclusive:
        return EXIT_INCONCLUSIVE
    return EXIT_TRUE if verdict.value else EXIT_FALSE


def npt_check_cmd(service: AnalysisService, args: argparse.Namespace) -> int:
    result = service.npt_check(args.spec, args.formula, args.bound)
    if args.json:
        _print_json(result)
    else:
        tag = f"bounded({result['max_length']})" if result["truncated"] else "exact"
        print(f"{str(result['value']).lower()} [{tag}] |N|={result['size']}")
    if result["truncated"] and not result["value"]:
        return EXIT_INCONCLUSIVE
    return EXIT_TRUE if result["value"] else EXIT_FALSE


def translate_npt(service: AnalysisService, args: argparse.Namespace) -> int:
    pds = service.load(args.spec)
    cim = translate_to_cps(pds)
    text = format_spec(cim)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    if args.verify is not None:
        matches = simulation_matches(pds, args.verify)
        print(f"simulation matches up to {args.verify} steps: {str(matches).lower()}", file=sys.stderr)
        return EXIT_TRUE if matches else EXIT_FALSE
    return EXIT_TRUE


def dump_automaton(service: AnalysisService, args: argparse.Namespace) -> int:
    cps = service.load(args.spec)
    if args.what == "counter":
        automaton = service.automaton(cps, args.threshold).saturate()
        _print_json(automaton.to_json())
        return EXIT_TRUE
    if args.what == "enc-trees":
        a = enc_trees_automaton(cps)
    elif args.what == "reachable":
        a = reachable_configs_automaton(cps, service.automaton(cps, 1))
    else:
        if args.label is None:
            raise ValueError("dump-automaton transition needs --label")
        a = transition_relation_automaton(cps, args.label)
    if args.json or not args.dot:
        _print_json(to_json(a))
    _write_dot(args.dot, to_graph(a))
    return EXIT_TRUE


# -- parser -----------------------------------------------------------------------


def _add_configuration(s: argparse.ArgumentParser, required: bool = False) -> None:
    s.add_argument("--from", dest="source", required=required, help="control state")
    s.add_argument("--stack", required=required, help="stack, e.g. '[⊥ a]:[⊥ (b,2,1)]'")


def build_parser() -> argparse.ArgumentParser:
    config = get_config()
    parser = argparse.ArgumentParser(prog="cpg2kit", description="Analyses of level-2 collapsible pushdown systems.")
    parser.add_argument("--log-level", default=config["log_level"], help="logging level on stderr")
    subparsers = parser.add_subparsers(dest="command", required=True)

    s = subparsers.add_parser("explore", help="Configurations reachable within a number of steps")
    s.set_defaults(main=explore)
    s.add_argument("spec")
    s.add_argument("--steps", type=int, default=4)
    s.add_argument("--dot", help="write the exploration graph as DOT")
    s.add_argument("--json", action="store_true")

    s = subparsers.add_parser("encode", help="Encode a configuration as a binary tree")
    s.set_defaults(main=encode_cmd)
    s.add_argument("spec")
    s.add_argument("--state")
    s.add_argument("--stack")
    s.add_argument("--dot", help="write the tree as DOT")

    s = subparsers.add_parser("decode", help="Decode a tree file into a configuration")
    s.set_defaults(main=decode_cmd)
    s.add_argument("tree")
    s.add_argument("--spec", help="system whose states the root label must belong to")
    s.add_argument("--json", action="store_true")

    s = subparsers.add_parser("milestones", help="Milestones of a stack with their encoding nodes")
    s.set_defaults(main=milestones_cmd)
    s.add_argument("--spec")
    s.add_argument("--state")
    s.add_argument("--stack", required=True)
    s.add_argument("--json", action="store_true")

    for name, func in (("returns", returns_cmd), ("loops", loops_cmd)):
        s = subparsers.add_parser(name, help=f"Count {name} from a configuration up to a threshold")
        s.set_defaults(main=func)
        s.add_argument("spec")
        _add_configuration(s, required=True)
        s.add_argument("--to", help="count only runs ending in this state")
        s.add_argument("--threshold", type=int, default=config["default_threshold"])
        s.add_argument("--table", action="store_true", help="print the whole count table")
        s.add_argument("--json", action="store_true")
        if name == "loops":
            s.add_argument("--kind", choices=["loop", "high-loop", "low-loop"], default="loop")

    s = subparsers.add_parser("reach", help="Decide whether one configuration reaches another")
    s.set_defaults(main=reach_cmd)
    s.add_argument("spec")
    _add_configuration(s, required=True)
    s.add_argument("--to-state", required=True)
    s.add_argument("--to-stack", required=True)

    s = subparsers.add_parser("check", help="Decide a first-order sentence on the configuration graph")
    s.set_defaults(main=check_cmd)
    s.add_argument("spec")
    s.add_argument("formula")
    s.add_argument("--bound", type=int, help="encoding depth of the universe for reachability atoms")
    s.add_argument("--dfa", action="append", default=[], metavar="NAME=FILE", help="language for reachL atoms")
    s.add_argument("--json", action="store_true")

    s = subparsers.add_parser("npt-check", help="Decide a sentence on the nested pushdown tree of a level-1 system")
    s.set_defaults(main=npt_check_cmd)
    s.add_argument("spec")
    s.add_argument("formula")
    s.add_argument("--bound", type=int, default=config["npt_max_length"], help="longest run enumerated")
    s.add_argument("--json", action="store_true")

    s = subparsers.add_parser("translate-npt", help="Level-2 system simulating a nested pushdown tree")
    s.set_defaults(main=translate_npt)
    s.add_argument("spec")
    s.add_argument("-o", "--output")
    s.add_argument("--verify", type=int, metavar="STEPS", help="compare the CLONE graph with the tree")

    s = subparsers.add_parser("dump-automaton", help="Print one of the automata built for a system")
    s.set_defaults(main=dump_automaton)
    s.add_argument("spec")
    s.add_argument("what", choices=["enc-trees", "reachable", "transition", "counter"])
    s.add_argument("--label")
    s.add_argument("--threshold", type=int, default=1)
    s.add_argument("--dot")
    s.add_argument("--json", action="store_true")

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    set_level(getattr(logging, str(args.log_level).upper(), logging.WARNING))
    try:
        service = create_services()
        return args.main(service, args)
    except (Cpg2kitError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
    except RuntimeError as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
