"""graphion command line interface.

Exit codes: 0 success, 2 a size guard was exceeded, 3 a reproduced identity
did not match its published form.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional

from . import __version__
from .graph import GuardExceeded, load_graph, path_width, vertex_width
from .poly import MPoly, to_str

EXIT_OK = 0
EXIT_GUARD = 2
EXIT_MISMATCH = 3
EXIT_INPUT = 4


@dataclass
class RunManifest:
    subcommand: str
    inputs: Dict[str, object]
    guards: Dict[str, int]
    seed: Optional[int]
    version: str = __version__
    started: float = field(default_factory=time.time)


class Mismatch(Exception):
    pass


def _labels(text: Optional[str]) -> List[str]:
    if not text:
        return []
    return [t for t in text.replace(" ", "").split(",") if t]


class Output:
    def __init__(self, args, manifest: RunManifest):
        self.json = args.json
        self.manifest = manifest
        self.records: Dict[str, object] = {}

    def emit(self, key: str, value) -> None:
        if isinstance(value, MPoly):
            value = to_str(value)
        self.records[key] = value
        if not self.json:
            print(f"{key}: {value}" if key else value)

    def finish(self) -> None:
        if self.json:
            print(json.dumps({"manifest": asdict(self.manifest), "result": self.records}, indent=2, default=str))
        else:
            m = self.manifest
            print(f"# graphion {m.version} {m.subcommand} guards={m.guards} seed={m.seed}")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_poly(args, out: Output) -> int:
    from .graphpoly import dodgson, five_invariant, forest_poly, kirchhoff, partition, spec

    g = load_graph(args.graph)
    if args.what == "kirchhoff":
        out.emit("kirchhoff", kirchhoff(g))
    elif args.what == "dodgson":
        out.emit("dodgson", dodgson(g, spec(_labels(args.I), _labels(args.J), _labels(args.K))))
    elif args.what == "forest":
        parts = [p.split(",") for p in args.parts.split("|")]
        conv = type(g.vertices[0])
        out.emit("forest", forest_poly(g, partition(*[[conv(v) for v in p] for p in parts])))
    elif args.what == "five":
        if len(args.edges) != 5:
            raise SystemExit("five needs exactly five edge labels")
        out.emit("five_invariant", five_invariant(g, *args.edges))
    elif args.what == "width":
        vw, order = vertex_width(g, guard=args.guard_vw)
        pw, vorder = path_width(g, guard=args.guard_pw)
        out.emit("vertex_width", vw)
        out.emit("vertex_width_order", ",".join(order))
        out.emit("path_width", pw)
        out.emit("path_width_order", ",".join(map(str, vorder)))
    return EXIT_OK


def cmd_reduce(args, out: Output) -> int:
    from .denred import colour_count, reduce_sequence, suggest_order

    g = load_graph(args.graph)
    if args.auto:
        sug = suggest_order(g)
        states = sug.states
        for label, tag in zip(sug.order, sug.tags):
            out.emit(f"edge {label}", tag)
    else:
        states = reduce_sequence(g, _labels(args.order))
    for st in states:
        out.emit(f"D^{st.j}", st.poly)
    last = states[-1]
    out.emit("status", last.status)
    out.emit("colours", colour_count(last))
    return EXIT_OK


def cmd_cov(args, out: Output) -> int:
    from .denred import CovError, CovPartition, change_of_variables, reduce_sequence

    g = load_graph(args.graph)
    g1 = _labels(args.g1)
    order = _labels(args.order) or g1
    states = reduce_sequence(g, order)
    last = states[-1]
    part = CovPartition.build(g, g1, _labels(args.g2), _labels(args.g3))
    try:
        res = change_of_variables(last, part)
    except CovError as exc:
        if exc.terms:
            out.emit("inequality", " ".join(f"{n}={v}" for n, v in exc.terms))
        out.emit("error", str(exc))
        return EXIT_MISMATCH
    out.emit("Q", res.Q)
    out.emit("inequality", res.render_terms())
    out.emit("R", res.R)
    for l in sorted(part.g2 | part.g3, key=str):
        out.emit(f"deg_{g.var(l)}(R)", res.R.degree_in(g.var(l)))
    return EXIT_OK


def cmd_c2(args, out: Output) -> int:
    from .pointcount import c2_from_denominator, c2_from_psi

    g = load_graph(args.graph)
    qs = [int(q) for q in _labels(args.q)]
    for q in qs:
        if args.method == "psi":
            c2, res = c2_from_psi(g, q)
            out.emit(f"q={q}", f"c2={c2} (method=psi, n={res.n}, count={res.count})")
        else:
            order = _labels(args.order)
            c2, res = c2_from_denominator(g, order, q)
            out.emit(f"q={q}", f"c2={c2} (method=denred, n={len(order)}, count={res.count})")
    return EXIT_OK


def cmd_chord(args, out: Output) -> int:
    from .chord import ChordDiagram, generate_connected, green_expansion, intersection_order, stats

    if args.what == "list":
        diagrams = generate_connected(int(args.arg) if args.arg else args.order, guard=args.guard_chord)
        out.emit("count", len(diagrams))
        out.emit("diagrams", [str(C) for C in diagrams])
    elif args.what == "stats":
        C = ChordDiagram.parse(args.arg)
        st = stats(C)
        out.emit("diagram", str(C))
        out.emit("intersection_order", "".join(f"({a},{b})" for a, b in intersection_order(C)))
        out.emit("terminals", list(st.terminals))
        out.emit("b", st.b)
        out.emit("delta", list(st.delta))
    elif args.what == "green":
        out.emit("G", green_expansion(args.order, guard=args.guard_chord))
    return EXIT_OK


def cmd_dse(args, out: Output) -> int:
    from .dse import MellinInput, reduce_to_geometric, solve

    mellin = MellinInput.symbolic(args.order)
    if args.what == "solve":
        G = solve(args.s, mellin, args.order)
        for n in range(1, args.order + 1):
            out.emit(f"gamma_{n}", G.gamma(n))
    else:
        r = reduce_to_geometric(args.s, mellin, args.g, args.order)
        for i, ri in enumerate(r, 1):
            out.emit(f"r_{i}", ri)
    return EXIT_OK


def cmd_tree(args, out: Output) -> int:
    from .hopftree import by_order, solve_combinatorial

    X = solve_combinatorial(args.s, args.order)
    for n, terms in sorted(by_order(X).items()):
        out.emit(f"x^{n}", " + ".join(f"{c}*{t}" for t, c in sorted(terms.items())))
    return EXIT_OK


def cmd_reproduce(args, out: Output) -> int:
    from . import reproduce

    ok = reproduce.run(args.target, out.emit)
    return EXIT_OK if ok else EXIT_MISMATCH


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="graphion", description="Graph polynomials, denominator reduction, "
                                "c2 point counts, chord diagrams and Dyson-Schwinger series.")
    p.add_argument("--version", action="version", version=f"graphion {__version__}")
    p.add_argument("--json", action="store_true", help="emit JSON with a run manifest")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--guard-vw", type=int, default=14, help="max edges for vertex width")
    p.add_argument("--guard-pw", type=int, default=10, help="max vertices for path width")
    p.add_argument("--guard-chord", type=int, default=8, help="max chords")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("poly", help="graph polynomials")
    sp.add_argument("what", choices=["kirchhoff", "dodgson", "forest", "five", "width"])
    sp.add_argument("graph")
    sp.add_argument("edges", nargs="*")
    sp.add_argument("--I", default="")
    sp.add_argument("--J", default="")
    sp.add_argument("--K", default="")
    sp.add_argument("--parts", default="")
    sp.set_defaults(func=cmd_poly)

    sp = sub.add_parser("reduce", help="denominator reduction")
    sp.add_argument("graph")
    sp.add_argument("--order", default="")
    sp.add_argument("--auto", action="store_true")
    sp.set_defaults(func=cmd_reduce)

    sp = sub.add_parser("cov", help="change of variables after reducing G1")
    sp.add_argument("graph")
    sp.add_argument("--g1", required=True)
    sp.add_argument("--g2", required=True)
    sp.add_argument("--g3", required=True)
    sp.add_argument("--order", default="", help="reduction order of G1 (default: as listed)")
    sp.set_defaults(func=cmd_cov)

    sp = sub.add_parser("c2", help="c2 invariant")
    sp.add_argument("graph")
    sp.add_argument("--q", default="2,3,5")
    sp.add_argument("--method", choices=["psi", "denred"], default="psi")
    sp.add_argument("--order", default="")
    sp.set_defaults(func=cmd_c2)

    sp = sub.add_parser("chord", help="rooted connected chord diagrams")
    sp.add_argument("what", choices=["list", "stats", "green"])
    sp.add_argument("arg", nargs="?", default="")
    sp.add_argument("--order", type=int, default=4)
    sp.set_defaults(func=cmd_chord)

    sp = sub.add_parser("dse", help="analytic Dyson-Schwinger equations")
    sp.add_argument("what", choices=["solve", "geometric"])
    sp.add_argument("--s", type=int, default=-2)
    sp.add_argument("--order", type=int, default=5)
    sp.add_argument("--g", default="1/(rho(1-rho))")
    sp.set_defaults(func=cmd_dse)

    sp = sub.add_parser("tree", help="combinatorial Dyson-Schwinger equations in rooted trees")
    sp.add_argument("what", choices=["solve"])
    sp.add_argument("--s", type=int, default=-2)
    sp.add_argument("--order", type=int, default=4)
    sp.set_defaults(func=cmd_tree)

    sp = sub.add_parser("reproduce", help="recompute a published example and compare")
    from .reproduce import TARGETS

    sp.add_argument("target", choices=sorted(TARGETS))
    sp.set_defaults(func=cmd_reproduce)
    return p


def run(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    inputs = {k: v for k, v in vars(args).items() if k not in ("func",)}
    manifest = RunManifest(args.command, inputs,
                           {"vw": args.guard_vw, "pw": args.guard_pw, "chord": args.guard_chord}, args.seed)
    out = Output(args, manifest)
    try:
        code = args.func(args, out)
    except GuardExceeded as exc:
        out.emit("error", f"guard exceeded: {exc}")
        code = EXIT_GUARD
    except ValueError as exc:
        if "guard" in str(exc):
            out.emit("error", f"guard exceeded: {exc}")
            code = EXIT_GUARD
        else:
            out.emit("error", str(exc))
            code = EXIT_INPUT
    except OSError as exc:
        out.emit("error", str(exc))
        code = EXIT_INPUT
    out.finish()
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
