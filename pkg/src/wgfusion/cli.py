"""Command-line front end: build states, run fusions and scans, verify formulas.

Exit codes: 0 ok, 1 verification failure, 2 input validation, 3 numerical abort.
All angles are radians; JSON for structured reports, CSV for scans.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .analysis import entanglement_report, inner_z, solve_xi_for_weight
from .errors import (
    ConvergenceFailureError,
    InputError,
    NumericalAbortError,
    WgfError,
)
from .fock import ModeUnitary
from .graphstate import WeightedGraph, build_state, project_qubit, wrap_angle
from .protocols import (
    ChainState,
    create_logical_qubit,
    fuse_generalized,
    fuse_type_i,
    fuse_type_ii,
    ghz_pair_projection,
    ghz_pair_range,
    rez_formula,
    sample_outcomes,
)
from .verify import run_all

INV_SQRT2 = 1.0 / math.sqrt(2.0)


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("WGS_THREADS", "1")))
    except ValueError:
        return 1


def _load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _load_graph(path: str) -> WeightedGraph:
    data = _load_json(path)
    try:
        vertices = tuple(str(v) for v in data["vertices"])
        edges = []
        for e in data["edges"]:
            chi = float(e["chi"])
            if not (-math.pi < chi <= math.pi):
                print(
                    f"warning: weight {chi} outside (-pi, pi], normalized to {wrap_angle(chi)}",
                    file=sys.stderr,
                )
            edges.append((str(e["a"]), str(e["b"]), wrap_angle(chi)))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed graph file {path}: {exc}") from exc
    return WeightedGraph(vertices, tuple(edges))


def _load_unitary(path: str) -> ModeUnitary:
    return ModeUnitary.from_json(json.dumps(_load_json(path)))


def _emit(payload, out: str | None):
    text = json.dumps(payload, indent=2, sort_keys=True)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def cmd_build(args) -> int:
    graph = _load_graph(args.graph)
    state = build_state(graph)
    payload = {
        "vertices": list(graph.vertices),
        "edges": [{"a": a, "b": b, "chi": chi} for a, b, chi in graph.edges],
        "num_qubits": graph.n,
        "norm": float(np.linalg.norm(state.amplitudes)),
    }
    if args.dump_amplitudes:
        payload["amplitudes_re"] = [float(x.real) for x in state.amplitudes]
        payload["amplitudes_im"] = [float(x.imag) for x in state.amplitudes]
    _emit(payload, args.out)
    return 0


def _logical_left(graph: WeightedGraph, vertex: str) -> ChainState:
    chain = ChainState(graph, build_state(graph))
    outs = create_logical_qubit(chain, vertex)
    succ = [o for o in outs if o.label.startswith("success")]
    return succ[0].post_states[0]


def cmd_fuse(args) -> int:
    if args.fusion_type == "i":
        for name in ("graph2", "end_a", "end_b"):
            if getattr(args, name) is None:
                raise InputError(f"fuse --type i requires --{name.replace('_', '-')}")
        left = ChainState(_load_graph(args.graph), build_state(_load_graph(args.graph)))
        right = ChainState(_load_graph(args.graph2), build_state(_load_graph(args.graph2)))
        outcomes = fuse_type_i(left, args.end_a, right, args.end_b)
        payload = {"type": "i", "outcomes": [o.as_dict() for o in outcomes]}
    elif args.fusion_type in ("ii", "gen"):
        for name in ("graph2", "logical", "b"):
            if getattr(args, name) is None:
                raise InputError(f"fuse --type {args.fusion_type} requires --{name}")
        left = _logical_left(_load_graph(args.graph), args.logical)
        pair = next(iter(left.logical_pairs))
        rg = _load_graph(args.graph2)
        right = ChainState(rg, build_state(rg))
        if args.fusion_type == "ii":
            outcomes = fuse_type_ii(left, tuple(pair), right, args.b, consume=args.consume)
            payload = {"type": "ii", "outcomes": [o.as_dict() for o in outcomes]}
        else:
            if args.unitary is None:
                raise InputError("fuse --type gen requires --unitary")
            u = _load_unitary(args.unitary)
            ctx, fouts = fuse_generalized(left, tuple(pair), right, args.b, u, consume=args.consume)
            payload = {
                "type": "gen",
                "z": {"re": ctx.z.real, "im": ctx.z.imag},
                "outcomes": [
                    {
                        "pattern": list(o.pattern),
                        "probability": o.probability,
                        "kind": o.kind,
                    }
                    for o in fouts
                ],
            }
            outcomes = fouts
    else:  # pragma: no cover - argparse restricts choices
        raise InputError(f"unknown fusion type {args.fusion_type}")
    if args.sample:
        if args.seed is None:
            raise InputError("--sample requires --seed")
        labels = sample_outcomes(outcomes, args.sample, args.seed)
        counts: dict[str, int] = {}
        for lab in labels:
            counts[lab] = counts.get(lab, 0) + 1
        payload["samples"] = counts
    _emit(payload, args.out)
    return 0


def _scan_rows(quantity: str, points: int, seed: int) -> tuple[list[str], list[list]]:
    grid = [(k + 0.5) * math.pi / points for k in range(points)]  # (0, pi)

    if quantity == "logical-prob":
        header = ["chi", "analytic", "simulated", "residual"]

        def row(chi: float) -> list:
            from .protocols import make_chain

            outs = create_logical_qubit(
                make_chain(["a", "b", "c", "d"], [1.0, chi, chi]), "c"
            )
            sim = sum(o.probability for o in outs if o.label.startswith("success"))
            ana = (1.0 - math.cos(chi)) / 4.0
            return [chi, ana, sim, abs(ana - sim)]

    elif quantity == "failure-split":
        header = ["chi", "analytic_minus", "sim_minus", "analytic_plus", "sim_plus", "residual"]
        from .protocols import make_chain

        lout = create_logical_qubit(make_chain(list("ABCD"), [math.pi] * 3), "C")
        left = [o for o in lout if o.label.startswith("success")][0].post_states[0]

        def row(chi: float) -> list:
            right = make_chain(["v", "b", "w"], [chi, wrap_angle(-chi)])
            outs = {o.label: o for o in fuse_type_ii(left, ("B", "D"), right, "b", consume="D")}
            rez = rez_formula(chi, wrap_angle(-chi))
            am, ap = (1.0 - rez) / 4.0, (1.0 + rez) / 4.0
            sm = outs["failure_b_minus"].probability
            sp = outs["failure_b_plus"].probability
            return [chi, am, sm, ap, sp, max(abs(am - sm), abs(ap - sp))]

    elif quantity == "det-entropy":
        header = ["chi_bf", "det_rho_analytic", "det_rho_oracle", "residual"]
        rng = np.random.default_rng(seed)
        mats = [rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)) for _ in grid]

        def row(chi: float) -> list:
            m = mats[grid.index(chi)]
            z = inner_z(chi)
            rep = entanglement_report(m, z)
            nsq = rep.probability * 4.0
            mp = (m / math.sqrt(nsq)) @ np.array(
                [[1.0, 0.0], [np.conj(z), math.sqrt(1.0 - abs(z) ** 2)]]
            )
            ev = np.linalg.eigvalsh(mp @ mp.conj().T)
            oracle = float(ev[0] * ev[1])
            return [chi, rep.det_rho, oracle, abs(rep.det_rho - oracle)]

    elif quantity == "ghz-range":
        header = ["chi", "analytic_max_phi", "simulated_phi_at_half", "residual"]

        def row(chi: float) -> list:
            ana = ghz_pair_range(chi, chi)
            from .graphstate import chain_graph

            (proj, _), _phi = ghz_pair_projection(chi, chi, INV_SQRT2)
            ghz = build_state(chain_graph(["a", "b", "c"], [chi, chi]))
            st, _p = project_qubit(ghz, proj)
            det = abs(np.linalg.det(st.amplitudes.reshape(2, 2)))
            sim = math.acos(max(-1.0, min(1.0, 1.0 - 8.0 * det * det)))
            return [chi, ana, sim, abs(ana - sim)]

    elif quantity == "xi-solve":
        header = ["chi_bf", "chi_target", "xi", "residual"]

        def row(chi: float) -> list:
            chi_target = wrap_angle(2.0 * chi - math.pi / 3.0)
            xi = solve_xi_for_weight(chi, chi_target)
            w = xi * np.exp(1j * chi / 2.0)
            res = abs(wrap_angle(2.0 * float(np.angle(2.0 + w + 1.0 / w)) - chi_target))
            return [chi, chi_target, xi, res]

    else:
        raise InputError(f"unknown scan quantity {quantity}")

    workers = _threads()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(row, grid))
    else:
        rows = [row(chi) for chi in grid]
    return header, rows


def cmd_scan(args) -> int:
    header, rows = _scan_rows(args.quantity, args.points, args.seed or 0)
    out = args.out or "-"
    fh = sys.stdout if out == "-" else open(out, "w", newline="")
    try:
        writer = csv.writer(fh)
        writer.writerow(header)
        for r in rows:
            writer.writerow([f"{v:.12g}" if isinstance(v, float) else v for v in r])
    finally:
        if fh is not sys.stdout:
            fh.close()
    return 0


def cmd_verify(args) -> int:
    results = run_all(quick=args.quick)
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status}  {r.name:26s} residual={r.max_residual:.3e}  {r.seconds:6.2f}s  {r.detail}")
    if args.out:
        _emit([r.as_dict() for r in results], args.out)
    return 0 if all(r.passed for r in results) else 1


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wgfusion",
        description="Weighted graph states, fusion protocols, and formula verification.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_build = sub.add_parser("build", help="build a weighted graph state")
    p_build.add_argument("--graph", required=True, help="graph JSON path")
    p_build.add_argument("--out", default=None)
    p_build.add_argument("--dump-amplitudes", action="store_true")
    p_build.set_defaults(fn=cmd_build)

    p_fuse = sub.add_parser("fuse", help="run a fusion protocol")
    p_fuse.add_argument("--type", dest="fusion_type", required=True, choices=["i", "ii", "gen"])
    p_fuse.add_argument("--graph", required=True, help="left chain JSON")
    p_fuse.add_argument("--graph2", default=None, help="right chain JSON")
    p_fuse.add_argument("--end-a", default=None, help="left endpoint (type i)")
    p_fuse.add_argument("--end-b", default=None, help="right endpoint (type i)")
    p_fuse.add_argument("--logical", default=None, help="interior vertex for the logical pair (ii/gen)")
    p_fuse.add_argument("--b", default=None, help="right-chain fused vertex (ii/gen)")
    p_fuse.add_argument("--consume", default=None, help="pair member sent into the network")
    p_fuse.add_argument("--unitary", default=None, help="mode unitary JSON (gen)")
    p_fuse.add_argument("--sample", type=int, default=None, help="draw N outcomes")
    p_fuse.add_argument("--seed", type=int, default=None)
    p_fuse.add_argument("--out", default=None)
    p_fuse.set_defaults(fn=cmd_fuse)

    p_scan = sub.add_parser("scan", help="formula scans to CSV")
    p_scan.add_argument(
        "--quantity",
        required=True,
        choices=["logical-prob", "failure-split", "det-entropy", "ghz-range", "xi-solve"],
    )
    p_scan.add_argument("--points", type=int, default=50)
    p_scan.add_argument("--seed", type=int, default=None)
    p_scan.add_argument("--out", default=None, help="CSV path, default stdout")
    p_scan.set_defaults(fn=cmd_scan)

    p_verify = sub.add_parser("verify", help="run the verification suite")
    p_verify.add_argument("--quick", action="store_true", help="reduced ensembles")
    p_verify.add_argument("--out", default=None, help="JSON report path")
    p_verify.set_defaults(fn=cmd_verify)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    if getattr(args, "points", 1) is not None and getattr(args, "points", 1) <= 0:
        print("error: --points must be positive", file=sys.stderr)
        return 2
    try:
        return args.fn(args)
    except (NumericalAbortError, ConvergenceFailureError) as exc:
        print(f"numerical abort: {exc}", file=sys.stderr)
        return 3
    except WgfError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
