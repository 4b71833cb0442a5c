"""Command-line front end.

Exit codes: 0 on success (whatever the verdict), 1 on I/O or validation
failure, 2 when an operator would exceed a size cap.
"""

from __future__ import annotations

import argparse
import csv
import io as _io
import json
import logging
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import detect, io
from .errors import MapnetError, SizeCapError
from .linmaps import LinearMap, builtin_maps, extend_with_identity, pair_product_map
from .observables import moment_exact
from .tensor import DensityMatrix

MAP_CHOICES = "partial_transpose|reduction|realignment|identity|file:PATH"


class CliError(Exception):
    pass


def _common(p: argparse.ArgumentParser, state: bool = True, fmt: tuple[str, ...] = ("json", "text")) -> None:
    if state:
        p.add_argument("--state", metavar="PATH", help="state file (JSON)")
    p.add_argument("--out", metavar="PATH", help="write output here instead of stdout")
    g = p.add_mutually_exclusive_group()
    for f in fmt:
        g.add_argument(f"--{f}", dest="fmt", action="store_const", const=f, help=f"{f} output")
    p.set_defaults(fmt=fmt[0])


def _shots(p: argparse.ArgumentParser) -> None:
    p.add_argument("--shots", type=int, metavar="N", help="simulate N shots per moment (default: exact)")
    p.add_argument("--seed", type=int, default=0, metavar="S", help="base seed for shot simulation")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mapnet", description=(
        "Noiseless single-qubit-readout networks for spectra of Θ(ρ) and entanglement tests."))
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a test state")
    g.add_argument("family", choices=["werner", "isotropic", "bell", "random", "product"])
    g.add_argument("--p", type=float, help="Werner weight of the singlet")
    g.add_argument("--F", type=float, help="isotropic fidelity")
    g.add_argument("--d", type=int, default=2, help="isotropic local dimension")
    g.add_argument("--index", type=int, default=0, help="Bell index: 0=Φ+, 1=Φ-, 2=Ψ+, 3=Ψ-")
    g.add_argument("--dims", type=int, nargs="+", default=[2, 2], help="subsystem dimensions")
    g.add_argument("--seed", type=int, default=0, metavar="S")
    _common(g, state=False, fmt=("json",))

    m = sub.add_parser("moments", help="power sums of Θ(ρ) read out through networks")
    m.add_argument("--map", required=True, metavar=MAP_CHOICES)
    m.add_argument("--k-max", type=int, help="highest moment (default: output dimension)")
    m.add_argument("--include-ua", action="store_true", help="embed U_A in each network export")
    _shots(m)
    _common(m, fmt=("json", "text", "csv"))

    d = sub.add_parser("detect", help="run an entanglement test")
    d.add_argument("--criterion", required=True,
                   choices=["ppt", "reduction", "realignment", "positive_map", "contraction"])
    d.add_argument("--map", metavar="file:PATH", help="map for positive_map/contraction criteria")
    _shots(d)
    _common(d)

    n = sub.add_parser("network", help="export the readout network for one observable")
    n.add_argument("--map", required=True, metavar=MAP_CHOICES)
    n.add_argument("--k", type=int, required=True, help="number of copies")
    n.add_argument("--dims", type=int, nargs="+", help="subsystem dimensions when no --state is given")
    n.add_argument("--include-ua", action="store_true", help="embed U_A in the export")
    _common(n, fmt=("json",))
    return parser


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _load_state(args) -> tuple[DensityMatrix, dict]:
    if not args.state:
        raise CliError("--state is required")
    return io.load_state(args.state)


def _file_map(spec: str) -> LinearMap:
    if not spec.startswith("file:"):
        raise CliError(f"expected file:PATH, got {spec!r}")
    return io.load_map(spec[5:])


def resolve_map(spec: str, dims: tuple[int, ...]) -> tuple[LinearMap, bool]:
    """Θ for a ``--map`` value; the flag says whether Θ acts on two copies of ρ."""
    n = int(np.prod(dims))
    if spec == "identity":
        return builtin_maps("identity", n), False
    if spec in ("partial_transpose", "reduction", "realignment") and len(dims) != 2:
        raise CliError(f"--map {spec} needs a bipartite state, got dims {list(dims)}")
    if spec == "partial_transpose":
        return builtin_maps("partial_transpose", dims), False
    if spec == "reduction":
        return builtin_maps("partial_reduction", dims), False
    if spec == "realignment":
        return pair_product_map(builtin_maps("realignment", dims)), True
    lam = _file_map(spec)
    if lam.src_shape == (n, n):
        return lam, False
    if len(dims) == 2 and lam.src_shape == (dims[1], dims[1]):
        return extend_with_identity(lam, dims[0]), False
    raise CliError(f"map acts on {lam.src_shape} matrices, which fits neither the state nor subsystem B")


def cmd_generate(args) -> str:
    fam = args.family
    if fam == "werner":
        if args.p is None:
            raise CliError("werner needs --p")
        rho, params = detect.werner(args.p), {"p": args.p}
    elif fam == "isotropic":
        if args.F is None:
            raise CliError("isotropic needs --F")
        rho, params = detect.isotropic(args.F, args.d), {"F": args.F, "d": args.d}
    elif fam == "bell":
        rho, params = detect.bell(args.index), {"index": args.index}
    elif fam == "random":
        rho, params = detect.random_state(args.dims, args.seed), {"dims": args.dims}
    else:
        rho, params = detect.random_product_pure(args.dims, args.seed), {"dims": args.dims}
    seed = args.seed if fam in ("random", "product") else None
    return io.dumps(io.state_to_json(rho, label=fam, generator=fam, params=params, seed=seed))


def cmd_moments(args) -> str:
    rho, meta = _load_state(args)
    theta, doubled = resolve_map(args.map, rho.dims)
    mat = np.kron(rho.mat, rho.mat) if doubled else rho.mat
    kmax = args.k_max or theta.dst_rows
    rows = []
    for k in range(1, kmax + 1):
        rec = detect.measure_moment(theta, mat, k, args.shots, args.seed)
        row = {"k": k, "alpha_exact": moment_exact(theta, mat, k), **asdict(rec)}
        if rec.route == "network":
            row["network"] = io.network_to_json(detect.network_for(theta, k), args.include_ua)
        rows.append(row)
    if args.fmt == "csv":
        buf = _io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "alpha_exact", "alpha", "std_error", "route"])
        for r in rows:
            w.writerow([r["k"], repr(r["alpha_exact"]), repr(r["alpha_k"]), repr(r["std_error"]), r["route"]])
        return buf.getvalue()
    if args.fmt == "text":
        lines = [f"map {theta.name}, {'exact' if args.shots is None else f'{args.shots} shots, seed {args.seed}'}"]
        for r in rows:
            lines.append(f"k={r['k']}: alpha={r['alpha_k']:.10g}  exact={r['alpha_exact']:.10g}  "
                         f"std={r['std_error']:.3g}  ({r['route']})")
        return "\n".join(lines) + "\n"
    mode = {"kind": "exact"} if args.shots is None else {"kind": "shots", "shots": args.shots, "seed": args.seed}
    return io.dumps({"schema": 1, "map": theta.name, "state": meta, "mode": mode, "moments": rows})


def cmd_detect(args) -> str:
    rho, meta = _load_state(args)
    if len(rho.dims) != 2:
        raise CliError(f"detect needs a bipartite state, got dims {list(rho.dims)}")
    crit = args.criterion
    if crit == "ppt":
        rep = detect.run_positive_map_test(rho, builtin_maps("transpose", rho.dims[1]), args.shots, args.seed, "ppt")
    elif crit == "reduction":
        rep = detect.run_positive_map_test(rho, builtin_maps("reduction", rho.dims[1]), args.shots, args.seed,
                                           "reduction")
    elif crit == "realignment":
        rep = detect.run_contraction_test(rho, builtin_maps("realignment", rho.dims), args.shots, args.seed,
                                          "realignment")
    else:
        if not args.map:
            raise CliError(f"--criterion {crit} needs --map file:PATH")
        m = _file_map(args.map)
        if crit == "positive_map":
            rep = detect.run_positive_map_test(rho, m, args.shots, args.seed)
        else:
            rep = detect.run_contraction_test(rho, m, args.shots, args.seed)
    rep.state = meta
    if args.fmt == "text":
        lines = [
            f"criterion: {rep.criterion['kind']} ({rep.criterion['name']})",
            f"mode: {rep.mode['kind']}" + (f" ({rep.mode['shots']} shots, seed {rep.mode['seed']})"
                                           if rep.mode["kind"] == "shots" else ""),
            f"verdict: {rep.verdict}",
            f"statistic: {rep.statistic:.10g} (threshold {rep.threshold:g})",
            f"margin: {rep.margin:.6g}",
            f"std_error: {rep.std_error:.3g}",
            "spectrum: " + ", ".join(f"{x:.8g}" for x in rep.spectrum),
        ]
        lines += [f"flag: {f}" for f in rep.flags]
        return "\n".join(lines) + "\n"
    return io.report_to_json(rep)


def cmd_network(args) -> str:
    if args.state:
        rho, _ = _load_state(args)
        dims = rho.dims
    elif args.dims:
        dims = tuple(args.dims)
    else:
        raise CliError("network needs --state or --dims")
    theta, _ = resolve_map(args.map, tuple(dims))
    net = detect.network_for(theta, args.k)
    out = {"schema": 1, "map": theta.name, "k": args.k, **io.network_to_json(net, args.include_ua)}
    return io.dumps(out)


COMMANDS = {"generate": cmd_generate, "moments": cmd_moments, "detect": cmd_detect, "network": cmd_network}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        text = COMMANDS[args.command](args)
        _emit(text, args.out)
    except SizeCapError as exc:
        print(f"error: size cap: {exc}", file=sys.stderr)
        return 2
    except (CliError, MapnetError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
