"""Command-line front end.

One subcommand per capability; stochastic subcommands require a seed (from
--seed or the config file) and produce byte-identical outputs for identical
(config, seed).  Exit codes: 0 success, 1 validation error, 2 certification
failure, 3 property-suite failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .boundary import BoundaryError, cross_ratio, parse_boundary_point
from .chains import ChainError, simulate
from .experiments import (
    ExperimentConfig,
    ExperimentError,
    bounded_projection_experiment,
    linear_progress_experiment,
    parse_config,
    recursion_check,
    resolve_kernel,
    tail_experiment,
)
from .groups import BallCapError, GroupError, ball, geodesic, model_from_descriptor, parse_word
from .hhs import (
    coning_schedule,
    factored_ball,
    fiber_parallelism_check,
    product_free_regions,
    product_free_skeleton,
)
from .morse import (
    diagonal_crossing_ray,
    incompatibility_witness,
    morse_certificate,
    mutual_projection_check,
    tree_gauge,
)
from .projections import (
    CertificationError,
    NotLoxodromicError,
    axis_of,
    distance_formula_sum,
    enumerate_cosets,
    linear_order,
    make_axis,
    pivot,
)
from .spaces import (
    BassSerreTree,
    CayleyTree,
    SpaceError,
    bass_serre_orbit,
    cone_off,
    cyclic_coset_family,
    fibre_separation_profile,
    first_factor_orbit,
    identity_orbit,
)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_CERTIFICATION = 2
EXIT_PROPERTY = 3

_VALIDATION_ERRORS = (
    GroupError,
    SpaceError,
    ChainError,
    ExperimentError,
    BoundaryError,
    BallCapError,
    NotLoxodromicError,
    ValueError,
)


def _emit(args, name: str, text: str) -> None:
    if args.out:
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
        path = outdir / name
        path.write_text(text)
        print(f"wrote {path}")
    else:
        sys.stdout.write(text)


def _header(seed=None, extra: str = "") -> str:
    base = f"# ggtlab {__version__}"
    if seed is not None:
        base += f" seed={seed}"
    if extra:
        base += f" {extra}"
    return base + "\n"


def _setup_tree(model_text: str, space: str):
    model = model_from_descriptor(model_text)
    if space == "cayley":
        tree = CayleyTree(model)
        return model, tree, identity_orbit(tree)
    if space == "bass-serre":
        tree = BassSerreTree(model)
        return model, tree, bass_serre_orbit(tree)
    raise GroupError(f"unknown space {space!r}")


def _load_config(args) -> ExperimentConfig:
    overrides = {}
    for attr in ("model", "kernel", "samples"):
        val = getattr(args, attr, None)
        if val is not None:
            overrides[attr] = val
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = args.seed
    if getattr(args, "n", None):
        overrides["n_grid"] = tuple(int(x) for x in args.n.split(","))
    if getattr(args, "C", None):
        overrides["c_grid"] = tuple(float(x) for x in args.C.split(","))
    if getattr(args, "T", None) is not None:
        overrides["threshold"] = args.T
    if args.config:
        return parse_config(Path(args.config).read_text(), **overrides)
    return parse_config("", **overrides)


# --- subcommand handlers -----------------------------------------------------


def cmd_ball(args) -> int:
    model = model_from_descriptor(args.model)
    center = parse_word(model, args.center)
    elems = ball(model, center, args.radius, cap=max(args.radius, 10))
    lines = [str(w) for w in elems]
    _emit(args, "ball.txt", _header() + "\n".join(lines) + f"\n# count={len(elems)}\n")
    print(f"{len(elems)} elements")
    return EXIT_OK


def cmd_project(args) -> int:
    model, tree, orbit = _setup_tree(args.model, args.space)
    ax = make_axis(model, parse_word(model, args.axis_root), parse_word(model, args.axis_rep))
    from .projections import project_to_set

    val = project_to_set(orbit, parse_word(model, args.x), ax)
    pts = " ".join(f"[{p}]" for p in val.points)
    print(f"projection of [{args.x}] onto {ax}: {pts} at distance {val.distance} ({val.method})")
    return EXIT_OK


def cmd_htsum(args) -> int:
    model, tree, orbit = _setup_tree(args.model, args.space)
    g = parse_word(model, args.g)
    o, p = parse_word(model, args.o), parse_word(model, args.p)
    record = enumerate_cosets(orbit, g, o, p, args.T, window=args.window)
    if not record.certified:
        print("error: certification: enumeration window insufficient", file=sys.stderr)
        return EXIT_CERTIFICATION
    total = distance_formula_sum(record, o, p)
    _emit(args, "htsum.jsonl", record.to_jsonl())
    print(f"{len(record.entries)} coset(s); sum over threshold-{args.T} cosets = {total}")
    return EXIT_OK


def cmd_order(args) -> int:
    model, tree, orbit = _setup_tree(args.model, args.space)
    record = enumerate_cosets(
        orbit,
        parse_word(model, args.g),
        parse_word(model, args.o),
        parse_word(model, args.p),
        args.T,
    )
    if not record.certified:
        print("error: certification: enumeration window insufficient", file=sys.stderr)
        return EXIT_CERTIFICATION
    entries, report = linear_order(record)
    for i, e in enumerate(entries):
        print(f"{i}: {e.axis} value={e.value} position={e.position}")
    state = "consistent" if report.consistent else f"{len(report.disagreements)} disagreement(s)"
    print(f"order criteria: {state} over {report.pairs} pair(s)")
    return EXIT_OK


def cmd_pivot(args) -> int:
    model, tree, orbit = _setup_tree(args.model, args.space)
    target = parse_word(model, args.alpha)
    path = geodesic(model, model.identity(), target)
    h_axis = axis_of(tree, parse_word(model, args.h)).translate(parse_word(model, args.h_rep))
    res = pivot(orbit, path, target, h_axis, args.s, bound=args.bound)
    verdict = "pass" if res.passed else "no pivot within bound (best shown)"
    print(f"pivot: q' = [{res.pivot}] values={res.values} {verdict} (examined {res.examined})")
    return EXIT_OK if res.passed else EXIT_CERTIFICATION


def cmd_simulate(args) -> int:
    cfg = _load_config(args)
    seed = cfg.require_seed()
    model = model_from_descriptor(cfg.model)
    kernel = resolve_kernel(model, cfg.kernel)
    start = parse_word(model, args.start)
    lines = []
    for i in range(args.count):
        traj = simulate(kernel, start, args.steps, seed, index=i)
        lines.append(traj.to_json())
    _emit(args, "trajectories.jsonl", "\n".join(lines) + "\n")
    print(f"{args.count} trajectorie(s) of {args.steps} step(s), seed {seed}")
    return EXIT_OK


def cmd_progress(args) -> int:
    cfg = _load_config(args)
    res = linear_progress_experiment(cfg)
    _emit(args, "progress.csv", res.csv())
    for n, drift in res.drifts:
        print(f"n={n}: drift {drift:.4f}")
    if res.fit.slope is not None:
        print(f"failure decay slope {res.fit.slope:.4f} (R^2 {res.fit.r_squared:.3f})")
    return EXIT_OK


def cmd_bounded_proj(args) -> int:
    cfg = _load_config(args)
    res = bounded_projection_experiment(cfg, bound=args.bound)
    _emit(args, "bounded_proj.csv", res.csv())
    print(f"minimum cell probability: {res.min_probability:.4f}")
    return EXIT_OK


def cmd_tail(args) -> int:
    cfg = _load_config(args)
    model = model_from_descriptor(cfg.model)
    o = parse_word(model, args.o) if args.o else None
    p = parse_word(model, args.p) if args.p else None
    curve = tail_experiment(cfg, o=o, p=p, n=args.steps)
    _emit(args, "tail.csv", curve.csv())
    rep = recursion_check(curve, gap=args.gap, eps=args.eps)
    print(
        f"C' = {curve.c_prime:.3f}; envelope {'holds' if curve.envelope_ok() else 'FAILS'}; "
        f"recursion pass fraction {rep.pass_fraction:.2f}"
    )
    return EXIT_OK


def cmd_morse(args) -> int:
    model = model_from_descriptor(args.model)
    target = parse_word(model, args.segment)
    seg = geodesic(model, model.identity(), target)
    grid = []
    for cell in args.grid.split(";"):
        lam, eps = cell.split(",")
        grid.append((float(lam), float(eps)))
    cert = morse_certificate(model, seg, grid, args.window)
    _emit(args, "morse.csv", cert.to_csv())
    for (lam, eps), cell in sorted(cert.cells.items()):
        print(f"M({lam:g},{eps:g}) = {cell.max_detour} [{cell.status}]")
    return EXIT_OK


def cmd_incompat(args) -> int:
    model = model_from_descriptor(args.model)
    beta = diagonal_crossing_ray(model, flat_size=args.flat_size, tail=args.tail)
    wit = incompatibility_witness(model, beta, tree_gauge, kappa=args.kappa, prefix_bound=args.L)
    if wit is None:
        print("no witness within the search family (inconclusive)")
        return EXIT_OK
    print(
        f"witness: point [{wit.point}] margin {wit.margin} on a path of {len(wit.mu) - 1} step(s)"
    )
    return EXIT_OK


def cmd_cone(args) -> int:
    model = model_from_descriptor(args.model)
    families = []
    for root in args.cone or []:
        families.append(cyclic_coset_family(model, parse_word(model, root)))
    graph = cone_off(model, args.radius, families, cap=max(args.radius, 10))
    text = graph.serialize() if len(graph) <= args.serialize_limit else ""
    if text:
        _emit(args, "cone.adj", text)
    print(f"coned ball: {len(graph)} vertices, {len(graph.cliques)} coned coset(s)")
    return EXIT_OK


def cmd_fibers(args) -> int:
    model = model_from_descriptor(args.model)
    sched = coning_schedule(product_free_skeleton())
    regions = product_free_regions(model)
    fb = factored_ball(model, args.radius, sched, sched.termination_round, regions, cap=args.radius)
    res = fiber_parallelism_check(
        model, fb, parse_word(model, args.x), parse_word(model, args.y), args.bound, regions
    )
    print(f"verdict: {res.verdict}; hausdorff sweep {res.hausdorff_sweep}")
    return EXIT_OK


def cmd_separation(args) -> int:
    model = model_from_descriptor(args.model)
    if args.model == "F2":
        tree = CayleyTree(model)
        orbit = identity_orbit(tree)
        x = parse_word(model, args.x)
        y = parse_word(model, args.y)
    else:
        inner_model = model.left
        tree = CayleyTree(inner_model)
        orbit = first_factor_orbit(model, identity_orbit(tree))
        x = parse_word(inner_model, args.x)
        y = parse_word(inner_model, args.y)
    truncs = [int(t) for t in args.truncations.split(",")]
    prof = fibre_separation_profile(orbit, x, y, args.r, args.s, truncs)
    print(f"profile {prof.pairs}; verdict {prof.verdict}")
    return EXIT_OK


def cmd_crossratio(args) -> int:
    model = model_from_descriptor(args.model)
    pts = [parse_boundary_point(model, t) for t in (args.a, args.b, args.c, args.d)]
    value = cross_ratio(model, *pts)
    print(f"[{args.a}, {args.b}, {args.c}, {args.d}] = {value}")
    return EXIT_OK


def cmd_check(args) -> int:
    from .checks import run_all

    failures = run_all()
    if failures:
        print(f"{failures} check(s) FAILED")
        return EXIT_PROPERTY
    print("all checks passed")
    return EXIT_OK


# --- parser ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ggtlab",
        description="Exact group metrics, tree projections, coset sums and seeded chain experiments",
    )
    parser.add_argument("--version", action="version", version=f"ggtlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, stochastic=False):
        p.add_argument("--config", help="plain-text key=value config file")
        p.add_argument("--out", help="output directory")
        p.add_argument("--format", choices=["csv", "jsonl"], default=None, help="output format")
        p.add_argument("--workers", type=int, default=1, help="worker pool size (deterministic)")
        if stochastic:
            p.add_argument("--seed", type=int, default=None, help="mandatory for stochastic runs")

    p = sub.add_parser("ball", help="enumerate a metric ball")
    common(p)
    p.add_argument("--model", default="F2")
    p.add_argument("--center", default="e")
    p.add_argument("--radius", type=int, required=True)
    p.set_defaults(fn=cmd_ball)

    p = sub.add_parser("project", help="nearest-point projection onto an axis")
    common(p)
    p.add_argument("--model", default="F2")
    p.add_argument("--space", default="cayley", choices=["cayley", "bass-serre"])
    p.add_argument("--x", required=True)
    p.add_argument("--axis-root", required=True)
    p.add_argument("--axis-rep", default="e")
    p.set_defaults(fn=cmd_project)

    p = sub.add_parser("htsum", help="threshold cosets and their distance sum")
    common(p)
    p.add_argument("--model", default="F2")
    p.add_argument("--space", default="cayley", choices=["cayley", "bass-serre"])
    p.add_argument("--g", default="a")
    p.add_argument("--o", required=True)
    p.add_argument("--p", required=True)
    p.add_argument("--T", type=int, required=True)
    p.add_argument("--window", type=int, default=None)
    p.set_defaults(fn=cmd_htsum)

    p = sub.add_parser("order", help="linear order of threshold cosets")
    common(p)
    p.add_argument("--model", default="F2")
    p.add_argument("--space", default="cayley", choices=["cayley", "bass-serre"])
    p.add_argument("--g", default="a")
    p.add_argument("--o", required=True)
    p.add_argument("--p", required=True)
    p.add_argument("--T", type=int, required=True)
    p.set_defaults(fn=cmd_order)

    p = sub.add_parser("pivot", help="search a pivot uncoupling a path from an axis")
    common(p)
    p.add_argument("--model", default="F2")
    p.add_argument("--space", default="cayley", choices=["cayley", "bass-serre"])
    p.add_argument("--alpha", required=True, help="path target (path from e)")
    p.add_argument("--h", default="a", help="axis generator")
    p.add_argument("--h-rep", default="e", help="axis translate")
    p.add_argument("--s", type=int, default=3)
    p.add_argument("--bound", type=int, default=4)
    p.set_defaults(fn=cmd_pivot)

    p = sub.add_parser("simulate", help="sample seeded trajectories")
    common(p, stochastic=True)
    p.add_argument("--model", default=None)
    p.add_argument("--kernel", default=None)
    p.add_argument("--start", default="e")
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--count", type=int, default=1)
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("progress", help="linear-progress experiment")
    common(p, stochastic=True)
    p.add_argument("--model", default=None)
    p.add_argument("--kernel", default=None)
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--n", default=None, help="comma-separated checkpoints")
    p.add_argument("--C", default=None, help="comma-separated divisors")
    p.set_defaults(fn=cmd_progress)

    p = sub.add_parser("bounded-proj", help="bounded-projection probability experiment")
    common(p, stochastic=True)
    p.add_argument("--model", default=None)
    p.add_argument("--kernel", default=None)
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--bound", type=float, default=2.0)
    p.set_defaults(fn=cmd_bounded_proj)

    p = sub.add_parser("tail", help="tail-curve experiment with recursion check")
    common(p, stochastic=True)
    p.add_argument("--model", default=None)
    p.add_argument("--kernel", default=None)
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--T", type=int, default=None)
    p.add_argument("--o", default=None)
    p.add_argument("--p", default=None)
    p.add_argument("--steps", type=int, default=200)
    p.add_argument("--gap", type=int, default=8)
    p.add_argument("--eps", type=float, default=0.2)
    p.set_defaults(fn=cmd_tail)

    p = sub.add_parser("morse", help="windowed Morse certificate")
    common(p)
    p.add_argument("--model", default="F2")
    p.add_argument("--segment", required=True, help="segment target word")
    p.add_argument("--grid", default="1,0;1,2;2,2")
    p.add_argument("--window", type=int, default=4)
    p.set_defaults(fn=cmd_morse)

    p = sub.add_parser("incompat", help="incompatibility witness for the crossing ray")
    common(p)
    p.add_argument("--model", default="Z^2 * Z")
    p.add_argument("--flat-size", type=int, default=6)
    p.add_argument("--tail", type=int, default=12)
    p.add_argument("--kappa", type=int, default=1)
    p.add_argument("--L", type=int, default=24)
    p.set_defaults(fn=cmd_incompat)

    p = sub.add_parser("cone", help="coned-off metric ball")
    common(p)
    p.add_argument("--model", default="F2")
    p.add_argument("--radius", type=int, required=True)
    p.add_argument("--cone", action="append", help="root whose cosets get coned (repeatable)")
    p.add_argument("--serialize-limit", type=int, default=3000)
    p.set_defaults(fn=cmd_cone)

    p = sub.add_parser("fibers", help="fibre parallelism verdict in the factored ball")
    common(p)
    p.add_argument("--model", default="(Z^2 * Z) x Z")
    p.add_argument("--radius", type=int, default=4)
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--bound", type=int, default=4)
    p.set_defaults(fn=cmd_fibers)

    p = sub.add_parser("separation", help="fibre separation profile")
    common(p)
    p.add_argument("--model", default="F2", choices=["F2", "F2 x Z"])
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--r", type=int, default=1)
    p.add_argument("--s", type=int, default=2)
    p.add_argument("--truncations", default="4,6,8")
    p.set_defaults(fn=cmd_separation)

    p = sub.add_parser("crossratio", help="cross-ratio of four tree ends")
    common(p)
    p.add_argument("--model", default="F2")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--c", required=True)
    p.add_argument("--d", required=True)
    p.set_defaults(fn=cmd_crossratio)

    p = sub.add_parser("check", help="run the fast property-check suite")
    common(p)
    p.set_defaults(fn=cmd_check)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; unknown flags are validation errors
        return EXIT_OK if exc.code == 0 else EXIT_VALIDATION
    if args.workers < 1:
        print("error: validation: --workers must be >= 1", file=sys.stderr)
        return EXIT_VALIDATION
    try:
        return args.fn(args)
    except CertificationError as exc:
        print(f"error: certification: {exc}", file=sys.stderr)
        return EXIT_CERTIFICATION
    except _VALIDATION_ERRORS as exc:
        print(f"error: validation: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
