"""Command-line front door for the toolkit.

Subcommands map one-to-one onto module operations: ``generate`` writes
space graphs, ``criteria`` evaluates the growth series, ``modulus``
solves a family, ``counterexample`` runs the divergent-function
pipeline, ``polar-verify`` checks a coordinate system, ``chain-check``
searches for annular chain constants, and ``experiment`` runs the
theorem-level tables.

Exit codes are uniform: 0 when the requested check passes (or the
output is purely informational), 1 when a well-posed check fails (the
witness is emitted before exiting), 2 on usage or input errors,
including malformed JSON, which is reported with line and column.  All
output is deterministic: files are written atomically, floats use
shortest round-trip decimals, and ``--out -`` streams to stdout.
"""

from __future__ import annotations

import argparse
import math
import sys
from typing import Any, Mapping, Sequence

import numpy as np
from scipy.sparse.csgraph import dijkstra

from .counterexample import (AnnulusMismatchError, BlockShortfallError,
                             PreconditionError, build_density,
                             budget_bound, distance_function,
                             divergence_check, greedy_blocks)
from .experiments import (example43_sweep, thm12_probe, thm13_sandwich,
                          two_ends_demo)
from .graph_space import (MalformedPathError, SpaceGraph, chain_check,
                          graph_from_json, graph_to_json, grid_graph,
                          halfline_graph, line_graph, profile_from_graph,
                          tree_graph)
from .growth_criteria import script_R
from .model_spaces import AsymptoticClass, RadialPower, model_from_json
from .modulus import (Condenser, ExplicitPaths, FamilyError, condenser_sequence,
                      modulus)
from .polar import (PolarViolationError, polar_lhs, standard_suite,
                    system_from_json, verify_polar)
from .serialize import (atomic_write, canonical_json, csv_table, load_json,
                        worker_cap)

# Mass prefixes whose consecutive ratios agree to this relative
# tolerance are treated as exactly geometric when auto-detecting an
# asymptotic class from a stored graph.
_AUTO_CLASS_RTOL = 1e-9

_SYSTEM_NAMES = ("spherical2", "spherical3", "tree", "diamond",
                 "wedge1", "wedge2", "wedge3")


def _safe(text: object) -> str:
    """Free-text CSV cell: the table uses bare commas as separators."""

    return str(text).replace(",", ";")


def _parse_float_list(text: str) -> tuple[float, ...]:
    try:
        values = tuple(float(part) for part in text.split(",") if part)
    except ValueError:
        raise ValueError(f"expected a comma-separated number list, got {text!r}")
    if not values:
        raise ValueError("empty number list")
    return values


def _load_graph(path: str) -> SpaceGraph:
    return graph_from_json(load_json(path))


def _auto_class(masses: Sequence[float]) -> AsymptoticClass:
    """Declare a geometric class when the stored prefix is exactly one."""

    if len(masses) >= 3 and all(m > 0 for m in masses):
        ratios = [b / a for a, b in zip(masses[:-1], masses[1:])]
        first = ratios[0]
        if all(abs(r - first) <= _AUTO_CLASS_RTOL * first for r in ratios):
            return AsymptoticClass.geometric(first)
    return AsymptoticClass.unknown()


def _resolve_class(args, masses: Sequence[float]) -> AsymptoticClass:
    kind = getattr(args, "asymptotic", None) or "auto"
    value = getattr(args, "class_value", None)
    if kind == "auto":
        return _auto_class(masses)
    if kind == "unknown":
        return AsymptoticClass.unknown()
    if value is None:
        raise ValueError(f"--asymptotic {kind} requires --class-value")
    if kind == "polynomial":
        return AsymptoticClass.polynomial(float(value))
    if kind == "geometric":
        return AsymptoticClass.geometric(float(value))
    raise ValueError(f"unknown asymptotic class {kind!r}")


def _profile_with_class(space: SpaceGraph, args):
    bare = profile_from_graph(space)
    cls = _resolve_class(args, bare.masses)
    return profile_from_graph(space, cls), cls


def _class_label(cls: AsymptoticClass) -> str:
    if cls.kind in ("polynomial", "geometric"):
        return f"{cls.kind}({cls.value})"
    return cls.kind


def _common_config(args) -> dict:
    return {"threads": worker_cap(), "out": args.out}


# -- generate -----------------------------------------------------------------


def _cmd_generate(args) -> int:
    if args.kind == "grid":
        space = grid_graph(args.n, args.half_width)
    elif args.kind == "halfline":
        space = halfline_graph(args.length)
    elif args.kind == "line":
        space = line_graph(args.half_length)
    else:
        space = tree_graph(args.k, args.depth)
    atomic_write(args.out, canonical_json(graph_to_json(space)))
    return 0


# -- criteria -----------------------------------------------------------------


def _cmd_criteria(args) -> int:
    space = _load_graph(args.space)
    profile, cls = _profile_with_class(space, args)
    report = script_R(profile, args.p)
    config = _common_config(args)
    config.update({
        "space": args.space,
        "p": args.p,
        "asymptotic": _class_label(cls),
        "verdict": report.verdict,
        "value": report.value if report.value is not None else "",
        "basis": report.basis,
        "notes": report.notes,
    })
    rows = [
        (j, m, t, s)
        for j, m, t, s in zip(profile.j_values, profile.masses,
                              report.terms, report.partial)
    ]
    atomic_write(args.out, csv_table(rows, ("j", "mass", "term", "partial"),
                                     config))
    return 0


# -- modulus ------------------------------------------------------------------


def _family_from_doc(doc: Any):
    if not isinstance(doc, dict) or "kind" not in doc:
        raise ValueError("family document must be an object with a 'kind'")
    kind = doc["kind"]
    if kind == "explicit":
        return ExplicitPaths(doc["paths"])
    if kind == "condenser":
        return Condenser(tuple(doc["source"]), tuple(doc["target"]))
    if kind == "radii":
        return tuple(float(r) for r in doc["radii"])
    raise ValueError(f"unknown family kind {doc['kind']!r}")


def _cmd_modulus(args) -> int:
    space = _load_graph(args.space)
    family = _family_from_doc(load_json(args.family))
    if isinstance(family, tuple):
        sweep = condenser_sequence(space, args.p, family,
                                   value_rtol=args.value_rtol)
        config = _common_config(args)
        config.update({"space": args.space, "family": args.family,
                       "p": args.p, "value_rtol": args.value_rtol})
        rows = [
            (r, res.value, res.converged, res.shortest_length,
             growth, product)
            for r, res, growth, product in zip(
                sweep.radii, sweep.results, sweep.truncated_growth,
                sweep.products)
        ]
        atomic_write(args.out, csv_table(
            rows,
            ("R", "value", "converged", "shortest", "truncated_growth",
             "product"),
            config,
        ))
        return 0 if all(res.converged for res in sweep.results) else 1
    result = modulus(space, family, args.p, value_rtol=args.value_rtol)
    doc = {
        "schema": "mms/1",
        "kind": "modulus",
        "p": args.p,
        "value": result.value,
        "converged": result.converged,
        "iterations": result.iterations,
        "shortest_length": result.shortest_length,
        "certificate": (result.certificate
                        if isinstance(result.certificate, (int, float, str))
                        else repr(result.certificate)),
        "active_paths": len(result.active_paths),
        "density": [float(v) for v in result.optimal_density.values],
        "reason": result.reason,
    }
    atomic_write(args.out, canonical_json(doc))
    return 0 if result.converged else 1


# -- counterexample -----------------------------------------------------------


def _cmd_counterexample(args) -> int:
    space = _load_graph(args.space)
    profile, cls = _profile_with_class(space, args)
    try:
        blocks = greedy_blocks(profile, args.p, args.blocks)
        density = build_density(profile, blocks)
        u = distance_function(space, profile, density)
    except (PreconditionError, BlockShortfallError,
            AnnulusMismatchError) as exc:
        atomic_write(args.out, canonical_json({
            "schema": "mms/1",
            "kind": "counterexample",
            "refused": type(exc).__name__,
            "witness": str(exc),
        }))
        return 1
    thresholds = args.thresholds or tuple(
        float(k) for k in range(1, blocks.count + 1)
    )
    d0 = space.base_distances()
    far = int(np.argmax(np.where(np.isfinite(d0), d0, -np.inf)))
    _, pred = dijkstra(space.adjacency(), directed=False, indices=space.base,
                       return_predecessors=True)
    walk = [far]
    while walk[-1] != space.base:
        walk.append(int(pred[walk[-1]]))
    ray = [int(space.ids[i]) for i in reversed(walk)]
    report = divergence_check(space, u, [ray], thresholds)
    doc = {
        "schema": "mms/1",
        "kind": "counterexample",
        "p": args.p,
        "asymptotic": _class_label(cls),
        "starts": list(blocks.starts),
        "sums": list(blocks.sums),
        "budget": density.budget,
        "budget_bound": budget_bound(args.p),
        "realized_energy": density.realized_energy,
        "crossings": [
            {"ray_start": c.ray[0], "ray_end": c.ray[-1],
             "ray_nodes": len(c.ray), "thresholds": list(c.thresholds),
             "radii": list(c.radii), "complete": c.complete}
            for c in report.crossings
        ],
        "passed": report.passed,
    }
    atomic_write(args.out, canonical_json(doc))
    return 0 if report.passed else 1


# -- polar-verify -------------------------------------------------------------


def _cmd_polar(args) -> int:
    if args.file:
        system = system_from_json(load_json(args.file))

        def constant(points):
            return np.ones(len(np.atleast_2d(points)))

        rows = [
            (i, _safe(system.directions[i]), len(system.curves[i]),
             float(np.trapezoid(system.h_samples[i], dx=system.step)))
            for i in range(system.direction_count)
        ]
        config = _common_config(args)
        config.update({
            "system": system.name, "C": system.C, "step": system.step,
            "directions": system.direction_count,
            "weighted_h_mass": polar_lhs(system, constant),
            "note": "custom system: structural checks only, no volume oracle",
        })
        atomic_write(args.out, csv_table(
            rows, ("direction", "label", "points", "h_arc_integral"), config))
        return 0
    overrides = {}
    if args.directions is not None:
        overrides["directions"] = args.directions
    if args.step is not None:
        overrides["step"] = args.step
    if args.extent is not None:
        overrides["extent"] = args.extent
    system, funcs, integrator = standard_suite(args.system, **overrides)
    try:
        report = verify_polar(system, funcs, integrator, tol=args.tol)
    except PolarViolationError as exc:
        print(f"violation: {exc}", file=sys.stderr)
        return 1
    config = _common_config(args)
    config.update({
        "system": report.system, "C": report.C, "identity": report.identity,
        "tol": report.tol, "quadrature_error": report.quadrature_error,
        "passed": report.passed,
    })
    rows = [
        (i, lhs, rhs, ratio)
        for i, (lhs, rhs, ratio) in enumerate(
            zip(report.lhs, report.rhs, report.ratios))
    ]
    atomic_write(args.out, csv_table(
        rows, ("function", "lhs", "rhs", "ratio"), config))
    return 0 if report.passed else 1


# -- chain-check --------------------------------------------------------------


def _cmd_chain(args) -> int:
    space = _load_graph(args.space)
    radii = args.radii or (8.0, 16.0, 32.0)
    report = chain_check(space, args.lam, radii,
                         pair_budget=args.pair_budget)
    config = _common_config(args)
    config.update({
        "space": args.space, "lambda": args.lam,
        "radii": ",".join(str(r) for r in radii),
        "passed": report.passed,
        "c1": report.c1 if report.c1 is not None else "",
        "c2": report.c2 if report.c2 is not None else "",
        "delta": report.delta if report.delta is not None else "",
        "links": report.links if report.links is not None else "",
    })
    rows = [
        (t.r, t.x, t.y, t.ok, len(t.centers), _safe(t.reason))
        for t in report.tasks
    ]
    atomic_write(args.out, csv_table(
        rows, ("r", "x", "y", "ok", "links", "reason"), config))
    return 0 if report.passed else 1


# -- experiment ---------------------------------------------------------------

_EXPERIMENT_DEFAULTS: Mapping[str, Mapping[str, Any]] = {
    "thm12": {"p": (1.0, 2.0), "radii": (4.0, 8.0, 16.0, 32.0),
              "value_rtol": 1e-6, "block_target": 3, "label": "space"},
    "thm13": {"p": (1.5,), "radii": (4.0, 8.0, 16.0, 32.0),
              "value_rtol": 1e-6, "h_c": 1.0, "h_beta": 1.0},
    "two-ends": {"p": (1.0, 2.0)},
    "example43": {"n": 2, "alphas": (-0.5, 0.0, 0.5), "p": (1.0, 1.5),
                  "j_max": 8, "levels": 5, "stages": 2, "band_max": 4.0},
}


def _resolve_experiment_config(args) -> dict:
    """Built-in defaults, then config file entries, then CLI flags."""

    resolved = dict(_EXPERIMENT_DEFAULTS[args.name])
    if args.config:
        file_cfg = load_json(args.config)
        if not isinstance(file_cfg, dict):
            raise ValueError("experiment config must be a JSON object")
        for key, value in file_cfg.items():
            resolved[key] = tuple(value) if isinstance(value, list) else value
    for key in ("p", "radii", "alphas"):
        flag = getattr(args, key, None)
        if flag is not None:
            resolved[key] = flag
    for key in ("value_rtol", "block_target", "label", "n", "j_max",
                "levels", "stages", "band_max", "space", "h_c", "h_beta"):
        flag = getattr(args, key, None)
        if flag is not None:
            resolved[key] = flag
    return resolved


def _trend_cell(trend) -> tuple:
    return trend.kind, trend.slope


def _cmd_experiment(args) -> int:
    cfg = _resolve_experiment_config(args)
    config_echo = _common_config(args)
    config_echo.update({
        k: (",".join(str(x) for x in v) if isinstance(v, tuple) else v)
        for k, v in sorted(cfg.items())
    })

    if args.name == "thm12":
        if "space" not in cfg:
            raise ValueError("thm12 needs --space or a config 'space' entry")
        space = _load_graph(cfg["space"])
        profile, cls = _profile_with_class(space, args)
        config_echo["asymptotic"] = _class_label(cls)
        rows = thm12_probe(space, profile, cfg["p"], cfg["radii"],
                           label=str(cfg["label"]),
                           value_rtol=float(cfg["value_rtol"]),
                           block_target=int(cfg["block_target"]))
        table = [
            (r.label, r.p, r.growth_verdict, *_trend_cell(r.trend),
             r.blocks, r.block_count, r.consistent, _safe(r.note))
            for r in rows
        ]
        atomic_write(args.out, csv_table(
            table,
            ("label", "p", "growth", "trend", "slope", "blocks",
             "block_count", "consistent", "note"),
            config_echo,
        ))
        return 0 if all(r.consistent for r in rows) else 1

    if args.name == "thm13":
        if "space" not in cfg or "model" not in cfg:
            raise ValueError(
                "thm13 needs a graph (--space) and a config 'model' entry"
            )
        space = _load_graph(cfg["space"])
        model = model_from_json(cfg["model"])
        h = RadialPower(float(cfg["h_c"]), float(cfg["h_beta"]))
        config_echo["model"] = cfg["model"]["variant"]
        config_echo["h"] = f"{cfg['h_c']}*r**{cfg['h_beta']}"
        del config_echo["h_c"], config_echo["h_beta"]
        rows = thm13_sandwich(model, h, cfg["p"], space, cfg["radii"],
                              value_rtol=float(cfg["value_rtol"]))
        table = [
            (r.p, r.weighted_verdict, *_trend_cell(r.trend),
             r.series_verdict, ";".join(r.violations), r.consistent)
            for r in rows
        ]
        atomic_write(args.out, csv_table(
            table,
            ("p", "weighted", "trend", "slope", "series", "violations",
             "consistent"),
            config_echo,
        ))
        return 0 if all(r.consistent for r in rows) else 1

    if args.name == "two-ends":
        if "space" not in cfg:
            raise ValueError("two-ends needs --space or a config 'space' entry")
        space = _load_graph(cfg["space"])
        demos = [two_ends_demo(space, p) for p in cfg["p"]]
        table = [
            (d.p, d.tail_values[0], d.tail_values[1], d.energy,
             d.upper_gradient_ok, d.ends[0], d.ends[1], len(d.zone))
            for d in demos
        ]
        atomic_write(args.out, csv_table(
            table,
            ("p", "tail_low", "tail_high", "energy", "upper_gradient",
             "end_low", "end_high", "zone_size"),
            config_echo,
        ))
        good = all(
            d.upper_gradient_ok and math.isfinite(d.energy)
            and d.tail_values == (0.0, 1.0)
            for d in demos
        )
        return 0 if good else 1

    rows = example43_sweep(int(cfg["n"]), cfg["alphas"], cfg["p"],
                           j_max=int(cfg["j_max"]),
                           levels=int(cfg["levels"]),
                           stages=int(cfg["stages"]))
    table = [
        (r.alpha, r.p, r.skipped, _safe(r.reason), r.muckenhoupt, r.band)
        for r in rows
    ]
    atomic_write(args.out, csv_table(
        table,
        ("alpha", "p", "skipped", "reason", "muckenhoupt", "band"),
        config_echo,
    ))
    band_max = float(cfg["band_max"])
    return 0 if all(r.skipped or r.band <= band_max for r in rows) else 1


# -- parser -------------------------------------------------------------------


def _add_out(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", default="-",
                        help="output path, '-' for stdout (default)")


def _add_class_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--asymptotic", default="auto",
                        choices=("auto", "polynomial", "geometric", "unknown"),
                        help="declared annulus-mass class (auto detects an "
                             "exactly geometric prefix)")
    parser.add_argument("--class-value", type=float, default=None,
                        help="exponent or ratio for the declared class")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mms",
        description="growth criteria, modulus, and polar-system toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a space graph JSON")
    gen_sub = gen.add_subparsers(dest="kind", required=True)
    g = gen_sub.add_parser("grid")
    g.add_argument("--n", type=int, default=2)
    g.add_argument("--half-width", type=int, required=True)
    _add_out(g)
    g.set_defaults(handler=_cmd_generate)
    g = gen_sub.add_parser("halfline")
    g.add_argument("--length", type=int, required=True)
    _add_out(g)
    g.set_defaults(handler=_cmd_generate)
    g = gen_sub.add_parser("line")
    g.add_argument("--half-length", type=int, required=True)
    _add_out(g)
    g.set_defaults(handler=_cmd_generate)
    g = gen_sub.add_parser("tree")
    g.add_argument("--k", type=int, default=2)
    g.add_argument("--depth", type=int, required=True)
    _add_out(g)
    g.set_defaults(handler=_cmd_generate)

    crit = sub.add_parser("criteria", help="growth series verdict as CSV")
    crit.add_argument("--space", required=True)
    crit.add_argument("--p", type=float, required=True)
    _add_class_flags(crit)
    _add_out(crit)
    crit.set_defaults(handler=_cmd_criteria)

    mod = sub.add_parser("modulus", help="solve one family on a graph")
    mod.add_argument("--space", required=True)
    mod.add_argument("--family", required=True,
                     help="family JSON: explicit paths, condenser plates, "
                          "or a radii schedule")
    mod.add_argument("--p", type=float, required=True)
    mod.add_argument("--value-rtol", type=float, default=1e-6)
    _add_out(mod)
    mod.set_defaults(handler=_cmd_modulus)

    ctr = sub.add_parser("counterexample",
                         help="divergent-function construction pipeline")
    ctr.add_argument("--space", required=True)
    ctr.add_argument("--p", type=float, required=True)
    ctr.add_argument("--blocks", type=int, default=4)
    ctr.add_argument("--thresholds", type=_parse_float_list, default=None)
    _add_class_flags(ctr)
    _add_out(ctr)
    ctr.set_defaults(handler=_cmd_counterexample)

    pol = sub.add_parser("polar-verify", help="check a polar system")
    group = pol.add_mutually_exclusive_group(required=True)
    group.add_argument("--system", choices=_SYSTEM_NAMES)
    group.add_argument("--file", help="custom system JSON")
    pol.add_argument("--directions", type=int, default=None)
    pol.add_argument("--step", type=float, default=None)
    pol.add_argument("--extent", type=float, default=None)
    pol.add_argument("--tol", type=float, default=0.02)
    _add_out(pol)
    pol.set_defaults(handler=_cmd_polar)

    chn = sub.add_parser("chain-check", help="annular chain constants")
    chn.add_argument("--space", required=True)
    chn.add_argument("--lambda", dest="lam", type=float, required=True)
    chn.add_argument("--radii", type=_parse_float_list, default=None)
    chn.add_argument("--pair-budget", type=int, default=6)
    _add_out(chn)
    chn.set_defaults(handler=_cmd_chain)

    exp = sub.add_parser("experiment", help="theorem-level tables as CSV")
    exp.add_argument("name", choices=("thm12", "thm13", "two-ends",
                                      "example43"))
    exp.add_argument("--config", default=None, help="config JSON file")
    exp.add_argument("--space", default=None)
    exp.add_argument("--p", type=_parse_float_list, default=None)
    exp.add_argument("--radii", type=_parse_float_list, default=None)
    exp.add_argument("--alphas", type=_parse_float_list, default=None)
    exp.add_argument("--value-rtol", dest="value_rtol", type=float,
                     default=None)
    exp.add_argument("--block-target", dest="block_target", type=int,
                     default=None)
    exp.add_argument("--label", default=None)
    exp.add_argument("--n", type=int, default=None)
    exp.add_argument("--j-max", dest="j_max", type=int, default=None)
    exp.add_argument("--levels", type=int, default=None)
    exp.add_argument("--stages", type=int, default=None)
    exp.add_argument("--band-max", dest="band_max", type=float, default=None)
    exp.add_argument("--h-c", dest="h_c", type=float, default=None)
    exp.add_argument("--h-beta", dest="h_beta", type=float, default=None)
    _add_class_flags(exp)
    _add_out(exp)
    exp.set_defaults(handler=_cmd_experiment)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.handler(args)
    except (ValueError, KeyError, TypeError, OSError,
            FamilyError, MalformedPathError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
