"""netcap command line: regions, rays, matroid constructions, codes, trees.

Machine-readable JSON goes to stdout; human-readable notes go to stderr.
All algorithms are deterministic, so identical invocations produce
byte-identical output.  Region reports write the vertex table as CSV, a
gnuplot-style polygon trace, and a rendered figure next to them.
"""

from __future__ import annotations

import json
import sys
from fractions import Fraction
from pathlib import Path

import click

from . import fixtures
from .caps import CapExceededError, load_caps
from .gf import FieldMatrix, PrimeField
from .lp import dump_lp, build_lcode_ray_lp, build_route_ray_lp
from .matroid import (
    RepresentableMatroid,
    fano_matroid,
    graphic_matroid,
    matroid_from_rows,
    uniform_matroid,
)
from .matroidal import (
    check_code,
    code_from_dict,
    code_to_dict,
    construct,
    derive_code,
    mapping_from_dict,
    mapping_to_dict,
    parse_script,
    simulate,
    verify_mapping,
)
from .netmodel import (
    Network,
    NetworkFormatError,
    NetworkValidationError,
    serialize_network,
    validation_warnings,
)
from .region import (
    RegionError,
    compute_region,
    lcoding_parent,
    oracle_ray_approx_lcode,
    oracle_ray_approx_route,
    oracle_ray_exact_lcode,
    oracle_ray_exact_route,
    routing_parent,
)
from .steiner import (
    min_cost_tree_bruteforce,
    min_cost_tree_shortestpaths,
    pack_trees,
    shortest_paths_guarantee,
)

FAILURE_EXIT = 1


def _echo_json(doc) -> None:
    click.echo(json.dumps(doc, indent=2, sort_keys=True))


def _note(msg: str) -> None:
    click.echo(msg, err=True)


def _fail(msg: str):
    raise click.ClickException(msg)


def _load_net(spec: str) -> Network:
    try:
        net = fixtures.load_network(spec)
    except (FileNotFoundError, NetworkFormatError, NetworkValidationError) as err:
        _fail(str(err))
    for w in validation_warnings(net):
        _note(f"warning: {w}")
    return net


def _parse_q(text: str, k: int):
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != k:
        _fail(f"ray needs {k} comma-separated coordinates, got {len(parts)}")
    try:
        q = tuple(Fraction(p) for p in parts)
    except (ValueError, ZeroDivisionError):
        _fail(f"cannot parse ray {text!r}; use integers or fractions like 1/2")
    if any(x < 0 for x in q) or all(x == 0 for x in q):
        _fail("ray must be nonnegative and nonzero")
    return q


def _parse_lengths(path: str, net: Network) -> dict:
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as err:
        _fail(f"cannot read lengths file: {err}")
    lengths = {}
    for e in net.edges:
        if e.id not in doc:
            _fail(f"lengths file is missing edge {e.id!r}")
        lengths[e.id] = Fraction(str(doc[e.id]))
    return lengths


def _matroid_from_options(uniform, graphic, matrix, field) -> RepresentableMatroid:
    chosen = [opt for opt in (uniform, graphic, matrix) if opt]
    if len(chosen) != 1:
        _fail("choose exactly one of --uniform c,d (or 'fano'), --graphic, --matrix")
    if uniform:
        if uniform.strip().lower() == "fano":
            return fano_matroid()
        try:
            c, d = (int(x) for x in uniform.split(","))
        except ValueError:
            _fail("--uniform expects 'c,d' (or 'fano')")
        if field is None:
            _fail("--field is required with --uniform")
        try:
            return uniform_matroid(c, d, field)
        except ValueError as err:
            _fail(str(err))
    if graphic:
        if field is None:
            _fail("--field is required with --graphic")
        edges = []
        try:
            for line in Path(graphic).read_text().splitlines():
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                u, v = line.split()
                edges.append((u, v))
        except (OSError, ValueError) as err:
            _fail(f"cannot read graph file: {err}")
        return graphic_matroid(edges, field)
    if field is None:
        _fail("--field is required with --matrix")
    try:
        rows = []
        for line in Path(matrix).read_text().splitlines():
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            rows.append([int(x) for x in line.split()])
        return matroid_from_rows(rows, field)
    except (OSError, ValueError) as err:
        _fail(f"cannot read matrix file: {err}")


def _region_files(region, out, plot_data, figure, network_name):
    written = {}
    if out:
        lines = ["index," + ",".join(
            f"{m},{m}_decimal" for m in region.message_ids
        )]
        for i, v in enumerate(region.vertices):
            cells = [str(i)]
            for x in v:
                cells.append(str(x))
                cells.append(repr(float(x)))
            lines.append(",".join(cells))
        Path(out).write_text("\n".join(lines) + "\n")
        written["vertices_csv"] = out
    if plot_data:
        lines = [
            f"# {region.kind} capacity region trace",
            f"# method={region.method} algorithm={region.algorithm}"
            + (f" field=GF({region.field_p})" if region.field_p else "")
            + (f" omega={region.omega}" if region.omega is not None else ""),
            "# columns: " + " ".join(f"rate_{m}" for m in region.message_ids),
        ]
        for v in region.vertices:
            lines.append(" ".join(repr(float(x)) for x in v))
        if len(region.vertices) > 1:
            lines.append(" ".join(repr(float(x)) for x in region.vertices[0]))
        Path(plot_data).write_text("\n".join(lines) + "\n")
        written["plot_data"] = plot_data
    fig_path = figure
    if fig_path is None and out and len(region.message_ids) == 2:
        fig_path = str(Path(out).with_suffix(".png"))
    if fig_path and len(region.message_ids) == 2:
        from .plotting import render_region

        render_region(region, fig_path, network_name)
        written["figure"] = fig_path
    return written


def _region_doc(region, written):
    return {
        "kind": region.kind,
        "message_ids": list(region.message_ids),
        "vertices": [[str(x) for x in v] for v in region.vertices],
        "vertices_decimal": [[float(x) for x in v] for v in region.vertices],
        "halfplanes": [
            {"normal": [str(a) for a in n], "offset": str(b)}
            for n, b in (region.halfplanes or ())
        ]
        or None,
        "method": region.method,
        "algorithm": region.algorithm,
        "field": region.field_p,
        "omega": region.omega,
        "guarantee": region.guarantee,
        "complete": region.complete,
        "oracle_calls": region.oracle_calls,
        "files": written,
    }


@click.group()
def main():
    """Capacity regions of directed acyclic networks."""


# ---------------------------------------------------------------- region


@main.group()
def region():
    """Compute a full capacity region description."""


def _run_region(kind, network_spec, method, omega, field, algorithm, oracle,
                out, plot_data, figure):
    net = _load_net(network_spec)
    fld = PrimeField(field) if field else None
    algo = {"trace": "boundary-trace", "enum": "vertex-enum", None: None}[algorithm]
    oracle_fn = min_cost_tree_bruteforce if oracle == "brute" else min_cost_tree_shortestpaths
    guarantee = 1
    if oracle == "paths":
        guarantee = max(shortest_paths_guarantee(net, m) for m in net.message_ids)
    try:
        reg = compute_region(
            net,
            kind,
            field=fld,
            method=method,
            omega=omega,
            algorithm=algo,
            oracle=oracle_fn,
            guarantee=guarantee,
        )
    except (RegionError, CapExceededError, ValueError) as err:
        _fail(str(err))
    written = _region_files(reg, out, plot_data, figure, network_spec)
    _echo_json(_region_doc(reg, written))
    _note(f"{kind} region of {network_spec}: {len(reg.vertices)} vertices ({reg.method})")


def _region_options(fn):
    options = [
        click.option("--network", "network_spec", required=True,
                     help="fixture name or network file"),
        click.option("--method", type=click.Choice(["exact", "approx"]),
                     default="exact", show_default=True),
        click.option("--omega", type=float, default=0.5, show_default=True,
                     help="approximation knob in (0,1)"),
        click.option("--algorithm", type=click.Choice(["trace", "enum"]), default=None,
                     help="boundary trace (2 messages) or vertex enumeration"),
        click.option("--oracle", type=click.Choice(["brute", "paths"]), default="brute",
                     show_default=True, help="min-cost tree oracle for approximate routing"),
        click.option("--out", type=click.Path(dir_okay=False), default=None,
                     help="vertices CSV path"),
        click.option("--plot-data", type=click.Path(dir_okay=False), default=None,
                     help="gnuplot trace path"),
        click.option("--figure", type=click.Path(dir_okay=False), default=None,
                     help="figure path (defaults next to --out)"),
    ]
    for opt in reversed(options):
        fn = opt(fn)
    return fn


@region.command("route")
@_region_options
def region_route(network_spec, method, omega, algorithm, oracle, out, plot_data, figure):
    """Network routing capacity region."""
    _run_region("routing", network_spec, method, omega, None, algorithm, oracle,
                out, plot_data, figure)


@region.command("lcode")
@_region_options
@click.option("--field", type=int, required=True, help="prime field order")
def region_lcode(network_spec, method, omega, algorithm, oracle, out, plot_data, figure, field):
    """Semi-linear-coding capacity region over GF(field)."""
    _run_region("lcoding", network_spec, method, omega, field, algorithm, oracle,
                out, plot_data, figure)


# ---------------------------------------------------------------- ray


@main.group()
def ray():
    """Query one boundary point along a ray."""


def _ray_doc(point, q):
    return {
        "q": [str(x) for x in q],
        "lambda": str(point.lam),
        "lambda_decimal": float(point.lam),
        "point": [str(x) for x in point.coords],
        "point_decimal": [float(x) for x in point.coords],
        "method": point.provenance.method,
        "omega": point.provenance.omega,
        "guarantee": point.provenance.guarantee,
        "formula_value": point.provenance.formula_value,
    }


@ray.command("route")
@click.option("--network", "network_spec", required=True)
@click.option("--q", "q_text", required=True, help="comma-separated rational ray, e.g. 1,1")
@click.option("--method", type=click.Choice(["exact", "approx"]), default="exact", show_default=True)
@click.option("--omega", type=float, default=0.5, show_default=True)
@click.option("--oracle", type=click.Choice(["brute", "paths"]), default="brute", show_default=True)
@click.option("--dump-lp", "dump", is_flag=True, help="print the exact ray program to stderr")
def ray_route(network_spec, q_text, method, omega, oracle, dump):
    net = _load_net(network_spec)
    q = _parse_q(q_text, len(net.message_ids))
    try:
        if method == "exact":
            if dump:
                _note(dump_lp(build_route_ray_lp(routing_parent(net), q)))
            point = oracle_ray_exact_route(net, q)
        else:
            oracle_fn = min_cost_tree_bruteforce if oracle == "brute" else min_cost_tree_shortestpaths
            guarantee = 1 if oracle == "brute" else max(
                shortest_paths_guarantee(net, m) for m in net.message_ids
            )
            point = oracle_ray_approx_route(net, q, omega, oracle_fn, guarantee)
    except (RegionError, CapExceededError, ValueError) as err:
        _fail(str(err))
    _echo_json(_ray_doc(point, q))
    _note(f"lambda = {point.lam} along {q_text}")


@ray.command("lcode")
@click.option("--network", "network_spec", required=True)
@click.option("--q", "q_text", required=True)
@click.option("--field", type=int, required=True)
@click.option("--method", type=click.Choice(["exact", "approx"]), default="exact", show_default=True)
@click.option("--omega", type=float, default=0.5, show_default=True)
@click.option("--dump-lp", "dump", is_flag=True)
def ray_lcode(network_spec, q_text, field, method, omega, dump):
    net = _load_net(network_spec)
    q = _parse_q(q_text, len(net.message_ids))
    fld = PrimeField(field)
    try:
        if method == "exact":
            if dump:
                _note(dump_lp(build_lcode_ray_lp(lcoding_parent(net, fld), q)))
            point = oracle_ray_exact_lcode(net, fld, q)
        else:
            point = oracle_ray_approx_lcode(net, fld, q, omega)
    except (RegionError, CapExceededError, ValueError) as err:
        _fail(str(err))
    _echo_json(_ray_doc(point, q))
    _note(f"lambda = {point.lam} along {q_text}")


# ---------------------------------------------------------------- matroid


@main.group()
def matroid():
    """Matroid constructions."""


@matroid.command("construct")
@click.option("--uniform", default=None, help="'c,d' for a uniform matroid, or 'fano'")
@click.option("--graphic", type=click.Path(exists=True, dir_okay=False), default=None,
              help="edge-list file of an undirected graph")
@click.option("--matrix", type=click.Path(exists=True, dir_okay=False), default=None,
              help="whitespace matrix file (rows of integers)")
@click.option("--field", type=int, default=None, help="prime field order")
@click.option("--script", "script_path", required=True,
              help="construction script file (or bundled script name)")
@click.option("--alphabet-size", type=int, default=2, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="network document path")
@click.option("--mapping-out", type=click.Path(dir_okay=False), default=None,
              help="network-matroid mapping path")
def matroid_construct(uniform, graphic, matrix, field, script_path, alphabet_size, out, mapping_out):
    """Build a matroidal network from a matroid and a construction script."""
    m = _matroid_from_options(uniform, graphic, matrix, field)
    try:
        if Path(script_path).is_file():
            text = Path(script_path).read_text()
        else:
            text = fixtures.script_text(script_path)
    except FileNotFoundError as err:
        _fail(str(err))
    try:
        script = parse_script(text, m.ground_size)
        net, mapping = construct(m, script, alphabet_size)
    except ValueError as err:
        _fail(str(err))
    doc = {
        "network": json.loads(serialize_network(net)),
        "mapping": mapping_to_dict(mapping),
        "matroid": {
            "field": m.field.p,
            "matrix": [list(row) for row in m.matrix.rows],
        },
    }
    if out:
        Path(out).write_text(serialize_network(net))
    if mapping_out:
        Path(mapping_out).write_text(
            json.dumps(mapping_to_dict(mapping), indent=2, sort_keys=True) + "\n"
        )
    _echo_json(doc)
    _note(f"constructed {len(net.nodes)} nodes, {len(net.edges)} edges")


# ---------------------------------------------------------------- code


@main.group()
def code():
    """Derive, check, and simulate scalar-linear codes."""


@code.command("derive")
@click.option("--network", "network_spec", required=True)
@click.option("--uniform", default=None)
@click.option("--graphic", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--matrix", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--field", type=int, default=None)
@click.option("--mapping", "mapping_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="code document path")
def code_derive(network_spec, uniform, graphic, matrix, field, mapping_path, out):
    net = _load_net(network_spec)
    m = _matroid_from_options(uniform, graphic, matrix, field)
    try:
        mapping = mapping_from_dict(json.loads(Path(mapping_path).read_text()))
    except (OSError, json.JSONDecodeError, KeyError) as err:
        _fail(f"cannot read mapping: {err}")
    try:
        derived = derive_code(net, m, mapping)
    except ValueError as err:
        _fail(str(err))
    doc = code_to_dict(derived)
    if out:
        Path(out).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    _echo_json(doc)
    _note("derived code passes all checks")


@code.command("check")
@click.option("--network", "network_spec", required=True)
@click.option("--code", "code_path", required=True, type=click.Path(exists=True, dir_okay=False))
def code_check(network_spec, code_path):
    net = _load_net(network_spec)
    try:
        loaded = code_from_dict(json.loads(Path(code_path).read_text()))
    except (OSError, json.JSONDecodeError, KeyError) as err:
        _fail(f"cannot read code: {err}")
    result = check_code(net, loaded)
    _echo_json(
        {
            "ok": result.ok,
            "failures": [
                {"condition": str(c), "element": n, "detail": d}
                for c, n, d in result.failures
            ],
        }
    )
    if not result.ok:
        first = result.failures[0]
        _fail(f"code invalid: condition {first[0]} at {first[1]}: {first[2]}")
    _note("code is a valid solution")


@code.command("simulate")
@click.option("--network", "network_spec", required=True)
@click.option("--code", "code_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--assign", "assign_text", required=True, help="e.g. a=1,b=0")
def code_simulate(network_spec, code_path, assign_text):
    net = _load_net(network_spec)
    try:
        loaded = code_from_dict(json.loads(Path(code_path).read_text()))
    except (OSError, json.JSONDecodeError, KeyError) as err:
        _fail(f"cannot read code: {err}")
    assignment = {}
    for part in assign_text.split(","):
        name, _, value = part.partition("=")
        if not value:
            _fail(f"bad assignment {part!r}; use msg=value")
        assignment[name.strip()] = int(value)
    try:
        received = simulate(net, loaded, assignment)
    except ValueError as err:
        _fail(str(err))
    doc = {
        "assignment": assignment,
        "received": [
            {"node": node, "message": m, "value": v}
            for (node, m), v in sorted(received.items())
        ],
        "all_satisfied": all(
            v == assignment[m] % loaded.field.p for (_, m), v in received.items()
        ),
    }
    _echo_json(doc)


# ---------------------------------------------------------------- steiner


@main.group()
def steiner():
    """Minimum-cost directed Steiner trees and fractional packing."""


@steiner.command("mincost")
@click.option("--network", "network_spec", required=True)
@click.option("--message", "message_id", required=True)
@click.option("--lengths", "lengths_path", default=None, type=click.Path(exists=True, dir_okay=False),
              help="JSON edge->length; defaults to unit lengths")
@click.option("--oracle", type=click.Choice(["brute", "paths"]), default="brute", show_default=True)
def steiner_mincost(network_spec, message_id, lengths_path, oracle):
    net = _load_net(network_spec)
    if message_id not in net.message_by_id:
        _fail(f"unknown message {message_id!r}")
    lengths = (
        _parse_lengths(lengths_path, net)
        if lengths_path
        else {e.id: Fraction(1) for e in net.edges}
    )
    fn = min_cost_tree_bruteforce if oracle == "brute" else min_cost_tree_shortestpaths
    try:
        tree, cost = fn(net, message_id, lengths)
    except (ValueError, CapExceededError) as err:
        _fail(str(err))
    _echo_json(
        {
            "message": message_id,
            "oracle": oracle,
            "edges": sorted(tree.edges),
            "cost": str(cost),
            "cost_decimal": float(cost),
        }
    )


@steiner.command("pack")
@click.option("--network", "network_spec", required=True)
@click.option("--message", "message_id", required=True)
@click.option("--omega", type=float, default=0.5, show_default=True)
@click.option("--oracle", type=click.Choice(["brute", "paths"]), default="brute", show_default=True)
def steiner_pack(network_spec, message_id, omega, oracle):
    net = _load_net(network_spec)
    if message_id not in net.message_by_id:
        _fail(f"unknown message {message_id!r}")
    fn = min_cost_tree_bruteforce if oracle == "brute" else min_cost_tree_shortestpaths
    guarantee = 1 if oracle == "brute" else shortest_paths_guarantee(net, message_id)
    try:
        result = pack_trees(net, message_id, omega, fn, guarantee)
    except (ValueError, CapExceededError) as err:
        _fail(str(err))
    _echo_json(
        {
            "message": message_id,
            "value": str(result.value),
            "value_decimal": float(result.value),
            "formula_value": result.formula_value,
            "iterations": result.iterations,
            "omega": omega,
            "guarantee": guarantee,
            "trees": [
                {"edges": sorted(edges), "use": str(amount)}
                for edges, amount in sorted(result.uses.items(), key=lambda kv: sorted(kv[0]))
            ],
        }
    )


# ---------------------------------------------------------------- network


@main.group()
def network():
    """Inspect and validate network documents."""


@network.command("validate")
@click.option("--network", "network_spec", required=True)
def network_validate(network_spec):
    from .netmodel import validate

    try:
        net = fixtures.load_network(network_spec)
    except NetworkValidationError as err:
        _echo_json({"ok": False, "violations": [str(v) for v in err.violations]})
        raise click.ClickException("network is invalid")
    except (FileNotFoundError, NetworkFormatError) as err:
        _fail(str(err))
    doc = {
        "ok": True,
        "violations": [],
        "warnings": [str(w) for w in validation_warnings(net)],
        "nodes": len(net.nodes),
        "edges": len(net.edges),
        "messages": list(net.message_ids),
    }
    _echo_json(doc)


@network.command("show")
@click.option("--network", "network_spec", required=True)
def network_show(network_spec):
    net = _load_net(network_spec)
    click.echo(serialize_network(net), nl=False)


if __name__ == "__main__":
    main()
