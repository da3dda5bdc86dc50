"""``cosserat-lh``: material checks, field scans, oscillatory probes and self-validation.

Settings are resolved as defaults < flags < config file. Every subcommand
prints an aligned text table and can write a JSON report (``--json``). The
JSON is sorted and carries no timing, so equal inputs give identical bytes.

Exit codes: 0 satisfied/passed, 1 validation failure, 2 violated or probe
outside the domain, 3 marginal, 64 usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .checks import run_validation
from .config import DEFAULT_MATERIAL, MATERIAL_KEYS, load_config, parse_config
from .errors import ConfigError, CosseratError, ProbeOutsideDomain
from .kinematics import wryness
from .material import IsotropicQuadraticMaterial
from .stability import LHQuadraticForm, check_material, default_eig_tol, scan_lh
from .variation import (PROBE_COLUMNS, ProbeSpec, equilibrium_gate, oscillatory_probe,
                        probe_table_csv)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_VIOLATED = 2
EXIT_MARGINAL = 3
EXIT_USAGE = 64

VERDICT_EXIT = {"satisfied": EXIT_OK, "violated": EXIT_VIOLATED, "marginal": EXIT_MARGINAL}
VERDICT_RANK = {"satisfied": 0, "marginal": 1, "violated": 2}
DEFAULT_SEED = 0

FLAG_TO_KEY = {"mu": "mu", "mu_c": "mu_c", "lam": "lambda", "a1": "a1", "a2": "a2", "a3": "a3"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON run configuration")
    common.add_argument("--seed", type=int, default=None, help=f"RNG seed (default {DEFAULT_SEED})")
    common.add_argument("--json", type=Path, dest="json_path", help="write the JSON report here")
    common.add_argument("--quiet", action="store_true", help="suppress the text table")
    mat = common.add_argument_group("material")
    mat.add_argument("--mu", type=float)
    mat.add_argument("--mu-c", type=float, dest="mu_c")
    mat.add_argument("--lambda", type=float, dest="lam")
    mat.add_argument("--a1", type=float)
    mat.add_argument("--a2", type=float)
    mat.add_argument("--a3", type=float)

    p = _Parser(prog="cosserat-lh", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", parents=[common], help="closed-form margins plus direction scan")
    c.add_argument("--resolution", type=int)

    s = sub.add_parser("scan", parents=[common], help="scan every node of a field")
    s.add_argument("--resolution", type=int)
    s.add_argument("--field", choices=["identity", "uniform_stretch", "axis_twist", "sinusoidal"])
    s.add_argument("--n-per-axis", type=int, dest="n_per_axis")

    pr = sub.add_parser("probe", parents=[common], help="oscillatory second-variation probe")
    pr.add_argument("--csv", type=Path, dest="csv_path", help="write the convergence table here")

    sub.add_parser("validate", parents=[common], help="derivative, kinematic and identity suites")
    return p


# ---------------------------------------------------------------------------
# settings


def _merge(cfg, args):
    """Apply flags under the config: a value set in the file wins."""
    data = cfg.canonical()
    given = cfg.model_fields_set
    file_material = cfg.material.given()
    flags = {FLAG_TO_KEY[k]: getattr(args, k) for k in FLAG_TO_KEY if getattr(args, k) is not None}
    data["material"] = {**flags, **file_material}
    if args.seed is not None and "seed" not in given:
        data["seed"] = args.seed
    if data.get("seed") is None:
        data["seed"] = DEFAULT_SEED
    res = getattr(args, "resolution", None)
    if res is not None and "resolution" not in cfg.scan.model_fields_set:
        data["scan"]["resolution"] = res
    if getattr(args, "field", None) and "kind" not in cfg.field.model_fields_set:
        data["field"]["kind"] = args.field
    if getattr(args, "n_per_axis", None) and "n_per_axis" not in cfg.field.model_fields_set:
        data["field"]["n_per_axis"] = args.n_per_axis
    if args.json_path is not None and cfg.output.json_path is None:
        data["output"]["json"] = str(args.json_path)
    if getattr(args, "csv_path", None) is not None and cfg.output.csv_path is None:
        data["output"]["csv"] = str(args.csv_path)
    return parse_config(data)


def _material(cfg, require_all):
    given = cfg.material.given()
    missing = [k for k in MATERIAL_KEYS if k not in given]
    if missing and (require_all or given):
        flags = ", ".join("--" + k.replace("_", "-") for k in missing)
        raise UsageError(f"missing material parameters: {flags}")
    return IsotropicQuadraticMaterial.from_dict(given if not missing else DEFAULT_MATERIAL)


# ---------------------------------------------------------------------------
# output


def dumps(obj):
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + "\n"


def format_table(headers, rows):
    cells = [[str(h) for h in headers]] + [[_cell(v) for v in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(headers))]
    lines = ["  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)


def _cell(v):
    if isinstance(v, bool):
        return "pass" if v else "FAIL"
    if isinstance(v, float):
        return f"{v:.6g}"
    if isinstance(v, (list, tuple)):
        return "(" + ", ".join(f"{x:.4f}" for x in v) + ")"
    return str(v)


def _envelope(command, cfg, result, code):
    return {
        "command": command,
        "config": cfg.echo(),
        "config_hash": cfg.digest(),
        "exit_code": code,
        "result": result,
        "version": __version__,
    }


# ---------------------------------------------------------------------------
# commands


def cmd_check(cfg):
    mat = _material(cfg, require_all=True)
    report = check_material(mat, resolution=cfg.scan.resolution, eig_tol=cfg.tolerances.eig_tol,
                            refine_iterations=cfg.scan.refine_iterations,
                            refine_candidates=cfg.scan.refine_candidates)
    code = VERDICT_EXIT[report.verdict]
    rows = [(k, v["value"], v["pass"]) for k, v in report.margins.items()]
    text = [format_table(("condition", "value", "status"), rows), "",
            format_table(("scan", "value"), [
                ("min eigenvalue", report.min_eigenvalue),
                ("worst n", list(report.worst_n)),
                ("eig_tol", report.eig_tol),
                ("verdict", report.verdict),
            ])]
    return code, {"material": mat.to_dict(), "report": report.to_dict()}, "\n".join(text)


def cmd_scan(cfg):
    mat = _material(cfg, require_all=False)
    grid = cfg.field.build()
    wryness(grid)
    eig_tol = cfg.tolerances.eig_tol or default_eig_tol(mat.modulus_scale())
    cache = {}
    nodes = []
    for node in np.ndindex(grid.n, grid.n, grid.n):
        blocks = mat.hessian_blocks(grid.E[node], grid.Gamma[node])
        key = b"".join(np.ascontiguousarray(b).tobytes() for b in blocks)
        if key not in cache:
            A, B, Bt, C = blocks
            cache[key] = scan_lh(LHQuadraticForm(A, B, C, Bt), resolution=cfg.scan.resolution,
                                 refine_iterations=cfg.scan.refine_iterations,
                                 refine_candidates=cfg.scan.refine_candidates, eig_tol=eig_tol)
        nodes.append((node, cache[key]))
    worst_node, worst = min(nodes, key=lambda t: (t[1].min_eigenvalue, t[0]))
    verdict = max((r.verdict for _, r in nodes), key=VERDICT_RANK.__getitem__)
    counts = {v: sum(r.verdict == v for _, r in nodes) for v in VERDICT_RANK}
    result = {
        "material": mat.to_dict(),
        "verdict": verdict,
        "counts": counts,
        "distinct_forms": len(cache),
        "worst_node": [int(i) for i in worst_node],
        "worst": worst.to_dict(),
        "nodes": [{"node": [int(i) for i in nd], "min_eigenvalue": r.min_eigenvalue,
                   "verdict": r.verdict} for nd, r in nodes],
    }
    text = format_table(("quantity", "value"), [
        ("field", cfg.field.kind), ("nodes", len(nodes)), ("distinct forms", len(cache)),
        ("worst node", str(tuple(int(i) for i in worst_node))),
        ("min eigenvalue", worst.min_eigenvalue), ("worst n", list(worst.worst_n)),
        *((f"{v} nodes", c) for v, c in counts.items()), ("verdict", verdict),
    ])
    return VERDICT_EXIT[verdict], result, text


def cmd_probe(cfg):
    mat = _material(cfg, require_all=False)
    pc = cfg.probe
    grid = cfg.field.build(n_per_axis=pc.n_per_axis)
    x0 = pc.x0 if pc.x0 is not None else tuple(0.5 * (grid.lo + grid.hi))
    spec = ProbeSpec(x0=tuple(x0), a=pc.a, b=pc.b, n=pc.n, k_list=tuple(pc.k_list),
                     eps_list=tuple(pc.eps_list), bump=pc.bump)
    gate_ok, gate_worst = equilibrium_gate(grid, mat, seed=cfg.seed)
    rows = oscillatory_probe(grid, mat, spec)
    csv = probe_table_csv(rows)
    if cfg.output.csv_path:
        Path(cfg.output.csv_path).write_text(csv, encoding="utf-8")
    result = {
        "material": mat.to_dict(),
        "equilibrium_gate": {"passed": bool(gate_ok), "max_first_variation": gate_worst},
        "rows": [{c: r[c] for c in PROBE_COLUMNS} for r in rows],
    }
    text = format_table(PROBE_COLUMNS, [[r[c] for c in PROBE_COLUMNS] for r in rows])
    if not gate_ok:
        text += f"\nwarning: state is not equilibrated (max first variation {gate_worst:.3e})"
    return EXIT_OK, result, text


def cmd_validate(cfg, material=None):
    mat = material if material is not None else _material(cfg, require_all=False)
    results = run_validation(mat, seed=cfg.seed, n_states=cfg.validate_.n_states)
    ok = all(r.passed for r in results)
    text = format_table(("suite", "check", "value", "tol", "status"),
                        [(r.suite, r.check, float(r.value), float(r.tol), bool(r.passed))
                         for r in results])
    result = {"passed": ok, "checks": [r.to_dict() for r in results]}
    return (EXIT_OK if ok else EXIT_FAILED), result, text


COMMANDS = {"check": cmd_check, "scan": cmd_scan, "probe": cmd_probe, "validate": cmd_validate}


def run(argv=None, material=None, stdout=None):
    """Parse ``argv``, run the subcommand and return the exit code.

    ``material`` replaces the configured material for ``validate`` (used by
    mutation tests).
    """
    stdout = sys.stdout if stdout is None else stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _merge(load_config(args.config), args)
        start = time.perf_counter()
        if args.command == "validate":
            code, result, text = cmd_validate(cfg, material)
        else:
            code, result, text = COMMANDS[args.command](cfg)
        elapsed = time.perf_counter() - start
    except (UsageError, ConfigError) as exc:
        parser.print_usage(sys.stderr)
        print(f"cosserat-lh: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ProbeOutsideDomain as exc:
        print(f"cosserat-lh: probe rejected: {exc}", file=sys.stderr)
        return EXIT_VIOLATED
    except CosseratError as exc:
        print(f"cosserat-lh: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAILED

    if cfg.output.json_path:
        Path(cfg.output.json_path).write_text(
            dumps(_envelope(args.command, cfg, result, code)), encoding="utf-8")
    if not args.quiet:
        print(text, file=stdout)
        print(f"\n{args.command}: exit {code} ({elapsed:.2f} s)", file=stdout)
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
