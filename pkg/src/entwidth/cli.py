"""Command-line front end: parameter scans, bound certification and reports.

Every subcommand takes its parameters as flags and optionally from a JSON
file (``--config``); flags win over the file. Tables are written as CSV (or
JSON with ``--format json``), floats with 12 significant digits, rows in
parameter order.

Exit codes: 0 success, 2 usage or invalid input, 3 SDP non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Sequence

import numpy as np

from . import chi_criteria as chi_mod
from . import dynamics_qfi, gradient_sdp
from .sdp import SdpNotConverged
from .spin_ops import ChainGeometry
from .states import PairingConfiguration, hugging, right_neighbor, singlet_pairing_state
from .variance_criteria import (
    MAX_MATCHING_SITES,
    state_variance,
    width_bound_matching,
    width_bound_simple,
)

DEFAULT_SEED = 20240101
EXIT_USAGE = 2
EXIT_NUMERICAL = 3

DEFAULTS: dict[str, dict[str, Any]] = {
    "scan-variance": {"n": 16, "x0": -0.5, "lambda_range": [2.0, 64.0, 0.25], "pairings": None},
    "scan-chi": {"n": 8, "alpha_range": [0.0, 1.5, 0.01], "jump_threshold": 0.1},
    "sdp-certify": {
        "n": 4,
        "mode": "single",
        "cuts": "2",
        "slope": 10.0,
        "families": "2;1,3",
        "slope_range": [8.0, 24.0, 0.1],
        "kind": "12|34",
        "samples": 10000,
    },
    "qfi-scan": {"ns": "4,8,12,16", "x0": -0.5},
    "bounds": {"n": 16, "x0": -0.5, "lambda_over_d": 32.0, "alpha": 0.5, "widths": "1,2,4"},
}
COMMON_DEFAULTS = {"workers": 1, "seed": DEFAULT_SEED, "output": None, "format": "csv"}


class UsageError(Exception):
    pass


def fmt(x: Any) -> Any:
    """Round floats to 12 significant digits, recursively; other values pass through."""
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (float, np.floating)):
        return float("%.12g" % x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, dict):
        return {k: fmt(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [fmt(v) for v in x]
    return x


def grid(spec: Sequence[float], name: str) -> np.ndarray:
    """Inclusive ``[start, stop, step]`` grid, rounded to kill accumulation noise."""
    if len(spec) != 3:
        raise UsageError(f"{name} needs START STOP STEP")
    start, stop, step = (float(v) for v in spec)
    if step <= 0 or stop < start:
        raise UsageError(f"{name} is empty: start={start}, stop={stop}, step={step}")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return np.round(start + step * np.arange(count), 12)


def int_list(text: str | Sequence[int], name: str) -> list[int]:
    if isinstance(text, (list, tuple)):
        return [int(v) for v in text]
    try:
        return [int(v) for v in str(text).split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"{name}: expected comma-separated integers, got {text!r}") from exc


def families_arg(text: str | Sequence[Sequence[int]]) -> list[list[int]]:
    """``"2;1,3"`` -> ``[[2], [1, 3]]``."""
    if isinstance(text, (list, tuple)):
        return [int_list(f, "families") for f in text]
    return [int_list(part, "families") for part in str(text).split(";") if part.strip()]


def parallel_map(fn: Callable, items: Sequence, workers: int) -> list:
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


def write_table(rows: list[dict], cfg: dict, out) -> None:
    rows = [fmt(r) for r in rows]
    if cfg["format"] == "json":
        out.write(json.dumps(rows, indent=2) + "\n")
        return
    if not rows:
        return
    writer = csv.DictWriter(out, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)


def write_json(obj: Any, out) -> None:
    out.write(json.dumps(fmt(obj), indent=2) + "\n")


# ---------------------------------------------------------------- subcommands


def load_pairings(path: str | None, n: int) -> list[tuple[str, PairingConfiguration]]:
    """Named configurations from a JSON file holding one object or a list of them."""
    if not path:
        return []
    try:
        with open(path) as fh:
            data = json.load(fh)
        items = data if isinstance(data, list) else [data]
        out = []
        for i, item in enumerate(items):
            config = PairingConfiguration.from_dict(item)
            if config.n != n:
                raise ValueError(f"pairing has n={config.n}, scan uses n={n}")
            out.append((str(item.get("name", f"pairing{i + 1}")), config))
        return out
    except (OSError, ValueError, AttributeError) as exc:
        raise UsageError(f"invalid pairing JSON {path}: {exc}") from exc


def run_scan_variance(cfg: dict, out) -> int:
    n = int(cfg["n"])
    if n % 2:
        raise UsageError("scan-variance needs an even n")
    geometry = ChainGeometry(n, float(cfg["x0"]))
    lambdas = grid(cfg["lambda_range"], "lambda_range")
    states = [("hug", singlet_pairing_state(hugging(n))), ("rn", singlet_pairing_state(right_neighbor(n)))]
    states += [(name, singlet_pairing_state(c)) for name, c in load_pairings(cfg["pairings"], n)]
    matching = n <= MAX_MATCHING_SITES

    def row(lam: float) -> dict:
        r: dict[str, Any] = {"lambda_over_d": lam}
        for name, psi in states:
            r[f"variance_state_{name}"] = state_variance(psi, geometry, lam)
        for w in (1, 2, 4):
            r[f"bound_w{w}"] = width_bound_simple(geometry, lam, min(w, n))
        if matching:
            r["bound_matching_w2"] = width_bound_matching(geometry, lam, 2)
            r["bound_matching_w4"] = width_bound_matching(geometry, lam, min(4, n))
        return r

    write_table(parallel_map(row, list(lambdas), int(cfg["workers"])), cfg, out)
    return 0


def run_scan_chi(cfg: dict, out) -> int:
    n = int(cfg["n"])
    if n < 5:
        raise UsageError(f"chi is defined for n >= 5, got {n}")
    if n > chi_mod.MAX_SCAN_SITES:
        raise UsageError(f"scan-chi supports n <= {chi_mod.MAX_SCAN_SITES}")
    alphas = grid(cfg["alpha_range"], "alpha_range")
    if alphas[0] <= -0.5:
        raise UsageError("alpha must exceed -1/2")
    rows = chi_mod.scan_alpha(n, alphas, workers=int(cfg["workers"]))
    table = [
        {
            "alpha": r.alpha,
            "energy": r.ground_energy,
            "chi": r.chi,
            "bound_circulant": r.bound_circulant,
            "bound_2prod": r.bound_2prod,
            "bound_chi_classical": r.bound_chi_classical,
            "flag_ent": int(r.flag_entangled),
            "flag_multipartite": int(r.flag_multipartite),
            "flag_width3": int(r.flag_width3),
        }
        for r in rows
    ]
    write_table(table, cfg, out)
    jumps = chi_mod.detect_jumps(rows, float(cfg["jump_threshold"]))
    sys.stderr.write(f"chi jumps ({len(jumps)}): " + ", ".join(f"[{a:g}, {b:g}]" for a, b in jumps) + "\n")
    onset = chi_mod.first_onset(rows, "flag_width3")
    sys.stderr.write(f"width>=3 onset: {onset if onset is None else format(onset, 'g')}\n")
    return 0


def run_sdp_certify(cfg: dict, out) -> int:
    n = int(cfg["n"])
    if n % 2 or not 2 <= n <= gradient_sdp.MAX_SDP_SITES:
        raise UsageError(f"sdp-certify needs an even n <= {gradient_sdp.MAX_SDP_SITES}")
    mode = cfg["mode"]
    if mode == "single":
        res = gradient_sdp.sdp_intercept(n, float(cfg["slope"]), int_list(cfg["cuts"], "cuts"))
        write_json(res.to_dict(), out)
    elif mode == "pareto":
        families = families_arg(cfg["families"])
        slopes = grid(cfg["slope_range"], "slope_range")
        rows = gradient_sdp.pareto_scan(n, slopes, families, workers=int(cfg["workers"]))
        target = gradient_sdp.b_squared_singlet(n)
        best = gradient_sdp.optimal_intercept_slope(rows, target)
        refined = None
        if best is not None and best > slopes[0]:
            step = float(cfg["slope_range"][2])
            refined = gradient_sdp.refine_optimal_slope(n, families, best - step, best, target)
        write_json(
            {
                "n": n,
                "families": families,
                "target_intercept": target,
                "optimal_intercept_slope": best,
                "optimal_intercept_slope_refined": refined,
                "rows": [{"slope": r.slope, "intercepts": list(r.intercepts), "joint": r.joint} for r in rows],
            },
            out,
        )
    elif mode == "scatter":
        if cfg["kind"] not in gradient_sdp.SCATTER_KINDS:
            raise UsageError(f"kind must be one of {gradient_sdp.SCATTER_KINDS}")
        pts = gradient_sdp.scatter_samples(cfg["kind"], int(cfg["samples"]), int(cfg["seed"]))
        write_table([{"j2": j, "b2": b} for j, b in pts], cfg, out)
    else:
        raise UsageError(f"unknown mode {mode!r}")
    return 0


def run_qfi_scan(cfg: dict, out) -> int:
    ns = int_list(cfg["ns"], "ns")
    if not ns or any(n < 2 or n % 2 for n in ns):
        raise UsageError("ns must be a non-empty list of even chain lengths")
    rows = dynamics_qfi.qfi_ratio_scan(ns, x0=float(cfg["x0"]), workers=int(cfg["workers"]))
    write_table([{"N": r.n, "f_hug": r.f_hug, "f_rn": r.f_rn, "ratio": r.ratio} for r in rows], cfg, out)
    return 0


def run_bounds(cfg: dict, out) -> int:
    n = int(cfg["n"])
    alpha = float(cfg["alpha"])
    lam = float(cfg["lambda_over_d"])
    geometry = ChainGeometry(n, float(cfg["x0"]))
    report: dict[str, Any] = {"n": n, "alpha": alpha, "lambda_over_d": lam, "x0": geometry.x0}
    report["h_circulant"] = chi_mod.h_circulant(n, alpha)
    report["h_2prod"] = chi_mod.h_2prod(alpha) if alpha > -0.5 else None
    report["chi_classical_bound"] = chi_mod.chi_classical_bound(n) if n >= 5 else None
    widths = []
    for w in int_list(cfg["widths"], "widths"):
        if not 1 <= w <= n:
            raise UsageError(f"width {w} outside 1..{n}")
        entry = {"width": w, "simple": width_bound_simple(geometry, lam, w)}
        entry["matching"] = width_bound_matching(geometry, lam, w) if n <= MAX_MATCHING_SITES else None
        widths.append(entry)
    report["width_bounds"] = widths
    write_json(report, out)
    return 0


COMMANDS = {
    "scan-variance": run_scan_variance,
    "scan-chi": run_scan_chi,
    "sdp-certify": run_sdp_certify,
    "qfi-scan": run_qfi_scan,
    "bounds": run_bounds,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="entwidth", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        # defaults stay None so that the config file can fill them in
        p.add_argument("--config", help="JSON file with parameters; flags override it")
        p.add_argument("--output", "-o", help="write here instead of stdout")
        p.add_argument("--format", choices=["csv", "json"])
        p.add_argument("--workers", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("-v", "--verbose", action="store_true", help="log solver progress to stderr")
        return p

    p = common(sub.add_parser("scan-variance", help="variances and width bounds along lambda/d"))
    p.add_argument("--n", type=int)
    p.add_argument("--x0", type=float)
    p.add_argument("--lambda-range", nargs=3, type=float, metavar=("START", "STOP", "STEP"))
    p.add_argument("--pairings", help="JSON file: one pairing configuration or a list (optional 'name' key)")

    p = common(sub.add_parser("scan-chi", help="J1-J2 ground states, chi and flags along alpha"))
    p.add_argument("--n", type=int)
    p.add_argument("--alpha-range", nargs=3, type=float, metavar=("START", "STOP", "STEP"))
    p.add_argument("--jump-threshold", type=float)

    p = common(sub.add_parser("sdp-certify", help="PPT-relaxed intercepts of <B^2> <= a + m <J^2>"))
    p.add_argument("--n", type=int)
    p.add_argument("--mode", choices=["single", "pareto", "scatter"])
    p.add_argument("--cuts", help="comma-separated cut positions, e.g. '2' or '1,3'")
    p.add_argument("--slope", type=float)
    p.add_argument("--families", help="cut families separated by ';', e.g. '2;1,3'")
    p.add_argument("--slope-range", nargs=3, type=float, metavar=("START", "STOP", "STEP"))
    p.add_argument("--kind", help="scatter family: 12|34, 12|34-same or 14|23")
    p.add_argument("--samples", type=int)

    p = common(sub.add_parser("qfi-scan", help="QFI of hugging vs right-neighbour singlets"))
    p.add_argument("--ns", help="comma-separated chain lengths")
    p.add_argument("--x0", type=float)

    p = common(sub.add_parser("bounds", help="print analytic bounds for given parameters"))
    p.add_argument("--n", type=int)
    p.add_argument("--x0", type=float)
    p.add_argument("--lambda-over-d", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--widths", help="comma-separated widths")
    return parser


def resolve_config(args: argparse.Namespace) -> dict:
    cfg = dict(COMMON_DEFAULTS)
    cfg.update(DEFAULTS[args.command])
    if args.config:
        try:
            with open(args.config) as fh:
                file_cfg = json.load(fh)
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(file_cfg, dict):
            raise UsageError("config file must hold a JSON object")
        unknown = set(file_cfg) - set(cfg)
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(file_cfg)
    for key, value in vars(args).items():
        if key in cfg and value is not None:
            cfg[key] = value
    if int(cfg["workers"]) < 1:
        raise UsageError("workers must be >= 1")
    return cfg


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, stream=sys.stderr)
    try:
        cfg = resolve_config(args)
        buffer = io.StringIO()
        code = COMMANDS[args.command](cfg, buffer)
    except (UsageError, ValueError) as exc:
        sys.stderr.write(f"entwidth {args.command}: error: {exc}\n")
        return EXIT_USAGE
    except SdpNotConverged as exc:
        sys.stderr.write(f"entwidth {args.command}: {exc}\n")
        return EXIT_NUMERICAL
    if cfg["output"]:
        with open(cfg["output"], "w", newline="") as fh:
            fh.write(buffer.getvalue())
    else:
        sys.stdout.write(buffer.getvalue())
    return code


if __name__ == "__main__":
    raise SystemExit(main())
