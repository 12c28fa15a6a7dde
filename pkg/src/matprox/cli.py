"""Batch front-end: validated configs in, JSON/CSV certificates out.

Every run resolves its configuration (defaults, then an optional JSON
config file, then command-line flags), validates it fully before any
computation, and echoes the resolved configuration inside the result JSON
so certificates are self-describing.  Identical configuration and seed
produce byte-identical output except for the ``runtime_ms`` field.  Exit
codes: 0 success, 2 validation error (a machine-readable error object goes
to stderr), 3 acceptance failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import acceptance
from .bridge import (
    approximate_compact_space,
    beta_delta_over_n,
    beta_fixed,
    beta_fraction_of_delta,
    convergence_experiment,
    estimate_reach_lower,
)
from .errors import MatproxError
from .fixed_point import (
    FuzzyTorus,
    LengthFunction,
    SPECIALIZATION_NOTE,
    TorusSubgroup,
    expectation_gap,
    fixed_point_bridge,
    fixed_point_sweep,
    subgroup_hausdorff,
)
from .lseminorm import ApproximationPair, l_seminorms
from .matrix_algebra import operator_norms
from .metric_core import (
    Circle,
    FlatTorus,
    Interval,
    PointCloud,
    epsilon_net,
    load_space,
    min_separation,
    mk_distance,
)

OUTPUT_DIR_ENV = "MATPROX_OUTPUT_DIR"


class ValidationFailure(Exception):
    def __init__(self, field: str, message: str) -> None:
        super().__init__(message)
        self.field = field
        self.message = message


def _parse_scalar(token: str, field: str) -> float:
    text = token.strip().lower()
    try:
        if text == "pi":
            return math.pi
        if text == "2pi":
            return 2.0 * math.pi
        return float(text)
    except ValueError:
        raise ValidationFailure(field, f"cannot parse number {token!r}") from None


def parse_generator(spec: str):
    """Parse a generator spec: circle(c), interval(l), torus(c1,c2,...),
    or cloud:<path-to-json-points-file>."""
    text = spec.strip()
    if text.startswith("cloud:"):
        path = Path(text[len("cloud:") :])
        if not path.exists():
            raise ValidationFailure("generator", f"point file {path} does not exist")
        payload = json.loads(path.read_text(encoding="utf-8"))
        if "points" not in payload:
            raise ValidationFailure("generator", "point file needs a 'points' array")
        pts = np.asarray(payload["points"], dtype=float)
        labels = tuple(payload["labels"]) if "labels" in payload else None
        return PointCloud(pts, labels)
    for name, builder in (
        ("circle", lambda args: Circle(args[0])),
        ("interval", lambda args: Interval(args[0])),
        ("torus", lambda args: FlatTorus(tuple(args))),
    ):
        prefix = name + "("
        if text.startswith(prefix) and text.endswith(")"):
            inner = text[len(prefix) : -1]
            args = [_parse_scalar(tok, "generator") for tok in inner.split(",") if tok.strip()]
            if not args:
                raise ValidationFailure("generator", f"{name} needs at least one number")
            if any(a <= 0.0 for a in args):
                raise ValidationFailure("generator", f"{name} sizes must be positive")
            return builder(args)
    raise ValidationFailure(
        "generator",
        f"unknown generator {spec!r}; expected circle(..), interval(..), torus(..) or cloud:<path>",
    )


def parse_beta_rule(spec: str) -> Callable[[float, int], float]:
    text = spec.strip().lower()
    if text == "delta_over_n":
        return beta_delta_over_n
    try:
        if text.startswith("fixed(") and text.endswith(")"):
            return beta_fixed(_parse_scalar(text[6:-1], "beta_rule"))
        if text.startswith("fraction_of_delta(") and text.endswith(")"):
            return beta_fraction_of_delta(_parse_scalar(text[18:-1], "beta_rule"))
    except MatproxError as exc:
        raise ValidationFailure("beta_rule", str(exc)) from exc
    raise ValidationFailure(
        "beta_rule",
        f"unknown beta rule {spec!r}; expected delta_over_n, fixed(v) or fraction_of_delta(r)",
    )


def _resolve_config(args: argparse.Namespace, defaults: dict[str, Any]) -> dict[str, Any]:
    config = dict(defaults)
    if getattr(args, "config", None):
        path = Path(args.config)
        if not path.exists():
            raise ValidationFailure("config", f"config file {path} does not exist")
        try:
            loaded = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ValidationFailure("config", f"config file is not valid JSON: {exc}")
        if not isinstance(loaded, dict):
            raise ValidationFailure("config", "config file must hold a JSON object")
        unknown = set(loaded) - set(defaults)
        if unknown:
            raise ValidationFailure("config", f"unknown config keys {sorted(unknown)}")
        config.update(loaded)
    for key in defaults:
        flag = getattr(args, key, None)
        if flag is not None:
            config[key] = flag
    return config


def _require_positive_int(config: dict, field: str) -> int:
    value = config.get(field)
    try:
        number = int(value)
    except (TypeError, ValueError):
        raise ValidationFailure(field, f"{field} must be an integer, got {value!r}")
    if number < 1:
        raise ValidationFailure(field, f"{field} must be positive, got {number}")
    return number


def _output_path(args: argparse.Namespace, default_name: str) -> Path:
    if getattr(args, "output", None):
        return Path(args.output)
    base = Path(os.environ.get(OUTPUT_DIR_ENV, "."))
    return base / default_name


def _write_text(path: Path, text: str) -> None:
    # Full results are assembled in memory first; the temp-file rename keeps
    # partially written artifacts from ever appearing under the final name.
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def _emit_json(path: Path, payload: dict) -> None:
    _write_text(path, json.dumps(payload, sort_keys=True, indent=2) + "\n")


def _error_exit(failure: ValidationFailure) -> int:
    envelope = {"error": {"field": failure.field, "message": failure.message}}
    print(json.dumps(envelope, sort_keys=True), file=sys.stderr)
    return 2


# ---------------------------------------------------------------------------
# Subcommand handlers.
# ---------------------------------------------------------------------------


def _cmd_approximate(args: argparse.Namespace) -> int:
    defaults = {
        "generator": "circle(2pi)",
        "n": 8,
        "beta_rule": "delta_over_n",
        "corollary_mode": True,
        "seed": 0,
        "reach_samples": 8,
    }
    config = _resolve_config(args, defaults)
    generator = parse_generator(str(config["generator"]))
    n = _require_positive_int(config, "n")
    rule = parse_beta_rule(str(config["beta_rule"]))
    seed = int(config["seed"])
    reach_samples = _require_positive_int(config, "reach_samples")
    corollary_mode = bool(config["corollary_mode"])

    start = time.perf_counter()
    try:
        pair, bound = approximate_compact_space(
            generator, n, rule, corollary_mode=corollary_mode
        )
    except MatproxError as exc:
        raise ValidationFailure("beta_rule", str(exc))
    net, haus = epsilon_net(generator, n)
    sampled_lower = estimate_reach_lower(pair, iters=reach_samples, seed=seed)
    payload = {
        "command": "approximate",
        "resolved_config": config,
        "results": {
            "generator": str(config["generator"]),
            "n": n,
            "delta": pair.delta,
            "beta": pair.beta,
            "haus": haus,
            "certified_bound": bound,
            "sampled_lower": sampled_lower,
            "sampled_lower_certified": False,
            "D_constant": pair.leibniz_constant,
            "corollary_mode": corollary_mode,
            "seed": seed,
        },
        "runtime_ms": round(1000.0 * (time.perf_counter() - start), 3),
    }
    out = _output_path(args, "approximate.json")
    _emit_json(out, payload)
    print(f"wrote {out}")
    return 0


def _cmd_converge(args: argparse.Namespace) -> int:
    defaults = {
        "generator": "circle(2pi)",
        "n_list": [4, 8, 16, 32],
        "beta_rule": "delta_over_n",
        "seed": 0,
    }
    config = _resolve_config(args, defaults)
    generator = parse_generator(str(config["generator"]))
    rule = parse_beta_rule(str(config["beta_rule"]))
    n_list = config["n_list"]
    if isinstance(n_list, str):
        try:
            n_list = [int(tok) for tok in n_list.split(",") if tok.strip()]
        except ValueError:
            raise ValidationFailure("n_list", f"cannot parse sizes {config['n_list']!r}")
    if not n_list or sorted(set(int(x) for x in n_list)) != [int(x) for x in n_list]:
        raise ValidationFailure("n_list", "net sizes must be strictly increasing")

    start = time.perf_counter()
    try:
        report = convergence_experiment(generator, [int(x) for x in n_list], rule)
    except MatproxError as exc:
        raise ValidationFailure("n_list", str(exc))
    payload = {
        "command": "converge",
        "resolved_config": {**config, "n_list": [int(x) for x in n_list]},
        "results": {
            "rows": [
                {
                    "n": r.n,
                    "delta": r.delta,
                    "beta": r.beta,
                    "haus": r.haus,
                    "certified_bound": r.certified_bound,
                }
                for r in report.rows
            ],
            "strictly_decreasing": report.strictly_decreasing,
            "nonincreasing": report.nonincreasing,
        },
        "runtime_ms": round(1000.0 * (time.perf_counter() - start), 3),
    }
    out = _output_path(args, "converge.json")
    _emit_json(out, payload)
    csv_path = out.with_suffix(".csv")
    _write_text(csv_path, report.to_csv())
    print(f"wrote {out} and {csv_path}")
    return 0


def _cmd_leibniz(args: argparse.Namespace) -> int:
    defaults = {
        "sizes": [2, 3, 4, 5, 6, 7, 8],
        "ratios": [1.0, 3.0],
        "pairs": 500,
        "seed": 0,
        "include_raw": True,
    }
    config = _resolve_config(args, defaults)
    sizes = config["sizes"]
    if isinstance(sizes, str):
        sizes = [int(tok) for tok in sizes.split(",") if tok.strip()]
    sizes = [int(x) for x in sizes]
    if any(x < 2 for x in sizes):
        raise ValidationFailure("sizes", "matrix sizes must be at least 2")
    ratios = config["ratios"]
    if isinstance(ratios, str):
        ratios = [float(tok) for tok in ratios.split(",") if tok.strip()]
    ratios = [float(x) for x in ratios]
    if any(r <= 0.0 for r in ratios):
        raise ValidationFailure("ratios", "beta/delta ratios must be positive")
    pairs = _require_positive_int(config, "pairs")
    seed = int(config["seed"])

    start = time.perf_counter()
    rng = np.random.default_rng(seed)
    suites = []
    for ratio in ratios:
        for n in sizes:
            space = acceptance.random_cloud_space(rng, n)
            delta = min_separation(space)
            pair = ApproximationPair(space, ratio * delta, corollary_mode=ratio <= 1.0)
            a = acceptance.random_hermitian_stack(rng, pairs, n)
            b = acceptance.random_hermitian_stack(rng, pairs, n)
            jordan = (a @ b + b @ a) / 2.0
            lie = (a @ b - b @ a) / 2.0j
            bound = pair.leibniz_constant * (
                operator_norms(a) * l_seminorms(pair, b)
                + operator_norms(b) * l_seminorms(pair, a)
            )
            jres = bound - l_seminorms(pair, jordan)
            lres = bound - l_seminorms(pair, lie)
            suite = {
                "n": n,
                "beta_over_delta": ratio,
                "D_constant": pair.leibniz_constant,
                "pairs": pairs,
                "min_jordan_residual": float(np.min(jres)),
                "min_lie_residual": float(np.min(lres)),
            }
            if config["include_raw"]:
                suite["jordan_residuals"] = [float(x) for x in jres]
                suite["lie_residuals"] = [float(x) for x in lres]
            suites.append(suite)
    payload = {
        "command": "leibniz",
        "resolved_config": {**config, "sizes": sizes, "ratios": ratios},
        "results": {"suites": suites},
        "runtime_ms": round(1000.0 * (time.perf_counter() - start), 3),
    }
    out = _output_path(args, "leibniz.json")
    _emit_json(out, payload)
    print(f"wrote {out}")
    return 0


def _cmd_mk(args: argparse.Namespace) -> int:
    defaults = {"space": None, "p": None, "q": None, "seed": 0}
    config = _resolve_config(args, defaults)
    if not config["space"]:
        raise ValidationFailure("space", "a space file is required")
    path = Path(str(config["space"]))
    if not path.exists():
        raise ValidationFailure("space", f"space file {path} does not exist")
    try:
        space = load_space(path.read_text(encoding="utf-8"))
    except MatproxError as exc:
        raise ValidationFailure("space", str(exc))

    def _measure(raw, field):
        if raw is None:
            return None
        if isinstance(raw, str):
            try:
                raw = json.loads(raw)
            except json.JSONDecodeError:
                raise ValidationFailure(field, f"{field} must be a JSON array of weights")
        arr = np.asarray(raw, dtype=float)
        if arr.shape != (space.n_points,):
            raise ValidationFailure(
                field, f"{field} needs {space.n_points} weights, got shape {arr.shape}"
            )
        if np.min(arr) < -1e-12 or abs(float(arr.sum()) - 1.0) > 1e-12:
            raise ValidationFailure(field, f"{field} is not a probability vector")
        return arr

    p = _measure(config["p"], "p")
    q = _measure(config["q"], "q")
    if (p is None) != (q is None):
        raise ValidationFailure("q", "p and q must be given together")

    start = time.perf_counter()
    n = space.n_points
    eye = np.eye(n)
    dirac = [
        [mk_distance(space, eye[i], eye[j]) for j in range(n)] for i in range(n)
    ]
    residual = float(np.max(np.abs(np.asarray(dirac) - space.dist)))
    results: dict[str, Any] = {
        "labels": list(space.labels),
        "dirac_distance_matrix": dirac,
        "max_gap_to_ground_metric": residual,
    }
    if p is not None:
        results["mk_p_q"] = mk_distance(space, p, q)
    payload = {
        "command": "mk",
        "resolved_config": {**config, "space": str(config["space"])},
        "results": results,
        "runtime_ms": round(1000.0 * (time.perf_counter() - start), 3),
    }
    out = _output_path(args, "mk.json")
    _emit_json(out, payload)
    print(f"wrote {out}")
    return 0


def _parse_generators(raw, field: str) -> list[tuple[int, int]]:
    if raw is None:
        return []
    if isinstance(raw, str):
        try:
            raw = json.loads(raw)
        except json.JSONDecodeError:
            raise ValidationFailure(field, f"{field} must be a JSON array of [j, k] pairs")
    try:
        return [(int(j), int(k)) for j, k in raw]
    except (TypeError, ValueError):
        raise ValidationFailure(field, f"{field} must be pairs of integers")


def _cmd_fixedpoint(args: argparse.Namespace) -> int:
    defaults = {
        "q": 12,
        "p": 1,
        "h_generators": [[1, 0]],
        "k_generators": [[1, 0], [0, 1]],
        "count": 48,
        "seed": 0,
        "sweep": None,
    }
    config = _resolve_config(args, defaults)
    seed = int(config["seed"])
    count = _require_positive_int(config, "count")

    start = time.perf_counter()
    if config["sweep"]:
        sweep = config["sweep"]
        if isinstance(sweep, str):
            try:
                sweep = [int(tok) for tok in sweep.split(",") if tok.strip()]
            except ValueError:
                raise ValidationFailure("sweep", f"cannot parse sweep orders {config['sweep']!r}")
        sweep = [int(x) for x in sweep]
        if any(x < 2 for x in sweep):
            raise ValidationFailure("sweep", "sweep orders must be at least 2")
        rows = fixed_point_sweep(sweep, count=count, seed=seed)
        payload = {
            "command": "fixedpoint",
            "resolved_config": {**config, "sweep": sweep},
            "results": {"model": SPECIALIZATION_NOTE, "sweep_rows": rows},
            "runtime_ms": round(1000.0 * (time.perf_counter() - start), 3),
        }
        out = _output_path(args, "fixedpoint_sweep.json")
        _emit_json(out, payload)
        csv_lines = ["q,m,haus_ell,gap_sampled,dim_fixed"]
        for r in rows:
            csv_lines.append(
                f"{r['q']},{r['m']},{r['haus_ell']!r},{r['gap_sampled']!r},{r['dim_fixed']}"
            )
        csv_path = out.with_suffix(".csv")
        _write_text(csv_path, "\n".join(csv_lines) + "\n")
        print(f"wrote {out} and {csv_path}")
        return 0

    q = _require_positive_int(config, "q")
    if q < 2:
        raise ValidationFailure("q", "torus order must be at least 2")
    p = int(config["p"])
    if math.gcd(p % q, q) != 1:
        raise ValidationFailure("p", f"p={p} must be coprime to q={q}")
    h_gens = _parse_generators(config["h_generators"], "h_generators")
    k_gens = _parse_generators(config["k_generators"], "k_generators")
    try:
        torus = FuzzyTorus(q, p)
        ell = LengthFunction.max_arc(q)
        sub_h = TorusSubgroup.from_generators(q, *h_gens) if h_gens else TorusSubgroup.trivial(q)
        sub_k = TorusSubgroup.from_generators(q, *k_gens) if k_gens else TorusSubgroup.trivial(q)
    except MatproxError as exc:
        raise ValidationFailure("h_generators", str(exc))
    gap = expectation_gap(torus, ell, sub_h, sub_k, count=count, seed=seed)
    report = fixed_point_bridge(torus, ell, sub_h, sub_k, count=count, seed=seed)
    payload = {
        "command": "fixedpoint",
        "resolved_config": config,
        "results": {
            "model": report.model,
            "q": q,
            "p": p,
            "H_generators": [list(g) for g in sub_h.generators],
            "K_generators": [list(g) for g in sub_k.generators],
            "haus_ell": subgroup_hausdorff(ell, sub_h, sub_k),
            "gap_sampled": gap,
            "reach_report": {
                "worst_left_to_right": report.worst_left_to_right,
                "worst_right_to_left": report.worst_right_to_left,
                "reach_sampled": report.reach_sampled,
                "certified": report.certified,
            },
            "dims": {
                "fixed_left": report.dim_fixed_left,
                "fixed_right": report.dim_fixed_right,
                "ambient": q * q,
            },
            "seed": seed,
        },
        "runtime_ms": round(1000.0 * (time.perf_counter() - start), 3),
    }
    out = _output_path(args, "fixedpoint.json")
    _emit_json(out, payload)
    print(f"wrote {out}")
    return 0


def _cmd_selftest(args: argparse.Namespace) -> int:
    results = acceptance.run_all(stream=sys.stdout)
    if getattr(args, "output", None):
        payload = {
            "command": "selftest",
            "results": [
                {
                    "criterion": r.criterion,
                    "name": r.name,
                    "passed": r.passed,
                    "failures": r.failures,
                    "elapsed_s": round(r.elapsed_s, 3),
                }
                for r in results
            ],
        }
        _emit_json(Path(args.output), payload)
    return 0 if acceptance.all_passed(results) else 3


# ---------------------------------------------------------------------------
# Argument parsing.
# ---------------------------------------------------------------------------


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON config file; flags override its keys")
    parser.add_argument("--output", help="output path (default from $%s)" % OUTPUT_DIR_ENV)
    parser.add_argument("--seed", type=int, default=None, help="deterministic seed")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="matprox",
        description="matrix-algebra approximations of compact metric spaces with certificates",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("approximate", help="one net: certified bound haus + beta")
    _add_common(p)
    p.add_argument("--generator", help="circle(c) | interval(l) | torus(c1,..) | cloud:<file>")
    p.add_argument("--n", type=int, help="net size")
    p.add_argument("--beta-rule", dest="beta_rule", help="delta_over_n | fixed(v) | fraction_of_delta(r)")
    p.add_argument("--reach-samples", dest="reach_samples", type=int)
    p.set_defaults(handler=_cmd_approximate)

    p = sub.add_parser("converge", help="sweep net sizes; CSV of certified bounds")
    _add_common(p)
    p.add_argument("--generator")
    p.add_argument("--n-list", dest="n_list", help="comma-separated net sizes")
    p.add_argument("--beta-rule", dest="beta_rule")
    p.set_defaults(handler=_cmd_converge)

    p = sub.add_parser("leibniz", help="residual suite for the product inequality")
    _add_common(p)
    p.add_argument("--sizes", help="comma-separated matrix sizes")
    p.add_argument("--ratios", help="comma-separated beta/delta ratios")
    p.add_argument("--pairs", type=int)
    p.set_defaults(handler=_cmd_leibniz)

    p = sub.add_parser("mk", help="transport distances on a space file")
    _add_common(p)
    p.add_argument("--space", help="JSON file with labels + dist or points")
    p.add_argument("--p", help="JSON array of weights")
    p.add_argument("--q", help="JSON array of weights")
    p.set_defaults(handler=_cmd_mk)

    p = sub.add_parser("fixedpoint", help="subgroup gap and bridge reports on a fuzzy torus")
    _add_common(p)
    p.add_argument("--q", type=int)
    p.add_argument("--p", type=int, dest="p")
    p.add_argument("--h-generators", dest="h_generators", help="JSON array of [j,k] pairs")
    p.add_argument("--k-generators", dest="k_generators", help="JSON array of [j,k] pairs")
    p.add_argument("--count", type=int)
    p.add_argument("--sweep", help="comma-separated torus orders for the gap sweep")
    p.set_defaults(handler=_cmd_fixedpoint)

    p = sub.add_parser("selftest", help="run the full acceptance suite")
    p.add_argument("--output", help="optional JSON result path")
    p.set_defaults(handler=_cmd_selftest)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except ValidationFailure as failure:
        return _error_exit(failure)
    except MatproxError as exc:
        return _error_exit(ValidationFailure("input", str(exc)))


if __name__ == "__main__":
    sys.exit(main())
