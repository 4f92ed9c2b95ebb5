"""Batch experiment runner: every study exposed as a subcommand.

Each subcommand computes one table, writes a CSV with a documented header
row plus a JSON run-manifest (config echo, versions, seeds, wall time), and
exits 0.  Domain errors exit 1 and resource/numerical errors exit 2, both
with a machine-readable error document on stdout.  CSV bytes are
reproducible: same config, seed and worker count give identical files (the
manifest's wall-time field is the only run-dependent output).

Configuration is declarative: an optional JSON document (``--config``)
provides defaults, command-line flags override it, and unknown keys are
rejected before any computation starts.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from . import __version__, _kern
from .kinetic import (
    EpsilonRegime,
    QuadConfig,
    continuum_integral,
    delta_reduced_detailed,
    i_l_pairing,
    kinetic_coefficient,
    regime_check,
    residue_count,
    third_case_coefficients,
)
from .lattice import DEFAULT_TUPLE_CAP, Profile, RegimeParams
from .oscillatory import classify_leading, g_m, g_m_oracle
from .picard import (
    mass_derivative_n1,
    mass_v1,
    monte_carlo_mass,
    picard_recursion,
    tree_sum,
)
from .trees import (
    DEFAULT_TREE_CAP,
    enumerate_trees,
    linear_extensions,
    render_tree,
    sign_exponent,
)
from .util import DomainError, NumericalError, ResourceError

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_RESOURCE = 2

OUT_ENV_VAR = "QUINTURB_OUT"
DEFAULT_SEED = 20_260_823


# ---------------------------------------------------------------------------
# artifact plumbing
# ---------------------------------------------------------------------------


def _fmt_cell(value) -> str:
    """Canonical cell rendering: shortest round-trip floats, plain ints."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(path: str, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt_cell(cell) for cell in row) + "\n")


def _write_manifest(path: str, doc: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated invocation: subcommand, its options and the shared knobs."""

    subcommand: str
    options: dict
    out_dir: str
    workers: int
    seed: int
    cap_trees: int
    cap_lattice: int


class _Table:
    """One subcommand result: documented columns, rows, manifest extras."""

    def __init__(
        self,
        header: Sequence[str],
        rows: Sequence[Sequence],
        extra: dict | None = None,
    ):
        self.header = list(header)
        self.rows = [list(r) for r in rows]
        self.extra = extra or {}


# ---------------------------------------------------------------------------
# profiles and option parsing helpers
# ---------------------------------------------------------------------------


def _profile_from(
    options: dict, prefix: str = "profile", default_kind: str = "smooth_bump"
) -> Profile:
    kind = options.get(f"{prefix}_kind", default_kind)
    radius = float(options.get(f"{prefix}_radius", 0.5))
    height = float(options.get(f"{prefix}_height", 1.0))
    return Profile(kind, radius=radius, height=height)


def _float_list(text) -> list[float]:
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    return [float(tok) for tok in str(text).split(",") if tok != ""]


def _int_list(text) -> list[int]:
    if isinstance(text, (list, tuple)):
        return [int(v) for v in text]
    return [int(tok) for tok in str(text).split(",") if tok != ""]


def _exact_time(value) -> Fraction:
    """Times are parsed exactly (the phase reduction needs rationals)."""
    return Fraction(str(value))


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _run_residues(cfg: ExperimentConfig) -> _Table:
    counts = residue_count()
    rows = [(r, c) for r, c in enumerate(counts)]
    return _Table(["residue", "count"], rows, {"counts": list(counts)})


def _run_trees(cfg: ExperimentConfig) -> _Table:
    n = int(cfg.options.get("n", 3))
    trees = enumerate_trees(n, cap=cfg.cap_trees)
    rows = []
    for idx, tree in enumerate(trees):
        rows.append(
            (
                idx,
                n,
                sign_exponent(tree),
                len(linear_extensions(tree, cap=cfg.cap_trees)),
                render_tree(tree),
            )
        )
    return _Table(
        ["index", "nodes", "sign_exponent", "linear_extensions", "rendering"],
        rows,
        {"count": len(trees)},
    )


def _run_gm(cfg: ExperimentConfig) -> _Table:
    instances = int(cfg.options.get("instances", 24))
    rng = np.random.default_rng(cfg.seed)
    rows = []
    worst = 0.0
    for idx in range(instances):
        m = int(rng.integers(1, 5))
        freqs = []
        for _ in range(m):
            num = int(rng.integers(-24, 25)) or 1
            den = int(rng.integers(1, 9))
            freqs.append(Fraction(num, den))
        t = float(rng.uniform(0.2, 5.0))
        value = g_m(freqs, t)
        oracle = g_m_oracle(freqs, t)
        err = abs(value - oracle)
        worst = max(worst, err)
        tag = classify_leading(freqs)
        rows.append(
            (
                idx,
                m,
                ";".join(str(w) for w in freqs),
                t,
                value.real,
                value.imag,
                err,
                tag.name,
            )
        )
    return _Table(
        [
            "instance",
            "chain_length",
            "frequencies",
            "t",
            "value_re",
            "value_im",
            "abs_err_vs_oracle",
            "leading_case",
        ],
        rows,
        {"worst_abs_err": worst},
    )


def _eval_at(value, t: float) -> complex:
    if value is None:
        return 0.0 + 0.0j
    if hasattr(value, "evaluate"):
        return complex(value.evaluate(t))
    return complex(value)


def _run_picard(cfg: ExperimentConfig) -> _Table:
    lattice_size = int(cfg.options.get("lattice_size", 2))
    orders = _int_list(cfg.options.get("orders", "1,2"))
    times = _float_list(cfg.options.get("times", "0.5,1.0"))
    params = RegimeParams(lattice_size=lattice_size)
    if "profile_radius" not in cfg.options:
        # default wide enough that several lattice modes carry data
        cfg.options["profile_radius"] = 0.75
    profile = _profile_from(cfg.options, default_kind="poly_bump")
    rows = []
    worst = 0.0
    for n in orders:
        state = picard_recursion(n, params, profile, workers=cfg.workers)
        degree = 4 * n + 1
        for k in sorted(state.coefficients.mode_set()):
            by_tree = tree_sum(n, k, params, profile, cap=cfg.cap_lattice)
            by_state = {
                alpha: value
                for alpha, value in state.mode_coefficients(k).items()
                if alpha.degree == degree
            }
            if not by_tree and not by_state:
                continue
            for t in times:
                keys = set(by_tree) | set(by_state)
                vals = {
                    alpha: (
                        _eval_at(by_state.get(alpha), t),
                        _eval_at(by_tree.get(alpha), t),
                    )
                    for alpha in keys
                }
                scale = max(
                    (max(abs(a), abs(b)) for a, b in vals.values()),
                    default=0.0,
                )
                # coefficients many orders below the mode's scale are
                # cancellation residue; compare them as zeros
                floor = 1e-12 * scale
                max_rel = 0.0
                for a, b in vals.values():
                    mag = max(abs(a), abs(b))
                    if mag < floor:
                        continue
                    max_rel = max(max_rel, abs(a - b) / mag)
                worst = max(worst, max_rel)
                rows.append((n, k, t, len(keys), max_rel))
    return _Table(
        ["order", "mode", "t", "coefficient_count", "max_rel_diff"],
        rows,
        {"worst_rel_diff": worst},
    )


def _run_mass(cfg: ExperimentConfig) -> _Table:
    lattice_size = int(cfg.options.get("lattice_size", 4))
    samples = int(cfg.options.get("samples", 100_000))
    step = float(cfg.options.get("fd_step", 1e-5))
    params = RegimeParams(lattice_size=lattice_size, mu=4, nu=64)
    profile = _profile_from(cfg.options)
    rng = np.random.default_rng(cfg.seed)
    cases = int(cfg.options.get("cases", 5))
    ks = rng.integers(-2, 3, size=cases)
    ts = rng.uniform(0.3, 1.5, size=cases)
    rows = []
    for k, t in zip(ks, ts):
        k = int(k)
        t = float(t)
        exact = mass_derivative_n1(k, t, params, profile, include_remainder=True)
        fd = (
            mass_v1(k, t + step, params, profile)
            - mass_v1(k, t - step, params, profile)
        ) / (2.0 * step)
        rel = abs(exact - fd) / max(abs(exact), 1e-300)
        mass_exact = mass_v1(k, t, params, profile)
        mc, se = monte_carlo_mass(1, k, t, params, profile, samples, cfg.seed)
        z = abs(mc - mass_exact) / se if se > 0 else math.inf
        rows.append((k, t, exact, fd, rel, mass_exact, mc, se, z))
    return _Table(
        [
            "mode",
            "t",
            "derivative_exact",
            "derivative_fd",
            "rel_diff",
            "mass_exact",
            "mass_mc",
            "mass_mc_se",
            "z_score",
        ],
        rows,
        {"samples": samples},
    )


def _run_kinetic_sum(cfg: ExperimentConfig) -> _Table:
    sizes = _int_list(cfg.options.get("sizes", "16,32,64"))
    t = _exact_time(cfg.options.get("t", "1/2"))
    rho = float(cfg.options.get("rho", 8.0))
    mu = cfg.options.get("mu", 8)
    nu = cfg.options.get("nu", 1_000_000)
    with_oracle = bool(cfg.options.get("oracle", True))
    mc_samples = int(cfg.options.get("mc_samples", 2_000_000))
    profile = _profile_from(cfg.options)
    f = _profile_from(cfg.options, "test")
    oracle = math.nan
    if with_oracle:
        qcfg = QuadConfig(mc_samples=mc_samples, mc_seed=cfg.seed, tolerance=0.05)
        oracle = continuum_integral(
            t,
            rho,
            mu,
            profile,
            f,
            f,
            qcfg,
            region="sigma_resolved",
            nu=float(nu),
            workers=cfg.workers,
        )
    rows = []
    for size in sizes:
        params = RegimeParams(lattice_size=size, rho=rho, mu=mu, nu=nu)
        regime = EpsilonRegime.from_params(size, rho)
        value = i_l_pairing(
            t, regime, params, profile, f, f, workers=cfg.workers
        )
        gap = abs(value - oracle) if with_oracle else math.nan
        rows.append((size, value, oracle, gap))
    return _Table(
        ["lattice_size", "pairing_value", "continuum_oracle", "abs_gap"],
        rows,
        {"t": str(t), "rho": rho, "mu": str(mu), "nu": str(nu)},
    )


def _run_kinetic_limit(cfg: ExperimentConfig) -> _Table:
    rhos = _float_list(cfg.options.get("rhos", "100,1000,10000"))
    t = _exact_time(cfg.options.get("t", "1/2"))
    mu = float(cfg.options.get("mu", 1000.0))
    branch = str(cfg.options.get("branch", "dyadic"))
    profile = _profile_from(cfg.options)
    f = _profile_from(cfg.options, "test")
    detail = delta_reduced_detailed(
        profile, f, f, branch=branch, workers=cfg.workers
    )
    delta_value = detail["value"]
    rows = []
    for rho in rhos:
        value = continuum_integral(
            t, rho, mu, profile, f, f, branch=branch, workers=cfg.workers
        )
        rel = abs(value - delta_value) / max(abs(delta_value), 1e-300)
        rows.append((rho, value, delta_value, rel))
    return _Table(
        ["rho", "oscillatory_value", "resonant_limit", "rel_gap"],
        rows,
        {
            "delta_detail": {
                key: detail[key]
                for key in ("eta_levels", "values", "extrapolations", "second_order", "drift")
            },
            "branch": branch,
        },
    )


def _run_regime(cfg: ExperimentConfig) -> _Table:
    exponents = {
        "alpha_nu": float(cfg.options.get("alpha_nu", 0.4)),
        "beta_mu": float(cfg.options.get("beta_mu", 0.3)),
        "gamma_rho": float(cfg.options.get("gamma_rho", 0.05)),
        "alpha": float(cfg.options.get("alpha", 0.2)),
    }
    report = regime_check(exponents)
    rows = [
        (c.name, c.symbolic_pass, c.numeric_pass, c.passed)
        for c in report.conditions
    ]
    return _Table(
        ["condition", "symbolic_pass", "numeric_pass", "passed"],
        rows,
        {"report": report.to_document(), "all_pass": report.all_pass},
    )


def _run_discontinuity(cfg: ExperimentConfig) -> _Table:
    net_b, ratio = third_case_coefficients()
    dyadic = kinetic_coefficient("dyadic")
    third = kinetic_coefficient("third")
    rows = [
        ("dyadic_coefficient", dyadic),
        ("third_coefficient", third),
        ("ratio", ratio),
        ("net_cosine_weight", net_b),
    ]
    return _Table(["quantity", "value"], rows, {"ratio": ratio})


_SUBCOMMANDS: dict[str, Callable[[ExperimentConfig], _Table]] = {
    "residues": _run_residues,
    "trees": _run_trees,
    "gm": _run_gm,
    "picard": _run_picard,
    "mass": _run_mass,
    "kinetic-sum": _run_kinetic_sum,
    "kinetic-limit": _run_kinetic_limit,
    "regime": _run_regime,
    "discontinuity": _run_discontinuity,
}

_SUBCOMMAND_OPTIONS: dict[str, tuple[str, ...]] = {
    "residues": (),
    "trees": ("n",),
    "gm": ("instances",),
    "picard": (
        "lattice_size",
        "orders",
        "times",
        "profile_kind",
        "profile_radius",
        "profile_height",
    ),
    "mass": (
        "lattice_size",
        "samples",
        "fd_step",
        "cases",
        "profile_kind",
        "profile_radius",
        "profile_height",
    ),
    "kinetic-sum": (
        "sizes",
        "t",
        "rho",
        "mu",
        "nu",
        "oracle",
        "mc_samples",
        "profile_kind",
        "profile_radius",
        "profile_height",
        "test_kind",
        "test_radius",
        "test_height",
    ),
    "kinetic-limit": (
        "rhos",
        "t",
        "mu",
        "branch",
        "profile_kind",
        "profile_radius",
        "profile_height",
        "test_kind",
        "test_radius",
        "test_height",
    ),
    "regime": ("alpha_nu", "beta_mu", "gamma_rho", "alpha"),
    "discontinuity": (),
}

_GLOBAL_KEYS = ("subcommand", "out", "workers", "seed", "cap_trees", "cap_lattice")


# ---------------------------------------------------------------------------
# configuration assembly
# ---------------------------------------------------------------------------


def _load_config_document(path: str | None) -> dict:
    if path is None:
        return {}
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict):
        raise DomainError("config document must be a JSON object")
    return doc


def build_config(args: argparse.Namespace) -> ExperimentConfig:
    doc = _load_config_document(args.config)
    sub = args.subcommand or doc.get("subcommand")
    if sub not in _SUBCOMMANDS:
        raise DomainError(f"unknown or missing subcommand {sub!r}")
    allowed = set(_GLOBAL_KEYS) | set(_SUBCOMMAND_OPTIONS[sub])
    unknown = sorted(set(doc) - allowed)
    if unknown:
        raise DomainError(f"unknown config keys for {sub}: {', '.join(unknown)}")
    options = {k: doc[k] for k in _SUBCOMMAND_OPTIONS[sub] if k in doc}
    for key in _SUBCOMMAND_OPTIONS[sub]:
        flag = getattr(args, key.replace("-", "_"), None)
        if flag is not None:
            options[key] = flag
    out_dir = (
        args.out
        or doc.get("out")
        or os.environ.get(OUT_ENV_VAR)
        or os.getcwd()
    )
    workers = args.workers if args.workers is not None else doc.get("workers")
    if workers is None:
        workers = os.cpu_count() or 1
    seed = args.seed if args.seed is not None else doc.get("seed", DEFAULT_SEED)
    cap_trees = (
        args.cap_trees
        if args.cap_trees is not None
        else doc.get("cap_trees", DEFAULT_TREE_CAP)
    )
    cap_lattice = (
        args.cap_lattice
        if args.cap_lattice is not None
        else doc.get("cap_lattice", DEFAULT_TUPLE_CAP)
    )
    return ExperimentConfig(
        subcommand=sub,
        options=options,
        out_dir=str(out_dir),
        workers=int(workers),
        seed=int(seed),
        cap_trees=int(cap_trees),
        cap_lattice=int(cap_lattice),
    )


def _config_echo(cfg: ExperimentConfig) -> dict:
    return {
        "subcommand": cfg.subcommand,
        "options": dict(sorted(cfg.options.items())),
        "out": cfg.out_dir,
        "workers": cfg.workers,
        "seed": cfg.seed,
        "cap_trees": cfg.cap_trees,
        "cap_lattice": cfg.cap_lattice,
    }


def run(cfg: ExperimentConfig) -> tuple[str, str]:
    """Execute one experiment; returns the (csv, manifest) paths."""
    started = time.perf_counter()
    table = _SUBCOMMANDS[cfg.subcommand](cfg)
    os.makedirs(cfg.out_dir, exist_ok=True)
    stem = cfg.subcommand.replace("-", "_")
    csv_path = os.path.join(cfg.out_dir, f"{stem}.csv")
    manifest_path = os.path.join(cfg.out_dir, f"{stem}_manifest.json")
    write_csv(csv_path, table.header, table.rows)
    manifest = {
        "config": _config_echo(cfg),
        "columns": table.header,
        "row_count": len(table.rows),
        "versions": {
            "package": __version__,
            "numpy": np.__version__,
            "python": sys.version.split()[0],
            "kernel_lane": _kern.LANE,
        },
        "wall_time_s": round(time.perf_counter() - started, 6),
    }
    manifest.update(table.extra)
    _write_manifest(manifest_path, manifest)
    return csv_path, manifest_path


# ---------------------------------------------------------------------------
# argument parser
# ---------------------------------------------------------------------------


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON config document (flags override it)")
    parser.add_argument(
        "--out",
        help=f"output directory (default: ${OUT_ENV_VAR} or the working directory)",
    )
    parser.add_argument(
        "--workers",
        type=int,
        help="worker count for parallel folds (default: available parallelism)",
    )
    parser.add_argument("--seed", type=int, help="base seed for randomized tables")
    parser.add_argument(
        "--cap-trees", type=int, help="hard cap on tree enumeration size"
    )
    parser.add_argument(
        "--cap-lattice", type=int, help="hard cap on lattice tuple enumeration"
    )


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quinturb",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    subs = parser.add_subparsers(dest="subcommand")

    sp = subs.add_parser(
        "residues",
        help="mod-3 residue class counts (columns: residue, count)",
    )
    _add_common(sp)

    sp = subs.add_parser(
        "trees",
        help=(
            "enumerate the quintic trees at one node count (columns: index, "
            "nodes, sign_exponent, linear_extensions, rendering)"
        ),
    )
    sp.add_argument("--n", type=int, help="node count (default 3)")
    _add_common(sp)

    sp = subs.add_parser(
        "gm",
        help=(
            "chain-integral audit on seeded random instances (columns: "
            "instance, chain_length, frequencies, t, value_re, value_im, "
            "abs_err_vs_oracle, leading_case)"
        ),
    )
    sp.add_argument("--instances", type=int, help="instance count (default 24)")
    _add_common(sp)

    sp = subs.add_parser(
        "picard",
        help=(
            "tree-sum vs recursion coefficient diff report (columns: order, "
            "mode, t, coefficient_count, max_rel_diff)"
        ),
    )
    sp.add_argument("--lattice-size", type=int, dest="lattice_size")
    sp.add_argument("--orders", help="comma-separated orders (default 1,2)")
    sp.add_argument("--times", help="comma-separated times (default 0.5,1.0)")
    sp.add_argument("--profile-kind", dest="profile_kind")
    sp.add_argument("--profile-radius", type=float, dest="profile_radius")
    sp.add_argument("--profile-height", type=float, dest="profile_height")
    _add_common(sp)

    sp = subs.add_parser(
        "mass",
        help=(
            "first-order mass derivative tables (columns: mode, t, "
            "derivative_exact, derivative_fd, rel_diff, mass_exact, mass_mc, "
            "mass_mc_se, z_score)"
        ),
    )
    sp.add_argument("--lattice-size", type=int, dest="lattice_size")
    sp.add_argument("--samples", type=int, help="Monte Carlo samples")
    sp.add_argument("--cases", type=int, help="number of random (mode, t) cases")
    sp.add_argument("--fd-step", type=float, dest="fd_step")
    sp.add_argument("--profile-kind", dest="profile_kind")
    sp.add_argument("--profile-radius", type=float, dest="profile_radius")
    sp.add_argument("--profile-height", type=float, dest="profile_height")
    _add_common(sp)

    sp = subs.add_parser(
        "kinetic-sum",
        help=(
            "lattice pairing sums over a size ladder (columns: lattice_size, "
            "pairing_value, continuum_oracle, abs_gap)"
        ),
    )
    sp.add_argument("--sizes", help="comma-separated lattice sizes")
    sp.add_argument("--t", help="exact time (rational, e.g. 1/2)")
    sp.add_argument("--rho", type=float)
    sp.add_argument("--mu", type=int)
    sp.add_argument("--nu", type=float)
    sp.add_argument("--mc-samples", type=int, dest="mc_samples")
    sp.add_argument(
        "--no-oracle",
        dest="oracle",
        action="store_false",
        default=None,
        help="skip the continuum oracle column",
    )
    sp.add_argument("--profile-kind", dest="profile_kind")
    sp.add_argument("--profile-radius", type=float, dest="profile_radius")
    sp.add_argument("--profile-height", type=float, dest="profile_height")
    sp.add_argument("--test-kind", dest="test_kind")
    sp.add_argument("--test-radius", type=float, dest="test_radius")
    sp.add_argument("--test-height", type=float, dest="test_height")
    _add_common(sp)

    sp = subs.add_parser(
        "kinetic-limit",
        help=(
            "oscillation-rate sweep against the resonant-manifold limit "
            "(columns: rho, oscillatory_value, resonant_limit, rel_gap)"
        ),
    )
    sp.add_argument("--rhos", help="comma-separated oscillation rates")
    sp.add_argument("--t", help="exact time (rational, e.g. 1/2)")
    sp.add_argument("--mu", type=float)
    sp.add_argument("--branch", choices=("dyadic", "third"))
    sp.add_argument("--profile-kind", dest="profile_kind")
    sp.add_argument("--profile-radius", type=float, dest="profile_radius")
    sp.add_argument("--profile-height", type=float, dest="profile_height")
    sp.add_argument("--test-kind", dest="test_kind")
    sp.add_argument("--test-radius", type=float, dest="test_radius")
    sp.add_argument("--test-height", type=float, dest="test_height")
    _add_common(sp)

    sp = subs.add_parser(
        "regime",
        help=(
            "scaling-regime assumption report (columns: condition, "
            "symbolic_pass, numeric_pass, passed)"
        ),
    )
    sp.add_argument("--alpha-nu", type=float, dest="alpha_nu")
    sp.add_argument("--beta-mu", type=float, dest="beta_mu")
    sp.add_argument("--gamma-rho", type=float, dest="gamma_rho")
    sp.add_argument("--alpha", type=float)
    _add_common(sp)

    sp = subs.add_parser(
        "discontinuity",
        help=(
            "dyadic vs one-third kinetic constants side by side (columns: "
            "quantity, value)"
        ),
    )
    _add_common(sp)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    if args.subcommand is None and getattr(args, "config", None) is None:
        parser.print_help()
        return EXIT_DOMAIN
    try:
        cfg = build_config(args)
        csv_path, manifest_path = run(cfg)
    except (DomainError, ValueError) as exc:
        print(json.dumps({"error": {"kind": "domain", "message": str(exc)}}))
        return EXIT_DOMAIN
    except (ResourceError, NumericalError) as exc:
        doc = {"error": {"kind": "resource", "message": str(exc)}}
        partial = getattr(exc, "partial_value", None)
        if partial is not None:
            doc["error"]["partial_value"] = partial
        print(json.dumps(doc))
        return EXIT_RESOURCE
    print(json.dumps({"csv": csv_path, "manifest": manifest_path}))
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover - exercised via console script
    sys.exit(main())
