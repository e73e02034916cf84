"""Command-line entry point.

Every subcommand maps onto one library operation and writes its outputs to
files in the documented CSV/JSON formats.  Output files get a sidecar
``<out>.manifest.json`` recording the subcommand, the fully resolved
parameters, the seed, the tool version and the wall time, so any output can
be reproduced by re-invoking the subcommand with the recorded parameters.

Exit codes: 0 success, 1 domain error (bad values, failed factoring, failed
comparison), 2 usage error.

A ``--config FILE`` option valid on any subcommand supplies defaults from
``key=value`` lines (``#`` starts a comment); explicit flags override.  All
randomness inside a subcommand flows from its single ``--seed`` value: trial
i of a Monte Carlo run uses the generator seeded by
SeedSequence(entropy=seed, spawn_key=(i,)), and sampling loops consume one
sequential generator seeded directly, so parallel and serial runs agree.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

import numpy as np

from . import classical, qpf, scaling, su2, synth
from .oracle import PeriodicInput, aqft_on_periodic

try:
    from importlib.metadata import version as _pkg_version

    VERSION = _pkg_version("aqftshor")
except Exception:  # pragma: no cover - not installed
    VERSION = "0.1.0"


def _write_manifest(out_path: str, subcommand: str, ns: argparse.Namespace, t0: float) -> None:
    params = {
        k: v for k, v in sorted(vars(ns).items())
        if k not in ("func", "config") and not k.startswith("_")
    }
    manifest = {
        "subcommand": subcommand,
        "parameters": params,
        "seed": getattr(ns, "seed", None),
        "version": VERSION,
        "outputs": [out_path],
        "seconds": time.perf_counter() - t0,
    }
    with open(out_path + ".manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")


def _spec_from(ns) -> qpf.AqftSpec:
    d_max = 2 * ns.L if ns.dmax is None else ns.dmax
    return qpf.AqftSpec(ns.L, d_max, ns.variant)


def _noise_from(ns) -> qpf.NoiseModel | None:
    if not ns.sigma:
        return None
    return qpf.NoiseModel(ns.sigma, ns.trials, ns.seed or 0)


def _cmd_dist(ns) -> int:
    t0 = time.perf_counter()
    spec = _spec_from(ns)
    dist = qpf.full_distribution(ns.r, spec, _noise_from(ns))
    dist.to_csv(ns.out)
    _write_manifest(ns.out, "dist", ns, t0)
    print(f"wrote {ns.out}: total mass {dist.total_mass()!r}, useful mass {dist.useful_mass()!r}")
    return 0


def _cmd_s(ns) -> int:
    t0 = time.perf_counter()
    spec = _spec_from(ns)
    noise = _noise_from(ns)
    if noise is None:
        result = {"s": qpf.prob_useful(ns.r, spec), "stderr": 0.0}
    else:
        est = qpf.prob_useful_noisy(ns.r, spec, noise, threads=ns.threads)
        result = {"s": est.mean, "stderr": est.stderr}
    payload = {
        "L": ns.L, "r": ns.r, "d_max": spec.d_max, "variant": ns.variant,
        "sigma": ns.sigma, "trials": ns.trials if ns.sigma else None,
        "seed": ns.seed if ns.sigma else None, **result,
    }
    print(json.dumps(payload, sort_keys=True))
    if ns.out:
        with open(ns.out, "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
        _write_manifest(ns.out, "s", ns, t0)
    return 0


def _cmd_sweep(ns) -> int:
    t0 = time.perf_counter()
    d_values = [int(x) for x in ns.dmax_list.split(",")]
    points = scaling.sweep(
        range(ns.Lmin, ns.Lmax + 1), d_values, ns.variant,
        cache_dir=ns.cache_dir, threads=ns.threads,
    )
    scaling.write_sweep_csv(points, ns.out)
    _write_manifest(ns.out, "sweep", ns, t0)
    print(f"wrote {ns.out}: {len(points)} points")
    return 0


def _cmd_fit(ns) -> int:
    t0 = time.perf_counter()
    points = scaling.read_sweep_csv(ns.infile)
    fits = []
    for d in sorted({p.d_max for p in points}):
        fits.append(scaling.fit_decay([p for p in points if p.d_max == d], ns.tail).to_dict())
    text = json.dumps(fits, indent=2, sort_keys=True)
    print(text)
    if ns.out:
        with open(ns.out, "w") as fh:
            fh.write(text + "\n")
        _write_manifest(ns.out, "fit", ns, t0)
    return 0


def _cmd_check4(ns) -> int:
    with open(ns.infile) as fh:
        fits = [scaling.ScalingFit(
            d_max=f["d_max"], t=f["t"], c=f["c"], rms=f["rms"],
            window=tuple(f["window"]), n_points=f["n_points"],
        ) for f in json.load(fh)]
    rows = scaling.factor4_check(fits, ns.threshold)
    for row in rows:
        print(
            f"d_max {row['d_max_from']} -> {row['d_max_to']}: "
            f"t {row['t_from']:.4g} -> {row['t_to']:.4g}, ratio {row['ratio']:.4g} "
            f"[{'pass' if row['passed'] else 'FAIL'}]"
        )
    return 0 if all(r["passed"] for r in rows) else 1


def _cmd_lmax(ns) -> int:
    if ns.invert:
        if ns.L is None:
            raise ValueError("--invert requires --L")
        print(scaling.invert_lmax(ns.L, ns.fmax))
    else:
        if ns.dmax is None:
            raise ValueError("need --dmax (or --invert with --L)")
        print(scaling.lmax(ns.dmax, ns.fmax))
    return 0


def _cmd_cf(ns) -> int:
    expansion = classical.cf_expand(ns.numerator, ns.denominator)
    print(" ".join(str(q) for q in expansion.quotients))
    print(" ".join(f"{c}/{d}" for c, d in expansion.convergents))
    return 0


def _cmd_order(ns) -> int:
    r = classical.find_order(ns.m, ns.N, ns.j)
    print(json.dumps({"N": ns.N, "m": ns.m, "j": ns.j, "r": r}))
    return 0


def _cmd_factor(ns) -> int:
    instance = classical.FactoringInstance(ns.N, ns.m)
    report = classical.shor_factor(
        instance, sampler=ns.sampler, f_max=ns.fmax, seed=ns.seed,
        d_max=ns.dmax, variant=ns.variant,
    )
    print(json.dumps(report.to_dict(), sort_keys=True))
    return 0 if report.success else 1


def _cmd_synth(ns) -> int:
    t0 = time.perf_counter()
    config = synth.SearchConfig(
        target=su2.rotation(ns.d), max_length=ns.max_len, strategy=ns.strategy,
        epsilon=ns.epsilon, alphabet=ns.alphabet,
    )
    result = synth.search(config)
    payload = {"target_d": ns.d, "baseline": synth.baseline_distance(config.target), **result.to_dict()}
    text = json.dumps(payload, indent=2, sort_keys=True)
    print(text)
    if ns.out:
        with open(ns.out, "w") as fh:
            fh.write(text + "\n")
        _write_manifest(ns.out, "synth", ns, t0)
    return 0


def _oracle_case(L, r, d_max, variant):
    spec = qpf.AqftSpec(L, d_max, variant)
    formula = qpf.full_distribution(r, spec)
    circuit = aqft_on_periodic(PeriodicInput(L, r, 0), spec)
    gap = float(np.abs(formula.probabilities - circuit.probabilities).max())
    mass_gap = abs(formula.total_mass() - formula.expected_mass())
    return gap, mass_gap


def _cmd_oracle_compare(ns) -> int:
    from concurrent.futures import ThreadPoolExecutor

    if ns.all:
        cases = [(ns.L, r, d) for r in range(2, 1 << ns.L) for d in range(0, 2 * ns.L + 1)]
    else:
        if ns.r is None or ns.dmax is None:
            raise ValueError("need --all or both --r and --dmax")
        cases = [(ns.L, ns.r, ns.dmax)]
    workers = ns.threads or os.cpu_count() or 1
    with ThreadPoolExecutor(max_workers=min(workers, len(cases))) as pool:
        gaps = list(pool.map(lambda c: _oracle_case(*c, ns.variant), cases))
    worst = max(g for g, _ in gaps)
    worst_mass = max(m for _, m in gaps)
    ok = worst <= ns.tol and worst_mass <= ns.tol
    print(
        f"{len(cases)} cases: max |formula - state-vector| = {worst:.3e}, "
        f"max mass error = {worst_mass:.3e}, tol = {ns.tol:.1e} [{'ok' if ok else 'FAIL'}]"
    )
    return 0 if ok else 1


def _add_spec_flags(p: argparse.ArgumentParser, with_noise=True) -> None:
    p.add_argument("--L", type=int, required=True, help="bit length of the integer (register is 2L qubits)")
    p.add_argument("--r", type=int, required=True, help="period")
    p.add_argument("--dmax", type=int, default=None, help="rotation cutoff; default 2L (full depth)")
    p.add_argument("--variant", choices=qpf.VARIANTS, default="physical")
    if with_noise:
        p.add_argument("--sigma", type=float, default=0.0, help="per-gate angle error std dev (radians)")
        p.add_argument("--trials", type=int, default=100)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--threads", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aqftshor",
        description="Period-finding statistics, order recovery and rotation synthesis "
        "under a coarse controlled-rotation gate set.",
    )
    parser.add_argument("--version", action="version", version=f"aqftshor {VERSION}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("dist", help="export a full outcome distribution as CSV")
    _add_spec_flags(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_dist)

    p = sub.add_parser("s", help="useful-output probability, optionally under gate noise")
    _add_spec_flags(p)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_s)

    p = sub.add_parser("sweep", help="grid of s at the characteristic period r = 2^(L-1)+2")
    p.add_argument("--Lmin", type=int, required=True)
    p.add_argument("--Lmax", type=int, required=True)
    p.add_argument("--dmax-list", dest="dmax_list", required=True, help="comma-separated d_max values")
    p.add_argument("--variant", choices=qpf.VARIANTS, default="physical")
    p.add_argument("--cache-dir", dest="cache_dir", default=None)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("fit", help="fit s ~ c 2^(-L/t) per d_max from a sweep CSV")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--tail", type=float, default=0.5, help="fraction of largest-L points to fit")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser("check4", help="check t ratios between consecutive d_max fits")
    p.add_argument("--in", dest="infile", required=True, help="fit JSON from the fit subcommand")
    p.add_argument("--threshold", type=float, default=3.5)
    p.set_defaults(func=_cmd_check4)

    p = sub.add_parser("lmax", help="largest factorable length for a cutoff, or the inverse")
    p.add_argument("--dmax", type=int, default=None)
    p.add_argument("--fmax", type=float, required=True, help="acceptable repetitions of period finding")
    p.add_argument("--invert", action="store_true", help="find the smallest d_max reaching --L")
    p.add_argument("--L", type=int, default=None)
    p.set_defaults(func=_cmd_lmax)

    p = sub.add_parser("cf", help="continued-fraction expansion and convergents")
    p.add_argument("numerator", type=int)
    p.add_argument("denominator", type=int)
    p.set_defaults(func=_cmd_cf)

    p = sub.add_parser("order", help="recover the order of m mod N from measured outcomes")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--j", type=int, nargs="+", required=True, help="measured outcomes")
    p.set_defaults(func=_cmd_order)

    p = sub.add_parser("factor", help="end-to-end factoring against a simulated outcome source")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--fmax", type=int, default=100, help="total outcome budget")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--sampler", choices=("formula", "oracle"), default="formula")
    p.add_argument("--dmax", type=int, default=None)
    p.add_argument("--variant", choices=qpf.VARIANTS, default="physical")
    p.set_defaults(func=_cmd_factor)

    p = sub.add_parser("synth", help="search for a gate word approximating the pi/2^d rotation")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--max-len", dest="max_len", type=int, required=True)
    p.add_argument("--strategy", choices=synth.STRATEGIES, default="exhaustive")
    p.add_argument("--epsilon", type=float, default=1e-4)
    p.add_argument("--alphabet", choices=synth.ALPHABETS, default="full")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("oracle-compare", help="closed form vs gate-by-gate state vector")
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--all", action="store_true", help="every r in [2, 2^L) and d_max in [0, 2L]")
    p.add_argument("--r", type=int, default=None)
    p.add_argument("--dmax", type=int, default=None)
    p.add_argument("--variant", choices=qpf.VARIANTS, default="physical")
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--threads", type=int, default=None)
    p.set_defaults(func=_cmd_oracle_compare)

    for sp in sub.choices.values():
        sp.add_argument("--config", default=None, help="key=value defaults file; flags override")
    return parser


def _load_config(path: str) -> dict[str, str]:
    pairs = {}
    with open(path) as fh:
        for line_no, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{line_no}: expected key=value")
            key, value = line.split("=", 1)
            pairs[key.strip()] = value.strip()
    return pairs


def _inject_config(parser: argparse.ArgumentParser, argv: list[str]) -> list[str]:
    """Turn config-file pairs into flags inserted right after the subcommand."""
    if "--config" not in argv or not argv:
        return argv
    i = argv.index("--config")
    if i + 1 >= len(argv):
        return argv  # let argparse report the missing value
    pairs = _load_config(argv[i + 1])
    sub_actions = next(
        a for a in parser._actions if isinstance(a, argparse._SubParsersAction)
    )
    name = argv[0]
    if name not in sub_actions.choices:
        return argv
    subparser = sub_actions.choices[name]
    valid = subparser._option_string_actions
    injected: list[str] = []
    for key, value in pairs.items():
        flag = f"--{key}"
        action = valid.get(flag)
        if action is None:
            continue  # keys for other subcommands are allowed in one shared file
        if action.nargs == 0:
            if value.lower() in ("1", "true", "yes", "on"):
                injected.append(flag)
        else:
            injected.extend([flag] + value.split())
    return [name] + injected + argv[1:]


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        argv = _inject_config(parser, argv)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    ns = parser.parse_args(argv)
    try:
        return ns.func(ns)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
