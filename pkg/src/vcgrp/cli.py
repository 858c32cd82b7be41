"""Command line front end.

Every subcommand loads JSON descriptors, runs one library entry point and
prints a canonical JSON report (or CSV for grid runs).  Rational parameters
are written as "p/q"; decimal strings like "0.5" are converted exactly.
Exit codes: 0 on success (and, for run/selftest, only when every hard check
passed), 1 when a check or criterion failed, 2 on bad input.
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction

from . import serialize
from .almost import (
    DEFAULT_C_SAMPLE,
    DEFAULT_RETRIES,
    DEFAULT_SAMPLE_CAP,
    bootstrap_bohr_periods,
    exact_almost_periods,
    sample_almost_periods,
)
from .bohr import BohrSpec, find_regular_dilate, is_regular, realize, size_lower_bound_check
from .experiment import ExperimentConfig, run as run_experiment
from .fourier import chang_cover, large_spectrum
from .freiman import FreimanMap, is_s_isomorphism, model_embed, two_isomorphism_violation
from .groups import GroupError
from .regularity import (
    bogolyubov_bohr,
    bogolyubov_subspace,
    regularity_bohr,
    regularity_subspace,
)
from .sets import CountFn, GSet, SetError, skew_convolve_counts
from .stability import DEFAULT_NODE_BUDGET, is_k_stable, stability_vcd_relation
from .util import canonical_dumps, parse_rational, to_jsonable
from .vc import vcd, vcd_global, vcdr


def _rational(text: str) -> Fraction:
    """Accept 'p/q', integers, or exact decimal strings like '0.25'."""
    try:
        return parse_rational(text)
    except (ValueError, TypeError):
        return Fraction(text)


def _default_seed() -> int:
    return int(os.environ.get("VCGRP_SEED", "0"))


def _emit(payload, args, code: int = 0) -> int:
    text = canonical_dumps(to_jsonable(payload)) + "\n"
    out = getattr(args, "out", None)
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=None,
                   help="RNG seed (default: $VCGRP_SEED or 0)")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--out", default=None, help="write the report here instead of stdout")


def _seed_of(args) -> int:
    return args.seed if args.seed is not None else _default_seed()


# -- subcommand handlers -------------------------------------------------------


def _cmd_vcd(args) -> int:
    A = serialize.load_set(args.set)
    B = serialize.load_set(args.other) if args.other else None
    if args.scope == "global":
        res = vcd_global(A, cap=args.cap)
    elif args.scope == "right":
        res = vcdr(A, B, cap=args.cap)
    else:
        res = vcd(A, B, scope="restricted", cap=args.cap)
    return _emit(res.to_dict(), args)


def _cmd_conv(args) -> int:
    A = serialize.load_set(args.set)
    B = serialize.load_set(args.other) if args.other else A
    counts = skew_convolve_counts(A, B)
    mass = int(sum(int(v) for v in counts.values))
    payload = {
        "counts": [int(v) for v in counts.values],
        "support_size": int(sum(1 for v in counts.values if v)),
        "mass": mass,
        "mass_conserved": mass == A.card * B.card,
    }
    return _emit(payload, args, 0 if payload["mass_conserved"] else 1)


def _cmd_periods(args) -> int:
    A = serialize.load_set(args.set)
    B = serialize.load_set(args.other) if args.other else A
    eps = _rational(args.epsilon)
    if args.bohr:
        rep = bootstrap_bohr_periods(
            A, B, eps, d_hint=args.d_hint, seed=_seed_of(args),
            c_sample=args.c_sample, retries=args.retries, threads=args.threads,
            sample_cap=args.sample_cap,
        )
        return _emit(rep.to_dict(), args, 0 if rep.all_valid else 1)
    if args.sample:
        S = serialize.load_set(args.scope) if args.scope else GSet.full(A.group)
        rep = sample_almost_periods(
            A, B, S, eps, args.d_hint if args.d_hint is not None else 1,
            _seed_of(args), c_sample=args.c_sample, retries=args.retries,
            k=args.k, threads=args.threads, sample_cap=args.sample_cap,
        )
        return _emit(rep.to_dict(), args)
    T = exact_almost_periods(A, B, eps, threads=args.threads)
    return _emit({"periods": T.to_dict(), "size": T.card}, args)


def _cmd_bohr(args) -> int:
    grp = serialize.load_group(args.group)
    freqs = serialize.loads(args.freqs, "--freqs")
    if not isinstance(freqs, list):
        raise serialize.DescriptorError("--freqs must be a JSON list of dual indices or coordinate rows")
    spec = BohrSpec(grp, freqs, _rational(args.radius))
    if args.regular_dilate:
        spec = find_regular_dilate(spec)
    B = realize(spec)
    payload = {
        "spec": spec.to_dict(),
        "is_regular": is_regular(spec),
        "set": B.to_dict(),
        "size": B.card,
    }
    code = 0
    if args.check_size_bound:
        payload["size_bound"] = size_lower_bound_check(spec)
        if not payload["size_bound"]["provable_pass"]:
            code = 1
    return _emit(payload, args, code)


def _cmd_spectrum(args) -> int:
    T = serialize.load_set(args.set)
    f = CountFn.indicator(T) if args.indicator else CountFn.uniform_measure(T)
    spec = large_spectrum(T.group, f, _rational(args.threshold))
    payload = spec.to_dict()
    if args.chang:
        payload["cover"] = chang_cover(spec).to_dict()
    return _emit(payload, args)


def _cmd_regularity(args) -> int:
    A = serialize.load_set(args.set)
    eps = _rational(args.epsilon)
    kwargs = dict(
        seed=_seed_of(args), c_sample=args.c_sample, retries=args.retries,
        threads=args.threads, sample_cap=args.sample_cap,
    )
    if args.subspace:
        dec = regularity_subspace(A, eps, **kwargs)
    else:
        dec = regularity_bohr(A, eps, _rational(args.nu), **kwargs)
    return _emit(dec.to_dict(), args, 0 if all(dec.checks.values()) else 1)


def _cmd_bogolyubov(args) -> int:
    A = serialize.load_set(args.set)
    seed = _seed_of(args)
    if args.subspace or args.doubling:
        mode = "doubling" if args.doubling else "dense"
        rep = bogolyubov_subspace(A, seed=seed, mode=mode, s=args.s, threads=args.threads)
        return _emit(rep.to_dict(), args, 0 if rep.contained else 1)
    rep = bogolyubov_bohr(A, seed=seed, threads=args.threads)
    return _emit(rep.to_dict(), args, 0 if rep.contained else 1)


def _cmd_model(args) -> int:
    A = serialize.load_set(args.set)
    emb = model_embed(A, s=args.s, seed=_seed_of(args), max_attempts=args.max_attempts)
    ok = emb.check.ok and emb.bound_ok
    return _emit(emb.to_dict(), args, 0 if ok else 1)


def _cmd_freiman_check(args) -> int:
    phi = FreimanMap.from_dict(serialize.load_json(args.map))
    s = args.s if args.s is not None else phi.s
    if s == 2:
        phi_b = FreimanMap.from_dict(serialize.load_json(args.map_b)) if args.map_b else None
        witness = two_isomorphism_violation(phi, phi_b)
        payload = {
            "s": 2,
            "ok": witness is None,
            "verified": True,
            "method": "quotient-partition",
            "witness": list(witness) if witness is not None else None,
        }
        return _emit(payload, args, 0 if witness is None else 1)
    check = is_s_isomorphism(phi, s=s, trials=args.trials, seed=_seed_of(args))
    payload = {"s": s, **check.to_dict()}
    return _emit(payload, args, 0 if check.ok else 1)


def _cmd_stability(args) -> int:
    A = serialize.load_set(args.set)
    if args.k_max is not None:
        rep = stability_vcd_relation(A, args.k_max, node_budget=args.budget)
        return _emit(rep.to_dict(), args, 0 if rep.relation_checked else 1)
    rep = is_k_stable(A, args.k, node_budget=args.budget)
    return _emit(rep.to_dict(), args, 0 if rep.status != "unknown" else 1)


def _cmd_run(args) -> int:
    cfg_data = serialize.load_json(args.config)
    cfg = ExperimentConfig.from_dict(cfg_data)
    report = run_experiment(cfg, threads=args.threads)
    fmt = args.format if args.format != "json" or cfg.format == "json" else cfg.format
    text = report.to_csv() if fmt == "csv" else report.canonical() + "\n"
    out = args.out or cfg.out
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if report.all_pass else 1


def _cmd_selftest(args) -> int:
    from .selftest import run_selftest

    report = run_selftest(level=args.level, threads=args.threads,
                          stream=sys.stdout, only=args.criterion)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(canonical_dumps(to_jsonable(report.to_dict())) + "\n")
    failed = [r.name for r in report.results if not r.passed]
    if failed:
        sys.stderr.write("FAILED criteria: " + ", ".join(failed) + "\n")
        return 1
    return 0


# -- parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vcgrp", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("vcd", help="VC-dimension of the translate family")
    p.add_argument("--set", required=True, help="JSON set descriptor")
    p.add_argument("--other", default=None, help="second set B (default: A)")
    p.add_argument("--scope", choices=["restricted", "global", "right"], default="restricted")
    p.add_argument("--cap", type=int, default=10)
    _add_common(p)
    p.set_defaults(fn=_cmd_vcd)

    p = sub.add_parser("conv", help="exact difference-convolution counts")
    p.add_argument("--set", required=True)
    p.add_argument("--other", default=None)
    _add_common(p)
    p.set_defaults(fn=_cmd_conv)

    p = sub.add_parser("periods", help="exact, sampled, or Bohr almost-periods")
    p.add_argument("--set", required=True)
    p.add_argument("--other", default=None)
    p.add_argument("--scope", default=None, help="candidate set S (sampled mode)")
    p.add_argument("--epsilon", required=True)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--exact", action="store_true")
    mode.add_argument("--sample", action="store_true")
    mode.add_argument("--bohr", action="store_true")
    p.add_argument("--d-hint", type=int, default=None)
    p.add_argument("--c-sample", type=_rational, default=DEFAULT_C_SAMPLE)
    p.add_argument("--retries", type=int, default=DEFAULT_RETRIES)
    p.add_argument("--k", type=int, default=1, help="composition depth guarantee")
    p.add_argument("--sample-cap", type=int, default=DEFAULT_SAMPLE_CAP)
    _add_common(p)
    p.set_defaults(fn=_cmd_periods)

    p = sub.add_parser("bohr", help="realize a Bohr set from frequencies and radius")
    p.add_argument("--group", required=True, help="JSON group descriptor")
    p.add_argument("--freqs", required=True, help='JSON list, e.g. "[[1],[3]]" or "[1,3]"')
    p.add_argument("--radius", required=True)
    p.add_argument("--regular-dilate", action="store_true")
    p.add_argument("--check-size-bound", action="store_true")
    _add_common(p)
    p.set_defaults(fn=_cmd_bohr)

    p = sub.add_parser("spectrum", help="large spectrum of the uniform measure on a set")
    p.add_argument("--set", required=True)
    p.add_argument("--threshold", required=True)
    p.add_argument("--chang", action="store_true", help="also cover by a dissociated set")
    p.add_argument("--indicator", action="store_true",
                   help="use the indicator instead of the uniform measure")
    _add_common(p)
    p.set_defaults(fn=_cmd_spectrum)

    p = sub.add_parser("regularity", help="almost-period decomposition A' + H")
    p.add_argument("--set", required=True)
    p.add_argument("--epsilon", required=True)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--nu", default="1/2", help="dilation parameter (Bohr-set H)")
    mode.add_argument("--subspace", action="store_true", help="vector-space variant, H a subspace")
    p.add_argument("--c-sample", type=_rational, default=DEFAULT_C_SAMPLE)
    p.add_argument("--retries", type=int, default=DEFAULT_RETRIES)
    p.add_argument("--sample-cap", type=int, default=DEFAULT_SAMPLE_CAP)
    _add_common(p)
    p.set_defaults(fn=_cmd_regularity)

    p = sub.add_parser("bogolyubov", help="Bohr set or subspace inside A - A")
    p.add_argument("--set", required=True)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--subspace", action="store_true", help="dense-mode subspace extraction")
    mode.add_argument("--doubling", action="store_true", help="model first, then extract")
    p.add_argument("--s", type=int, default=4, help="model order for --doubling")
    _add_common(p)
    p.set_defaults(fn=_cmd_bogolyubov)

    p = sub.add_parser("model", help="Freiman model of A inside a small vector space")
    p.add_argument("--set", required=True)
    p.add_argument("--s", type=int, default=2)
    p.add_argument("--max-attempts", type=int, default=200)
    _add_common(p)
    p.set_defaults(fn=_cmd_model)

    p = sub.add_parser("freiman-check", help="verify a map respects s-fold sums")
    p.add_argument("--map", required=True, help="JSON Freiman map")
    p.add_argument("--map-b", default=None, help="optional second map for the pair variant")
    p.add_argument("--s", type=int, default=None)
    p.add_argument("--trials", type=int, default=20_000)
    _add_common(p)
    p.set_defaults(fn=_cmd_freiman_check)

    p = sub.add_parser("stability", help="k-order witnesses and the vcd relation")
    p.add_argument("--set", required=True)
    which = p.add_mutually_exclusive_group(required=True)
    which.add_argument("--k", type=int)
    which.add_argument("--k-max", type=int, help="scan 1..k_max and compare with vcd(G, A)")
    p.add_argument("--budget", type=int, default=DEFAULT_NODE_BUDGET)
    _add_common(p)
    p.set_defaults(fn=_cmd_stability)

    p = sub.add_parser("run", help="run an experiment grid from a config file")
    p.add_argument("--config", required=True)
    _add_common(p)
    p.set_defaults(fn=_cmd_run)

    p = sub.add_parser("selftest", help="run the acceptance criteria")
    p.add_argument("--level", choices=["quick", "full"], default="quick")
    p.add_argument("--criterion", type=int, default=None,
                   help="run a single criterion by number (1-12)")
    _add_common(p)
    p.set_defaults(fn=_cmd_selftest)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (serialize.DescriptorError, GroupError, SetError, ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
