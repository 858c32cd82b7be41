"""Seeded experiment grids over the library's operations.

A config fixes a group, one generated input set, an operation name, and a
parameter grid; every cell is reproducible from the config plus its own
grid coordinates.  Cell failures become per-cell error entries rather than
aborting the grid, and the verification summary is recounted from the
stored cells so the two can never drift apart.
"""

from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from . import __version__
from .almost import bootstrap_bohr_periods, exact_almost_periods, sample_almost_periods
from .fourier import chang_cover, large_spectrum
from .freiman import model_embed
from .gensets import build_set
from .groups import make_group
from .regularity import (
    bogolyubov_bohr,
    bogolyubov_subspace,
    regularity_bohr,
    regularity_subspace,
)
from .sets import CountFn, GSet, skew_convolve_counts
from .stability import is_k_stable, stability_vcd_relation
from .util import canonical_dumps, parallel_map, parse_rational, to_jsonable
from .vc import vcd, vcd_global, vcdr

# boolean report keys that represent exact verifications
FLAG_KEYS = {
    "all_valid",
    "contained",
    "all_strong",
    "verified",
    "proper",
    "difference_proper",
    "bound_ok",
    "safe",
    "ok",
    "relation_checked",
}
# dicts whose every boolean member is a verification flag
FLAG_DICTS = {"checks", "pullback_checks"}


class ExperimentError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    """One operation run over a grid of (epsilon, d_hint, seed) cells."""

    group: dict
    generator: dict
    operation: str
    epsilons: tuple = ()
    d_hints: tuple = ()
    seeds: tuple = (0,)
    params: dict = field(default_factory=dict)
    out: Optional[str] = None
    format: str = "json"

    def __post_init__(self):
        if self.format not in ("json", "csv"):
            raise ExperimentError(f"format must be json or csv, got {self.format!r}")
        object.__setattr__(self, "epsilons", tuple(str(e) for e in self.epsilons))
        object.__setattr__(self, "d_hints", tuple(int(d) for d in self.d_hints))
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))

    def to_dict(self) -> dict:
        return {
            "group": self.group,
            "generator": self.generator,
            "operation": self.operation,
            "epsilons": list(self.epsilons),
            "d_hints": list(self.d_hints),
            "seeds": list(self.seeds),
            "params": self.params,
            "out": self.out,
            "format": self.format,
        }

    @staticmethod
    def from_dict(data: dict) -> "ExperimentConfig":
        try:
            return ExperimentConfig(
                group=data["group"],
                generator=data["generator"],
                operation=data["operation"],
                epsilons=tuple(data.get("epsilons", ())),
                d_hints=tuple(data.get("d_hints", ())),
                seeds=tuple(data.get("seeds", (0,))),
                params=dict(data.get("params", {})),
                out=data.get("out"),
                format=data.get("format", "json"),
            )
        except KeyError as e:
            raise ExperimentError(f"config is missing required key {e.args[0]!r}") from e


def count_flags(obj) -> tuple[int, int]:
    """Count exact verification booleans in a report tree."""
    passed = failed = 0
    if isinstance(obj, dict):
        for k, v in obj.items():
            if k in FLAG_DICTS and isinstance(v, dict):
                for flag in v.values():
                    if isinstance(flag, bool):
                        passed, failed = (passed + 1, failed) if flag else (passed, failed + 1)
            elif k in FLAG_KEYS and isinstance(v, bool):
                passed, failed = (passed + 1, failed) if v else (passed, failed + 1)
            else:
                p, f = count_flags(v)
                passed += p
                failed += f
    elif isinstance(obj, (list, tuple)):
        for v in obj:
            p, f = count_flags(v)
            passed += p
            failed += f
    return passed, failed


def _other_set(grp, A: GSet, params: dict) -> GSet:
    if "other" in params:
        return build_set(grp, params["other"])
    return A


def _scope_set(grp, params: dict) -> Optional[GSet]:
    if "scope_set" in params:
        return build_set(grp, params["scope_set"])
    return None


def _run_operation(op: str, grp, A: GSet, eps, d_hint, seed: int, params: dict) -> dict:
    if op == "vcd":
        scope = params.get("scope", "restricted")
        B = _other_set(grp, A, params)
        cap = int(params.get("cap", 10))
        if scope == "right":
            return vcdr(A, B, cap=cap).to_dict()
        if scope == "global":
            return vcd_global(A, cap=cap).to_dict()
        return vcd(A, B, scope="restricted", cap=cap).to_dict()
    if op == "exact-periods":
        T = exact_almost_periods(A, _other_set(grp, A, params), eps)
        # identity has zero shift deviation, so it must always qualify
        return {
            "periods": T.to_dict(),
            "size": T.card,
            "checks": {"identity_is_period": bool(T.mask[grp.identity])},
        }
    if op == "sample-periods":
        rep = sample_almost_periods(
            A,
            _other_set(grp, A, params),
            _scope_set(grp, params) or GSet.full(grp),
            eps,
            d_hint if d_hint else int(params.get("d_hint", 1)),
            seed,
            c_sample=params.get("c_sample", 64),
            retries=int(params.get("retries", 10)),
            k=int(params.get("k", 1)),
        )
        out = rep.to_dict()
        # the identity never moves the convolution, so it qualifies whenever
        # the scope admits it (in both sampled and exact-scan modes)
        scope = _scope_set(grp, params) or GSet.full(grp)
        if scope.mask[grp.identity]:
            out["checks"] = {"identity_is_period": bool(rep.T.mask[grp.identity])}
        return out
    if op == "bohr-periods":
        rep = bootstrap_bohr_periods(
            A, _other_set(grp, A, params), eps, d_hint=d_hint or None, seed=seed
        )
        return rep.to_dict()
    if op == "spectrum":
        theta = parse_rational(params.get("theta", "1/2"))
        spec = large_spectrum(grp, CountFn.uniform_measure(A), theta)
        out = spec.to_dict()
        if params.get("chang", True):
            out["cover"] = chang_cover(spec).to_dict()
        return out
    if op == "conv":
        B = _other_set(grp, A, params)
        counts = skew_convolve_counts(A, B)
        mass = int(sum(int(v) for v in counts.values))
        return {
            "counts": [int(v) for v in counts.values],
            "mass": mass,
            "checks": {"mass_conserved": mass == A.card * B.card},
        }
    if op == "regularity":
        nu = parse_rational(params.get("nu", "1/2"))
        return regularity_bohr(A, eps, nu, seed=seed).to_dict()
    if op == "regularity-subspace":
        return regularity_subspace(A, eps, seed=seed).to_dict()
    if op == "bogolyubov":
        return bogolyubov_bohr(A, seed=seed).to_dict()
    if op == "bogolyubov-subspace":
        return bogolyubov_subspace(A, seed=seed, mode=params.get("mode", "dense")).to_dict()
    if op == "model":
        return model_embed(A, s=int(params.get("s", 2)), seed=seed).to_dict()
    if op == "stability":
        budget = int(params.get("budget", 10**7))
        if "k" in params:
            return is_k_stable(A, int(params["k"]), budget).to_dict()
        return stability_vcd_relation(A, int(params.get("k_max", 4)), budget).to_dict()
    raise ExperimentError(f"unknown operation {op!r}")


@dataclass(frozen=True)
class RunReport:
    config: dict
    cells: tuple
    summary: dict
    version: str
    wall_clock_s: float

    @property
    def all_pass(self) -> bool:
        return self.summary["failed"] == 0 and self.summary["errors"] == 0

    def canonical_body(self) -> dict:
        """Everything deterministic: the wall clock is deliberately excluded."""
        return {
            "config": self.config,
            "cells": list(self.cells),
            "summary": self.summary,
            "version": self.version,
        }

    def canonical(self) -> str:
        return canonical_dumps(self.canonical_body())

    def to_dict(self) -> dict:
        out = self.canonical_body()
        out["wall_clock_s"] = self.wall_clock_s
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["operation", "epsilon", "d_hint", "seed", "status",
                    "checks_passed", "checks_failed", "report_json"])
        op = self.config["operation"]
        for cell in self.cells:
            c = cell["cell"]
            if "error" in cell:
                w.writerow([op, c.get("epsilon"), c.get("d_hint"), c.get("seed"),
                            "error", 0, 0, canonical_dumps({"error": cell["error"]})])
            else:
                p, f = count_flags(cell["report"])
                w.writerow([op, c.get("epsilon"), c.get("d_hint"), c.get("seed"),
                            "ok", p, f, canonical_dumps(cell["report"])])
        return buf.getvalue()


def run(config: ExperimentConfig, threads: int = 1) -> RunReport:
    """Execute the grid; cells run independently and merge in grid order."""
    started = time.perf_counter()
    grp = make_group(config.group)
    A = build_set(grp, config.generator)

    eps_list = list(config.epsilons) or [None]
    d_list = list(config.d_hints) or [0]
    seed_list = list(config.seeds) or [0]
    grid = [(e, d, s) for e in eps_list for d in d_list for s in seed_list]

    def one(cell) -> dict:
        e, d, s = cell
        coords = {"epsilon": e, "d_hint": d or None, "seed": s}
        try:
            eps = parse_rational(e) if e is not None else None
            report = _run_operation(config.operation, grp, A, eps, d, s, config.params)
            return {"cell": coords, "report": to_jsonable(report)}
        except Exception as err:  # noqa: BLE001 - per-cell isolation is the contract
            return {"cell": coords, "error": str(err), "error_type": type(err).__name__}

    cells = parallel_map(one, grid, threads)

    passed = failed = errors = 0
    for cell in cells:
        if "error" in cell:
            errors += 1
        else:
            p, f = count_flags(cell["report"])
            passed += p
            failed += f
    summary = {"passed": passed, "failed": failed, "errors": errors}

    report = RunReport(
        config=config.to_dict(),
        cells=tuple(cells),
        summary=summary,
        version=__version__,
        wall_clock_s=time.perf_counter() - started,
    )
    recount = {"passed": 0, "failed": 0, "errors": 0}
    for cell in report.cells:
        if "error" in cell:
            recount["errors"] += 1
        else:
            p, f = count_flags(cell["report"])
            recount["passed"] += p
            recount["failed"] += f
    if recount != report.summary:
        raise ExperimentError("verification summary does not match the recount")
    return report
