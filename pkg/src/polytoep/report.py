"""Aggregated multi-route index reports, certificate-first.

The pipeline mirrors the logical order of the theory: a tuple is reduced by
its gcd (a vanishing common factor already settles non-Fredholmness), then a
boundary certificate is attempted along an increasing schedule of inner radii
— index routes only run once some radius certifies.  Every applicable route
(operator-theoretic, algebraic, perturbation oracle, product formula, disc
formula) must emit the same integer for an ``agree`` verdict; the report
carries all intermediate evidence (per-truncation homology dims, located
zeros, per-trial counts, every certificate attempt).

Reports are deterministic: the ``body`` sub-object is byte-identical across
runs with the same configuration; wall-clock timings live outside it.  The
cache stores whole reports keyed by a content hash of the canonicalized
input, all numeric parameters, and the package version, written atomically.
"""
from __future__ import annotations

import hashlib
import json
import os
import sys
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Tuple, Union

from . import __version__
from .certify import (
    DEFAULT_R_SCHEDULE,
    BoundaryCertificate,
    boundary_lower_bound,
    essential_spectrum_cloud,
    essential_spectrum_membership,
)
from .koszul import koszul_route
from .oracle import OracleConfig, perturbed_count_details, univariate_index
from .poly import (
    SymbolTuple,
    canonical_tuple_json,
    coefficient_bounds,
    poly_to_json,
    tuple_from_json,
    tuple_to_json,
)
from .tensor import disc_tuple_index, tensor_tuple_index, trig_from_poly
from .zeros import common_zeros, gcd_reduce

SCHEMA_VERSION = "1"


@dataclass(frozen=True)
class JobConfig:
    input: Union[str, Path, dict, SymbolTuple]
    command: str = "index"
    n_range: Optional[Tuple[int, int]] = None      # inclusive endpoints
    rank_tolerance: float = 1e-8
    oracle: OracleConfig = field(default_factory=OracleConfig)
    r_schedule: Tuple[float, ...] = DEFAULT_R_SCHEDULE
    target_mesh: Optional[float] = None
    cache_dir: Optional[Union[str, Path]] = None
    seed: int = 0
    lam: Optional[Tuple[complex, ...]] = None      # spectrum queries
    r: float = 0.9                                 # spectrum clouds
    resolution: int = 24

    def __post_init__(self):
        if self.command not in ("index", "spectrum", "certify", "koszul-dims",
                                "tensor"):
            raise ValueError(f"unknown command {self.command!r}")
        if self.rank_tolerance <= 0:
            raise ValueError("rank tolerance must be positive")
        if self.n_range is not None:
            a, b = self.n_range
            if b < a:
                raise ValueError(f"empty truncation range {a}..{b}")
        if not self.r_schedule or any(not 0 < r < 1 for r in self.r_schedule):
            raise ValueError("certificate schedule radii must lie in (0, 1)")
        if self.target_mesh is not None and self.target_mesh <= 0:
            raise ValueError("mesh must be positive")


def load_tuple(source: Union[str, Path, dict, SymbolTuple]) -> SymbolTuple:
    if isinstance(source, SymbolTuple):
        return source
    if isinstance(source, dict):
        return tuple_from_json(source)
    path = Path(source)
    try:
        obj = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: parse error at line {exc.lineno}, "
                         f"column {exc.colno}: {exc.msg}") from exc
    return tuple_from_json(obj)


def _resolved_n_range(cfg: JobConfig):
    if cfg.n_range is None:
        return None
    a, b = cfg.n_range
    return range(a, b + 1)


def _fmt_complex(z: complex) -> dict:
    return {"re": f"{z.real:.17g}", "im": f"{z.imag:.17g}"}


def _cert_json(cert: BoundaryCertificate) -> dict:
    out = {
        "r": cert.r, "c": cert.c, "mesh": cert.mesh,
        "lipschitz": cert.lipschitz, "verdict": cert.verdict,
        "region": cert.region, "min_sample": cert.min_sample,
        "min_point": [_fmt_complex(z) for z in cert.min_point],
        "cells_evaluated": cert.cells_evaluated,
    }
    if cert.witness is not None:
        out["witness"] = [_fmt_complex(z) for z in cert.witness]
        out["witness_value"] = cert.witness_value
    return out


def cache_key(cfg: JobConfig, st: SymbolTuple) -> str:
    payload = {
        "input": json.loads(canonical_tuple_json(st)),
        "command": cfg.command,
        "n_range": list(cfg.n_range) if cfg.n_range else None,
        "rank_tolerance": cfg.rank_tolerance,
        "oracle": {"epsilon": cfg.oracle.epsilon, "trials": cfg.oracle.trials,
                   "seed": cfg.oracle.seed,
                   "quadrature_points": cfg.oracle.quadrature_points},
        "r_schedule": list(cfg.r_schedule),
        "target_mesh": cfg.target_mesh,
        "seed": cfg.seed,
        "lam": [[z.real, z.imag] for z in cfg.lam] if cfg.lam else None,
        "r": cfg.r,
        "resolution": cfg.resolution,
        "version": __version__,
    }
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def _cache_load(path: Path) -> Optional[dict]:
    try:
        stored = json.loads(path.read_text())
        if "body" not in stored:
            raise ValueError("missing body")
        return stored
    except (OSError, ValueError) as exc:
        print(f"warning: ignoring corrupt cache entry {path}: {exc}",
              file=sys.stderr)
        return None


def _cache_store(path: Path, report: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            json.dump(report, fh, sort_keys=True)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# ---- route runners -------------------------------------------------------------


def _run_koszul(st: SymbolTuple, cfg: JobConfig, rho: Optional[float]) -> dict:
    route = koszul_route(st, _resolved_n_range(cfg), cfg.rank_tolerance, rho=rho)
    return {
        "per_n": list(route.per_n),
        "codim": route.codim,
        "dims": list(route.homology.dims),
        "stabilized": route.homology.stabilized,
        "sigma_min_first": route.sigma_min_first,
        "chain_exact": route.chain_exact,
        "rho": rho,
        "index": route.index,
    }


def _run_algebraic(st: SymbolTuple, cfg: JobConfig) -> dict:
    zs = common_zeros(st, seed=cfg.seed)
    zeros = [{"point": [_fmt_complex(z.point[0]), _fmt_complex(z.point[1])],
              "multiplicity": z.multiplicity, "location": z.location}
             for z in zs.zeros]
    out = {"zeros": zeros, "total_inside": zs.total_inside,
           "quotient_dim": zs.quotient_dim, "degenerate": zs.degenerate}
    if zs.degenerate:
        out["error"] = "a zero sits within the boundary margin"
    else:
        out["index"] = -zs.total_inside
    return out


def _oracle_epsilon(st: SymbolTuple, cert_c: float, base: float) -> float:
    """Shrink ε until its worst-case effect on Σ|fᵢ|² is well under the
    certified bound, so perturbation cannot cross the boundary criterion."""
    sups = sum(coefficient_bounds(s)[0] for s in st.symbols)
    eps = base
    for _ in range(12):
        if (2 * sups * eps + len(st) * eps * eps) * 4 <= cert_c:
            break
        eps /= 2
    return eps


def _run_oracle(st: SymbolTuple, cfg: JobConfig, cert_c: float) -> dict:
    eps = _oracle_epsilon(st, cert_c, cfg.oracle.epsilon)
    ocfg = OracleConfig(epsilon=eps, trials=cfg.oracle.trials,
                        seed=cfg.oracle.seed,
                        quadrature_points=cfg.oracle.quadrature_points)
    detail = perturbed_count_details(st, ocfg)
    detail["index"] = -detail["count"]
    return detail


def _tensor_variables(st: SymbolTuple) -> Optional[list]:
    """Variable assignment when every symbol is univariate in its own
    distinct variable (the tensor-product situation)."""
    if len(st) != st.nvars or len(st) < 2:
        return None
    used = []
    for s in st.symbols:
        vs = [v for v in range(st.nvars) if s.degree_in(v) > 0]
        if len(vs) != 1:
            return None
        used.append(vs[0])
    if len(set(used)) != len(used):
        return None
    return used


def _run_tensor(st: SymbolTuple, variables: Sequence[int]) -> dict:
    factors = [trig_from_poly(s, var=v) for s, v in zip(st.symbols, variables)]
    rep = tensor_tuple_index(factors, variables)
    return {
        "per_factor": [{"fredholm": f.fredholm, "index": f.index,
                        "invertible_flag": f.invertible_flag}
                       for f in rep.per_factor],
        "tuple_fredholm": rep.tuple_fredholm,
        "note": rep.note,
        "index": rep.tuple_index,
    }


# ---- the index pipeline --------------------------------------------------------


def run_index(cfg: JobConfig) -> dict:
    """Certificate-first multi-route index report (see module docstring)."""
    st = load_tuple(cfg.input)
    key = cache_key(cfg, st)
    cache_path = None
    if cfg.cache_dir is not None:
        cache_path = Path(cfg.cache_dir) / f"{key}.json"
        if cache_path.exists():
            stored = _cache_load(cache_path)
            if stored is not None:
                stored.setdefault("cache", {})["hit"] = True
                return stored

    t_start = time.perf_counter()
    timings = {}
    body = {
        "schema_version": SCHEMA_VERSION,
        "command": "index",
        "input": tuple_to_json(st),
        "config": {
            "n_range": list(cfg.n_range) if cfg.n_range else None,
            "rank_tolerance": cfg.rank_tolerance,
            "seed": cfg.seed,
            "oracle": {"epsilon": cfg.oracle.epsilon, "trials": cfg.oracle.trials,
                       "seed": cfg.oracle.seed,
                       "quadrature_points": cfg.oracle.quadrature_points},
            "r_schedule": list(cfg.r_schedule),
            "target_mesh": cfg.target_mesh,
        },
        "reduction": None,
        "certificates": [],
        "certificate": None,
        "routes": {},
    }

    # gcd reduction for exact bivariate pairs
    working = st
    t0 = time.perf_counter()
    if len(st) == 2 and st.nvars == 2 and st.mode == "exact":
        red = gcd_reduce(st)
        if red.common_factor is not None:
            body["reduction"] = {
                "common_factor": poly_to_json(red.common_factor),
                "factor_zero_free": red.factor_zero_free,
                "reduced": tuple_to_json(red.reduced),
                "certificate": _cert_json(red.certificate),
            }
            if red.factor_zero_free:
                working = red.reduced
    timings["reduction"] = time.perf_counter() - t0

    # certificate schedule on the working tuple
    t0 = time.perf_counter()
    chosen = None
    failures = 0
    for r in cfg.r_schedule:
        cert = boundary_lower_bound(working, r, cfg.target_mesh)
        body["certificates"].append(_cert_json(cert))
        if cert.verdict == "certified":
            chosen = cert
            break
        failures += cert.verdict == "failed"
    timings["certificate"] = time.perf_counter() - t0

    if chosen is None:
        if failures == len(cfg.r_schedule):
            worst = min((c for c in body["certificates"] if "witness" in c),
                        key=lambda c: c["witness_value"])
            body["verdict"] = {"kind": "not_fredholm",
                               "witness": worst["witness"],
                               "witness_value": worst["witness_value"]}
        else:
            body["verdict"] = {
                "kind": "not_certifiable",
                "details": "no scheduled radius certified and the failures "
                           "are not witnessed everywhere"}
        return _finish(body, timings, t_start, key, cache_path)

    body["certificate"] = _cert_json(chosen)
    rho = (1 + chosen.r) / 2

    routes = body["routes"]
    emitted = {}

    t0 = time.perf_counter()
    try:
        routes["koszul"] = _run_koszul(working, cfg, rho)
        if isinstance(routes["koszul"]["index"], int):
            emitted["koszul"] = routes["koszul"]["index"]
    except Exception as exc:                      # noqa: BLE001 - recorded
        routes["koszul"] = {"error": str(exc)}
    timings["koszul"] = time.perf_counter() - t0

    if len(working) == 2 and working.nvars == 2 and working.mode == "exact":
        t0 = time.perf_counter()
        try:
            routes["algebraic"] = _run_algebraic(working, cfg)
            if "index" in routes["algebraic"]:
                emitted["algebraic"] = routes["algebraic"]["index"]
        except Exception as exc:                  # noqa: BLE001
            routes["algebraic"] = {"error": str(exc)}
        timings["algebraic"] = time.perf_counter() - t0

        t0 = time.perf_counter()
        try:
            routes["oracle"] = _run_oracle(working, cfg, chosen.c)
            emitted["oracle"] = routes["oracle"]["index"]
        except Exception as exc:                  # noqa: BLE001
            routes["oracle"] = {"error": str(exc)}
        timings["oracle"] = time.perf_counter() - t0

    variables = _tensor_variables(working)
    if variables is not None:
        t0 = time.perf_counter()
        try:
            routes["tensor"] = _run_tensor(working, variables)
            if isinstance(routes["tensor"]["index"], int):
                emitted["tensor"] = routes["tensor"]["index"]
        except Exception as exc:                  # noqa: BLE001
            routes["tensor"] = {"error": str(exc)}
        timings["tensor"] = time.perf_counter() - t0

    if working.nvars == 1:
        t0 = time.perf_counter()
        if len(working) == 1:
            try:
                idx = univariate_index(working.symbols[0], cfg.oracle)
                routes["winding"] = {"index": idx}
                emitted["winding"] = idx
            except Exception as exc:              # noqa: BLE001
                routes["winding"] = {"error": str(exc)}
        else:
            try:
                idx = disc_tuple_index(working, s=chosen.r, cross_check=False)
                routes["disc"] = {"index": idx, "certificate_r": chosen.r}
                emitted["disc"] = idx
            except Exception as exc:              # noqa: BLE001
                routes["disc"] = {"error": str(exc)}
        timings["disc"] = time.perf_counter() - t0

    values = set(emitted.values())
    all_ok = all("error" not in r for r in routes.values()) and \
        len(emitted) == len(routes)
    if len(values) > 1:
        body["verdict"] = {
            "kind": "disagree",
            "details": {name: val for name, val in sorted(emitted.items())}}
    elif not values or not all_ok:
        broken = sorted(name for name, r in routes.items()
                        if "error" in r or name not in emitted)
        body["verdict"] = {
            "kind": "not_certifiable",
            "details": f"certificate holds but routes did not all emit an "
                       f"integer: {', '.join(broken)}"}
    else:
        index = values.pop()
        assert chosen.verdict == "certified"       # agree requires certification
        body["verdict"] = {"kind": "agree", "index": index,
                           "routes": sorted(emitted)}
    return _finish(body, timings, t_start, key, cache_path)


def _finish(body: dict, timings: dict, t_start: float, key: str,
            cache_path: Optional[Path]) -> dict:
    timings["total"] = time.perf_counter() - t_start
    report = {"body": body, "timings": timings,
              "cache": {"key": key, "hit": False}}
    if cache_path is not None:
        _cache_store(cache_path, report)
    return report


# ---- spectrum ------------------------------------------------------------------


def run_spectrum(cfg: JobConfig) -> Union[dict, str]:
    """Membership query (when λ given) as a report dict, or a deterministic
    CSV cloud of symbol values over the outer region."""
    st = load_tuple(cfg.input)
    key = cache_key(cfg, st)
    if cfg.lam is not None:
        if len(cfg.lam) != len(st):
            raise ValueError(f"lambda needs {len(st)} components")
        t0 = time.perf_counter()
        q = essential_spectrum_membership(st, cfg.lam, cfg.r_schedule,
                                          cfg.resolution)
        body = {
            "schema_version": SCHEMA_VERSION,
            "command": "spectrum",
            "input": tuple_to_json(st),
            "lambda": [_fmt_complex(z) for z in q.lam],
            "r": q.r,
            "resolution": q.resolution,
            "verdict": q.verdict,
            "distance_estimate": f"{q.distance_estimate:.17g}",
            "config": {"r_schedule": list(cfg.r_schedule), "seed": cfg.seed},
        }
        return {"body": body, "timings": {"total": time.perf_counter() - t0},
                "cache": {"key": key, "hit": False}}
    vals = essential_spectrum_cloud(st, cfg.r, cfg.resolution)
    k = vals.shape[1]
    header = ",".join(f"re{i+1},im{i+1}" for i in range(k))
    lines = [header]
    for row in vals:
        lines.append(",".join(f"{v.real:.17g},{v.imag:.17g}" for v in row))
    return "\n".join(lines) + "\n"
