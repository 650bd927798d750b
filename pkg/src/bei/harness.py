"""Verification driver: formula prediction vs the algebraic oracle vs the
cut-set dimension, with JSON/CSV reports and an on-disk result cache.

JSON reports carry ``"schema": 1``.  A single-instance report has the keys

    schema, kernel, version, command, expr, canonical, graph, nvertices,
    m, char, order, caps, predicted, oracle, verdicts, violation, timings

and a suite report wraps a list of those under ``instances`` together with a
``summary``.  The CSV output has one row per (instance, invariant) with the
columns in ``CSV_COLUMNS``.
"""

from __future__ import annotations

import csv
import hashlib
import io
import itertools
import json
import os
import random
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from . import KERNEL_VERSION, __version__
from .algebra.groebner import groebner_basis, ideal_equal
from .algebra.ideals import (
    DEFAULT_GB_CAP, build_ideal_generators, build_PT_ideal, grid_ring, intersect_all,
    oracle_dim, vertex_split,
)
from .cutsets import DEFAULT_ENUM_CAP, combinatorial_dim, cut_point_sets
from .dsl import emit, parse_expr
from .errors import BeiError, Contradiction
from .families import FanAtom, FanSpec, realize
from .formulas import predict
from .graph import is_internal
from .resolution import BettiTable, minimal_graded_resolution

SCHEMA = 1
DEFAULT_RES_CAP = 18
DEFAULT_CHAR = 32003
AUDIT_RATE = 0.05
INVARIANTS = ("dim", "depth", "reg", "cm")
CSV_COLUMNS = ("expr", "m", "char", "invariant", "predicted_kind", "lo", "hi", "oracle",
               "verdict", "rules")

EXACT_MATCH = "exact-match"
WITHIN = "within-interval"
VIOLATION = "VIOLATION"
UNAVAILABLE = "oracle-unavailable"


@dataclass(frozen=True)
class Options:
    char: int = DEFAULT_CHAR
    order: str = "degrevlex"
    gb_cap: int = DEFAULT_GB_CAP
    res_cap: int = DEFAULT_RES_CAP
    enum_cap: int = DEFAULT_ENUM_CAP
    formula_only: bool = False
    cache_dir: str | None = None
    audit_rate: float = AUDIT_RATE
    seed: int = 0

    def caps(self) -> dict:
        return {"gb": self.gb_cap, "res": self.res_cap, "enum": self.enum_cap}


# ---------------------------------------------------------------------- cache

@dataclass
class ResultCache:
    """Append-only JSON store; each entry records the kernel version that
    produced it and entries from other kernels are ignored."""

    root: str
    audit_rate: float = AUDIT_RATE
    rng: random.Random = field(default_factory=lambda: random.Random(0))
    hits: int = 0
    misses: int = 0
    audited: int = 0
    mismatches: list = field(default_factory=list)

    @staticmethod
    def key(serialization, m, char, order, kind) -> str:
        material = json.dumps([serialization, m, char, order, kind, KERNEL_VERSION])
        return hashlib.sha256(material.encode()).hexdigest()

    def _path(self, key):
        return os.path.join(self.root, key[:2], key + ".json")

    def get(self, key):
        try:
            with open(self._path(key)) as fh:
                entry = json.load(fh)
        except (OSError, ValueError):
            return None
        if entry.get("kernel") != KERNEL_VERSION:
            return None
        return entry["value"]

    def put(self, key, value):
        path = self._path(key)
        os.makedirs(os.path.dirname(path), exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=os.path.dirname(path), suffix=".tmp")
        with os.fdopen(fd, "w") as fh:
            json.dump({"kernel": KERNEL_VERSION, "value": value}, fh, sort_keys=True)
        os.replace(tmp, path)

    def fetch(self, key, compute):
        """Cached value or compute(); a random share of hits is recomputed
        and compared."""
        value = self.get(key)
        if value is None:
            self.misses += 1
            value = compute()
            self.put(key, value)
            return value
        self.hits += 1
        if self.rng.random() < self.audit_rate:
            self.audited += 1
            fresh = compute()
            if fresh != value:
                self.mismatches.append(key)
                return fresh
        return value

    def stats(self) -> dict:
        return {"dir": self.root, "hits": self.hits, "misses": self.misses,
                "audited": self.audited, "mismatches": list(self.mismatches)}


def open_cache(opts: Options):
    root = opts.cache_dir or os.environ.get("BEI_CACHE")
    if not root:
        return None
    return ResultCache(root, opts.audit_rate, random.Random(opts.seed))


# --------------------------------------------------------------------- oracle

def oracle_invariants(g, m: int, opts: Options, cache=None) -> dict:
    """dim from a Groebner basis, depth/reg from the minimal resolution; any
    cap that is hit leaves the value None with the reason recorded."""
    nvars = m * len(g)
    out = {"dim": None, "depth": None, "reg": None, "cm": None, "pd": None,
           "betti": None, "unavailable": {}}
    timings = {}
    ser = g.serialize()

    def cached(kind, order, compute):
        if cache is None:
            return compute()
        return cache.fetch(ResultCache.key(ser, m, opts.char, order, kind), compute)

    gb = None
    if nvars > opts.gb_cap:
        out["unavailable"]["dim"] = f"{nvars} variables exceed the GB cap {opts.gb_cap}"
    else:
        t = time.perf_counter()

        def dim_value():
            nonlocal gb
            gb = groebner_basis(build_ideal_generators(g, grid_ring(g, m, opts.char, opts.order)))
            return oracle_dim(g, m, opts.char, opts.gb_cap, gb=gb)

        out["dim"] = cached("dim", opts.order, dim_value)
        timings["gb"] = time.perf_counter() - t

    if nvars > opts.res_cap:
        reason = f"{nvars} variables exceed the resolution cap {opts.res_cap}"
        out["unavailable"]["depth"] = out["unavailable"]["reg"] = reason
    else:
        t = time.perf_counter()

        def betti_value():
            ring = grid_ring(g, m, opts.char, "degrevlex")
            I = build_ideal_generators(g, ring)
            reuse = gb if opts.order == "degrevlex" else None
            bt = minimal_graded_resolution(I, gb=reuse)
            return {"nvars": bt.nvars, "betti": [list(x) for x in bt.betti]}

        value = cached("betti", "degrevlex", betti_value)
        table = BettiTable(value["nvars"], tuple(tuple(x) for x in value["betti"]))
        out.update(depth=table.depth, reg=table.reg, pd=table.pd, betti=table.to_text())
        timings["resolution"] = time.perf_counter() - t

    if out["dim"] is not None and out["depth"] is not None:
        out["cm"] = out["depth"] == out["dim"]
    else:
        out["unavailable"]["cm"] = "needs both dim and depth"
    return out, timings


# ------------------------------------------------------------------- verdicts

def verdict(pred, oracle_value) -> str:
    if oracle_value is None:
        return UNAVAILABLE
    if pred is None:
        return UNAVAILABLE
    if pred.exact:
        return EXACT_MATCH if pred.value == oracle_value else VIOLATION
    return WITHIN if pred.contains(oracle_value) else VIOLATION


def cm_verdict(pred_cm, oracle_cm) -> str:
    if oracle_cm is None or pred_cm is None:
        return UNAVAILABLE
    return EXACT_MATCH if pred_cm == oracle_cm else VIOLATION


def _header(command, text, expr, mg, m, opts):
    return {
        "schema": SCHEMA,
        "kernel": KERNEL_VERSION,
        "version": __version__,
        "command": command,
        "expr": text,
        "canonical": emit(expr),
        "graph": mg.graph.serialize(),
        "nvertices": len(mg.graph),
        "m": m,
        "char": opts.char,
        "order": opts.order,
        "caps": opts.caps(),
    }


def _as_expr(expr):
    if isinstance(expr, str):
        return expr, parse_expr(expr)
    return emit(expr), expr


def cmd_predict(expr, m: int, opts: Options = Options()) -> dict:
    text, expr = _as_expr(expr)
    mg = realize(expr)
    rep = _header("predict", text, expr, mg, m, opts)
    t = time.perf_counter()
    try:
        rep["predicted"] = predict(expr, m, enum_cap=opts.enum_cap).to_json()
        rep["violation"] = False
    except Contradiction as e:
        rep["predicted"] = None
        rep["error"] = {"kind": e.kind, "message": str(e), "details": e.details}
        rep["violation"] = True
    rep["timings"] = {"predict": time.perf_counter() - t}
    return rep


def cmd_oracle(expr, m: int, opts: Options = Options(), cache=None) -> dict:
    text, expr = _as_expr(expr)
    mg = realize(expr)
    rep = _header("oracle", text, expr, mg, m, opts)
    rep["oracle"], rep["timings"] = oracle_invariants(mg.graph, m, opts, cache)
    rep["violation"] = False
    return rep


def cmd_verify(expr, m: int, opts: Options = Options(), cache=None) -> dict:
    text, expr = _as_expr(expr)
    mg = realize(expr)
    rep = _header("verify", text, expr, mg, m, opts)
    timings = {}
    t = time.perf_counter()
    pred = None
    try:
        pred = predict(expr, m, enum_cap=opts.enum_cap)
        rep["predicted"] = pred.to_json()
    except Contradiction as e:
        rep["predicted"] = None
        rep["error"] = {"kind": e.kind, "message": str(e), "details": e.details}
    timings["predict"] = time.perf_counter() - t

    if opts.formula_only:
        oracle = {k: None for k in INVARIANTS}
        oracle["unavailable"] = {k: "formula-only run" for k in INVARIANTS}
    else:
        oracle, more = oracle_invariants(mg.graph, m, opts, cache)
        timings.update(more)
    rep["oracle"] = oracle

    verdicts = {}
    for name in ("dim", "depth", "reg"):
        verdicts[name] = verdict(getattr(pred, name) if pred else None, oracle[name])
    verdicts["cm"] = cm_verdict(pred.cm if pred else None, oracle["cm"])
    if pred is None:
        verdicts = {k: VIOLATION for k in verdicts}
    rep["verdicts"] = verdicts
    rep["violation"] = VIOLATION in verdicts.values()
    rep["timings"] = timings
    return rep


def cmd_decompose(expr, m: int, opts: Options = Options(), identity: bool = True) -> dict:
    """Cut-point sets, the dimension of each prime, the witness and, when
    requested and within the GB cap, the two intersection identities."""
    text, expr = _as_expr(expr)
    mg = realize(expr)
    g = mg.graph
    rep = _header("decompose", text, expr, mg, m, opts)
    t = time.perf_counter()
    fam = cut_point_sets(g, opts.enum_cap)
    primes = []
    for cs in fam.sets:
        d = cs.c * (m - 1) + len(g) - len(cs.T)
        primes.append({"T": list(cs.T), "components": [list(c) for c in cs.components], "dim": d})
    dim, witness = combinatorial_dim(g, m, family=fam)
    rep.update(primes=primes, dim=dim, witness=list(witness))
    timings = {"enumerate": time.perf_counter() - t}
    rep["identity"] = None
    if identity:
        nvars = m * len(g)
        if nvars + 1 > opts.gb_cap:
            rep["identity"] = {"unavailable": f"{nvars + 1} variables exceed the GB cap {opts.gb_cap}"}
        else:
            t = time.perf_counter()
            ctx = grid_ring(g, m, opts.char, opts.order)
            J = build_ideal_generators(g, ctx)
            inter = intersect_all(build_PT_ideal(g, cs.T, ctx, cs.components) for cs in fam.sets)
            split = {}
            for v in g.vertices:
                if is_internal(g, v):
                    split[str(v)] = ideal_equal(intersect_all(vertex_split(g, v, ctx)), J)
            rep["identity"] = {"decomposition": ideal_equal(inter, J), "vertex_split": split}
            timings["identity"] = time.perf_counter() - t
    ident = rep["identity"] or {}
    rep["violation"] = ident.get("decomposition") is False or False in ident.get("vertex_split", {}).values()
    rep["timings"] = timings
    return rep


# ---------------------------------------------------------------------- suite

def set_partitions(items):
    """Partitions of ``items`` into parts listed by their smallest element,
    each part in increasing order."""
    items = list(items)
    if not items:
        yield ()
        return
    first, rest = items[0], items[1:]
    for sub in set_partitions(rest):
        yield ((first,),) + sub
        for i in range(len(sub)):
            yield tuple(sorted(sub[:i] + (tuple(sorted((first,) + sub[i])),) + sub[i + 1:]))


def fan_specs(n_max: int, w_max: int, h_max: int, pure_only: bool = False):
    """Fans with base K_n (2 <= n <= n_max), W = {1..w} (w <= min(w_max, n)),
    every set partition of W and every h_{i,j} in 1..h_max."""
    for n in range(2, n_max + 1):
        for w in range(0, min(w_max, n) + 1):
            parts = sorted(set(set_partitions(range(1, w + 1))), key=lambda p: (len(p), p))
            for part in parts:
                slots = sum(len(p) for p in part)
                hs = [(1,) * slots] if pure_only else itertools.product(range(1, h_max + 1), repeat=slots)
                for h in hs:
                    it = iter(h)
                    sizes = tuple(tuple(j + next(it) for j in range(1, len(p) + 1)) for p in part)
                    yield FanSpec(n, part, sizes)


def fan_exprs(n_max=4, w_max=2, h_max=2, pure_only=False) -> list:
    return [emit(FanAtom(s)) for s in fan_specs(n_max, w_max, h_max, pure_only)]


def fp_exprs(p_max=3) -> list:
    return [f"Fp({p})" for p in range(1, p_max + 1)]


def kn_exprs(n_max=3) -> list:
    return [f"K({n})" for n in range(2, n_max + 1)]


def path_exprs(t_max=5) -> list:
    return [f"path({t})" for t in range(2, t_max + 1)]


def chain_exprs() -> list:
    return [
        "circ(Fp(3)@6, Fp(2)@1)",
        "circ(circ(Fp(3)@6, Fp(3)@1)@6, Fp(2)@1)",
        "circ(Fp(3)@6, Fp(3)@1)",
        "circ(Fp(3)@6, fan(3; W=[[1],[2]])@4)",
        "circ(circ(Fp(3)@6, Fp(3)@1)@6, fan(3; W=[[1],[2]])@4)",
    ]


_COMPOSITE_ATOMS = (
    ("Fp(2)", (1, 4)),
    ("Fp(3)", (1, 6)),
    ("fan(3; W=[[1]])", (4,)),
    ("fan(3; W=[[1],[2]])", (4, 5)),
    ("fan(2; W=[[1],[2]])", (3, 4)),
    ("Fp(1)", (1, 2)),
)


def composite_exprs(count: int = 20, m: int = 2, max_vars: int = 18) -> list:
    """The first ``count`` single-gluing composites of small pseudo-fan atoms
    (atoms in a fixed order, circ before star) with m*|V| <= max_vars."""
    out = []
    for (a, ma), (b, mb) in itertools.product(_COMPOSITE_ATOMS, repeat=2):
        for op in ("circ", "star"):
            text = f"{op}({a}@{ma[-1]}, {b}@{mb[0]})"
            try:
                expr = parse_expr(text)
            except BeiError:
                continue
            if m * len(realize(expr).graph) <= max_vars:
                out.append(text)
            if len(out) == count:
                return out
    return out


FAMILIES = {
    "fans": fan_exprs,
    "fp": fp_exprs,
    "kn": kn_exprs,
    "paths": path_exprs,
    "chains": chain_exprs,
    "composites": composite_exprs,
}


def _verify_job(args):
    text, m, opts = args
    cache = open_cache(opts)
    try:
        rep = cmd_verify(text, m, opts, cache)
    except BeiError as e:
        rep = {"schema": SCHEMA, "expr": text, "m": m, "error": {"kind": e.kind, "message": str(e)},
               "verdicts": {}, "violation": False}
    if cache is not None:
        rep["cache"] = cache.stats()
    return rep


def cmd_suite(family: str, ms, opts: Options = Options(), jobs: int = 1,
              max_vars: int | None = None, **family_args) -> dict:
    """Verify every member of a family for every m; instances whose m*|V|
    exceeds ``max_vars`` are skipped."""
    if family not in FAMILIES:
        raise BeiError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}",
                       kind="unknown-family")
    exprs = FAMILIES[family](**family_args)
    work = []
    for text in exprs:
        nv = len(realize(parse_expr(text)).graph)
        for m in ms:
            if max_vars is None or m * nv <= max_vars:
                work.append((text, m, opts))
    t = time.perf_counter()
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            results = list(pool.map(_verify_job, work))
    else:
        results = [_verify_job(w) for w in work]
    results.sort(key=lambda r: (r.get("canonical", r["expr"]), r["m"]))
    counts = {}
    for r in results:
        for v in r["verdicts"].values():
            counts[v] = counts.get(v, 0) + 1
    mismatches = [k for r in results for k in r.get("cache", {}).get("mismatches", [])]
    violations = sum(1 for r in results if r["violation"])
    return {
        "schema": SCHEMA,
        "kernel": KERNEL_VERSION,
        "version": __version__,
        "command": "suite",
        "family": family,
        "family_args": family_args,
        "ms": list(ms),
        "char": opts.char,
        "order": opts.order,
        "caps": opts.caps(),
        "instances": results,
        "summary": {"count": len(results), "violations": violations,
                    "errors": sum(1 for r in results if "error" in r),
                    "verdicts": counts, "cache_mismatches": mismatches},
        "violation": violations > 0 or bool(mismatches),
        "timings": {"total": time.perf_counter() - t},
    }


# -------------------------------------------------------------------- output

def csv_rows(rep: dict) -> list:
    if rep.get("command") == "suite":
        return [row for r in rep["instances"] for row in csv_rows(r)]
    pred = rep.get("predicted") or {}
    oracle = rep.get("oracle") or {}
    verdicts = rep.get("verdicts") or {}
    rows = []
    for name in INVARIANTS:
        if name == "cm":
            p = pred.get("cm")
            kind, lo, hi, rules = ("flag" if p is not None else ""), p, p, ";".join(
                r for r, _ in pred.get("cm_rules", []))
        else:
            v = pred.get(name) or {}
            kind, lo, hi = v.get("kind", ""), v.get("lo"), v.get("hi")
            rules = ";".join(f["rule"] for f in v.get("fires", []))
        rows.append({
            "expr": rep.get("canonical", rep.get("expr")),
            "m": rep.get("m"),
            "char": rep.get("char"),
            "invariant": name,
            "predicted_kind": kind,
            "lo": lo,
            "hi": hi,
            "oracle": oracle.get(name),
            "verdict": verdicts.get(name, ""),
            "rules": rules,
        })
    return rows


def write_csv(rep: dict, path: str):
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        w.writeheader()
        for row in csv_rows(rep):
            w.writerow({k: "" if v is None else v for k, v in row.items()})


def write_json(rep: dict, path: str):
    with open(path, "w") as fh:
        json.dump(rep, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")


def _fmt_value(v: dict) -> str:
    if not v:
        return "-"
    if v["kind"] == "exact":
        return f"exact {v['value']}"
    hi = "inf" if v["hi"] is None else v["hi"]
    return f"[{v['lo']}, {hi}]"


def render_text(rep: dict) -> str:
    """Short human-readable summary of a report."""
    buf = io.StringIO()
    if rep.get("command") == "suite":
        s = rep["summary"]
        buf.write(f"suite {rep['family']}  m={rep['ms']}  instances={s['count']}  "
                  f"violations={s['violations']}  errors={s['errors']}\n")
        for r in rep["instances"]:
            flag = "VIOLATION" if r["violation"] else ("error" if "error" in r else "ok")
            vs = " ".join(f"{k}:{v}" for k, v in r["verdicts"].items())
            buf.write(f"  {flag:9s} m={r['m']} {r.get('canonical', r['expr'])}  {vs}\n")
        return buf.getvalue()
    buf.write(f"expr   {rep['canonical']}\n")
    buf.write(f"graph  {rep['graph']}  (|V|={rep['nvertices']}, m={rep['m']}, char={rep['char']})\n")
    if rep["command"] == "decompose":
        for p in rep["primes"]:
            buf.write(f"  T={p['T']}  components={p['components']}  dim={p['dim']}\n")
        buf.write(f"dim    {rep['dim']}  witness T={rep['witness']}\n")
        ident = rep["identity"]
        if ident is not None:
            buf.write(f"identity {json.dumps(ident, sort_keys=True)}\n")
        return buf.getvalue()
    pred = rep.get("predicted")
    oracle = rep.get("oracle")
    if "error" in rep:
        buf.write(f"error  {rep['error']['kind']}: {rep['error']['message']}\n")
    for name in INVARIANTS:
        parts = [f"{name:6s}"]
        if pred is not None:
            if name == "cm":
                parts.append(f"predicted {pred['cm']}")
            else:
                v = pred[name]
                parts.append(f"predicted {_fmt_value(v):14s}")
                parts.append("[" + ", ".join(f["rule"] for f in v["fires"]) + "]")
        if oracle is not None:
            val = oracle.get(name)
            parts.append(f"oracle {val if val is not None else 'n/a'}")
        if rep.get("verdicts"):
            parts.append(rep["verdicts"][name])
        buf.write("  ".join(parts) + "\n")
    if oracle is not None and oracle.get("betti"):
        buf.write("betti\n" + oracle["betti"])
    for k, reason in sorted((oracle or {}).get("unavailable", {}).items()):
        buf.write(f"unavailable {k}: {reason}\n")
    return buf.getvalue()
