"""Polynomial reduction algorithms: simple, Fubini, compatibility graph (Brown) and Panzer.

Every set handled here holds canonical irreducible polynomials with constants and
pure monomials removed.  Sets are stored as tuples sorted by ``Poly.sort_key`` so
that indices, traces and checkpoint files are deterministic.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import time
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

from .poly import (
    Poly,
    PolyError,
    VarId,
    canonical,
    coefficients_in,
    degree_in,
    eval_zero,
    is_constant,
    is_monomial,
    parse,
    partial,
    to_str,
    var_from_name,
)
from .factor import irreducible_factors

INF = -1  # the point at infinity in provenance tuples
Pair = Tuple[int, int]
PolySet = Tuple[Poly, ...]


class ReductionError(ValueError):
    pass


class ReductionTimeout(Exception):
    """Raised when a search exceeds its wall-clock budget; never a verdict."""


# ----------------------------------------------------------------- helpers

_FACTOR_CACHE: Dict[Poly, PolySet] = {}
_FACTOR_LOCK = threading.Lock()


def strip_trivial(polys: Iterable[Poly]) -> List[Poly]:
    """Drop constants (including zero) and pure monomials."""
    return [p for p in polys if not is_constant(p) and not is_monomial(p)]


def sort_set(polys: Iterable[Poly]) -> PolySet:
    return tuple(sorted(set(polys), key=lambda p: p.sort_key()))


def nontrivial_factors(p: Poly, hints: Iterable[Poly] = ()) -> PolySet:
    """Canonical irreducible factors of ``p`` that are neither constants nor monomials."""
    if is_constant(p) or is_monomial(p):
        return ()
    key = canonical(p)
    with _FACTOR_LOCK:
        hit = _FACTOR_CACHE.get(key)
    if hit is not None:
        return hit
    out = sort_set(canonical(f) for f in strip_trivial(irreducible_factors(key, hints=hints)))
    with _FACTOR_LOCK:
        _FACTOR_CACHE[key] = out
    return out


def initial_set(polys: Iterable[Poly]) -> PolySet:
    """The irreducible, canonical, trivial-stripped set generated by ``polys``."""
    out: Set[Poly] = set()
    for p in polys:
        out.update(nontrivial_factors(p))
    return sort_set(out)


def is_linear_in(polys: Iterable[Poly], v: VarId) -> bool:
    return all(degree_in(p, v) <= 1 for p in polys)


def split_linear(f: Poly, v: VarId) -> Tuple[Poly, Poly]:
    """Return ``(g, h)`` with ``f = g*v + h``."""
    return partial(f, v), eval_zero(f, v)


def cross_resultant(f1: Poly, f2: Poly, v: VarId) -> Poly:
    """``g1*h2 - h1*g2`` for ``f_i = g_i*v + h_i``."""
    g1, h1 = split_linear(f1, v)
    g2, h2 = split_linear(f2, v)
    return g1 * h2 - h1 * g2


def discriminant(p: Poly, v: VarId) -> Poly:
    """Discriminant of a quadratic in ``v``."""
    if degree_in(p, v) != 2:
        raise PolyError(f"discriminant expects a quadratic in {v.name}")
    c, b, a = coefficients_in(p, v)
    return b * b - a * c * 4


def schwinger_variables(polys: Iterable[Poly]) -> List[VarId]:
    vs: Set[VarId] = set()
    for p in polys:
        vs.update(x for x in p.variables() if x.kind == "schwinger")
    return sorted(vs, key=lambda x: x.index)


def _complete(n: int) -> FrozenSet[Pair]:
    return frozenset(combinations(range(n), 2))


# ------------------------------------------------------------------ state

@dataclass(frozen=True)
class ReductionState:
    polys: PolySet
    compat: FrozenSet[Pair]
    provenance: Tuple[FrozenSet[FrozenSet[int]], ...] = ()

    def __post_init__(self) -> None:
        if len(set(self.polys)) != len(self.polys):
            raise ReductionError("duplicate polynomial in state")
        for i, j in self.compat:
            if not (0 <= i < j < len(self.polys)):
                raise ReductionError(f"bad compatibility edge {(i, j)}")
        for tuples in self.provenance:
            if any(len(t) != 2 for t in tuples):
                raise ReductionError("provenance tuples must have two members")

    @staticmethod
    def initial(polys: Iterable[Poly]) -> "ReductionState":
        ps = initial_set(polys)
        return ReductionState(ps, _complete(len(ps)))

    def compatible(self, i: int, j: int) -> bool:
        return (min(i, j), max(i, j)) in self.compat

    def poly_edges(self) -> FrozenSet[FrozenSet[Poly]]:
        return frozenset(frozenset((self.polys[i], self.polys[j])) for i, j in self.compat)

    def as_dict(self) -> dict:
        return {
            "polys": [to_str(p) for p in self.polys],
            "compat": sorted(list(e) for e in self.compat),
        }

    @staticmethod
    def from_dict(d: dict) -> "ReductionState":
        return ReductionState(tuple(parse(s) for s in d["polys"]), frozenset(tuple(e) for e in d["compat"]))


def _state_from(polys_to_tuples: Dict[Poly, Set[FrozenSet[int]]], edge_rule) -> ReductionState:
    polys = sort_set(polys_to_tuples)
    prov = tuple(frozenset(polys_to_tuples[p]) for p in polys)
    edges = frozenset((i, j) for i, j in combinations(range(len(polys)), 2) if edge_rule(i, j, polys, prov))
    return ReductionState(polys, edges, prov)


# ------------------------------------------------------------------ steps

@dataclass
class StepSizes:
    s1: int = 0
    s2: int = 0
    s3: int = 0


def _brown_core(polys: PolySet, allowed: Optional[FrozenSet[Pair]], v: VarId, sizes: Optional[StepSizes] = None
                ) -> Optional[Dict[Poly, Set[FrozenSet[int]]]]:
    """Shared S1/S2/S3 construction; ``allowed=None`` means every pair is used.

    Returns a map from each new polynomial to its provenance tuples, or None when
    some input polynomial is not linear in ``v``.
    """
    if not is_linear_in(polys, v):
        return None
    gh = [split_linear(f, v) for f in polys]
    out: Dict[Poly, Set[FrozenSet[int]]] = {}
    hints: Set[Poly] = set()
    s1: Set[Poly] = set()
    s2: Set[Poly] = set()
    s3: Set[Poly] = set()
    for i, (f, (g, h)) in enumerate(zip(polys, gh), start=1):
        for m in nontrivial_factors(g):
            out.setdefault(m, set()).add(frozenset((0, i)))
            s1.add(m)
        for m in nontrivial_factors(h):
            out.setdefault(m, set()).add(frozenset((i, INF)))
            if h == f:
                out[m].add(frozenset((0, i)))
            s2.add(m)
    hints = s1 | s2
    for i, j in combinations(range(len(polys)), 2):
        if allowed is not None and (i, j) not in allowed:
            continue
        (g1, h1), (g2, h2) = gh[i], gh[j]
        r = g1 * h2 - h1 * g2
        for m in nontrivial_factors(r, hints):
            out.setdefault(m, set()).add(frozenset((i + 1, j + 1)))
            s3.add(m)
    if sizes is not None:
        sizes.s1, sizes.s2, sizes.s3 = len(s1), len(s2), len(s3)
    return out


def simple_step(polys: Iterable[Poly], v: VarId, sizes: Optional[StepSizes] = None) -> Optional[PolySet]:
    """One step of the simple algorithm: None when some polynomial is nonlinear in ``v``."""
    res = _brown_core(sort_set(polys), None, v, sizes)
    return None if res is None else sort_set(res)


def _tuples_meet(i: int, j: int, polys: PolySet, prov) -> bool:
    return any(a & b for a in prov[i] for b in prov[j])


def brown_step(state: ReductionState, v: VarId, sizes: Optional[StepSizes] = None) -> Optional[ReductionState]:
    """Compatibility-restricted step with Brown's provenance rule for the new graph."""
    res = _brown_core(state.polys, state.compat, v, sizes)
    if res is None:
        return None
    return _state_from(res, _tuples_meet)


def _complete_step(state: ReductionState, v: VarId, sizes: Optional[StepSizes] = None) -> Optional[ReductionState]:
    res = simple_step(state.polys, v, sizes)
    return None if res is None else ReductionState(res, _complete(len(res)))


# -- Panzer brackets; the symbols 0 and infinity are encoded as ZERO_PT and INF_PT.
ZERO_PT = "0"
INF_PT = "inf"


def bracket(f, g, v: VarId) -> Optional[Poly]:
    """``[f, g]_v`` for polynomials linear in ``v`` or the points ``ZERO_PT``/``INF_PT``."""
    if isinstance(f, str) and isinstance(g, str):
        return None
    if isinstance(f, str):
        f, g = g, f
    gf, hf = split_linear(f, v)
    if g == ZERO_PT:
        return gf
    if g == INF_PT:
        return hf if hf else gf
    gg, hg = split_linear(g, v)
    return gf * hg - gg * hf


def panzer_step(state: ReductionState, v: VarId, sizes: Optional[StepSizes] = None) -> Optional[ReductionState]:
    """Panzer's bracket construction with the triangle rule for compatibility."""
    if not is_linear_in(state.polys, v):
        return None
    n = len(state.polys)
    pts: List[object] = list(state.polys) + [ZERO_PT, INF_PT]

    def comp(a: int, b: int) -> bool:
        if a == b:
            return True
        if a >= n or b >= n:
            return True
        return state.compatible(a, b)

    fac: Dict[FrozenSet[int], PolySet] = {}
    for a, b in combinations(range(n + 2), 2):
        if a >= n and b >= n:
            continue
        if not comp(a, b):
            continue
        r = bracket(pts[a], pts[b], v)
        fac[frozenset((a, b))] = nontrivial_factors(r) if r is not None else ()
    new = sort_set(m for fs in fac.values() for m in fs)
    index = {p: k for k, p in enumerate(new)}
    edges: Set[Pair] = set()
    keys = list(fac)
    by_vertex: Dict[int, List[FrozenSet[int]]] = {}
    for k in keys:
        for a in k:
            by_vertex.setdefault(a, []).append(k)
    for g, incident in by_vertex.items():
        for k1 in incident:
            (f,) = tuple(k1 - {g})
            for k2 in incident:
                (h,) = tuple(k2 - {g})
                if f != h and not comp(f, h):
                    continue
                for p in fac[k1]:
                    for q in fac[k2]:
                        if p != q:
                            i, j = index[p], index[q]
                            edges.add((min(i, j), max(i, j)))
    if sizes is not None:
        sizes.s1 = sum(1 for k in keys if ZERO_PT in [pts[x] for x in k if x >= n])
        sizes.s2 = sum(1 for k in keys if INF_PT in [pts[x] for x in k if x >= n])
        sizes.s3 = sum(1 for k in keys if all(x < n for x in k))
    return ReductionState(new, frozenset(edges))


# ------------------------------------------------------------------ traces

@dataclass
class TraceStep:
    variable: str
    linear: bool
    input: List[str]
    output: Optional[List[str]]
    s1: int = 0
    s2: int = 0
    s3: int = 0

    def as_dict(self, verbose: bool = False) -> dict:
        d = {"variable": self.variable, "linear": self.linear, "s1": self.s1, "s2": self.s2, "s3": self.s3,
             "input_size": len(self.input), "output_size": None if self.output is None else len(self.output)}
        if verbose:
            d["input"] = self.input
            d["output"] = self.output
        return d


@dataclass
class ReductionTrace:
    algorithm: str
    steps: List[TraceStep] = field(default_factory=list)

    def record(self, v: VarId, before: Sequence[Poly], after: Optional[Sequence[Poly]], sizes: StepSizes) -> None:
        self.steps.append(TraceStep(v.name, after is not None, [to_str(p) for p in before],
                                    None if after is None else [to_str(p) for p in after],
                                    sizes.s1, sizes.s2, sizes.s3))

    def sets(self) -> List[PolySet]:
        return [tuple(parse(s) for s in st.output) for st in self.steps if st.output is not None]

    def as_dict(self, verbose: bool = False) -> dict:
        return {"algorithm": self.algorithm, "steps": [s.as_dict(verbose) for s in self.steps]}


@dataclass
class Verdict:
    reducible: bool
    order: Optional[List[VarId]]
    trace: Optional[ReductionTrace]


# ------------------------------------------------------------------ budget

class Budget:
    """Wall-clock deadline shared by a search; ``None`` means unlimited."""

    def __init__(self, seconds: Optional[float] = None) -> None:
        self.deadline = None if seconds is None else time.monotonic() + seconds

    def check(self) -> None:
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise ReductionTimeout()


def _check_order(polys: Sequence[Poly], order: Sequence[VarId]) -> None:
    vs = schwinger_variables(polys)
    if sorted(order, key=lambda x: x.slot) != sorted(vs, key=lambda x: x.slot):
        raise ReductionError("order must be a permutation of the Schwinger variables "
                             + ",".join(v.name for v in vs))


# -------------------------------------------------------- simple algorithm

def simply_reducible(polys: Sequence[Poly], order: Sequence[VarId]) -> Tuple[bool, ReductionTrace]:
    order = list(order)
    _check_order(polys, order)
    cur = initial_set(polys)
    trace = ReductionTrace("simple")
    for v in order:
        sizes = StepSizes()
        nxt = simple_step(cur, v, sizes)
        trace.record(v, cur, nxt, sizes)
        if nxt is None:
            return False, trace
        cur = nxt
    return True, trace


def _order_search(start: ReductionState, variables: List[VarId], step, budget: Budget) -> Optional[List[VarId]]:
    seen: Set[Tuple[int, PolySet, FrozenSet[Pair]]] = set()

    def dfs(state: ReductionState, mask: int, prefix: List[VarId]) -> Optional[List[VarId]]:
        budget.check()
        if mask == (1 << len(variables)) - 1:
            return prefix
        if not state.polys:
            return prefix + [v for k, v in enumerate(variables) if not mask >> k & 1]
        key = (mask, state.polys, state.compat)
        if key in seen:
            return None
        seen.add(key)
        for k, v in enumerate(variables):
            if mask >> k & 1 or not is_linear_in(state.polys, v):
                continue
            nxt = step(state, v)
            if nxt is not None:
                found = dfs(nxt, mask | 1 << k, prefix + [v])
                if found is not None:
                    return found
        return None

    return dfs(start, 0, [])


def _replay(polys: Sequence[Poly], order: List[VarId], step, name: str) -> Tuple[bool, ReductionTrace]:
    state = ReductionState.initial(polys)
    trace = ReductionTrace(name)
    for v in order:
        sizes = StepSizes()
        nxt = step(state, v, sizes)
        trace.record(v, state.polys, None if nxt is None else nxt.polys, sizes)
        if nxt is None:
            return False, trace
        state = nxt
    return True, trace


def simple_search(polys: Sequence[Poly], timeout: Optional[float] = None) -> Verdict:
    """Search every order for the simple algorithm."""
    variables = schwinger_variables(polys)
    order = _order_search(ReductionState.initial(polys), variables, _complete_step, Budget(timeout))
    if order is None:
        return Verdict(False, None, None)
    ok, trace = _replay(polys, order, _complete_step, "simple")
    return Verdict(ok, order, trace)


# ---------------------------------------------------------- Panzer search

def panzer_reducible(polys: Sequence[Poly], order: Optional[Sequence[VarId]] = None,
                     timeout: Optional[float] = None) -> Verdict:
    """Straight-line Panzer reduction along ``order``, or a search over orders."""
    if order is not None:
        order = list(order)
        _check_order(polys, order)
        ok, trace = _replay(polys, order, panzer_step, "panzer")
        return Verdict(ok, order if ok else None, trace)
    variables = schwinger_variables(polys)
    found = _order_search(ReductionState.initial(polys), variables, panzer_step, Budget(timeout))
    if found is None:
        return Verdict(False, None, None)
    ok, trace = _replay(polys, found, panzer_step, "panzer")
    return Verdict(ok, found, trace)


# ------------------------------------------------- subset-memoized search

def _intersect(states: List[ReductionState], with_edges: bool) -> ReductionState:
    common = set(states[0].polys)
    for s in states[1:]:
        common &= set(s.polys)
    polys = sort_set(common)
    if not with_edges:
        return ReductionState(polys, _complete(len(polys)))
    edge_sets = [s.poly_edges() for s in states]
    edges = set()
    for i, j in combinations(range(len(polys)), 2):
        e = frozenset((polys[i], polys[j]))
        if all(e in es for es in edge_sets):
            edges.add((i, j))
    prov = []
    for p in polys:
        acc: Set[FrozenSet[int]] = set()
        for s in states:
            if s.provenance:
                acc |= s.provenance[s.polys.index(p)]
        prov.append(frozenset(acc))
    return ReductionState(polys, frozenset(edges), tuple(prov) if any(prov) else ())


def cache_dir() -> Optional[str]:
    return os.environ.get("SYMRED_CACHE_DIR") or None


class SubsetReducer:
    """Memoized ``S_[T]`` for the Fubini (complete graphs) or Brown construction.

    The memo maps a bitmask over ``variables`` to the state or None when undefined.
    With ``SYMRED_CACHE_DIR`` set the memo is spilled to disk and reloaded on resume.
    """

    def __init__(self, polys: Sequence[Poly], algorithm: str = "brown",
                 variables: Optional[Sequence[VarId]] = None, checkpoint: Optional[str] = None,
                 checkpoint_every: float = 30.0) -> None:
        if algorithm not in ("fubini", "brown"):
            raise ReductionError(f"unknown subset algorithm {algorithm!r}")
        self.algorithm = algorithm
        self.polys = list(polys)
        self.variables = list(variables) if variables is not None else schwinger_variables(polys)
        self.bit = {v: k for k, v in enumerate(self.variables)}
        self.memo: Dict[int, Optional[ReductionState]] = {0: ReductionState.initial(polys)}
        self._lock = threading.Lock()
        self._step = brown_step if algorithm == "brown" else _complete_step
        if checkpoint is None and cache_dir():
            checkpoint = os.path.join(cache_dir(), self.digest() + ".json")
        self.checkpoint = checkpoint
        self.checkpoint_every = checkpoint_every
        self._last_save = time.monotonic()
        self.resumed = 0
        if checkpoint and os.path.exists(checkpoint):
            self.load(checkpoint)

    def digest(self) -> str:
        text = json.dumps({"algorithm": self.algorithm, "polys": sorted(to_str(canonical(p)) for p in self.polys),
                           "variables": [v.name for v in self.variables]}, sort_keys=True)
        return hashlib.sha256(text.encode()).hexdigest()[:24]

    def mask(self, vs: Iterable[VarId]) -> int:
        m = 0
        for v in vs:
            if v not in self.bit:
                raise ReductionError(f"variable {v.name} not in the reduction")
            m |= 1 << self.bit[v]
        return m

    def state(self, mask: int, budget: Optional[Budget] = None) -> Optional[ReductionState]:
        """``S_[T]`` for the subset encoded by ``mask``; None when every branch is undefined."""
        with self._lock:
            if mask in self.memo:
                return self.memo[mask]
        if budget is not None:
            budget.check()
        branches = []
        for k in range(len(self.variables)):
            if not mask >> k & 1:
                continue
            prev = self.state(mask & ~(1 << k), budget)
            if prev is None:
                continue
            nxt = self._step(prev, self.variables[k])
            if nxt is not None:
                branches.append(nxt)
        result = _intersect(branches, self.algorithm == "brown") if branches else None
        with self._lock:
            self.memo.setdefault(mask, result)
        self._maybe_save()
        return result

    def polys_of(self, vs: Iterable[VarId]) -> Optional[PolySet]:
        st = self.state(self.mask(vs))
        return None if st is None else st.polys

    def search(self, timeout: Optional[float] = None) -> Verdict:
        """Breadth-first over subset sizes; a subset is viable if reached by a linear step."""
        budget = Budget(timeout)
        n = len(self.variables)
        full = (1 << n) - 1
        parent: Dict[int, Tuple[int, int]] = {0: (-1, -1)}
        frontier = [0]
        try:
            while frontier:
                nxt_frontier: List[int] = []
                for m in frontier:
                    st = self.state(m, budget)
                    if st is None:
                        continue
                    if m == full or not st.polys:
                        order = self._unwind(parent, m) + [v for k, v in enumerate(self.variables) if not m >> k & 1]
                        self.save()
                        return Verdict(True, order, self.trace(order))
                    for k, v in enumerate(self.variables):
                        t = m | 1 << k
                        if t == m or t in parent:
                            continue
                        if is_linear_in(st.polys, v):
                            parent[t] = (m, k)
                            nxt_frontier.append(t)
                frontier = nxt_frontier
        except ReductionTimeout:
            self.save()
            raise
        self.save()
        return Verdict(False, None, None)

    def _unwind(self, parent: Dict[int, Tuple[int, int]], m: int) -> List[VarId]:
        out = []
        while m:
            m, k = parent[m]
            out.append(self.variables[k])
        return out[::-1]

    def trace(self, order: Sequence[VarId]) -> ReductionTrace:
        trace = ReductionTrace(self.algorithm)
        m = 0
        for v in order:
            before = self.state(m)
            if before is None:
                break
            sizes = StepSizes()
            self._step(before, v, sizes)
            m |= 1 << self.bit[v]
            after = self.state(m)
            lin = is_linear_in(before.polys, v)
            trace.record(v, before.polys, after.polys if (after is not None and lin) else None, sizes)
            if not lin:
                break
        return trace

    def check_order(self, order: Sequence[VarId]) -> Tuple[bool, ReductionTrace]:
        order = list(order)
        _check_order(self.polys, order)
        trace = self.trace(order)
        return all(s.linear for s in trace.steps) and len(trace.steps) == len(order), trace

    # -- checkpointing
    def _maybe_save(self) -> None:
        if self.checkpoint and time.monotonic() - self._last_save > self.checkpoint_every:
            self.save()

    def save(self) -> None:
        if not self.checkpoint:
            return
        with self._lock:
            data = {"digest": self.digest(),
                    "memo": {str(m): (None if s is None else s.as_dict()) for m, s in self.memo.items()}}
        os.makedirs(os.path.dirname(os.path.abspath(self.checkpoint)), exist_ok=True)
        tmp = self.checkpoint + ".tmp"
        with open(tmp, "w") as fh:
            json.dump(data, fh, sort_keys=True)
        os.replace(tmp, self.checkpoint)
        self._last_save = time.monotonic()

    def load(self, path: str) -> None:
        with open(path) as fh:
            data = json.load(fh)
        if data.get("digest") != self.digest():
            raise ReductionError(f"checkpoint {path} belongs to a different input")
        for k, s in data["memo"].items():
            self.memo[int(k)] = None if s is None else ReductionState.from_dict(s)
        self.resumed = len(data["memo"])


def fubini_set(polys: Sequence[Poly], subset: Iterable[VarId]) -> Optional[PolySet]:
    return SubsetReducer(polys, "fubini").polys_of(subset)


def fubini_reducible(polys: Sequence[Poly], timeout: Optional[float] = None) -> Verdict:
    return SubsetReducer(polys, "fubini").search(timeout)


def brown_reducible(polys: Sequence[Poly], timeout: Optional[float] = None) -> Verdict:
    return SubsetReducer(polys, "brown").search(timeout)


def reduce(polys: Sequence[Poly], algorithm: str, order: Optional[Sequence[VarId]] = None,
           timeout: Optional[float] = None) -> Verdict:
    """Dispatch to one algorithm, checking a given order or searching for one."""
    if algorithm == "simple":
        if order is not None:
            ok, trace = simply_reducible(polys, order)
            return Verdict(ok, list(order) if ok else None, trace)
        return simple_search(polys, timeout)
    if algorithm == "panzer":
        return panzer_reducible(polys, order, timeout)
    if algorithm in ("fubini", "brown"):
        r = SubsetReducer(polys, algorithm)
        if order is not None:
            ok, trace = r.check_order(order)
            return Verdict(ok, list(order) if ok else None, trace)
        return r.search(timeout)
    raise ReductionError(f"unknown algorithm {algorithm!r}")


def parse_order(text: str) -> List[VarId]:
    return [var_from_name(t.strip()) for t in text.split(",") if t.strip()]
