"""eps-resolution chain transitivity, weak incompressibility, the omega-limit
point builder, and finite-horizon omega-limit proxies."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, TextIO

import networkx as nx
import numpy as np

from .kneading import DendriteSpace, resolve_tau
from .pseudo_orbit import tau_name, validate
from .shadowing import assign_shadow, canonical_shadow, delta_for_epsilon
from .symbolic import (
    STAR,
    ContractError,
    Scale,
    SymSeq,
    _tau_of,
    agreement_depth,
    is_admissible,
    parse_literal,
    simeq_words,
)


class OmegaBuildError(ContractError):
    pass


@dataclass(frozen=True)
class FinitePointSet:
    points: tuple
    tau: SymSeq

    @classmethod
    def make(cls, points: Sequence[SymSeq], space, check: bool = True) -> "FinitePointSet":
        tau = _tau_of(space)
        pts = tuple(points)
        if not pts:
            raise ContractError("empty point set")
        if check:
            if any(not p.is_exact for p in pts):
                raise ContractError("points must be EXACT")
            if len(set(pts)) != len(pts):
                raise ContractError("points must be distinct")
            for p in pts:
                if not is_admissible(p, tau).verdict:
                    raise ContractError(f"point {p} is not admissible")
        return cls(pts, tau)

    def __len__(self) -> int:
        return len(self.points)


def cycle_set(x: SymSeq, space) -> FinitePointSet:
    """The sigma-orbit of a periodic point."""
    pts = [x]
    while True:
        y = pts[-1].shift(1)
        if y == x:
            break
        pts.append(y)
    return FinitePointSet.make(pts, space)


@dataclass
class _DepthMatrix:
    """Agreement depth of sigma(p_u) against p_v, capped."""

    points: tuple
    tau: SymSeq
    cap: int = 0
    depth: Optional[np.ndarray] = None

    def ensure(self, n: int) -> np.ndarray:
        if self.depth is None or n >= self.cap:
            cap = max(2 * (n + 1), 16)
            m = len(self.points)
            d = np.zeros((m, m), dtype=np.int64)
            succ = [p.shift(1) for p in self.points]
            for u in range(m):
                for v in range(m):
                    a = agreement_depth(succ[u], self.points[v], self.tau, cap)
                    d[u, v] = a.depth if a.exact else cap
            self.cap, self.depth = cap, d
        return self.depth

    def edges(self, n: int) -> np.ndarray:
        """Boolean adjacency for sigma(p_u)↾n ≃ p_v↾n."""
        return self.ensure(n) > n


@dataclass(frozen=True)
class TransitionGraph:
    nodes: tuple
    edges: frozenset
    eps: Scale

    def digraph(self) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(self.nodes)
        g.add_edges_from(self.edges)
        return g


def transition_graph(pset: FinitePointSet, eps: Scale, space=None,
                     _matrix: Optional[_DepthMatrix] = None) -> TransitionGraph:
    mat = _matrix or _DepthMatrix(pset.points, pset.tau)
    adj = mat.edges(eps.n)
    edges = frozenset((int(u), int(v)) for u, v in zip(*np.nonzero(adj)))
    return TransitionGraph(tuple(range(len(pset))), edges, eps)


def is_ict(pset: FinitePointSet, eps: Scale, space=None) -> tuple[bool, dict]:
    """Strong connectivity with a path of length >= 1 between every pair."""
    g = transition_graph(pset, eps).digraph()
    if len(pset) == 1:
        ok = g.has_edge(0, 0)
        return ok, ({"cycle": [0, 0]} if ok else {"missing": (0, 0)})
    comps = list(nx.strongly_connected_components(g))
    if len(comps) == 1:
        return True, {"components": 1}
    for u in g.nodes:
        reach = nx.descendants(g, u)
        for v in g.nodes:
            if v != u and v not in reach:
                return False, {"missing": (u, v), "components": len(comps)}
    return False, {"components": len(comps)}


def is_weakly_incompressible(pset: FinitePointSet, eps: Scale, space=None) -> bool:
    """Every nonempty proper subset K has an edge into K from outside K."""
    m = len(pset)
    if m > 16:
        raise ContractError("brute force limited to 16 points")
    adj = _DepthMatrix(pset.points, pset.tau).edges(eps.n)
    into = [sum(1 << u for u in range(m) if adj[u, v]) for v in range(m)]
    full = (1 << m) - 1
    for K in range(1, full):
        outside = full & ~K
        if not any(into[v] & outside for v in range(m) if K >> v & 1):
            return False
    return True


# ------------------------------------------------------------- builder


@dataclass
class Segment:
    start: int
    end: int
    path: tuple
    n_delta: int
    offset: int


@dataclass
class OmegaBuildPlan:
    cycle: tuple
    segments: list = field(default_factory=list)
    depth: int = 0

    @property
    def offsets(self) -> list:
        return [s.offset for s in self.segments]


def _shortest_path(adj: np.ndarray, u: int, v: int) -> Optional[list[int]]:
    """Shortest walk u -> v with at least one edge."""
    m = adj.shape[0]
    prev = {}
    frontier = []
    for w in range(m):
        if adj[u, w] and w not in prev:
            prev[w] = u
            frontier.append(w)
    seen = set(frontier)
    while frontier and v not in seen:
        nxt = []
        for a in frontier:
            for w in np.flatnonzero(adj[a]):
                w = int(w)
                if w not in seen:
                    seen.add(w)
                    prev[w] = a
                    nxt.append(w)
        frontier = nxt
    if v not in seen:
        return None
    path = [v]
    while True:
        p = prev[path[-1]]
        path.append(p)
        if p == u and len(path) >= 2:
            break
    return path[::-1]


def build_omega_point(pset: FinitePointSet, space: DendriteSpace, depth: int,
                      order: Optional[Sequence[int]] = None) -> tuple[SymSeq, OmegaBuildPlan]:
    """Concatenate eps_i-shadows of delta_i-chains x_i -> x_{i+1} around a
    cyclic enumeration, segment i at shadow accuracy 2^-i."""
    if depth <= 0:
        raise ContractError("depth must be positive")
    if not any(STAR not in p.prefix(len(p.preperiod) + len(p.period)) for p in pset.points):
        raise ContractError("set needs a non-precritical point")
    m = len(pset)
    order = list(range(m)) if order is None else list(order)
    plan = OmegaBuildPlan(tuple(order))
    mat = _DepthMatrix(pset.points, pset.tau)
    out: list[str] = []
    total = 0
    i = 0
    while total < depth + 1:
        i += 1
        eps_i = Scale.from_exponent(i)
        delta_i = delta_for_epsilon(space, eps_i)
        adj = mat.edges(delta_i.n)
        u, v = order[(i - 1) % m], order[i % m]
        path = _shortest_path(adj, u, v)
        if path is None:
            raise OmegaBuildError(f"no chain from {u} to {v} at N_delta={delta_i.n} (segment {i})")
        loop = _shortest_path(adj, v, v)
        while len(path) < i + 2:
            if loop is None:
                raise OmegaBuildError(f"no loop at {v} for padding (segment {i})")
            path += loop[1:]
        orbit = validate([pset.points[k] for k in path], delta_i, pset.tau)
        if not orbit.validated:
            raise AssertionError("chain failed validation")
        shadow = canonical_shadow(orbit, eps_i, space, check_scale=False)
        z_i = assign_shadow(shadow, "ALL_ZERO", space, allow_star=False)
        piece = z_i.prefix(len(path) - 1)
        plan.segments.append(Segment(u, v, tuple(path), delta_i.n, total))
        out.append(piece)
        total += len(piece)
    word = "".join(out)
    plan.depth = len(word) - 1
    z = SymSeq.from_word(word, label="omega-point", facts=("star_free",) if STAR not in word else ())
    return z, plan


def approximate_omega(z: SymSeq, eps: Scale, space, horizon: int, burn_in: int) -> FinitePointSet:
    """Representatives of the eps-classes visited by sigma^i(z), burn_in <= i <= horizon."""
    if horizon < burn_in:
        raise ContractError("horizon precedes burn-in")
    tau = _tau_of(space)
    n = eps.n
    zw = z.prefix(horizon + n + 2)
    tw = tau.prefix(n)
    reps: list[int] = []
    rep_words: list[str] = []
    seen = set()
    for i in range(burn_in, horizon + 1):
        w = zw[i:i + n + 1]
        if w in seen:
            continue
        seen.add(w)
        if any(simeq_words(w, r, tw).holds for r in rep_words):
            continue
        reps.append(i)
        rep_words.append(w)
    return FinitePointSet(tuple(z.shift(i) for i in reps), tau)


@dataclass
class OmegaReport:
    holds: bool
    visits: list
    missing: list = field(default_factory=list)
    uncovered: list = field(default_factory=list)


def verify_omega_equals(pset: FinitePointSet, z: SymSeq, eps: Scale, space, horizon: int,
                        min_visits: int = 10, burn_in: int = 0) -> OmegaReport:
    """Every b visited within eps at least min_visits times past burn-in,
    and every iterate past burn-in within 2 eps of some b."""
    tau = _tau_of(space)
    n = eps.n
    coarse = max(n - 1, 0)
    zw = z.prefix(horizon + n + 1)
    tw = tau.prefix(n)
    bws = [b.prefix(n + 1) for b in pset.points]
    visits = [0] * len(bws)
    uncovered = []
    cache: dict = {}
    for i in range(burn_in, horizon + 1):
        w = zw[i:i + n + 1]
        hit = cache.get(w)
        if hit is None:
            fine = tuple(simeq_words(w, b, tw).holds for b in bws)
            near = any(simeq_words(w[:coarse + 1], b[:coarse + 1], tw).holds for b in bws)
            hit = cache[w] = (fine, near)
        for k, f in enumerate(hit[0]):
            visits[k] += f
        if not hit[1]:
            uncovered.append(i)
    missing = [k for k, c in enumerate(visits) if c < min_visits]
    return OmegaReport(not missing and not uncovered, visits, missing, uncovered[:20])


# --------------------------------------------------------------- files


def write_set(stream: TextIO, pset: FinitePointSet) -> None:
    stream.write(f"tau: {tau_name(pset.tau)}\n")
    for p in pset.points:
        if not p.is_exact:
            raise ContractError("only EXACT points can be written")
        stream.write(f"{p}\n")


def read_set(stream: TextIO) -> tuple[SymSeq, list[SymSeq]]:
    lines = [ln for ln in stream.read().split("\n") if ln.strip()]
    if not lines or not lines[0].startswith("tau:"):
        raise ContractError("malformed set file")
    tau = resolve_tau(lines[0].split(":", 1)[1].strip())
    return tau, [parse_literal(ln) for ln in lines[1:]]
