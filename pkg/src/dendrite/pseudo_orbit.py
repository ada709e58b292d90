"""Delta pseudo-orbits, the array x^k_j, flip columns and rows, and the
alpha/beta/j/i flip ledger.

Point indices are 1-based: ``orbit.point(1)`` is x_1. Array rows past the
last point x_n continue its true orbit, x_{n+s} = sigma^s(x_n), which is the
same convention the canonical shadow uses for its tail.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Sequence, TextIO

import numpy as np

from .kneading import DendriteSpace, resolve_tau
from .symbolic import (
    STAR,
    ContractError,
    DepthError,
    Scale,
    SymSeq,
    _tau_of,
    close,
    first_diff,
    is_admissible,
    parse_literal,
    pattern_mismatch,
    simeq,
)


@dataclass(frozen=True)
class DeltaPseudoOrbit:
    points: tuple
    scale: Scale
    tau: SymSeq
    validated: bool
    first_violation: Optional[int] = None  # i with sigma(x_i), x_{i+1} not close

    def __len__(self) -> int:
        return len(self.points)

    def point(self, k: int) -> SymSeq:
        if not 1 <= k <= len(self.points):
            raise ContractError(f"point index {k} outside 1..{len(self.points)}")
        return self.points[k - 1]

    @property
    def n_delta(self) -> int:
        return self.scale.n


def validate(points: Sequence[SymSeq], scale: Scale, space) -> DeltaPseudoOrbit:
    """Check sigma(x_i)↾N ≃ x_{i+1}↾N for every consecutive pair."""
    tau = _tau_of(space)
    pts = tuple(points)
    if not pts:
        raise ContractError("empty orbit")
    n = scale.n
    for i in range(len(pts) - 1):
        succ = pts[i].shift(1)
        if pts[i + 1] is succ or (succ.is_exact and succ == pts[i + 1]):
            continue
        if not close(succ, pts[i + 1], tau, n):
            return DeltaPseudoOrbit(pts, scale, tau, False, i + 1)
    return DeltaPseudoOrbit(pts, scale, tau, True)


# ------------------------------------------------------------- the array


class OrbitArray:
    """Row access x^k_j for 1-based k, extended past the end by the true orbit."""

    def __init__(self, points: Sequence[SymSeq], width: int):
        self.n = len(points)
        self.width = width
        self.rows = [p.prefix(width) for p in points]
        self._last = points[-1]
        self._tail = ""

    def _tail_upto(self, length: int) -> str:
        if length > len(self._tail):
            self._tail = self._last.prefix(max(length, 2 * len(self._tail), 64))
        return self._tail

    def row(self, k: int, width: Optional[int] = None) -> str:
        w = self.width if width is None else width
        if k < 1:
            raise ContractError(f"row {k} < 1")
        if k <= self.n and w <= self.width:
            return self.rows[k - 1][:w]
        if k <= self.n:
            raise DepthError("row wider than the array")
        s = k - self.n
        return self._tail_upto(s + w)[s:s + w]

    def sym(self, k: int, j: int) -> str:
        if k <= self.n:
            return self.rows[k - 1][j]
        return self._tail_upto(k - self.n + j + 1)[k - self.n + j]

    def defects(self, k: int) -> tuple:
        """Columns c < width-1 where x_{k+1} differs from sigma(x_k).

        Rows past n follow the true orbit, so they have no defects.
        """
        if k >= self.n:
            return ()
        cache = self.__dict__.setdefault("_defects", {})
        if k not in cache:
            a = np.frombuffer(self.rows[k].encode("utf-8"), dtype=np.uint8)
            b = np.frombuffer(self.rows[k - 1].encode("utf-8"), dtype=np.uint8)
            m = min(len(a), len(b) - 1)
            cache[k] = tuple(int(c) for c in np.flatnonzero(a[:m] != b[1:m + 1]))
        return cache[k]


@dataclass(frozen=True)
class FlipRecord:
    owner: int
    column: int
    row: int
    case: int = 1


def flip_row(arr: OrbitArray, k: int, j: int) -> Optional[tuple[int, int]]:
    """(row, case) if j is a flip column relative to x_k, else None.

    Case 1: least i in [1, j] with x^k_j != x^{k+i}_{j-i}.
    Case 2: the whole diagonal x^k_j, ..., x^{k+j}_0 is stars; row 1.
    """
    top = arr.sym(k, j)
    for i in range(1, j + 1):
        if arr.sym(k + i, j - i) != top:
            return i, 1
    if top == STAR:
        return 1, 2
    return None


def first_flip(arr: OrbitArray, k: int, horizon: int) -> Optional[tuple[int, int, int]]:
    """Least flip column j < horizon relative to x_k as (j, row, case).

    Columns below J are free of case-1 flips iff x_{k+i}[0:J-i] equals
    x_k[i:J] for every i, so each row is compared as one slice.
    """
    if horizon <= 0:
        return None
    top = arr.row(k, horizon)
    best = horizon
    for i in range(1, horizon):
        if i >= best:
            break
        d = first_diff(arr.row(k + i, best - i), top[i:best])
        if d >= 0:
            best = i + d
    star = top.find(STAR, 0, best)
    if star >= 0:
        return star, 1, 2
    if best < horizon:
        r = flip_row(arr, k, best)
        return best, r[0], r[1]
    return None


def flip_scan(orbit: DeltaPseudoOrbit, anchor: int, horizon: int,
              arr: Optional[OrbitArray] = None) -> list[FlipRecord]:
    """All flip columns j < horizon relative to x_anchor with their rows.

    Down the diagonal of column j the symbol stays x^anchor_j until the first
    step defect, so the flip row of j is the least i with j - i a defect of
    the step into x_{anchor+i}.
    """
    if not 1 <= anchor <= len(orbit):
        raise ContractError(f"anchor {anchor} outside the orbit")
    if horizon > orbit.n_delta + 1:
        raise ContractError("horizon exceeds N_delta + 1")
    if arr is None or arr.width < horizon:
        arr = OrbitArray(orbit.points, horizon)
    rows: dict = {}
    for i in range(1, min(horizon, len(orbit) - anchor + 1)):
        for c in arr.defects(anchor + i - 1):
            j = i + c
            if j >= horizon:
                break
            rows.setdefault(j, i)
    top = arr.row(anchor, horizon)
    out = [FlipRecord(anchor, j, i, 1) for j, i in rows.items()]
    j = top.find(STAR)
    while j >= 0:
        if j not in rows:
            out.append(FlipRecord(anchor, j, 1, 2))
        j = top.find(STAR, j + 1)
    return sorted(out, key=lambda f: f.column)


@dataclass(frozen=True)
class LedgerEntry:
    alpha: int
    j: int
    i: int
    beta: int
    case: int


@dataclass(frozen=True)
class FlipLedger:
    records: tuple
    horizon: int

    def __len__(self) -> int:
        return len(self.records)

    @property
    def betas(self) -> tuple:
        return tuple(r.beta for r in self.records)


def build_ledger(orbit: DeltaPseudoOrbit, eps: Scale, arr: Optional[OrbitArray] = None) -> FlipLedger:
    """The alpha_k, j_k, i_k, beta_k sequences, scanning alpha in 1..n."""
    n_eps = eps.n
    arr = arr or OrbitArray(orbit.points, max(n_eps, 1))
    out = []
    alpha = 1
    n = len(orbit)
    while alpha <= n:
        hit = first_flip(arr, alpha, n_eps)
        if hit is not None:
            j, row, case = hit
            hit = LedgerEntry(alpha, j, row, alpha + j, case)
        if hit is None:
            alpha += 1
            continue
        out.append(hit)
        alpha = hit.beta + 1
    return FlipLedger(tuple(out), n_eps)


# ------------------------------------------------------- lemma checkers


@dataclass
class CheckReport:
    holds: bool
    checked: int = 0
    counterexamples: list = field(default_factory=list)
    detail: dict = field(default_factory=dict)


def verify_between_flips(orbit: DeltaPseudoOrbit, k: int, j1: int, j2: int,
                         arr: Optional[OrbitArray] = None) -> CheckReport:
    """Equality families between consecutive flip columns j1 < j2 of x_k.

    Truncations are read as words of the stated length: columns strictly
    between j1 and j2.
    """
    if not j1 < j2:
        raise ContractError("need j1 < j2")
    if arr is None or arr.width < j2 + 1:
        arr = OrbitArray(orbit.points, j2 + 1)
    cols = [f.column for f in flip_scan(orbit, k, min(j2 + 1, orbit.n_delta + 1), arr)]
    if j1 not in cols or j2 not in cols:
        raise ContractError("j1 and j2 must both be flip columns")
    if cols.index(j2) != cols.index(j1) + 1:
        raise ContractError("j1 and j2 are not consecutive flip columns")
    span = j2 - j1 - 1
    base = arr.row(k, j2 + 1)
    rep = CheckReport(True)
    for ell in range(1, j1 + 2):
        lhs = base[j1 + 1:j2]
        rhs = arr.row(k + ell, j2 + 1)[j1 + 1 - ell:j2 - ell]
        rep.checked += 1
        if lhs != rhs:
            rep.holds = False
            rep.counterexamples.append(("family1", ell, lhs, rhs))
    for m in range(1, span + 1):
        lhs = base[j1 + m:j2]
        rhs = arr.row(k + j1 + m, j2 + 1)[: j2 - j1 - m]
        rep.checked += 1
        if lhs != rhs:
            rep.holds = False
            rep.counterexamples.append(("family2", m, lhs, rhs))
    return rep


def anchor_column(orbit: DeltaPseudoOrbit, k: int) -> Optional[int]:
    """Column, relative to x_k, of the star in the precritical witness
    between sigma(x_k) and x_{k+1}; None if the step is exact."""
    n = orbit.n_delta
    a = orbit.point(k).shift(1).truncate(n)
    b = orbit.point(k + 1).truncate(n)
    res = simeq(a, b, orbit.tau)
    if not res.holds:
        raise ContractError(f"step {k} is not a delta step")
    return None if res.star_position is None else res.star_position + 1


def verify_periodic_flip_bound(orbit: DeltaPseudoOrbit, space: DendriteSpace, k: int,
                               j: Optional[int] = None,
                               arr: Optional[OrbitArray] = None) -> CheckReport:
    """Enumerate the s_i/t_i chain of out-of-sync flip columns t > j relative
    to x_k and check N_delta - t_i < i P."""
    if space.kind != "PERIODIC":
        raise ContractError("periodic kneading sequence required")
    per = space.classification.period
    nd = orbit.n_delta
    if j is None:
        j = anchor_column(orbit, k)
        if j is None:
            raise ContractError("no flip at the anchor step")
    if j >= nd:
        raise ContractError(f"anchor column {j} is not below N_delta={nd}")
    arr = arr or OrbitArray(orbit.points, nd + 1)
    # out-of-sync flips are those past the anchor column; the bound's
    # argument shifts tau by t + 1 - j, which needs t > j
    flips = [f for f in flip_scan(orbit, k, nd, arr) if f.column > j and (f.column - j) % per]
    chain = []
    last_row, last_col = 0, nd
    while True:
        cands = [f for f in flips if f.row > last_row and f.column < last_col]
        if not cands:
            break
        f = min(cands, key=lambda r: (r.row, r.column))
        chain.append(f)
        last_row, last_col = f.row, f.column
    rep = CheckReport(True, detail={"anchor": k, "j": j, "s": [f.row for f in chain],
                                    "t": [f.column for f in chain]})
    for idx, f in enumerate(chain, start=1):
        rep.checked += 1
        if not nd - f.column < idx * per:
            rep.holds = False
            rep.counterexamples.append((idx, f.row, f.column))
    return rep


def verify_recurrent_flip_gap(orbit: DeltaPseudoOrbit, space: DendriteSpace, k: int,
                              j1: int, j2: int, t: int,
                              arr: Optional[OrbitArray] = None) -> CheckReport:
    """Given consecutive flips j1 < j2 of x_k meeting the gap premises at
    milestone index t (1-based), find the promised third flip j3."""
    if space.kind != "RECURRENT_NONPERIODIC":
        raise ContractError("recurrent non-periodic kneading sequence required")
    nd = orbit.n_delta
    ms = space.classification.milestones(t + 1)
    m_t, m_next = ms[t - 1], ms[t]
    arr = arr or OrbitArray(orbit.points, nd + 1)
    flips = {f.column: f for f in flip_scan(orbit, k, nd + 1, arr)}
    if j1 not in flips or j2 not in flips or any(c in flips for c in range(j1 + 1, j2)):
        raise ContractError("j1, j2 are not consecutive flip columns")
    i1, i2 = flips[j1].row, flips[j2].row
    if i1 == i2:
        raise ContractError("rows must differ")
    if not (j2 - j1 - 1 < m_t and nd - j2 - 1 > m_next):
        raise ContractError("gap premises not satisfied")
    lo, hi = sorted((i1, i2))
    found = [f for c, f in sorted(flips.items())
             if c > j2 and lo < f.row < hi and c - j2 - 1 < m_next]
    rep = CheckReport(bool(found), 1, detail={"i1": i1, "i2": i2, "m_t": m_t, "m_next": m_next})
    if found:
        rep.detail["j3"] = found[0].column
        rep.detail["i3"] = found[0].row
    else:
        rep.counterexamples.append((k, j1, j2, t))
    return rep


# ------------------------------------------------------------ generator


def _pows(p: int, n: int, _cache: dict = {}) -> np.ndarray:
    base = 131
    arr = _cache.get(p)
    if arr is None or len(arr) < n:
        size = max(n, 1024, 0 if arr is None else 2 * len(arr))
        vals = [1] * size
        for i in range(1, size):
            vals[i] = vals[i - 1] * base % p
        arr = np.array(vals, dtype=np.int64)
        _cache[p] = arr
    return arr


_PRIMES = (1_000_000_007, 998_244_353)


def _prefix_sums(word: str, p: int) -> np.ndarray:
    w = np.frombuffer(word.encode("ascii"), dtype=np.uint8).astype(np.int64)
    pw = _pows(p, len(word) + 1)
    out = np.zeros(len(word) + 1, dtype=np.int64)
    np.cumsum(w * pw[: len(word)], out=out[1:])
    return out % p


@lru_cache(maxsize=16)
def _prefix_function(word: str) -> tuple:
    pi = [0] * len(word)
    k = 0
    for i in range(1, len(word)):
        while k and word[i] != word[k]:
            k = pi[k - 1]
        if word[i] == word[k]:
            k += 1
        pi[i] = k
    return tuple(pi)


@lru_cache(maxsize=16)
def _tau_sums(tau_word: str) -> tuple:
    return tuple(_prefix_sums(tau_word, p) for p in _PRIMES)


def _longest_tau_suffix(window: str, tau_word: str) -> int:
    """Largest l <= N with window[N+1-l:] == tau_word[:l], star-free words."""
    n = len(tau_word)
    s = np.arange(1, n + 2)
    ok = np.ones(n + 1, dtype=bool)
    for p, st in zip(_PRIMES, _tau_sums(tau_word)):
        sw = _prefix_sums(window, p)
        pw = _pows(p, n + 2)
        lhs = (sw[n + 1] - sw[s]) % p
        rhs = (st[n + 1 - s] * pw[s]) % p
        ok &= lhs == rhs
    for start in s[ok]:
        start = int(start)
        if window[start:] == tau_word[: n + 1 - start]:
            return n + 1 - start
    return 0


def legal_columns(window: str, tau_word: str) -> list[int]:
    """Columns j of a successor window w = w_0..w_N at which flipping w_j
    keeps the flipped word ≃ w: w_{j+1..N} ≈ tau_0..tau_{N-j-1}."""
    n = len(tau_word)
    if len(window) != n + 1:
        raise ContractError("window must be one longer than the tau word")
    if STAR in tau_word or STAR in window:
        return [j for j in range(n + 1)
                if window[j] != STAR and pattern_mismatch(window[j + 1:], tau_word[: n - j]) < 0]
    pi = _prefix_function(tau_word)
    ell = _longest_tau_suffix(window, tau_word)
    cols = []
    while ell > 0:
        cols.append(n - ell)
        ell = pi[ell - 1]
    cols.append(n)
    return sorted(cols)


def _bits(rng: np.random.Generator, n: int) -> str:
    return "".join("01"[b] for b in rng.integers(0, 2, size=n))


def _fill_stars(word: str, rng: np.random.Generator) -> str:
    if STAR not in word:
        return word
    fill = iter(_bits(rng, word.count(STAR)))
    return "".join(next(fill) if c == STAR else c for c in word)


def random_admissible_point(space, rng: np.random.Generator, max_pre: int = 8,
                            max_per: int = 8, track: int = 0, tries: int = 500) -> SymSeq:
    """Random star-free eventually periodic admissible point.

    With ``track`` > 0 the preperiod contains a copy of tau of that length
    (stars filled at random) after a short random head, so the orbit passes
    close to the critical point.
    """
    tau = _tau_of(space)
    for _ in range(tries):
        pre = _bits(rng, int(rng.integers(0, max_pre + 1)))
        per = _bits(rng, int(rng.integers(1, max_per + 1)))
        if track:
            head = _bits(rng, int(rng.integers(2, max_pre + 3)))
            pre = head + _fill_stars(tau.prefix(track), rng) + pre
        x = SymSeq.exact(pre, per)
        if is_admissible(x, tau).verdict:
            return x
    raise ContractError("no admissible random point found")


def _plant(succ: SymSeq, window: str, j: int, tau: SymSeq, rng: np.random.Generator,
           extend: bool) -> Optional[SymSeq]:
    n = len(window) - 1
    flipped = "1" if window[j] == "0" else "0"
    head = window[:j] + flipped + window[j + 1:]
    for _ in range(4):
        if extend:
            cont = _fill_stars(tau.prefix(2 * n + 8)[n - j:], rng)
            y = SymSeq.exact(head + cont + _bits(rng, int(rng.integers(0, 4))),
                             _bits(rng, int(rng.integers(1, 6))))
        else:
            y = succ.replace(j, flipped)
        if is_admissible(y, tau).verdict:
            return y
        if not extend:
            return None
    return None


def random_pseudo_orbit(space, scale: Scale, length: int, seed: int, flip_rate: float = 0.3,
                        start: Optional[SymSeq] = None, extend_prob: float = 0.5,
                        track_prob: float = 0.5, column: str = "uniform") -> DeltaPseudoOrbit:
    """Seeded delta pseudo-orbit: sigma steps with random single-symbol flips
    at legal columns. A flip may also re-plant a tau-tracking tail past the
    window (``extend_prob``), which keeps later flips possible near the
    critical orbit.

    ``column`` is "uniform" (any legal column) or "smallest" (the legal
    column nearest the front, which maximizes flips seen at small scales).
    """
    if column not in ("uniform", "smallest"):
        raise ContractError(f"unknown column rule {column!r}")
    if length < 1:
        raise ContractError("length must be positive")
    tau = _tau_of(space)
    rng = np.random.default_rng(seed)
    n = scale.n
    tau_word = tau.prefix(n)
    if start is None:
        track = n + length + 8 if rng.random() < track_prob else 0
        start = random_admissible_point(tau, rng, track=track)
    pts = [start]
    for _ in range(length - 1):
        succ = pts[-1].shift(1)
        nxt = succ
        if flip_rate > 0 and rng.random() < flip_rate:
            window = succ.prefix(n + 1)
            cols = legal_columns(window, tau_word)
            if cols:
                j = cols[0] if column == "smallest" else cols[int(rng.integers(len(cols)))]
                y = _plant(succ, window, j, tau, rng, bool(rng.random() < extend_prob))
                if y is not None:
                    nxt = y
        pts.append(nxt)
    orbit = validate(pts, scale, tau)
    if not orbit.validated:
        raise AssertionError(f"generator produced an invalid step at {orbit.first_violation}")
    return orbit


def random_rough_orbit(space, scale: Scale, length: int, seed: int, tries: int = 20) -> DeltaPseudoOrbit:
    """Seeded pseudo-orbit whose steps flip one or two arbitrary window
    symbols and redraw the tail, kept only when still delta-close and
    admissible. Meant for small N_delta, where it reaches flip patterns
    (such as out-of-sync flips) that the legal-column generator misses."""
    tau = _tau_of(space)
    rng = np.random.default_rng(seed)
    n = scale.n
    pts = [random_admissible_point(tau, rng, max_pre=n + 3, max_per=4)]
    for _ in range(length - 1):
        succ = pts[-1].shift(1)
        nxt = succ
        for _ in range(tries):
            w = list(succ.prefix(n + 1))
            for c in rng.choice(n + 1, size=int(rng.integers(1, 3)), replace=False):
                w[c] = "1" if w[c] == "0" else "0"
            y = SymSeq.exact("".join(w) + _bits(rng, int(rng.integers(0, 4))),
                             _bits(rng, int(rng.integers(1, 4))))
            if close(succ, y, tau, n) and is_admissible(y, tau).verdict:
                nxt = y
                break
        pts.append(nxt)
    orbit = validate(pts, scale, tau)
    if not orbit.validated:
        raise AssertionError(f"rough generator produced an invalid step at {orbit.first_violation}")
    return orbit


# -------------------------------------------------------------- file I/O


def tau_name(tau: SymSeq) -> str:
    if tau.is_exact:
        return str(tau)
    return tau.label or "generated"


def write_orbit(stream: TextIO, orbit: DeltaPseudoOrbit) -> None:
    stream.write(f"tau: {tau_name(orbit.tau)}\n")
    stream.write(f"delta_exponent: {orbit.n_delta}\n")
    for p in orbit.points:
        if not p.is_exact:
            raise ContractError("only EXACT points can be written")
        stream.write(f"{p}\n")


def read_orbit(stream: TextIO) -> tuple[SymSeq, Scale, list[SymSeq]]:
    lines = [ln for ln in stream.read().split("\n") if ln.strip()]
    if len(lines) < 3 or not lines[0].startswith("tau:") or not lines[1].startswith("delta_exponent:"):
        raise ContractError("malformed orbit file")
    tau = resolve_tau(lines[0].split(":", 1)[1].strip())
    scale = Scale.from_exponent(int(lines[1].split(":", 1)[1]))
    return tau, scale, [parse_literal(ln) for ln in lines[2:]]
