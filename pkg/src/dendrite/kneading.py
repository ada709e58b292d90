"""Return times, kneading classification, milestones and the word-root lemma."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Union

from .symbolic import ContractError, DepthError, SymSeq, is_lambda_acceptable

INFINITY = math.inf


@dataclass(frozen=True)
class Absent:
    """No return found within the readable depth (not a proof of infinity)."""

    depth: int

    def __str__(self) -> str:
        return f"none<={self.depth}"


ReturnValue = Union[int, float, Absent]


def z_function(s: str) -> list[int]:
    n = len(s)
    z = [0] * n
    if n:
        z[0] = n
    left = right = 0
    for i in range(1, n):
        if i < right:
            z[i] = min(right - i, z[i - left])
        while i + z[i] < n and s[z[i]] == s[i + z[i]]:
            z[i] += 1
        if i + z[i] > right:
            left, right = i, i + z[i]
    return z


def return_time(tau: SymSeq, m: int) -> ReturnValue:
    """Least k >= 1 with sigma^k(tau)↾m = tau↾m."""
    if tau.is_exact:
        p0, per = len(tau.preperiod), len(tau.period)
        # shifts k > p0 + P repeat a shift in [p0 + 1, p0 + P]
        t = tau.prefix(p0 + per + m + 2)
        head = t[: m + 1]
        for k in range(1, p0 + per + 1):
            if t[k:k + m + 1] == head:
                return k
        return INFINITY
    w = tau.certified_depth + 1
    if m + 1 > w:
        raise DepthError("m beyond certified depth")
    t = tau.prefix(w)
    k = t.find(t[: m + 1], 1)
    return k if k > 0 else Absent(tau.certified_depth)


@dataclass(frozen=True)
class ReturnTimeTable:
    """r_m for m in [0, computed_to)."""

    entries: tuple
    computed_to: int

    def __getitem__(self, m: int) -> ReturnValue:
        if m >= self.computed_to:
            raise DepthError(f"r_{m} not computed (table to {self.computed_to})")
        return self.entries[m]


def return_time_table(tau: SymSeq, upto: int, window: Optional[int] = None) -> ReturnTimeTable:
    """r_m for all m < ``upto`` via one Z-function pass over a window of tau."""
    if tau.is_exact:
        return ReturnTimeTable(tuple(return_time(tau, m) for m in range(upto)), upto)
    w = tau.certified_depth + 1 if window is None else min(window, tau.certified_depth + 1)
    if upto > w:
        raise DepthError("table beyond readable window")
    z = z_function(tau.prefix(w))
    entries: list[ReturnValue] = [Absent(w - 1)] * upto
    # r_m is the least k with z[k] > m: sweep k upward filling unset m
    filled = 0
    for k in range(1, w):
        reach = min(z[k], upto)
        while filled < reach:
            entries[filled] = k
            filled += 1
        if filled >= upto:
            break
    return ReturnTimeTable(tuple(entries), upto)


@dataclass(frozen=True)
class MilestoneSequence:
    values: tuple
    certified_to: int

    def __post_init__(self):
        for a, b in zip(self.values, self.values[1:]):
            if not a < b:
                raise ContractError("milestones must increase")

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, i):
        return self.values[i]


def milestones(table: ReturnTimeTable, count: int) -> MilestoneSequence:
    """Greedy m_1 < m_2 < ... with m_i <= r_{m_i} < r_{m_i} + 1 < m_{i+1}."""
    out: list[int] = []
    m = 1
    while len(out) < count:
        if m >= table.computed_to:
            raise DepthError(f"table too shallow for {count} milestones")
        r = table[m]
        if not isinstance(r, int):
            raise ContractError(f"r_{m} is not finite ({r}); tau is non-recurrent here")
        if m <= r:
            out.append(m)
            m = r + 2
        else:
            m += 1
    vals = tuple(out)
    for a, b in zip(vals, vals[1:]):
        ra = table[a]
        assert a <= ra < ra + 1 < b
    return MilestoneSequence(vals, table.computed_to)


@dataclass(frozen=True)
class KneadingClass:
    """kind is PERIODIC (period), NON_RECURRENT (horizon) or RECURRENT_NONPERIODIC."""

    kind: str
    period: Optional[int] = None
    horizon: Optional[int] = None
    table: Optional[ReturnTimeTable] = field(default=None, repr=False)
    certified_to: Optional[int] = None

    def milestones(self, count: int) -> MilestoneSequence:
        if self.kind != "RECURRENT_NONPERIODIC":
            raise ContractError("milestones need a recurrent non-periodic tau")
        return milestones(self.table, count)

    def __str__(self) -> str:
        if self.kind == "PERIODIC":
            return f"PERIODIC{{P={self.period}}}"
        if self.kind == "NON_RECURRENT":
            return f"NON_RECURRENT{{M={self.horizon}}}"
        return f"RECURRENT_NONPERIODIC{{certified_to={self.certified_to}}}"


def nonrecurrence_horizon(tau: SymSeq) -> int:
    """Least M >= 1 with r_m infinite for all m >= M, for EXACT strictly
    preperiodic tau.

    r_m is finite iff some k >= 1 has lcp(sigma^k tau, tau) > m, so
    M = max(1, max_k lcp). Shifts k > p0 + P repeat shifts in [p0+1, p0+P],
    and two distinct eventually periodic sequences with preperiods at most p0
    and common period P agree on fewer than p0 + P symbols, so a window of
    2(p0 + P) + 2 symbols decides every lcp.
    """
    p0, per = len(tau.preperiod), len(tau.period)
    if p0 == 0:
        raise ContractError("tau is periodic")
    w = 2 * (p0 + per) + 2
    t = tau.prefix(w + p0 + per + 1)
    best = 0
    for k in range(1, p0 + per + 1):
        a, b = t[k:k + w], t[:w]
        lcp = next((i for i in range(w) if a[i] != b[i]), w)
        best = max(best, lcp)
    return max(1, best)


def classify(tau: SymSeq, depth: int = 256, acceptability_depth: int = 64) -> KneadingClass:
    """Kneading class of a Lambda-acceptable tau."""
    ver = is_lambda_acceptable(tau, min(depth, acceptability_depth))
    if not ver.verdict:
        raise ContractError(f"tau is not Lambda-acceptable: {ver.witness}")
    if tau.is_exact:
        if not tau.preperiod:
            return KneadingClass("PERIODIC", period=len(tau.period))
        return KneadingClass("NON_RECURRENT", horizon=nonrecurrence_horizon(tau))
    w = min(depth, tau.certified_depth) + 1
    upto = max(1, w // 4)
    table = return_time_table(tau, upto, window=w)
    for m in range(upto):
        if not isinstance(table[m], int):
            return KneadingClass("NON_RECURRENT", horizon=max(1, m), table=table, certified_to=w - 1)
    return KneadingClass("RECURRENT_NONPERIODIC", table=table, certified_to=w - 1)


@dataclass(frozen=True)
class PrimitiveRootResult:
    gamma: str
    ell: int
    repetitions: int


def word_overlap_root(alpha: str, m: int) -> PrimitiveRootResult:
    """If alpha·alpha has period n-m, alpha is a power of a word of length gcd(n, m)."""
    n = len(alpha)
    if not 1 <= m < n:
        raise ContractError(f"need 1 <= m < n, got m={m}, n={n}")
    beta = alpha + alpha
    d = n - m
    for i in range(len(beta) - d):
        if beta[i] != beta[i + d]:
            raise ContractError(f"overlap precondition fails: beta_{i} != beta_{i + d}")
    ell = math.gcd(n, m)
    gamma = alpha[:ell]
    if gamma * (n // ell) != alpha:
        raise AssertionError("word-root conclusion failed")
    return PrimitiveRootResult(gamma, ell, n // ell)


@dataclass(frozen=True)
class GrowthReport:
    witnesses: tuple
    depth: int
    upper_half_ok: bool


def check_return_time_growth(tau: SymSeq, depth: int) -> GrowthReport:
    """All t in [1, depth] with r_t >= t (diagnostic for the growth lemma)."""
    if tau.is_exact:
        raise ContractError("premise requires a recurrent non-periodic tau")
    if depth <= 0:
        return GrowthReport((), depth, True)
    table = return_time_table(tau, depth + 1)
    wit = []
    for t in range(1, depth + 1):
        r = table[t]
        if not isinstance(r, int):
            raise ContractError(f"no return for m={t}: tau looks non-recurrent")
        if r >= t:
            wit.append(t)
    upper = any(t > depth / 2 for t in wit)
    return GrowthReport(tuple(wit), depth, upper)


# --------------------------------------------------- example kneading source


def period_doubling_symbol(n: int) -> str:
    """tau_n = 1 when the 2-adic valuation of n+1 is even, else 0."""
    k = n + 1
    v = (k & -k).bit_length() - 1
    return "1" if v % 2 == 0 else "0"


def period_doubling(depth: int = 1 << 16) -> SymSeq:
    """The period-doubling kneading sequence 1011101010111011... .

    It is star-free and not eventually periodic (a Toeplitz sequence).
    """
    return SymSeq.generated(period_doubling_symbol, depth, label="period-doubling",
                            facts=("aperiodic", "star_free"))


# ------------------------------------------------------------------ space


@dataclass(frozen=True)
class DendriteSpace:
    """A verified kneading sequence with its classification."""

    tau: SymSeq
    acceptability: object
    classification: KneadingClass

    @classmethod
    def from_tau(cls, tau: SymSeq, depth: int = 1 << 16) -> "DendriteSpace":
        ver = is_lambda_acceptable(tau, 64)
        if not ver.verdict:
            raise ContractError(f"tau is not Lambda-acceptable: {ver.witness}")
        return cls(tau, ver, classify(tau, depth))

    @property
    def kind(self) -> str:
        return self.classification.kind


def resolve_tau(text: str, depth: int = 1 << 16) -> SymSeq:
    """A literal such as ``1[0]`` or the generator name ``period-doubling``."""
    from .symbolic import parse_literal

    if text.strip() in ("period-doubling", "pd"):
        return period_doubling(depth)
    return parse_literal(text)
