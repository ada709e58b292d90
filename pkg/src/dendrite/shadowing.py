"""delta_eps bounds, the canonical eps-shadow, diamond assignment and
shadowing verification."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .kneading import DendriteSpace
from .pseudo_orbit import DeltaPseudoOrbit, FlipLedger, OrbitArray, build_ledger
from .symbolic import (
    DIAMOND,
    STAR,
    ContractError,
    DepthError,
    Scale,
    SymSeq,
    pattern_mismatch,
    simeq_words,
)

POLICIES = ("ALL_ZERO", "ALL_ONE", "PREFER_ORBIT", "RANDOM")


def delta_bound(space: DendriteSpace, n_eps: int) -> int:
    """The sufficient lower bound that N_delta must strictly exceed."""
    c = space.classification
    if c.kind == "PERIODIC":
        return 2 * (c.period + 1) * n_eps
    if c.kind == "NON_RECURRENT":
        return 2 * (n_eps + c.horizon + 1)
    # t is the least milestone index with m_t > N_eps; sum m_t .. m_{t+2N_eps+1}
    count = 1
    while True:
        ms = c.milestones(count)
        if ms[-1] > n_eps:
            break
        count += 1
    t = count
    ms = c.milestones(t + 2 * n_eps + 1)
    return sum(ms.values[t - 1:t + 2 * n_eps + 1]) + 2 * n_eps + 1


def delta_for_epsilon(space: DendriteSpace, eps: Scale) -> Scale:
    """delta_eps = 2^-N with N the least integer above the bound."""
    return Scale.from_exponent(delta_bound(space, eps.n) + 1)


@dataclass(frozen=True)
class CanonicalShadow:
    """The word head + tail, with diamonds at 0-based positions beta_k - 1.

    ``head`` covers positions 0..len(head)-1 and may hold DIAMOND symbols;
    ``tail`` continues the last point's own symbols.
    """

    head: str
    tail: SymSeq
    diamonds: tuple
    eps: Scale
    ledger: FlipLedger = field(repr=False)
    leads: str = field(default="", repr=False)

    def word(self, length: int) -> str:
        if length <= len(self.head):
            return self.head[:length]
        return self.head + self.tail.prefix(length - len(self.head))


def canonical_shadow(orbit: DeltaPseudoOrbit, eps: Scale, space: DendriteSpace,
                     ledger: Optional[FlipLedger] = None, check_scale: bool = True) -> CanonicalShadow:
    if check_scale:
        need = delta_for_epsilon(space, eps).n
        if orbit.n_delta < need:
            raise ContractError(f"N_delta={orbit.n_delta} below the required {need}")
    if not orbit.validated:
        raise ContractError("orbit is not a validated pseudo-orbit")
    arr = OrbitArray(orbit.points, max(eps.n, 1))
    ledger = ledger or build_ledger(orbit, eps, arr)
    n = len(orbit)
    diamonds = tuple(r.beta - 1 for r in ledger.records)
    size = max([n] + [p + 1 for p in diamonds])
    last = orbit.points[-1].prefix(size - n + 1)
    leads = "".join(arr.sym(k, 0) for k in range(1, n + 1)) + last[1:]
    chars = list(leads)
    for p in diamonds:
        chars[p] = DIAMOND
    tail = orbit.points[-1].shift(size - n + 1)
    return CanonicalShadow("".join(chars), tail, diamonds, eps, ledger, leads)


class UndecidedForcing(DepthError):
    def __init__(self, position: int):
        super().__init__(f"forcing undecided at position {position}")
        self.position = position


def _forced(shadow: CanonicalShadow, p: int, tau: SymSeq, depth: int) -> bool:
    """Whether the shadow after diamond p is ≈ tau as an infinite sequence."""
    head_rest = shadow.head[p + 1:]
    tail = shadow.tail
    if tau.is_exact and tail.is_exact:
        span = len(head_rest) + max(len(tail.preperiod), len(tau.preperiod))
        span += np.lcm(len(tail.period), len(tau.period)) + 1
        word = head_rest + tail.prefix(int(span) - len(head_rest))
        return pattern_mismatch(word, tau.prefix(int(span))) < 0
    window = len(head_rest) + depth
    if not tau.is_exact:
        window = min(window, tau.certified_depth + 1)
    if not tail.is_exact:
        window = min(window, len(head_rest) + tail.certified_depth + 1)
    word = (head_rest + tail.prefix(max(window - len(head_rest), 0)))[:window]
    if pattern_mismatch(word, tau.prefix(window)) >= 0:
        return False
    # an eventually periodic tail can never equal a proven aperiodic tau
    if tail.is_exact and {"aperiodic", "star_free"} <= tau.facts and STAR not in tail.period:
        return False
    raise UndecidedForcing(p)


def _policy_bits(policy: str, shadow: CanonicalShadow, seed: Optional[int]) -> list[str]:
    k = len(shadow.diamonds)
    if policy == "ALL_ZERO":
        return ["0"] * k
    if policy == "ALL_ONE":
        return ["1"] * k
    if policy == "PREFER_ORBIT":
        return [c if c in "01" else "0" for c in (shadow.leads[p] for p in shadow.diamonds)]
    if policy == "RANDOM":
        rng = np.random.default_rng(seed)
        return ["01"[b] for b in rng.integers(0, 2, size=k)]
    raise ContractError(f"unknown policy {policy!r}")


def assign_shadow(shadow: CanonicalShadow, policy: str, space, depth: int = 256,
                  seed: Optional[int] = None, allow_star: bool = True) -> SymSeq:
    """Replace each diamond by 0/1 per ``policy``; at the least diamond whose
    tail is ≈ tau, put a star and copy tau after it."""
    tau = space.tau if hasattr(space, "tau") else space
    bits = _policy_bits(policy, shadow, seed)
    head = list(shadow.head)
    for b, p in zip(bits, shadow.diamonds):
        if allow_star and _forced(shadow, p, tau, depth):
            return tau.with_prefix("".join(head[:p]) + STAR)
        head[p] = b
    return shadow.tail.with_prefix("".join(head))


@dataclass
class ShadowReport:
    verified: bool
    first_failure: Optional[int]
    checked: int


def verify_shadowing(orbit: DeltaPseudoOrbit, z: SymSeq, eps: Scale, space) -> ShadowReport:
    """sigma^{i-1}(z)↾N_eps ≃ x_i↾N_eps for every 1-based i."""
    tau = space.tau if hasattr(space, "tau") else space
    ne = eps.n
    n = len(orbit)
    zw = z.prefix(n + ne)
    tw = tau.prefix(ne)
    for i in range(1, n + 1):
        xw = orbit.points[i - 1].prefix(ne + 1)
        if not simeq_words(zw[i - 1:i + ne], xw, tw).holds:
            return ShadowReport(False, i, i)
    return ShadowReport(True, None, n)


@dataclass
class AgreementReport:
    holds: bool
    pseudo_agreement_violations: list = field(default_factory=list)
    critical_tracking_violations: list = field(default_factory=list)
    checked: int = 0


def check_pseudo_agreement(orbit: DeltaPseudoOrbit, eps: Scale, space,
                           ledger: Optional[FlipLedger] = None) -> AgreementReport:
    """x_n↾N_eps ≃ leads x^n_0 .. x^{n+N_eps}_0 for every n, and
    x_{beta_k+t}↾(N_eps-t) ≈ sigma^t(*tau)↾(N_eps-t) for every ledger entry."""
    tau = space.tau if hasattr(space, "tau") else space
    ne = eps.n
    arr = OrbitArray(orbit.points, ne + 1)
    ledger = ledger or build_ledger(orbit, eps, arr)
    n = len(orbit)
    tw = tau.prefix(ne + 1)
    crit = STAR + tw
    leads = "".join(arr.sym(k, 0) for k in range(1, n + ne + 2))
    rep = AgreementReport(True)
    for k in range(1, n + 1):
        rep.checked += 1
        if not simeq_words(arr.row(k), leads[k - 1:k + ne], tw).holds:
            rep.holds = False
            rep.pseudo_agreement_violations.append(k)
    for r in ledger.records:
        for t in range(ne + 1):
            rep.checked += 1
            row = arr.row(r.beta + t, ne - t + 1)
            if pattern_mismatch(row, crit[t:ne + 1]) >= 0:
                rep.holds = False
                rep.critical_tracking_violations.append((r.beta, t))
    return rep


def diamond_gaps(shadow: CanonicalShadow) -> list[int]:
    d = shadow.diamonds
    return [b - a for a, b in zip(d, d[1:])]
