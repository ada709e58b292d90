"""Sequences over {0,1,*}, the approximate-match and simeq relations, and
membership predicates for the dendrite space D_tau.

Words are plain ``str`` objects over the characters ``0``, ``1``, ``*``.
Infinite sequences are :class:`SymSeq`, either eventually periodic (EXACT)
or backed by a pure index function with a certified depth (GENERATED).
"""

from __future__ import annotations

import math
import re
from functools import lru_cache
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

import numpy as np

ZERO, ONE, STAR = "0", "1", "*"
SYMBOLS = (ZERO, ONE, STAR)
DIAMOND = "⋄"

_STAR_BYTE = ord(STAR)
_DROP_SYMBOLS = str.maketrans("", "", "01*")
_LITERAL = re.compile(r"^([01*]*)\[([01*]+)\]$")


class DepthError(ValueError):
    """A read past the certified depth of a generated sequence."""


class ContractError(ValueError):
    """Input violates an operation's precondition."""


# ---------------------------------------------------------------- words


def _as_bytes(word: str) -> np.ndarray:
    return np.frombuffer(word.encode("ascii", "replace"), dtype=np.uint8)


def first_diff(a: str, b: str) -> int:
    """Index of the first position where ``a`` and ``b`` differ, or -1.

    Compares ``min(len(a), len(b))`` positions.
    """
    n = min(len(a), len(b))
    if a[:n] == b[:n]:
        return -1
    if n < 48:
        for i in range(n):
            if a[i] != b[i]:
                return i
    idx = np.flatnonzero(_as_bytes(a[:n]) != _as_bytes(b[:n]))
    return int(idx[0])


def first_conflict(a: str, b: str) -> int:
    """First index where both symbols are non-star and differ, or -1."""
    n = min(len(a), len(b))
    a, b = a[:n], b[:n]
    if a == b:
        return -1
    if STAR not in a and STAR not in b:
        return first_diff(a, b)
    if n < 48:
        for i in range(n):
            x, y = a[i], b[i]
            if x != y and x != STAR and y != STAR:
                return i
        return -1
    xa, xb = _as_bytes(a), _as_bytes(b)
    bad = (xa != xb) & (xa != _STAR_BYTE) & (xb != _STAR_BYTE)
    idx = np.flatnonzero(bad)
    return int(idx[0]) if idx.size else -1


def pattern_mismatch(w: str, pattern: str) -> int:
    """First index where ``pattern`` is non-star and ``w`` disagrees, or -1."""
    n = min(len(w), len(pattern))
    w, pattern = w[:n], pattern[:n]
    if STAR not in pattern:
        return first_diff(w, pattern)
    if n < 48:
        for i in range(n):
            p = pattern[i]
            if p != STAR and w[i] != p:
                return i
        return -1
    xw, xp = _as_bytes(w), _as_bytes(pattern)
    idx = np.flatnonzero((xp != _STAR_BYTE) & (xw != xp))
    return int(idx[0]) if idx.size else -1


def match_approx(w: str, pattern: str) -> bool:
    """The relation w ≈ pattern: agreement wherever ``pattern`` is not a star."""
    if len(w) != len(pattern):
        raise ContractError(f"length mismatch: {len(w)} vs {len(pattern)}")
    return pattern_mismatch(w, pattern) < 0


def _primitive_root(word: str) -> str:
    p = (word + word).find(word, 1)
    return word[:p] if len(word) % p == 0 else word


def _canonical(pre: str, per: str) -> tuple[str, str]:
    per = _primitive_root(per)
    k = len(pre)
    # absorb preperiod symbols that repeat the period's last symbol
    while k and pre[k - 1] == per[-1]:
        k -= 1
        per = per[-1] + per[:-1]
    return pre[:k], per


# ------------------------------------------------------------- sequences


class _Tape:
    """Memoized prefix of a pure symbol source."""

    __slots__ = ("source", "depth", "text")

    def __init__(self, source: Callable[[int], str], depth: int):
        self.source = source
        self.depth = depth
        self.text = ""

    def upto(self, stop: int) -> str:
        if stop > len(self.text):
            src = self.source
            self.text += "".join(src(i) for i in range(len(self.text), stop))
        return self.text


@dataclass(frozen=True, eq=False)
class SymSeq:
    """An infinite sequence over {0,1,*}.

    EXACT sequences store a canonical ``preperiod`` and primitive ``period``.
    GENERATED sequences read symbol ``offset + i`` from a shared tape and
    allow indices up to ``certified_depth`` only.
    """

    preperiod: str = ""
    period: str = ""
    tape: Optional[_Tape] = field(default=None, repr=False)
    offset: int = 0
    certified_depth: Optional[int] = None
    label: Optional[str] = None
    # proven facts about a generated source, e.g. {"aperiodic", "star_free"}
    facts: frozenset = frozenset()

    # constructors
    @classmethod
    def exact(cls, preperiod: str, period: str, label: Optional[str] = None) -> "SymSeq":
        if not period:
            raise ContractError("empty period")
        if (preperiod + period).translate(_DROP_SYMBOLS):
            raise ContractError("symbols must be 0, 1 or *")
        pre, per = _canonical(preperiod, period)
        return cls(preperiod=pre, period=per, label=label)

    @classmethod
    def generated(
        cls,
        source: Callable[[int], str],
        certified_depth: int,
        label: Optional[str] = None,
        facts: Iterable[str] = (),
    ) -> "SymSeq":
        if certified_depth < 0:
            raise ContractError("certified depth must be non-negative")
        return cls(tape=_Tape(source, certified_depth), certified_depth=certified_depth,
                   label=label, facts=frozenset(facts))

    @classmethod
    def from_word(cls, word: str, label: Optional[str] = None,
                  facts: Iterable[str] = ()) -> "SymSeq":
        """GENERATED sequence backed by a finite word; depth is its last index."""
        if not word:
            raise ContractError("empty word")
        tape = _Tape(word.__getitem__, len(word) - 1)
        tape.text = word
        return cls(tape=tape, certified_depth=len(word) - 1, label=label,
                   facts=frozenset(facts))

    # structure
    @property
    def is_exact(self) -> bool:
        return self.tape is None

    def readable(self, n: int) -> bool:
        return self.is_exact or n <= self.certified_depth

    def prefix(self, length: int) -> str:
        """Symbols at indices 0..length-1."""
        if length <= 0:
            return ""
        if self.is_exact:
            pre, per = self.preperiod, self.period
            if length <= len(pre):
                return pre[:length]
            rest = length - len(pre)
            return pre + per * (rest // len(per)) + per[: rest % len(per)]
        if length - 1 > self.certified_depth:
            raise DepthError(f"read to index {length - 1} beyond certified depth {self.certified_depth}")
        return self.tape.upto(self.offset + length)[self.offset:self.offset + length]

    def __getitem__(self, i: int) -> str:
        if i < 0:
            raise IndexError(i)
        if self.is_exact:
            if i < len(self.preperiod):
                return self.preperiod[i]
            return self.period[(i - len(self.preperiod)) % len(self.period)]
        if i > self.certified_depth:
            raise DepthError(f"index {i} beyond certified depth {self.certified_depth}")
        return self.tape.upto(self.offset + i + 1)[self.offset + i]

    def truncate(self, n: int) -> str:
        """Truncation to indices 0..n, length n+1."""
        return self.prefix(n + 1)

    def shift(self, k: int = 1) -> "SymSeq":
        if k < 0:
            raise ContractError("negative shift")
        if k == 0:
            return self
        if self.is_exact:
            pre, per = self.preperiod, self.period
            if k <= len(pre):
                return SymSeq(preperiod=pre[k:], period=per)
            r = (k - len(pre)) % len(per)
            return SymSeq(preperiod="", period=per[r:] + per[:r])
        if k > self.certified_depth:
            raise DepthError(f"shift {k} beyond certified depth {self.certified_depth}")
        return SymSeq(tape=self.tape, offset=self.offset + k,
                      certified_depth=self.certified_depth - k, label=self.label,
                      facts=self.facts)

    def with_prefix(self, word: str) -> "SymSeq":
        """The sequence ``word`` followed by ``self``."""
        if self.is_exact:
            return SymSeq.exact(word + self.preperiod, self.period)
        base = self
        n = len(word)

        def source(i: int) -> str:
            return word[i] if i < n else base[i - n]

        return SymSeq.generated(source, self.certified_depth + n, label=self.label,
                                facts=self.facts if STAR not in word else ())

    def replace(self, j: int, symbol: str) -> "SymSeq":
        """Copy with the symbol at index ``j`` replaced."""
        if not self.is_exact:
            head = self.prefix(j + 1)
            return self.shift(j + 1).with_prefix(head[:j] + symbol)
        pre, per = self.preperiod, self.period
        if j >= len(pre):
            pre = self.prefix(j + 1)
            per = per[(j + 1 - len(self.preperiod)) % len(per):] + per[: (j + 1 - len(self.preperiod)) % len(per)]
        return SymSeq.exact(pre[:j] + symbol + pre[j + 1:], per)

    def star_free(self) -> Optional[bool]:
        """True/False when known, None for generated sources without that fact."""
        if self.is_exact:
            return STAR not in self.preperiod and STAR not in self.period
        return True if "star_free" in self.facts else None

    # comparison and display
    def __eq__(self, other) -> bool:
        if not isinstance(other, SymSeq):
            return NotImplemented
        if self.is_exact and other.is_exact:
            return self.preperiod == other.preperiod and self.period == other.period
        return self is other

    def __hash__(self) -> int:
        if self.is_exact:
            return hash((self.preperiod, self.period))
        return id(self)

    def __str__(self) -> str:
        if self.is_exact:
            return f"{self.preperiod}[{self.period}]"
        name = self.label or "generated"
        return f"<{name}+{self.offset} to {self.certified_depth}>"

    __repr__ = __str__


def parse_literal(text: str) -> SymSeq:
    """Parse ``prefix[period]`` into a canonical EXACT sequence."""
    m = _LITERAL.match(text.strip())
    if not m:
        raise ContractError(f"malformed sequence literal: {text!r}")
    return SymSeq.exact(m.group(1), m.group(2))


def format_literal(x: SymSeq) -> str:
    if not x.is_exact:
        raise ContractError("only EXACT sequences have literals")
    return str(x)


def truncate(x: SymSeq, n: int) -> str:
    return x.truncate(n)


def shift(x: SymSeq, k: int) -> SymSeq:
    return x.shift(k)


def critical_point(tau: SymSeq) -> SymSeq:
    """The point *tau."""
    return tau.with_prefix(STAR)


def approx_equal_seq(a: SymSeq, b: SymSeq, depth: int = 256) -> tuple[Optional[bool], int]:
    """Decide a ≈ b symmetrically (no conflicting non-star pair) as infinite sequences.

    Returns (verdict, checked_length). For two EXACT sequences the verdict is
    exact; otherwise ``None`` means no conflict was found in the readable window.
    """
    if a.is_exact and b.is_exact:
        h = max(len(a.preperiod), len(b.preperiod)) + math.lcm(len(a.period), len(b.period))
        return first_conflict(a.prefix(h), b.prefix(h)) < 0, h
    h = depth + 1
    if not a.is_exact:
        h = min(h, a.certified_depth + 1)
    if not b.is_exact:
        h = min(h, b.certified_depth + 1)
    if first_conflict(a.prefix(h), b.prefix(h)) >= 0:
        return False, h
    return None, h


# ---------------------------------------------------------------- simeq


@dataclass(frozen=True)
class SimeqResult:
    holds: bool
    star_position: Optional[int] = None
    witness_word: Optional[str] = None


def _witness(x: str, j: int, tau_word: str) -> str:
    return x[:j] + STAR + tau_word[: len(x) - j - 1]


def _candidates(L: int, tau_word: str) -> list[int]:
    """Star positions j <= L that can witness x ≃ y, ascending."""
    out = []
    q = tau_word.find(STAR, 0, L)
    while q >= 0:
        out.append(L - 1 - q)
        q = tau_word.find(STAR, q + 1, L)
    out.reverse()
    out.append(L)
    return out


def simeq_words(x: str, y: str, tau_word: str) -> SimeqResult:
    """The relation x ≃ y for equal-length words, with ``tau_word`` covering
    at least ``len(x) - 1`` symbols of tau.

    Only j equal to the first disagreement L, or j < L with tau[L-j-1] a star,
    can succeed: every other j puts a non-star pattern symbol at L where the
    two words differ.
    """
    if len(x) != len(y):
        raise ContractError(f"length mismatch: {len(x)} vs {len(y)}")
    n1 = len(x)
    if len(tau_word) < n1 - 1:
        raise DepthError("tau word too short")
    L = first_diff(x, y)
    if L < 0:
        return SimeqResult(True)
    for j in _candidates(L, tau_word):
        pat = tau_word[: n1 - j - 1]
        if pattern_mismatch(x[j + 1:], pat) < 0 and pattern_mismatch(y[j + 1:], pat) < 0:
            return SimeqResult(True, j, _witness(x, j, tau_word))
    return SimeqResult(False)


def simeq(x: str, y: str, tau: SymSeq) -> SimeqResult:
    """x ≃ y for words of length n+1, reading tau to depth n-1."""
    n1 = len(x)
    return simeq_words(x, y, tau.prefix(max(n1 - 1, 0)))


def enumerate_precritical_truncations(tau: SymSeq, n: int) -> set[str]:
    """All length-(n+1) truncations u * tau... of precritical points (oracle)."""
    if n > 16:
        raise ContractError("oracle limited to n <= 16")
    t = tau.prefix(n)
    out = set()
    for k in range(n + 1):
        tail = STAR + t[: n - k]
        for bits in range(1 << k):
            u = format(bits, f"0{k}b") if k else ""
            out.add(u + tail)
    return out


# ------------------------------------------------------- agreement depth


@dataclass(frozen=True)
class Agreement:
    """FAIL_AT ``depth`` when ``exact``; otherwise AT_LEAST ``depth`` (the cap)."""

    depth: int
    exact: bool

    def holds_at(self, n: int) -> bool:
        if n < self.depth:
            return True
        if self.exact:
            return False
        raise DepthError(f"agreement known only below {self.depth}")

    def __str__(self) -> str:
        return f"FAIL_AT {self.depth}" if self.exact else f"AT_LEAST {self.depth}"


def agreement_words(x: str, y: str, tau_word: str) -> Agreement:
    """Least n with x↾n not ≃ y↾n, over words of common length ``cap``."""
    cap = len(x)
    L = first_diff(x, y)
    if L < 0:
        return Agreement(cap, False)
    best = 0
    for j in _candidates(L, tau_word):
        pat = tau_word[: cap - j - 1]
        fx = pattern_mismatch(x[j + 1:], pat)
        fy = pattern_mismatch(y[j + 1:], pat)
        if fx < 0 and fy < 0:
            return Agreement(cap, False)
        f = j + 1 + min(v for v in (fx, fy) if v >= 0)
        best = max(best, f)
    return Agreement(best, True)


def agreement_depth(x: SymSeq, y: SymSeq, tau: SymSeq, cap: int) -> Agreement:
    """FAIL_AT m for the least m with x↾m not ≃ y↾m, else AT_LEAST cap."""
    if cap <= 0:
        return Agreement(0, False)
    if x.is_exact and y.is_exact and x == y:
        return Agreement(cap, False)
    return agreement_words(x.prefix(cap), y.prefix(cap), tau.prefix(cap))


def close(x: SymSeq, y: SymSeq, tau: SymSeq, n: int) -> bool:
    """x↾n ≃ y↾n."""
    return not agreement_depth(x, y, tau, n + 1).exact


@dataclass(frozen=True)
class Proximity:
    value: float
    bound_only: bool

    def __str__(self) -> str:
        return f"<= {self.value!r}" if self.bound_only else repr(self.value)


def proximity(x: SymSeq, y: SymSeq, tau: SymSeq, cap: int) -> Proximity:
    """2^-m at the first ≃-failure m; otherwise the upper bound 2^-cap."""
    a = agreement_depth(x, y, tau, cap)
    return Proximity(2.0 ** -a.depth, not a.exact)


@dataclass(frozen=True)
class Scale:
    """A dyadic resolution: ``n`` = floor(log2(1/value))."""

    value: float
    n: int

    @classmethod
    def from_value(cls, value: float) -> "Scale":
        if not (0 < value <= 1):
            raise ContractError("scale must lie in (0, 1]")
        m, e = math.frexp(value)
        return cls(value, 1 - e if m == 0.5 else -e)

    @classmethod
    def from_exponent(cls, n: int) -> "Scale":
        if n < 0:
            raise ContractError("exponent must be non-negative")
        return cls(2.0 ** -n, n)

    @property
    def epsilon(self) -> float:
        return self.value

    @property
    def n_eps(self) -> int:
        return self.n

    @property
    def delta(self) -> float:
        return self.value

    @property
    def n_delta(self) -> int:
        return self.n


EpsilonScale = Scale
DeltaScale = Scale


# ------------------------------------------------- acceptability checks


@dataclass(frozen=True)
class Verification:
    """``verified_to_depth`` is None when the verdict is unconditional."""

    verdict: bool
    verified_to_depth: Optional[int]
    witness: Optional[dict] = None

    def __bool__(self) -> bool:
        return self.verdict


def _tau_of(space_or_tau) -> SymSeq:
    return space_or_tau if isinstance(space_or_tau, SymSeq) else space_or_tau.tau


def is_lambda_acceptable(tau: SymSeq, depth: int = 64, horizon: Optional[int] = None) -> Verification:
    """Check both acceptability conditions.

    (1) tau_n = * iff sigma^{n+1} tau = tau.
    (2) if sigma^n tau != tau, some m has * != tau_{m+n} != tau_m != *.
    """
    if tau.is_exact:
        p0, per = len(tau.preperiod), len(tau.period)
        # indices n and the shift predicate both depend only on n mod P past p0
        span = p0 + per
        t = tau.prefix(2 * span + 2 * per + depth + 2)

        def returns(k: int) -> bool:
            return p0 == 0 and k % per == 0

        for n in range(span):
            if (t[n] == STAR) != returns(n + 1):
                return Verification(False, None, {"condition": 1, "n": n})
        h = p0 + 2 * per + depth
        for n in range(1, span):
            if returns(n):
                continue
            if first_conflict(t[n:n + h], t[:h]) < 0:
                return Verification(False, None, {"condition": 2, "n": n})
        return Verification(True, None)

    if horizon is None:
        horizon = 8 * (depth + 1) + 256
    w = min(tau.certified_depth + 1, horizon)
    if depth + 2 > w:
        raise DepthError("tau not readable far enough for the requested depth")
    t = tau.prefix(w)
    for n in range(depth + 1):
        fixed = t[n + 1:] == t[: w - n - 1]
        if (t[n] == STAR) != fixed:
            return Verification(False, depth, {"condition": 1, "n": n})
    for n in range(1, depth + 1):
        if t[n:] == t[: w - n]:
            continue
        if first_conflict(t[n:], t[: w - n]) < 0:
            return Verification(False, depth, {"condition": 2, "n": n})
    return Verification(True, depth)


def _exact_horizon(a: SymSeq, b: SymSeq) -> int:
    return max(len(a.preperiod), len(b.preperiod)) + math.lcm(len(a.period), len(b.period)) + 1


def is_consistent(alpha: SymSeq, space, depth: int = 64) -> Verification:
    """Every star alpha_n forces sigma^{n+1}(alpha) = tau."""
    tau = _tau_of(space)
    if alpha.star_free():
        return Verification(True, None if alpha.is_exact else depth)
    if alpha.is_exact and tau.is_exact:
        span = len(alpha.preperiod) + len(alpha.period)
        a = alpha.prefix(span)
        for n in range(span):
            if a[n] == STAR and alpha.shift(n + 1) != tau:
                return Verification(False, None, {"n": n})
        return Verification(True, None)
    top = depth if alpha.is_exact else min(depth, alpha.certified_depth)
    a = alpha.prefix(top + 1)
    for n in range(top + 1):
        if a[n] != STAR:
            continue
        verdict, _ = _tail_equals(alpha, n + 1, tau, depth)
        if verdict is False:
            return Verification(False, depth, {"n": n})
    return Verification(True, depth)


def _tail_equals(alpha: SymSeq, k: int, tau: SymSeq, depth: int) -> tuple[Optional[bool], int]:
    tail = alpha.shift(k)
    if tail.is_exact and tau.is_exact:
        return tail == tau, 0
    h = depth + 1
    if not tail.is_exact:
        h = min(h, tail.certified_depth + 1)
    if not tau.is_exact:
        h = min(h, tau.certified_depth + 1)
    return (None if tail.prefix(h) == tau.prefix(h) else False), h


def _separating_conflict(alpha_tail: str, tau_word: str) -> int:
    """Least m >= 1 with * != alpha_{n+m} != tau_{m-1} != *, given
    ``alpha_tail`` = alpha_{n+1}..., as m-1; -1 if none in range."""
    return first_conflict(alpha_tail, tau_word)


@lru_cache(maxsize=64)
def _pattern_regex(pattern: str) -> "re.Pattern":
    return re.compile("".join("." if c == STAR else c for c in pattern))


def is_admissible(alpha: SymSeq, space, depth: int = 64, shifts: Optional[Iterable[int]] = None) -> Verification:
    """Admissibility: every shift sigma^n(alpha) other than the critical point
    is separated from *tau at some non-star position.

    ``shifts`` restricts the checked n (used by generators that only change a
    finite window).
    """
    tau = _tau_of(space)
    cons = is_consistent(alpha, tau, depth)
    if not cons.verdict:
        raise ContractError(f"inconsistent input at n={cons.witness['n']}")

    # An eventually periodic star-free point can never follow a proven
    # aperiodic star-free tau from some index on, so every shift separates.
    if (alpha.is_exact and alpha.star_free() and not tau.is_exact
            and {"aperiodic", "star_free"} <= tau.facts):
        return Verification(True, None)

    if alpha.is_exact and tau.is_exact:
        h = _exact_horizon(alpha, tau) + len(tau.preperiod) + 1
        span = len(alpha.preperiod) + len(alpha.period)
        ns = range(span) if shifts is None else [n for n in shifts if n < span]
        a = alpha.prefix(span + h + 1)
        t = tau.prefix(h)
        crit = critical_point(tau)
        if STAR in a:
            def follows(n: int) -> bool:
                return first_conflict(a[n + 1:n + 1 + h], t) < 0
        elif STAR in t:
            rx = _pattern_regex(t)

            def follows(n: int) -> bool:
                return rx.match(a, n + 1) is not None
        else:
            def follows(n: int) -> bool:
                return a.startswith(t, n + 1)
        for n in ns:
            if not follows(n):
                continue
            if a[n] == STAR and alpha.shift(n) == crit:
                continue
            return Verification(False, None, {"n": n})
        return Verification(True, None)

    w_a = None if alpha.is_exact else alpha.certified_depth
    w_t = None if tau.is_exact else tau.certified_depth
    top = depth if w_a is None else min(depth, w_a - 1)
    ns = range(top + 1) if shifts is None else [n for n in shifts if n <= top]
    for n in ns:
        h = 4 * depth + 64
        if w_a is not None:
            h = min(h, w_a - n)
        if w_t is not None:
            h = min(h, w_t + 1)
        a = alpha.prefix(n + 1 + h)
        if first_conflict(a[n + 1:], tau.prefix(h)) >= 0:
            continue
        if a[n] == STAR:
            # the consistency check already matched the tau tail to depth
            continue
        return Verification(False, depth, {"n": n})
    return Verification(True, depth)
