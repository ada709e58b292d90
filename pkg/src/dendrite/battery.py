"""The acceptance battery: one function per criterion, driven by a
``key: value`` configuration."""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from .ict_omega import (
    FinitePointSet,
    approximate_omega,
    build_omega_point,
    cycle_set,
    is_ict,
    verify_omega_equals,
)
from .julia import ComplexParam, PartitionSpec, crosscheck, extract_kneading, misiurewicz_detect
from .kneading import DendriteSpace, resolve_tau, word_overlap_root
from .pseudo_orbit import (
    OrbitArray,
    anchor_column,
    build_ledger,
    flip_scan,
    random_admissible_point,
    random_pseudo_orbit,
    random_rough_orbit,
    verify_between_flips,
    verify_periodic_flip_bound,
)
from .shadowing import (
    assign_shadow,
    canonical_shadow,
    check_pseudo_agreement,
    delta_for_epsilon,
    verify_shadowing,
)
from .symbolic import (
    STAR,
    ContractError,
    Scale,
    SymSeq,
    enumerate_precritical_truncations,
    is_admissible,
    is_lambda_acceptable,
    proximity,
    simeq_words,
)


@dataclass
class BatteryConfig:
    taus: list = field(default_factory=lambda: ["[10*]", "1[0]", "period-doubling"])
    eps_exps: list = field(default_factory=lambda: [3, 4, 5])
    orbits: int = 100
    orbit_length: int = 200
    policies: list = field(default_factory=lambda: ["ALL_ZERO", "ALL_ONE", "RANDOM"])
    seed: int = 20240601
    adversarial: bool = False
    simeq_max_length: int = 8
    acceptability_max_period: int = 5
    acceptability_horizon: int = 50
    ict_sets: int = 20
    ict_max_size: int = 8
    ict_eps_exp: int = 4
    omega_depth: int = 10_000
    omega_burn_in: int = 1_000
    omega_min_visits: int = 10
    sarkovskii_points: int = 50
    sarkovskii_horizon: int = 10_000
    sarkovskii_rate: float = 0.95
    rough_orbits: int = 400
    rough_length: int = 12
    rough_exps: list = field(default_factory=lambda: [4, 5, 6, 7, 8])
    root_max_length: int = 12
    julia_samples: int = 200
    julia_depth: int = 15
    julia_rate: float = 0.95
    proximity_pairs: int = 100_000
    proximity_cap: int = 40
    monotonicity_max_length: int = 8
    criteria: list = field(default_factory=lambda: list(range(1, 11)))


_LIST_INT = {"eps_exps", "criteria", "rough_exps"}
_LIST_STR = {"taus", "policies"}


def parse_config(text: str) -> BatteryConfig:
    """``key: value`` lines; lists are comma separated; ``#`` starts a comment."""
    cfg = BatteryConfig()
    types = {f.name: f for f in fields(cfg)}
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" not in line:
            raise ContractError(f"line {lineno}: expected 'key: value'")
        key, value = (s.strip() for s in line.split(":", 1))
        key = key.replace("-", "_")
        if key not in types:
            raise ContractError(f"line {lineno}: unknown key {key!r}")
        try:
            if key in _LIST_INT:
                val = [int(v) for v in value.split(",") if v.strip()]
            elif key in _LIST_STR:
                val = [v.strip() for v in value.split(",") if v.strip()]
            elif isinstance(getattr(cfg, key), bool):
                if value.lower() not in ("true", "false", "yes", "no", "1", "0"):
                    raise ValueError(value)
                val = value.lower() in ("true", "yes", "1")
            elif isinstance(getattr(cfg, key), float):
                val = float(value)
            else:
                val = int(value)
        except ValueError:
            raise ContractError(f"line {lineno}: bad value for {key}: {value!r}") from None
        setattr(cfg, key, val)
    return cfg


def load_config(path) -> BatteryConfig:
    return parse_config(Path(path).read_text(encoding="utf-8"))


DEFAULT_CONFIG = Path(__file__).with_name("default_battery.cfg")


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    counts: dict = field(default_factory=dict)
    witnesses: list = field(default_factory=list)
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        detail = " ".join(f"{k}={v}" for k, v in self.counts.items())
        return f"criterion {self.number} [{status}] {self.name}: {detail}"


_SPACES: dict = {}


def space_for(text: str) -> DendriteSpace:
    if text not in _SPACES:
        _SPACES[text] = DendriteSpace.from_tau(resolve_tau(text))
    return _SPACES[text]


# ---------------------------------------------------------- 1 and 4


@dataclass
class ShadowRun:
    tau: str
    eps_exp: int
    seed: int
    orbit: object
    ledger: object
    shadow: object


def shadow_runs(cfg: BatteryConfig):
    """Seeded pseudo-orbits with their ledgers and canonical shadows.

    Odd seeds use the smallest legal flip column, which produces far more
    flips near the front of each window.
    """
    for ti, text in enumerate(cfg.taus):
        sp = space_for(text)
        for e in cfg.eps_exps:
            eps = Scale.from_exponent(e)
            delta = eps if cfg.adversarial else delta_for_epsilon(sp, eps)
            for r in range(cfg.orbits):
                seed = cfg.seed + 100_000 * ti + 1_000 * e + r
                orbit = random_pseudo_orbit(sp, delta, cfg.orbit_length, seed,
                                            column="smallest" if r % 2 else "uniform")
                ledger = build_ledger(orbit, eps)
                shadow = canonical_shadow(orbit, eps, sp, ledger, check_scale=not cfg.adversarial)
                yield ShadowRun(text, e, seed, orbit, ledger, shadow)


def criterion_shadowing(cfg: BatteryConfig, runs=None) -> CriterionResult:
    res = CriterionResult(1, "shadowing", True, {"runs": 0, "failures": 0, "diamonds": 0})
    for run in runs if runs is not None else shadow_runs(cfg):
        sp = space_for(run.tau)
        eps = Scale.from_exponent(run.eps_exp)
        res.counts["diamonds"] += len(run.shadow.diamonds)
        for policy in cfg.policies:
            z = assign_shadow(run.shadow, policy, sp, seed=run.seed)
            rep = verify_shadowing(run.orbit, z, eps, sp)
            res.counts["runs"] += 1
            if not rep.verified:
                res.counts["failures"] += 1
                res.witnesses.append((run.tau, run.eps_exp, run.seed, policy, rep.first_failure))
    res.passed = res.counts["failures"] == 0 and res.counts["runs"] > 0
    return res


def criterion_pseudo_agreement(cfg: BatteryConfig, runs=None) -> CriterionResult:
    res = CriterionResult(4, "pseudo-agreement", True, {"orbits": 0, "checks": 0, "violations": 0})
    for run in runs if runs is not None else shadow_runs(cfg):
        rep = check_pseudo_agreement(run.orbit, Scale.from_exponent(run.eps_exp),
                                     space_for(run.tau), run.ledger)
        res.counts["orbits"] += 1
        res.counts["checks"] += rep.checked
        bad = len(rep.pseudo_agreement_violations) + len(rep.critical_tracking_violations)
        if bad:
            res.counts["violations"] += bad
            res.witnesses.append((run.tau, run.eps_exp, run.seed))
    res.passed = res.counts["violations"] == 0
    return res


# ---------------------------------------------------------------- 2


def _expansions(word: str) -> list[str]:
    slots = [("0", "1") if c == STAR else (c,) for c in word]
    return ["".join(t) for t in itertools.product(*slots)]


def simeq_oracle_pairs(precritical: set) -> set:
    """Ordered pairs related by ≃ from the definition: two distinct words
    are related iff both match one precritical word off its stars."""
    related = set()
    for p in precritical:
        group = _expansions(p)
        related.update(itertools.product(group, repeat=2))
    return related


def criterion_simeq(cfg: BatteryConfig) -> CriterionResult:
    res = CriterionResult(2, "simeq oracle", True, {"pairs": 0, "discrepancies": 0})
    for text in cfg.taus:
        tau = space_for(text).tau
        tw = tau.prefix(cfg.simeq_max_length)
        for L in range(1, cfg.simeq_max_length + 1):
            related = simeq_oracle_pairs(enumerate_precritical_truncations(tau, L - 1))
            words = ["".join(w) for w in itertools.product("01", repeat=L)]
            for x, y in itertools.product(words, repeat=2):
                want = x == y or (x, y) in related
                got = simeq_words(x, y, tw).holds
                res.counts["pairs"] += 1
                if got != want:
                    res.counts["discrepancies"] += 1
                    if len(res.witnesses) < 10:
                        res.witnesses.append((text, x, y, got))
    res.passed = res.counts["discrepancies"] == 0
    return res


# ---------------------------------------------------------------- 3


def acceptability_oracle(period: str, horizon: int) -> bool:
    """Both acceptability conditions read off a long prefix of the periodic word."""
    w = period * (3 * horizon // len(period) + 3)
    for n in range(horizon):
        returns = w[n + 1:n + 1 + horizon] == w[:horizon]
        if (w[n] == STAR) != returns:
            return False
    for n in range(1, horizon):
        if w[n:n + horizon] == w[:horizon]:
            continue
        if not any(w[m] != STAR and w[n + m] != STAR and w[n + m] != w[m] for m in range(horizon)):
            return False
    return True


def criterion_acceptability(cfg: BatteryConfig) -> CriterionResult:
    res = CriterionResult(3, "acceptability oracle", True, {"literals": 0, "disagreements": 0})
    for L in range(1, cfg.acceptability_max_period + 1):
        for per in itertools.product("01*", repeat=L):
            per = "".join(per)
            got = is_lambda_acceptable(SymSeq.exact("", per)).verdict
            want = acceptability_oracle(per, cfg.acceptability_horizon)
            res.counts["literals"] += 1
            if got != want:
                res.counts["disagreements"] += 1
                res.witnesses.append((f"[{per}]", got, want))
    anchors = {"[*]": True, "[1*]": False, "[10*]": True}
    for lit, want in anchors.items():
        if is_lambda_acceptable(resolve_tau(lit)).verdict != want:
            res.counts["disagreements"] += 1
            res.witnesses.append((lit, not want, want))
    res.passed = res.counts["disagreements"] == 0
    return res


# ---------------------------------------------------------------- 5


def _flip_checks(orbit, sp: DendriteSpace, res: CriterionResult, tag) -> None:
    nd = orbit.n_delta
    arr = OrbitArray(orbit.points, nd + 2)
    for k in range(1, len(orbit)):
        flips = [f.column for f in flip_scan(orbit, k, nd, arr)]
        for j1, j2 in zip(flips, flips[1:]):
            rep = verify_between_flips(orbit, k, j1, j2, arr)
            res.counts["pairs"] += 1
            if not rep.holds:
                res.counts["counterexamples"] += 1
                res.witnesses.append(("between", tag, k, j1, j2))
        if sp.kind != "PERIODIC":
            continue
        j = anchor_column(orbit, k)
        if j is None or j >= nd:
            continue
        rep = verify_periodic_flip_bound(orbit, sp, k, j, arr=arr)
        res.counts["chains"] += 1
        res.counts["chain_checks"] += rep.checked
        if not rep.holds:
            res.counts["counterexamples"] += 1
            res.witnesses.append(("chain", tag, k, rep.counterexamples))


def criterion_flip_bounds(cfg: BatteryConfig, runs=None) -> CriterionResult:
    """Flip-chain bound on periodic tau and the between-flip equalities on
    every consecutive flip pair, for every orbit anchor.

    Besides the criterion 1 orbits, rough orbits at small N_delta exercise
    out-of-sync flips, which the legal-column generator almost never makes.
    """
    res = CriterionResult(5, "flip bounds", True,
                          {"chains": 0, "chain_checks": 0, "pairs": 0, "counterexamples": 0})
    for run in runs if runs is not None else shadow_runs(cfg):
        _flip_checks(run.orbit, space_for(run.tau), res, (run.tau, run.eps_exp, run.seed))
    for text in cfg.taus:
        sp = space_for(text)
        if sp.kind != "PERIODIC":
            continue
        for n in cfg.rough_exps:
            for r in range(cfg.rough_orbits):
                seed = cfg.seed + 10_000 * n + r
                orbit = random_rough_orbit(sp, Scale.from_exponent(n), cfg.rough_length, seed)
                _flip_checks(orbit, sp, res, (text, n, seed, "rough"))
    res.passed = res.counts["counterexamples"] == 0
    return res


# ---------------------------------------------------------------- 6


def random_cycle_set(sp: DendriteSpace, rng: np.random.Generator, max_size: int,
                     tries: int = 200) -> FinitePointSet:
    """The sigma-orbit of a random admissible star-free periodic point."""
    for _ in range(tries):
        per = "".join("01"[b] for b in rng.integers(0, 2, size=int(rng.integers(1, max_size + 1))))
        x = SymSeq.exact("", per)
        if len(x.period) <= max_size and is_admissible(x, sp.tau).verdict:
            return cycle_set(x, sp)
    raise ContractError("no admissible periodic point found")


def criterion_ict_to_omega(cfg: BatteryConfig) -> CriterionResult:
    """Finite sets that are eps-ICT at every scale are single cycles, so the
    seeded sets are sigma-orbits of random periodic points. Only EXACT tau
    take part: the period-doubling delta bound outgrows any readable depth
    within a few segments."""
    res = CriterionResult(6, "ICT to omega", True, {"sets": 0, "passed": 0})
    eps = Scale.from_exponent(cfg.ict_eps_exp)
    taus = [t for t in cfg.taus if space_for(t).tau.is_exact]
    rng = np.random.default_rng(cfg.seed + 6)
    for r in range(cfg.ict_sets):
        text = taus[r % len(taus)]
        sp = space_for(text)
        pset = random_cycle_set(sp, rng, cfg.ict_max_size)
        ok, _ = is_ict(pset, eps)
        res.counts["sets"] += 1
        if not ok:
            res.witnesses.append((text, str(pset.points[0]), "not ICT"))
            continue
        z, plan = build_omega_point(pset, sp, cfg.omega_depth)
        horizon = cfg.omega_depth - eps.n - 1
        rep = verify_omega_equals(pset, z, eps, sp, horizon, cfg.omega_min_visits, cfg.omega_burn_in)
        if rep.holds and STAR not in z.prefix(cfg.omega_depth + 1):
            res.counts["passed"] += 1
        else:
            res.witnesses.append((text, str(pset.points[0]), rep.missing, rep.uncovered[:3]))
    res.passed = res.counts["passed"] == res.counts["sets"] > 0
    return res


# ---------------------------------------------------------------- 7


def criterion_omega_to_ict(cfg: BatteryConfig) -> CriterionResult:
    res = CriterionResult(7, "omega to ICT", True, {"points": 0, "passed": 0, "rate": 0.0})
    eps = Scale.from_exponent(cfg.ict_eps_exp)
    coarse = Scale.from_exponent(cfg.ict_eps_exp - 1)
    rng = np.random.default_rng(cfg.seed + 7)
    burn_in = cfg.sarkovskii_horizon // 2
    for r in range(cfg.sarkovskii_points):
        text = cfg.taus[r % len(cfg.taus)]
        sp = space_for(text)
        z = random_admissible_point(sp, rng, track=int(rng.integers(0, 2)) * 24)
        approx = approximate_omega(z, eps, sp, cfg.sarkovskii_horizon, burn_in)
        ok, cert = is_ict(approx, coarse)
        res.counts["points"] += 1
        if ok:
            res.counts["passed"] += 1
        else:
            res.witnesses.append((text, str(z), cert))
    n = res.counts["points"]
    res.counts["rate"] = round(res.counts["passed"] / n, 4) if n else 0.0
    res.passed = n > 0 and res.counts["rate"] >= cfg.sarkovskii_rate
    return res


# ---------------------------------------------------------------- 8


def criterion_word_root(cfg: BatteryConfig) -> CriterionResult:
    res = CriterionResult(8, "word root", True, {"cases": 0, "exceptions": 0})
    for n in range(2, cfg.root_max_length + 1):
        for bits in range(1 << n):
            alpha = format(bits, f"0{n}b")
            beta = alpha + alpha
            for m in range(1, n):
                d = n - m
                if beta[d:] != beta[:-d]:
                    continue
                res.counts["cases"] += 1
                try:
                    out = word_overlap_root(alpha, m)
                    ok = (out.gamma * out.repetitions == alpha and m % out.ell == 0
                          and (n - m) % out.ell == 0)
                except (ContractError, AssertionError):
                    ok = False
                if not ok:
                    res.counts["exceptions"] += 1
                    res.witnesses.append((alpha, m))
    res.passed = res.counts["exceptions"] == 0 and res.counts["cases"] > 0
    return res


# ---------------------------------------------------------------- 9


def criterion_julia(cfg: BatteryConfig) -> CriterionResult:
    res = CriterionResult(9, "Julia bridge", True, {})
    ci = misiurewicz_detect(ComplexParam(1j, 1e-9))
    c0 = misiurewicz_detect(ComplexParam(0j, 1e-9))
    res.counts["c=i"] = str(ci)
    res.counts["c=0"] = str(c0)
    part = PartitionSpec()
    kn = extract_kneading(ComplexParam(1j, 1e-9), part)
    tau = kn.tau
    res.counts["tau"] = str(tau)
    acc = is_lambda_acceptable(tau, 30).verdict
    cc = crosscheck(ComplexParam(1j, 1e-9), part, cfg.julia_depth, cfg.julia_samples, cfg.seed)
    res.counts["admissible_rate"] = round(cc.rate, 4)
    checks = {
        "misiurewicz": ci.kind == "MISIUREWICZ" and (ci.preperiod, ci.period) == (1, 2),
        "periodic_critical": c0.kind == "PERIODIC_CRITICAL",
        "strictly_preperiodic": tau.is_exact and len(tau.preperiod) > 0,
        "acceptable": acc,
        "rate": cc.sampled == cfg.julia_samples and cc.rate >= cfg.julia_rate,
    }
    res.witnesses = [k for k, v in checks.items() if not v]
    res.passed = not res.witnesses
    return res


# --------------------------------------------------------------- 10


def _random_pair(rng: np.random.Generator, tau_word: str, cap: int) -> tuple[str, str]:
    """Word pairs biased toward deep agreement and precritical witnesses."""
    L = cap + 2
    x = "".join("01"[b] for b in rng.integers(0, 2, size=L))
    kind = int(rng.integers(0, 3))
    if kind == 0:
        y = "".join("01"[b] for b in rng.integers(0, 2, size=L))
    else:
        k = int(rng.integers(0, L))
        if kind == 2:
            # both sides follow tau after a common head, stars filled independently
            x = x[:k] + "".join(c if c != STAR else "01"[rng.integers(0, 2)] for c in ("1" + tau_word)[:L - k])
        y = x[:k] + ("1" if x[k] == "0" else "0") + x[k + 1:] if kind == 1 else x[:k] + "".join(
            c if c != STAR else "01"[rng.integers(0, 2)] for c in ("0" + tau_word)[:L - k])
    return x, y


def criterion_proximity(cfg: BatteryConfig) -> CriterionResult:
    res = CriterionResult(10, "proximity contracts", True,
                          {"pairs": 0, "monotone_pairs": 0, "violations": 0})
    rng = np.random.default_rng(cfg.seed + 10)
    cap = cfg.proximity_cap
    share, extra = divmod(cfg.proximity_pairs, len(cfg.taus))
    for idx, text in enumerate(cfg.taus):
        tau = space_for(text).tau
        tw = tau.prefix(cap + 2)
        for _ in range(share + (idx < extra)):
            xw, yw = _random_pair(rng, tw, cap)
            x, y = SymSeq.from_word(xw), SymSeq.from_word(yw)
            pxy = proximity(x, y, tau, cap)
            pyx = proximity(y, x, tau, cap)
            ps = proximity(x.shift(1), y.shift(1), tau, cap - 1)
            res.counts["pairs"] += 1
            bad = pxy != pyx
            # the shifted bound is only decided when both sides are exact
            if not pxy.bound_only and not ps.bound_only and ps.value > 2 * pxy.value:
                bad = True
            if bad:
                res.counts["violations"] += 1
                if len(res.witnesses) < 10:
                    res.witnesses.append((text, xw, yw))
        # ≃ at length L implies ≃ at length L-1; chaining covers every shorter length
        for L in range(2, cfg.monotonicity_max_length + 1):
            words = ["".join(w) for w in itertools.product("01", repeat=L)]
            for xw, yw in itertools.product(words, repeat=2):
                if simeq_words(xw, yw, tw).holds:
                    res.counts["monotone_pairs"] += 1
                    if not simeq_words(xw[:-1], yw[:-1], tw).holds:
                        res.counts["violations"] += 1
                        res.witnesses.append((text, xw, yw, "monotonicity"))
    res.passed = res.counts["violations"] == 0
    return res


# ------------------------------------------------------------- runner


CRITERIA: dict = {
    1: criterion_shadowing,
    2: criterion_simeq,
    3: criterion_acceptability,
    4: criterion_pseudo_agreement,
    5: criterion_flip_bounds,
    6: criterion_ict_to_omega,
    7: criterion_omega_to_ict,
    8: criterion_word_root,
    9: criterion_julia,
    10: criterion_proximity,
}

_USES_RUNS = {1, 4, 5}


def run_battery(cfg: BatteryConfig, report: Optional[Callable[[CriterionResult], None]] = None
                ) -> list[CriterionResult]:
    """Run the selected criteria in order; orbit-based ones share one set of runs."""
    runs = None
    if _USES_RUNS & set(cfg.criteria):
        runs = list(shadow_runs(cfg))
    out = []
    for num in sorted(cfg.criteria):
        if num not in CRITERIA:
            raise ContractError(f"unknown criterion {num}")
        t0 = time.perf_counter()
        fn = CRITERIA[num]
        res = fn(cfg, runs) if num in _USES_RUNS else fn(cfg)
        res.seconds = time.perf_counter() - t0
        out.append(res)
        if report:
            report(res)
    return out
