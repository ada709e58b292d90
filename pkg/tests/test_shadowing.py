import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dendrite.kneading import DendriteSpace, period_doubling
from dendrite.pseudo_orbit import random_pseudo_orbit, validate
from dendrite.shadowing import (
    POLICIES,
    assign_shadow,
    canonical_shadow,
    check_pseudo_agreement,
    delta_bound,
    delta_for_epsilon,
    diamond_gaps,
    verify_shadowing,
)
from dendrite.symbolic import (
    DIAMOND,
    STAR,
    ContractError,
    DepthError,
    Scale,
    SymSeq,
    critical_point,
    is_admissible,
    is_consistent,
    parse_literal,
)

from oracles import return_time_brute

P3 = DendriteSpace.from_tau(parse_literal("[10*]"))
NR = DendriteSpace.from_tau(parse_literal("1[0]"))
PD = DendriteSpace.from_tau(period_doubling(1 << 16))


def true_orbit(x, length):
    pts = [x]
    for _ in range(length - 1):
        pts.append(pts[-1].shift(1))
    return pts


def _milestones_brute(word, count):
    out, m = [], 1
    while len(out) < count:
        r = return_time_brute(word, m)
        if m <= r:
            out.append(m)
            m = r + 2
        else:
            m += 1
    return out


# ------------------------------------------------------------- delta_eps


def test_delta_examples():
    assert delta_for_epsilon(P3, Scale.from_exponent(4)).n == 33
    assert delta_for_epsilon(NR, Scale.from_exponent(4)).n == 13
    assert delta_for_epsilon(P3, Scale.from_exponent(3)).n == 25
    assert delta_for_epsilon(NR, Scale.from_exponent(5)).n == 15


@pytest.mark.parametrize("ne", [3, 4, 5])
def test_recurrent_delta_matches_milestone_sum(ne):
    word = period_doubling(1 << 15).prefix(1 << 15)
    t = next(i for i, m in enumerate(_milestones_brute(word, 4), start=1) if m > ne)
    ms = _milestones_brute(word, t + 2 * ne + 1)
    want = sum(ms[t - 1:t + 2 * ne + 1]) + 2 * ne + 2
    assert delta_for_epsilon(PD, Scale.from_exponent(ne)).n == want
    assert want == {3: 1044, 4: 4122, 5: 16416}[ne]


@pytest.mark.parametrize("sp", [P3, NR, PD], ids=["p3", "nr", "pd"])
def test_delta_monotone(sp):
    ns = [delta_bound(sp, ne) for ne in range(1, 6)]
    assert all(a < b for a, b in zip(ns, ns[1:]))


def test_recurrent_delta_needs_deep_milestones():
    shallow = DendriteSpace.from_tau(period_doubling(256))
    with pytest.raises(DepthError):
        delta_for_epsilon(shallow, Scale.from_exponent(5))


# ------------------------------------------------------- canonical shadow


def test_exact_orbit_shadow_is_the_point():
    x = parse_literal("0110[01]")
    eps = Scale.from_exponent(3)
    o = validate(true_orbit(x, 20), delta_for_epsilon(NR, eps), NR.tau)
    sh = canonical_shadow(o, eps, NR)
    assert sh.diamonds == () and DIAMOND not in sh.head
    assert sh.word(60) == x.prefix(60)
    for policy in POLICIES:
        assert assign_shadow(sh, policy, NR, seed=1) == x


def test_shadow_diamonds_sit_at_ledger_betas():
    eps = Scale.from_exponent(3)
    for seed in range(10):
        o = random_pseudo_orbit(NR, delta_for_epsilon(NR, eps), 60, seed, flip_rate=0.5)
        sh = canonical_shadow(o, eps, NR)
        assert sh.diamonds == tuple(b - 1 for b in sh.ledger.betas)
        assert [i for i, c in enumerate(sh.head) if c == DIAMOND] == list(sh.diamonds)
        for i, c in enumerate(sh.head[:len(o)]):
            if c != DIAMOND:
                assert c == o.points[i].prefix(1)


def test_shadow_rejects_coarse_delta():
    eps = Scale.from_exponent(4)
    o = random_pseudo_orbit(NR, Scale.from_exponent(8), 20, seed=0)
    with pytest.raises(ContractError):
        canonical_shadow(o, eps, NR)


def test_nonrecurrent_diamond_spacing():
    for ne in (3, 4):
        eps = Scale.from_exponent(ne)
        for seed in range(15):
            for col in ("uniform", "smallest"):
                o = random_pseudo_orbit(NR, delta_for_epsilon(NR, eps), 80, seed, flip_rate=0.5,
                                        column=col)
                assert all(g > ne for g in diamond_gaps(canonical_shadow(o, eps, NR)))


def test_periodic_diamonds_follow_critical_cycle():
    # a periodic tau puts a diamond at every star of a tracked critical cycle
    eps = Scale.from_exponent(3)
    crit = critical_point(P3.tau)
    o = validate(true_orbit(crit, 12), delta_for_epsilon(P3, eps), P3.tau)
    sh = canonical_shadow(o, eps, P3)
    assert sh.diamonds[:3] == (0, 3, 6)
    assert set(diamond_gaps(sh)) == {3}


# ------------------------------------------------------------ assignment


def test_one_diamond_both_bits_admissible():
    eps = Scale.from_exponent(3)
    hits = 0
    for seed in range(20):
        o = random_pseudo_orbit(NR, delta_for_epsilon(NR, eps), 40, seed, flip_rate=0.3)
        sh = canonical_shadow(o, eps, NR)
        if len(sh.diamonds) != 1:
            continue
        for policy in ("ALL_ZERO", "ALL_ONE"):
            z = assign_shadow(sh, policy, NR)
            assert STAR not in z.prefix(len(sh.head) + 5)
            assert is_admissible(z, NR.tau).verdict
            assert is_consistent(z, NR.tau).verdict
            assert verify_shadowing(o, z, eps, NR).verified
        hits += 1
    assert hits > 0


def test_forced_star_copies_tau():
    eps = Scale.from_exponent(3)
    crit = critical_point(P3.tau)
    lead = SymSeq.exact("011", crit.preperiod + crit.period)
    o = validate(true_orbit(lead, 12), delta_for_epsilon(P3, eps), P3.tau)
    sh = canonical_shadow(o, eps, P3)
    assert sh.diamonds[0] == 3
    for policy in POLICIES:
        z = assign_shadow(sh, policy, P3, seed=0)
        assert z.prefix(4) == "011*"
        assert z.shift(4).prefix(30) == P3.tau.prefix(30)
        assert is_consistent(z, P3.tau).verdict and is_admissible(z, P3.tau).verdict
        assert verify_shadowing(o, z, eps, P3).verified
    unforced = assign_shadow(sh, "ALL_ONE", P3, allow_star=False)
    assert unforced.prefix(4) == "0111"


def test_unknown_policy():
    x = parse_literal("[0]")
    eps = Scale.from_exponent(3)
    o = validate(true_orbit(x, 5), delta_for_epsilon(NR, eps), NR.tau)
    with pytest.raises(ContractError):
        assign_shadow(canonical_shadow(o, eps, NR), "SOMETIMES", NR)


# ---------------------------------------------------------- end to end


@pytest.mark.parametrize("sp", [P3, NR], ids=["p3", "nr"])
@pytest.mark.parametrize("ne", [3, 4])
def test_shadowing_end_to_end(sp, ne):
    eps = Scale.from_exponent(ne)
    delta = delta_for_epsilon(sp, eps)
    for seed in range(6):
        o = random_pseudo_orbit(sp, delta, 60, seed, flip_rate=0.5)
        sh = canonical_shadow(o, eps, sp)
        for policy in ("ALL_ZERO", "ALL_ONE", "RANDOM", "PREFER_ORBIT"):
            z = assign_shadow(sh, policy, sp, seed=seed)
            rep = verify_shadowing(o, z, eps, sp)
            assert rep.verified, (seed, policy, rep.first_failure)
        assert check_pseudo_agreement(o, eps, sp, sh.ledger).holds


def test_shadowing_recurrent_small():
    eps = Scale.from_exponent(3)
    delta = delta_for_epsilon(PD, eps)
    o = random_pseudo_orbit(PD, delta, 30, seed=1, flip_rate=0.5)
    sh = canonical_shadow(o, eps, PD)
    for policy in ("ALL_ZERO", "ALL_ONE"):
        assert verify_shadowing(o, assign_shadow(sh, policy, PD), eps, PD).verified


def test_verify_shadowing_rejects_unrelated_point():
    x = parse_literal("[0]")
    eps = Scale.from_exponent(3)
    o = validate(true_orbit(x, 10), delta_for_epsilon(NR, eps), NR.tau)
    rep = verify_shadowing(o, parse_literal("[1]"), eps, NR)
    assert not rep.verified and rep.first_failure == 1
    assert verify_shadowing(o, x, eps, NR).verified


def test_adversarial_delta_reports_without_crashing():
    eps = Scale.from_exponent(4)
    for seed in range(20):
        o = random_pseudo_orbit(P3, eps, 60, seed, flip_rate=0.8)
        rep = check_pseudo_agreement(o, eps, P3)
        assert rep.checked >= len(o)
        assert rep.holds == (not rep.pseudo_agreement_violations
                             and not rep.critical_tracking_violations)
        sh = canonical_shadow(o, eps, P3, check_scale=False)
        out = verify_shadowing(o, assign_shadow(sh, "ALL_ZERO", P3), eps, P3)
        assert out.verified or 1 <= out.first_failure <= len(o)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from(["p3", "nr"]))
def test_shadowing_property(seed, which):
    sp = P3 if which == "p3" else NR
    eps = Scale.from_exponent(3)
    o = random_pseudo_orbit(sp, delta_for_epsilon(sp, eps), 30, seed, flip_rate=0.5)
    sh = canonical_shadow(o, eps, sp)
    z = assign_shadow(sh, "RANDOM", sp, seed=seed)
    assert verify_shadowing(o, z, eps, sp).verified
