import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dendrite.kneading import (
    INFINITY,
    Absent,
    DendriteSpace,
    ReturnTimeTable,
    check_return_time_growth,
    classify,
    milestones,
    period_doubling,
    resolve_tau,
    return_time,
    return_time_table,
    word_overlap_root,
)
from dendrite.symbolic import ContractError, DepthError, SymSeq, is_lambda_acceptable, parse_literal

from oracles import return_time_brute


def test_return_time_examples():
    assert return_time(parse_literal("1[0]"), 0) == INFINITY
    assert return_time(parse_literal("[10*]"), 2) == 3
    assert return_time(parse_literal("[*]"), 5) == 1


@settings(max_examples=300)
@given(st.text(alphabet="01*", max_size=5), st.text(alphabet="01*", min_size=1, max_size=4),
       st.integers(0, 12))
def test_return_time_matches_brute_force(pre, per, m):
    tau = SymSeq.exact(pre, per)
    got = return_time(tau, m)
    want = return_time_brute(tau.prefix(200), m)
    assert got == (INFINITY if want is None else want)


@settings(max_examples=200)
@given(st.text(alphabet="01*", max_size=5), st.text(alphabet="01*", min_size=1, max_size=4))
def test_return_times_monotone(pre, per):
    tau = SymSeq.exact(pre, per)
    r = [return_time(tau, m) for m in range(15)]
    assert all(a <= b for a, b in zip(r, r[1:]))


def test_generated_table_matches_direct_scan():
    pd = period_doubling(512)
    table = return_time_table(pd, 100)
    w = pd.prefix(513)
    for m in range(100):
        assert table[m] == return_time_brute(w, m)
    assert all(a <= b for a, b in zip(table.entries, table.entries[1:]))
    with pytest.raises(DepthError):
        table[100]


def test_generated_absence_is_not_infinity():
    short = SymSeq.from_word("1000000000")
    r = return_time(short, 0)
    assert isinstance(r, Absent) and r != INFINITY
    with pytest.raises(DepthError):
        return_time(short, 20)


def test_classify_examples():
    assert str(classify(parse_literal("[10*]"))) == "PERIODIC{P=3}"
    c = classify(parse_literal("1[0]"))
    assert c.kind == "NON_RECURRENT" and c.horizon == 1
    pd = classify(period_doubling(1024))
    assert pd.kind == "RECURRENT_NONPERIODIC"
    ms = pd.milestones(4)
    assert len(ms) == 4 and ms.certified_to == pd.table.computed_to


def test_classify_rejects_unacceptable():
    with pytest.raises(ContractError):
        classify(parse_literal("[1*]"))


def _acceptable_literals(max_pre=3, max_per=3):
    for a in range(max_pre + 1):
        for b in range(1, max_per + 1):
            for pre in itertools.product("01*", repeat=a):
                for per in itertools.product("01*", repeat=b):
                    tau = SymSeq.exact("".join(pre), "".join(per))
                    if tau.preperiod == "".join(pre) and tau.period == "".join(per):
                        if is_lambda_acceptable(tau).verdict:
                            yield tau


def test_classify_consistency_exhaustive():
    seen = 0
    for tau in _acceptable_literals():
        c = classify(tau)
        seen += 1
        if c.kind == "PERIODIC":
            P = c.period
            assert tau.shift(P) == tau
            assert all(tau.shift(k) != tau for k in range(1, P))
        else:
            M = c.horizon
            for m in range(M, M + 20):
                assert return_time(tau, m) == INFINITY
            if M > 1:
                assert return_time(tau, M - 1) != INFINITY
    assert seen > 10


def test_milestone_examples():
    table = ReturnTimeTable(tuple(range(40)), 40)
    assert milestones(table, 5).values == (1, 3, 5, 7, 9)
    assert len(milestones(table, 0)) == 0
    with pytest.raises(DepthError):
        milestones(ReturnTimeTable(tuple(range(6)), 6), 5)
    with pytest.raises(ContractError):
        milestones(ReturnTimeTable((INFINITY,) * 10, 10), 2)


def test_pd_milestone_chain():
    pd = period_doubling(1 << 12)
    table = return_time_table(pd, 1000)
    ms = milestones(table, 6)
    for a, b in zip(ms.values, ms.values[1:]):
        assert a <= table[a] < table[a] + 1 < b


def test_word_root_examples():
    r = word_overlap_root("010101", 2)
    assert (r.gamma, r.ell, r.repetitions) == ("01", 2, 3)
    with pytest.raises(ContractError, match="overlap"):
        word_overlap_root("011011", 2)
    with pytest.raises(ContractError):
        word_overlap_root("0", 0)
    with pytest.raises(ContractError):
        word_overlap_root("0", 1)


def _overlap_holds(alpha, m):
    beta, d = alpha + alpha, len(alpha) - m
    return all(beta[i] == beta[i + d] for i in range(len(beta) - d))


@pytest.mark.parametrize("n", range(2, 13))
def test_word_root_exhaustive(n):
    for w in itertools.product("01", repeat=n):
        alpha = "".join(w)
        for m in range(1, n):
            if not _overlap_holds(alpha, m):
                continue
            r = word_overlap_root(alpha, m)
            assert r.gamma * r.repetitions == alpha
            assert m % r.ell == 0 and (n - m) % r.ell == 0


def test_growth_report():
    rep = check_return_time_growth(period_doubling(1024), 64)
    assert rep.witnesses and rep.upper_half_ok
    table = return_time_table(period_doubling(1024), 65)
    assert all(table[t] >= t for t in rep.witnesses)
    with pytest.raises(ContractError):
        check_return_time_growth(parse_literal("[10*]"), 10)
    assert check_return_time_growth(period_doubling(64), 0).witnesses == ()


def test_space_and_resolve():
    sp = DendriteSpace.from_tau(resolve_tau("1[0]"))
    assert sp.kind == "NON_RECURRENT"
    assert resolve_tau("period-doubling", 128).certified_depth == 128
    with pytest.raises(ContractError):
        DendriteSpace.from_tau(parse_literal("[1*]"))
