"""Slow reference implementations written straight from the definitions.

Nothing here imports the algorithms under test; only plain strings go in
and out.
"""

from __future__ import annotations

import itertools

STAR = "*"


def follows(word: str, pattern: str) -> bool:
    """word ≈ pattern: agreement wherever the pattern is not a star."""
    return all(p == STAR or w == p for w, p in zip(word, pattern))


def simeq_brute(x: str, y: str, tau: str) -> bool:
    """x ≃ y: equal, or some j with a common head of length j and both
    tails after j following tau."""
    if x == y:
        return True
    n1 = len(x)
    for j in range(n1):
        if x[:j] == y[:j] and follows(x[j + 1:], tau[: n1 - j - 1]) and follows(y[j + 1:], tau[: n1 - j - 1]):
            return True
    return False


def precritical_words(tau: str, n: int) -> set:
    out = set()
    for k in range(n + 1):
        for u in itertools.product("01", repeat=k):
            out.add("".join(u) + STAR + tau[: n - k])
    return out


def agreement_brute(x: str, y: str, tau: str) -> int | None:
    """Least n with x↾n not ≃ y↾n over the available length, or None."""
    for n in range(len(x)):
        if not simeq_brute(x[: n + 1], y[: n + 1], tau):
            return n
    return None


def return_time_brute(tau: str, m: int) -> int | None:
    """Least k >= 1 with tau[k:k+m+1] == tau[:m+1] inside the given word."""
    for k in range(1, len(tau) - m):
        if tau[k:k + m + 1] == tau[: m + 1]:
            return k
    return None


def lambda_acceptable_periodic(period: str, horizon: int = 40) -> bool:
    w = period * (4 * horizon // len(period) + 4)
    for n in range(horizon):
        if (w[n] == STAR) != (w[n + 1:n + 1 + horizon] == w[:horizon]):
            return False
    for n in range(1, horizon):
        if w[n:n + horizon] == w[:horizon]:
            continue
        if not any(STAR != w[n + m] != w[m] != STAR for m in range(horizon)):
            return False
    return True


def flip_row_brute(rows: list, k: int, j: int):
    """Def 3.1 on plain rows (1-based k; rows long enough)."""
    top = rows[k - 1][j]
    for i in range(1, j + 1):
        if rows[k - 1 + i][j - i] != top:
            return i, 1
    if top == STAR:
        return 1, 2
    return None


def ledger_replay(rows: list, n: int, n_eps: int) -> list:
    """(alpha, j, i, beta) by the literal definition: the least alpha with a
    flip column below n_eps, its least column, then resume past beta."""
    out = []
    alpha = 1
    while alpha <= n:
        hit = None
        for j in range(n_eps):
            r = flip_row_brute(rows, alpha, j)
            if r is not None:
                hit = (alpha, j, r[0], alpha + j)
                break
        if hit is None:
            alpha += 1
            continue
        out.append(hit)
        alpha = hit[3] + 1
    return out


def orbit_rows(points, extra: int, width: int) -> list:
    """Rows x_1..x_n then the true orbit of x_n for ``extra`` more rows."""
    rows = [p.prefix(width) for p in points]
    tail = points[-1].prefix(width + extra + 1)
    rows += [tail[s:s + width] for s in range(1, extra + 1)]
    return rows
