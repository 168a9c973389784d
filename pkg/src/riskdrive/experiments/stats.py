"""Exact sign tests for paired trend assertions."""

from __future__ import annotations

from math import comb


def sign_test_p(wins: int, n: int) -> float:
    """One-sided exact binomial tail P(X >= wins) under p = 1/2."""
    if n < 0 or wins < 0 or wins > n:
        raise ValueError("need 0 <= wins <= n")
    if n == 0:
        return 1.0
    return sum(comb(n, k) for k in range(wins, n + 1)) / 2.0**n


def paired_sign_test(greater, lesser) -> tuple[int, int, float]:
    """(wins, non-tied pairs, one-sided p) for the claim greater > lesser."""
    if len(greater) != len(lesser):
        raise ValueError("paired samples must have equal length")
    wins = sum(1 for a, b in zip(greater, lesser) if a > b)
    ties = sum(1 for a, b in zip(greater, lesser) if a == b)
    n = len(greater) - ties
    return wins, n, sign_test_p(wins, n)
