"""Binomial transform of finite sequences.

``sigma_n = sum_{k=0}^n C(n,k) (-1)^k s_k``.  The map is an involution, so
the same function serves as its own inverse.
"""

from __future__ import annotations

from typing import List, Sequence

from gmpy2 import mpq

__all__ = ["binomial_transform", "inverse_binomial_transform"]


def binomial_transform(s: Sequence) -> List:
    out = []
    for n in range(len(s)):
        acc = mpq(0)
        c = 1  # C(n, k) built incrementally
        for k in range(n + 1):
            term = c * s[k]
            acc = acc - term if k & 1 else acc + term
            c = c * (n - k) // (k + 1)
        out.append(acc)
    return out


inverse_binomial_transform = binomial_transform
