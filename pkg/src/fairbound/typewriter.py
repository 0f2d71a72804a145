"""Noisy-typewriter joint: T uniform on 1..n, X a noisy copy, S a residue class of T."""
from __future__ import annotations

import numpy as np

from .info import Alphabet, JointDistribution

# Crossover rates read by eye off a published plot of the n=1000, hit 1/3,
# epsilon 0.1 instance (unit not stated); only used in the discrepancy report.
FIGURE_READS = {"upper_bounds": 1.08, "L2_vs_L1": 2.52}


def residue_class(t: int) -> int:
    """Ternary class of t mod 10: 0 -> 0, 1 -> 1, 2..9 -> 2."""
    return min(t % 10, 2)


def typewriter_joint(n: int, hit_prob: float) -> JointDistribution:
    if n < 10:
        raise ValueError(f"n must be at least 10, got {n}")
    if not 0.0 < hit_prob < 1.0:
        raise ValueError(f"hit_prob must lie in (0, 1), got {hit_prob}")
    miss = (1.0 - hit_prob) / (n - 1)
    x_given_t = np.full((n, n), miss)
    np.fill_diagonal(x_given_t, hit_prob)
    syms = range(1, n + 1)
    cls = np.array([residue_class(t) for t in syms])
    probs = np.zeros((3, n, n))
    # axes (S, X, T); S is a function of T
    probs[cls, :, np.arange(n)] = x_given_t / n
    return JointDistribution(
        [Alphabet.range("S", 3), Alphabet("X", syms), Alphabet("T", syms)], probs)
