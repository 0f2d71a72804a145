"""Closed-form utility bounds under compression and bounded-parity constraints.

Two families are evaluated from a joint over (S, X, T):

* ``theorem1_bounds`` -- perfect parity (leakage 0), including the integral
  bound ``u0``;
* ``theorem2_bounds`` -- leakage budget ``epsilon`` and rate budget ``r``.

Regimes overlap; every bound whose condition holds is marked applicable and
the aggregate takes the max (lower) / min (upper) over applicable entries.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .frl import SFRL_OFFSET, SFRL_SHIFT
from .info import (
    JointDistribution,
    conditional_entropy,
    entropy,
    get_base,
    log,
    mutual_information,
)

REGIME_TOL = 1e-12

LOWER_2 = ("L0", "L1", "L2", "L1p", "L3", "L4", "L3p")
UPPER_2 = ("U_S", "U_X")
LOWER_1 = ("L1r", "L2", "L3r", "L1p")
UPPER_1 = ("U_X", "U_S", "U0")


class RegimeWarning(UserWarning):
    pass


@dataclass(frozen=True)
class Quantities:
    """Entropy terms of P_{S,X,T} that the bounds are built from."""

    H_T: float
    H_S: float
    H_X: float
    H_XS: float
    H_T_given_XS: float
    H_XS_given_T: float
    H_T_given_S: float
    H_S_given_T: float
    H_T_given_X: float
    H_X_given_T: float
    H_X_given_S: float
    H_S_given_X: float
    I_XS_T: float
    base: str

    @classmethod
    def from_joint(cls, j: JointDistribution, s="S", x="X", t="T") -> "Quantities":
        xs = (x, s)
        return cls(
            H_T=entropy(j, t),
            H_S=entropy(j, s),
            H_X=entropy(j, x),
            H_XS=entropy(j, xs),
            H_T_given_XS=conditional_entropy(j, t, xs),
            H_XS_given_T=conditional_entropy(j, xs, t),
            H_T_given_S=conditional_entropy(j, t, s),
            H_S_given_T=conditional_entropy(j, s, t),
            H_T_given_X=conditional_entropy(j, t, x),
            H_X_given_T=conditional_entropy(j, x, t),
            H_X_given_S=conditional_entropy(j, x, s),
            H_S_given_X=conditional_entropy(j, s, x),
            I_XS_T=max(mutual_information(j, xs, t), 0.0),
            base=get_base(),
        )

    def as_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass(frozen=True)
class BoundEntry:
    name: str
    value: float
    applicable: bool
    regime: str
    kind: str  # "lower" | "upper"


@dataclass
class BoundReport:
    r: float
    epsilon: float
    quantities: Quantities
    entries: dict[str, BoundEntry]
    warnings: list[str] = field(default_factory=list)

    @property
    def best_lower(self) -> float:
        vals = [e.value for e in self.entries.values() if e.kind == "lower" and e.applicable]
        return max(vals) if vals else -math.inf

    @property
    def best_upper(self) -> float:
        vals = [e.value for e in self.entries.values() if e.kind == "upper" and e.applicable]
        return min(vals) if vals else math.inf

    def __getitem__(self, name: str) -> float:
        return self.entries[name].value

    def applicable(self, name: str) -> bool:
        return self.entries[name].applicable


def _ratio(num: float, den: float) -> float:
    # 0/0 is taken as 0 (the bound then degenerates to its zero-budget value)
    if den <= 0:
        return 0.0
    return num / den


def _log_term(q: Quantities, a: float) -> float:
    inner = (1 - a) * q.I_XS_T + a * min(q.H_T, q.H_XS) + SFRL_SHIFT
    return SFRL_OFFSET + float(log(inner))


def _sfrl_floor(q: Quantities) -> float:
    return q.H_T_given_XS - (float(log(q.I_XS_T + SFRL_SHIFT)) + SFRL_OFFSET)


def _trivial_regime_warnings(q: Quantities, r: float, eps: float) -> list[str]:
    out = []
    if r >= q.H_X:
        out.append(f"r={r:.6g} >= H(X)={q.H_X:.6g}: outside the nontrivial rate regime")
    if eps >= q.H_S and eps > 0:
        out.append(f"epsilon={eps:.6g} >= H(S)={q.H_S:.6g}: outside the nontrivial leakage regime")
    return out


def theorem2_from_quantities(q: Quantities, r: float, eps: float, warn: bool = True) -> BoundReport:
    if r < 0 or eps < 0:
        raise ValueError("r and epsilon must be nonnegative")
    tol = REGIME_TOL
    e: dict[str, BoundEntry] = {}

    def add(name, value, ok, regime, kind="lower"):
        e[name] = BoundEntry(name, float(value), bool(ok), regime, kind)

    add("L0", _sfrl_floor(q), True, "all")

    reg1 = r <= q.H_X_given_S + eps + tol
    a = _ratio(r, q.H_X_given_S + eps)
    add("L1", q.H_T_given_XS + r - q.H_XS_given_T, reg1, "1")
    add("L2", q.H_T_given_XS + r - a * q.H_XS_given_T - _log_term(q, a), reg1, "1")

    reg2 = q.H_X_given_S + eps - tol <= r < q.H_X
    add("L1p", q.H_T_given_S - q.H_S_given_T + eps, reg2, "2")

    reg3 = r - tol <= eps <= q.H_S_given_X + r + tol
    at = _ratio(eps, q.H_S_given_X + r)
    add("L3", q.H_T_given_XS + eps - q.H_XS_given_T, reg3, "3")
    add("L4", q.H_T_given_XS + eps - at * q.H_XS_given_T - _log_term(q, at), reg3, "3")

    reg4 = q.H_S_given_X + r - tol <= eps < q.H_S
    add("L3p", q.H_T_given_X - q.H_X_given_T + r, reg4, "4")

    add("U_S", q.H_T_given_S + eps, True, "all", "upper")
    add("U_X", q.H_T_given_X + r, True, "all", "upper")

    msgs = _trivial_regime_warnings(q, r, eps)
    if warn:
        for m in msgs:
            warnings.warn(m, RegimeWarning, stacklevel=3)
    return BoundReport(float(r), float(eps), q, e, msgs)


def theorem2_bounds(j: JointDistribution, r: float, eps: float, s="S", x="X", t="T") -> BoundReport:
    return theorem2_from_quantities(Quantities.from_joint(j, s, x, t), r, eps)


def theorem1_bounds(j: JointDistribution, r: float, s="S", x="X", t="T", u0_value=None) -> BoundReport:
    """Perfect-parity bounds (leakage 0) for rate ``r``."""
    q = Quantities.from_joint(j, s, x, t)
    return theorem1_from_quantities(q, r, u0(j, s, t) if u0_value is None else u0_value)


def theorem1_from_quantities(q: Quantities, r: float, u0_value: float, warn: bool = True) -> BoundReport:
    if r < 0:
        raise ValueError("r must be nonnegative")
    tol = REGIME_TOL
    e: dict[str, BoundEntry] = {}

    def add(name, value, ok, regime, kind="lower"):
        e[name] = BoundEntry(name, float(value), bool(ok), regime, kind)

    reg_a = r <= q.H_X_given_S + tol
    reg_b = q.H_X_given_S - tol <= r < q.H_X
    a = _ratio(r, q.H_X_given_S)
    add("L1r", q.H_T_given_XS + r - q.H_XS_given_T, reg_a, "a")
    add("L2", _sfrl_floor(q), True, "all")
    add("L3r", q.H_T_given_XS + r - a * q.H_XS_given_T - _log_term(q, a), reg_a, "a")
    add("L1p", q.H_T - q.H_S, reg_b, "b")
    add("U_X", q.H_T_given_X + r, True, "all", "upper")
    add("U_S", q.H_T_given_S, True, "all", "upper")
    add("U0", u0_value, True, "all", "upper")

    msgs = _trivial_regime_warnings(q, r, 0.0)
    if warn:
        for m in msgs:
            warnings.warn(m, RegimeWarning, stacklevel=3)
    return BoundReport(float(r), 0.0, q, e, msgs)


# shared bounds between the perfect-parity family and the epsilon = 0 case
THEOREM1_TO_2 = {"L1r": "L1", "L2": "L0", "L3r": "L2", "L1p": "L1p", "U_X": "U_X", "U_S": "U_S"}


def u0(j: JointDistribution, s="S", t="T") -> float:
    """Integral upper bound for perfect parity, evaluated piecewise exactly.

    For each t, m -> P_S{P(t|S) >= m} is a left-continuous step function that
    only changes at the distinct values of P(t|s); the integral of g log g is
    a finite sum over those steps.
    """
    pst = j.marginal((s, t))
    p_s = pst.sum(axis=1)
    keep = p_s > 0
    p_s = p_s[keep]
    cond = pst[keep] / p_s[:, None]
    total = 0.0
    for k in range(cond.shape[1]):
        total += _step_integral(cond[:, k], p_s)
    return entropy(j, t) + total


def _step_integral(levels: np.ndarray, weights: np.ndarray) -> float:
    vals = np.unique(levels)
    acc = 0.0
    prev = 0.0
    for v in vals:
        if v <= prev:
            continue
        g = weights[levels >= v].sum()
        if g > 0:
            acc += (v - prev) * g * float(log(g))
        prev = v
    return acc


def u0_monte_carlo(j: JointDistribution, n: int = 10_000_000, seed: int = 0,
                   s="S", t="T", chunk: int = 1_000_000) -> float:
    """Plain Monte-Carlo estimate of the same integral (independent check)."""
    rng = np.random.default_rng(seed)
    pst = j.marginal((s, t))
    p_s = pst.sum(axis=1)
    keep = p_s > 0
    p_s = p_s[keep]
    cond = pst[keep] / p_s[:, None]
    acc = np.zeros(cond.shape[1])
    done = 0
    while done < n:
        m = rng.random(min(chunk, n - done))
        for k in range(cond.shape[1]):
            g = ((cond[:, k][None, :] >= m[:, None]) * p_s[None, :]).sum(axis=1)
            with np.errstate(divide="ignore", invalid="ignore"):
                acc[k] += np.where(g > 0, g * log(np.where(g > 0, g, 1.0)), 0.0).sum()
        done += len(m)
    return entropy(j, t) + float(acc.sum() / n)


def crossovers(q: Quantities, eps: float) -> dict[str, float | None]:
    """Rates where the rate-limited upper bound meets the leakage-limited one,
    and where L2 stops beating L1 inside regime 1."""
    out: dict[str, float | None] = {}
    r_up = q.H_T_given_S + eps - q.H_T_given_X
    out["upper_bounds"] = r_up if r_up >= 0 else None

    den = q.H_X_given_S + eps

    def gap(r):
        a = _ratio(r, den)
        return (1 - a) * q.H_XS_given_T - _log_term(q, a)

    if den > 0 and gap(0.0) > 0 > gap(den):
        out["L2_vs_L1"] = float(brentq(gap, 0.0, den, xtol=1e-13))
    else:
        out["L2_vs_L1"] = None
    return out


def sweep(q: Quantities, rs, epss) -> list[BoundReport]:
    """Evaluate the leakage-budget bounds on every (r, eps) pair, r-major."""
    out = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RegimeWarning)
        for r in rs:
            for eps in epss:
                out.append(theorem2_from_quantities(q, float(r), float(eps)))
    return out
