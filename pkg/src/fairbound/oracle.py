"""Numerical lower-bound oracle for small instances.

Maximizes I(Y;T) over channels P(Y | S, X, T) (or P(Y | X) when the
representation may only see X) subject to I(Y;S) <= eps and I(Y;X) <= r,
by penalized projected gradient ascent with random restarts.  Every restart
ends with a feasibility repair, so whatever is returned is a feasible channel
and its measured utility is a certified lower bound on the optimum.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .info import Alphabet, Channel, JointDistribution, get_base

DEFAULT_RESTARTS = 64
DEFAULT_ITERS = 500
DEFAULT_STEP = 0.1
FEAS_TOL = 1e-12
ORACLE_CELL_LIMIT = 200_000
_TINY = 1e-300


@dataclass
class OracleResult:
    channel: Channel
    utility: float
    leakage: float
    rate: float
    feasible: bool
    r: float
    epsilon: float


class _Problem:
    """Flattened input contexts a, with P(a, v) for v in S, X, T."""

    def __init__(self, j: JointDistribution, inputs, names=("S", "X", "T")):
        self.inputs = tuple(inputs)
        joint = j.marginal(self.inputs + tuple(n for n in names if n not in self.inputs))
        self.alphabets = tuple(j.alphabet(n) for n in self.inputs)
        na = int(np.prod([len(a) for a in self.alphabets]))
        flat = joint.reshape(na, -1)
        self.p_a = flat.sum(axis=1)
        order = self.inputs + tuple(n for n in names if n not in self.inputs)
        self.w = {n: _pair_matrix(joint, order, self.inputs, n) for n in names}
        sv, xv, t = names
        self.w_all = np.concatenate([self.w[t], self.w[sv], self.w[xv]], axis=1)
        sizes = np.cumsum([0] + [self.w[n].shape[1] for n in (t, sv, xv)])
        self.blocks = list(zip(sizes[:-1], sizes[1:]))
        self.lpv = np.log(np.maximum(self.w_all.sum(axis=0), _TINY))
        self.na = na
        scale = np.where(self.p_a > 0, self.p_a, 1.0)
        self.inv_p = np.where(self.p_a > 0, 1.0 / scale, 0.0)
        self.ln_base = np.log(2.0) if get_base() == "bits" else 1.0

    def mi_all(self, q: np.ndarray, grad: bool = True):
        """I(T;Y), I(S;Y), I(X;Y) for a channel batch laid out as (A, R, Y).

        Returns per-restart values and, if asked, the gradients w.r.t. q.
        """
        na, nr, ny = q.shape
        flat = q.reshape(na, nr * ny)
        pvy = (self.w_all.T @ flat).reshape(-1, nr, ny)            # (V, R, Y)
        py = (self.p_a @ flat).reshape(nr, ny)
        lpvy = np.log(np.maximum(pvy, _TINY))
        lpy = np.log(np.maximum(py, _TINY))
        terms = (pvy * (lpvy - self.lpv[:, None, None])).sum(axis=2)  # (V, R)
        hy = (py * lpy).sum(axis=1)
        vals = [(terms[lo:hi].sum(axis=0) - hy) / self.ln_base for lo, hi in self.blocks]
        if not grad:
            return vals, None
        base_term = self.p_a[:, None, None] * lpy[None, :, :]
        grads = []
        for lo, hi in self.blocks:
            g = (self.w_all[:, lo:hi] @ lpvy[lo:hi].reshape(hi - lo, -1)).reshape(na, nr, ny)
            grads.append((g - base_term) / self.ln_base)
        return vals, grads

    def values(self, q):
        vals, _ = self.mi_all(q, grad=False)
        return vals[0], vals[1], vals[2]


def _pair_matrix(joint, order, inputs, n):
    k = len(inputs)
    axes = list(range(joint.ndim))
    idx_n = order.index(n)
    if idx_n < k:
        # v is one of the inputs: P(a, v) = P(a) * 1[v = a_n]
        pa = joint.sum(axis=tuple(axes[k:])) if joint.ndim > k else joint
        na = pa.size
        nv = joint.shape[idx_n]
        grid = np.indices(pa.shape)[idx_n].ravel()
        w = np.zeros((na, nv))
        w[np.arange(na), grid] = pa.ravel()
        return w
    rest = tuple(a for a in axes[k:] if a != idx_n)
    m = joint.sum(axis=rest) if rest else joint
    return m.reshape(-1, joint.shape[idx_n])


def project_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection of each row (last axis) onto the probability simplex."""
    shape = v.shape
    v = v.reshape(-1, shape[-1])
    u = -np.sort(-v, axis=1)
    css = np.cumsum(u, axis=1) - 1.0
    ind = np.arange(1, v.shape[1] + 1)
    cond = u - css / ind > 0
    rho = v.shape[1] - 1 - np.argmax(cond[:, ::-1], axis=1)
    theta = css[np.arange(v.shape[0]), rho] / (rho + 1)
    return np.maximum(v - theta[:, None], 0.0).reshape(shape)


def _penalized(prob, q, r, eps, mu):
    (it, is_, ix), (gt, gs, gx) = prob.mi_all(q)
    vs = np.maximum(is_ - eps, 0.0)
    vx = np.maximum(ix - r, 0.0)
    f = it - mu * (vs + vx) - 50.0 * mu * (vs ** 2 + vx ** 2)
    ws = mu * (100.0 * vs + 1.0) * (vs > 0)
    wx = mu * (100.0 * vx + 1.0) * (vx > 0)
    g = gt - ws[None, :, None] * gs - wx[None, :, None] * gx
    return f, g, is_, ix


def _repair(prob, q, r, eps):
    """Shrink each channel toward its output marginal until it is feasible.

    Mutual information is convex in the channel and vanishes on the output
    marginal, so the feasible mixing weights form an interval [0, lam*].
    """
    na, nr, ny = q.shape
    py = (prob.p_a @ q.reshape(na, -1)).reshape(nr, ny)
    base = np.broadcast_to(py[None], q.shape)

    def mixed(lam):
        return lam[None, :, None] * q + (1 - lam[None, :, None]) * base

    def feasible(lam):
        _, s, x = prob.values(mixed(lam))
        return (s <= eps + FEAS_TOL) & (x <= r + FEAS_TOL)

    ok = feasible(np.ones(nr))
    lo = np.where(ok, 1.0, 0.0)
    hi = np.ones(nr)
    for _ in range(60):
        mid = (lo + hi) / 2
        f = feasible(mid)
        lo = np.where(ok | ~f, lo, mid)
        hi = np.where(ok | f, hi, mid)
    return mixed(lo)


def _initial(rng, n, na, ny):
    """Half random deterministic channels, half Dirichlet(1/2) channels; (A, R, Y)."""
    half = n // 2
    dets = np.zeros((half, na, ny))
    picks = rng.integers(0, ny, size=(half, na))
    np.put_along_axis(dets, picks[:, :, None], 1.0, axis=2)
    rand = rng.dirichlet(np.full(ny, 0.5), size=(n - half, na))
    return np.ascontiguousarray(np.concatenate([dets, rand], axis=0).transpose(1, 0, 2))


def _ascend(prob, q, r, eps, iters, step):
    n = q.shape[1]
    eta = np.full(n, step)
    mu = np.ones(n)
    f, g, is_, ix = _penalized(prob, q, r, eps, mu)
    phase = max(iters // 8, 1)
    inv_p = prob.inv_p[:, None, None]
    for k in range(iters):
        cand = project_simplex(q + eta[None, :, None] * g * inv_p)
        fc, gc, isc, ixc = _penalized(prob, cand, r, eps, mu)
        better = fc >= f
        b3 = better[None, :, None]
        q = np.where(b3, cand, q)
        g = np.where(b3, gc, g)
        f = np.where(better, fc, f)
        is_ = np.where(better, isc, is_)
        ix = np.where(better, ixc, ix)
        eta = np.where(better, np.minimum(eta * 1.5, 10.0), np.maximum(eta * 0.5, 1e-8))
        if (k + 1) % phase == 0:
            viol = (is_ > eps + FEAS_TOL) | (ix > r + FEAS_TOL)
            if viol.any():
                mu = np.where(viol, mu * 2.0, mu)
                f, g, is_, ix = _penalized(prob, q, r, eps, mu)
    return q


def oracle_grid(j: JointDistribution, points, y_card: int | None = None,
                restarts: int = DEFAULT_RESTARTS, iters: int = DEFAULT_ITERS, seed: int = 0,
                markov_input: str | None = None, step: float = DEFAULT_STEP,
                names=("S", "X", "T")) -> list[OracleResult]:
    """Run the oracle at several (r, eps) points in one batch.

    Each point gets the same seeded set of initial channels, so results do
    not depend on which other points share the batch.
    """
    inputs = (markov_input,) if markov_input else tuple(names)
    prob = _Problem(j, inputs, names)
    if y_card is None:
        y_card = int(np.prod(j.shape)) + 2
    points = [(float(r), float(e)) for r, e in points]
    if any(r < 0 or e < 0 for r, e in points):
        raise ValueError("r and epsilon must be nonnegative")
    if prob.na * y_card > ORACLE_CELL_LIMIT:
        raise ValueError(f"oracle channel would have {prob.na * y_card} cells (limit {ORACLE_CELL_LIMIT})")
    rng = np.random.default_rng(seed)
    q0 = _initial(rng, restarts, prob.na, y_card)
    q = np.concatenate([q0] * len(points), axis=1)
    rv = np.repeat([p[0] for p in points], restarts)
    ev = np.repeat([p[1] for p in points], restarts)
    q = _ascend(prob, q, rv, ev, iters, step)
    q = _repair(prob, q, rv, ev)
    ut, ls, rt = prob.values(q)
    out = []
    yal = Alphabet("Y", range(y_card))
    for k, (r, e) in enumerate(points):
        sl = slice(k * restarts, (k + 1) * restarts)
        feas = (ls[sl] <= e + FEAS_TOL) & (rt[sl] <= r + FEAS_TOL)
        best = int(np.argmax(np.where(feas, ut[sl], -np.inf)))
        i = k * restarts + best
        table = q[:, i, :].reshape([len(a) for a in prob.alphabets] + [y_card])
        table = table / table.sum(axis=-1, keepdims=True)
        ch = Channel(prob.alphabets, yal, table)
        out.append(OracleResult(ch, float(ut[i]), float(ls[i]), float(rt[i]), bool(feas[best]), r, e))
    return out


def oracle_optimize(j: JointDistribution, r: float, eps: float, y_card: int | None = None,
                    restarts: int = DEFAULT_RESTARTS, iters: int = DEFAULT_ITERS, seed: int = 0,
                    markov_input: str | None = None, step: float = DEFAULT_STEP,
                    names=("S", "X", "T")) -> OracleResult:
    return oracle_grid(j, [(r, eps)], y_card, restarts, iters, seed, markov_input, step, names)[0]


def best_deterministic(j: JointDistribution, r: float, eps: float, y_card: int = 2,
                       names=("S", "X", "T")) -> float:
    """Exhaustive search over deterministic channels (independent check)."""
    prob = _Problem(j, tuple(names), names)
    best = 0.0
    maps = np.array(list(itertools.product(range(y_card), repeat=prob.na)))
    q = np.zeros((len(maps), prob.na, y_card))
    np.put_along_axis(q, maps[:, :, None], 1.0, axis=2)
    q = np.ascontiguousarray(q.transpose(1, 0, 2))
    ut, ls, rt = prob.values(q)
    ok = (ls <= eps + FEAS_TOL) & (rt <= r + FEAS_TOL)
    if ok.any():
        best = max(best, float(ut[ok].max()))
    return best
