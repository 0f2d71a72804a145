"""Constructive functional representations.

``frl_construct`` realizes any channel P(y|x) as y = f(u, x) with a seed U
independent of X, by stacking the per-x CDFs of P(y|x) on [0, 1) and cutting
the unit interval at every breakpoint.  The extended variant bolts a
randomized response onto that seed so it leaks a prescribed amount about X.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .info import (
    NORM_TOL,
    Alphabet,
    Channel,
    JointDistribution,
    compose,
    conditional_mutual_information,
    entropy,
    fresh_symbol,
    log,
    mutual_information,
)

BREAKPOINT_TOL = 1e-12

# Constants of the tightened strong functional representation lemma.
SFRL_SHIFT = 5.51
SFRL_OFFSET = 1.06


def _as_channel_rows(p_y_given_x) -> np.ndarray:
    if isinstance(p_y_given_x, Channel):
        return np.array(p_y_given_x.rows())
    rows = np.atleast_2d(np.asarray(p_y_given_x, dtype=float))
    return rows


def _check_dist(p, what):
    p = np.asarray(p, dtype=float)
    if np.any(p < 0) or np.any(~np.isfinite(p)):
        raise ValueError(f"{what} has negative or non-finite entries")
    s = p.sum(axis=-1)
    if np.any(np.abs(s - 1.0) > NORM_TOL):
        raise ValueError(f"{what} is not normalized (sums {s})")
    return p


@dataclass(frozen=True)
class FrlDecomposition:
    """Seed atoms U (independent of X) with a decision table y = f(u, x)."""

    u_probs: np.ndarray       # (n_atoms,)
    edges: np.ndarray         # (n_atoms + 1,) cut points of [0, 1]
    decision: np.ndarray      # (n_atoms, n_x) output index
    p_x: np.ndarray
    p_y_given_x: np.ndarray   # (n_x, n_y)

    @property
    def n_atoms(self) -> int:
        return len(self.u_probs)

    @property
    def n_x(self) -> int:
        return self.p_y_given_x.shape[0]

    @property
    def n_y(self) -> int:
        return self.p_y_given_x.shape[1]

    def cardinality_bound(self) -> int:
        return self.n_x * (self.n_y - 1) + 1

    def reconstruct(self) -> np.ndarray:
        """P(y|x) implied by (P_U, f)."""
        out = np.zeros((self.n_x, self.n_y))
        cols = np.arange(self.n_x)
        for u, pu in enumerate(self.u_probs):
            np.add.at(out, (cols, self.decision[u]), pu)
        return out

    def seed_posterior(self) -> np.ndarray:
        """P(u | x, y), shape (n_x, n_y, n_atoms); rows with P(y|x)=0 are uniform.

        Sampling U from this posterior given an observed (x, y) reproduces
        the joint (X, U, Y) of the decomposition.
        """
        ind = self.decision.T[:, None, :] == np.arange(self.n_y)[None, :, None]
        w = ind * self.u_probs[None, None, :]
        tot = w.sum(axis=-1, keepdims=True)
        return np.where(tot > 0, w / np.where(tot > 0, tot, 1.0), 1.0 / self.n_atoms)

    def joint(self, x: str = "X", u: str = "U", y: str = "Y",
              x_symbols=None, y_symbols=None) -> JointDistribution:
        """Joint of (X, U, Y) with U drawn independently of X and Y = f(U, X)."""
        xa = Alphabet(x, x_symbols if x_symbols is not None else range(self.n_x))
        ya = Alphabet(y, y_symbols if y_symbols is not None else range(self.n_y))
        ua = Alphabet(u, range(self.n_atoms))
        probs = self.p_x[:, None, None] * self.u_probs[None, :, None] * (
            self.decision.T[:, :, None] == np.arange(self.n_y)[None, None, :])
        return JointDistribution([xa, ua, ya], probs)


def frl_construct(p_x, p_y_given_x) -> FrlDecomposition:
    p_x = _check_dist(p_x, "p_x")
    rows = _check_dist(_as_channel_rows(p_y_given_x), "P(y|x)")
    if rows.shape[0] != p_x.shape[0]:
        raise ValueError(f"p_x has {p_x.shape[0]} entries, channel has {rows.shape[0]} rows")
    cdf = np.cumsum(rows, axis=1)
    cuts = np.sort(cdf[:, :-1].ravel())
    cuts = cuts[(cuts > BREAKPOINT_TOL) & (cuts < 1.0 - BREAKPOINT_TOL)]
    kept = [0.0]
    for c in cuts:
        if c - kept[-1] > BREAKPOINT_TOL:
            kept.append(float(c))
    if 1.0 - kept[-1] <= BREAKPOINT_TOL:
        kept.pop()
    edges = np.array(kept + [1.0])
    u_probs = np.diff(edges)
    mids = (edges[:-1] + edges[1:]) / 2
    n_y = rows.shape[1]
    decision = np.empty((len(mids), rows.shape[0]), dtype=np.int64)
    for x in range(rows.shape[0]):
        decision[:, x] = np.minimum(np.searchsorted(cdf[x], mids, side="right"), n_y - 1)
    for a in (u_probs, edges, decision, p_x, rows):
        a.setflags(write=False)
    return FrlDecomposition(u_probs, edges, decision, p_x, rows)


@dataclass(frozen=True)
class ExtendedDecomposition:
    """FRL seed W plus a randomized response Z (X w.p. ``reveal_prob``, else filler)."""

    base: FrlDecomposition
    reveal_prob: float
    filler: str
    epsilon: float
    h_x: float
    i_xy: float

    @property
    def exceeds_mutual_information(self) -> bool:
        # leakage is usually taken below I(X;Y); the construction itself works up to H(X)
        return self.epsilon >= self.i_xy

    @property
    def n_z(self) -> int:
        return self.base.n_x + 1

    @property
    def n_u(self) -> int:
        return self.base.n_atoms * self.n_z

    def cardinality_bound(self) -> int:
        return self.base.cardinality_bound() * (self.base.n_x + 1)

    def z_given_x(self) -> np.ndarray:
        """P(z | x), shape (n_x, n_x + 1); the last column is the filler."""
        n = self.base.n_x
        t = np.zeros((n, n + 1))
        t[np.arange(n), np.arange(n)] = self.reveal_prob
        t[:, n] = 1.0 - self.reveal_prob
        return t

    def u_symbols(self, x_symbols=None) -> list[tuple]:
        xs = list(x_symbols) if x_symbols is not None else list(range(self.base.n_x))
        return [(w, z) for w in range(self.base.n_atoms) for z in xs + [self.filler]]

    def seed_posterior(self) -> np.ndarray:
        """P(u | x, y) over flattened U = (w, z), shape (n_x, n_y, n_u)."""
        pw = self.base.seed_posterior()
        pz = self.z_given_x()
        out = pw[:, :, :, None] * pz[:, None, None, :]
        return out.reshape(self.base.n_x, self.base.n_y, -1)

    def joint(self, x: str = "X", y: str = "Y", x_symbols=None, y_symbols=None) -> JointDistribution:
        """Joint of (X, B, W, Z, Y) with the reveal coin B materialized."""
        b = self.base
        xs = list(x_symbols) if x_symbols is not None else list(range(b.n_x))
        xa = Alphabet(x, xs)
        ya = Alphabet(y, y_symbols if y_symbols is not None else range(b.n_y))
        ba = Alphabet("B", (0, 1))
        wa = Alphabet("W", range(b.n_atoms))
        za = Alphabet("Z", xs + [self.filler])
        n = b.n_x
        coin = np.array([1.0 - self.reveal_prob, self.reveal_prob])
        z_of = np.zeros((n, 2, n + 1))
        z_of[:, 0, n] = 1.0
        z_of[np.arange(n), 1, np.arange(n)] = 1.0
        y_of = (b.decision.T[:, :, None] == np.arange(b.n_y)[None, None, :]).astype(float)
        probs = (b.p_x[:, None, None, None, None] * coin[None, :, None, None, None]
                 * b.u_probs[None, None, :, None, None]
                 * z_of[:, :, None, :, None] * y_of[:, None, :, None, :])
        return JointDistribution([xa, ba, wa, za, ya], probs)


def efrl_construct(p_x, p_y_given_x, epsilon: float, filler: str = "c") -> ExtendedDecomposition:
    """Seed U = (W, Z) with I(U;X) = epsilon and Y a function of (U, X).

    Accepts any 0 <= epsilon < H(X); the reveal probability is epsilon/H(X).
    """
    base = frl_construct(p_x, p_y_given_x)
    pj = base.p_x[:, None] * base.p_y_given_x
    h_x = entropy(_vector_joint(pj), "X")
    i_xy = mutual_information(_vector_joint(pj), "X", "Y")
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    if epsilon > 0 and epsilon >= h_x:
        raise ValueError(f"epsilon={epsilon} must be below H(X)={h_x}")
    alpha = epsilon / h_x if epsilon > 0 else 0.0
    return ExtendedDecomposition(base, alpha, filler, float(epsilon), h_x, i_xy)


def _vector_joint(pxy: np.ndarray) -> JointDistribution:
    return JointDistribution([Alphabet.range("X", pxy.shape[0]), Alphabet.range("Y", pxy.shape[1])], pxy)


def mix_with_constant(j: JointDistribution, u_vars, alpha: float, name: str = "U'",
                      filler=None) -> JointDistribution:
    """Add ``name`` = U with probability alpha, a fresh constant otherwise.

    The coin is independent of everything, so I(U';V) = alpha * I(U;V) for
    any V in ``j``.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"mixing probability {alpha} outside [0, 1]")
    u_vars = (u_vars,) if isinstance(u_vars, str) else tuple(u_vars)
    ins = [j.alphabet(v) for v in u_vars]
    if len(ins) == 1:
        syms = list(ins[0].symbols)
    else:
        syms = [tuple(s) for s in np.ndindex(*[len(a) for a in ins])]
        syms = [tuple(a.symbols[i] for a, i in zip(ins, idx)) for idx in syms]
    if filler is None:
        filler = fresh_symbol(*j.variables)
    elif any(filler in a.symbols for a in j.variables):
        raise ValueError(f"filler {filler!r} is not fresh")
    out = Alphabet(name, syms + [filler])
    n = len(syms)
    table = np.zeros((n, n + 1))
    table[np.arange(n), np.arange(n)] = alpha
    table[:, n] = 1.0 - alpha
    table = table.reshape([len(a) for a in ins] + [n + 1])
    return compose(j, Channel(tuple(ins), out, table))


def sfrl_bound(i_xy: float) -> float:
    if i_xy < 0:
        raise ValueError("mutual information must be nonnegative")
    return float(log(i_xy + SFRL_SHIFT)) + SFRL_OFFSET


def esfrl_bound(epsilon: float, h_x: float, h_x_given_y: float, i_xy: float) -> float:
    if epsilon < 0 or (epsilon > 0 and epsilon >= h_x):
        raise ValueError(f"need 0 <= epsilon < H(X); got epsilon={epsilon}, H(X)={h_x}")
    alpha = epsilon / h_x if epsilon > 0 else 0.0
    return alpha * h_x_given_y + (1 - alpha) * sfrl_bound(i_xy)


@dataclass(frozen=True)
class SfrlCheck:
    holds: bool
    slack: float
    measured: float
    bound: float


def sfrl_check(j: JointDistribution, x="X", u="U", y="Y", given=()) -> SfrlCheck:
    """Compare measured I(X;U|Y, given) with the strong-FRL ceiling.

    With ``given`` nonempty the ceiling uses I(X;Y|given), which is the
    conditional form used when the seed is built per context.
    """
    measured = conditional_mutual_information(j, x, u, _cat(y, given))
    i_xy = max(conditional_mutual_information(j, x, y, given), 0.0)
    bound = sfrl_bound(i_xy)
    return SfrlCheck(measured <= bound, bound - measured, measured, bound)


def _cat(a, b) -> tuple[str, ...]:
    a = (a,) if isinstance(a, str) else tuple(a)
    b = (b,) if isinstance(b, str) else tuple(b)
    return a + tuple(n for n in b if n not in a)
