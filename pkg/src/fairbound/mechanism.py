"""Achievability constructions Y = (U', Y') and their audits.

L1 family: a seed U leaking exactly ``epsilon`` about S with X a function of
(U, S); it is diluted with a constant until I(U'; X, S) = r.
L3 family: the dual, a seed leaking exactly ``r`` about X with S a function
of (U, X), diluted until I(U'; X, S) = epsilon.

In both, Y' is a functional representation of T given (S, X, U'), so it is
independent of (S, X, U') and removes all residual uncertainty about T.
The L2/L4 variants run the same pipeline and additionally check Y' against
the strong-FRL ceiling, which certifies the tighter closed-form bound when it
holds.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bounds import Quantities, theorem2_from_quantities
from .frl import (
    ExtendedDecomposition,
    FrlDecomposition,
    SfrlCheck,
    efrl_construct,
    frl_construct,
    mix_with_constant,
    sfrl_check,
)
from .info import (
    Alphabet,
    Channel,
    JointDistribution,
    compose,
    condition,
    conditional_entropy,
    conditional_mutual_information,
    fresh_symbol,
    mutual_information,
)

DEFAULT_CELL_BUDGET = 1_000_000
FULL_AUDIT_CELLS = 5_000_000
IDENTITY_TOL = 1e-9

RECIPES = ("L1", "L2", "L3", "L4", "thm1")


class RegimeError(ValueError):
    pass


class SizeGuardError(ValueError):
    pass


@dataclass
class Mechanism:
    recipe: str
    r: float
    epsilon: float
    mix_prob: float
    seed: ExtendedDecomposition
    seed_roles: tuple[str, str]          # (revealed input, determined output)
    u_alphabet: Alphabet                 # U' symbols: (w, z) pairs plus the filler
    u_channel: Channel                   # P(U' | S, X)
    y_frl: FrlDecomposition
    y_contexts: np.ndarray               # flat (s, x, u') indices the Y' FRL was built on
    y_channel: Channel                   # P(Y' | S, X, T, U')
    claimed: dict[str, float]
    sfrl: SfrlCheck | None = None
    log: list[str] = field(default_factory=list)
    names: tuple[str, str, str] = ("S", "X", "T")

    def compact_joint(self, j: JointDistribution) -> JointDistribution:
        """Joint over (S, X, T, U', Y')."""
        return compose(compose(j, self.u_channel), self.y_channel)

    def full_joint(self, j: JointDistribution) -> JointDistribution:
        """Joint with the seed coin B, seed atoms W, response Z, then U' and Y'."""
        s, x, _ = self.names
        inp, out = self.seed_roles
        sd = self.seed
        b = sd.base
        ia, oa = j.alphabet(inp), j.alphabet(out)
        coin = Channel((), Alphabet("B", (0, 1)), np.array([1 - sd.reveal_prob, sd.reveal_prob]))
        # W | (input, output) -- posterior of the FRL atoms
        w_post = b.seed_posterior()
        w_ch = Channel((ia, oa), Alphabet("W", range(b.n_atoms)), w_post)
        n = len(ia)
        z_tab = np.zeros((n, 2, n + 1))
        z_tab[:, 0, n] = 1.0
        z_tab[np.arange(n), 1, np.arange(n)] = 1.0
        z_ch = Channel((ia, coin.output), Alphabet("Z", list(ia.symbols) + [sd.filler]), z_tab)
        jj = compose(compose(compose(j, coin), w_ch), z_ch)
        jj = mix_with_constant(jj, ("W", "Z"), self.mix_prob, name="U'",
                               filler=self.u_alphabet.symbols[-1])
        if jj.alphabet("U'").symbols != self.u_alphabet.symbols:
            raise AssertionError("U' alphabet mismatch between full and compact joints")
        return compose(jj, self.y_channel)

    def realize(self, j: JointDistribution | None = None, name: str = "Y") -> Channel:
        """Dense channel P(Y | S, X, T) with Y = (U', Y'), unused symbols pruned."""
        pu = self.u_channel.table            # (S, X, U')
        py = self.y_channel.table            # (S, X, T, U', V)
        full = pu[:, :, None, :, None] * py  # (S, X, T, U', V)
        ns, nx, nt, nu, nv = full.shape
        flat = full.reshape(ns, nx, nt, nu * nv)
        if j is not None:
            weight = (j.marginal(self.names)[..., None] * flat).reshape(-1, nu * nv).sum(axis=0)
            used = weight > 0
        else:
            used = flat.reshape(-1, nu * nv).max(axis=0) > 0
        idx = np.flatnonzero(used)
        sym = [(self.u_alphabet.symbols[i // nv], i % nv) for i in idx]
        table = flat[..., idx]
        table = table / table.sum(axis=-1, keepdims=True)
        ins = self.u_channel.inputs + (self.y_channel.inputs[2],)
        return Channel(ins, Alphabet(name, sym), table)


def _budget_check(ns, nx, nt, nu, budget):
    cells = ns * nx * nu * nt
    if cells > budget:
        raise SizeGuardError(
            f"composite (S,X,U') table needs {cells} cells (|S|={ns}, |X|={nx}, |U'|={nu}, |T|={nt}); "
            f"budget is {budget}")


def _build(j: JointDistribution, recipe: str, r: float, eps: float, seed_roles, seed_eps,
           mix_prob: float, claimed: dict, budget: int, log: list[str], names) -> Mechanism:
    s, x, t = names
    inp, out = seed_roles
    p_in_out = j.marginal((inp, out))
    p_in = p_in_out.sum(axis=1)
    cond = condition(JointDistribution([j.alphabet(inp), j.alphabet(out)], p_in_out), out, inp)
    filler = fresh_symbol(*j.variables)
    seed = efrl_construct(p_in, cond.table, seed_eps, filler=filler)
    log.append(f"seed: FRL of P({out}|{inp}) with {seed.base.n_atoms} atoms, "
               f"reveal prob {seed.reveal_prob:.6g} (leak {seed_eps:.6g} about {inp})")
    if seed.exceeds_mutual_information and seed_eps > 0:
        log.append(f"note: seed leakage {seed_eps:.6g} >= I({inp};{out}) = {seed.i_xy:.6g}")

    sa, xa, ta = j.alphabet(s), j.alphabet(x), j.alphabet(t)
    u_syms = seed.u_symbols(j.alphabet(inp).symbols)
    mix_fill = fresh_symbol(*j.variables, Alphabet("Z", [filler]), Alphabet("U", u_syms))
    ua = Alphabet("U'", u_syms + [mix_fill])
    _budget_check(len(sa), len(xa), len(ta), len(ua), budget)

    post = seed.seed_posterior()             # (input, output, U)
    if inp == x:
        post = np.transpose(post, (1, 0, 2))  # -> (S, X, U)
    n_u = post.shape[-1]
    u_tab = np.concatenate([mix_prob * post, np.full(post.shape[:2] + (1,), 1 - mix_prob)], axis=-1)
    u_channel = Channel((sa, xa), ua, u_tab)
    log.append(f"mix: U' = U w.p. {mix_prob:.6g}, constant otherwise ({n_u + 1} symbols)")

    j_sxu = compose(j.__class__([sa, xa], j.marginal((s, x))), u_channel)
    p_ctx = j_sxu.probs.ravel()
    ctx = np.flatnonzero(p_ctx > 0)
    # T is conditionally independent of U' given (S, X), so P(T|s,x,u') = P(T|s,x)
    p_t = condition(j, t, (s, x)).table       # (S, X, T)
    nu = len(ua)
    t_rows = np.repeat(p_t[:, :, None, :], nu, axis=2).reshape(-1, len(ta))[ctx]
    y_frl = frl_construct(p_ctx[ctx] / p_ctx[ctx].sum(), t_rows)
    log.append(f"Y': FRL of P(T|S,X,U') over {len(ctx)} contexts, {y_frl.n_atoms} atoms")

    nv = y_frl.n_atoms
    post_v = y_frl.seed_posterior()           # (ctx, T, V)
    y_tab = np.full((len(sa) * len(xa) * nu, len(ta), nv), 1.0 / nv)
    y_tab[ctx] = post_v
    y_tab = y_tab.reshape(len(sa), len(xa), nu, len(ta), nv).transpose(0, 1, 3, 2, 4)
    y_channel = Channel((sa, xa, ta, ua), Alphabet("Y'", range(nv)), y_tab)
    return Mechanism(recipe, r, eps, mix_prob, seed, seed_roles, ua, u_channel, y_frl, ctx,
                     y_channel, claimed, None, log, names)


def _ratio(a, b):
    return a / b if b > 0 else 0.0


def construct_L1(j: JointDistribution, r: float, eps: float, cell_budget: int = DEFAULT_CELL_BUDGET,
                 names=("S", "X", "T"), recipe: str = "L1") -> Mechanism:
    q = Quantities.from_joint(j, *names)
    if r < 0 or eps < 0:
        raise RegimeError("r and epsilon must be nonnegative")
    if r > q.H_X_given_S + eps + 1e-12:
        raise RegimeError(f"regime violated: r = {r:.6g} > H(X|S) + epsilon = {q.H_X_given_S + eps:.6g}")
    if eps > 0 and eps >= q.H_S:
        raise RegimeError(f"regime violated: epsilon = {eps:.6g} >= H(S) = {q.H_S:.6g}")
    alpha = min(_ratio(r, q.H_X_given_S + eps), 1.0)
    rep = theorem2_from_quantities(q, r, eps, warn=False)
    claimed = {"L1": rep["L1"]}
    log = [f"recipe {recipe}: r={r:.6g}, epsilon={eps:.6g}, mixing alpha={alpha:.6g}"]
    s, x, _ = names
    return _build(j, recipe, r, eps, (s, x), eps, alpha, claimed, cell_budget, log, names)


def construct_L3(j: JointDistribution, r: float, eps: float, cell_budget: int = DEFAULT_CELL_BUDGET,
                 names=("S", "X", "T"), recipe: str = "L3") -> Mechanism:
    q = Quantities.from_joint(j, *names)
    if r < 0 or eps < 0:
        raise RegimeError("r and epsilon must be nonnegative")
    if r > eps + 1e-12:
        raise RegimeError(f"regime violated: r = {r:.6g} > epsilon = {eps:.6g}")
    if eps > q.H_S_given_X + r + 1e-12:
        raise RegimeError(f"regime violated: epsilon = {eps:.6g} > H(S|X) + r = {q.H_S_given_X + r:.6g}")
    if r > 0 and r >= q.H_X:
        raise RegimeError(f"regime violated: r = {r:.6g} >= H(X) = {q.H_X:.6g}")
    alpha = min(_ratio(eps, q.H_S_given_X + r), 1.0)
    rep = theorem2_from_quantities(q, r, eps, warn=False)
    claimed = {"L3": rep["L3"]}
    log = [f"recipe {recipe}: r={r:.6g}, epsilon={eps:.6g}, mixing alpha={alpha:.6g}"]
    s, x, _ = names
    return _build(j, recipe, r, eps, (x, s), r, alpha, claimed, cell_budget, log, names)


def construct_L2_variant(j: JointDistribution, r: float, eps: float, family: str = "L1",
                         cell_budget: int = DEFAULT_CELL_BUDGET, names=("S", "X", "T")) -> Mechanism:
    """Same pipeline as L1 (or L3), plus the strong-FRL check on Y'.

    When the check holds, the tighter bound L2 (resp. L4) is added to the
    mechanism's claims; the audited utility is a certificate either way.
    """
    if family == "L1":
        m = construct_L1(j, r, eps, cell_budget, names, recipe="L2")
        tight = "L2"
    elif family == "L3":
        m = construct_L3(j, r, eps, cell_budget, names, recipe="L4")
        tight = "L4"
    else:
        raise ValueError(f"unknown family {family!r}")
    s, x, t = names
    jc = m.compact_joint(j)
    m.sfrl = sfrl_check(jc, (x, s), "Y'", t, given="U'")
    if m.sfrl.holds:
        q = Quantities.from_joint(j, *names)
        m.claimed[tight] = theorem2_from_quantities(q, r, eps, warn=False)[tight]
    m.log.append(f"strong-FRL check on Y': measured {m.sfrl.measured:.6g} vs ceiling "
                 f"{m.sfrl.bound:.6g} -> {'holds' if m.sfrl.holds else 'fails'}")
    return m


def construct(j: JointDistribution, recipe: str, r: float, eps: float,
              cell_budget: int = DEFAULT_CELL_BUDGET, names=("S", "X", "T")) -> Mechanism:
    if recipe == "L1":
        return construct_L1(j, r, eps, cell_budget, names)
    if recipe == "L3":
        return construct_L3(j, r, eps, cell_budget, names)
    if recipe == "L2":
        return construct_L2_variant(j, r, eps, "L1", cell_budget, names)
    if recipe == "L4":
        return construct_L2_variant(j, r, eps, "L3", cell_budget, names)
    if recipe == "thm1":
        if eps != 0:
            raise RegimeError("recipe thm1 is the perfect-parity construction; epsilon must be 0")
        m = construct_L1(j, r, 0.0, cell_budget, names, recipe="thm1")
        m.claimed = {"L1r": m.claimed.pop("L1")}
        return m
    raise ValueError(f"unknown recipe {recipe!r}; expected one of {RECIPES}")


@dataclass
class AuditResult:
    utility: float                     # I(Y;T)
    leakage: float                     # I(Y;S)
    rate: float                        # I(Y;X)
    r: float
    epsilon: float
    claimed: dict[str, float]
    identities: dict[str, float] = field(default_factory=dict)
    expected: dict[str, float] = field(default_factory=dict)

    @property
    def leakage_slack(self) -> float:
        return self.epsilon - self.leakage

    @property
    def rate_slack(self) -> float:
        return self.r - self.rate

    @property
    def bound_slack(self) -> dict[str, float]:
        return {k: self.utility - v for k, v in self.claimed.items()}

    @property
    def feasible(self) -> bool:
        return self.leakage_slack >= -IDENTITY_TOL and self.rate_slack >= -IDENTITY_TOL

    @property
    def certified(self) -> bool:
        return self.feasible and all(v >= -IDENTITY_TOL for v in self.bound_slack.values())

    def identity_errors(self) -> dict[str, float]:
        return {k: abs(self.identities[k] - v) for k, v in self.expected.items()}

    @property
    def identities_hold(self) -> bool:
        return all(v <= IDENTITY_TOL for v in self.identity_errors().values())

    def summary(self) -> str:
        lines = [
            f"I(Y;T) = {self.utility!r}",
            f"I(Y;S) = {self.leakage!r}   (epsilon = {self.epsilon!r}, slack {self.leakage_slack!r})",
            f"I(Y;X) = {self.rate!r}   (r = {self.r!r}, slack {self.rate_slack!r})",
        ]
        for k, v in self.claimed.items():
            lines.append(f"certified {k} = {v!r}   (utility - bound = {self.utility - v!r})")
        for k, v in self.identities.items():
            exp = self.expected.get(k)
            tail = f"   (expected {exp!r})" if exp is not None else ""
            lines.append(f"{k} = {v!r}{tail}")
        lines.append(f"feasible: {self.feasible}; certified: {self.certified}; "
                     f"identities hold: {self.identities_hold}")
        return "\n".join(lines)


def _measure(jj: JointDistribution, y, names, r, eps, claimed) -> AuditResult:
    s, x, t = names
    xs = (x, s)
    utility = mutual_information(jj, y, t)
    res = AuditResult(utility, mutual_information(jj, y, s), mutual_information(jj, y, x),
                      r, eps, dict(claimed))
    # utility decomposition: two routes to I(Y;T)
    i_xs_y_t = conditional_mutual_information(jj, xs, y, t)
    res.identities["I(X,S,T;Y) - I(X,S;Y|T)"] = mutual_information(jj, (x, s, t), y) - i_xs_y_t
    res.identities["I(X,S;Y) + H(T|X,S) - H(T|Y,X,S) - I(X,S;Y|T)"] = (
        mutual_information(jj, xs, y) + conditional_entropy(jj, t, xs)
        - conditional_entropy(jj, t, tuple(y) + xs) - i_xs_y_t)
    for k in list(res.identities):
        res.expected[k] = utility
    return res


def audit(m: Mechanism | Channel, j: JointDistribution, full: bool | None = None,
          r: float | None = None, eps: float | None = None) -> AuditResult:
    """Compose the mechanism with ``j`` and measure every constraint and identity.

    A bare ``Channel`` P(Y | ...) is audited for constraints and the utility
    decomposition only; pass ``r``/``eps`` to get slacks.
    """
    if isinstance(m, Channel):
        names = ("S", "X", "T")
        jj = compose(j, m)
        res = _measure(jj, (m.output.name,), names, r if r is not None else np.inf,
                       eps if eps is not None else np.inf, {})
        res.identities["H(T|Y,X,S)"] = conditional_entropy(jj, "T", (m.output.name, "X", "S"))
        return res

    s, x, t = m.names
    xs = (x, s)
    cells = int(np.prod(j.shape)) * 2 * m.seed.base.n_atoms * m.seed.n_z * len(m.u_alphabet) * m.y_frl.n_atoms
    if full is None:
        full = cells <= FULL_AUDIT_CELLS
    jj = m.full_joint(j) if full else m.compact_joint(j)
    y = ("U'", "Y'")
    res = _measure(jj, y, m.names, m.r, m.epsilon, m.claimed)
    a = m.mix_prob
    res.identities["I(U';X,S)"] = mutual_information(jj, "U'", xs)
    res.identities["H(T|Y',S,X,U')"] = conditional_entropy(jj, t, ("Y'", s, x, "U'"))
    res.identities["I(Y';S,X,U')"] = mutual_information(jj, "Y'", (s, x, "U'"))
    res.expected["H(T|Y',S,X,U')"] = 0.0
    res.expected["I(Y';S,X,U')"] = 0.0
    if m.recipe in ("L1", "L2", "thm1"):
        res.expected["I(U';X,S)"] = m.r
        res.identities["I(Y;S)"] = res.leakage
        res.expected["I(Y;S)"] = a * m.epsilon
    else:
        res.expected["I(U';X,S)"] = m.epsilon
        res.identities["I(Y;X)"] = res.rate
        res.expected["I(Y;X)"] = a * m.r
    if full:
        inp, out = m.seed_roles
        u = ("W", "Z")
        res.identities[f"I(U;{inp})"] = mutual_information(jj, u, inp)
        res.expected[f"I(U;{inp})"] = m.seed.epsilon
        res.identities[f"H({out}|U,{inp})"] = conditional_entropy(jj, out, u + (inp,))
        res.expected[f"H({out}|U,{inp})"] = 0.0
        res.identities["I(U';X,S) - a I(U;X,S)"] = res.identities["I(U';X,S)"] - a * mutual_information(jj, u, xs)
        res.expected["I(U';X,S) - a I(U;X,S)"] = 0.0
    if m.sfrl is not None:
        res.identities["I(X,S;Y'|T,U')"] = m.sfrl.measured
    return res
