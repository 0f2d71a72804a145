"""Finite joint distributions, channels and Shannon measures.

Everything downstream (bounds, constructions, audits) measures information
through this module, so the log base is a single process-wide setting.
"""
from __future__ import annotations

import math
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Sequence

import numpy as np

NORM_TOL = 1e-9

_BASES = {"bits": 2.0, "nats": math.e}
_base = "bits"


def set_base(name: str) -> None:
    global _base
    if name not in _BASES:
        raise ValueError(f"unknown log base {name!r}; expected 'bits' or 'nats'")
    _base = name


def get_base() -> str:
    return _base


@contextmanager
def use_base(name: str):
    """Temporarily switch the unit used by every information measure."""
    prev = get_base()
    set_base(name)
    try:
        yield
    finally:
        set_base(prev)


def log(x):
    """Logarithm in the currently selected base."""
    return np.log(x) / math.log(_BASES[_base])


@dataclass(frozen=True)
class Alphabet:
    name: str
    symbols: tuple

    def __init__(self, name: str, symbols: Iterable[Hashable]):
        symbols = tuple(symbols)
        if not symbols:
            raise ValueError(f"alphabet {name!r} is empty")
        if len(set(symbols)) != len(symbols):
            raise ValueError(f"alphabet {name!r} has repeated symbols")
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "symbols", symbols)

    @classmethod
    def range(cls, name: str, n: int) -> "Alphabet":
        return cls(name, range(n))

    def __len__(self) -> int:
        return len(self.symbols)

    def index(self, symbol) -> int:
        return self.symbols.index(symbol)

    def renamed(self, name: str) -> "Alphabet":
        return Alphabet(name, self.symbols)


def _names(vars) -> tuple[str, ...]:
    if isinstance(vars, str):
        return (vars,)
    return tuple(vars)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=float)
    a.setflags(write=False)
    return a


class JointDistribution:
    """Dense probability tensor over named finite variables (row-major axes)."""

    def __init__(self, variables: Sequence[Alphabet], probs, tol: float = NORM_TOL):
        variables = tuple(variables)
        names = [v.name for v in variables]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate variable names in {names}")
        probs = np.asarray(probs, dtype=float)
        shape = tuple(len(v) for v in variables)
        if probs.shape != shape:
            raise ValueError(f"probability tensor has shape {probs.shape}, alphabets need {shape}")
        if np.any(~np.isfinite(probs)) or np.any(probs < 0):
            raise ValueError("probabilities must be finite and nonnegative")
        total = probs.sum()
        if abs(total - 1.0) > tol:
            raise ValueError(f"not normalized: probabilities sum to {float(total)!r} (tolerance {tol})")
        self.variables = variables
        self.probs = _frozen(probs / total)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.variables)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.probs.shape

    def axis(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"unknown variable {name!r}; have {self.names}") from None

    def alphabet(self, name: str) -> Alphabet:
        return self.variables[self.axis(name)]

    def __contains__(self, name: str) -> bool:
        return name in self.names

    def marginal(self, vars) -> np.ndarray:
        """Marginal probability array over ``vars``, axes in the order given."""
        names = _names(vars)
        axes = [self.axis(n) for n in names]
        if len(set(axes)) != len(axes):
            raise ValueError(f"repeated variable in {names}")
        drop = tuple(i for i in range(self.probs.ndim) if i not in axes)
        m = self.probs.sum(axis=drop) if drop else self.probs
        kept = sorted(axes)
        return np.transpose(m, [kept.index(a) for a in axes])

    def __repr__(self) -> str:
        dims = ", ".join(f"{v.name}:{len(v)}" for v in self.variables)
        return f"JointDistribution({dims})"


@dataclass(frozen=True)
class Channel:
    """Conditional table P(output | inputs); ``table`` has input axes then the output axis.

    ``undefined`` marks input contexts of zero probability whose rows were
    filled (uniformly) rather than derived.
    """

    inputs: tuple
    output: Alphabet
    table: np.ndarray
    undefined: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        inputs = tuple(self.inputs)
        object.__setattr__(self, "inputs", inputs)
        table = np.asarray(self.table, dtype=float)
        shape = tuple(len(a) for a in inputs) + (len(self.output),)
        if table.shape != shape:
            raise ValueError(f"channel table has shape {table.shape}, expected {shape}")
        if np.any(table < 0) or np.any(~np.isfinite(table)):
            raise ValueError("channel entries must be finite and nonnegative")
        rows = table.sum(axis=-1)
        if np.any(np.abs(rows - 1.0) > NORM_TOL):
            raise ValueError(f"channel rows must sum to 1 (worst {np.abs(rows - 1).max():.3g})")
        object.__setattr__(self, "table", _frozen(table))

    @property
    def input_names(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.inputs)

    def rows(self) -> np.ndarray:
        """Table flattened to (#input contexts, |output|)."""
        return self.table.reshape(-1, len(self.output))


def marginalize(j: JointDistribution, keep) -> JointDistribution:
    names = _names(keep)
    if not names:
        raise ValueError("marginalize needs at least one variable to keep")
    return JointDistribution([j.alphabet(n) for n in names], j.marginal(names))


def condition(j: JointDistribution, target: str, given) -> Channel:
    given = _names(given)
    if target in given:
        raise ValueError(f"target {target!r} is also conditioned on")
    joint = j.marginal(given + (target,))
    ctx = joint.sum(axis=-1, keepdims=True)
    undefined = ctx[..., 0] <= 0
    n = joint.shape[-1]
    with np.errstate(invalid="ignore", divide="ignore"):
        table = np.where(ctx > 0, joint / np.where(ctx > 0, ctx, 1.0), 1.0 / n)
    return Channel(tuple(j.alphabet(g) for g in given), j.alphabet(target), table, undefined)


def compose(j: JointDistribution, c: Channel) -> JointDistribution:
    """Extend ``j`` with the channel output as a new last axis."""
    if c.output.name in j:
        raise ValueError(f"output name {c.output.name!r} already in joint")
    for a in c.inputs:
        if j.alphabet(a.name).symbols != a.symbols:
            raise ValueError(f"channel input {a.name!r} alphabet does not match the joint")
    axes = [j.axis(a.name) for a in c.inputs]
    # bring the channel's input axes into joint order, then broadcast
    order = np.argsort(axes)
    table = np.transpose(c.table, list(order) + [len(axes)])
    shape = [1] * len(j.shape) + [len(c.output)]
    for a in sorted(axes):
        shape[a] = j.shape[a]
    table = table.reshape(shape)
    probs = j.probs[..., None] * table
    return JointDistribution(j.variables + (c.output,), probs)


def _plogp_sum(p: np.ndarray) -> float:
    p = p.ravel()
    p = p[p > 0]
    return float(-(p * log(p)).sum())


def entropy(j: JointDistribution, vars) -> float:
    names = _names(vars)
    if not names:
        return 0.0
    return _plogp_sum(j.marginal(names))


def _union(*groups) -> tuple[str, ...]:
    out: list[str] = []
    for g in groups:
        for n in _names(g):
            if n not in out:
                out.append(n)
    return tuple(out)


def conditional_entropy(j: JointDistribution, a, given=()) -> float:
    return entropy(j, _union(a, given)) - entropy(j, given)


def mutual_information(j: JointDistribution, a, b) -> float:
    return entropy(j, a) + entropy(j, b) - entropy(j, _union(a, b))


def conditional_mutual_information(j: JointDistribution, a, b, given=()) -> float:
    if not _names(given):
        return mutual_information(j, a, b)
    return (entropy(j, _union(a, given)) + entropy(j, _union(b, given))
            - entropy(j, _union(a, b, given)) - entropy(j, given))


def fresh_symbol(*alphabets: Alphabet, stem: str = "c"):
    """A string label absent from every given alphabet."""
    used = set()
    for a in alphabets:
        used.update(a.symbols)
    sym = stem
    while sym in used:
        sym += "*"
    return sym
