"""Plain-text sparse formats for joints P(S,X,T) and channels P(Y|S,X,T).

Joint file::

    # comment
    vars: S 2 X 3 T 3
    labels S: female male        (optional, one line per variable)
    0 0 0 0.125
    ...

Unlisted cells are zero; indices are 0-based.  A channel file uses
``channel: Y <k> given S 2 X 3 T 3`` and rows ``s x t y p``.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .info import Alphabet, Channel, JointDistribution


class JointFileError(ValueError):
    pass


def _label(sym) -> str:
    return "".join(str(sym).split())


def _is_default(a: Alphabet) -> bool:
    return a.symbols == tuple(range(len(a)))


def _parse_header(tokens, lineno, what):
    if len(tokens) % 2:
        raise JointFileError(f"line {lineno}: {what} header needs name/size pairs")
    out = []
    for name, size in zip(tokens[::2], tokens[1::2]):
        try:
            n = int(size)
        except ValueError:
            raise JointFileError(f"line {lineno}: bad alphabet size {size!r} for {name}") from None
        if n < 1:
            raise JointFileError(f"line {lineno}: alphabet size for {name} must be positive")
        out.append((name, n))
    return out


def _lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def _read_table(text: str, kind: str):
    header = None
    out_var = None
    labels: dict[str, list[str]] = {}
    entries: dict[tuple, float] = {}
    for lineno, line in _lines(text):
        head, _, rest = line.partition(":")
        if header is None:
            if kind == "joint" and head.strip() == "vars":
                header = _parse_header(rest.split(), lineno, "vars")
            elif kind == "channel" and head.strip() == "channel":
                toks = rest.split()
                if len(toks) < 3 or toks[2] != "given":
                    raise JointFileError(f"line {lineno}: expected 'channel: Y <k> given ...'")
                out_var = _parse_header(toks[:2], lineno, "channel")[0]
                header = _parse_header(toks[3:], lineno, "channel")
            else:
                raise JointFileError(f"line {lineno}: expected a '{'vars' if kind == 'joint' else 'channel'}:' header")
            continue
        if head.startswith("labels"):
            name = head[len("labels"):].strip()
            labels[name] = rest.split()
            continue
        toks = line.split()
        n_idx = len(header) + (1 if out_var else 0)
        if len(toks) != n_idx + 1:
            raise JointFileError(f"line {lineno}: expected {n_idx} indices and a probability")
        try:
            idx = tuple(int(t) for t in toks[:-1])
            p = float(toks[-1])
        except ValueError:
            raise JointFileError(f"line {lineno}: cannot parse {line!r}") from None
        sizes = [n for _, n in header] + ([out_var[1]] if out_var else [])
        if any(not 0 <= i < n for i, n in zip(idx, sizes)):
            raise JointFileError(f"line {lineno}: index out of range in {line!r}")
        if not np.isfinite(p) or p < 0:
            raise JointFileError(f"line {lineno}: probability must be finite and nonnegative")
        if idx in entries:
            raise JointFileError(f"line {lineno}: duplicate entry {idx}")
        entries[idx] = p
    if header is None:
        raise JointFileError("missing header line")
    variables = header + ([out_var] if out_var else [])
    alphas = []
    for name, n in variables:
        syms = labels.get(name)
        if syms is not None and len(syms) != n:
            raise JointFileError(f"labels for {name} list {len(syms)} symbols, size is {n}")
        alphas.append(Alphabet(name, syms if syms is not None else range(n)))
    table = np.zeros([n for _, n in variables])
    for idx, p in entries.items():
        table[idx] = p
    return alphas, table


def parse_joint(text: str) -> JointDistribution:
    alphas, table = _read_table(text, "joint")
    try:
        return JointDistribution(alphas, table)
    except ValueError as e:
        raise JointFileError(str(e)) from None


def read_joint(path) -> JointDistribution:
    return parse_joint(Path(path).read_text())


def format_joint(j: JointDistribution) -> str:
    lines = ["vars: " + " ".join(f"{a.name} {len(a)}" for a in j.variables)]
    for a in j.variables:
        if not _is_default(a):
            lines.append(f"labels {a.name}: " + " ".join(_label(s) for s in a.symbols))
    for idx in zip(*np.nonzero(j.probs)):
        lines.append(" ".join(str(int(i)) for i in idx) + " " + repr(float(j.probs[idx])))
    return "\n".join(lines) + "\n"


def write_joint(j: JointDistribution, path) -> None:
    Path(path).write_text(format_joint(j))


def format_channel(ch: Channel, comments=()) -> str:
    out = ch.output
    lines = [f"# {c}" for c in comments]
    lines.append(f"channel: {out.name} {len(out)} given " + " ".join(f"{a.name} {len(a)}" for a in ch.inputs))
    for a in ch.inputs + (out,):
        if not _is_default(a):
            lines.append(f"labels {a.name}: " + " ".join(_label(s) for s in a.symbols))
    for idx in zip(*np.nonzero(ch.table)):
        lines.append(" ".join(str(int(i)) for i in idx) + " " + repr(float(ch.table[idx])))
    return "\n".join(lines) + "\n"


def write_channel(ch: Channel, path, comments=()) -> None:
    Path(path).write_text(format_channel(ch, comments))


def parse_channel(text: str) -> Channel:
    alphas, table = _read_table(text, "channel")
    try:
        return Channel(tuple(alphas[:-1]), alphas[-1], table)
    except ValueError as e:
        raise JointFileError(str(e)) from None


def read_channel(path) -> Channel:
    return parse_channel(Path(path).read_text())
