"""Sorted free modules (sorts A and E), tensor words, and exact linear maps.

A LinMap stores only nonzero entries, keyed by (codomain basis tuple,
domain basis tuple).  Basis tuples enumerate in lexicographic order with
respect to the per-sort label order, which fixes deterministic witnesses.
The empty word is the ground ring and has the single basis tuple ().
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .ring import RingDecl, RingElem, RingError

SORT_A = "A"
SORT_E = "E"
SORTS = (SORT_A, SORT_E)


class TensorError(ValueError):
    """Shape or basis-spec violations in linear-map operations."""


def word(letters) -> tuple:
    w = tuple(letters)
    for s in w:
        if s not in SORTS:
            raise TensorError(f"unknown sort {s!r}")
    return w


@dataclass(frozen=True)
class BasisSpec:
    """Ordered basis labels for each sort, over a fixed ring declaration."""

    basis_a: tuple
    basis_e: tuple
    ring: RingDecl

    def __post_init__(self):
        for labels in (self.basis_a, self.basis_e):
            if not labels:
                raise TensorError("both sorts need a nonempty basis")
            if len(set(labels)) != len(labels):
                raise TensorError("duplicate basis labels within a sort")

    def labels(self, sort):
        return self.basis_a if sort == SORT_A else self.basis_e

    def tuples(self, w):
        """All basis tuples of a word in lexicographic order."""
        return itertools.product(*(self.labels(s) for s in w))

    def dim(self, w) -> int:
        n = 1
        for s in w:
            n *= len(self.labels(s))
        return n


class LinMap:
    """Exact sparse matrix between tensor words of A/E free modules."""

    __slots__ = ("spec", "dom", "cod", "entries")

    def __init__(self, spec, dom, cod, entries, _normalized=False):
        self.spec = spec
        self.dom = tuple(dom)
        self.cod = tuple(cod)
        if _normalized:
            self.entries = entries
        else:
            self.entries = {k: v for k, v in entries.items() if not v.is_zero()}

    # -- constructors ---------------------------------------------------------

    @staticmethod
    def zero(spec, dom, cod) -> "LinMap":
        return LinMap(spec, dom, cod, {}, _normalized=True)

    @staticmethod
    def identity(spec, w) -> "LinMap":
        one = spec.ring.one()
        return LinMap(spec, w, w, {(t, t): one for t in spec.tuples(w)}, _normalized=True)

    @staticmethod
    def from_rule(spec, dom, cod, rule) -> "LinMap":
        """Build from rule(in_tuple) -> dict[out_tuple] -> RingElem | int."""
        entries = {}
        for t in spec.tuples(dom):
            for out, c in rule(t).items():
                if isinstance(c, int):
                    c = spec.ring.const(c)
                if not c.is_zero():
                    entries[(out, t)] = entries.get((out, t), spec.ring.zero()) + c
        return LinMap(spec, dom, cod, entries)

    @staticmethod
    def permutation(spec, dom, perm) -> "LinMap":
        """Positional reindexing: output position i takes input position perm[i]."""
        cod = tuple(dom[perm[i]] for i in range(len(dom)))
        one = spec.ring.one()
        entries = {}
        for t in spec.tuples(dom):
            out = tuple(t[perm[i]] for i in range(len(dom)))
            entries[(out, t)] = one
        return LinMap(spec, dom, cod, entries, _normalized=True)

    # -- operations -----------------------------------------------------------

    def __add__(self, other):
        if (self.spec, self.dom, self.cod) != (other.spec, other.dom, other.cod):
            raise TensorError("shape mismatch in sum")
        entries = dict(self.entries)
        for k, v in other.entries.items():
            s = entries.get(k)
            s = v if s is None else s + v
            if s.is_zero():
                entries.pop(k, None)
            else:
                entries[k] = s
        return LinMap(self.spec, self.dom, self.cod, entries, _normalized=True)

    def __neg__(self):
        return self.scale(self.spec.ring.const(-1))

    def scale(self, c) -> "LinMap":
        if isinstance(c, int):
            c = self.spec.ring.const(c)
        return LinMap(self.spec, self.dom, self.cod, {k: c * v for k, v in self.entries.items()})

    def map_entries(self, fn) -> "LinMap":
        return LinMap(self.spec, self.dom, self.cod, {k: fn(v) for k, v in self.entries.items()})

    def is_zero(self) -> bool:
        return not self.entries

    def column(self, in_tuple) -> dict:
        return {out: v for (out, t), v in self.entries.items() if t == in_tuple}

    def __repr__(self):
        return f"LinMap({''.join(self.dom) or '()'} -> {''.join(self.cod) or '()'}, {len(self.entries)} entries)"


def compose(g: LinMap, f: LinMap) -> LinMap:
    """Matrix product g after f (diagram order: f is applied first)."""
    if f.spec != g.spec:
        raise TensorError("basis-spec mismatch")
    if f.cod != g.dom:
        raise TensorError(f"word mismatch: {f.cod} then {g.dom}")
    by_mid = {}
    for (out, mid), v in g.entries.items():
        by_mid.setdefault(mid, []).append((out, v))
    entries = {}
    for (mid, t), fv in f.entries.items():
        for out, gv in by_mid.get(mid, ()):
            key = (out, t)
            s = entries.get(key)
            p = gv * fv
            entries[key] = p if s is None else s + p
    return LinMap(f.spec, f.dom, g.cod, entries)


def tensor(f: LinMap, g: LinMap) -> LinMap:
    """Kronecker product on concatenated words."""
    if f.spec != g.spec:
        raise TensorError("basis-spec mismatch")
    entries = {}
    for (o1, i1), v1 in f.entries.items():
        for (o2, i2), v2 in g.entries.items():
            entries[(o1 + o2, i1 + i2)] = v1 * v2
    return LinMap(f.spec, f.dom + g.dom, f.cod + g.cod, entries)


def transposition(spec, w, i) -> LinMap:
    """Swap tensor factors i and i+1 (1-based)."""
    if not 1 <= i < len(w):
        raise TensorError(f"transposition index {i} out of range for word of length {len(w)}")
    perm = list(range(len(w)))
    perm[i - 1], perm[i] = perm[i], perm[i - 1]
    return LinMap.permutation(spec, w, perm)


def equal(f: LinMap, g: LinMap):
    """Exact comparison; returns (bool, witness).

    The witness is None on equality; on a shape mismatch it is
    ("shape", (dom, cod), (dom, cod)); otherwise it is the lexicographically
    first domain basis tuple where the columns differ, with both columns.
    """
    if f.spec != g.spec or f.dom != g.dom or f.cod != g.cod:
        return False, ("shape", (f.dom, f.cod), (g.dom, g.cod))
    if f.entries == g.entries:
        return True, None
    for t in f.spec.tuples(f.dom):
        cf, cg = f.column(t), g.column(t)
        if cf != cg:
            return False, (t, cf, cg)
    return True, None


def apply(f: LinMap, vec: dict) -> dict:
    """Matrix-vector product; vec maps domain basis tuples to coefficients."""
    out = {}
    for (o, t), v in f.entries.items():
        c = vec.get(t)
        if c is None:
            continue
        if isinstance(c, int):
            c = f.spec.ring.const(c)
        s = out.get(o)
        p = v * c
        out[o] = p if s is None else s + p
    return {o: c for o, c in out.items() if not c.is_zero()}
