"""Exact multivariate Laurent-polynomial arithmetic over Z, Q, and Z/2.

Elements are kept in a unique normal form: a map from monomials to nonzero
coefficients.  Monomials are sorted tuples of (variable, exponent) pairs with
no zero exponents; negative exponents are only legal on variables declared
invertible.  Everything is immutable after construction.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

INTEGERS = "integers"
RATIONALS = "rationals"
MOD2 = "integers-mod-2"
DOMAINS = (INTEGERS, RATIONALS, MOD2)

Monomial = tuple  # tuple[tuple[str, int], ...], sorted by variable name


class RingError(ValueError):
    """Malformed ring input: mismatched rings, bad parses, non-units."""


@dataclass(frozen=True)
class VarDecl:
    name: str
    invertible: bool = False


@dataclass(frozen=True)
class RingDecl:
    """A coefficient domain plus an ordered tuple of variable declarations."""

    domain: str
    vars: tuple = ()

    def __post_init__(self):
        if self.domain not in DOMAINS:
            raise RingError(f"unknown coefficient domain {self.domain!r}")
        names = [v.name for v in self.vars]
        if len(names) != len(set(names)):
            raise RingError("variable names must be unique within a ring declaration")

    def var(self, name):
        for v in self.vars:
            if v.name == name:
                return v
        return None

    # -- element constructors ------------------------------------------------

    def const(self, c) -> "RingElem":
        c = _coerce(self.domain, c)
        return RingElem(self, {(): c} if c != 0 else {})

    def zero(self) -> "RingElem":
        return RingElem(self, {})

    def one(self) -> "RingElem":
        return self.const(1)

    def gen(self, name, power=1) -> "RingElem":
        v = self.var(name)
        if v is None:
            raise RingError(f"unknown variable {name}")
        if power < 0 and not v.invertible:
            raise RingError(f"negative exponent on non-invertible variable {name}")
        if power == 0:
            return self.one()
        return RingElem(self, {((name, power),): _coerce(self.domain, 1)})

    def parse(self, text) -> "RingElem":
        return parse_ring_elem(text, self)


def ring(domain, *var_specs) -> RingDecl:
    """Build a RingDecl; a trailing '^-1' on a name marks it invertible."""
    decls = []
    for s in var_specs:
        if s.endswith("^-1"):
            decls.append(VarDecl(s[:-3], invertible=True))
        else:
            decls.append(VarDecl(s))
    return RingDecl(domain, tuple(decls))


def _coerce(domain, c):
    if domain == MOD2:
        if isinstance(c, Fraction):
            if c.denominator != 1:
                raise RingError("rational coefficient in Z/2 ring")
            c = c.numerator
        return c % 2
    if domain == RATIONALS:
        return Fraction(c)
    if isinstance(c, Fraction):
        if c.denominator != 1:
            raise RingError("rational coefficient in integer ring")
        return c.numerator
    return int(c)


def _mono_mul(m1, m2):
    d = dict(m1)
    for v, e in m2:
        e2 = d.get(v, 0) + e
        if e2 == 0:
            d.pop(v, None)
        else:
            d[v] = e2
    return tuple(sorted(d.items()))


def _mono_pow(m, k):
    if k == 0:
        return ()
    return tuple(sorted((v, e * k) for v, e in m))


class RingElem:
    """Normal-form element: dict monomial -> nonzero coefficient."""

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring_decl, terms, _normalized=False):
        self.ring = ring_decl
        if _normalized:
            self.terms = terms
        else:
            clean = {}
            for m, c in terms.items():
                c = _coerce(ring_decl.domain, c)
                if c != 0:
                    clean[m] = c
            self.terms = clean
        self._hash = None

    # -- ring operations -----------------------------------------------------

    def _check(self, other) -> "RingElem":
        if isinstance(other, (int, Fraction)):
            return self.ring.const(other)
        if not isinstance(other, RingElem):
            return NotImplemented
        if other.ring != self.ring:
            raise RingError("ring mismatch")
        return other

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return NotImplemented
        terms = dict(self.terms)
        for m, c in other.terms.items():
            s = terms.get(m, 0) + c
            s = _coerce(self.ring.domain, s)
            if s == 0:
                terms.pop(m, None)
            else:
                terms[m] = s
        return RingElem(self.ring, terms, _normalized=True)

    __radd__ = __add__

    def __neg__(self):
        if self.ring.domain == MOD2:
            return self
        return RingElem(self.ring, {m: -c for m, c in self.terms.items()}, _normalized=True)

    def __sub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return self.ring.const(other) - self

    def __mul__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return NotImplemented
        terms = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                s = terms.get(m, 0) + c1 * c2
                terms[m] = s
        return RingElem(self.ring, terms)

    __rmul__ = __mul__

    def __pow__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return unit_invert(self) ** (-k)
        out = self.ring.one()
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # -- structure -----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or set(self.terms) == {()}

    def constant_value(self):
        """The coefficient of the empty monomial (element must be constant)."""
        if not self.is_constant():
            raise RingError(f"not a constant: {self}")
        return self.terms.get((), _coerce(self.ring.domain, 0))

    def is_unit(self) -> bool:
        if len(self.terms) != 1:
            return False
        (m, c), = self.terms.items()
        if any(not self.ring.var(v).invertible for v, _ in m):
            return False
        if self.ring.domain == INTEGERS:
            return c in (1, -1)
        return c != 0  # rationals, Z/2

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.ring.const(other)
        if not isinstance(other, RingElem):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    # -- printing ------------------------------------------------------------

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms):
            c = self.terms[m]
            factors = [v if e == 1 else f"{v}^{e}" for v, e in m]
            if not factors:
                body = str(abs(c))
            elif abs(c) == 1:
                body = "*".join(factors)
            else:
                body = "*".join([str(abs(c))] + factors)
            sign = "-" if c < 0 else "+"
            parts.append((sign, body))
        first_sign, first_body = parts[0]
        out = ("-" if first_sign == "-" else "") + first_body
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self):
        return f"RingElem({self})"


# -- spec-facing operation names ----------------------------------------------

def ring_add(x: RingElem, y: RingElem) -> RingElem:
    return x + y


def ring_mul(x: RingElem, y: RingElem) -> RingElem:
    return x * y


def ring_neg(x: RingElem) -> RingElem:
    return -x


def unit_invert(x: RingElem) -> RingElem:
    """Invert a unit: a single monomial in invertible variables with unit coefficient."""
    if not x.is_unit():
        raise RingError(f"not a unit: {x}")
    (m, c), = x.terms.items()
    if x.ring.domain == RATIONALS:
        inv = Fraction(1) / c
    else:
        inv = c  # +-1 over Z, 1 over Z/2
    return RingElem(x.ring, {_mono_pow(m, -1): inv})


def specialize(x: RingElem, assignment) -> RingElem:
    """Substitute ring elements (or literals) for variables, then normalize.

    Invertible variables must be assigned units of the same ring.
    """
    values = {}
    for name, val in assignment.items():
        var = x.ring.var(name)
        if var is None:
            raise RingError(f"unknown variable {name}")
        if isinstance(val, str):
            val = x.ring.parse(val)
        elif isinstance(val, (int, Fraction)):
            val = x.ring.const(val)
        elif val.ring != x.ring:
            raise RingError("ring mismatch")
        if var.invertible and not val.is_unit():
            raise RingError(f"non-unit assigned to invertible variable {name}")
        values[name] = val
    out = x.ring.zero()
    for m, c in x.terms.items():
        term = x.ring.const(c)
        for v, e in m:
            if v in values:
                term = term * (values[v] ** e)
            else:
                term = term * x.ring.gen(v, e)
        out = out + term
    return out


_TOKEN = re.compile(r"(\d+/\d+)|(\d+)|([A-Za-z_][A-Za-z_0-9]*)|([()+\-*^])")


def _tokenize(text):
    tokens, pos = [], 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m:
            raise RingError(f"syntax error at position {pos}: {text[pos:pos + 10]!r}")
        kind = "rat" if m.group(1) else "int" if m.group(2) else "name" if m.group(3) else "op"
        tokens.append((kind, m.group(0), pos))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    """Recursive descent for: expr := ('-')? term (('+'|'-') term)*;
    term := factor ('*' factor)*; factor := INT | RAT | VAR ('^' SINT)? | '(' expr ')'."""

    def __init__(self, text, ring_decl):
        self.text = text
        self.ring = ring_decl
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, msg):
        kind, val, pos = self.peek()
        raise RingError(f"{msg} at position {pos}")

    def parse(self):
        e = self.expr()
        if self.peek()[0] != "end":
            self.error("trailing input")
        return e

    def expr(self):
        negate = False
        if self.peek()[:2] == ("op", "-"):
            self.take()
            negate = True
        e = self.term()
        if negate:
            e = -e
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            t = self.term()
            e = e + t if op == "+" else e - t
        return e

    def term(self):
        e = self.factor()
        while self.peek()[:2] == ("op", "*"):
            self.take()
            e = e * self.factor()
        return e

    def factor(self):
        kind, val, pos = self.peek()
        if kind == "int":
            self.take()
            return self.ring.const(int(val))
        if kind == "rat":
            self.take()
            if self.ring.domain != RATIONALS:
                raise RingError(f"rational literal in non-rational ring at position {pos}")
            num, den = val.split("/")
            return self.ring.const(Fraction(int(num), int(den)))
        if kind == "name":
            self.take()
            var = self.ring.var(val)
            if var is None:
                raise RingError(f"unknown variable {val}")
            power = 1
            if self.peek()[:2] == ("op", "^"):
                self.take()
                sign = 1
                if self.peek()[:2] == ("op", "-"):
                    self.take()
                    sign = -1
                k, v2, p2 = self.peek()
                if k != "int":
                    raise RingError(f"expected integer exponent at position {p2}")
                self.take()
                power = sign * int(v2)
            if power < 0 and not var.invertible:
                raise RingError(f"negative exponent on non-invertible variable {val}")
            if power == 0:
                return self.ring.one()
            return RingElem(self.ring, {((val, power),): _coerce(self.ring.domain, 1)})
        if (kind, val) == ("op", "("):
            self.take()
            e = self.expr()
            if self.peek()[:2] != ("op", ")"):
                self.error("expected ')'")
            self.take()
            return e
        self.error(f"unexpected token {val!r}")


def parse_ring_elem(text: str, ring_decl: RingDecl) -> RingElem:
    return _Parser(text, ring_decl).parse()
