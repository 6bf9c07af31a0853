"""Commutative Frobenius pairs: data structure, verifier, and constructions.

A FrobeniusPair carries one exact LinMap per signature generator (possibly a
partial subset).  The pairing beta and copairing gamma are never stored: they
are derived as eps*mu_A and Delta_A*eta, so the cancelation equations remain
genuine checks on an independently supplied Delta_A.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import product

from .ring import (
    INTEGERS,
    MOD2,
    RATIONALS,
    RingDecl,
    RingElem,
    RingError,
    VarDecl,
    ring,
    unit_invert,
)
from .tensor import BasisSpec, LinMap, apply, compose, equal, word
from .theory import SIGNATURE, evaluate_term, load_axioms, parse_term


class PairError(ValueError):
    """Structural violations in pair construction or serialization."""


@dataclass
class FrobeniusPair:
    """Generator table of a (possibly partial) commutative Frobenius pair."""

    ring: RingDecl
    spec: BasisSpec
    maps: dict
    name: str = "pair"
    unit_label: str = "1"
    notes: dict = field(default_factory=dict)

    def __post_init__(self):
        for gname, m in self.maps.items():
            if gname not in SIGNATURE:
                raise PairError(f"unknown map name {gname}")
            dom, cod = SIGNATURE[gname]
            if (m.dom, m.cod) != (dom, cod):
                raise PairError(f"signature mismatch for {gname}")
            if m.spec != self.spec:
                raise PairError(f"basis-spec mismatch for {gname}")
        eta = self.maps.get("eta")
        if eta is not None:
            unit = eta.column(())
            if unit.get((self.unit_label,)) != self.ring.one():
                raise PairError("eta(1) must have coefficient 1 on the unit label")

    def generator_table(self) -> dict:
        """Shipped maps plus the derived pairing/copairing."""
        table = dict(self.maps)
        if "eps" in table and "mu_A" in table:
            table["beta"] = compose(table["eps"], table["mu_A"])
        if "Delta_A" in table and "eta" in table:
            table["gamma"] = compose(table["Delta_A"], table["eta"])
        return table

    def evaluate(self, term) -> LinMap:
        return evaluate_term(term, self.generator_table(), self.spec)


def handle_element(pair: FrobeniusPair) -> dict:
    """mu_A(Delta_A(eta(1))) as a vector over the A basis."""
    m = pair.evaluate(parse_term("eta ; Delta_A ; mu_A"))
    return apply(m, {(): pair.ring.one()})


# -- verification ---------------------------------------------------------------


@dataclass
class VerifyRecord:
    name: str
    group: str
    provenance: str
    status: str  # pass | fail | skip
    witness: tuple = None
    missing: tuple = ()


@dataclass
class VerifyReport:
    pair_name: str
    records: list
    meta: dict = field(default_factory=dict)

    def summary(self) -> dict:
        out = {}
        for r in self.records:
            slot = out.setdefault(r.group, {"pass": 0, "fail": 0, "skip": 0})
            slot[r.status] += 1
        return out

    def failures(self, include_quarantine=False):
        return [
            r for r in self.records
            if r.status == "fail" and (include_quarantine or r.group != "quarantine")
        ]

    def ok(self) -> bool:
        """True iff no scored (non-quarantine) equation fails."""
        return not self.failures()


def verify(pair: FrobeniusPair, equations=None, groups=None) -> VerifyReport:
    """Evaluate both sides of every equation exactly and compare.

    Equations mentioning generators absent from the pair are reported as
    skipped.  Witnesses are deterministic: the lexicographically first
    domain basis tuple on which the two sides differ, with both columns.
    """
    if equations is None:
        equations = load_axioms()
    table = pair.generator_table()
    records = []
    for eq in equations:
        if groups is not None and eq.group not in groups:
            continue
        missing = tuple(sorted(eq.generators() - set(table)))
        if missing:
            records.append(VerifyRecord(eq.name, eq.group, eq.provenance, "skip", missing=missing))
            continue
        lhs = evaluate_term(eq.lhs, table, pair.spec)
        rhs = evaluate_term(eq.rhs, table, pair.spec)
        ok, witness = equal(lhs, rhs)
        if ok:
            records.append(VerifyRecord(eq.name, eq.group, eq.provenance, "pass"))
        else:
            records.append(VerifyRecord(eq.name, eq.group, eq.provenance, "fail", witness=witness))
    return VerifyReport(pair.name, records, meta=dict(pair.notes))


# -- structure-constant helpers ----------------------------------------------------


@dataclass
class FrobeniusAlgebra:
    """Rank-n commutative Frobenius algebra as label-keyed structure constants."""

    ring: RingDecl
    labels: tuple
    unit_label: str
    mul_table: dict      # (l1, l2) -> {label: RingElem}
    delta_table: dict    # l -> {(l1, l2): RingElem}
    counit_table: dict   # l -> RingElem

    def unit_vec(self):
        return {self.unit_label: self.ring.one()}

    def mul_vec(self, v1, v2):
        out = {}
        for l1, c1 in v1.items():
            for l2, c2 in v2.items():
                for l3, c3 in self.mul_table[(l1, l2)].items():
                    s = out.get(l3, self.ring.zero()) + c1 * c2 * c3
                    out[l3] = s
        return {l: c for l, c in out.items() if not c.is_zero()}

    def delta_vec(self, v):
        out = {}
        for l, c in v.items():
            for pair_lab, c2 in self.delta_table[l].items():
                s = out.get(pair_lab, self.ring.zero()) + c * c2
                out[pair_lab] = s
        return {k: c for k, c in out.items() if not c.is_zero()}

    def handle_vec(self):
        out = {}
        for (l1, l2), c in self.delta_table[self.unit_label].items():
            for l3, c3 in self.mul_table[(l1, l2)].items():
                s = out.get(l3, self.ring.zero()) + c * c3
                out[l3] = s
        return {l: c for l, c in out.items() if not c.is_zero()}

    def scalar_vec(self, c):
        """c * 1_A for a ring element or integer c."""
        if isinstance(c, int):
            c = self.ring.const(c)
        return {self.unit_label: c} if not c.is_zero() else {}

    def power_vec(self, v, k, v_inv=None):
        """v**k in the algebra; negative powers use the supplied inverse."""
        if k < 0:
            if v_inv is None:
                raise PairError("negative power without an inverse")
            v, k = v_inv, -k
        out = self.unit_vec()
        for _ in range(k):
            out = self.mul_vec(out, v)
        return out


def universal_algebra(ring_decl, h, t, labels=("1", "X")) -> FrobeniusAlgebra:
    """k[X]/(X^2 - hX - t) with the universal Khovanov Frobenius structure:
    eps(1)=0, eps(X)=1, Delta(1)=1&X + X&1 - h 1&1, Delta(X)=X&X + t 1&1."""
    one, x = labels
    e1, eh, et = ring_decl.one(), h, t
    mul = {
        (one, one): {one: e1},
        (one, x): {x: e1},
        (x, one): {x: e1},
        (x, x): {x: eh, one: et},
    }
    delta = {
        one: {(one, x): e1, (x, one): e1, (one, one): -eh},
        x: {(x, x): e1, (one, one): et},
    }
    counit = {one: ring_decl.zero(), x: e1}
    mul = {k: {l: c for l, c in v.items() if not c.is_zero()} for k, v in mul.items()}
    delta = {k: {l: c for l, c in v.items() if not c.is_zero()} for k, v in delta.items()}
    return FrobeniusAlgebra(ring_decl, labels, one, mul, delta, counit)


def _linmap(spec, dom, cod, table) -> LinMap:
    """Build a LinMap from {in_tuple: {out_tuple: RingElem}}."""
    entries = {}
    for t, col in table.items():
        for o, c in col.items():
            if isinstance(c, int):
                c = spec.ring.const(c)
            if not c.is_zero():
                entries[(o, t)] = c
    return LinMap(spec, dom, cod, entries, _normalized=True)


def _algebra_maps(alg, spec):
    """The four A-generators of an algebra as LinMaps over a basis spec."""
    labels = alg.labels
    mu = {
        (a, b): {(l,): c for l, c in alg.mul_table[(a, b)].items()}
        for a, b in product(labels, labels)
    }
    delta = {(l,): dict(alg.delta_table[l]) for l in labels}
    eta = {(): {(alg.unit_label,): alg.ring.one()}}
    eps = {(l,): ({(): alg.counit_table[l]} if not alg.counit_table[l].is_zero() else {})
           for l in labels}
    return {
        "mu_A": _linmap(spec, word("AA"), word("A"), mu),
        "Delta_A": _linmap(spec, word("A"), word("AA"), delta),
        "eta": _linmap(spec, (), word("A"), eta),
        "eps": _linmap(spec, word("A"), (), eps),
    }


def _vec_str(vec) -> str:
    return " + ".join(f"({c})*{'&'.join(l)}" if isinstance(l, tuple) else f"({c})*{l}"
                      for l, c in sorted(vec.items())) or "0"


# -- builders ------------------------------------------------------------------


def build_aps() -> FrobeniusPair:
    """The integral pair with A = Z[X]/(X^2), E = <Y, Z>, YZ = X, nu(1) = Y + Z."""
    decl = ring(INTEGERS)
    spec = BasisSpec(("1", "X"), ("Y", "Z"), decl)
    alg = universal_algebra(decl, decl.zero(), decl.zero())
    maps = _algebra_maps(alg, spec)
    one = decl.one()

    mu_ae = {("1", e): {(e,): one} for e in ("Y", "Z")}
    mu_ae.update({("X", e): {} for e in ("Y", "Z")})
    maps["mu_AE"] = _linmap(spec, word("AE"), word("E"), mu_ae)
    maps["mu_EA"] = _linmap(spec, word("EA"), word("E"),
                            {(e, a): col for (a, e), col in mu_ae.items()})
    d_ae = {("Y",): {("X", "Y"): one}, ("Z",): {("X", "Z"): one}}
    maps["Delta_AE"] = _linmap(spec, word("E"), word("AE"), d_ae)
    maps["Delta_EA"] = _linmap(spec, word("E"), word("EA"),
                               {t: {(e, a): c for (a, e), c in col.items()}
                                for t, col in d_ae.items()})
    maps["mu_E"] = LinMap.zero(spec, word("EE"), word("E"))
    maps["Delta_E"] = LinMap.zero(spec, word("E"), word("EE"))
    maps["mu_EEA"] = _linmap(spec, word("EE"), word("A"), {
        ("Y", "Z"): {("X",): one}, ("Z", "Y"): {("X",): one},
        ("Y", "Y"): {}, ("Z", "Z"): {},
    })
    maps["Delta_AEE"] = _linmap(spec, word("A"), word("EE"), {
        ("1",): {("Y", "Z"): one, ("Z", "Y"): one}, ("X",): {},
    })
    maps["nu_AE"] = _linmap(spec, word("A"), word("E"),
                            {("1",): {("Y",): one, ("Z",): one}, ("X",): {}})
    maps["nu_EA"] = _linmap(spec, word("E"), word("A"),
                            {("Y",): {("X",): one}, ("Z",): {("X",): one}})
    maps["nu_EE"] = LinMap.zero(spec, word("E"), word("E"))
    return FrobeniusPair(decl, spec, maps, name="aps")


def build_sqrt(alg: FrobeniusAlgebra, xi: dict, name="sqrt") -> FrobeniusPair:
    """Square-root pair: E = A with all structure maps those of A and every
    Mobius map equal to multiplication by xi, where xi^2 must be the handle
    element."""
    xi = {l: (alg.ring.const(c) if isinstance(c, int) else c) for l, c in xi.items()}
    xi_sq = alg.mul_vec(xi, xi)
    phi = alg.handle_vec()
    if xi_sq != phi:
        raise PairError(f"xi^2 != handle element: {_vec_str(xi_sq)} vs {_vec_str(phi)}")
    spec = BasisSpec(alg.labels, alg.labels, alg.ring)
    maps = _algebra_maps(alg, spec)

    mul2 = {(a, b): {(l,): c for l, c in alg.mul_table[(a, b)].items()}
            for a, b in product(alg.labels, alg.labels)}
    for gname, dom, cod in (
        ("mu_AE", word("AE"), word("E")), ("mu_EA", word("EA"), word("E")),
        ("mu_E", word("EE"), word("E")), ("mu_EEA", word("EE"), word("A")),
    ):
        maps[gname] = _linmap(spec, dom, cod, mul2)
    delta2 = {(l,): dict(alg.delta_table[l]) for l in alg.labels}
    for gname, dom, cod in (
        ("Delta_AE", word("E"), word("AE")), ("Delta_EA", word("E"), word("EA")),
        ("Delta_E", word("E"), word("EE")), ("Delta_AEE", word("A"), word("EE")),
    ):
        maps[gname] = _linmap(spec, dom, cod, delta2)

    mult_xi = {(l,): {(m,): c for m, c in alg.mul_vec(xi, {l: alg.ring.one()}).items()}
               for l in alg.labels}
    for gname in ("nu_AE", "nu_EA", "nu_EE"):
        dom, cod = SIGNATURE[gname]
        maps[gname] = _linmap(spec, dom, cod, mult_xi)
    return FrobeniusPair(alg.ring, spec, maps, name=name, unit_label=alg.unit_label)


def build_tt() -> FrobeniusPair:
    """The mod-2 Laurent pair A = E = Z/2[X, l^{+-1}]/(X^2 - l^2 X); Mobius maps
    are multiplication by l, the square root of the handle element l^2."""
    decl = ring(MOD2, "l^-1")
    lam = decl.gen("l")
    alg = universal_algebra(decl, lam * lam, decl.zero())
    pair = build_sqrt(alg, {"1": lam}, name="tt")
    return pair


def build_it(strict_partial=False) -> FrobeniusPair:
    """The virtual-knot near-example over Q[X, t^{+-1}]/(X^2 - t).

    mu_E and Delta_E have no defining formula in this structure; by default
    they are imputed as mu_A and Delta_A so every equation can be evaluated
    (the consistency group is then expected to fail).  With strict_partial=True
    they are omitted and the verifier reports their equations as skipped.
    """
    decl = ring(RATIONALS, "t^-1")
    t = decl.gen("t")
    alg = universal_algebra(decl, decl.zero(), t)
    spec = BasisSpec(alg.labels, alg.labels, decl)
    maps = _algebra_maps(alg, spec)

    phi = alg.handle_vec()  # 2X
    phi_sq = alg.mul_vec(phi, phi)  # 4t, invertible
    inv_scalar = unit_invert(phi_sq[alg.unit_label])
    phi_inv = {l: inv_scalar * c for l, c in phi.items()}

    one = decl.one()
    mul2 = {(a, b): {(l,): c for l, c in alg.mul_table[(a, b)].items()}
            for a, b in product(alg.labels, alg.labels)}
    delta2 = {(l,): dict(alg.delta_table[l]) for l in alg.labels}
    maps["mu_AE"] = _linmap(spec, word("AE"), word("E"), mul2)
    maps["mu_EA"] = _linmap(spec, word("EA"), word("E"), mul2)
    maps["Delta_AE"] = _linmap(spec, word("E"), word("AE"), delta2)
    maps["Delta_EA"] = _linmap(spec, word("E"), word("EA"), delta2)

    def scaled_mul(scale):
        return {(a, b): {(l,): c for l, c in
                         alg.mul_vec(scale, alg.mul_vec({a: one}, {b: one})).items()}
                for a, b in product(alg.labels, alg.labels)}

    maps["mu_EEA"] = _linmap(spec, word("EE"), word("A"), scaled_mul(phi_inv))
    maps["Delta_AEE"] = _linmap(
        spec, word("A"), word("EE"),
        {(l,): dict(alg.delta_vec(alg.mul_vec(phi, {l: one}))) for l in alg.labels})
    maps["nu_AE"] = _linmap(
        spec, word("A"), word("E"),
        {(l,): {(m,): c for m, c in alg.mul_vec(phi, {l: one}).items()} for l in alg.labels})
    ident = {(l,): {(l,): one} for l in alg.labels}
    maps["nu_EA"] = _linmap(spec, word("E"), word("A"), ident)
    maps["nu_EE"] = _linmap(spec, word("E"), word("E"), ident)
    if not strict_partial:
        maps["mu_E"] = _linmap(spec, word("EE"), word("E"), mul2)
        maps["Delta_E"] = _linmap(spec, word("E"), word("EE"), delta2)
    pair = FrobeniusPair(decl, spec, maps, name="it")
    pair.notes["imputed"] = [] if strict_partial else ["mu_E", "Delta_E"]
    return pair


@dataclass
class Rank2Params:
    """Parameters of the rank-2 classification family; all entries ring elements."""

    a: RingElem
    c_yy: RingElem
    c_yz: RingElem
    c_zz: RingElem
    d_yy: RingElem
    d_yz: RingElem
    d_zz: RingElem
    e_y: RingElem
    e_z: RingElem
    f_y: RingElem
    f_z: RingElem

    @staticmethod
    def over(decl: RingDecl, **kw) -> "Rank2Params":
        def coerce(v):
            if isinstance(v, RingElem):
                return v
            if isinstance(v, str):
                return decl.parse(v)
            return decl.const(v)

        return Rank2Params(**{k: coerce(v) for k, v in kw.items()})


def build_rank2(p: Rank2Params) -> FrobeniusPair:
    """The rank-2 family table over A = k[X]/((X-a)^2), E = <Y, Z> with trivial
    mu_E and Delta_E; admissibility is not enforced here (see
    check_rank2_constraints)."""
    decl = p.a.ring
    a = p.a
    h, t = a + a, -(a * a)
    alg = universal_algebra(decl, h, t)
    spec = BasisSpec(("1", "X"), ("Y", "Z"), decl)
    maps = _algebra_maps(alg, spec)
    one = decl.one()

    x_minus_a = {("X",): one, ("1",): -a}  # (X - a) as an A-column

    def a_vec(c):
        return {k: c * v for k, v in x_minus_a.items() if not (c * v).is_zero()}

    mu_ae = {("1", e): {(e,): one} for e in ("Y", "Z")}
    mu_ae.update({("X", e): {(e,): a} for e in ("Y", "Z")})
    maps["mu_AE"] = _linmap(spec, word("AE"), word("E"), mu_ae)
    maps["mu_EA"] = _linmap(spec, word("EA"), word("E"),
                            {(e, x): col for (x, e), col in mu_ae.items()})
    c = {("Y", "Y"): p.c_yy, ("Y", "Z"): p.c_yz, ("Z", "Y"): p.c_yz, ("Z", "Z"): p.c_zz}
    maps["mu_EEA"] = _linmap(spec, word("EE"), word("A"),
                             {k: a_vec(v) for k, v in c.items()})
    d_ae = {(e,): {("X", e): one, ("1", e): -a} for e in ("Y", "Z")}
    maps["Delta_AE"] = _linmap(spec, word("E"), word("AE"), d_ae)
    maps["Delta_EA"] = _linmap(spec, word("E"), word("EA"),
                               {k: {(e, x): v for (x, e), v in col.items()}
                                for k, col in d_ae.items()})
    d1 = {("Y", "Y"): p.d_yy, ("Y", "Z"): p.d_yz, ("Z", "Y"): p.d_yz, ("Z", "Z"): p.d_zz}
    maps["Delta_AEE"] = _linmap(spec, word("A"), word("EE"), {
        ("1",): d1, ("X",): {k: a * v for k, v in d1.items()},
    })
    maps["mu_E"] = LinMap.zero(spec, word("EE"), word("E"))
    maps["Delta_E"] = LinMap.zero(spec, word("E"), word("EE"))
    nu1 = {("Y",): p.f_y, ("Z",): p.f_z}
    maps["nu_AE"] = _linmap(spec, word("A"), word("E"), {
        ("1",): nu1, ("X",): {k: a * v for k, v in nu1.items()},
    })
    maps["nu_EA"] = _linmap(spec, word("E"), word("A"),
                            {("Y",): a_vec(p.e_y), ("Z",): a_vec(p.e_z)})
    maps["nu_EE"] = LinMap.zero(spec, word("E"), word("E"))
    pair = FrobeniusPair(decl, spec, maps, name="rank2")
    pair.notes["rank2_family"] = (
        "nu_EA(Y) uses e_Y(X-a), not e_Y(X-t); admissibility constraints are"
        " checked as exact base-ring equalities"
    )
    return pair


#: violated-constraint identifiers, in reporting order
RANK2_CONSTRAINTS = ("C*f = e", "D*e = f", "e*f = 2", "c*d = 2")


def check_rank2_constraints(p: Rank2Params) -> list:
    """Exact base-ring checks of the four admissibility families.

    D*e = f is the dagger partner of C*f = e: it is forced by the Mobius
    coaction row mob_r4 on the rank-2 table, so the verifier and this checker
    agree exactly.
    """
    two = p.a.ring.const(2)
    violated = []
    if not (p.c_yy * p.f_y + p.c_yz * p.f_z == p.e_y
            and p.c_yz * p.f_y + p.c_zz * p.f_z == p.e_z):
        violated.append("C*f = e")
    if not (p.d_yy * p.e_y + p.d_yz * p.e_z == p.f_y
            and p.d_yz * p.e_y + p.d_zz * p.e_z == p.f_z):
        violated.append("D*e = f")
    if p.e_y * p.f_y + p.e_z * p.f_z != two:
        violated.append("e*f = 2")
    if p.c_yy * p.d_yy + two * p.c_yz * p.d_yz + p.c_zz * p.d_zz != two:
        violated.append("c*d = 2")
    return violated


def lemma_first_conditions(a0, a1, b0, b1, h, t) -> list:
    """Residuals obstructing the X-action XY = a0 Y + a1 Z, XZ = b0 Y + b1 Z:
    all four vanish iff X(XY) = X^2 Y and X(XZ) = X^2 Z."""
    return [
        a0 * a0 + a1 * b0 - a0 * h - t,
        (a0 + b1 - h) * a1,
        a1 * b0 + b1 * b1 - h * b1 - t,
        (a0 + b1 - h) * b0,
    ]


def build_laurent_sqrt() -> FrobeniusPair:
    """The Laurent square-root pair: k = Z[a^{+-1}, b^{+-1}] with
    h = -2b^{-1}(a - b^{-1}), t = -b^{-2}(a^2 + h), xi = a + bX; the identity
    xi^2 = 2X - h holds symbolically, so the xi^2 = handle check passes."""
    decl = ring(INTEGERS, "a^-1", "b^-1")
    a, b = decl.gen("a"), decl.gen("b")
    b1, b2 = decl.gen("b", -1), decl.gen("b", -2)
    h = decl.const(-2) * b1 * (a - b1)
    t = -b2 * (a * a + h)
    alg = universal_algebra(decl, h, t)
    return build_sqrt(alg, {"1": a, "X": b}, name="laurent-sqrt")


DOUBLE_EXPONENTS = (-1, -2, -2, 1, -1, 0)


def build_double(alg: FrobeniusAlgebra, phi_inv: dict, exponents=DOUBLE_EXPONENTS,
                 name="double") -> FrobeniusPair:
    """Double-tensor pair: E = A&A with merge-then-resplit structure maps
    scaled by powers of the handle element; comultiplications carry none."""
    e0, e1, e2, n0, n1, n2 = exponents
    phi = alg.handle_vec()
    phi_inv = {l: (alg.ring.const(c) if isinstance(c, int) else c)
               for l, c in phi_inv.items()}
    if alg.mul_vec(phi, phi_inv) != alg.unit_vec():
        raise PairError("phi_inv is not an inverse of the handle element")

    labels = alg.labels
    e_labels = tuple(f"{l1}|{l2}" for l1, l2 in product(labels, labels))
    pairs = {f"{l1}|{l2}": (l1, l2) for l1, l2 in product(labels, labels)}
    spec = BasisSpec(labels, e_labels, alg.ring)
    maps = _algebra_maps(alg, spec)
    one = alg.ring.one()

    def phipow(k):
        return alg.power_vec(phi, k, phi_inv)

    def basis(l):
        return {l: one}

    def to_e(vec2):
        # dict (l1,l2)->c over A&A  ->  dict (E-label,)->c
        return {(f"{l1}|{l2}",): c for (l1, l2), c in vec2.items()}

    def to_ee(vec_a):
        # Delta_AEE-style: (|t|)(Delta & Delta)Delta over a vector in A
        out = {}
        for (l1, l2), c in alg.delta_vec(vec_a).items():
            for (m1, m2), c1 in alg.delta_table[l1].items():
                for (m3, m4), c2 in alg.delta_table[l2].items():
                    key = (f"{m1}|{m3}", f"{m2}|{m4}")  # middle transposition
                    s = out.get(key, alg.ring.zero()) + c * c1 * c2
                    out[key] = s
        return {k: c for k, c in out.items() if not c.is_zero()}

    mu_ae = {}
    for a_lab in labels:
        for e_lab in e_labels:
            x, y = pairs[e_lab]
            prod_vec = alg.mul_vec(phipow(e0),
                                   alg.mul_vec(basis(a_lab), alg.mul_vec(basis(x), basis(y))))
            mu_ae[(a_lab, e_lab)] = to_e(alg.delta_vec(prod_vec))
    maps["mu_AE"] = _linmap(spec, word("AE"), word("E"), mu_ae)
    maps["mu_EA"] = _linmap(spec, word("EA"), word("E"),
                            {(e, a): col for (a, e), col in mu_ae.items()})

    d_ae = {}
    for e_lab in e_labels:
        x, y = pairs[e_lab]
        m = alg.mul_vec(basis(x), basis(y))
        col = {}
        for (l1, l2), c in alg.delta_vec(m).items():
            for (m1, m2), c2 in alg.delta_table[l2].items():
                key = (l1, f"{m1}|{m2}")
                col[key] = col.get(key, alg.ring.zero()) + c * c2
        d_ae[(e_lab,)] = {k: c for k, c in col.items() if not c.is_zero()}
    maps["Delta_AE"] = _linmap(spec, word("E"), word("AE"), d_ae)
    maps["Delta_EA"] = _linmap(spec, word("E"), word("EA"),
                               {k: {(e, a): c for (a, e), c in col.items()}
                                for k, col in d_ae.items()})

    mu_eea, mu_e = {}, {}
    for ea in e_labels:
        for eb in e_labels:
            x, y = pairs[ea]
            z, w = pairs[eb]
            q = alg.mul_vec(alg.mul_vec(basis(x), basis(y)),
                            alg.mul_vec(basis(z), basis(w)))
            mu_eea[(ea, eb)] = {(l,): c for l, c in alg.mul_vec(phipow(e1), q).items()}
            mu_e[(ea, eb)] = to_e(alg.delta_vec(alg.mul_vec(phipow(e2), q)))
    maps["mu_EEA"] = _linmap(spec, word("EE"), word("A"), mu_eea)
    maps["mu_E"] = _linmap(spec, word("EE"), word("E"), mu_e)

    maps["Delta_AEE"] = _linmap(spec, word("A"), word("EE"),
                                {(l,): to_ee(basis(l)) for l in labels})
    maps["Delta_E"] = _linmap(
        spec, word("E"), word("EE"),
        {(e,): to_ee(alg.mul_vec(basis(pairs[e][0]), basis(pairs[e][1])))
         for e in e_labels})

    maps["nu_AE"] = _linmap(
        spec, word("A"), word("E"),
        {(l,): to_e(alg.delta_vec(alg.mul_vec(phipow(n0), basis(l)))) for l in labels})
    maps["nu_EA"] = _linmap(
        spec, word("E"), word("A"),
        {(e,): {(l,): c for l, c in
                alg.mul_vec(phipow(n1),
                            alg.mul_vec(basis(pairs[e][0]), basis(pairs[e][1]))).items()}
         for e in e_labels})
    maps["nu_EE"] = _linmap(
        spec, word("E"), word("E"),
        {(e,): to_e(alg.delta_vec(
            alg.mul_vec(phipow(n2),
                        alg.mul_vec(basis(pairs[e][0]), basis(pairs[e][1])))))
         for e in e_labels})
    pair = FrobeniusPair(alg.ring, spec, maps, name=name, unit_label=alg.unit_label)
    pair.notes["exponents"] = list(exponents)
    return pair


#: the exponent-sensitive battery that the double construction can satisfy;
#: jointly it pins the canonical tuple uniquely (see search_double_exponents)
DOUBLE_SEARCH_EQUATIONS = (
    "mob_ee_handle",     # fixes e1
    "mob_nu_roundtrip",  # fixes n0 + n1
    "mod_assoc",         # fixes e0
    "cons_3",            # fixes e2 - e0
    "cons_1",            # consistency across e0, e1, e2
    "q_nuEE_square",     # fixes n2 given e2
    "q_dup_l5",          # fixes n0 given e0, e2, n2
)

_EXPONENT_OF_GEN = {"mu_AE": 0, "mu_EEA": 1, "mu_E": 2, "nu_AE": 3, "nu_EA": 4, "nu_EE": 5}


def search_double_exponents(alg: FrobeniusAlgebra, phi_inv: dict, lo=-3, hi=3) -> list:
    """Exhaustively verify every exponent tuple in [lo, hi]^6 against the
    battery and return the passing tuples, sorted.

    Each battery row only depends on the exponents of the generators it
    mentions, so verdicts are memoized on that projection; every tuple in the
    box is still checked.
    """
    by_name = {e.name: e for e in load_axioms()}
    battery = [by_name[n] for n in DOUBLE_SEARCH_EQUATIONS]
    deps = []
    for eq in battery:
        deps.append(tuple(sorted({_EXPONENT_OF_GEN[g] for g in eq.generators()
                                  if g in _EXPONENT_OF_GEN})))

    pair_cache = {}

    def pair_for(exps):
        if exps not in pair_cache:
            pair_cache[exps] = build_double(alg, phi_inv, exps)
        return pair_cache[exps]

    verdicts = [dict() for _ in battery]

    def row_passes(i, exps):
        key = tuple(exps[j] for j in deps[i])
        hit = verdicts[i].get(key)
        if hit is None:
            pair = pair_for(exps)
            table = pair.generator_table()
            lhs = evaluate_term(battery[i].lhs, table, pair.spec)
            rhs = evaluate_term(battery[i].rhs, table, pair.spec)
            hit = equal(lhs, rhs)[0]
            verdicts[i][key] = hit
        return hit

    passing = []
    span = range(lo, hi + 1)
    for exps in product(span, repeat=6):
        if all(row_passes(i, exps) for i in range(len(battery))):
            passing.append(exps)
    return sorted(passing)


# -- serialization ----------------------------------------------------------------


def save_pair(pair: FrobeniusPair, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(pair_to_json(pair))


def pair_to_json(pair: FrobeniusPair) -> str:
    """Canonical text form; field order and entry order are fixed."""
    obj = {
        "ring": {
            "domain": pair.ring.domain,
            "vars": [{"name": v.name, "invertible": v.invertible} for v in pair.ring.vars],
        },
        "basis": {"A": list(pair.spec.basis_a), "E": list(pair.spec.basis_e)},
        "maps": {},
        "meta": {"name": pair.name, "unit": pair.unit_label,
                 "notes": {k: pair.notes[k] for k in sorted(pair.notes)}},
    }
    for gname in sorted(pair.maps):
        m = pair.maps[gname]
        rows = []
        for t in pair.spec.tuples(m.dom):
            col = m.column(t)
            if not col:
                continue
            rows.append({
                "in": list(t),
                "out": [{"basis": list(o), "coeff": str(col[o])} for o in sorted(col)],
            })
        obj["maps"][gname] = rows
    return json.dumps(obj, indent=2) + "\n"


def load_pair(path) -> FrobeniusPair:
    with open(path, encoding="utf-8") as fh:
        return pair_from_json(fh.read())


def pair_from_json(text) -> FrobeniusPair:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PairError(f"not a structure file: {exc}") from None

    def need(d, key, path):
        if key not in d:
            raise PairError(f"missing field {path}.{key}")
        return d[key]

    ring_obj = need(obj, "ring", "$")
    domain = need(ring_obj, "domain", "$.ring")
    var_decls = []
    for i, v in enumerate(ring_obj.get("vars", [])):
        var_decls.append(VarDecl(need(v, "name", f"$.ring.vars[{i}]"),
                                 bool(v.get("invertible", False))))
    try:
        decl = RingDecl(domain, tuple(var_decls))
    except RingError as exc:
        raise PairError(f"$.ring: {exc}") from None

    basis = need(obj, "basis", "$")
    spec = BasisSpec(tuple(need(basis, "A", "$.basis")), tuple(need(basis, "E", "$.basis")), decl)
    label_ok = {"A": set(spec.basis_a), "E": set(spec.basis_e)}

    maps = {}
    for gname, rows in need(obj, "maps", "$").items():
        if gname not in SIGNATURE:
            raise PairError(f"$.maps: unknown map name {gname}")
        dom, cod = SIGNATURE[gname]
        entries = {}
        for i, row in enumerate(rows):
            path = f"$.maps.{gname}[{i}]"
            t = tuple(need(row, "in", path))
            if len(t) != len(dom) or any(lab not in label_ok[s] for lab, s in zip(t, dom)):
                raise PairError(f"signature mismatch for {gname}: bad input tuple {t}")
            for j, term in enumerate(need(row, "out", path)):
                o = tuple(need(term, "basis", f"{path}.out[{j}]"))
                if len(o) != len(cod) or any(lab not in label_ok[s] for lab, s in zip(o, cod)):
                    raise PairError(f"signature mismatch for {gname}: bad output tuple {o}")
                try:
                    c = decl.parse(need(term, "coeff", f"{path}.out[{j}]"))
                except RingError as exc:
                    raise PairError(f"{path}.out[{j}].coeff: {exc}") from None
                if not c.is_zero():
                    entries[(o, t)] = entries.get((o, t), decl.zero()) + c
        maps[gname] = LinMap(spec, dom, cod, entries)

    meta = obj.get("meta", {})
    return FrobeniusPair(decl, spec, maps, name=meta.get("name", "pair"),
                         unit_label=meta.get("unit", spec.basis_a[0]),
                         notes=dict(meta.get("notes", {})))


BUILTIN_PAIRS = {
    "aps": build_aps,
    "tt": build_tt,
    "it": build_it,
    "sqrt": build_laurent_sqrt,
}
