import random
from fractions import Fraction

import pytest

from frobpair.ring import (
    INTEGERS,
    MOD2,
    RATIONALS,
    RingError,
    parse_ring_elem,
    ring,
    ring_add,
    ring_mul,
    ring_neg,
    specialize,
    unit_invert,
)

ZH = ring(INTEGERS, "h", "t")
ZL = ring(INTEGERS, "l^-1")
Q = ring(RATIONALS)
Z2L = ring(MOD2, "X", "l^-1")


def schoolbook_mul(pairs1, pairs2, decl):
    """Independent oracle: expand term-by-term from (coeff, {var: exp}) lists."""
    out = decl.zero()
    for c1, m1 in pairs1:
        for c2, m2 in pairs2:
            term = decl.const(c1 * c2)
            for v, e in m1.items():
                term = term * decl.gen(v, e)
            for v, e in m2.items():
                term = term * decl.gen(v, e)
            out = out + term
    return out


def test_unit_times_inverse():
    l = ZL.gen("l")
    assert l * ZL.gen("l", -1) == ZL.one()


def test_additive_inverse():
    x = ZH.parse("3*h^2 - t + 7")
    assert (x + ring_neg(x)).is_zero()


def test_mul_matches_schoolbook_oracle():
    # (h+2)*(h-2) expanded by hand: h^2 - 4
    expected = schoolbook_mul([(1, {"h": 1}), (2, {})], [(1, {"h": 1}), (-2, {})], ZH)
    got = ring_mul(ZH.parse("h+2"), ZH.parse("h-2"))
    assert got == expected
    assert got == ZH.parse("h^2 - 4")


def test_parse_unknown_variable():
    with pytest.raises(RingError, match="unknown variable X"):
        ZH.parse("2*X - h")


def test_parse_laurent_echo():
    e = ZL.parse("l^-1 + l")
    assert len(e.terms) == 2
    assert str(e) == "l + l^-1" or str(e) == "l^-1 + l"


def test_parse_product_normalizes():
    assert ZH.parse("(h+2)*(h-2)") == ZH.parse("h^2-4")


def test_parse_negative_exponent_rejected():
    with pytest.raises(RingError, match="non-invertible"):
        ZH.parse("h^-1")


def test_parse_syntax_error_has_position():
    with pytest.raises(RingError, match="position"):
        ZH.parse("h + + t")


def test_specialize_examples():
    h = ZH.gen("h")
    assert specialize(h, {"h": 0}).is_zero()
    assert specialize(ZH.parse("h^2+4*t"), {"h": 0, "t": 1}) == ZH.const(4)
    assert specialize(ZL.gen("l", -1), {"l": 1}) == ZL.one()


def test_specialize_requires_unit_for_invertible():
    with pytest.raises(RingError, match="non-unit"):
        specialize(ZL.gen("l"), {"l": 0})


def test_specialize_noop_is_identity():
    x = ZH.parse("h^2*t - 3*h + 1")
    assert specialize(x, {}) == x


def test_unit_invert():
    l2 = ZL.parse("l^2")
    assert unit_invert(l2) == ZL.gen("l", -2)
    assert unit_invert(Q.const(4)) == Q.const(Fraction(1, 4))
    with pytest.raises(RingError, match="not a unit"):
        unit_invert(ZH.parse("h+1"))


def test_mod2_folding():
    x = Z2L.parse("X + X")
    assert x.is_zero()
    assert Z2L.parse("3*X") == Z2L.gen("X")
    # -x == x in characteristic 2
    assert -Z2L.gen("X") == Z2L.gen("X")


def random_elem(rng, decl, size=4):
    e = decl.zero()
    for _ in range(rng.randrange(size + 1)):
        term = decl.const(rng.randint(-4, 4))
        for v in decl.vars:
            exp = rng.randint(-2, 2) if v.invertible else rng.randint(0, 2)
            if exp:
                term = term * decl.gen(v.name, exp)
        e = e + term
    return e


@pytest.mark.parametrize("decl", [ZH, ZL, Q, Z2L])
def test_ring_axioms_on_random_triples(decl):
    rng = random.Random(20240809)
    for _ in range(1000):
        x, y, z = (random_elem(rng, decl) for _ in range(3))
        assert (x + y) + z == x + (y + z)
        assert x + y == y + x
        assert (x * y) * z == x * (y * z)
        assert x * y == y * x
        assert x * (y + z) == x * y + x * z


@pytest.mark.parametrize("decl", [ZH, ZL, Z2L])
def test_parse_print_roundtrip(decl):
    rng = random.Random(7)
    for _ in range(300):
        x = random_elem(rng, decl, size=5)
        assert decl.parse(str(x)) == x


def random_expression(rng, decl, depth):
    if depth == 0:
        leaves = [str(rng.randint(0, 9))]
        for v in decl.vars:
            leaves.append(v.name)
            leaves.append(f"{v.name}^{rng.randint(2, 3)}")
            if v.invertible:
                leaves.append(f"{v.name}^-{rng.randint(1, 2)}")
        return rng.choice(leaves)
    a = random_expression(rng, decl, depth - 1)
    b = random_expression(rng, decl, depth - 1)
    return rng.choice([f"({a}) + ({b})", f"({a}) - ({b})", f"({a}) * ({b})", f"-({a})"])


@pytest.mark.parametrize("decl", [ZH, ZL, Z2L])
def test_random_expression_trees_normalize(decl):
    rng = random.Random(41)
    for _ in range(150):
        text = random_expression(rng, decl, rng.randint(1, 3))
        x = decl.parse(text)
        assert decl.parse(str(x)) == x


def test_specialize_is_homomorphism():
    rng = random.Random(99)
    for _ in range(200):
        x = random_elem(rng, ZH)
        y = random_elem(rng, ZH)
        assignment = {"h": ZH.parse("t+1"), "t": ZH.const(rng.randint(-3, 3))}
        assert specialize(x * y, assignment) == specialize(x, assignment) * specialize(y, assignment)
        assert specialize(ring_add(x, y), assignment) == ring_add(
            specialize(x, assignment), specialize(y, assignment)
        )


def test_ring_mismatch():
    with pytest.raises(RingError, match="ring mismatch"):
        ring_add(ZH.gen("h"), ZL.gen("l"))


def test_str_is_reparseable_rationals():
    decl = ring(RATIONALS, "t^-1")
    e = decl.parse("1/2*t - 3 + t^-2")
    assert decl.parse(str(e)) == e
