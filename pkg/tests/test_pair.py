import random
from fractions import Fraction

import pytest

from frobpair.pair import (
    BUILTIN_PAIRS,
    DOUBLE_EXPONENTS,
    DOUBLE_SEARCH_EQUATIONS,
    FrobeniusPair,
    PairError,
    Rank2Params,
    build_aps,
    build_double,
    build_it,
    build_laurent_sqrt,
    build_rank2,
    build_sqrt,
    build_tt,
    check_rank2_constraints,
    handle_element,
    lemma_first_conditions,
    load_pair,
    pair_from_json,
    pair_to_json,
    save_pair,
    search_double_exponents,
    universal_algebra,
    verify,
    _algebra_maps,
)
from frobpair.ring import INTEGERS, MOD2, RATIONALS, ring
from frobpair.tensor import BasisSpec, apply, equal, word
from frobpair.theory import evaluate_term, load_axioms, parse_term

Z = ring(INTEGERS)
APS_PARAMS = dict(a=0, c_yy=0, c_yz=1, c_zz=0, d_yy=0, d_yz=1, d_zz=0,
                  e_y=1, e_z=1, f_y=1, f_z=1)


def universal_pair():
    decl = ring(INTEGERS, "h", "t")
    alg = universal_algebra(decl, decl.gen("h"), decl.gen("t"))
    spec = BasisSpec(("1", "X"), ("1", "X"), decl)
    return FrobeniusPair(decl, spec, _algebra_maps(alg, spec), name="universal")


# -- handle element -------------------------------------------------------------


def test_handle_universal_is_2x_minus_h():
    pair = universal_pair()
    decl = pair.ring
    assert handle_element(pair) == {("X",): decl.const(2), ("1",): -decl.gen("h")}


def test_handle_aps():
    assert handle_element(build_aps()) == {("X",): Z.const(2)}


def test_handle_tt_is_lambda_squared():
    tt = build_tt()
    assert handle_element(tt) == {("1",): tt.ring.parse("l^2")}


# -- APS --------------------------------------------------------------------------


def test_aps_table_examples():
    aps = build_aps()
    one = Z.one()
    assert apply(aps.maps["mu_EEA"], {("Y", "Z"): one}) == {("X",): one}
    assert apply(aps.maps["Delta_AE"], {("Y",): one}) == {("X", "Y"): one}
    assert apply(aps.maps["nu_AE"], {("1",): one}) == {("Y",): one, ("Z",): one}
    assert apply(aps.maps["mu_AE"], {("1", "Y"): one}) == {("Y",): one}
    assert apply(aps.maps["mu_AE"], {("X", "Y"): one}) == {}


def test_aps_passes_complete_suite():
    report = verify(build_aps())
    assert report.ok()
    assert not report.failures(include_quarantine=True)


def test_aps_nu_roundtrip_value():
    aps = build_aps()
    m = aps.evaluate(parse_term("nu_AE ; nu_EA"))
    assert m.column(("1",)) == {("X",): Z.const(2)}


# -- TT ---------------------------------------------------------------------------


def test_tt_passes_complete_suite():
    report = verify(build_tt())
    assert report.ok()
    assert not report.failures(include_quarantine=True)


def test_tt_table_examples():
    tt = build_tt()
    one = tt.ring.one()
    lam = tt.ring.gen("l")
    assert apply(tt.maps["mu_A"], {("X", "X"): one}) == {("X",): lam * lam}
    assert apply(tt.maps["nu_EE"], {("X",): one}) == {("X",): lam}


def test_tt_equals_sqrt_construction():
    tt = build_tt()
    lam = tt.ring.gen("l")
    alg = universal_algebra(tt.ring, lam * lam, tt.ring.zero())
    again = build_sqrt(alg, {"1": lam})
    assert set(tt.maps) == set(again.maps)
    for name in tt.maps:
        assert equal(tt.maps[name], again.maps[name])[0], name


# -- sqrt -------------------------------------------------------------------------


def test_sqrt_rejects_wrong_xi():
    decl = ring(INTEGERS, "h", "t")
    alg = universal_algebra(decl, decl.gen("h"), decl.gen("t"))
    with pytest.raises(PairError, match="xi\\^2 != handle"):
        build_sqrt(alg, {"1": 1})


def test_sqrt_nuee_square_is_mu_delta():
    # (nu_EE)^2 = mu_E Delta_E as LinMaps, on sqrt outputs
    for pair in (build_tt(), build_laurent_sqrt()):
        lhs = pair.evaluate(parse_term("nu_EE ; nu_EE"))
        rhs = pair.evaluate(parse_term("Delta_E ; mu_E"))
        assert equal(lhs, rhs)[0]


def test_laurent_sqrt_symbolic_identity():
    # xi^2 = 2X - h in normal form, i.e. mul(xi, xi) == handle element
    decl = ring(INTEGERS, "a^-1", "b^-1")
    a, b = decl.gen("a"), decl.gen("b")
    h = decl.const(-2) * decl.gen("b", -1) * (a - decl.gen("b", -1))
    t = -decl.gen("b", -2) * (a * a + h)
    alg = universal_algebra(decl, h, t)
    xi = {"1": a, "X": b}
    assert alg.mul_vec(xi, xi) == alg.handle_vec()
    # and the handle element is 2X - h
    assert alg.handle_vec() == {"X": decl.const(2), "1": -h}


def test_laurent_sqrt_specialization_example():
    # a=1, b=1: h=0, t=-1, xi=1+X, xi^2 = 1+2X+X^2 = 2X
    decl = ring(INTEGERS)
    alg = universal_algebra(decl, decl.zero(), decl.const(-1))
    xi = {"1": decl.one(), "X": decl.one()}
    assert alg.mul_vec(xi, xi) == {"X": decl.const(2)}


def test_laurent_sqrt_passes_suite():
    report = verify(build_laurent_sqrt())
    assert report.ok()
    assert not report.failures(include_quarantine=True)


# -- IT ---------------------------------------------------------------------------


def test_it_table_examples():
    it = build_it()
    one = it.ring.one()
    # mu_EEA(X&X) = phi^{-1} * t = X/2
    assert apply(it.maps["mu_EEA"], {("X", "X"): one}) == {("X",): it.ring.const(Fraction(1, 2))}
    assert apply(it.maps["nu_AE"], {("1",): one}) == {("X",): it.ring.const(2)}


def test_it_fails_exactly_in_consistency_plus_quarantine():
    report = verify(build_it())
    scored = sorted(r.name for r in report.failures())
    assert scored == ["cons_1"]
    assert all(r.group == "consistency" for r in report.failures())
    quarantined = sorted(r.name for r in report.failures(True) if r.group == "quarantine")
    assert quarantined == ["q_dup_l5", "q_l6", "q_nuEE_square"]


def test_it_strict_partial_skips():
    report = verify(build_it(strict_partial=True))
    assert report.ok()
    skipped = {r.name for r in report.records if r.status == "skip"}
    assert "cons_1" in skipped and "me_assoc" in skipped
    for r in report.records:
        if r.status == "skip":
            assert set(r.missing) <= {"mu_E", "Delta_E"}


# -- rank 2 ------------------------------------------------------------------------


def test_rank2_aps_parameters_reproduce_aps():
    pair = build_rank2(Rank2Params.over(Z, **APS_PARAMS))
    aps = build_aps()
    assert set(pair.maps) == set(aps.maps)
    for name in aps.maps:
        assert equal(pair.maps[name], aps.maps[name])[0], name


def test_rank2_table_examples():
    decl = ring(INTEGERS, "a")
    a = decl.gen("a")
    params = {k: decl.const(v) for k, v in APS_PARAMS.items()}
    params["a"] = a
    pair = build_rank2(Rank2Params(**params))
    one = decl.one()
    assert apply(pair.maps["mu_AE"], {("X", "Y"): one}) == {("Y",): a}
    # nu_EA(Y) = e_Y (X - a) with e_Y = 1
    assert apply(pair.maps["nu_EA"], {("Y",): one}) == {("X",): one, ("1",): -a}


def test_rank2_handle_is_2_x_minus_a():
    decl = ring(INTEGERS, "a")
    params = {k: decl.const(v) for k, v in APS_PARAMS.items()}
    params["a"] = decl.gen("a")
    pair = build_rank2(Rank2Params(**params))
    two = decl.const(2)
    assert handle_element(pair) == {("X",): two, ("1",): -two * decl.gen("a")}


def test_rank2_constraint_examples():
    assert check_rank2_constraints(Rank2Params.over(Z, **APS_PARAMS)) == []
    bad = dict(APS_PARAMS, e_y=1, e_z=0, f_y=1, f_z=0)
    violated = check_rank2_constraints(Rank2Params.over(Z, **bad))
    assert "C*f = e" in violated and "e*f = 2" in violated
    zero = {k: 0 for k in APS_PARAMS}
    assert "e*f = 2" in check_rank2_constraints(Rank2Params.over(Z, **zero))


def test_rank2_paper_gap_case():
    # satisfies the other three families but not D*e = f; the verifier
    # fails it on exactly the Mobius coaction row
    p = Rank2Params.over(Z, **dict(APS_PARAMS, d_yy=5))
    assert check_rank2_constraints(p) == ["D*e = f"]
    report = verify(build_rank2(p))
    assert sorted(r.name for r in report.failures()) == ["mob_r4"]


def admissible_samples(decl):
    samples = []
    for a in (-2, -1, 0, 1, 2):
        for s in (1, -1):
            samples.append(dict(a=a, c_yy=0, c_yz=1, c_zz=0, d_yy=0, d_yz=1, d_zz=0,
                                e_y=s, e_z=s, f_y=s, f_z=s))
        samples.append(dict(a=a, c_yy=1, c_yz=0, c_zz=1, d_yy=1, d_yz=0, d_zz=1,
                            e_y=1, e_z=1, f_y=1, f_z=1))
    return [Rank2Params.over(decl, **kw) for kw in samples]


def test_rank2_equivalence_small_sweep():
    rng = random.Random(1234)
    eqs = load_axioms()
    for _ in range(60):
        kw = dict(a=rng.randint(-2, 2),
                  **{k: rng.randint(-3, 3) for k in
                     ("c_yy", "c_yz", "c_zz", "d_yy", "d_yz", "d_zz", "e_y", "e_z", "f_y", "f_z")})
        p = Rank2Params.over(Z, **kw)
        assert verify(build_rank2(p), eqs).ok() == (not check_rank2_constraints(p))
    for p in admissible_samples(Z):
        assert not check_rank2_constraints(p)
        report = verify(build_rank2(p), eqs)
        assert report.ok()
        # derived rows are consequences for every admissible pair
        assert all(r.status == "pass" for r in report.records if r.group == "derived")


# -- action residuals --------------------------------------------------------------


def test_lemma_residuals_symbolic():
    decl = ring(INTEGERS, "a")
    a = decl.gen("a")
    res = lemma_first_conditions(a, decl.zero(), decl.zero(), a, a + a, -(a * a))
    assert all(r.is_zero() for r in res)


def test_lemma_residuals_examples():
    z = Z.zero()
    res = lemma_first_conditions(z, z, z, z, Z.zero(), Z.one())
    assert res[0] == Z.const(-1) and not res[0].is_zero()
    decl = ring(INTEGERS, "a0", "h", "t")
    a0, h, t = decl.gen("a0"), decl.gen("h"), decl.gen("t")
    res = lemma_first_conditions(a0, decl.zero(), decl.zero(), a0, h, t)
    target = a0 * a0 - a0 * h - t
    assert res == [target, decl.zero(), target, decl.zero()]


# -- double tensor ------------------------------------------------------------------


def q_double_algebra():
    decl = ring(RATIONALS)
    alg = universal_algebra(decl, decl.zero(), decl.one())
    return alg, {"X": decl.const(Fraction(1, 2))}


def test_double_rejects_bad_inverse():
    alg, _ = q_double_algebra()
    with pytest.raises(PairError, match="not an inverse"):
        build_double(alg, {"X": alg.ring.one()})


def test_double_delta_aee_example():
    # Delta_AEE(1) = (Delta & Delta) Delta(1) reassociated; expanding
    # Delta(1) = 1&X + X&1 by hand gives eight distinct 4-tensors for h=0, t=1
    alg, phi_inv = q_double_algebra()
    pair = build_double(alg, phi_inv)
    col = pair.maps["Delta_AEE"].column(("1",))
    expected = set()
    for a, b in (("1", "X"), ("X", "1")):
        for m1, m2 in alg.delta_table[a]:
            for m3, m4 in alg.delta_table[b]:
                expected.add((f"{m1}|{m3}", f"{m2}|{m4}"))
    assert set(col) == expected
    assert len(col) == 8


def test_double_battery_at_canonical_exponents():
    alg, phi_inv = q_double_algebra()
    pair = build_double(alg, phi_inv, DOUBLE_EXPONENTS)
    table = pair.generator_table()
    by_name = {e.name: e for e in load_axioms()}
    for name in DOUBLE_SEARCH_EQUATIONS:
        eq = by_name[name]
        lhs = evaluate_term(eq.lhs, table, pair.spec)
        rhs = evaluate_term(eq.rhs, table, pair.spec)
        assert equal(lhs, rhs)[0], name


def test_double_zero_exponents_fail():
    alg, phi_inv = q_double_algebra()
    pair = build_double(alg, phi_inv, (0, 0, 0, 0, 0, 0))
    assert not verify(pair).ok()


def test_double_known_defects_are_reproduced():
    # The double construction cannot satisfy the unit or cancel rows over
    # an algebra with invertible handle != 1 (see decisions ledger).
    alg, phi_inv = q_double_algebra()
    pair = build_double(alg, phi_inv, DOUBLE_EXPONENTS)
    failing = {r.name for r in verify(pair).failures()}
    assert {"mod_unit", "comod_counit", "cancel_action", "cons_2"} <= failing


def test_double_over_unit_handle_algebra_passes_all_but_units():
    decl = ring(MOD2)
    alg = universal_algebra(decl, decl.one(), decl.zero())  # Z/2[X]/(X^2 - X), phi = 1
    pair = build_double(alg, {"1": decl.one()}, name="double-z2")
    failing = sorted(r.name for r in verify(pair).failures(include_quarantine=True))
    assert failing == ["comod_counit", "mod_unit"]


def test_double_over_noninvertible_phi_diamond_defect_is_stable():
    # regression pin for the double construction's phi imbalance: over an
    # algebra whose handle element is not 1, specific exchange labelings fail
    from frobpair.cobordism import diamond_exchange_suite

    alg, phi_inv = q_double_algebra()
    pair = build_double(alg, phi_inv, DOUBLE_EXPONENTS)
    report = diamond_exchange_suite(pair)
    failing_cases = {r.name.split("[")[0] for r in report.failures()}
    assert failing_cases  # the defect is real
    assert "case02_one_circle_nested" in failing_cases


def test_search_small_boxes():
    alg, phi_inv = q_double_algebra()
    assert search_double_exponents(alg, phi_inv, 0, 0) == []
    assert search_double_exponents(alg, phi_inv, -2, 1) == [DOUBLE_EXPONENTS]


# -- beta nondegeneracy ---------------------------------------------------------------


@pytest.mark.parametrize("builder", [build_aps, build_tt, build_it, build_laurent_sqrt])
def test_beta_gram_matrix_has_unit_determinant(builder):
    pair = builder()
    beta = pair.generator_table()["beta"]
    labels = pair.spec.basis_a
    gram = [[beta.column((i, j)).get((), pair.ring.zero()) for j in labels] for i in labels]
    det = gram[0][0] * gram[1][1] - gram[0][1] * gram[1][0]
    assert det.is_unit()


def test_eta_unit_coefficient_enforced():
    aps = build_aps()
    bad = dict(aps.maps)
    bad["eta"] = bad["eta"].scale(2)
    with pytest.raises(PairError, match="unit label"):
        FrobeniusPair(aps.ring, aps.spec, bad)


# -- serialization ---------------------------------------------------------------------


def test_save_load_roundtrip(tmp_path):
    for builder in (build_aps, build_tt, build_it, build_laurent_sqrt):
        pair = builder()
        path = tmp_path / f"{pair.name}.json"
        save_pair(pair, path)
        loaded = load_pair(path)
        assert loaded.ring == pair.ring
        assert loaded.spec == pair.spec
        assert set(loaded.maps) == set(pair.maps)
        for name in pair.maps:
            assert equal(loaded.maps[name], pair.maps[name])[0], name
        # byte-stable canonical form
        assert pair_to_json(loaded) == pair_to_json(pair)


def test_save_load_roundtrip_double(tmp_path):
    # fractional coefficients and composite E labels survive the text format
    alg, phi_inv = q_double_algebra()
    pair = build_double(alg, phi_inv)
    path = tmp_path / "double.json"
    save_pair(pair, path)
    loaded = load_pair(path)
    assert loaded.spec.basis_e == pair.spec.basis_e
    for name in pair.maps:
        assert equal(loaded.maps[name], pair.maps[name])[0], name


def test_load_rejects_bad_ring():
    with pytest.raises(PairError, match=r"\$\.ring"):
        pair_from_json('{"ring": {"domain": "reals", "vars": []}, '
                       '"basis": {"A": ["1"], "E": ["Y"]}, "maps": {}}')
    with pytest.raises(PairError, match="missing field"):
        pair_from_json('{"basis": {"A": ["1"], "E": ["Y"]}, "maps": {}}')


def test_load_rejects_wrong_shape():
    import json

    aps = build_aps()
    obj = json.loads(pair_to_json(aps))
    obj["maps"]["mu_E"] = obj["maps"].pop("mu_A")  # A-labelled table at an EE->E slot
    with pytest.raises(PairError, match="signature mismatch for mu_E"):
        pair_from_json(json.dumps(obj))
    obj2 = json.loads(pair_to_json(aps))
    obj2["maps"]["mu_Q"] = []
    with pytest.raises(PairError, match="unknown map name"):
        pair_from_json(json.dumps(obj2))


def test_load_partial_pair_verifies_restricted():
    import json

    aps = build_aps()
    obj = json.loads(pair_to_json(aps))
    for name in ("nu_AE", "nu_EA", "nu_EE"):
        del obj["maps"][name]
    partial = pair_from_json(json.dumps(obj))
    report = verify(partial)
    assert report.ok()
    # every equation mentioning a nu map is skipped with the right missing list
    by_name = {e.name: e for e in load_axioms()}
    nus = {"nu_AE", "nu_EA", "nu_EE"}
    for r in report.records:
        mentions_nu = bool(by_name[r.name].generators() & nus)
        assert (r.status == "skip") == mentions_nu
        if r.status == "skip":
            assert set(r.missing) <= nus


def test_builtin_registry():
    for name, builder in BUILTIN_PAIRS.items():
        assert builder().name in (name, "laurent-sqrt")
