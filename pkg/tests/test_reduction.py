import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from grouplll.errors import DriftError, IterationCapExceeded
from grouplll.generate import make_instance, random_instance
from grouplll.groups import g2, sl, so, sp
from grouplll.iwasawa import IwasawaPair, decompose, transport
from grouplll.matrix import RationalMatrix
from grouplll.reduction import (_clean_unipotent, classic_lll_reference, default_cap,
                                is_reduced, lovasz_report, reduce, reflection_step,
                                satisfies_lll_definition, sigma_eval)

GROUPS = [sl(3), sl(5), sp(2), sp(3), so(3), so(4), g2()]
ids = [repr(d) for d in GROUPS]


def random_point(desc, rng, scale=1.0):
    a = desc.torus_from_log(rng.normal(scale=scale, size=desc.rank))
    n = desc.compose(rng.uniform(-2, 2, size=len(desc.roots)))
    return a, n


def exact_gram(res, H: RationalMatrix) -> np.ndarray:
    g = RationalMatrix(res.gamma.tolist())
    return (g.T @ H @ g).to_float()


# ---------------------------------------------------------------- reducedness


def test_base_point_reduced():
    for desc in GROUPS:
        assert is_reduced(desc, 0.9, np.ones(desc.dim), np.eye(desc.dim))


def test_large_simple_character_not_reduced():
    D = sp(2)
    r = D.simple[0]
    a = D.coroot_apply(r, 2 ** 0.25)
    assert D.char_eval(r, a) ** 2 == pytest.approx(2)
    assert not is_reduced(D, 0.9, a, np.eye(4))
    assert lovasz_report(D, 0.9, a, np.eye(4)) == {"e[-2]-e[-1]": False, "2e[-1]": True}


def test_delta_range():
    for bad in (0.25, 1.0, 0.1, 1.5):
        with pytest.raises(ValueError):
            is_reduced(sp(2), bad, np.ones(4), np.eye(4))


def test_printed_so8_output_is_reduced(so8_example):
    D = so(4)
    dec = decompose(D, so8_example["H"], so8_example["sigma"])
    moved = transport(D, dec.pair, so8_example["gamma"].to_float())
    assert is_reduced(D, 0.9, moved.a, moved.n)


# ---------------------------------------------------------------- reflection step


@pytest.mark.parametrize("desc", GROUPS, ids=ids)
def test_reflection_at_t_zero(desc):
    rng = np.random.default_rng(30)
    a, _ = random_point(desc, rng)
    n = np.eye(desc.dim)
    for r in desc.simple:
        a2, n2 = reflection_step(desc, r, a, n)
        s = desc.simple_reflection(r).astype(float)
        x = desc.char_eval(r, a)
        # with t = 0 only the torus moves: a' = alpha_check(1/x) a = s_alpha(a)
        assert np.allclose(a2, desc.reflect_torus(r, a))
        assert np.allclose(n2, np.linalg.inv(s) @ n @ s)


def test_reflection_hand_values():
    D = sp(2)
    r = D.simple[0]
    a = np.ones(4)
    a2, n2 = reflection_step(D, r, a, D.u_alpha(r, 0.5))
    assert D.char_eval(r, a2) == pytest.approx(5 / 4)
    assert D.p_alpha(r, n2) == pytest.approx(-2 / 5)


@pytest.mark.parametrize("desc", GROUPS, ids=ids)
def test_reflection_coset_and_sigma(desc):
    rng = np.random.default_rng(31)
    for _ in range(10):
        a, n = random_point(desc, rng, scale=1.5)
        for r in desc.simple:
            t, x = desc.p_alpha(r, n), desc.char_eval(r, a)
            a2, n2 = reflection_step(desc, r, a, n, verify=True)
            assert sigma_eval(desc, a2) / sigma_eval(desc, a) == pytest.approx(x ** -2 + t * t)
            assert desc.in_N(n2)


@pytest.mark.parametrize("desc", GROUPS, ids=ids)
def test_failing_lovasz_decreases_sigma(desc):
    rng = np.random.default_rng(32)
    delta = 0.8
    seen = 0
    for _ in range(40):
        a, n = random_point(desc, rng, scale=2.0)
        for r in desc.simple:
            n_r = n @ desc.u_alpha(r, -math.floor(desc.p_alpha(r, n) + 0.5))
            if not lovasz_report(desc, delta, a, n_r)[r.name]:
                a2, _ = reflection_step(desc, r, a, n_r)
                assert sigma_eval(desc, a2) < delta * sigma_eval(desc, a)
                seen += 1
    assert seen > 0


def test_drift_detection():
    with pytest.raises(DriftError):
        _clean_unipotent(np.array([[1.0, 2.0], [0.1, 1.0]]))


# ---------------------------------------------------------------- reduce


@pytest.mark.parametrize("desc", GROUPS, ids=ids)
@pytest.mark.parametrize("driver", ["generic", "specialized"])
def test_identity_needs_nothing(desc, driver):
    res = reduce(desc, 0.75, np.eye(desc.dim), driver=driver)
    assert res.reflections == 0
    assert np.array_equal(res.gamma, np.eye(desc.dim, dtype=int).astype(object))


@pytest.mark.parametrize("desc", GROUPS, ids=ids)
@pytest.mark.parametrize("driver", ["generic", "specialized"])
def test_random_instances(desc, driver):
    for seed in range(15):
        inst = random_instance(desc, seed)
        res = reduce(desc, 0.8, inst.H, driver=driver)
        assert is_reduced(desc, 0.8, res.a, res.n)
        assert desc.is_integral_element(res.gamma)
        ref = exact_gram(res, inst.H)
        assert np.abs(res.reduced_gram() - ref).max() <= 1e-7 * np.abs(ref).max()
        sig = [res.sigma_initial] + res.trace.reflection_sigmas()
        assert all(b < 0.8 * a for a, b in zip(sig, sig[1:]))
        assert reduce(desc, 0.8, pair=res.pair).reflections == 0


@pytest.mark.parametrize("desc", GROUPS, ids=ids)
def test_coordinate_fundamental_set(desc):
    for seed in range(5):
        res = reduce(desc, 0.75, random_instance(desc, seed).H, omega="coordinates")
        assert is_reduced(desc, 0.75, res.a, res.n, omega="coordinates")


@pytest.mark.parametrize("desc", [sp(2), so(3), g2()], ids=["sp4", "so6", "g2"])
def test_scrambled_reduced_point(desc):
    """Scrambling a reduced point by gamma0 and reducing again gives a reduced point."""
    rng = np.random.default_rng(33)
    for seed in range(5):
        base = reduce(desc, 0.75, random_instance(desc, seed).H)
        H0 = RationalMatrix([[Fraction(x) for x in r] for r in base.reduced_gram()])
        H0 = RationalMatrix([[(H0[i, j] + H0[j, i]) / 2 for j in range(desc.dim)]
                             for i in range(desc.dim)])
        from grouplll.generate import random_word
        g0 = RationalMatrix(random_word(desc, rng, 10).tolist())
        res = reduce(desc, 0.75, pair=base.pair.__class__(
            *_pair_of(desc, (g0.T @ H0 @ g0))))
        assert is_reduced(desc, 0.75, res.a, res.n)


def _pair_of(desc, H):
    from grouplll.iwasawa import fit_iwasawa
    fit = fit_iwasawa(desc, H.to_float(), np.abs(H.to_float()) * 1e-9 + 1e-12)
    return fit.pair.a, fit.pair.n


def test_trace_contents():
    inst = random_instance(g2(), 4)
    res = reduce(g2(), 0.75, inst.H)
    kinds = {s.kind for s in res.trace.steps}
    assert kinds <= {"RED", "REFL"}
    assert sum(s.kind == "REFL" for s in res.trace.steps) == res.reflections
    assert reduce(g2(), 0.75, inst.H, trace=False).trace.steps == []


def test_iteration_cap():
    inst = random_instance(so(4), 1)
    with pytest.raises(IterationCapExceeded):
        reduce(so(4), 0.75, inst.H, max_iter=1)
    assert default_cap(1.0, 0.75) == 10
    assert default_cap(0.01, 0.75) == 10
    assert default_cap(100.0, 0.9) == 10 * (1 + math.ceil(math.log(100) / math.log(1 / 0.9)))


def test_frequent_refresh_is_harmless():
    inst = random_instance(so(4), 7)
    a = reduce(so(4), 0.75, inst.H)
    b = reduce(so(4), 0.75, inst.H, reortho_every=1)
    assert np.array_equal(a.gamma, b.gamma)
    c = reduce(so(4), 0.75, inst.H_float(), reortho_every=1)
    assert is_reduced(so(4), 0.75, c.a, c.n)


def test_argument_checks():
    with pytest.raises(ValueError):
        reduce(sp(2), 0.75)
    with pytest.raises(ValueError):
        reduce(sp(2), 0.75, np.eye(4), driver="fast")
    with pytest.raises(ValueError):
        reduce(sp(2), 0.75, np.eye(4), driver="specialized", omega="coordinates")


def test_printed_examples(so8_example, g2_example):
    for desc, ex in ((so(4), so8_example), (g2(), g2_example)):
        dec = decompose(desc, ex["H"], ex["sigma"])
        for driver in ("generic", "specialized"):
            res = reduce(desc, 0.9, pair=dec.pair, driver=driver)
            assert is_reduced(desc, 0.9, res.a, res.n)
            assert desc.is_integral_element(res.gamma)
    res = reduce(g2(), 0.9, pair=decompose(g2(), g2_example["H"], g2_example["sigma"]).pair)
    assert RationalMatrix(res.gamma.tolist()) == g2_example["gamma"]


# ---------------------------------------------------------------- classic LLL


def test_classic_lll_reduced_input():
    H = RationalMatrix([[1, 0], [0, 1]])
    assert np.array_equal(classic_lll_reference(H, 0.75), np.eye(2, dtype=int).astype(object))


def test_classic_lll_sl2():
    H = RationalMatrix([[5, 2], [2, 1]])
    U = RationalMatrix(classic_lll_reference(H, 0.75).tolist())
    out = U.T @ H @ U
    assert satisfies_lll_definition(out, Fraction(3, 4))
    assert abs(U.det()) == 1


def test_lll_definition_checker():
    assert satisfies_lll_definition(RationalMatrix.identity(3), Fraction(3, 4))
    assert not satisfies_lll_definition(RationalMatrix([[1, 1], [1, 2]]), Fraction(3, 4))
    assert not satisfies_lll_definition(RationalMatrix([[4, 0], [0, 1]]), Fraction(3, 4))


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_engines_agree_on_sl(seed):
    desc = sl(4)
    inst = random_instance(desc, seed)
    U = RationalMatrix(classic_lll_reference(inst.H, 0.75).tolist())
    assert satisfies_lll_definition(U.T @ inst.H @ U, Fraction(3, 4))
    res = reduce(desc, 0.75, inst.H, driver="specialized")
    g = RationalMatrix(res.gamma.tolist())
    assert satisfies_lll_definition(g.T @ inst.H @ g, Fraction(3, 4))


def test_make_instance_trivial():
    for desc in (sp(2), g2()):
        inst = make_instance(desc, [1] * desc.dim, RationalMatrix.identity(desc.dim),
                             np.eye(desc.dim, dtype=int).astype(object))
        assert inst.H == RationalMatrix.identity(desc.dim)
