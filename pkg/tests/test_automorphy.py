import cmath
import math
import random

import pytest
from scipy import special

from metamaass import arith as ar
from metamaass import automorphy as au
from metamaass import line_model as lm
from metamaass import metaplectic as mp
from metamaass import quadform as qfm
from metamaass.metaplectic import Mat2

SPEC = au.MaassEvalSpec()
PH = cmath.exp(-0.25j * math.pi)  # i^{-1/2} for ell = 1


def cfactor(lam, ell):
    """2 pi 2^{1-2 lam} Gamma(2 lam - 1) / (Gamma(lam + ell/4) Gamma(lam - ell/4))."""
    return (2 * math.pi * 2 ** (1 - 2 * lam) * special.gamma(2 * lam - 1)
            / (special.gamma(lam + ell / 4) * special.gamma(lam - ell / 4)))


def kernel(cs, z=2j):
    return lm.PoissonKernel(z, lm.PSParams(cs.lam, cs.ell))


def gauss(cs):
    return lm.gaussian(lm.PSParams(cs.lam, cs.ell))


# --- L-series ------------------------------------------------------------------------

def test_xi_partial_zero_system():
    z = qfm.zero_system(4, 0.9, 1)
    assert au.xi_partial(z, 1, 4.0, 100) == (0j, 0.0)


def test_xi_partial_tail_bound(shintani):
    a, ta = au.xi_partial(shintani, 1, 4.0, 500)
    b, _ = au.xi_partial(shintani, 1, 4.0, 2000)
    assert abs(a - b) <= ta
    with pytest.raises(ValueError):
        au.xi_partial(shintani, 1, 1.5, 100)


def test_xi_plus_equals_xi_minus_for_split_form(indefinite):
    # diag(1, -1) is equivalent to its negative, so alpha(n) = alpha(-n)
    a, _ = au.xi_partial(indefinite, 1, 5.0, 200)
    b, _ = au.xi_partial(indefinite, -1, 5.0, 200)
    assert abs(a - b) < 1e-12


def test_zeta_integral_factorization(shintani):
    # s = 5 sits on a pole of Phi(f; 1 - s) that the gamma factor cancels
    out = au.zeta_integral_check(shintani, gauss(shintani), 5.0, cutoff=60)
    assert out["residual"] < 1e-6
    out = au.zeta_integral_check(shintani, kernel(shintani), 4.5 + 0.5j, cutoff=60)
    assert out["residual"] < 1e-6


def test_dual_zeta_continued_matches_direct_integral():
    f = lm.gaussian(lm.PSParams(0.9, 1))
    # F f is the Gaussian again, whose Mellin transform is pi^{-s/2} Gamma(s/2) / 2
    for s in (0.6 + 0.2j, 2.0, 3.0):
        want = math.pi ** (-s / 2) * complex(special.gamma(s / 2)) / 2
        got = au.dual_zeta_continued(f, s)
        assert max(abs(got - want)) < 1e-9


# --- summation formula ----------------------------------------------------------------

def test_summation_zero_system():
    z = qfm.zero_system(4, 0.9, 1)
    r = au.summation_check(z, kernel(z))
    assert r.lhs == 0 and r.rhs == 0


@pytest.mark.parametrize("fam", ["gauss", "kernel"])
def test_summation_shintani(shintani, fam):
    f = gauss(shintani) if fam == "gauss" else kernel(shintani)
    assert au.summation_check(shintani, f).residual < 1e-8


def test_summation_indefinite(indefinite):
    assert au.summation_check(indefinite, kernel(indefinite, 0.3 + 1.5j)).residual < 1e-8


def test_summation_rejects_wrong_params(shintani):
    with pytest.raises(ValueError):
        au.summation_check(shintani, lm.gaussian(lm.PSParams(1.0, 1)))


def test_sensitivity_detects_each_constant(shintani):
    out = au.sensitivity(shintani, kernel(shintani))
    base = out.pop("base")
    assert min(out.values()) > 10 * base


def test_summation_with_kernel_matches_wN_relation(shintani):
    # the kernel at z = 2i makes the identity a statement about F and G at 2i
    z = 2j
    F = lambda w: au.maass_F(shintani, w, SPEC)
    lhs = mp.slash(F, shintani.ell, mp.lift("wN", shintani.N), z)
    assert abs(lhs - au.maass_G(shintani, z, SPEC)) < 1e-8
    assert au.summation_check(shintani, kernel(shintani, z)).residual < 1e-8


# --- twisted summation ------------------------------------------------------------------

@pytest.mark.parametrize("r,j", [(3, 1), (5, 0)])
def test_twisted_examples(shintani, r, j):
    psi = ar.DirichletCharacter(r, j)
    rep = au.twisted_summation_check(shintani, r, psi, gauss(shintani))
    assert rep.residual < 1e-8


def test_twisted_conjugate_character(indefinite):
    # real data (eps = 1, real lambda, ell = 0): psi-bar gives the conjugate sides
    f = gauss(indefinite)
    psi = ar.DirichletCharacter(5, 1)
    a = au.twisted_summation_check(indefinite, 5, psi, f)
    b = au.twisted_summation_check(indefinite, 5, psi.conj(), f)
    assert abs(a.lhs - b.lhs.conjugate()) < 1e-10
    assert abs(a.rhs - b.rhs.conjugate()) < 1e-10


def test_twisted_rejects_bad_modulus(shintani):
    with pytest.raises(ValueError):
        au.twisted_summation_check(shintani, 2, ar.DirichletCharacter(3, 0), gauss(shintani))


# --- Maass forms ---------------------------------------------------------------------------

def test_F_periodic_and_constant_term(shintani):
    z = 0.2 + 0.8j
    assert abs(au.maass_F(shintani, z + 1) - au.maass_F(shintani, z)) < 1e-10
    y = 10.0
    lam, ell = shintani.lam.real, shintani.ell
    const = (shintani.alpha_inf * y ** (lam - ell / 4)
             + shintani.alpha0 * PH * cfactor(lam, ell) * y ** (1 - lam - ell / 4))
    # the non-constant terms are O(exp(-2 pi y))
    assert abs(au.maass_F(shintani, 1j * y) - const) < 1e-12 * abs(const)


def test_G_constant_term(shintani):
    y = 10.0
    lam, ell, N = shintani.lam.real, shintani.ell, shintani.N
    const = (N ** lam * shintani.beta_inf * y ** (lam - ell / 4)
             + N ** (1 - lam) * shintani.beta0 * PH * cfactor(lam, ell) * y ** (1 - lam - ell / 4))
    assert abs(au.maass_G(shintani, 1j * y) - const) < 1e-12 * abs(const)


def test_F_equals_poisson_transform(shintani):
    z = 0.1 + 1j
    M = SPEC.terms(z.imag, shintani.growth)
    want = au.poisson_transform(shintani, z, M)
    assert abs(au.maass_F(shintani, z) - want) < 1e-10 * abs(want)


def test_F_stable_under_more_terms(indefinite):
    z = -0.3 + 0.6j
    a = au.maass_F(indefinite, z)
    b = au.maass_F(indefinite, z, au.MaassEvalSpec(m_min=2 * SPEC.terms(z.imag, indefinite.growth)))
    assert abs(a - b) < 1e-9


def test_truncation_limit(shintani):
    with pytest.raises(au.TruncationError):
        au.maass_F(shintani, 1e-5j)
    with pytest.raises(ValueError):
        au.MaassEvalSpec(m_min=3)


def test_automorphy_examples(shintani):
    gammas = [Mat2.of(1, 1, 0, 1), Mat2.of(1, 0, 4, 1), Mat2.of(1, 0, 4, 1) @ Mat2.of(1, 1, 0, 1)]
    assert au.maass_automorphy_check(shintani, gammas) < 1e-8


def test_automorphy_random(indefinite):
    rng = random.Random(8)
    gammas = [mp.random_gamma0(4, 20, rng=rng) for _ in range(3)]
    assert au.maass_automorphy_check(indefinite, gammas) < 1e-8


def test_automorphy_rejects(shintani):
    with pytest.raises(ValueError):
        au.maass_automorphy_check(shintani, [Mat2.of(1, 0, 2, 1)])
    with pytest.raises(ValueError):
        au.maass_automorphy_check(shintani, [Mat2.of(1, 1, 0, 1)], chi=ar.kronecker_char(-1))


def test_parity_rule():
    triv = ar.kronecker_char(1)
    assert au.parity_ok(triv, 0) and au.parity_ok(triv, 1) and not au.parity_ok(triv, 2)
    assert au.parity_ok(ar.kronecker_char(-1), 2)


def test_wN_relation(shintani, indefinite):
    for cs in (shintani, indefinite):
        assert au.maass_wN_check(cs) < 1e-8


def test_wN_twice(shintani):
    # G |w~_N = F |(w~_N)^2, and (w~_N)^2 is central
    F = lambda w: au.maass_F(shintani, w, SPEC)
    G = lambda w: au.maass_G(shintani, w, SPEC)
    wN = mp.lift("wN", shintani.N)
    sq = mp.mul(wN, wN)
    assert sq.g == Mat2.of(-1, 0, 0, -1)
    for z in (1j, 0.3 + 0.7j):
        a = mp.slash(G, shintani.ell, wN, z)
        b = mp.slash(F, shintani.ell, sq, z)
        assert abs(a - b) < 1e-8


def test_laplacian_eigenvalue(shintani):
    assert au.laplacian_check(shintani, 0.1 + 1.2j) < 1e-3
    lam, ell = shintani.lam, shintani.ell
    ypow = lambda z: z.imag ** (lam - ell / 4)
    ev = (lam - ell / 4) * (1 - lam - ell / 4)
    z = 0.2 + 0.9j
    assert abs(lm.weight_laplacian(ypow, z, ell) - ev * ypow(z)) < 1e-6


def test_constant_factor_pole():
    with pytest.raises(ArithmeticError):
        au._constant_factor(0.5, 0)
    assert cmath.isfinite(au._constant_factor(0.9, 1))
    assert math.isfinite(abs(au._constant_factor(1.2, 0)))
