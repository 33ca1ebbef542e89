import cmath
import math

import pytest
from hypothesis import given, settings, strategies as st

from metamaass import arith as ar
from metamaass.metaplectic import Mu4

PRIMES = (3, 5, 7, 11, 13)


def test_prime_helpers():
    assert [p for p in range(30) if ar.is_prime(p)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert ar.prime_factors(360) == [2, 3, 5]
    assert ar.primitive_root(7) == 3 and ar.primitive_root(11) == 2


def test_cyc_arithmetic():
    M = 12
    z = ar.Cyc.root(M, 1)
    one = ar.Cyc.rational(M, 1)
    p = one
    for _ in range(M):
        p = p * z
    assert p == one
    assert abs(complex(z) - cmath.exp(2j * math.pi / M)) < 1e-15
    assert z * z.conj() == one
    assert z - z == ar.Cyc.zero(M)


def test_sqrt_prime_cyc():
    for r in PRIMES:
        M = ar.cyc_modulus(r)
        s = ar.sqrt_prime_cyc(r, M)
        assert s * s == ar.Cyc.rational(M, r)
        assert abs(complex(s) - math.sqrt(r)) < 1e-12


def test_characters_mod():
    chars = ar.characters_mod(5)
    assert len(chars) == 4
    assert chars[0].principal and chars[2].real and not chars[1].real
    assert chars[1].order == 4
    assert all(c(5) == 0 and c(10) == 0 for c in chars)
    with pytest.raises(ValueError):
        ar.characters_mod(9)
    with pytest.raises(ValueError):
        ar.characters_mod(2)


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(PRIMES), st.integers(0, 20), st.integers(-100, 100), st.integers(-100, 100))
def test_characters_are_multiplicative(r, j, a, b):
    psi = ar.DirichletCharacter(r, j)
    assert abs(psi(a * b) - psi(a) * psi(b)) < 1e-12
    assert abs(psi(a + r) - psi(a)) < 1e-15


def test_legendre_character():
    for r in PRIMES:
        leg = ar.legendre_character(r)
        for a in range(1, r):
            want = 1 if pow(a, (r - 1) // 2, r) == 1 else -1
            assert abs(leg(a) - want) < 1e-14


def test_gauss_sum_examples():
    psi0 = ar.DirichletCharacter(3, 0)
    assert complex(ar.gauss_sum(psi0, 1)) == -1
    assert complex(ar.gauss_sum(psi0, 0)) == 2
    leg3 = ar.legendre_character(3)
    assert abs(complex(ar.gauss_sum(leg3, 1)) - 1j * math.sqrt(3)) < 1e-14
    leg5 = ar.legendre_character(5)
    assert abs(complex(ar.gauss_sum(leg5, 1)) - math.sqrt(5)) < 1e-14
    assert ar.gauss_sum(leg5, 10) == ar.Cyc.zero(ar.cyc_modulus(5))


@pytest.mark.parametrize("r", PRIMES)
def test_gauss_sum_closed_rule_and_norm(r):
    M = ar.cyc_modulus(r)
    for psi in ar.characters_mod(r):
        for n in range(-1, r + 1):
            assert ar.gauss_sum(psi, n, M) == ar.gauss_sum_direct(psi, n, M)
        if not psi.principal:
            t = ar.gauss_sum(psi, 1, M)
            assert t * t.conj() == ar.Cyc.rational(M, r)


def test_psi_star_examples():
    leg = ar.legendre_character(5)
    assert ar.psi_star(leg, 1).principal
    psi = ar.DirichletCharacter(7, 1)
    assert ar.psi_star(psi, 0) == psi.conj()
    assert ar.psi_star(psi, 2) == psi.conj()
    for a in range(1, 7):
        want = psi(a).conjugate() * ar.legendre_character(7)(a)
        assert abs(ar.psi_star(psi, 1)(a) - want) < 1e-14


def test_c_ell_r_examples():
    assert ar.c_ell_r(1, 3) == Mu4(1)
    assert ar.c_ell_r(1, 5) == Mu4(0)
    assert ar.c_ell_r(3, 3) == Mu4(3)
    assert ar.c_ell_r(2, 3) == Mu4(0)
    with pytest.raises(ValueError):
        ar.c_ell_r(1, 4)


def test_kronecker_char():
    triv = ar.kronecker_char(1)
    assert triv(7) == 1 and triv.modulus == 1
    chi = ar.kronecker_char(-1)
    assert chi.D == -4 and chi(3) == -1 and chi(5) == 1 and chi(-1) == -1
    assert ar.kronecker_char(8)(3) == -1
    with pytest.raises(ValueError):
        ar.kronecker_char(0)


def test_chi_n_ell_examples():
    triv = ar.kronecker_char(1)
    c = ar.chi_n_ell(triv, 4, 1)
    assert all(c(d) == 1 for d in (1, 3, 5, -7))
    assert c(2) == 0
    c = ar.chi_n_ell(triv, 12, 1)
    assert c(5) == -1 and c(7) == -1 and c(11) == 1 and c(3) == 0
    c = ar.chi_n_ell(ar.kronecker_char(-1), 12, 2)
    assert c(5) == 1 and c(7) == -1
