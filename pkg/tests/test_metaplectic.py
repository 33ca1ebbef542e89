import cmath
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from metamaass import line_model as lm
from metamaass import metaplectic as mp
from metamaass.metaplectic import GTilde, Mat2, Mu4, Surd
from metamaass.suites import identity_failures, random_element

W = mp.W
ONE = GTilde(mp.IDENTITY)


def n(x):
    return mp.lift("n", x)


# --- cocycle values -----------------------------------------------------------

def test_sigma_upper_triangular():
    g = Mat2.of(1, 1, 0, 1)
    assert mp.cocycle_sigma(g, g) == 1


def test_sigma_w_w_and_square_of_w():
    assert mp.cocycle_sigma(W.g, W.g) == 1
    assert mp.mul(W, W) == GTilde(Mat2.of(-1, 0, 0, -1), Mu4(0))


def test_sigma_w_winv():
    assert mp.cocycle_sigma(W.g, W.g.inverse()) == 1


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2 ** 32))
def test_sigma_is_a_sign(seed):
    rng = random.Random(seed)
    a, b = random_element(rng), random_element(rng)
    assert mp.cocycle_sigma(a.g, b.g) in (1, -1)


# --- group law ----------------------------------------------------------------

def test_identity_element():
    x = mp.prod(n(Fraction(2, 3)), W, mp.lift("d", -2))
    assert mp.mul(ONE, x) == x and mp.mul(x, ONE) == x


def test_conjugating_n_by_w():
    assert mp.prod(W, n(Fraction(3, 2)), mp.inv(W)) == GTilde(Mat2.of(1, 0, Fraction(-3, 2), 1))


def test_wN_from_w_and_d():
    assert mp.mul(W, mp.lift("d", Surd.sqrt(4))) == GTilde(Mat2.of(0, Fraction(-1, 2), 2, 0))


def test_wN_times_w_inverse():
    for N in (2, 3, 4, 12):
        assert mp.mul(mp.lift("wN", N), mp.inv(W)) == mp.lift("d", Surd.sqrt(N).inverse())


def test_conjugating_gamma_by_wN_sign_rule():
    # a = -1 < 0, b = 2 > 0, c = 0: sign -1
    lhs = mp.prod(mp.inv(mp.lift("wN", 4)), GTilde(Mat2.of(-1, 2, 0, -1), Mu4(1)), mp.lift("wN", 4))
    assert lhs == GTilde(Mat2.of(-1, 0, -8, -1), Mu4(3))


def test_identities_random_instances():
    assert identity_failures(random.Random(11), 100) == 0


def test_inverse_examples():
    assert mp.inv(mp.central(1j)) == mp.central(-1j)
    x = Fraction(5, 7)
    assert mp.inv(n(x)) == n(-x)
    assert mp.mul(W, mp.inv(W)) == ONE
    assert mp.inv(W).g == W.g.inverse()


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2 ** 32))
def test_associativity_and_projection(seed):
    rng = random.Random(seed)
    a, b, c = (random_element(rng) for _ in range(3))
    assert mp.mul(mp.mul(a, b), c) == mp.mul(a, mp.mul(b, c))
    assert mp.mul(a, b).g == a.g @ b.g
    assert mp.mul(a, mp.inv(a)) == ONE


def test_lift_examples():
    assert n(1) == GTilde(Mat2.of(1, 1, 0, 1), Mu4(0))
    with pytest.raises(ValueError):
        mp.lift("d", 0)
    with pytest.raises(ValueError):
        mp.lift("wN", 0)


def test_create_element_identity():
    for r in (3, 5, 7):
        for m in range(1, 3 * r):
            if m % r:
                lhs, rhs = mp.create_element_identity(4, r, m, 1)
                assert lhs == rhs


# --- characters of Gamma_0(4) -------------------------------------------------

def test_epsilon_d():
    assert mp.epsilon_d(1) == Mu4(0)
    assert mp.epsilon_d(3) == Mu4(1)
    assert mp.epsilon_d(-1) == Mu4(1)
    with pytest.raises(ValueError):
        mp.epsilon_d(2)


def test_quad_symbol_examples():
    assert mp.quad_symbol(2, 7) == 1
    assert mp.quad_symbol(3, 5) == -1
    assert all(mp.quad_symbol(c, 1) == 1 for c in range(-5, 6))


@settings(max_examples=200, deadline=None)
@given(st.integers(-200, 200), st.integers(0, 100))
def test_quad_symbol_matches_euler_criterion_for_primes(c, i):
    p = [3, 5, 7, 11, 13, 17, 19, 23, 29, 31][i % 10]
    want = 0 if c % p == 0 else (1 if pow(c, (p - 1) // 2, p) == 1 else -1)
    assert mp.quad_symbol(c, p) == want


def test_theta_values():
    # oracles: direct high-precision sum and pi^(1/4)/Gamma(3/4)
    assert abs(mp.theta(1j) - 1.00373488548773909104767959507) < 1e-14
    assert abs(mp.theta(0.5j) - 1.08643481121330801457531612151) < 1e-14
    z = 0.3 + 0.7j
    assert abs(mp.theta(z + 1) - mp.theta(z)) < 1e-14
    assert abs(mp.theta(40j) - 1) < 1e-14
    with pytest.raises(ValueError):
        mp.theta(1j, terms=0)


def test_theta_multiplier_examples():
    z = 0.2 + 0.9j
    assert abs(mp.theta_multiplier(Mat2.of(1, 1, 0, 1), z) - 1) < 1e-15
    g = Mat2.of(1, 0, 4, 1)
    assert abs(mp.theta_multiplier(g, 1j) - cmath.sqrt(4j + 1)) < 1e-14
    assert abs(mp.theta_multiplier(g, 1j) - mp.theta(g.act(1j)) / mp.theta(1j)) < 1e-12
    with pytest.raises(ValueError):
        mp.theta_multiplier(Mat2.of(1, 0, 2, 1), z)


def test_gamma_star_examples():
    assert mp.gamma_star(mp.IDENTITY) == ONE
    assert mp.gamma_star(Mat2.of(-1, 0, 0, -1)) == GTilde(Mat2.of(-1, 0, 0, -1), Mu4(3))
    assert mp.gamma_star(Mat2.of(1, 0, 4, 1)) == GTilde(Mat2.of(1, 0, 4, 1), Mu4(0))


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2 ** 32))
def test_gamma_star_homomorphism(seed):
    rng = random.Random(seed)
    g1, g2 = mp.random_gamma0(4, 60, rng=rng), mp.random_gamma0(4, 60, rng=rng)
    assert mp.gamma_star(g1 @ g2) == mp.mul(mp.gamma_star(g1), mp.gamma_star(g2))


def test_theta_quotient_for_random_gammas():
    rng = random.Random(3)
    for _ in range(20):
        g = mp.random_gamma0(4, 40, rng=rng)
        for z in (1j, 0.3 + 0.9j, -0.4 + 2j):
            q = mp.theta(g.act(z)) / mp.theta(z)
            assert abs(mp.theta_multiplier(g, z) - q) < 1e-8


# --- slash operator -------------------------------------------------------------

def F(z):
    return cmath.exp(2j * math.pi * z) / (z + 2j) ** 1.5


def test_slash_identity():
    assert mp.slash(F, 3, ONE, 0.1 + 1j) == F(0.1 + 1j)


def test_slash_composition():
    rng = random.Random(5)
    for _ in range(10):
        a, b = random_element(rng), random_element(rng)
        z = complex(rng.uniform(-1, 1), rng.uniform(0.5, 2))
        for ell in range(4):
            one = mp.slash(F, ell, mp.mul(a, b), z)
            two = mp.slash(lambda w: mp.slash(F, ell, a, w), ell, b, z)
            assert abs(one - two) < 1e-12 * max(1, abs(one))


def test_slash_of_power_of_y_by_w_is_poisson_q():
    for lam, ell in ((0.8, 0), (0.7 + 0.3j, 1), (1.1, 2), (0.9, 3)):
        p = lm.PSParams(lam, ell)
        Fy = lambda z: z.imag ** (lam - ell / 4)
        for z in (1j, 0.4 + 0.7j, -1.3 + 0.2j):
            assert abs(mp.slash(Fy, ell, W, z) - lm.poisson_q(p, 0.0, z)) < 1e-12


def test_slash_rejects_lower_half_plane():
    with pytest.raises(ValueError):
        mp.slash(F, 1, W, -1j)


# --- random elements of Gamma_0(N) ------------------------------------------------

def test_random_gamma0_membership():
    rng = random.Random(0)
    for N in (1, 4, 7):
        for _ in range(1000 if N == 4 else 100):
            g = mp.random_gamma0(N, 50, rng=rng)
            a, b, c, d = g.ints()
            assert a * d - b * c == 1 and c % N == 0
            assert max(abs(a), abs(b), abs(c), abs(d)) <= 50


def test_random_gamma0_seed_reproducible():
    assert mp.random_gamma0(4, 20, seed=9) == mp.random_gamma0(4, 20, seed=9)
