"""Dirichlet characters modulo odd primes, exact Gauss sums, and the
character twists used by the twisted summation formula."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from sympy import cyclotomic_poly, Poly, Symbol

from .metaplectic import Mu4, epsilon_d, quad_symbol
from .specfun import fundamental_discriminant, kronecker


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def prime_factors(n: int) -> list[int]:
    n = abs(n)
    out, p = [], 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out.append(n)
    return out


def primitive_root(p: int) -> int:
    qs = prime_factors(p - 1)
    for g in range(2, p):
        if all(pow(g, (p - 1) // q, p) != 1 for q in qs):
            return g
    return 1  # p = 2


# ----------------------------------------------------------------------------
# exact cyclotomic numbers

@lru_cache(maxsize=None)
def _phi_coeffs(M: int) -> tuple[int, ...]:
    x = Symbol("x")
    return tuple(int(c) for c in Poly(cyclotomic_poly(M, x), x).all_coeffs()[::-1])


@dataclass(frozen=True)
class Cyc:
    """An element sum_k c_k zeta_M^k of Q(zeta_M), zeta_M = e^{2 pi i/M}."""

    M: int
    coeffs: tuple[Fraction, ...] = field(default=())

    @classmethod
    def zero(cls, M: int) -> "Cyc":
        return cls(M, (Fraction(0),) * M)

    @classmethod
    def root(cls, M: int, k: int, c=1) -> "Cyc":
        v = [Fraction(0)] * M
        v[k % M] = Fraction(c)
        return cls(M, tuple(v))

    @classmethod
    def rational(cls, M: int, c) -> "Cyc":
        return cls.root(M, 0, c)

    def __add__(self, o: "Cyc") -> "Cyc":
        return Cyc(self.M, tuple(a + b for a, b in zip(self.coeffs, o.coeffs)))

    def __neg__(self):
        return Cyc(self.M, tuple(-a for a in self.coeffs))

    def __sub__(self, o):
        return self + (-o)

    def __mul__(self, o) -> "Cyc":
        if not isinstance(o, Cyc):
            return Cyc(self.M, tuple(a * Fraction(o) for a in self.coeffs))
        M = self.M
        out = [Fraction(0)] * M
        nz = [(j, b) for j, b in enumerate(o.coeffs) if b]
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in nz:
                    out[(i + j) % M] += a * b
        return Cyc(M, tuple(out))

    __rmul__ = __mul__

    def reduced(self) -> tuple[Fraction, ...]:
        """Canonical coordinates: remainder modulo the cyclotomic polynomial."""
        phi = _phi_coeffs(self.M)
        deg = len(phi) - 1
        v = list(self.coeffs)
        for top in range(len(v) - 1, deg - 1, -1):
            c = v[top]
            if c:
                for j, pc in enumerate(phi):
                    v[top - deg + j] -= c * pc
        return tuple(v[:deg])

    def __eq__(self, o):
        if not isinstance(o, Cyc) or o.M != self.M:
            return NotImplemented
        return self.reduced() == o.reduced()

    def __hash__(self):
        return hash((self.M, self.reduced()))

    def conj(self) -> "Cyc":
        M = self.M
        return Cyc(M, tuple(self.coeffs[(-k) % M] for k in range(M)))

    def __complex__(self):
        return complex(sum(complex(float(c)) * cmath.exp(2j * math.pi * k / self.M)
                           for k, c in enumerate(self.coeffs) if c))


def sqrt_prime_cyc(r: int, M: int) -> Cyc:
    """sqrt(r) for an odd prime r inside Q(zeta_M), 4r | M."""
    g = Cyc.zero(M)
    for a in range(1, r):
        g = g + Cyc.root(M, a * (M // r), kronecker(a, r))
    # g = sqrt(r) or i sqrt(r)
    return g if r % 4 == 1 else g * Cyc.root(M, -M // 4)


# ----------------------------------------------------------------------------
# Dirichlet characters modulo an odd prime

@dataclass(frozen=True)
class DirichletCharacter:
    """psi(g^j) = exp(2 pi i j*index/(r-1)) against the least primitive root g."""

    r: int
    index: int

    def __post_init__(self):
        object.__setattr__(self, "index", self.index % (self.r - 1))

    @property
    def order(self) -> int:
        return (self.r - 1) // math.gcd(self.index, self.r - 1)

    @property
    def principal(self) -> bool:
        return self.index == 0

    @property
    def real(self) -> bool:
        return (2 * self.index) % (self.r - 1) == 0

    def log(self, m: int) -> int | None:
        """Exponent e with psi(m) = zeta_{r-1}^e, or None when r | m."""
        return _log_table(self.r).get(m % self.r) if m % self.r else None

    def exponent(self, m: int) -> int | None:
        j = self.log(m)
        return None if j is None else (j * self.index) % (self.r - 1)

    def __call__(self, m: int) -> complex:
        e = self.exponent(m)
        return 0j if e is None else cmath.exp(2j * math.pi * e / (self.r - 1))

    def cyc(self, m: int, M: int) -> Cyc:
        e = self.exponent(m)
        if e is None:
            return Cyc.zero(M)
        return Cyc.root(M, e * (M // (self.r - 1)))

    def conj(self) -> "DirichletCharacter":
        return DirichletCharacter(self.r, -self.index)

    def __mul__(self, o: "DirichletCharacter") -> "DirichletCharacter":
        if o.r != self.r:
            raise ValueError("characters of different moduli")
        return DirichletCharacter(self.r, self.index + o.index)

    def __repr__(self):
        return f"psi_{self.r},{self.index}"


@lru_cache(maxsize=None)
def _log_table(r: int) -> dict[int, int]:
    g = primitive_root(r)
    table, x = {}, 1
    for j in range(r - 1):
        table[x] = j
        x = x * g % r
    return table


def _check_odd_prime(r: int):
    if r % 2 == 0 or not is_prime(r):
        raise ValueError(f"{r} is not an odd prime")


def characters_mod(r: int) -> list[DirichletCharacter]:
    _check_odd_prime(r)
    return [DirichletCharacter(r, j) for j in range(r - 1)]


def legendre_character(r: int) -> DirichletCharacter:
    _check_odd_prime(r)
    return DirichletCharacter(r, (r - 1) // 2)


def cyc_modulus(r: int) -> int:
    """A cyclotomic field holding psi-values, zeta_r, i and sqrt r."""
    return math.lcm(4, r, r - 1)


def gauss_sum_direct(psi: DirichletCharacter, n: int, M: int | None = None) -> Cyc:
    """tau_psi(n) = sum over m prime to r of psi(m) e^{2 pi i mn/r}."""
    r = psi.r
    M = M or cyc_modulus(r)
    out = Cyc.zero(M)
    for m in range(1, r):
        out = out + psi.cyc(m, M) * Cyc.root(M, (m * n % r) * (M // r))
    return out


def gauss_sum(psi: DirichletCharacter, n: int, M: int | None = None) -> Cyc:
    """tau_psi(n) by the closed rule: conj(psi(n)) tau_psi, or -1 / r-1 for psi_0."""
    r = psi.r
    M = M or cyc_modulus(r)
    if psi.principal:
        return Cyc.rational(M, r - 1 if n % r == 0 else -1)
    if n % r == 0:
        return Cyc.zero(M)
    return psi.conj().cyc(n, M) * gauss_sum_direct(psi, 1, M)


def gauss_sum_value(psi: DirichletCharacter, n: int) -> complex:
    return complex(gauss_sum(psi, n))


def psi_star(psi: DirichletCharacter, ell: int) -> DirichletCharacter:
    """k -> conj(psi(k)) (k/r)^ell."""
    return DirichletCharacter(psi.r, -psi.index + ell * (psi.r - 1) // 2)


def c_ell_r(ell: int, r: int) -> Mu4:
    _check_odd_prime(r)
    return Mu4(0) if ell % 2 == 0 else epsilon_d(r) ** ell


# ----------------------------------------------------------------------------
# characters modulo N

@dataclass(frozen=True)
class KroneckerCharacter:
    """n -> (D/n) for the discriminant D of a quadratic field (D = 1: trivial)."""

    D: int

    def __call__(self, n: int) -> int:
        if self.D == 1:
            return 1
        return kronecker(self.D, n)

    @property
    def modulus(self) -> int:
        return abs(self.D)

    def conj(self) -> "KroneckerCharacter":
        return self


def kronecker_char(square_class: int) -> KroneckerCharacter:
    """The character of Q(sqrt d)."""
    if square_class == 0:
        raise ValueError("square class must be nonzero")
    return KroneckerCharacter(fundamental_discriminant(square_class))


@dataclass(frozen=True)
class ChiNEll:
    """d -> conj(chi(d)) (N/d)^ell."""

    chi: object
    N: int
    ell: int

    def __call__(self, d: int) -> complex:
        if math.gcd(d, self.N) != 1:
            return 0
        c = complex(self.chi(d)).conjugate()
        if self.ell % 2 == 0:
            return c
        return c * quad_symbol(self.N, d) ** self.ell


def chi_n_ell(chi, N: int, ell: int) -> ChiNEll:
    return ChiNEll(chi, N, ell)
