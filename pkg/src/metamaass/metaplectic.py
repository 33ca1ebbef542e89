"""Exact arithmetic in the four-fold metaplectic cover of SL(2, R).

Elements are pairs ``[g, xi]`` with ``g`` a unimodular 2x2 matrix and ``xi`` a
fourth root of unity; ``[g, xi]`` stands for the pair ``(g, xi * (cz+d)^(1/2))``.
Matrix entries live in Q(sqrt k) so that the Atkin-Lehner type elements
``w_N`` stay exact for every level N.
"""

from __future__ import annotations

import cmath
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Union

Number = Union[int, Fraction, "Surd"]


def _squarefree_split(n: int) -> tuple[int, int]:
    """Write n = s*s*k with k squarefree and return (s, k)."""
    if n <= 0:
        raise ValueError("need a positive integer")
    s, k, p = 1, n, 2
    while p * p <= k:
        while k % (p * p) == 0:
            k //= p * p
            s *= p
        p += 1
    return s, k


@dataclass(frozen=True)
class Surd:
    """The number a + b*sqrt(k) with a, b rational and k squarefree."""

    a: Fraction
    b: Fraction = Fraction(0)
    k: int = 1

    def __post_init__(self):
        a, b, k = Fraction(self.a), Fraction(self.b), int(self.k)
        if k == 1:
            a, b = a + b, Fraction(0)
        if b == 0:
            k = 1
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "k", k)

    @classmethod
    def sqrt(cls, n) -> "Surd":
        """Exact square root of a positive rational."""
        n = Fraction(n)
        if n <= 0:
            raise ValueError("sqrt of a non-positive number")
        # sqrt(p/q) = sqrt(p*q)/q
        s, k = _squarefree_split(n.numerator * n.denominator)
        return cls(Fraction(0), Fraction(s, n.denominator), k)

    @staticmethod
    def of(x) -> "Surd":
        return x if isinstance(x, Surd) else Surd(Fraction(x))

    def _field(self, other: "Surd") -> int:
        if self.k == 1 or other.k == 1 or self.k == other.k:
            return max(self.k, other.k)
        raise ValueError(f"mixing Q(sqrt {self.k}) and Q(sqrt {other.k})")

    def __add__(self, other):
        o = Surd.of(other)
        return Surd(self.a + o.a, self.b + o.b, self._field(o))

    __radd__ = __add__

    def __neg__(self):
        return Surd(-self.a, -self.b, self.k)

    def __sub__(self, other):
        return self + (-Surd.of(other))

    def __rsub__(self, other):
        return Surd.of(other) - self

    def __mul__(self, other):
        o = Surd.of(other)
        k = self._field(o)
        return Surd(self.a * o.a + self.b * o.b * k, self.a * o.b + self.b * o.a, k)

    __rmul__ = __mul__

    def inverse(self) -> "Surd":
        norm = self.a * self.a - self.b * self.b * self.k
        if norm == 0:
            raise ZeroDivisionError("inverse of zero")
        return Surd(self.a / norm, -self.b / norm, self.k)

    def __truediv__(self, other):
        return self * Surd.of(other).inverse()

    def __rtruediv__(self, other):
        return Surd.of(other) * self.inverse()

    def __eq__(self, other):
        try:
            o = Surd.of(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.a == o.a and self.b == o.b and (self.b == 0 or self.k == o.k)

    def __hash__(self):
        return hash((self.a, self.b, self.k))

    def sign(self) -> int:
        """Exact sign of a + b*sqrt(k)."""
        sa = (self.a > 0) - (self.a < 0)
        sb = (self.b > 0) - (self.b < 0)
        if sb == 0:
            return sa
        if sa == 0 or sa == sb:
            return sb
        # opposite signs: compare a^2 with b^2 k
        return sa if self.a * self.a > self.b * self.b * self.k else sb

    def is_rational(self) -> bool:
        return self.b == 0

    def is_integer(self) -> bool:
        return self.b == 0 and self.a.denominator == 1

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(self.k)

    def __int__(self):
        if not self.is_integer():
            raise ValueError(f"{self} is not an integer")
        return int(self.a)

    def __repr__(self):
        if self.b == 0:
            return str(self.a)
        return f"({self.a} + {self.b}*sqrt{self.k})"


def sgn(x) -> int:
    if isinstance(x, Surd):
        return x.sign()
    return (x > 0) - (x < 0)


@dataclass(frozen=True)
class Mu4:
    """The fourth root of unity i**e."""

    e: int = 0

    def __post_init__(self):
        object.__setattr__(self, "e", self.e % 4)

    @classmethod
    def from_value(cls, v) -> "Mu4":
        table = {1: 0, 1j: 1, -1: 2, -1j: 3}
        for key, e in table.items():
            if v == key:
                return cls(e)
        raise ValueError(f"{v!r} is not a fourth root of unity")

    @property
    def value(self) -> complex:
        return (1, 1j, -1, -1j)[self.e]

    def __mul__(self, other):
        if isinstance(other, Mu4):
            return Mu4(self.e + other.e)
        if other in (1, -1):
            return Mu4(self.e + (0 if other == 1 else 2))
        return NotImplemented

    __rmul__ = __mul__

    def inverse(self) -> "Mu4":
        return Mu4(-self.e)

    def __pow__(self, n: int) -> "Mu4":
        return Mu4(self.e * n)

    def __repr__(self):
        return ("1", "i", "-1", "-i")[self.e]


@dataclass(frozen=True)
class Mat2:
    """A unimodular 2x2 matrix with entries in some Q(sqrt k)."""

    a: Surd
    b: Surd
    c: Surd
    d: Surd

    def __post_init__(self):
        for name in "abcd":
            object.__setattr__(self, name, Surd.of(getattr(self, name)))
        if self.a * self.d - self.b * self.c != 1:
            raise ValueError(f"determinant of {self} is not 1")

    @classmethod
    def of(cls, a, b, c, d) -> "Mat2":
        return cls(Surd.of(a), Surd.of(b), Surd.of(c), Surd.of(d))

    def __matmul__(self, o: "Mat2") -> "Mat2":
        return Mat2(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )

    def inverse(self) -> "Mat2":
        return Mat2(self.d, -self.b, -self.c, self.a)

    def __neg__(self):
        return Mat2(-self.a, -self.b, -self.c, -self.d)

    def floats(self) -> tuple[float, float, float, float]:
        return float(self.a), float(self.b), float(self.c), float(self.d)

    def is_integral(self) -> bool:
        return all(e.is_integer() for e in (self.a, self.b, self.c, self.d))

    def ints(self) -> tuple[int, int, int, int]:
        return int(self.a), int(self.b), int(self.c), int(self.d)

    def act(self, z: complex) -> complex:
        a, b, c, d = self.floats()
        return (a * z + b) / (c * z + d)

    def j(self, z: complex) -> complex:
        _, _, c, d = self.floats()
        return c * z + d

    def __repr__(self):
        return f"[[{self.a}, {self.b}], [{self.c}, {self.d}]]"


IDENTITY = Mat2.of(1, 0, 0, 1)


def cocycle_sigma(g1: Mat2, g2: Mat2) -> int:
    """The sign sigma(g1, g2) of Petersson's factor system, exactly."""
    g3 = g1 @ g2
    c1, c2, c3 = sgn(g1.c), sgn(g2.c), sgn(g3.c)
    if c1 and c2 and c3:
        w4 = c1 + c2 - c3 - c1 * c2 * c3
    elif c1 and c2:
        w4 = -(1 - c1) * (1 - c2)
    elif c2 and c3:
        w4 = (1 - sgn(g1.d)) * (1 + c2)
    elif c1 and c3:
        w4 = (1 + c1) * (1 - sgn(g2.a))
    else:
        w4 = (1 - sgn(g1.d)) * (1 - sgn(g2.a))
    # exp(pi i w4/4) with w4 in {-4, 0, 4}
    if w4 % 4:
        raise ArithmeticError(f"non-integral cocycle exponent {w4}/4")
    return -1 if (w4 // 4) % 2 else 1


@dataclass(frozen=True)
class GTilde:
    """An element [g, xi] of the metaplectic cover."""

    g: Mat2
    xi: Mu4 = Mu4(0)

    def __mul__(self, other: "GTilde") -> "GTilde":
        return mul(self, other)

    def inverse(self) -> "GTilde":
        return inv(self)

    def phi(self, z: complex) -> complex:
        """xi * (cz+d)^(1/2) on the principal branch."""
        return self.xi.value * cmath.sqrt(self.g.j(z))

    def __repr__(self):
        return f"[{self.g}, {self.xi}]"


ONE = GTilde(IDENTITY, Mu4(0))


def mul(x: GTilde, y: GTilde) -> GTilde:
    return GTilde(x.g @ y.g, x.xi * y.xi * cocycle_sigma(x.g, y.g))


def inv(x: GTilde) -> GTilde:
    gi = x.g.inverse()
    return GTilde(gi, (x.xi * cocycle_sigma(x.g, gi)).inverse())


def prod(*xs: GTilde) -> GTilde:
    out = ONE
    for x in xs:
        out = mul(out, x)
    return out


def central(xi) -> GTilde:
    """The element [1_2, xi]."""
    return GTilde(IDENTITY, xi if isinstance(xi, Mu4) else Mu4.from_value(xi))


def lift(kind: str, param) -> GTilde:
    """Lift n(x), nbar(x), d(a) or w_N to the cover with xi = 1."""
    if kind == "n":
        return GTilde(Mat2.of(1, param, 0, 1))
    if kind == "nbar":
        return GTilde(Mat2.of(1, 0, param, 1))
    if kind == "d":
        a = Surd.of(param)
        if a == 0:
            raise ValueError("d(a) needs a != 0")
        return GTilde(Mat2(a, Surd.of(0), Surd.of(0), a.inverse()))
    if kind == "wN":
        n = Fraction(param)
        if n <= 0 or n.denominator != 1:
            raise ValueError("w_N needs a positive integer N")
        r = Surd.sqrt(n)
        return GTilde(Mat2(Surd.of(0), -r.inverse(), r, Surd.of(0)))
    raise ValueError(f"unknown lift kind {kind!r}")


W = lift("wN", 1)


def epsilon_d(d: int) -> Mu4:
    if d % 2 == 0:
        raise ValueError("epsilon_d needs odd d")
    return Mu4(0) if d % 4 == 1 else Mu4(1)


def jacobi(a: int, n: int) -> int:
    """Jacobi symbol (a/n) for odd positive n."""
    if n <= 0 or n % 2 == 0:
        raise ValueError("Jacobi symbol needs odd positive n")
    a %= n
    t = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                t = -t
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            t = -t
        a %= n
    return t if n == 1 else 0


def quad_symbol(c: int, d: int) -> int:
    """Shimura's extended symbol (c/d) for odd d."""
    if d % 2 == 0:
        raise ValueError("quad_symbol needs odd d")
    if math.gcd(c, d) != 1:
        return 0
    if d > 0:
        return jacobi(c, d)
    s = jacobi(c, -d)
    return s if c > 0 else -s if c < 0 else 1


def _check_gamma0(gamma: Mat2, N: int) -> tuple[int, int, int, int]:
    if not gamma.is_integral():
        raise ValueError(f"{gamma} is not integral")
    a, b, c, d = gamma.ints()
    if c % N:
        raise ValueError(f"{gamma} is not in Gamma_0({N})")
    return a, b, c, d


def gamma_star(gamma: Mat2) -> GTilde:
    """The canonical lift [gamma, eps_d^-1 (c/d)] of gamma in Gamma_0(4)."""
    _, _, c, d = _check_gamma0(gamma, 4)
    return GTilde(gamma, epsilon_d(d).inverse() * quad_symbol(c, d))


def theta_terms(z: complex) -> int:
    """Truncation guaranteeing a tail below 1e-14."""
    return math.ceil(math.sqrt(14 * math.log(10) / (2 * math.pi * z.imag))) + 2


def theta(z: complex, terms: int | None = None) -> complex:
    if z.imag <= 0:
        raise ValueError("z must lie in the upper half plane")
    if terms is None:
        terms = theta_terms(z)
    if terms <= 0:
        raise ValueError("terms must be positive")
    # n and -n contribute equally
    return 1 + 2 * sum(cmath.exp(2j * math.pi * n * n * z) for n in range(1, terms + 1))


def theta_multiplier(gamma: Mat2, z: complex) -> complex:
    """eps_d^-1 (c/d) (cz+d)^(1/2); equals theta(gamma z)/theta(z)."""
    return gamma_star(gamma).phi(z)


def slash(F: Callable[[complex], complex], ell: int, gt: GTilde, z: complex) -> complex:
    """(F |_ell gt)(z) = F(gz) phi(z)^(-ell)."""
    if z.imag <= 0:
        raise ValueError("z must lie in the upper half plane")
    return F(gt.g.act(z)) * gt.phi(z) ** (-ell)


def random_gamma0(N: int, size_bound: int, seed=None, rng: random.Random | None = None) -> Mat2:
    """Random element of Gamma_0(N) as a word in n(k) and nbar(Nk).

    The word grows while all entries stay within ``size_bound``; the
    sign -1_2 is attached with probability 1/2.
    """
    if N < 1:
        raise ValueError("N must be positive")
    rng = rng or random.Random(seed)
    g = IDENTITY
    for _ in range(2 + rng.randrange(6)):
        k = rng.choice([-2, -1, 1, 2])
        step = Mat2.of(1, k, 0, 1) if rng.random() < 0.5 else Mat2.of(1, 0, N * k, 1)
        h = g @ step
        if max(abs(int(e)) for e in (h.a, h.b, h.c, h.d)) > size_bound:
            break
        g = h
    if rng.random() < 0.5:
        g = -g
    return g


def create_element_identity(N: int, r: int, m: int, ell: int) -> tuple[GTilde, GTilde]:
    """Both sides of the conjugation identity behind twisted automorphy.

    For gamma = [[u, k], [mN, r]] in Gamma_0(N) returns
    ``w_{Nr^2}^-1 n(-m/r)`` and ``n(-k/r) gamma~ w_N^-1 [1, eps_r (mN/r)]``
    (the last factor is [1, 1] for even ell).
    """
    if math.gcd(m * N, r) != 1:
        raise ValueError("need gcd(mN, r) = 1")
    k = (-pow(m * N, -1, r)) % r
    u = (1 + k * m * N) // r
    gamma = Mat2.of(u, k, m * N, r)
    lhs = mul(inv(lift("wN", N * r * r)), lift("n", Fraction(-m, r)))
    gt = gamma_star(gamma) if ell % 2 else GTilde(gamma)
    tail = central(epsilon_d(r) * quad_symbol(m * N, r)) if ell % 2 else ONE
    rhs = prod(lift("n", Fraction(-k, r)), gt, inv(lift("wN", N)), tail)
    return lhs, rhs
