"""Complex Gamma, Whittaker W, double-exponential quadrature, and the
zeta/L values the counting series reduce to.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import mpmath
import numpy as np
from scipy import special

# Lanczos approximation, g = 7, n = 9
_LANCZOS_G = 7.0
_LANCZOS = np.array([
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
])
_HALF_LOG_2PI = 0.5 * math.log(2 * math.pi)


class QuadratureError(RuntimeError):
    def __init__(self, msg: str, estimate: float):
        super().__init__(f"{msg} (error estimate {estimate:.3g})")
        self.estimate = estimate


@dataclass(frozen=True)
class Pole:
    """Marker returned in place of a value at a pole."""

    location: complex
    order: int
    residue: complex

    def __complex__(self):
        raise ArithmeticError(f"pole of order {self.order} at {self.location}")


def _is_nonpositive_int(s) -> np.ndarray:
    s = np.asarray(s)
    return (np.imag(s) == 0) & (np.real(s) <= 0) & (np.real(s) == np.round(np.real(s)))


def _loggamma_right(z: np.ndarray) -> np.ndarray:
    """log Gamma(z) for Re z >= 1/2 by Lanczos."""
    z = z - 1
    x = np.full(z.shape, _LANCZOS[0], dtype=complex)
    for i in range(1, len(_LANCZOS)):
        x = x + _LANCZOS[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * np.log(t) - t + np.log(x)


def loggamma(s) -> np.ndarray:
    """A branch of log Gamma(s); only exp() of it is meaningful on the left."""
    s = np.asarray(s, dtype=complex)
    out = np.empty(s.shape, dtype=complex)
    right = s.real >= 0.5
    out[right] = _loggamma_right(s[right])
    left = ~right
    if left.any():
        sl = s[left]
        out[left] = np.log(np.pi / np.sin(np.pi * sl)) - _loggamma_right(1 - sl)
    return out


def cgamma(s) -> np.ndarray:
    """Vectorized complex Gamma; raises at poles."""
    s = np.asarray(s, dtype=complex)
    if _is_nonpositive_int(s).any():
        raise ArithmeticError("Gamma evaluated at a pole")
    out = np.empty(s.shape, dtype=complex)
    right = s.real >= 0.5
    out[right] = np.exp(_loggamma_right(s[right]))
    left = ~right
    if left.any():
        sl = s[left]
        out[left] = np.pi / (np.sin(np.pi * sl) * np.exp(_loggamma_right(1 - sl)))
    return out


def rgamma(s) -> np.ndarray:
    """1/Gamma(s), entire; exact zeros at the poles of Gamma."""
    s = np.asarray(s, dtype=complex)
    poles = _is_nonpositive_int(s)
    out = np.zeros(s.shape, dtype=complex)
    ok = ~poles
    out[ok] = 1 / cgamma(s[ok])
    return out


def gamma_complex(s: complex) -> complex | Pole:
    """Gamma(s), or a Pole marker with residue (-1)^k/k! at s = -k."""
    s = complex(s)
    if s.imag == 0 and s.real <= 0 and s.real == round(s.real):
        k = -int(round(s.real))
        return Pole(s, 1, (-1) ** k / math.factorial(k))
    return complex(cgamma(np.array([s]))[0])


# ----------------------------------------------------------------------------
# double-exponential quadrature

@dataclass(frozen=True)
class QuadratureSpec:
    scheme: str = "double-exponential"
    abs_tol: float = 1e-10
    max_levels: int = 10

    def __post_init__(self):
        if self.abs_tol <= 0:
            raise ValueError("abs_tol must be positive")
        if self.scheme not in ("double-exponential", "tail-extrapolated-oscillatory"):
            raise ValueError(f"unknown scheme {self.scheme!r}")


def _sigmoid_pair(v):
    """(1/(1+e^-v), 1/(1+e^v)) without overflow."""
    e = np.exp(-np.abs(v))
    big = 1 / (1 + e)
    small = e / (1 + e)
    pos = v >= 0
    return np.where(pos, big, small), np.where(pos, small, big)


def _de_nodes(a: float, b: float, t: np.ndarray):
    """Nodes and weights of the DE map for the interval (a, b)."""
    if math.isfinite(a) and math.isfinite(b):
        u = 0.5 * np.pi * np.sinh(t)
        du = 0.5 * np.pi * np.cosh(t)
        sp, sm = _sigmoid_pair(2 * u)
        x = np.where(u < 0, a + (b - a) * sp, b - (b - a) * sm)
        w = (b - a) * 2 * sp * sm * du
        return x, w
    if math.isfinite(a):
        e = np.exp(0.5 * np.pi * np.sinh(t))
        return a + e, e * 0.5 * np.pi * np.cosh(t)
    if math.isfinite(b):
        e = np.exp(0.5 * np.pi * np.sinh(t))
        return b - e, e * 0.5 * np.pi * np.cosh(t)
    u = 0.5 * np.pi * np.sinh(t)
    return np.sinh(u), np.cosh(u) * 0.5 * np.pi * np.cosh(t)


def _t_range(a: float, b: float) -> tuple[float, float]:
    if math.isfinite(a) and math.isfinite(b):
        return -5.0, 5.0
    if math.isfinite(a):
        return -6.5, 4.5
    if math.isfinite(b):
        return -4.5, 6.5
    return -4.5, 4.5


def de_quad(f: Callable[[np.ndarray], np.ndarray], a: float, b: float,
            abs_tol: float = 1e-12, max_levels: int = 10, strict: bool = True,
            trange: tuple[float, float] | None = None) -> tuple[complex, float]:
    """Integrate f over (a, b) by tanh-sinh / exp-sinh / sinh-sinh.

    ``f`` is called on numpy arrays. Returns (value, error estimate);
    raises QuadratureError when the estimate misses abs_tol and ``strict``.
    """
    if a == b:
        return 0j, 0.0
    if a > b:
        v, e = de_quad(f, b, a, abs_tol, max_levels, strict, trange)
        return -v, e
    t0, t1 = trange or _t_range(a, b)
    h = 0.5
    t = np.arange(math.ceil(t0 / h), math.floor(t1 / h) + 1) * h
    x, w = _de_nodes(a, b, t)
    total = np.sum(w * f(x))
    prev = h * total
    err = math.inf
    for _ in range(max_levels):
        h /= 2
        k = np.arange(math.ceil(t0 / h), math.floor(t1 / h) + 1)
        k = k[k % 2 != 0]
        x, w = _de_nodes(a, b, k * h)
        total = total + np.sum(w * f(x))
        cur = h * total
        err = abs(cur - prev)
        prev = cur
        if err < abs_tol and h < 0.2:
            return complex(cur), err
    if strict:
        raise QuadratureError("double-exponential quadrature did not converge", err)
    return complex(prev), err


# ----------------------------------------------------------------------------
# Fourier-type integrals

def _oscillatory_half(g: Callable[[np.ndarray], np.ndarray], omega: float, h: float):
    """Ooura-Mori sums for int_0^inf g(x) cos(wx) dx and ... sin(wx) dx."""
    M = math.pi / h

    def phi(t):
        e = np.exp(-2 * np.pi * np.sinh(t))
        with np.errstate(divide="ignore", invalid="ignore"):
            p = t / (1 - e)
            dp = (1 - (1 + 2 * np.pi * t * np.cosh(t)) * e) / (1 - e) ** 2
        small = np.abs(t) < 1e-8
        p = np.where(small, 1 / (2 * np.pi) + t / 2, p)
        dp = np.where(small, 0.5, dp)
        return p, dp

    n = np.arange(math.floor(-4.0 / h), math.ceil(4.0 / h) + 1)
    out = []
    for shift, trig in ((0.5, np.cos), (0.0, np.sin)):
        t = (n - shift) * h if shift else n * h
        p, dp = phi(t)
        keep = p > 0
        x = M * p[keep] / omega
        vals = g(x) * trig(M * p[keep]) * dp[keep]
        out.append(M / omega * h * np.sum(vals))
    return out[0], out[1]


def fourier_integral(f: Callable[[np.ndarray], np.ndarray], t: float,
                     spec: QuadratureSpec = QuadratureSpec()) -> complex:
    """int_R f(x) e^{2 pi i x t} dx for f of algebraic decay.

    At t = 0 a plain sinh-sinh rule is used; otherwise each half line is
    handled by the Ooura-Mori double-exponential rule, whose nodes merge
    into the zeros of the oscillating factor, so slowly decaying tails are
    summed without truncation.
    """
    if t == 0:
        v, _ = de_quad(f, -math.inf, math.inf, spec.abs_tol, spec.max_levels + 2)
        return v
    omega = 2 * math.pi * abs(t)
    sgn = 1 if t > 0 else -1

    def estimate(h):
        cp, sp = _oscillatory_half(f, omega, h)
        cm, sm = _oscillatory_half(lambda x: f(-x), omega, h)
        return cp + cm + 1j * sgn * (sp - sm)

    h = 0.1
    prev = estimate(h)
    err = math.inf
    for _ in range(spec.max_levels):
        h /= 2
        cur = estimate(h)
        err = abs(cur - prev)
        prev = cur
        if err < spec.abs_tol:
            return complex(cur)
    raise QuadratureError("oscillatory quadrature did not converge", err)


# ----------------------------------------------------------------------------
# Whittaker W

def _whittaker_integral(mu: complex, nu: complex, x: np.ndarray, tol: float) -> np.ndarray:
    """W_{mu,nu}(x) = x^mu e^{-x/2}/Gamma(a) int_0^inf e^{-u} u^{a-1} (1+u/x)^b du
    with a = nu - mu + 1/2, b = nu + mu - 1/2 (needs Re a > 0)."""
    a = nu - mu + 0.5
    b = nu + mu - 0.5
    x = np.asarray(x, dtype=float)
    xc = x[:, None]

    def integrand(u):
        u = u[None, :]
        with np.errstate(under="ignore"):
            return np.exp((a - 1) * np.log(u) - u + b * np.log1p(u / xc))

    # a vector-valued DE rule: all x share the nodes
    t0, t1 = -6.5, 4.0
    h = 0.5
    t = np.arange(math.ceil(t0 / h), math.floor(t1 / h) + 1) * h
    u, w = _de_nodes(0.0, math.inf, t)
    total = integrand(u) @ w
    prev = h * total
    for _ in range(10):
        h /= 2
        k = np.arange(math.ceil(t0 / h), math.floor(t1 / h) + 1)
        k = k[k % 2 != 0]
        u, w = _de_nodes(0.0, math.inf, k * h)
        total = total + integrand(u) @ w
        cur = h * total
        err = np.max(np.abs(cur - prev) / np.maximum(np.abs(cur), 1e-300))
        prev = cur
        if err < tol and h < 0.2:
            break
    else:
        raise QuadratureError("Whittaker integral did not converge", float(err))
    pref = np.exp(mu * np.log(x) - x / 2) * rgamma(np.array([a]))[0]
    return pref * prev


def whittaker_w(mu: complex, nu: complex, x, tol: float = 1e-13) -> np.ndarray | complex:
    """W_{mu,nu}(x) for x > 0, vectorized in x.

    Uses the integral representation when Re(nu - mu + 1/2) > 0 (after the
    symmetry nu -> -nu); otherwise starts from two lower values of mu and
    climbs with W_{k+1} = (x - 2k) W_k - ((k - 1/2)^2 - nu^2) W_{k-1}.
    """
    scalar = np.ndim(x) == 0
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x <= 0):
        raise ValueError("whittaker_w needs x > 0")
    mu, nu = complex(mu), complex(nu)
    if (-nu).real > nu.real:
        nu = -nu
    a = nu - mu + 0.5
    if a.real > 0.05:
        out = _whittaker_integral(mu, nu, x, tol)
    else:
        j = int(math.ceil(0.05 - a.real)) + 1
        k = mu - j
        w_lo = _whittaker_integral(k, nu, x, tol)
        w_hi = _whittaker_integral(k + 1, nu, x, tol)
        k += 1
        for _ in range(j - 1):
            w_lo, w_hi = w_hi, (x - 2 * k) * w_hi - ((k - 0.5) ** 2 - nu ** 2) * w_lo
            k += 1
        out = w_hi
    return complex(out[0]) if scalar else out


# ----------------------------------------------------------------------------
# zeta and real Dirichlet L-values

@lru_cache(maxsize=4096)
def zeta(s: complex) -> complex:
    s = complex(s)
    if s.imag == 0:
        return complex(special.zeta(s.real, 1))
    return complex(mpmath.zeta(s))


def fundamental_discriminant(d: int) -> int:
    """Discriminant of Q(sqrt d); 1 when d is a square."""
    if d == 0:
        raise ValueError("d must be nonzero")
    sign = -1 if d < 0 else 1
    n = abs(d)
    core, p = 1, 2
    while p * p <= n:
        while n % (p * p) == 0:
            n //= p * p
        if n % p == 0:
            n //= p
            core *= p
        p += 1
    core *= n
    core *= sign
    if core == 1:
        return 1
    return core if core % 4 == 1 else 4 * core


def kronecker(D: int, n: int) -> int:
    """Kronecker symbol (D/n)."""
    if n == 0:
        return 1 if D in (1, -1) else 0
    t = 1
    if n < 0:
        n = -n
        if D < 0:
            t = -1
    while n % 2 == 0:
        n //= 2
        if D % 2 == 0:
            return 0
        if D % 8 in (3, 5):
            t = -t
    if n == 1:
        return t
    # Jacobi symbol (D/n), n odd
    a, m = D % n, n
    while a:
        while a % 2 == 0:
            a //= 2
            if m % 8 in (3, 5):
                t = -t
        a, m = m, a
        if a % 4 == 3 and m % 4 == 3:
            t = -t
        a %= m
    return t if m == 1 else 0


def _upper_gamma(b: complex, c: np.ndarray) -> np.ndarray:
    """Gamma(b, c) for real b (any sign) and c > 0, via upward recurrence."""
    b = float(np.real(b))
    if b > 0:
        return special.gammaincc(b, c) * special.gamma(b)
    if b == 0:
        return special.exp1(c)
    # Gamma(b, c) = (Gamma(b+1, c) - c^b e^{-c}) / b
    return (_upper_gamma(b + 1, c) - c ** b * np.exp(-c)) / b


@lru_cache(maxsize=8192)
def dirichlet_l(s: complex, D: int) -> complex:
    """L(s, chi_D) for the Kronecker character of a fundamental discriminant D.

    Uses the theta-function splitting of the completed L-function, which
    converges like exp(-pi n^2/|D|); D = 1 gives zeta(s).
    """
    if D == 1:
        return zeta(s)
    q = abs(D)
    a = 0 if D > 0 else 1
    s = complex(s)
    nmax = int(math.sqrt(45 * q / math.pi)) + 2
    n = np.arange(1, nmax + 1)
    chi = np.array([kronecker(D, int(k)) for k in n], dtype=float)
    c = np.pi * n * n / q
    if s.imag == 0:
        b1, b2 = (s.real + a) / 2, (1 - s.real + a) / 2
        g1, g2 = _upper_gamma(b1, c), _upper_gamma(b2, c)
        lam = np.sum(chi * n ** a * (c ** (-b1) * g1 + c ** (-b2) * g2))
    else:
        b1, b2 = (s + a) / 2, (1 - s + a) / 2
        lam = 0j
        for k, ch, ck in zip(n, chi, c):
            if ch:
                lam += ch * k ** a * (complex(mpmath.gammainc(b1, ck)) * ck ** (-b1)
                                      + complex(mpmath.gammainc(b2, ck)) * ck ** (-b2))
    pre = (q / math.pi) ** ((s + a) / 2) * cgamma(np.array([(s + a) / 2]))[0]
    return complex(lam / pre)
