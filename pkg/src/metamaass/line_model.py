"""Test functions in the line model V_{lambda,ell}, the involution f -> f_inf,
the group action, the Fourier transform and the local zeta functions.

Every family is described by its Taylor jets: ``f.jet(x, K)`` returns the
array of f^(k)(x)/k!, k < K, at each point of ``x``. Derivatives are read
off the jets, never by numerical differentiation.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .metaplectic import GTilde, Mu4
from .specfun import Pole, cgamma, de_quad, fourier_integral, QuadratureSpec, rgamma, whittaker_w

TAYLOR_ORDER = 8          # Taylor subtraction order in the Phi_{+-,0} pieces
POLE_WINDOW = 1e-6
FLAT_CUTOFF = 1e-3        # |x| below which f(-1/x) is taken as 0 for rapidly decaying f
_SERIES_TERMS = 80


@dataclass(frozen=True)
class PSParams:
    lam: complex
    ell: int

    def __post_init__(self):
        object.__setattr__(self, "lam", complex(self.lam))
        object.__setattr__(self, "ell", int(self.ell))

    def shifted(self, dl: float, de: int) -> "PSParams":
        return PSParams(self.lam + dl, self.ell + de)


@dataclass(frozen=True)
class MeromorphicValue:
    value: complex
    pole: Pole | None = None

    @property
    def is_pole(self) -> bool:
        return self.pole is not None

    def __complex__(self):
        if self.pole is not None:
            raise ArithmeticError(f"pole at {self.pole.location}")
        return complex(self.value)


def sign_power(x, ell: int):
    """(sgn x)^{ell/2}: 1 for x > 0 and i^ell for x < 0."""
    return np.where(np.asarray(x) < 0, 1j ** (ell % 4), 1.0 + 0j)


def cpow(z, a):
    """Principal z^a."""
    return np.exp(a * np.log(np.asarray(z, dtype=complex)))


def neg_one_pow(a: complex) -> complex:
    """Principal (-1)^a = e^{i pi a}."""
    return cmath.exp(1j * math.pi * a)


# ----------------------------------------------------------------------------
# truncated power series, shape (K, npts)

def _jmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    K = a.shape[0]
    out = np.zeros(np.broadcast_shapes(a.shape, b.shape), dtype=complex)
    for k in range(K):
        for j in range(k + 1):
            out[k] += a[j] * b[k - j]
    return out


def _jexp(a: np.ndarray) -> np.ndarray:
    K = a.shape[0]
    out = np.zeros(a.shape, dtype=complex)
    with np.errstate(under="ignore", over="ignore"):
        out[0] = np.exp(a[0])
    for k in range(1, K):
        acc = 0
        for j in range(1, k + 1):
            acc = acc + j * a[j] * out[k - j]
        out[k] = acc / k
    return out


def _jcompose(outer: np.ndarray, inner: np.ndarray) -> np.ndarray:
    """outer(y0 + inner(eps)) where inner has zero constant term."""
    K = outer.shape[0]
    acc = np.zeros(np.broadcast_shapes(outer.shape, inner.shape), dtype=complex)
    acc[0] = outer[K - 1]
    for k in range(K - 2, -1, -1):
        acc = _jmul(acc, inner)
        acc[0] += outer[k]
    return acc


def _binom_series(alpha: complex, c, K: int) -> np.ndarray:
    """(1 - eps/c)^{-alpha} = sum (alpha)_j/j! (eps/c)^j."""
    c = np.asarray(c, dtype=complex)
    out = np.empty((K,) + c.shape, dtype=complex)
    out[0] = 1
    for j in range(1, K):
        out[j] = out[j - 1] * (alpha + j - 1) / (j * c)
    return out


def _poly_eval(coeffs: tuple, x: np.ndarray) -> np.ndarray:
    out = np.zeros(x.shape, dtype=complex)
    for c in reversed(coeffs):
        out = out * x + c
    return out


def _poly_shift_jet(coeffs: tuple, x0: np.ndarray, K: int) -> np.ndarray:
    """Jet of a polynomial at x0."""
    out = np.zeros((K,) + x0.shape, dtype=complex)
    cur = list(coeffs)
    fact = 1.0
    for k in range(K):
        if not cur:
            break
        out[k] = _poly_eval(tuple(cur), x0) / fact
        cur = [i * c for i, c in enumerate(cur)][1:]
        fact *= k + 1
    return out


# ----------------------------------------------------------------------------
# function families

class TestFunction:
    """An element of V_{lambda,ell} with analytic jets.

    ``germ`` describes the behaviour at 0: ("analytic", R) with Taylor
    radius R, or ("flat", 0) for functions vanishing to infinite order
    there. ``rapid`` marks decay faster than any power at infinity.
    """

    params: PSParams
    rapid: bool = False
    __test__ = False  # keep pytest from collecting the class

    def jet(self, x, K: int) -> np.ndarray:
        raise NotImplementedError

    @property
    def germ(self) -> tuple[str, float]:
        raise NotImplementedError

    def infty(self) -> "TestFunction":
        raise NotImplementedError

    def ft_closed(self, t) -> np.ndarray | None:
        return None

    # derived
    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return self.jet(np.atleast_1d(x), 1)[0].reshape(x.shape)

    def deriv(self, k: int, x):
        x = np.asarray(x, dtype=float)
        return (self.jet(np.atleast_1d(x), k + 1)[k] * math.factorial(k)).reshape(x.shape)

    def taylor(self, K: int) -> np.ndarray:
        if self.germ[0] == "flat":
            return np.zeros(K, dtype=complex)
        return self.jet(np.zeros(1), K)[:, 0]

    def translate(self, u: float) -> "TestFunction":
        return Translated(self, float(u)) if u else self

    def dilate(self, t: float) -> "TestFunction":
        return Dilated(self, float(t)) if t != 1 else self

    def scale(self, c: complex) -> "TestFunction":
        return Scaled(self, complex(c))

    def derivative(self) -> "TestFunction":
        return Derivative(self)


class PolyGaussian(TestFunction):
    """P(x) e^{-pi x^2} with P given by its coefficients (constant first)."""

    rapid = True

    def __init__(self, coeffs, params: PSParams, name: str = "poly-gaussian"):
        self.coeffs = tuple(complex(c) for c in coeffs)
        self.params = params
        self.name = name

    @property
    def germ(self):
        return ("analytic", math.inf)

    def jet(self, x, K):
        x = np.asarray(x, dtype=float)
        # e^{-pi (x0+e)^2} = e^{-pi x0^2} e^{-2 pi x0 e - pi e^2}
        inner = np.zeros((K,) + x.shape, dtype=complex)
        if K > 1:
            inner[1] = -2 * np.pi * x
        if K > 2:
            inner[2] = -np.pi
        inner[0] = -np.pi * x * x
        g = _jexp(inner)
        return _jmul(_poly_shift_jet(self.coeffs, x, K), g)

    def infty(self):
        return InftyOf(self)

    def ft_poly(self) -> tuple:
        """Q with F[P e^{-pi x^2}](t) = Q(t) e^{-pi t^2}."""
        # F[x g] = (2 pi i)^{-1} d/dt F[g], and d/dt(Q e^{-pi t^2}) = (Q' - 2 pi t Q) e^{-pi t^2}
        total = np.zeros(len(self.coeffs) + 1, dtype=complex)
        q = np.zeros(len(self.coeffs) + 1, dtype=complex)
        q[0] = 1
        for c in self.coeffs:
            total += c * q
            dq = np.append(q[1:] * np.arange(1, len(q)), 0)
            tq = np.append(0, q[:-1])
            q = (dq - 2 * np.pi * tq) / (2j * np.pi)
        return tuple(total)

    def ft_closed(self, t):
        t = np.asarray(t, dtype=float)
        return _poly_eval(self.ft_poly(), t) * np.exp(-np.pi * t * t)


def gaussian(params: PSParams) -> PolyGaussian:
    return PolyGaussian((1,), params, "gaussian")


def odd_gaussian(params: PSParams) -> PolyGaussian:
    return PolyGaussian((0, 1), params, "odd-gaussian")


def hermite_gaussian(k: int, params: PSParams) -> PolyGaussian:
    """H_k(sqrt(2 pi) x) e^{-pi x^2}; its Fourier transform is i^k times itself."""
    c = math.sqrt(2 * math.pi)
    h_prev, h = [1.0], [0.0, 2.0]
    if k == 0:
        h = h_prev
    for n in range(1, k):
        nxt = [0.0] + [2 * a for a in h]
        for i, a in enumerate(h_prev):
            nxt[i] -= 2 * n * a
        h_prev, h = h, nxt
    return PolyGaussian(tuple(a * c ** i for i, a in enumerate(h)), params, f"hermite{k}")


class PoissonKernel(TestFunction):
    """p_{lambda,ell,z}(u) = y^{lambda-ell/4} (z-u)^{-(lambda+ell/4)} (conj z - u)^{-(lambda-ell/4)}."""

    def __init__(self, z: complex, params: PSParams):
        z = complex(z)
        if z.imag <= 0:
            raise ValueError("Poisson kernel needs Im z > 0")
        self.z, self.params = z, params
        lam, ell = params.lam, params.ell
        self.a = lam + ell / 4
        self.b = lam - ell / 4
        self.pref = complex(z.imag ** self.b)

    @property
    def germ(self):
        return ("analytic", abs(self.z))

    def jet(self, x, K):
        x = np.asarray(x, dtype=float)
        w1 = self.z - x
        w2 = self.z.conjugate() - x
        j1 = _binom_series(self.a, w1, K) * cpow(w1, -self.a)
        j2 = _binom_series(self.b, w2, K) * cpow(w2, -self.b)
        return self.pref * _jmul(j1, j2)

    def infty(self):
        # (-1/z)^{ell/2} = i^ell z^{-ell/2} on principal branches
        w = -1 / self.z
        return Scaled(PoissonKernel(w, self.params), complex(cpow(w, self.params.ell / 2)))

    def translate(self, u):
        return PoissonKernel(self.z + u, self.params) if u else self

    def ft_closed(self, t):
        return poisson_kernel_ft(self.params, self.z, t)


def poisson_kernel_ft(p: PSParams, z: complex, t):
    """Closed form of the Fourier transform of p_{lambda,ell,z}."""
    lam, ell = p.lam, p.ell
    x, y = z.real, z.imag
    scalar = np.ndim(t) == 0
    t = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.zeros(t.shape, dtype=complex)
    ph = cmath.exp(-1j * math.pi * ell / 4)
    zero = t == 0
    if zero.any():
        den = rgamma(np.array([lam + ell / 4]))[0] * rgamma(np.array([lam - ell / 4]))[0]
        if abs(2 * lam - 1 - round((2 * lam - 1).real)) < 1e-14 and (2 * lam - 1).real <= 0:
            raise ArithmeticError("t = 0 value has a pole at this lambda")
        g = complex(cgamma(np.array([2 * lam - 1]))[0])
        out[zero] = (y ** (1 - lam - ell / 4) * ph * 2 * math.pi * 2 ** (1 - 2 * lam) * g * den)
    for sg in (1, -1):
        sel = (np.sign(t) == sg)
        if not sel.any():
            continue
        ts = np.abs(t[sel])
        mu = sg * ell / 4
        W = whittaker_w(mu, lam - 0.5, 4 * np.pi * ts * y)
        out[sel] = (ph * np.pi ** lam * ts ** (lam - 1) * rgamma(np.array([lam + mu]))[0]
                    * y ** (-ell / 4) * W * np.exp(2j * np.pi * t[sel] * x))
    return complex(out[0]) if scalar else out


def poisson_q(p: PSParams, u: float, z: complex) -> complex:
    """q_{lambda,ell,u}(z): the Poisson kernel as a function of z."""
    return complex(PoissonKernel(z, p)(u))


class BumpOnHalfLine(TestFunction):
    """exp(-1/((x-a)(b-x))) on (a, b), 0 <= a < b, reflected to (-b, -a) for sign -1."""

    rapid = True

    def __init__(self, a: float, b: float, sign: int, params: PSParams):
        if not 0 <= a < b:
            raise ValueError("need 0 <= a < b")
        if sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        self.a, self.b, self.sign, self.params = float(a), float(b), sign, params

    @property
    def germ(self):
        return ("flat", 0.0)

    def jet(self, x, K):
        x = np.asarray(x, dtype=float)
        xs = self.sign * x
        inside = (xs > self.a) & (xs < self.b)
        out = np.zeros((K,) + x.shape, dtype=complex)
        if not inside.any():
            return out
        x0 = xs[inside]
        # -1/((x-a)(b-x)) = -(1/(x-a) + 1/(b-x))/(b-a)
        c1 = x0 - self.a
        c2 = self.b - x0
        k = np.arange(K)[:, None]
        s = self.sign ** k
        ph = -((-1.0) ** k / c1 ** (k + 1) + 1 / c2 ** (k + 1)) / (self.b - self.a)
        out[:, inside] = _jexp(ph * s)
        return out

    def infty(self):
        return InftyOf(self)


class InftyOf(TestFunction):
    """f_inf(x) = (sgn x)^{ell/2} |x|^{-2 lambda} f(-1/x) for rapidly decaying f."""

    def __init__(self, f: TestFunction):
        if not f.rapid:
            raise ValueError("generic f_inf needs a rapidly decaying f; "
                             "this family has no certified smooth extension at 0")
        self.f, self.params = f, f.params

    @property
    def germ(self):
        return ("flat", 0.0)

    def jet(self, x, K):
        x = np.asarray(x, dtype=float)
        out = np.zeros((K,) + x.shape, dtype=complex)
        far = np.abs(x) >= FLAT_CUTOFF
        if not far.any():
            return out
        x0 = x[far]
        lam, ell = self.params.lam, self.params.ell
        inv = -1 / x0
        # -1/(x0+e) = -1/x0 * sum (-e/x0)^j
        j = np.arange(K)[:, None]
        inner = inv * (-1 / x0) ** j
        inner[0] = 0
        fj = self.f.jet(inv, K)
        comp = _jcompose(fj, inner)
        powj = _binom_series(2 * lam, -x0, K) * cpow(np.abs(x0), -2 * lam)
        out[:, far] = sign_power(x0, ell) * _jmul(powj, comp)
        return out

    def infty(self):
        return Scaled(self.f, 1j ** (self.params.ell % 4))


class Scaled(TestFunction):
    def __init__(self, f: TestFunction, c: complex):
        self.f, self.c, self.params = f, complex(c), f.params
        self.rapid = f.rapid

    @property
    def germ(self):
        return self.f.germ

    def jet(self, x, K):
        return self.c * self.f.jet(x, K)

    def infty(self):
        return Scaled(self.f.infty(), self.c)

    def ft_closed(self, t):
        v = self.f.ft_closed(t)
        return None if v is None else self.c * v

    def translate(self, u):
        return Scaled(self.f.translate(u), self.c)


class Translated(TestFunction):
    """x -> f(x - u)."""

    def __init__(self, f: TestFunction, u: float):
        self.f, self.u, self.params = f, u, f.params
        self.rapid = f.rapid

    @property
    def germ(self):
        kind, R = self.f.germ
        if kind == "analytic" and R == math.inf:
            return self.f.germ
        if isinstance(self.f, BumpOnHalfLine):
            lo, hi = sorted((self.f.sign * self.f.a, self.f.sign * self.f.b))
            if not lo + self.u < 0 < hi + self.u:
                return ("flat", 0.0)
        raise NotImplementedError("no certified germ at 0 for this translate")

    def jet(self, x, K):
        return self.f.jet(np.asarray(x, dtype=float) - self.u, K)

    def infty(self):
        return InftyOf(self)

    def ft_closed(self, t):
        v = self.f.ft_closed(t)
        return None if v is None else np.exp(2j * np.pi * self.u * np.asarray(t)) * v

    def translate(self, u):
        return Translated(self.f, self.u + u)


class Dilated(TestFunction):
    """x -> f(t x), t > 0."""

    def __init__(self, f: TestFunction, t: float):
        if t <= 0:
            raise ValueError("dilation factor must be positive")
        self.f, self.t, self.params = f, t, f.params
        self.rapid = f.rapid

    @property
    def germ(self):
        kind, R = self.f.germ
        return (kind, R / self.t)

    def jet(self, x, K):
        j = self.f.jet(self.t * np.asarray(x, dtype=float), K)
        return j * (self.t ** np.arange(K)).reshape((K,) + (1,) * (j.ndim - 1))

    def infty(self):
        return Scaled(Dilated(self.f.infty(), 1 / self.t), complex(self.t ** (-2 * self.params.lam)))

    def ft_closed(self, y):
        v = self.f.ft_closed(np.asarray(y) / self.t)
        return None if v is None else v / self.t

    def translate(self, u):
        return Dilated(self.f.translate(self.t * u), self.t)


class Derivative(TestFunction):
    """f' as an element of V_{lambda+1/2, ell+2}."""

    def __init__(self, f: TestFunction):
        self.f = f
        self.params = f.params.shifted(0.5, 2)
        self.rapid = f.rapid

    @property
    def germ(self):
        return self.f.germ

    def jet(self, x, K):
        j = self.f.jet(x, K + 1)
        k = np.arange(1, K + 1).reshape((K,) + (1,) * (j.ndim - 1))
        return j[1:] * k

    def infty(self):
        return _DerivInfty(self.f.infty(), self)

    def ft_closed(self, t):
        v = self.f.ft_closed(t)
        return None if v is None else -2j * np.pi * np.asarray(t) * v


class _DerivInfty(TestFunction):
    """(f')_inf = x (f_inf)' + 2 lambda f_inf."""

    def __init__(self, h: TestFunction, parent: Derivative):
        self.h, self.parent = h, parent
        self.params = parent.params
        self.lam0 = parent.f.params.lam

    @property
    def germ(self):
        return self.h.germ

    def jet(self, x, K):
        x = np.asarray(x, dtype=float)
        j = self.h.jet(x, K + 1)
        d = j[1:] * np.arange(1, K + 1).reshape((K,) + (1,) * (j.ndim - 1))
        out = x * d + 2 * self.lam0 * j[:K]
        out[1:] += d[:-1]
        return out

    def infty(self):
        return Scaled(self.parent, 1j ** (self.params.ell % 4))


def nth_derivative(f: TestFunction, m: int) -> TestFunction:
    for _ in range(m):
        f = Derivative(f)
    return f


# ----------------------------------------------------------------------------
# involution and group action

def f_infty(f: TestFunction) -> TestFunction:
    return f.infty()


def pi_action(gt: GTilde, f: TestFunction, x: float) -> complex:
    """(pi_{lambda,ell}(g~) f)(x)."""
    a, b, c, d = gt.g.floats()
    lam, ell = f.params.lam, f.params.ell
    xi = gt.xi
    den = -c * x + a
    if den == 0:
        fac = (xi ** (-ell)).value if c < 0 else ((Mu4(1) * xi) ** (-ell)).value
        return complex(abs(c) ** (2 * lam) * fac * f.infty()(0.0))
    if den > 0:
        fac = (xi ** (-ell)).value
    elif c >= 0:
        fac = ((Mu4(1) * xi) ** (-ell)).value
    else:
        fac = ((Mu4(3) * xi) ** (-ell)).value
    return complex(abs(den) ** (-2 * lam) * f((d * x - b) / den) * fac)


# ----------------------------------------------------------------------------
# Fourier transform

def minimal_m(p: PSParams) -> int:
    m = 0
    while p.lam.real + m / 2 <= 0.5:
        m += 1
    return m


def fourier(f: TestFunction, t, m: int | None = None, method: str = "auto",
            tol: float = 1e-12) -> complex:
    """F f(t) = (-1/(2 pi i t))^m int f^(m)(x) e^{2 pi i x t} dx, t != 0."""
    t = float(t)
    if t == 0:
        raise ValueError("use fourier_at_zero for t = 0")
    if method in ("auto", "closed"):
        v = f.ft_closed(t)
        if v is not None:
            return complex(v)
        if method == "closed":
            raise ValueError("no closed form for this family")
    m = minimal_m(f.params) if m is None else m
    if f.params.lam.real + m / 2 <= 0.5:
        raise ValueError("m too small for absolute convergence")

    def g(x):
        return f.deriv(m, x)

    integral = fourier_integral(g, t, QuadratureSpec(abs_tol=tol))
    return complex((-1 / (2j * math.pi * t)) ** m * integral)


def fourier_at_zero(f: TestFunction) -> complex:
    """Regularized F f(0) = Phi_+(f;1) + Phi_-(f;1)."""
    _reject_half_line(f.params, 1)
    return complex(local_zeta(f, 1, +1)) + complex(local_zeta(f, 1, -1))


def fourier_deriv_at_zero(f: TestFunction, k: int) -> complex:
    """(F f)^(k)(0) = (2 pi i)^k (Phi_+(f;k+1) + (-1)^k Phi_-(f;k+1))."""
    _reject_half_line(f.params, k + 1)
    return complex((2j * math.pi) ** k * (complex(local_zeta(f, k + 1, +1))
                                           + (-1) ** k * complex(local_zeta(f, k + 1, -1))))


def _reject_half_line(p: PSParams, s: int):
    # Phi(f; s) has a pole when s = 2 lambda + k
    v = s - 2 * p.lam
    if abs(v.imag) < POLE_WINDOW and v.real > -POLE_WINDOW and abs(v.real - round(v.real)) < POLE_WINDOW:
        raise ValueError(f"lambda = {p.lam} is excluded for the regularized value")


# ----------------------------------------------------------------------------
# local zeta functions

def _near_int(s: complex, nonneg: bool) -> int | None:
    if abs(s.imag) >= POLE_WINDOW:
        return None
    k = round(s.real)
    if abs(s.real - k) >= POLE_WINDOW or (nonneg and k < 0):
        return None
    return int(k)


def _pole_at(f: TestFunction, s: complex, sign: int) -> Pole | None:
    k = _near_int(-s, True)
    j = _near_int(s - 2 * f.params.lam, True)
    if k is None and j is None:
        return None
    res = 0j
    loc = s
    if k is not None:
        res += local_zeta_residue(f, -k, sign, _kind="zero")
        loc = complex(-k)
    if j is not None:
        res += local_zeta_residue(f, j, sign, _kind="lam")
        loc = 2 * f.params.lam + j
    if res == 0:
        return None  # removable: the Taylor coefficient vanishes
    return Pole(loc, 1, res)


def _phi0(g: TestFunction, s: complex, sign: int) -> complex:
    """Continuation of int_0^1 x^{s-1} g(sign x) dx."""
    kind, R = g.germ
    if kind == "flat":
        def integrand(x):
            v = g(sign * x)
            with np.errstate(over="ignore", invalid="ignore", under="ignore"):
                out = v * cpow(x, s - 1)
            return np.where(v == 0, 0, out)
        val, _ = de_quad(integrand, 0.0, 1.0, abs_tol=1e-14, strict=False)
        return val
    delta = min(0.25, R / 4)
    n = TAYLOR_ORDER
    c = g.taylor(_SERIES_TERMS) * np.array([float(sign) ** k for k in range(_SERIES_TERMS)])
    poly = c[:n]

    def integrand(x):
        v = g(sign * x) - _poly_eval(tuple(poly), x)
        return v * cpow(x, s - 1)

    val, _ = de_quad(integrand, delta, 1.0, abs_tol=1e-15, strict=False)
    k = np.arange(_SERIES_TERMS)
    with np.errstate(divide="ignore", invalid="ignore"):
        tail = np.where(c[n:] == 0, 0, c[n:] * cpow(delta, s + k[n:]) / (s + k[n:]))
        head = np.where(poly == 0, 0, poly / (s + k[:n]))
    return complex(val + np.sum(tail) + np.sum(head))


def local_zeta(f: TestFunction, s: complex, sign: int, m: int = 0) -> MeromorphicValue:
    """Phi_{+-}(f; s) continued to all s (sign = +1 or -1).

    With m > 0 it is evaluated through (-+1)^m/(s)_m * Phi(f^(m); s+m),
    which must give the same value.
    """
    s = complex(s)
    pole = _pole_at(f, s, sign)
    if pole is not None:
        return MeromorphicValue(complex("nan"), pole)
    if m:
        g = nth_derivative(f, m)
        poch = 1
        for j in range(m):
            poch *= s + j
        inner = local_zeta(g, s + m, sign)
        return MeromorphicValue((-sign) ** m / poch * complex(inner))
    lam, ell = f.params.lam, f.params.ell
    near = _phi0(f, s, sign)
    far = neg_one_pow(-ell / 2) if sign > 0 else 1.0
    far = far * _phi0(f.infty(), 2 * lam - s, -sign)
    return MeromorphicValue(complex(near + far))


def local_zeta_direct(f: TestFunction, s: complex, sign: int) -> complex:
    """The defining integral, for 0 < Re s < 2 Re lambda."""
    s = complex(s)
    if not 0 < s.real < 2 * f.params.lam.real:
        raise ValueError("outside the strip of absolute convergence")

    def integrand(x):
        return f(sign * x) * cpow(x, s - 1)

    val, _ = de_quad(integrand, 0.0, math.inf, abs_tol=1e-13, max_levels=12, strict=False)
    return val


def local_zeta_residue(f: TestFunction, pole, sign: int, combined: bool = False,
                       _kind: str | None = None) -> complex:
    """Residue of Phi_{+-}(f; s) at s = -k (pole=-k) or s = 2 lambda + k.

    ``pole`` is the location; for the second family pass ``("lam", k)``.
    ``combined`` adds both contributions where the two families coincide.
    """
    lam, ell = f.params.lam, f.params.ell
    if _kind == "zero":
        k = -int(pole)
        return complex(sign ** k * f.taylor(k + 1)[k])
    if _kind == "lam":
        k = int(pole)
        fac = neg_one_pow(-ell / 2) if sign > 0 else 1.0
        return complex(-fac * (-sign) ** k * f.infty().taylor(k + 1)[k])
    if isinstance(pole, tuple):
        return local_zeta_residue(f, pole[1], sign, _kind="lam")
    s = complex(pole)
    k = _near_int(-s, True)
    j = _near_int(s - 2 * lam, True)
    if k is None and j is None:
        raise ValueError(f"{pole} is not a pole location")
    if k is not None and j is not None and not combined:
        raise ValueError("coincident poles: pass combined=True")
    out = 0j
    if k is not None:
        out += local_zeta_residue(f, -k, sign, _kind="zero")
    if j is not None:
        out += local_zeta_residue(f, j, sign, _kind="lam")
    return out


def numeric_residue(f: TestFunction, s0: complex, sign: int, radius: float = 0.05,
                    points: int = 32) -> complex:
    """(1/2 pi i) times the contour integral of Phi around s0 (trapezoid rule)."""
    th = 2 * np.pi * (np.arange(points) + 0.5) / points
    acc = 0j
    for a in th:
        dz = radius * cmath.exp(1j * a)
        acc += complex(local_zeta(f, s0 + dz, sign)) * dz
    return acc / points


def gamma_matrix(s: complex) -> np.ndarray:
    e = cmath.exp(1j * math.pi * s / 2)
    return np.array([[e, 1 / e], [1 / e, e]])


def dual_local_zeta(f: TestFunction, s: complex, sign: int, tol: float = 1e-12) -> complex:
    """int_0^inf t^{s-1} F f(sign t) dt by direct quadrature of F f."""
    s = complex(s)

    def integrand(t):
        v = f.ft_closed(sign * t)
        if v is None:
            v = np.array([fourier(f, sign * tt) for tt in t])
        return v * cpow(t, s - 1)

    val, _ = de_quad(integrand, 0.0, math.inf, abs_tol=tol, max_levels=12, strict=False)
    return val


def lfe_residual(f: TestFunction, s: complex) -> float:
    """Max-norm defect of the local functional equation at s."""
    s = complex(s)
    lhs = np.array([dual_local_zeta(f, s, 1), dual_local_zeta(f, s, -1)])
    phi = np.array([complex(local_zeta(f, 1 - s, 1)), complex(local_zeta(f, 1 - s, -1))])
    g = complex(cgamma(np.array([s]))[0])
    rhs = (2 * math.pi) ** (-s) * g * gamma_matrix(s) @ phi
    return float(np.max(np.abs(lhs - rhs)))


def double_pole_set(p: PSParams, s: complex) -> bool:
    """Membership in the set where the dual zeta may have a double pole."""
    q2 = 2 * p.lam
    if abs(q2.imag) > 1e-12 or abs(q2.real - round(q2.real)) > 1e-12:
        return False
    q = round(q2.real)
    top = min(0, -(q - 1))
    k = _near_int(top - complex(s), True)
    return k is not None


def dual_residue(f: TestFunction, pole: complex, sign: int) -> complex:
    """Residue of Phi_{+-}(F f; s) at s = -k or s = 1 - 2 lambda - k."""
    p = f.params
    s = complex(pole)
    if double_pole_set(p, s):
        raise ArithmeticError("pole lies in the possible double-pole set; no residue is reported")
    k = _near_int(-s, True)
    j = _near_int(1 - 2 * p.lam - s, True)
    if k is None and j is None:
        raise ValueError(f"{pole} is not a pole location")
    out = 0j
    if k is not None:
        out += sign ** k * fourier_deriv_at_zero(f, k) / math.factorial(k)
    if j is not None:
        lam = p.lam
        fk = f.infty().taylor(j + 1)[j]
        g = complex(cgamma(np.array([1 - 2 * lam - j]))[0])
        out += ((2 * math.pi) ** (2 * lam + j - 1) * g * fk * (sign * 1j) ** (j - 1)
                * (cmath.exp(sign * lam * math.pi * 1j)
                   - 1j ** (-p.ell % 4) * cmath.exp(-sign * lam * math.pi * 1j)))
    return complex(out)


# ----------------------------------------------------------------------------
# Laplacian

def weight_laplacian(F: Callable[[complex], complex], z: complex, ell: int, h: float = 1e-3) -> complex:
    """Delta_{ell/2} F at z by fourth-order central differences."""
    x, y = z.real, z.imag

    def d1(shift):
        return (-F(z + 2 * shift) + 8 * F(z + shift) - 8 * F(z - shift) + F(z - 2 * shift)) / (12 * h)

    def d2(shift):
        return (-F(z + 2 * shift) + 16 * F(z + shift) - 30 * F(z) + 16 * F(z - shift)
                - F(z - 2 * shift)) / (12 * h * h)

    fx, fy = d1(h), d1(1j * h)
    fxx, fyy = d2(h), d2(1j * h)
    return -y * y * (fxx + fyy) + 0.5j * ell * y * (fx + 1j * fy)
