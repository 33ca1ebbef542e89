"""Summation formulas, their twists, and Maass forms built from coefficient systems."""

from __future__ import annotations

import cmath
import math
from concurrent.futures import Executor
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from . import line_model as lm
from .arith import DirichletCharacter, c_ell_r, gauss_sum_value, psi_star
from .metaplectic import GTilde, Mat2, gamma_star, lift, slash
from .quadform import CoefficientSystem
from .specfun import cgamma, de_quad, rgamma, whittaker_w


@dataclass
class SummationReport:
    lhs: complex
    rhs: complex
    truncation: int
    tail_bound: float
    residual: float = field(init=False)

    def __post_init__(self):
        self.residual = abs(self.lhs - self.rhs)

    def passes(self, tol: float) -> bool:
        return self.residual < tol


def prefetch(coeffs: CoefficientSystem, nmax: int, pool: Executor | None = None,
             which: str = "both") -> None:
    """Fill the coefficient memo for 0 < |n| <= nmax, optionally in parallel."""
    ns = [n for k in range(1, nmax + 1) for n in (k, -k)]
    fns = []
    if which in ("both", "alpha"):
        fns.append(coeffs.alpha)
    if which in ("both", "beta"):
        fns.append(coeffs.beta)
    for f in fns:
        if pool is None:
            for n in ns:
                f(n)
        else:
            list(pool.map(f, ns))


# ----------------------------------------------------------------------------
# L-functions

def xi_partial(coeffs: CoefficientSystem, sign: int, s: complex, cutoff: int,
               which: str = "alpha") -> tuple[complex, float]:
    """sum_{n <= cutoff} c(sign n) n^{-s} with a tail bound from |c(n)| <= C (1+n)^g."""
    s = complex(s)
    g = coeffs.growth
    if s.real <= g + 1:
        raise ValueError(f"Re(s) must exceed {g + 1} for absolute convergence")
    f = coeffs.alpha if which == "alpha" else coeffs.beta
    total = sum(f(sign * n) * n ** (-s) for n in range(1, cutoff + 1))
    C = coeffs.growth_constant(which)
    # (1+n)^g n^-sigma <= 2^g n^{g-sigma}; integral comparison
    tail = C * 2 ** g * cutoff ** (g + 1 - s.real) / (s.real - g - 1)
    return complex(total), float(tail)


def _lfe_rhs(f: lm.TestFunction, s: complex) -> np.ndarray:
    phi = np.array([complex(lm.local_zeta(f, 1 - s, 1)), complex(lm.local_zeta(f, 1 - s, -1))])
    g = complex(cgamma(np.array([s]))[0])
    return (2 * math.pi) ** (-s) * g * lm.gamma_matrix(s) @ phi


def dual_zeta_continued(f: lm.TestFunction, s: complex, radius: float = 0.05,
                        points: int = 32) -> np.ndarray:
    """(Phi_+(Ff;s), Phi_-(Ff;s)) through the local functional equation.

    Where Phi(f; 1-s) has a pole that the gamma matrix cancels, the value
    is the mean over a small circle; a non-cancelling pole raises.
    """
    s = complex(s)
    try:
        return _lfe_rhs(f, s)
    except ArithmeticError:
        pass
    dz = radius * np.exp(2j * np.pi * (np.arange(points) + 0.5) / points)
    vals = np.array([_lfe_rhs(f, s + d) for d in dz])
    res = (vals * dz[:, None]).mean(axis=0)
    mean = vals.mean(axis=0)
    if np.max(np.abs(res)) > 1e-9 * max(1.0, float(np.max(np.abs(mean)))):
        raise ArithmeticError(f"dual zeta has a pole at {s}")
    return mean


def _ft_vec(f: lm.TestFunction, t: np.ndarray) -> np.ndarray:
    v = f.ft_closed(t)
    if v is not None:
        return np.asarray(v, dtype=complex)
    return np.array([lm.fourier(f, tt) if tt != 0 else lm.fourier_at_zero(f) for tt in t])


def zeta_integral_check(coeffs: CoefficientSystem, f: lm.TestFunction, s: complex,
                        cutoff: int = 200) -> dict:
    """Compare int_0^inf t^{s-1} sum_{0<|n|<=M} alpha(n) Ff(nt) dt with
    xi_+(alpha;s) Phi_+(Ff;s) + xi_-(alpha;s) Phi_-(Ff;s), both truncated at M."""
    s = complex(s)
    ns = np.array([n for n in range(-cutoff, cutoff + 1) if n])
    a = np.array([coeffs.alpha(int(n)) for n in ns])

    def integrand(t):
        out = np.empty(t.shape, dtype=complex)
        for i, tt in enumerate(t):
            out[i] = np.sum(a * _ft_vec(f, ns * tt))
        return out * lm.cpow(t, s - 1)

    direct, _ = de_quad(integrand, 0.0, math.inf, abs_tol=1e-12, max_levels=8, strict=False)
    xp, tp = xi_partial(coeffs, 1, s, cutoff)
    xm, tm = xi_partial(coeffs, -1, s, cutoff)
    phi = dual_zeta_continued(f, s)
    fact = xp * phi[0] + xm * phi[1]
    return {"direct": direct, "factorized": complex(fact), "residual": abs(direct - fact),
            "tail_bound": (tp + tm) * float(np.max(np.abs(phi)))}


# ----------------------------------------------------------------------------
# summation formulas

def _value_at_infinity(f: lm.TestFunction) -> complex:
    """f(inf) = f_inf(0)."""
    return complex(f.infty()(0.0))


def _sum_terms(coef: Callable[[int], complex], ft: Callable[[np.ndarray], np.ndarray],
               scale: float, tol: float, max_terms: int, block: int = 16) -> tuple[complex, int, float]:
    """sum_{n != 0} coef(n) ft(n scale), extended in blocks until a block is negligible."""
    total = 0j
    n0 = 0
    last = math.inf
    while n0 < max_terms:
        ks = np.arange(n0 + 1, n0 + block + 1)
        ns = np.concatenate([ks, -ks])
        vals = ft(ns * scale)
        terms = np.array([coef(int(n)) for n in ns]) * vals
        total += np.sum(terms)
        n0 += block
        last = float(np.sum(np.abs(terms)))
        if last < tol * 1e-3:
            break
    # decay is at least geometric over blocks once terms are negligible
    return total, n0, 10 * last


def summation_sides(coeffs: CoefficientSystem, f: lm.TestFunction, tol: float = 1e-10,
                    max_terms: int = 4000) -> SummationReport:
    p = f.params
    finf = f.infty()
    lhs = coeffs.alpha_inf * _value_at_infinity(f) + coeffs.alpha0 * lm.fourier_at_zero(f)
    s1, n1, t1 = _sum_terms(coeffs.alpha, lambda t: _ft_vec(f, t), 1.0, tol, max_terms)
    lhs += s1
    rhs = (coeffs.beta_inf * 1j ** (p.ell % 4) * complex(f(0.0))
           + coeffs.beta0 * lm.fourier_at_zero(finf))
    s2, n2, t2 = _sum_terms(coeffs.beta, lambda t: _ft_vec(finf, t), 1.0 / coeffs.N, tol, max_terms)
    rhs += s2
    return SummationReport(complex(lhs), complex(rhs), max(n1, n2), t1 + t2)


def summation_check(coeffs: CoefficientSystem, f: lm.TestFunction, tol: float = 1e-10,
                    max_terms: int = 4000) -> SummationReport:
    """Both sides of the summation formula for the test function f."""
    _check_params(coeffs, f)
    return summation_sides(coeffs, f, tol, max_terms)


def twisted_summation_check(coeffs: CoefficientSystem, r: int, psi: DirichletCharacter,
                            f: lm.TestFunction, tol: float = 1e-10,
                            max_terms: int = 8000) -> SummationReport:
    """Both sides of the summation formula twisted by the Gauss sums of psi mod r."""
    _check_params(coeffs, f)
    if r % 2 == 0 or math.gcd(r, coeffs.N) != 1:
        raise ValueError("r must be an odd prime prime to N")
    p = f.params
    lam, ell = p.lam, p.ell
    ps = psi_star(psi, ell)
    finf = f.infty()
    ta = lambda n: gauss_sum_value(psi, n)
    tb = lambda n: gauss_sum_value(ps, n)
    lhs = ta(0) * (coeffs.alpha_inf * _value_at_infinity(f) + coeffs.alpha0 * lm.fourier_at_zero(f))
    s1, n1, t1 = _sum_terms(lambda n: coeffs.alpha(n) * ta(n), lambda t: _ft_vec(f, t),
                            1.0, tol, max_terms)
    lhs += s1
    inner = (coeffs.beta0 * tb(0) * lm.fourier_at_zero(finf))
    s2, n2, t2 = _sum_terms(lambda n: coeffs.beta(n) * tb(n), lambda t: _ft_vec(finf, t),
                            1.0 / (coeffs.N * r * r), tol, max_terms)
    inner += s2
    front = (complex(coeffs.chi(r)).conjugate() * c_ell_r(ell, r).value * ps(-coeffs.N))
    rhs = front * (r ** (-2 * lam) * coeffs.beta_inf * tb(0) * 1j ** (ell % 4) * complex(f(0.0))
                   + r ** (2 * lam - 2) * inner)
    return SummationReport(complex(lhs), complex(rhs), max(n1, n2),
                           t1 + abs(front * r ** (2 * lam - 2)) * t2)


def _check_params(coeffs: CoefficientSystem, f: lm.TestFunction):
    p = f.params
    if abs(p.lam - coeffs.lam) > 1e-14 or p.ell != coeffs.ell:
        raise ValueError("test function parameters differ from the coefficient system")
    v = 1 - 2 * p.lam
    if abs(v.imag) < 1e-12 and v.real > -1e-12 and abs(v.real - round(v.real)) < 1e-12:
        raise ValueError("lambda is excluded (1/2 - k/2)")


# ----------------------------------------------------------------------------
# Maass forms

@dataclass(frozen=True)
class MaassEvalSpec:
    tol: float = 1e-10
    m_min: int = 16
    m_max: int = 20000

    def __post_init__(self):
        if self.m_min < 10:
            raise ValueError("m_min must be at least 10")

    def terms(self, y: float, growth: float) -> int:
        """M(y) = max(m_min, ceil((ln(1/tol) + (g+2) ln(max(1/y, e))) / (2 pi y)))."""
        M = math.ceil((math.log(1 / self.tol) + (growth + 2) * math.log(max(1 / y, math.e)))
                      / (2 * math.pi * y))
        M = max(self.m_min, M)
        if M > self.m_max:
            raise TruncationError(f"y = {y:.3g} needs {M} terms, above the limit {self.m_max}")
        return M


class TruncationError(RuntimeError):
    pass


def _constant_factor(lam: complex, ell: int) -> complex:
    v = 2 * lam - 1
    if abs(v.imag) < 1e-14 and v.real <= 1e-14 and abs(v.real - round(v.real)) < 1e-14:
        raise ArithmeticError("Gamma(2 lambda - 1) has a pole at this lambda")
    g = complex(cgamma(np.array([v]))[0])
    den = rgamma(np.array([lam + ell / 4]))[0] * rgamma(np.array([lam - ell / 4]))[0]
    return complex(2 * math.pi * 2 ** (1 - 2 * lam) * g * den)


def whittaker_series(coef: Callable[[int], complex], lam: complex, ell: int, z: complex,
                     M: int) -> complex:
    """sum_{0<|n|<=M} coef(n) i^{-ell/2} pi^lam |n|^{lam-1}/Gamma(lam+sgn(n) ell/4)
    y^{-ell/4} W_{sgn(n) ell/4, lam-1/2}(4 pi |n| y) e^{2 pi i n x}."""
    x, y = z.real, z.imag
    ph = cmath.exp(-1j * math.pi * ell / 4)
    n = np.arange(1, M + 1)
    out = 0j
    for sg in (1, -1):
        mu = sg * ell / 4
        c = np.array([coef(int(sg * k)) for k in n])
        W = whittaker_w(mu, lam - 0.5, 4 * np.pi * n * y)
        out += np.sum(c * n ** (lam - 1) * W * np.exp(2j * np.pi * sg * n * x)) * rgamma(np.array([lam + mu]))[0]
    return complex(ph * np.pi ** lam * y ** (-ell / 4) * out)


def maass_F(coeffs: CoefficientSystem, z: complex, spec: MaassEvalSpec = MaassEvalSpec()) -> complex:
    lam, ell = coeffs.lam, coeffs.ell
    y = z.imag
    M = spec.terms(y, coeffs.growth)
    ph = cmath.exp(-1j * math.pi * ell / 4)
    head = (coeffs.alpha_inf * y ** (lam - ell / 4)
            + coeffs.alpha0 * ph * _constant_factor(lam, ell) * y ** (1 - lam - ell / 4))
    return complex(head + whittaker_series(coeffs.alpha, lam, ell, z, M))


def maass_G(coeffs: CoefficientSystem, z: complex, spec: MaassEvalSpec = MaassEvalSpec()) -> complex:
    lam, ell, N = coeffs.lam, coeffs.ell, coeffs.N
    y = z.imag
    M = spec.terms(y, coeffs.growth)
    ph = cmath.exp(-1j * math.pi * ell / 4)
    head = (N ** lam * coeffs.beta_inf * y ** (lam - ell / 4)
            + N ** (1 - lam) * coeffs.beta0 * ph * _constant_factor(lam, ell) * y ** (1 - lam - ell / 4))
    return complex(head + N ** (1 - lam) * whittaker_series(coeffs.beta, lam, ell, z, M))


def poisson_transform(coeffs: CoefficientSystem, z: complex, M: int) -> complex:
    """alpha(inf) p(inf) + sum_{|n|<=M} alpha(n) F p(n) with p = p_{lambda,ell,z}."""
    p = lm.PSParams(coeffs.lam, coeffs.ell)
    ns = np.arange(-M, M + 1)
    ft = lm.poisson_kernel_ft(p, z, ns.astype(float))
    c = np.array([coeffs.alpha(int(n)) for n in ns])
    return complex(coeffs.alpha_inf * z.imag ** (p.lam - p.ell / 4) + np.sum(c * ft))


DEFAULT_GRID = tuple(complex(x, y) for x in (-0.3, 0.0, 0.4) for y in (0.5, 1.0, 2.0))


def parity_ok(chi: Callable[[int], complex], ell: int) -> bool:
    """chi(-1) must be i^ell (ell even) or 1 (ell odd) for non-zero Maass forms."""
    want = 1j ** (ell % 4) if ell % 2 == 0 else 1
    return abs(complex(chi(-1)) - want) < 1e-12


def lift_gamma(gamma: Mat2, ell: int) -> GTilde:
    return gamma_star(gamma) if ell % 2 else GTilde(gamma)


def maass_wN_check(coeffs: CoefficientSystem, grid: Iterable[complex] = DEFAULT_GRID,
                   spec: MaassEvalSpec = MaassEvalSpec()) -> float:
    """max |(F |_ell w_N)(z) - G(z)| over the grid."""
    wN = lift("wN", coeffs.N)
    F = lambda w: maass_F(coeffs, w, spec)
    return max(abs(slash(F, coeffs.ell, wN, z) - maass_G(coeffs, z, spec)) for z in grid)


def maass_automorphy_check(coeffs: CoefficientSystem, gammas: Iterable[Mat2],
                           chi: Callable[[int], complex] | None = None,
                           grid: Iterable[complex] = DEFAULT_GRID,
                           spec: MaassEvalSpec = MaassEvalSpec()) -> float:
    """max |(F |_ell gamma~)(z) - chi(d) F(z)| over the grid and the gammas."""
    chi = chi or coeffs.chi
    if not parity_ok(chi, coeffs.ell):
        raise ValueError("character parity rules out non-zero Maass forms")
    F = lambda w: maass_F(coeffs, w, spec)
    grid = list(grid)
    base = {z: F(z) for z in grid}
    worst = 0.0
    for g in gammas:
        if int(g.c) % coeffs.N:
            raise ValueError(f"{g} is not in Gamma_0({coeffs.N})")
        gt = lift_gamma(g, coeffs.ell)
        cd = complex(chi(int(g.d)))
        for z in grid:
            worst = max(worst, abs(slash(F, coeffs.ell, gt, z) - cd * base[z]))
    return worst


def laplacian_check(coeffs: CoefficientSystem, z: complex, spec: MaassEvalSpec = MaassEvalSpec(),
                    h: float = 1e-2) -> float:
    """|Delta F - (lambda - ell/4)(1 - lambda - ell/4) F| by finite differences,
    Richardson-combined over steps h and h/2."""
    lam, ell = coeffs.lam, coeffs.ell
    F = lambda w: maass_F(coeffs, w, spec)
    ev = (lam - ell / 4) * (1 - lam - ell / 4)
    d1 = lm.weight_laplacian(F, z, ell, h)
    d2 = lm.weight_laplacian(F, z, ell, h / 2)
    d = (16 * d2 - d1) / 15
    return abs(d - ev * F(z))


def sensitivity(coeffs: CoefficientSystem, f: lm.TestFunction, eps: float = 0.01,
                tol: float = 1e-10) -> dict[str, float]:
    """Summation residual after scaling each of alpha(0), alpha(inf), beta(0), beta(inf) by 1+eps."""
    out = {"base": summation_check(coeffs, f, tol).residual}
    for key in ("alpha0", "alpha_inf", "beta0", "beta_inf"):
        out[key] = summation_check(coeffs.perturbed(**{key: 1 + eps}), f, tol).residual
    return out
