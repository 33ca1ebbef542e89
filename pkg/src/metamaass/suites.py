"""Verification suites driven by ``metamaass verify`` and the acceptance tests.

A suite expands into named tasks; each task returns a residual that is
compared with a tolerance (exact checks use residual = number of
mismatches and tolerance 0).
"""

from __future__ import annotations

import math
import random
import time
from concurrent.futures import Executor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable

import numpy as np

from . import automorphy as au
from . import line_model as lm
from . import metaplectic as mp
from . import quadform as qfm
from .arith import (Cyc, characters_mod, cyc_modulus, gauss_sum, gauss_sum_direct,
                    kronecker_char, legendre_character)
from .metaplectic import GTilde, Mat2, Mu4, Surd
from .specfun import QuadratureSpec, cgamma, fourier_integral, whittaker_w, zeta

SUITES = ("cocycle", "theta", "specfun", "lfe", "counting", "gauss", "phi-hat",
          "summation", "twisted", "maass")

DEFAULT_TOLERANCES = {
    "theta.multiplier": 1e-8,
    "theta.slash_composition": 1e-12,
    "specfun.gamma_reflection": 1e-10,
    "specfun.gamma_recurrence": 1e-12,
    "specfun.whittaker_closed": 1e-9,
    "specfun.whittaker_ode": 1e-4,
    "specfun.fourier_integral": 1e-9,
    "lfe.gaussian_closed": 1e-8,
    "lfe.odd_gaussian_closed": 1e-8,
    "lfe.gaussian": 1e-8,
    "lfe.odd_gaussian": 1e-8,
    "lfe.poisson": 1e-6,
    "lfe.residues": 1e-8,
    "lfe.poisson_ft": 1e-6,
    "lfe.poisson_ft_zero": 1e-12,
    "counting.series": 1.0,
    "counting.z0_closed": 1e-8,
    "summation.gaussian": 1e-6,
    "summation.poisson": 1e-5,
    "summation.sensitivity": 1.0,
    "twisted": 1e-5,
    "maass.automorphy": 1e-5,
    "maass.wN": 1e-5,
    "maass.laplacian": 1e-3,
}

# errors meaning "the computation ran out of budget", not "the identity failed"
BUDGET_ERRORS = (qfm.BudgetError, qfm.StabilizationError, au.TruncationError)


@dataclass(frozen=True)
class System:
    """One coefficient system to verify: a form with (lambda, ell)."""

    label: str
    form: qfm.QuadraticFormData
    lam: complex
    ell: int
    primes: tuple[int, ...] = (3, 5)
    chi: str = "K"          # "K", "trivial" or a square class d for Q(sqrt d)

    def coefficients(self) -> qfm.CoefficientSystem:
        return _coefficients(self.form, self.lam, self.ell)

    def character(self) -> Callable[[int], complex]:
        if self.chi == "K":
            return self.form.chi_K(self.ell)
        if self.chi == "trivial":
            return lambda d: 1
        return kronecker_char(int(self.chi))


_CS_MEMO: dict = {}


def _coefficients(form, lam, ell) -> qfm.CoefficientSystem:
    # shared across suites so the coefficient memo is reused
    key = (form.digest, complex(lam), ell)
    cs = _CS_MEMO.get(key)
    if cs is None:
        cs = _CS_MEMO[key] = qfm.coefficient_system(form, lam, ell)
    return cs


@dataclass
class Settings:
    tol: float = 1e-10
    summation_terms: int = 8000
    euler_primes: int = 5000
    brute_terms: int = 2000
    maass_terms: int = 20000
    grid: tuple[complex, ...] = au.DEFAULT_GRID
    seed: int = 0
    tolerances: dict[str, float] = field(default_factory=dict)

    def tolerance(self, name: str) -> float:
        for key in (name, name.split("[")[0], name.split(".")[0]):
            if key in self.tolerances:
                return self.tolerances[key]
            if key in DEFAULT_TOLERANCES:
                return DEFAULT_TOLERANCES[key]
        return 0.0

    def rng(self, *tags) -> random.Random:
        return random.Random(":".join([str(self.seed), *map(str, tags)]))

    def maass_spec(self) -> au.MaassEvalSpec:
        return au.MaassEvalSpec(tol=self.tol, m_max=self.maass_terms)


@dataclass(frozen=True)
class Task:
    name: str
    tol: float
    run: Callable[[], float]


@dataclass(frozen=True)
class CheckRecord:
    name: str
    residual: float
    tol: float
    passed: bool
    seconds: float


def execute(tasks: Iterable[Task], pool: Executor | None = None) -> list[CheckRecord]:
    """Run tasks (in parallel when a pool is given); records keep task order."""

    def one(t: Task) -> CheckRecord:
        t0 = time.perf_counter()
        r = float(t.run())
        ok = bool(np.isfinite(r) and r <= t.tol)
        return CheckRecord(t.name, r, t.tol, ok, time.perf_counter() - t0)

    tasks = list(tasks)
    if pool is None:
        return [one(t) for t in tasks]
    return list(pool.map(one, tasks))


def build(suite: str, systems: list[System], st: Settings) -> list[Task]:
    names = SUITES if suite == "all" else (suite,)
    out = []
    for s in names:
        if s not in SUITES:
            raise ValueError(f"unknown suite {s!r}")
        out.extend(_BUILDERS[s](systems, st))
    return out


def _task(st: Settings, name: str, fn: Callable[[], float]) -> Task:
    return Task(name, st.tolerance(name), fn)


# ----------------------------------------------------------------------------
# cocycle

def _rand_frac(rng: random.Random, lo=-12, hi=12) -> Fraction:
    return Fraction(rng.randint(lo, hi), rng.randint(1, 7))


def random_element(rng: random.Random) -> GTilde:
    """A random product of lifts with a random central factor."""
    parts = []
    for _ in range(rng.randint(1, 4)):
        k = rng.randrange(4)
        if k == 0:
            parts.append(mp.lift("n", _rand_frac(rng)))
        elif k == 1:
            parts.append(mp.lift("nbar", _rand_frac(rng)))
        elif k == 2:
            a = _rand_frac(rng, 1, 9) * rng.choice([1, -1])
            parts.append(mp.lift("d", a))
        else:
            parts.append(mp.W if rng.random() < 0.5 else mp.inv(mp.W))
    parts.append(mp.central(Mu4(rng.randrange(4))))
    return mp.prod(*parts)


def _random_gamma0_entries(rng: random.Random, N: int) -> tuple[int, int, int, int]:
    """(a, b, c, d) with a d - b c N = 1 and a != 0."""
    while True:
        a = rng.choice([1, -1]) * rng.randint(1, 9)
        b, c = rng.randint(-9, 9), rng.randint(-9, 9)
        if (1 + b * c * N) % a == 0:
            return a, b, c, (1 + b * c * N) // a


def _sigma_rule(a: int, b: int, c: int) -> int:
    return -1 if (a < 0 and b > 0 and c >= 0) or (a < 0 and b <= 0 and c < 0) else 1


def identity_failures(rng: random.Random, count: int) -> int:
    bad = 0
    W = mp.W
    for _ in range(count):
        x = _rand_frac(rng)
        bad += mp.prod(W, mp.lift("n", x), mp.inv(W)) != mp.lift("nbar", -x)
        N = rng.randint(1, 40)
        wN = mp.lift("wN", N)
        bad += wN != mp.mul(W, mp.lift("d", Surd.sqrt(N)))
        bad += mp.mul(wN, mp.inv(W)) != mp.lift("d", Surd.sqrt(N).inverse())
        a, b, c, d = _random_gamma0_entries(rng, N)
        xi = Mu4(rng.randrange(4))
        lhs = mp.prod(mp.inv(wN), GTilde(Mat2.of(a, b, c * N, d), xi), wN)
        rhs = GTilde(Mat2.of(d, -c, -b * N, a), xi * _sigma_rule(a, b, c))
        bad += lhs != rhs
    return bad


def _cocycle(systems, st):
    def assoc():
        rng, bad = st.rng("assoc"), 0
        for _ in range(1000):
            a, b, c = (random_element(rng) for _ in range(3))
            bad += mp.mul(mp.mul(a, b), c) != mp.mul(a, mp.mul(b, c))
        return bad

    def projection():
        rng, bad = st.rng("proj"), 0
        for _ in range(1000):
            a, b = random_element(rng), random_element(rng)
            bad += mp.mul(a, b).g != a.g @ b.g
        return bad

    def hom():
        rng, bad = st.rng("hom"), 0
        for _ in range(500):
            g1, g2 = mp.random_gamma0(4, 60, rng=rng), mp.random_gamma0(4, 60, rng=rng)
            bad += mp.gamma_star(g1 @ g2) != mp.mul(mp.gamma_star(g1), mp.gamma_star(g2))
        return bad

    def create():
        bad = 0
        for r in (3, 5, 7):
            for m in range(-2 * r, 2 * r + 1):
                if m % r:
                    for ell in (0, 1, 2, 3):
                        lhs, rhs = mp.create_element_identity(4, r, m, ell)
                        bad += lhs != rhs
        return bad

    return [_task(st, "cocycle.associativity", assoc),
            _task(st, "cocycle.projection", projection),
            _task(st, "cocycle.identities", lambda: identity_failures(st.rng("ids"), 100)),
            _task(st, "cocycle.gamma_star_hom", hom),
            _task(st, "cocycle.create_element", create)]


# ----------------------------------------------------------------------------
# theta

THETA_POINTS = (1j, 0.3 + 0.9j, -0.4 + 2j)


def _theta(systems, st):
    def multiplier():
        rng, worst = st.rng("theta"), 0.0
        for _ in range(50):
            g = mp.random_gamma0(4, 40, rng=rng)
            for z in THETA_POINTS:
                q = mp.theta(g.act(z)) / mp.theta(z)
                worst = max(worst, abs(mp.theta_multiplier(g, z) - q))
        return worst

    def composition():
        rng, worst = st.rng("slash"), 0.0
        F = lambda z: np.exp(2j * np.pi * z) / (z + 2j) ** 1.5
        for _ in range(10):
            a, b = random_element(rng), random_element(rng)
            z = complex(rng.uniform(-1, 1), rng.uniform(0.5, 2))
            for ell in range(4):
                one = mp.slash(F, ell, mp.mul(a, b), z)
                two = mp.slash(lambda w: mp.slash(F, ell, a, w), ell, b, z)
                worst = max(worst, abs(one - two) / max(1.0, abs(one)))
        return worst

    return [_task(st, "theta.multiplier", multiplier),
            _task(st, "theta.slash_composition", composition)]


# ----------------------------------------------------------------------------
# special functions

def _specfun(systems, st):
    def reflection():
        s = np.array([complex(x, y) for x in np.linspace(-3.3, 3.7, 8) for y in (-2.1, 0.0, 0.7, 3.0)])
        v = cgamma(s) * cgamma(1 - s) * np.sin(np.pi * s) / np.pi
        return float(np.max(np.abs(v - 1)))

    def recurrence():
        s = np.array([complex(x, y) for x in np.linspace(-4.6, 6.2, 9) for y in (-1.5, 0.2, 2.5)])
        return float(np.max(np.abs(cgamma(s + 1) / (s * cgamma(s)) - 1)))

    def closed():
        e1 = abs(whittaker_w(0, 0.5, 2.0) - math.exp(-1))
        e2 = abs(whittaker_w(1, 0.5, 1.0) - math.exp(-0.5))
        return max(e1, e2 / math.exp(-0.5))

    def ode():
        worst = 0.0
        for mu, nu in ((0.25, 0.4), (-0.25, 0.4), (0.5, 0.2 + 0.3j), (-0.75, 0.7)):
            for x in np.geomspace(0.5, 40, 9):
                h = 1e-3 * x
                w = whittaker_w(mu, nu, np.array([x - h, x, x + h]))
                d2 = (w[0] - 2 * w[1] + w[2]) / h ** 2
                res = d2 + (-0.25 + mu / x + (0.25 - nu ** 2) / x ** 2) * w[1]
                worst = max(worst, abs(res) / abs(w[1]))
        return worst

    def fourier():
        spec = QuadratureSpec(abs_tol=1e-12)
        g = lambda x: np.exp(-np.pi * x ** 2)
        c = lambda x: 1 / (1 + x ** 2)
        return max(abs(fourier_integral(g, 0.0, spec) - 1),
                   abs(fourier_integral(g, 1.0, spec) - math.exp(-math.pi)),
                   abs(fourier_integral(c, 1.0, spec) - math.pi * math.exp(-2 * math.pi)))

    return [_task(st, "specfun.gamma_reflection", reflection),
            _task(st, "specfun.gamma_recurrence", recurrence),
            _task(st, "specfun.whittaker_closed", closed),
            _task(st, "specfun.whittaker_ode", ode),
            _task(st, "specfun.fourier_integral", fourier)]


# ----------------------------------------------------------------------------
# line model: local functional equation, residues, Poisson transform

LFE_GRID = tuple(complex(x, y) for x in (0.15, 0.5, 0.85, 1.4, 2.3) for y in (-1.2, 0.0, 0.6, 2.0))
CLOSED_GRID = tuple(complex(x, y) for x in (-1.6, -0.3, 0.5, 1.7, 3.1) for y in (-1.2, 0.0, 0.6, 2.0))
LFE_PARAMS = (lm.PSParams(0.8, 0), lm.PSParams(0.7 + 0.3j, 2))
POISSON_PARAMS = tuple(lm.PSParams(lam, ell) for lam in (0.8, 0.7 + 0.3j) for ell in (0, 2))


def gaussian_zeta(s: complex, odd: bool, sign: int) -> complex:
    """The closed local zeta values of the two Gaussians."""
    from scipy.special import gamma
    if odd:
        return sign * 0.5 * np.pi ** (-(s + 1) / 2) * gamma((s + 1) / 2)
    return 0.5 * np.pi ** (-s / 2) * gamma(s / 2)


def _lfe(systems, st):
    def closed(odd):
        def run():
            worst = 0.0
            for p in LFE_PARAMS:
                f = lm.odd_gaussian(p) if odd else lm.gaussian(p)
                for s in CLOSED_GRID:
                    for sg in (1, -1):
                        v = complex(lm.local_zeta(f, s, sg))
                        worst = max(worst, abs(v - gaussian_zeta(s, odd, sg)))
            return worst
        return run

    def lfe(make, params, grid):
        return lambda: max(lm.lfe_residual(make(p), s) for p in params for s in grid)

    def residues():
        p = lm.PSParams(0.7 + 0.3j, 2)
        worst = 0.0
        for f in (lm.gaussian(p), lm.hermite_gaussian(3, p), lm.PoissonKernel(0.5 + 1j, p)):
            for s0 in (0, -1):
                for sg in (1, -1):
                    k = -s0
                    want = sg ** k * f.deriv(k, 0.0) / math.factorial(k)
                    worst = max(worst, abs(lm.numeric_residue(f, s0, sg) - complex(want)))
        return worst

    def poisson_ft():
        worst = 0.0
        for p in (lm.PSParams(1, 0), lm.PSParams(0.7 + 0.3j, 2)):
            f = lm.PoissonKernel(1j, p)
            for t in (1.0, -1.0, 2.0, -2.0):
                q = lm.fourier(f, t, method="quad", tol=1e-12)
                worst = max(worst, abs(q - complex(lm.poisson_kernel_ft(p, 1j, t))))
        return worst

    def poisson_zero():
        p = lm.PSParams(1, 0)
        v = complex(lm.poisson_kernel_ft(p, 1j, 0.0))
        return max(abs(v - math.pi), abs(lm.fourier_at_zero(lm.PoissonKernel(1j, p)) - math.pi))

    return [_task(st, "lfe.gaussian_closed", closed(False)),
            _task(st, "lfe.odd_gaussian_closed", closed(True)),
            _task(st, "lfe.gaussian", lfe(lm.gaussian, LFE_PARAMS, LFE_GRID)),
            _task(st, "lfe.odd_gaussian", lfe(lm.odd_gaussian, LFE_PARAMS, LFE_GRID)),
            _task(st, "lfe.poisson", lfe(lambda p: lm.PoissonKernel(1j, p), POISSON_PARAMS,
                                         (0.4, 0.3 + 0.5j))),
            _task(st, "lfe.residues", residues),
            _task(st, "lfe.poisson_ft", poisson_ft),
            _task(st, "lfe.poisson_ft_zero", poisson_zero)]


# ----------------------------------------------------------------------------
# counting

COUNTING_FORMS = (((1,),), ((2,),), ((1, 0), (0, -1)))


def r_histogram(qf: qfm.QuadraticFormData, l: int) -> np.ndarray:
    """[r(l, n) for n mod l] by enumerating all of (Z/l)^m."""
    V = qfm.coset_box([[l * int(i == j) for j in range(qf.m)] for i in range(qf.m)])
    vals = qfm._quad_values(V, qf.S) // 2
    return np.bincount(vals % l, minlength=l)


def r_star_histogram(qf: qfm.QuadraticFormData, l: int) -> np.ndarray:
    """[r*(l, n) for n mod N l] by enumerating Z^m / 2lA Z^m."""
    V = qfm.coset_box([[l * x for x in row] for row in qf.S])
    num = qf.N * qfm._quad_values(V, qfm._adjugate(qf.S))
    if np.any(num % (2 * qf.D)):
        raise ArithmeticError("non-integral dual value")
    mod = qf.N * l
    return np.bincount((num // (2 * qf.D)) % mod, minlength=mod)


def _counting_forms(systems):
    forms = {}
    for A in COUNTING_FORMS:
        qf = qfm.analyze(A)
        forms[qf.digest] = qf
    for s in systems:
        forms.setdefault(s.form.digest, s.form)
    return list(forms.values())


def _counting(systems, st):
    forms = _counting_forms(systems)

    def crt():
        bad = 0
        for qf in forms:
            hist = {}
            get = lambda l: hist.setdefault(l, r_histogram(qf, l))
            for l1 in range(1, 31):
                for l2 in range(l1, 31):
                    if math.gcd(l1, l2) != 1:
                        continue
                    h, h1, h2 = get(l1 * l2), get(l1), get(l2)
                    n = np.arange(l1 * l2)
                    bad += int(np.count_nonzero(h != h1[n % l1] * h2[n % l2]))
            hist.clear()
        return bad

    def engine():
        bad = 0
        for qf in forms:
            cnt = qfm.counter_for(qf)
            for l in range(1, 31):
                h = r_histogram(qf, l)
                bad += sum(cnt.r(l, n) != h[n] for n in range(l))
                hs = r_star_histogram(qf, l)
                bad += sum(cnt.r_star(l, n) != hs[n] for n in range(qf.N * l))
        return bad

    def hensel():
        bad = 0
        for qf in forms:
            cnt = qfm.counter_for(qf)
            m = qf.m
            for p in (3, 5, 7, 11, 13):
                if (2 * qf.D) % p == 0:
                    continue
                k = 1
                while p ** ((k + 1) * m) <= 2 * 10 ** 6:
                    lo, hi = r_histogram(qf, p ** k), r_histogram(qf, p ** (k + 1))
                    n = np.arange(p ** (k + 1))
                    keep = n % p != 0
                    bad += int(np.count_nonzero((hi != p ** (m - 1) * lo[n % p ** k])[keep]))
                    k += 1
                for k in range(1, 8):
                    for n in (1, 2, -1, 6):
                        if n % p:
                            bad += cnt.r(p ** (k + 1), n) != p ** (m - 1) * cnt.r(p ** k, n)
        return bad

    def series():
        worst = 0.0
        for qf in forms:
            L = st.brute_terms if qf.m == 1 else min(st.brute_terms, 400)
            for n in (0, 1, -1, 2, 3, 5, -4, 12):
                for w in (3.5, 4.0):
                    for f in (qfm.z_series, qfm.z_star_series):
                        c = f(qf, n, w)
                        e = f(qf, n, w, method="euler", cutoff=st.euler_primes)
                        b = f(qf, n, w, method="brute", cutoff=L)
                        for x, y in ((e, b), (c, b), (c, e)):
                            bound = x.tail_bound + y.tail_bound + 1e-12 * (1 + abs(x.value))
                            worst = max(worst, abs(x.value - y.value) / bound)
        return worst

    def z0():
        qf = qfm.analyze([[1]])
        want = complex(zeta(7) * zeta(4) / zeta(8))
        return abs(qfm.z_series(qf, 0, 4).value - want)

    return [_task(st, "counting.crt", crt),
            _task(st, "counting.engine_vs_enumeration", engine),
            _task(st, "counting.hensel", hensel),
            _task(st, "counting.series", series),
            _task(st, "counting.z0_closed", z0)]


# ----------------------------------------------------------------------------
# Gauss sums and characters

def _gauss(systems, st):
    primes = (3, 5, 7, 11)

    def norms():
        bad = 0
        for r in primes:
            for psi in characters_mod(r):
                if not psi.principal:
                    t = gauss_sum_direct(psi, 1)
                    bad += t * t.conj() != Cyc.rational(cyc_modulus(r), r)
        return bad

    def closed_rule():
        bad = 0
        for r in primes:
            M = cyc_modulus(r)
            for psi in characters_mod(r):
                bad += sum(gauss_sum(psi, n, M) != gauss_sum_direct(psi, n, M) for n in range(r))
        return bad

    def multiplicative():
        bad = 0
        for r in (3, 5, 7, 11):
            for psi in characters_mod(r):
                for a in range(r):
                    for b in range(r):
                        e = psi.exponent(a * b)
                        ea, eb = psi.exponent(a), psi.exponent(b)
                        if e is None:
                            bad += ea is not None and eb is not None
                        else:
                            bad += (ea is None or eb is None
                                    or (ea + eb - e) % (r - 1) != 0)
        return bad

    def orthogonality():
        bad = 0
        for r in primes:
            M = cyc_modulus(r)
            chars = characters_mod(r)
            for m1 in range(1, r):
                for m2 in range(1, r):
                    tot = Cyc.zero(M)
                    for psi in chars:
                        tot = tot + psi.cyc(m1, M) * psi.cyc(m2, M).conj()
                    bad += tot != Cyc.rational(M, (r - 1) * (m1 == m2))
        return bad

    def legendre():
        bad = 0
        for r in primes:
            leg = legendre_character(r)
            for a in range(1, r):
                sq = any(x * x % r == a for x in range(1, r))
                bad += leg.exponent(a) != (0 if sq else (r - 1) // 2)
        return bad

    return [_task(st, "gauss.norm", norms),
            _task(st, "gauss.closed_rule", closed_rule),
            _task(st, "gauss.multiplicative", multiplicative),
            _task(st, "gauss.orthogonality", orthogonality),
            _task(st, "gauss.legendre", legendre)]


# ----------------------------------------------------------------------------
# transform of phi_psi

def phi_hat_failures(qf: qfm.QuadraticFormData, r: int, rng: random.Random, count: int = 10) -> int:
    bad = 0
    for psi in characters_mod(r):
        for _ in range(count):
            y = [Fraction(rng.randint(-2 * r, 2 * r), r) for _ in range(qf.m + 2)]
            bad += not qfm.phi_psi_hat(qf, psi, y).agree
        off = [Fraction(1, 2 * r)] + [Fraction(0)] * (qf.m + 1)
        res = qfm.phi_psi_hat(qf, psi, off)
        bad += not (res.agree and res.direct == Cyc.zero(cyc_modulus(r)))
    return bad


def _phi_hat(systems, st):
    out = []
    for s in systems:
        for r in s.primes:
            if s.form.N % r:
                out.append(_task(st, f"phi-hat[{s.label},r={r}]",
                                 lambda s=s, r=r: phi_hat_failures(s.form, r, st.rng("phi", s.label, r))))
    return out


# ----------------------------------------------------------------------------
# summation formulas

def _summation(systems, st):
    out = []
    for s in systems:
        p = lm.PSParams(s.lam, s.ell)
        out.append(_task(st, f"summation.gaussian[{s.label}]",
                         lambda s=s, p=p: au.summation_check(
                             s.coefficients(), lm.gaussian(p), st.tol, st.summation_terms).residual))
        out.append(_task(st, f"summation.poisson[{s.label}]",
                         lambda s=s, p=p: au.summation_check(
                             s.coefficients(), lm.PoissonKernel(2j, p), st.tol,
                             st.summation_terms).residual))

        def sens(s=s, p=p):
            # the Gaussian has f(inf) = 0 and cannot see alpha(inf)
            rep = au.sensitivity(s.coefficients(), lm.PoissonKernel(2j, p), 0.01, st.tol)
            worst = min(v for k, v in rep.items() if k != "base")
            return 10 * rep["base"] / worst
        out.append(_task(st, f"summation.sensitivity[{s.label}]", sens))
    return out


def _twisted(systems, st):
    out = []
    for s in systems:
        p = lm.PSParams(s.lam, s.ell)
        for r in s.primes:
            if s.form.N % r == 0:
                continue
            for psi in characters_mod(r):
                out.append(_task(st, f"twisted[{s.label},r={r},psi={psi.index}]",
                                 lambda s=s, p=p, r=r, psi=psi: au.twisted_summation_check(
                                     s.coefficients(), r, psi, lm.gaussian(p), st.tol,
                                     st.summation_terms).residual))
    return out


# ----------------------------------------------------------------------------
# Maass forms

def automorphy_gammas(N: int, rng: random.Random, count: int = 10, c_max: int = 20) -> list[Mat2]:
    out = []
    while len(out) < count:
        g = mp.random_gamma0(N, c_max, rng=rng)
        if abs(int(g.c)) <= c_max:
            out.append(g)
    return out


def _maass(systems, st):
    out = []
    spec = st.maass_spec()
    for s in systems:
        def aut(s=s):
            gs = automorphy_gammas(s.form.N, st.rng("gamma", s.label))
            return au.maass_automorphy_check(s.coefficients(), gs, s.character(), st.grid, spec)

        out.append(_task(st, f"maass.automorphy[{s.label}]", aut))
        out.append(_task(st, f"maass.wN[{s.label}]",
                         lambda s=s: au.maass_wN_check(s.coefficients(), st.grid, spec)))
        out.append(_task(st, f"maass.laplacian[{s.label}]",
                         lambda s=s: au.laplacian_check(s.coefficients(), 0.1 + 1.2j, spec)))
    return out


_BUILDERS = {
    "cocycle": _cocycle,
    "theta": _theta,
    "specfun": _specfun,
    "lfe": _lfe,
    "counting": _counting,
    "gauss": _gauss,
    "phi-hat": _phi_hat,
    "summation": _summation,
    "twisted": _twisted,
    "maass": _maass,
}


def default_systems() -> list[System]:
    return [System("shintani", qfm.analyze([[1]]), 0.9, 1),
            System("indefinite", qfm.analyze([[1, 0], [0, -1]]), 1.2, 0)]
