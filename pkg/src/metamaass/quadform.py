"""Half-integral quadratic forms: invariants, representation counts modulo l,
the Dirichlet series Z(n, w) and Z*(n, w), the finite Fourier transform of
the Gauss-sum weighted lattice indicator, and coefficient systems.

Counting conventions:

* ``r(l, n)``  counts v in (Z/l)^m with  v^t A v = n (mod l);
* ``r*(l, n)`` counts v* in Z^m / 2lA Z^m with (N/4) v*^t A^{-1} v* = n (mod N l).

Both are handled by one engine working prime by prime.  Writing S = 2A, a
representative set is Z^m / p^k M Z^m with M = 1 (for r) or M = S (for r*),
and the value map is v -> v^t B v / den (mod c p^k) with

    r :  B = S,           den = 2,    c = 1
    r*:  B = N adj(S),    den = 2D,   c = N.

Solutions split into primitive ones (v not in pZ^m) and imprimitive ones
(v = p u).  Primitive counts grow by exactly p^{m-1} per level once Hensel
lifting applies; the stabilization level is found by enumeration and then
confirmed on two further levels.
"""

from __future__ import annotations

import hashlib
import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Sequence

import numpy as np
import sympy

from . import specfun
from .arith import (Cyc, DirichletCharacter, c_ell_r, cyc_modulus, gauss_sum,
                    is_prime, prime_factors, psi_star, sqrt_prime_cyc)

ENUMERATION_BUDGET = 10 ** 8
CONFIRM_BUDGET = 2 * 10 ** 6


class FormError(ValueError):
    """Invalid quadratic-form input (singular, not half-integral, malformed)."""

    def __init__(self, msg: str, line: int | None = None, col: int | None = None):
        where = f" (line {line}, column {col})" if line is not None else ""
        super().__init__(msg + where)
        self.line, self.col = line, col


class BudgetError(RuntimeError):
    """An enumeration would exceed the configured state budget."""


class StabilizationError(RuntimeError):
    """A local count did not settle into the p^{m-1} growth regime."""


# ----------------------------------------------------------------------------
# small exact linear algebra

def _frac_matrix(A) -> tuple[tuple[Fraction, ...], ...]:
    rows = tuple(tuple(Fraction(x) for x in row) for row in A)
    m = len(rows)
    if m == 0 or any(len(r) != m for r in rows):
        raise FormError("matrix must be square and nonempty")
    return rows


def _det(M) -> Fraction:
    return Fraction(sympy.Matrix(M).det())


def _adjugate(M: Sequence[Sequence[int]]) -> list[list[int]]:
    return [[int(x) for x in row] for row in sympy.Matrix(M).adjugate().tolist()]


def _signature(A) -> tuple[int, int]:
    """Counts of positive and negative eigenvalues, by Descartes' rule on the
    characteristic polynomial (exact because all roots are real)."""
    x = sympy.Symbol("x")
    coeffs = [sympy.Rational(c) for c in sympy.Matrix(A).charpoly(x).all_coeffs()]

    def changes(cs):
        signs = [sympy.sign(c) for c in cs if c != 0]
        return sum(1 for a, b in zip(signs, signs[1:]) if a != b)

    pos = changes(coeffs)
    deg = len(coeffs) - 1
    neg = changes([c * (-1) ** (deg - i) for i, c in enumerate(coeffs)])
    return pos, neg


def _hermite_lower(M: Sequence[Sequence[int]]) -> list[list[int]]:
    """Lower-triangular column Hermite form H = M U (U unimodular)."""
    H = [list(map(int, row)) for row in M]
    m = len(H)
    for i in range(m):
        for j in range(i + 1, m):
            a, b = H[i][i], H[i][j]
            if b == 0:
                continue
            g, x, y = _xgcd(a, b)
            # new col i = x*col_i + y*col_j ; new col j = (-b/g) col_i + (a/g) col_j
            for r in range(m):
                ci, cj = H[r][i], H[r][j]
                H[r][i] = x * ci + y * cj
                H[r][j] = (-b // g) * ci + (a // g) * cj
        if H[i][i] < 0:
            for r in range(m):
                H[r][i] = -H[r][i]
        if H[i][i] == 0:
            raise FormError("singular lattice matrix")
    return H


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q = a // b
        a, b = b, a - q * b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def coset_box(M: Sequence[Sequence[int]]) -> np.ndarray:
    """Representatives of Z^m / M Z^m as an (count, m) int64 array."""
    H = _hermite_lower(M)
    sizes = [H[i][i] for i in range(len(H))]
    total = math.prod(sizes)
    if total > ENUMERATION_BUDGET:
        raise BudgetError(f"enumeration of {total} cosets exceeds budget {ENUMERATION_BUDGET}")
    grids = np.indices(sizes, dtype=np.int64).reshape(len(sizes), -1)
    return grids.T


def _quad_values(V: np.ndarray, B: Sequence[Sequence[int]]) -> np.ndarray:
    Bm = np.asarray(B, dtype=np.int64)
    vmax = int(np.abs(V).max(initial=0))
    if vmax and len(B) ** 2 * int(np.abs(Bm).max()) * vmax * vmax >= 2 ** 62:
        raise BudgetError("integer overflow risk in quadratic form evaluation")
    return np.einsum("ki,ij,kj->k", V, Bm, V)


# ----------------------------------------------------------------------------
# form data

def _is_half_integral(A) -> bool:
    m = len(A)
    for i in range(m):
        for j in range(m):
            x = A[i][j]
            if i == j and x.denominator != 1:
                return False
            if i != j and (2 * x).denominator != 1:
                return False
    return True


def _divisors(n: int) -> list[int]:
    out = []
    for d in range(1, int(math.isqrt(n)) + 1):
        if n % d == 0:
            out.append(d)
            if d * d != n:
                out.append(n // d)
    return sorted(out)


@dataclass(frozen=True)
class QuadraticFormData:
    A: tuple[tuple[Fraction, ...], ...]
    m: int
    D: int
    p: int
    q: int
    N: int

    @property
    def S(self) -> list[list[int]]:
        return [[int(2 * x) for x in row] for row in self.A]

    @property
    def det_A(self) -> Fraction:
        return Fraction(self.D, 2 ** self.m)

    @property
    def digest(self) -> str:
        text = ";".join(",".join(str(x) for x in row) for row in self.A)
        return hashlib.sha256(text.encode()).hexdigest()[:16]

    def Q(self, x: Sequence[int]) -> int:
        """Q(x) = x_0 x_{m+1} + sum a_ij x_i x_j on Z^{m+2}."""
        inner = x[1:-1]
        val = Fraction(x[0] * x[-1])
        for i, a in enumerate(inner):
            for j, b in enumerate(inner):
                val += self.A[i][j] * a * b
        return int(val)

    def NQ_star(self, y: Sequence[int]) -> int:
        """N Q*(y), an integer for y in Z^{m+2}."""
        Ainv = sympy.Matrix(self.A).inv()
        inner = sympy.Matrix(y[1:-1])
        val = self.N * (y[0] * y[-1] + sympy.Rational(1, 4) * (inner.T * Ainv * inner)[0, 0])
        if not val.is_integer:
            raise ArithmeticError("N Q* is not integral; level is wrong")
        return int(val)

    def chi_K_disc(self, ell: int) -> int:
        """Fundamental discriminant of the character field for F."""
        if ell % 2 == 0:
            if self.m % 2:
                raise ValueError("even weight needs even m")
            return specfun.fundamental_discriminant((-1) ** (self.m // 2) * self.D)
        return specfun.fundamental_discriminant(2 * abs(self.D))

    def chi_K(self, ell: int) -> Callable[[int], int]:
        disc = self.chi_K_disc(ell)
        return lambda d: 1 if disc == 1 else specfun.kronecker(disc, d)


def analyze(A) -> QuadraticFormData:
    Af = _frac_matrix(A)
    m = len(Af)
    for i in range(m):
        for j in range(m):
            if Af[i][j] != Af[j][i]:
                raise FormError("matrix is not symmetric")
    if not _is_half_integral(Af):
        raise FormError("matrix is not half-integral (integer diagonal, half-integer off-diagonal)")
    S = [[2 * x for x in row] for row in Af]
    D = _det(S)
    if D == 0:
        raise FormError("matrix is singular")
    D = int(D)
    p, q = _signature(Af)
    Ainv = sympy.Matrix(Af).inv()
    N = None
    for cand in _divisors(4 * abs(D)):
        X = sympy.Rational(cand, 4) * Ainv
        if all(X[i, i].is_integer and (2 * X[i, j]).is_integer
               for i in range(m) for j in range(m)):
            N = cand
            break
    assert N is not None, "level search failed"
    return QuadraticFormData(Af, m, D, p, q, N)


def parse_form(text: str) -> QuadraticFormData:
    """Parse 'm = <int>' followed by m rows of exact rationals."""
    lines = [(i + 1, ln) for i, ln in enumerate(text.splitlines())
             if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise FormError("empty form file")
    lineno, head = lines[0]
    key, sep, val = head.partition("=")
    if not sep or key.strip() != "m":
        raise FormError("first line must read 'm = <int>'", lineno, 1)
    try:
        m = int(val.strip())
    except ValueError:
        raise FormError(f"bad size {val.strip()!r}", lineno, head.index("=") + 2) from None
    if m < 1:
        raise FormError("m must be positive", lineno, 1)
    rows = []
    for lineno, ln in lines[1:]:
        toks, pos = [], 0
        for tok in ln.replace(",", " ").split():
            col = ln.index(tok, pos) + 1
            pos = col
            try:
                toks.append(Fraction(tok))
            except (ValueError, ZeroDivisionError):
                raise FormError(f"not an exact rational: {tok!r}", lineno, col) from None
        if len(toks) != m:
            raise FormError(f"expected {m} entries, found {len(toks)}", lineno, 1)
        rows.append(toks)
    if len(rows) != m:
        raise FormError(f"expected {m} rows, found {len(rows)}", lines[-1][0], 1)
    return analyze(rows)


# ----------------------------------------------------------------------------
# the local counting engine

def _vp(n: int, p: int) -> int:
    if n == 0:
        return 10 ** 9
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


class _LocalCounter:
    """Counts r(p^k, n) or r*(p^k, n) for one prime p."""

    def __init__(self, qf: QuadraticFormData, p: int, dual: bool):
        self.qf, self.p, self.dual = qf, p, dual
        m = qf.m
        S = qf.S
        if dual:
            self.M = S
            self.B = [[qf.N * x for x in row] for row in _adjugate(S)]
            self.den = 2 * qf.D
            self.c = qf.N
        else:
            self.M = [[int(i == j) for j in range(m)] for i in range(m)]
            self.B = S
            self.den = 2
            self.c = 1
        self._hist: dict[int, np.ndarray] = {}
        self._lock = threading.Lock()
        self._ks: int | None = None

    # values of v^t B v / den
    def _values(self, V: np.ndarray) -> np.ndarray:
        num = _quad_values(V, self.B)
        if np.any(num % self.den):
            raise ArithmeticError("non-integral value in the dual congruence")
        return num // self.den

    def _box(self, k: int) -> np.ndarray:
        pk = self.p ** k
        return coset_box([[pk * x for x in row] for row in self.M])

    def prim_hist(self, k: int) -> np.ndarray:
        """prim_hist(k)[n] = #primitive v at level k with value = n mod c p^k."""
        with self._lock:
            h = self._hist.get(k)
        if h is not None:
            return h
        if k == 1 and self._good():
            h = self._good_hist()
            with self._lock:
                self._hist[k] = h
            return h
        V = self._box(k)
        mod = self.c * self.p ** k
        prim = np.any(V % self.p != 0, axis=1)
        vals = self._values(V[prim]) % mod
        h = np.bincount(vals, minlength=mod).astype(object)
        with self._lock:
            self._hist[k] = h
        return h

    def _good(self) -> bool:
        p = self.p
        return p != 2 and self.qf.D % p != 0 and (not self.dual or self.qf.N % p != 0)

    def _good_hist(self) -> np.ndarray:
        """Level-1 histogram at a prime not dividing 2DN, without enumeration.

        The box splits by CRT into Z^m/M Z^m (fixing the value mod c) times
        F_p^m, where the form is nondegenerate and the value counts are the
        classical ones.
        """
        p, m = self.p, self.qf.m
        det = self.qf.det_A
        if self.dual:
            det = Fraction(self.qf.N, 4) ** m / det
        disc = det.numerator * det.denominator

        def leg(a):
            return specfun.kronecker(a, p)

        g = np.empty(p, dtype=object)
        if m % 2:
            h = (m - 1) // 2
            g[0] = p ** (m - 1) - 1
            for a in range(1, p):
                g[a] = p ** (m - 1) + p ** h * leg((-1) ** h * a * disc)
        else:
            e = leg((-1) ** (m // 2) * disc)
            g[0] = p ** (m - 1) + e * (p - 1) * p ** (m // 2 - 1) - 1
            g[1:] = p ** (m - 1) - e * p ** (m // 2 - 1)
        h0, _ = self._small()
        mod = self.c * p
        return np.array([h0[n % self.c] * g[n % p] for n in range(mod)], dtype=object)

    @property
    def stable_level(self) -> int:
        """Level K with prim(k+1) = p^{m-1} prim(k) for all k >= K.

        Hensel lifting gives K = 1 for r* (a primitive x in the dual lattice
        has S x != 0 mod p) and for r at p not dividing 2D; otherwise
        K = 2 v_p(D) + 1.  The claim is confirmed on two further levels
        whenever that enumeration is cheap.
        """
        if self._ks is not None:
            return self._ks
        p, m = self.p, self.qf.m
        if self.dual or (p != 2 and self.qf.D % p):
            K = 1
        else:
            K = 2 * _vp(self.qf.D, p) + 1
        rho = p ** (m - 1)
        if self._box_size(K + 2) <= CONFIRM_BUDGET:
            if not (self._scales(K, rho) and self._scales(K + 1, rho)):
                raise StabilizationError(f"local counts at p={p} failed to stabilize at level {K}")
        self._ks = K
        return K

    def _box_size(self, k: int) -> int:
        return abs(self.qf.D if self.dual else 1) * self.p ** (k * self.qf.m)

    def _scales(self, k: int, rho: int) -> bool:
        lo, hi = self.prim_hist(k), self.prim_hist(k + 1)
        mod = len(lo)
        return all(hi[n] == rho * lo[n % mod] for n in range(len(hi)))

    def prim(self, k: int, n: int) -> int:
        K = self.stable_level
        if k <= K:
            h = self.prim_hist(k)
            return int(h[n % len(h)])
        h = self.prim_hist(K)
        return int(h[n % len(h)]) * self.p ** ((self.qf.m - 1) * (k - K))

    @lru_cache(maxsize=None)
    def _small(self) -> tuple[np.ndarray, np.ndarray]:
        """Histograms of val(u) mod c and of val(p u) mod c p over Z^m/MZ^m."""
        U = coset_box(self.M)
        vals = self._values(U)
        h0 = np.bincount(vals % self.c, minlength=self.c).astype(object)
        h1 = np.bincount((self.p ** 2 * vals) % (self.c * self.p),
                         minlength=self.c * self.p).astype(object)
        return h0, h1

    def base0(self, n: int) -> int:
        h0, _ = self._small()
        return int(h0[n % self.c])

    def imp1(self, n: int) -> int:
        _, h1 = self._small()
        return int(h1[n % (self.c * self.p)])

    def count(self, k: int, n: int) -> int:
        """The full count at modulus p^k."""
        if k == 0:
            return self.base0(n)
        if k == 1:
            return self.prim(1, n) + self.imp1(n)
        out = self.prim(k, n)
        if n % (self.p ** 2) == 0:
            out += self.p ** self.qf.m * self.count(k - 2, n // self.p ** 2)
        return out

    def series(self, n: int, w: complex) -> complex:
        """sum_k count(k, n) p^{-kw} in closed form."""
        p, m = self.p, self.qf.m
        X = complex(p) ** (-complex(w))
        rho = p ** (m - 1)
        if abs(rho * X) >= 1:
            raise ValueError("local series diverges (Re w too small)")
        K = self.stable_level

        def P(nn):
            s = sum(self.prim(k, nn) * X ** k for k in range(1, K + 1))
            return s + self.prim(K, nn) * X ** K * rho * X / (1 - rho * X)

        if n == 0:
            return (self.base0(0) + P(0) + self.imp1(0) * X) / (1 - p ** m * X * X)
        head = self.base0(n) + P(n) + self.imp1(n) * X
        if n % (p * p) == 0:
            head += p ** m * X * X * self.series(n // (p * p), w)
        return head

    def sup_ratio(self, n: int) -> Fraction:
        """max over k of count(k, n) / p^{k(m-1)} (n != 0)."""
        K = self.stable_level
        top = K + 2 * (_vp(n, self.p) // 2) + 4
        return max(Fraction(self.count(k, n), self.p ** (k * (self.qf.m - 1)))
                   for k in range(top + 1))


# ----------------------------------------------------------------------------
# persistent count cache

class CountCache:
    """Recorded r / r* values with a plain-text backing file."""

    def __init__(self, qf: QuadraticFormData, path: str | None = None):
        self.qf, self.path = qf, path
        self.data: dict[tuple[str, int, int], int] = {}
        self._lock = threading.Lock()
        if path:
            self._load()

    def _load(self):
        try:
            with open(self.path) as fh:
                lines = fh.read().splitlines()
        except FileNotFoundError:
            return
        if not lines or lines[0].strip() != f"# A-digest:{self.qf.digest}":
            return  # stale cache for another form
        for ln in lines[1:]:
            parts = ln.split()
            if len(parts) == 4 and parts[0] in ("r", "rstar"):
                self.data[(parts[0], int(parts[1]), int(parts[2]))] = int(parts[3])

    def get(self, kind: str, l: int, n: int) -> int | None:
        return self.data.get((kind, l, n))

    def put(self, kind: str, l: int, n: int, count: int):
        with self._lock:
            self.data[(kind, l, n)] = count

    def save(self):
        if not self.path:
            return
        with self._lock:
            items = sorted(self.data.items(), key=lambda kv: (kv[0][0], kv[0][1], kv[0][2]))
            with open(self.path, "w") as fh:
                fh.write(f"# A-digest:{self.qf.digest}\n")
                for (kind, l, n), c in items:
                    fh.write(f"{kind} {l} {n} {c}\n")


# ----------------------------------------------------------------------------
# counting front end

@dataclass
class Counter:
    """Per-form counting context: local engines plus an optional cache."""

    qf: QuadraticFormData
    cache: CountCache | None = None
    _engines: dict = field(default_factory=dict)
    _lock: threading.Lock = field(default_factory=threading.Lock)

    def engine(self, p: int, dual: bool) -> _LocalCounter:
        key = (p, dual)
        with self._lock:
            e = self._engines.get(key)
            if e is None:
                e = self._engines[key] = _LocalCounter(self.qf, p, dual)
        return e

    def prime_power(self, p: int, k: int, n: int, dual: bool) -> int:
        return self.engine(p, dual).count(k, n)

    def r(self, l: int, n: int) -> int:
        return self._count(l, n, False)

    def r_star(self, l: int, n: int) -> int:
        return self._count(l, n, True)

    def _count(self, l: int, n: int, dual: bool) -> int:
        if l < 1:
            raise ValueError("l must be positive")
        kind = "rstar" if dual else "r"
        if self.cache is not None:
            hit = self.cache.get(kind, l, n)
            if hit is not None:
                return hit
        parts = [(p, _vp(l, p)) for p in prime_factors(l)]
        if dual:
            base = self.engine(2, True).base0(n)
            if base == 0:
                out = 0
            else:
                num = math.prod(self.prime_power(p, k, n, True) for p, k in parts)
                out = Fraction(num) * Fraction(base) ** (1 - len(parts))
                assert out.denominator == 1
                out = int(out)
        else:
            out = math.prod(self.prime_power(p, k, n, False) for p, k in parts)
        if self.cache is not None:
            self.cache.put(kind, l, n, out)
        return out


_COUNTERS: dict[str, Counter] = {}


def counter_for(qf: QuadraticFormData) -> Counter:
    c = _COUNTERS.get(qf.digest)
    if c is None:
        c = _COUNTERS[qf.digest] = Counter(qf)
    return c


def r_count_direct(qf: QuadraticFormData, l: int, n: int) -> int:
    """r(l, n) by CRT and plain enumeration of each (Z/p^k)^m."""
    out = 1
    for p in prime_factors(l):
        pk = p ** _vp(l, p)
        if pk ** qf.m > ENUMERATION_BUDGET:
            raise BudgetError(f"{pk}^{qf.m} states exceed budget")
        V = coset_box([[pk * int(i == j) for j in range(qf.m)] for i in range(qf.m)])
        vals = _quad_values(V, qf.S) // 2
        out *= int(np.count_nonzero((vals - n) % pk == 0))
    return out


def r_star_count_direct(qf: QuadraticFormData, l: int, n: int) -> int:
    """r*(l, n) by enumerating Z^m / 2lA Z^m through a Hermite box."""
    S = qf.S
    V = coset_box([[l * x for x in row] for row in S])
    num = qf.N * _quad_values(V, _adjugate(S))
    den = 2 * qf.D
    if np.any(num % den):
        raise ArithmeticError("non-integral value (N/4) v*^t A^-1 v* encountered")
    vals = num // den
    return int(np.count_nonzero((vals - n) % (qf.N * l) == 0))


def r_count(qf: QuadraticFormData, l: int, n: int) -> int:
    return counter_for(qf).r(l, n)


def r_star_count(qf: QuadraticFormData, l: int, n: int) -> int:
    return counter_for(qf).r_star(l, n)


# ----------------------------------------------------------------------------
# Dirichlet series Z(n, w), Z*(n, w)

@dataclass(frozen=True)
class SeriesValue:
    value: complex
    tail_bound: float
    method: str
    terms: int = 0


def _sqfree_class(x: Fraction) -> int:
    """A nonzero integer in the square class of the rational x."""
    return x.numerator * x.denominator


def _good_factors(qf: QuadraticFormData, n: int, w: complex, dual: bool):
    """[(s, disc, exponent)] with prod L(s, chi_disc)^exponent equal to the
    product of local factors over primes outside the bad set."""
    m = qf.m
    detS = qf.det_A * (qf.N ** m if dual else 1)
    if m % 2:
        if n:
            d = _sqfree_class((-1) ** ((m - 1) // 2) * n * detS)
            return [(w - m + 1, 1, 1),
                    (w - (m - 1) / 2, specfun.fundamental_discriminant(d), 1),
                    (2 * w - m + 1, 1, -1)]
        return [(w - m + 1, 1, 1), (2 * w - m, 1, 1), (2 * w - m + 1, 1, -1)]
    d = specfun.fundamental_discriminant(_sqfree_class((-1) ** (m // 2) * detS))
    if n:
        return [(w - m + 1, 1, 1), (w - m / 2 + 1, d, -1)]
    return [(w - m + 1, 1, 1), (w - m / 2, d, 1), (w - m / 2 + 1, d, -1)]


def bad_primes(qf: QuadraticFormData, n: int, dual: bool) -> list[int]:
    base = 2 * abs(qf.D) * (qf.N if dual else 1) * (abs(n) if n else 1)
    return prime_factors(base)


def _char(disc: int, p: int) -> int:
    return 1 if disc == 1 else specfun.kronecker(disc, p)


def _check_w(qf: QuadraticFormData, w: complex):
    if complex(w).real <= qf.m:
        raise ValueError(f"Re(w) must exceed m = {qf.m}")


def _series_closed(qf, n, w, dual) -> SeriesValue:
    _check_w(qf, w)
    cnt = counter_for(qf)
    bad = bad_primes(qf, n, dual)
    engines = [cnt.engine(p, dual) for p in bad]
    base = engines[0].base0(n)
    if base == 0:
        return SeriesValue(0j, 0.0, "closed")
    local = math.prod(e.series(n, w) for e in engines) / base ** (len(bad) - 1)
    good = 1 + 0j
    for s, disc, e in _good_factors(qf, n, w, dual):
        val = specfun.dirichlet_l(complex(s), disc)
        for p in bad:
            val *= 1 - _char(disc, p) * complex(p) ** (-complex(s))
        good *= val ** e
    return SeriesValue(complex(local * good), 0.0, "closed")


def _primes_upto(P: int) -> list[int]:
    sieve = np.ones(P + 1, dtype=bool)
    sieve[:2] = False
    for i in range(2, int(P ** 0.5) + 1):
        if sieve[i]:
            sieve[i * i::i] = False
    return [int(x) for x in np.nonzero(sieve)[0]]


def _series_euler(qf, n, w, dual, P: int) -> SeriesValue:
    _check_w(qf, w)
    cnt = counter_for(qf)
    bad = bad_primes(qf, n, dual)
    engines = [cnt.engine(p, dual) for p in bad]
    base = engines[0].base0(n)
    if base == 0:
        return SeriesValue(0j, 0.0, "euler")
    val = math.prod(e.series(n, w) for e in engines) / base ** (len(bad) - 1)
    factors = _good_factors(qf, n, w, dual)
    badset = set(bad)
    for p in _primes_upto(P):
        if p in badset:
            continue
        for s, disc, e in factors:
            val *= (1 - _char(disc, p) * complex(p) ** (-complex(s))) ** (-e)
    # log-tail: |log(1-z)| <= 2|z| for |z| <= 1/2, and sum_{k>P} k^-sig <= P^{1-sig}/(sig-1)
    delta = 0.0
    for s, _, e in factors:
        sig = complex(s).real
        if sig <= 1 or P ** (-sig) > 0.5:
            raise ValueError("Euler tail bound needs every exponent above 1")
        delta += abs(e) * 2 * P ** (1 - sig) / (sig - 1)
    return SeriesValue(complex(val), abs(val) * math.expm1(delta), "euler", P)


def _series_brute(qf, n, w, dual, L: int) -> SeriesValue:
    _check_w(qf, w)
    cnt = counter_for(qf)
    m = qf.m
    w = complex(w)
    total = 0j
    for l in range(1, L + 1):
        c = cnt.r_star(l, n) if dual else cnt.r(l, n)
        if c:
            total += c * complex(l) ** (-w)
    sig = w.real
    if n == 0:
        # r(l, 0) <= l^m and r*(l, 0) <= |D| l^m
        if sig <= m + 1:
            return SeriesValue(total, math.inf, "brute", L)
        scale = abs(qf.D) if dual else 1
        tail = scale * L ** (m + 1 - sig) / (sig - m - 1)
    else:
        B = Fraction(1)
        engines = [cnt.engine(p, dual) for p in bad_primes(qf, n, dual)]
        base = engines[0].base0(n)
        if base == 0:
            return SeriesValue(0j, 0.0, "brute", L)
        for e in engines:
            B *= max(Fraction(1), e.sup_ratio(n) / base if dual else e.sup_ratio(n))
        if dual:
            B *= base
        # good primes contribute at most 2 each: r <= B 2^omega l^{m-1} <= 2B l^{m-1/2}
        if sig <= m + 0.5:
            return SeriesValue(total, math.inf, "brute", L)
        tail = 2 * float(B) * L ** (m + 0.5 - sig) / (sig - m - 0.5)
    return SeriesValue(total, float(tail), "brute", L)


def z_series(qf: QuadraticFormData, n: int, w: complex, tol: float = 1e-12,
             method: str = "closed", cutoff: int | None = None) -> SeriesValue:
    """Z(n, w).  ``method`` is 'closed', 'euler' (prime cutoff) or 'brute' (l cutoff)."""
    return _dispatch(qf, n, w, tol, method, cutoff, False)


def z_star_series(qf: QuadraticFormData, n: int, w: complex, tol: float = 1e-12,
                  method: str = "closed", cutoff: int | None = None) -> SeriesValue:
    """Z*(n, w), same methods as :func:`z_series`."""
    return _dispatch(qf, n, w, tol, method, cutoff, True)


def _dispatch(qf, n, w, tol, method, cutoff, dual):
    if method == "closed":
        return _series_closed(qf, n, w, dual)
    if method == "euler":
        if cutoff is None:
            cutoff = _euler_cutoff(qf, n, w, dual, tol)
        return _series_euler(qf, n, w, dual, cutoff)
    if method == "brute":
        return _series_brute(qf, n, w, dual, cutoff or 2000)
    raise ValueError(f"unknown method {method!r}")


def _euler_cutoff(qf, n, w, dual, tol) -> int:
    sig = min(complex(s).real for s, _, _ in _good_factors(qf, n, w, dual))
    if sig <= 1:
        raise ValueError("Euler product does not converge absolutely here")
    P = 100
    while P < 10 ** 7 and 6 * P ** (1 - sig) / (sig - 1) > tol:
        P *= 2
    return P


# ----------------------------------------------------------------------------
# Fourier transform of the Gauss-sum weighted indicator

@dataclass(frozen=True)
class PhiHatResult:
    direct: Cyc
    closed: Cyc

    @property
    def agree(self) -> bool:
        return self.direct == self.closed


def _r_power_cyc(r: int, half_exp: int, M: int) -> Cyc:
    """(sqrt r)^half_exp exactly (half_exp may be negative)."""
    sq = sqrt_prime_cyc(r, M)
    out = Cyc.rational(M, 1)
    e = half_exp
    if e % 2:
        out = sq * Fraction(1, r) if e < 0 else sq
        e = e + 1 if e < 0 else e - 1
    return out * Fraction(r) ** (e // 2)


def phi_psi_hat(qf: QuadraticFormData, psi: DirichletCharacter,
                y: Sequence[Fraction]) -> PhiHatResult:
    """Both evaluations of the transform at y in r^{-1} Z^{m+2}."""
    r = psi.r
    if qf.N % r == 0:
        raise ValueError("r must not divide the level")
    m = qf.m
    if len(y) != m + 2:
        raise ValueError(f"y must have {m + 2} coordinates")
    M = cyc_modulus(r)
    Y = [Fraction(c) * r for c in y]
    if any(c.denominator != 1 for c in Y):
        zero = Cyc.zero(M)
        return PhiHatResult(zero, zero)
    Y = [int(c) for c in Y]

    # direct: r^{-(m+2)} sum_x tau_psi(Q(x)) e(-<x, Y>/r)
    grid = np.indices([r] * (m + 2)).reshape(m + 2, -1).T
    inner = grid[:, 1:-1]
    qv = grid[:, 0] * grid[:, -1] + _quad_values(inner, qf.S) // 2
    pair = grid @ np.asarray(Y, dtype=np.int64)
    table = np.zeros((r, r), dtype=np.int64)
    np.add.at(table, (qv % r, pair % r), 1)
    direct = Cyc.zero(M)
    taus = [gauss_sum(psi, a, M) for a in range(r)]
    for a in range(r):
        col = Cyc.zero(M)
        for j in range(r):
            if table[a, j]:
                col = col + Cyc.root(M, (-j * (M // r)) % M, int(table[a, j]))
        direct = direct + taus[a] * col
    direct = direct * Fraction(1, r ** (m + 2))

    # closed form
    ell = qf.p - qf.q
    ps = psi_star(psi, ell)
    K = (Cyc.root(M, c_ell_r(ell, r).e * (M // 4))
         * ps.cyc(-qf.N, M)
         * qf.chi_K(ell)(r))
    closed = (_r_power_cyc(r, -(m + 2), M) * K) * gauss_sum(ps, qf.NQ_star(Y), M)
    return PhiHatResult(direct, closed)


# ----------------------------------------------------------------------------
# coefficient systems

class CoefficientSystem:
    """Data (N, lambda, ell, alpha, beta, alpha(0), beta(0), alpha(inf), beta(inf))."""

    def __init__(self, N: int, lam: complex, ell: int,
                 alpha: Callable[[int], complex], beta: Callable[[int], complex],
                 alpha0: complex, beta0: complex, alpha_inf: complex, beta_inf: complex,
                 growth: float = 2.0, chi: Callable[[int], complex] | None = None,
                 label: str = "custom"):
        self.N, self.lam, self.ell = N, complex(lam), ell
        self._alpha_fn, self._beta_fn = alpha, beta
        self.alpha0, self.beta0 = complex(alpha0), complex(beta0)
        self.alpha_inf, self.beta_inf = complex(alpha_inf), complex(beta_inf)
        self.growth = growth
        self.chi = chi or (lambda d: 1)
        self.label = label
        self._a: dict[int, complex] = {}
        self._b: dict[int, complex] = {}
        self._lock = threading.Lock()

    def alpha(self, n: int) -> complex:
        if n == 0:
            return self.alpha0
        v = self._a.get(n)
        if v is None:
            v = complex(self._alpha_fn(n))
            with self._lock:
                self._a[n] = v
        return v

    def beta(self, n: int) -> complex:
        if n == 0:
            return self.beta0
        v = self._b.get(n)
        if v is None:
            v = complex(self._beta_fn(n))
            with self._lock:
                self._b[n] = v
        return v

    def growth_constant(self, which: str = "alpha", span: int = 40) -> float:
        """Empirical C with |coef(n)| <= C (1+|n|)^growth over 0 < |n| <= span."""
        f = self.alpha if which == "alpha" else self.beta
        return max(abs(f(n)) / (1 + abs(n)) ** self.growth
                   for n in range(-span, span + 1) if n)

    def perturbed(self, **scale) -> "CoefficientSystem":
        """Copy with alpha0/beta0/alpha_inf/beta_inf multiplied by given factors."""
        out = CoefficientSystem(self.N, self.lam, self.ell, self.alpha, self.beta,
                                self.alpha0 * scale.get("alpha0", 1),
                                self.beta0 * scale.get("beta0", 1),
                                self.alpha_inf * scale.get("alpha_inf", 1),
                                self.beta_inf * scale.get("beta_inf", 1),
                                self.growth, self.chi, self.label + "~")
        return out

    def twist(self, psi: DirichletCharacter) -> "CoefficientSystem":
        """alpha_psi(n) = tau_psi(n) alpha(n), beta side twisted by psi*."""
        ps = psi_star(psi, self.ell)
        ta = lambda n: complex(gauss_sum(psi, n))
        tb = lambda n: complex(gauss_sum(ps, n))
        return CoefficientSystem(
            self.N, self.lam, self.ell,
            lambda n: ta(n) * self.alpha(n), lambda n: tb(n) * self.beta(n),
            ta(0) * self.alpha0, tb(0) * self.beta0,
            ta(0) * self.alpha_inf, tb(0) * self.beta_inf,
            self.growth, self.chi, f"{self.label}*{psi!r}")


def zero_system(N: int, lam: complex, ell: int) -> CoefficientSystem:
    z = lambda n: 0j
    return CoefficientSystem(N, lam, ell, z, z, 0, 0, 0, 0, label="zero")


def coefficient_system(qf: QuadraticFormData, lam: complex, ell: int,
                       literal_beta: bool = False) -> CoefficientSystem:
    """Coefficients of the summation formula attached to ``qf``.

    beta(n) carries the factor 1/|D| for every n (as beta(0) does); with
    ``literal_beta`` the factor is dropped for n != 0, which reproduces a
    normalization under which the summation identity fails when |D| > 1.
    """
    lam = complex(lam)
    m = qf.m
    if lam.real <= (m + 2) / 4:
        raise ValueError(f"Re(lambda) must exceed (m+2)/4 = {(m + 2) / 4}")
    if (ell - (qf.p - qf.q)) % 4:
        raise ValueError(f"ell must be congruent to p - q = {qf.p - qf.q} mod 4")
    w = 2 * lam + m / 2 - 1
    if w.imag == 0:
        w = w.real
    eps = complex(np.exp(1j * np.pi * (qf.p - qf.q) / 4))
    rootD = math.sqrt(abs(qf.D))
    zm = complex(specfun.zeta(complex(w - m + 1)))
    return CoefficientSystem(
        qf.N, lam, ell,
        lambda n: eps / rootD * z_series(qf, n, w).value,
        (lambda n: z_star_series(qf, n, w).value) if literal_beta
        else (lambda n: z_star_series(qf, n, w).value / abs(qf.D)),
        eps / rootD * z_series(qf, 0, w).value,
        z_star_series(qf, 0, w).value / abs(qf.D),
        zm,
        zm / (eps * rootD),
        growth=float(m),
        chi=qf.chi_K(ell),
        label=f"form{qf.digest}")


SHINTANI = ((1,),)
