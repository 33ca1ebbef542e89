"""Command-line entry point: ``metamaass {analyze, zeta, maass, verify}``.

Exit codes: 0 success, 1 a check failed, 2 bad input, 3 budget or
convergence failure.
"""

from __future__ import annotations

import argparse
import configparser
import hashlib
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from . import automorphy as au
from . import quadform as qfm
from . import suites
from .specfun import QuadratureError

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3
SCHEMA = 1


class InputError(ValueError):
    pass


# ----------------------------------------------------------------------------
# parsing helpers

def parse_real(text: str) -> float:
    """A decimal or exact-rational string as a float."""
    try:
        return float(Fraction(text.strip()))
    except (ValueError, ZeroDivisionError):
        raise InputError(f"not a real number: {text!r}") from None


def parse_complex(text: str) -> complex:
    """'0.9', '7/10', '0.7+0.3i' or '0.7+0.3j'."""
    t = text.strip().replace(" ", "")
    try:
        return complex(parse_real(t))
    except InputError:
        pass
    try:
        return complex(t.replace("i", "j"))
    except ValueError:
        raise InputError(f"not a complex number: {text!r}") from None


def parse_list(text: str, conv=parse_real) -> list:
    return [conv(x) for x in text.replace(",", " ").split()]


def parse_grid(text: str) -> tuple[complex, ...]:
    """'x1,x2,.../y1,y2,...' gives the product grid x + iy."""
    xs, sep, ys = text.partition("/")
    if not sep:
        raise InputError("grid must read 'x-values/y-values'")
    xs, ys = parse_list(xs), parse_list(ys)
    if not xs or not ys or min(ys) <= 0:
        raise InputError("grid needs x values and positive y values")
    return tuple(complex(x, y) for x in xs for y in ys)


def parse_matrix(text: str) -> qfm.QuadraticFormData:
    """Inline matrix: rows separated by ';'."""
    rows = [r.split() for r in text.replace(",", " ").split(";") if r.strip()]
    return qfm.parse_form(f"m = {len(rows)}\n" + "\n".join(" ".join(r) for r in rows))


def load_form(path: str) -> qfm.QuadraticFormData:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise InputError(f"cannot read form file: {e}") from None
    return qfm.parse_form(text)


# ----------------------------------------------------------------------------
# configuration

@dataclass
class RunConfig:
    systems: list[suites.System]
    settings: suites.Settings
    threads: int = 1
    cache: str | None = None
    out: str | None = None
    timings: bool = False

    def digest(self) -> str:
        st = self.settings
        payload = {
            "systems": [[s.label, s.form.digest, repr(complex(s.lam)), s.ell, list(s.primes), s.chi]
                        for s in self.systems],
            "tol": st.tol, "cutoffs": [st.summation_terms, st.euler_primes, st.brute_terms,
                                       st.maass_terms],
            "grid": [repr(z) for z in st.grid], "seed": st.seed,
            # overrides that restate a built-in threshold do not change the run
            "tolerances": sorted((k, v) for k, v in st.tolerances.items()
                                 if suites.Settings().tolerance(k) != v),
        }
        return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()


_CUTOFF_KEYS = ("summation_terms", "euler_primes", "brute_terms", "maass_terms")


def _system_from_section(label: str, sec: configparser.SectionProxy, base: Path) -> suites.System:
    if "form" in sec:
        form = load_form(str(base / sec["form"]))
    elif "matrix" in sec:
        form = parse_matrix(sec["matrix"])
    else:
        raise InputError(f"[system {label}] needs 'form' or 'matrix'")
    if "lambda" not in sec or "ell" not in sec:
        raise InputError(f"[system {label}] needs 'lambda' and 'ell'")
    lam = parse_complex(sec["lambda"])
    try:
        ell = int(sec["ell"])
        primes = tuple(int(p) for p in sec.get("primes", "3, 5").replace(",", " ").split())
    except ValueError as e:
        raise InputError(f"[system {label}]: {e}") from None
    if "level" in sec:
        try:
            level = int(sec["level"])
        except ValueError:
            raise InputError(f"[system {label}]: bad level {sec['level']!r}") from None
        if level != form.N:
            raise InputError(f"[system {label}]: level {level} disagrees with the computed level {form.N}")
    chi = sec.get("chi", "K").strip()
    if chi not in ("K", "trivial"):
        try:
            int(chi)
        except ValueError:
            raise InputError(f"[system {label}]: chi must be K, trivial or an integer") from None
    s = suites.System(label, form, lam, ell, primes, chi)
    s.coefficients()  # validates lambda and ell against the form
    return s


def load_config(path: str | None) -> RunConfig:
    st = suites.Settings()
    cfg = RunConfig(suites.default_systems(), st)
    if path is None:
        return cfg
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",))
    cp.optionxform = str  # keep check names as written
    try:
        with open(path) as fh:
            cp.read_file(fh)
    except OSError as e:
        raise InputError(f"cannot read config: {e}") from None
    except configparser.Error as e:
        raise InputError(f"config syntax: {e}") from None
    base = Path(path).parent
    systems = []
    for name in cp.sections():
        sec = cp[name]
        if name == "run":
            for key, val in sec.items():
                if key == "seed":
                    st.seed = int(val)
                elif key == "tol":
                    st.tol = parse_real(val)
                elif key == "threads":
                    cfg.threads = int(val)
                elif key == "grid":
                    st.grid = parse_grid(val)
                elif key == "cache":
                    cfg.cache = str(base / val)
                elif key == "out":
                    cfg.out = str(base / val)
                else:
                    raise InputError(f"unknown key [run] {key}")
        elif name == "cutoffs":
            for key, val in sec.items():
                if key not in _CUTOFF_KEYS:
                    raise InputError(f"unknown key [cutoffs] {key}")
                setattr(st, key, int(val))
        elif name == "accept":
            for key, val in sec.items():
                st.tolerances[key] = parse_real(val)
        elif name.startswith("system"):
            label = name[len("system"):].strip() or f"system{len(systems)}"
            systems.append(_system_from_section(label, sec, base))
        else:
            raise InputError(f"unknown config section [{name}]")
    if systems:
        cfg.systems = systems
    return cfg


def attach_caches(cfg: RunConfig) -> list[qfm.CountCache]:
    if not cfg.cache:
        return []
    forms = {s.form.digest: s for s in cfg.systems}
    out = []
    for digest, s in forms.items():
        path = cfg.cache
        if len(forms) > 1:
            p = Path(cfg.cache)
            path = str(p.with_name(f"{p.stem}-{s.label}{p.suffix}"))
        c = qfm.CountCache(s.form, path)
        qfm.counter_for(s.form).cache = c
        out.append(c)
    return out


# ----------------------------------------------------------------------------
# commands

def _emit(record: dict, out: str | None):
    text = json.dumps(record, indent=2)
    if out:
        Path(out).write_text(text + "\n")
    return text


def _cplx(z: complex) -> list[float]:
    return [z.real, z.imag]


def cmd_analyze(args) -> int:
    qf = load_form(args.form)
    rec = {"m": qf.m, "D": qf.D, "N": qf.N, "p": qf.p, "q": qf.q, "digest": qf.digest}
    text = _emit(rec, args.out)
    if args.json:
        print(text)
    else:
        print(f"m = {qf.m}\nD = {qf.D}\nN = {qf.N}\nsignature = ({qf.p},{qf.q})")
        print(json.dumps(rec))
    return EXIT_OK


def cmd_zeta(args) -> int:
    qf = load_form(args.form)
    w = parse_complex(args.w)
    if w.real <= qf.m:
        raise InputError(f"Re(w) must exceed m = {qf.m}")
    if args.cache:
        qfm.counter_for(qf).cache = qfm.CountCache(qf, args.cache)
    L = args.cutoff or (2000 if qf.m == 1 else 400)
    rec = {"n": args.n, "w": _cplx(w)}
    agree = True
    for key, f in (("Z", qfm.z_series), ("Zstar", qfm.z_star_series)):
        c = f(qf, args.n, w, tol=args.tol)
        b = f(qf, args.n, w, method="brute", cutoff=L)
        ok = abs(c.value - b.value) <= c.tail_bound + b.tail_bound + args.tol
        agree &= ok
        rec[key] = {"value": _cplx(c.value), "tail_bound": c.tail_bound,
                    "check_value": _cplx(b.value), "check_tail_bound": b.tail_bound,
                    "check_terms": L, "agree": ok}
    rec["agree"] = agree
    if args.cache:
        qfm.counter_for(qf).cache.save()
    print(_emit(rec, args.out))
    return EXIT_OK if agree else EXIT_FAIL


def cmd_maass(args) -> int:
    qf = load_form(args.form)
    lam, z = parse_complex(args.lam), parse_complex(args.z)
    if z.imag <= 0:
        raise InputError("z must lie in the upper half plane")
    if (args.ell - (qf.p - qf.q)) % 4:
        raise InputError(f"ell must be congruent to p - q = {qf.p - qf.q} mod 4")
    cs = qfm.coefficient_system(qf, lam, args.ell)
    m_min = max(16, args.cutoff or 16)
    spec = au.MaassEvalSpec(tol=args.tol, m_min=m_min)
    spec2 = au.MaassEvalSpec(tol=args.tol, m_min=2 * max(m_min, spec.terms(z.imag, cs.growth)))
    fn = au.maass_F if args.eval == "F" else au.maass_G
    v, v2 = fn(cs, z, spec), fn(cs, z, spec2)
    M = spec.terms(z.imag, cs.growth)
    stable = abs(v - v2) <= 10 * args.tol * max(1.0, abs(v))
    rec = {"eval": args.eval, "z": _cplx(z), "lambda": _cplx(lam), "ell": args.ell,
           "value": _cplx(v), "terms": M, "doubled_terms_change": abs(v - v2),
           "certified": bool(stable)}
    print(_emit(rec, args.out))
    return EXIT_OK if stable else EXIT_BUDGET


def run_verify(cfg: RunConfig, suite: str) -> dict:
    tasks = suites.build(suite, cfg.systems, cfg.settings)
    caches = attach_caches(cfg)
    try:
        if cfg.threads > 1:
            with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
                records = suites.execute(tasks, pool)
        else:
            records = suites.execute(tasks)
    finally:
        for c in caches:
            c.save()
    checks = [{"name": r.name,
               "residual": r.residual if r.residual == r.residual and abs(r.residual) != float("inf") else None,
               "tol": r.tol, "pass": r.passed,
               "seconds": round(r.seconds, 3) if cfg.timings else 0.0}
              for r in records]
    return {"schema": SCHEMA, "config_digest": cfg.digest(), "checks": checks,
            "pass": all(c["pass"] for c in checks)}


def cmd_verify(args) -> int:
    cfg = load_config(args.config)
    st = cfg.settings
    if args.tol is not None:
        st.tol = args.tol
    if args.cutoff is not None:
        st.summation_terms = args.cutoff
    if args.seed is not None:
        st.seed = args.seed
    if args.grid is not None:
        st.grid = parse_grid(args.grid)
    if args.threads is not None:
        cfg.threads = args.threads
    if args.cache is not None:
        cfg.cache = args.cache
    if args.out is not None:
        cfg.out = args.out
    cfg.timings = args.timings
    if cfg.threads < 1:
        raise InputError("--threads must be positive")
    report = run_verify(cfg, args.suite)
    text = _emit(report, cfg.out)
    if not cfg.out:
        print(text)
    for c in report["checks"]:
        mark = "PASS" if c["pass"] else "FAIL"
        print(f"{mark} {c['name']} residual={c['residual']} tol={c['tol']}", file=sys.stderr)
    return EXIT_OK if report["pass"] else EXIT_FAIL


# ----------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="metamaass",
                                 description="Maass forms from quadratic-form zeta functions")
    sub = ap.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="invariants of a quadratic form")
    a.add_argument("form")
    a.add_argument("--json", action="store_true", help="print only the JSON record")
    a.add_argument("--out")
    a.set_defaults(func=cmd_analyze)

    z = sub.add_parser("zeta", help="Z(n,w) and Z*(n,w)")
    z.add_argument("form")
    z.add_argument("n", type=int)
    z.add_argument("w")
    z.add_argument("--tol", type=float, default=1e-10)
    z.add_argument("--cutoff", type=int, help="terms in the brute-force cross-check")
    z.add_argument("--cache")
    z.add_argument("--out")
    z.set_defaults(func=cmd_zeta)

    m = sub.add_parser("maass", help="evaluate F or G at a point")
    m.add_argument("form")
    m.add_argument("--lambda", dest="lam", required=True)
    m.add_argument("--ell", type=int, required=True)
    m.add_argument("--z", required=True)
    m.add_argument("--eval", choices=("F", "G"), default="F")
    m.add_argument("--tol", type=float, default=1e-10)
    m.add_argument("--cutoff", type=int, help="minimum number of Fourier terms")
    m.add_argument("--out")
    m.set_defaults(func=cmd_maass)

    v = sub.add_parser("verify", help="run verification suites")
    v.add_argument("suite", choices=(*suites.SUITES, "all"))
    v.add_argument("--config")
    v.add_argument("--tol", type=float)
    v.add_argument("--cutoff", type=int, help="term cap for summation formulas")
    v.add_argument("--threads", type=int)
    v.add_argument("--seed", type=int)
    v.add_argument("--cache")
    v.add_argument("--out")
    v.add_argument("--grid", help="x-values/y-values, e.g. '-0.3,0,0.4/0.5,1,2'")
    v.add_argument("--timings", action="store_true",
                   help="record wall times (reports are then not byte-reproducible)")
    v.set_defaults(func=cmd_verify)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, qfm.FormError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (*suites.BUDGET_ERRORS, QuadratureError) as e:
        print(f"budget exceeded: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except ValueError as e:
        # precondition violations raised by the library
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
