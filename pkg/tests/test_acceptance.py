"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest -v tests/test_acceptance.py`` or directly with
``python tests/test_acceptance.py``.
"""

import sys

import pytest

from metamaass import suites

SHINTANI = [s for s in suites.default_systems() if s.label == "shintani"]
BOTH = suites.default_systems()

# criterion -> (suite, systems, selectors, threshold ceilings)
# a selector ending in "." or "," matches by prefix, any other exactly;
# a ceiling of 0 means exact equality (the residual is a mismatch count)
CRITERIA = {
    1: ("cocycle", BOTH, ("cocycle.",), {"cocycle.": 0}),
    2: ("theta", BOTH, ("theta.multiplier",), {"theta.multiplier": 1e-8}),
    3: ("lfe", BOTH,
        ("lfe.gaussian_closed", "lfe.odd_gaussian_closed", "lfe.gaussian", "lfe.odd_gaussian", "lfe.poisson"),
        {"lfe.gaussian": 1e-8, "lfe.odd_gaussian": 1e-8, "lfe.poisson": 1e-6}),
    4: ("lfe", BOTH, ("lfe.residues",), {"lfe.residues": 1e-8}),
    5: ("lfe", BOTH, ("lfe.poisson_ft", "lfe.poisson_ft_zero"), {"lfe.poisson_ft": 1e-6, "lfe.poisson_ft_zero": 1e-12}),
    6: ("counting", BOTH, ("counting.",),
        {"counting.crt": 0, "counting.engine": 0, "counting.hensel": 0,
         "counting.series": 1.0, "counting.z0_closed": 1e-8}),
    7: ("phi-hat", SHINTANI, ("phi-hat[shintani,",), {"phi-hat": 0}),
    8: ("summation", SHINTANI, ("summation.",),
        {"summation.gaussian": 1e-6, "summation.poisson": 1e-5, "summation.sensitivity": 1.0}),
    9: ("twisted", SHINTANI, ("twisted[shintani,",), {"twisted": 1e-5}),
    10: ("maass", BOTH, ("maass.",),
         {"maass.automorphy": 1e-5, "maass.wN": 1e-5, "maass.laplacian": 1e-3}),
}


def _selected(name, selectors):
    return any(name == p or (p[-1] in ".," and name.startswith(p)) for p in selectors)


def _ceiling(name, ceilings):
    best = None
    for prefix, tol in ceilings.items():
        if name.startswith(prefix) and (best is None or len(prefix) > len(best[0])):
            best = (prefix, tol)
    return best[1]


def evaluate(k):
    suite, systems, selectors, ceilings = CRITERIA[k]
    st = suites.Settings()
    tasks = [t for t in suites.build(suite, systems, st) if _selected(t.name, selectors)]
    assert tasks, f"criterion {k} selected no checks"
    records = suites.execute(tasks)
    for r in records:
        # guard against thresholds drifting above the stated bound
        assert r.tol <= _ceiling(r.name, ceilings), r.name
    return records


def report(k, records, stream):
    ok = all(r.passed for r in records)
    worst = max(records, key=lambda r: (not r.passed, r.residual / r.tol if r.tol else r.residual))
    print(f"criterion {k}: {'PASS' if ok else 'FAIL'}  ({len(records)} checks, "
          f"worst {worst.name} residual={worst.residual:.3g} tol={worst.tol:g})", file=stream)
    for r in records:
        if not r.passed:
            print(f"    FAIL {r.name} residual={r.residual:.3g} tol={r.tol:g}", file=stream)
    return ok


@pytest.mark.parametrize("k", sorted(CRITERIA))
def test_criterion(k, capsys):
    records = evaluate(k)
    with capsys.disabled():
        ok = report(k, records, sys.stdout)
    assert ok


if __name__ == "__main__":
    results = [report(k, evaluate(k), sys.stdout) for k in sorted(CRITERIA)]
    sys.exit(0 if all(results) else 1)
