import json
import shutil
import subprocess
import sys
from pathlib import Path

import pytest
from scipy import special

from metamaass import cli
from metamaass import quadform as qfm

DATA = Path(__file__).resolve().parent.parent / "data"


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def form_file(tmp_path):
    def make(text):
        p = tmp_path / "f.form"
        p.write_text(text)
        return p
    return make


# --- parsing helpers ---------------------------------------------------------------

def test_parsers():
    assert cli.parse_real("6/5") == 1.2
    assert cli.parse_complex("0.3+1.1i") == 0.3 + 1.1j
    assert cli.parse_complex("2j") == 2j
    assert cli.parse_grid("-0.3,0/1,2") == (-0.3 + 1j, -0.3 + 2j, 1j, 2j)
    assert cli.parse_matrix("1 0; 0 -1").D == -4
    for bad in ("x", "1//2"):
        with pytest.raises(cli.InputError):
            cli.parse_real(bad)
    with pytest.raises(cli.InputError):
        cli.parse_grid("1,2")


# --- analyze ------------------------------------------------------------------------

def test_analyze(capsys):
    code, out, _ = run(capsys, "analyze", DATA / "shintani.form", "--json")
    assert code == 0
    rec = json.loads(out)
    assert (rec["m"], rec["D"], rec["N"], rec["p"], rec["q"]) == (1, 2, 4, 1, 0)
    code, out, _ = run(capsys, "analyze", DATA / "indefinite.form")
    assert code == 0 and "signature = (1,1)" in out


def test_analyze_rejects(capsys, form_file):
    for text in ("m = 2\n1 1\n1 1\n", "m = 1\n1/3\n", "m = 2\n1 0\n0 q\n"):
        code, _, err = run(capsys, "analyze", form_file(text))
        assert code == 2 and err.startswith("error:")
    code, _, err = run(capsys, "analyze", form_file("m = 2\n1 0\n0 q\n"))
    assert "line 3, column 3" in err
    code, _, _ = run(capsys, "analyze", "/nonexistent/form")
    assert code == 2


def test_analyze_out_file(capsys, tmp_path):
    out = tmp_path / "rec.json"
    run(capsys, "analyze", DATA / "double.form", "--out", out)
    assert json.loads(out.read_text())["N"] == 8


# --- zeta -----------------------------------------------------------------------------

def test_zeta(capsys):
    code, out, _ = run(capsys, "zeta", DATA / "shintani.form", 0, 4)
    assert code == 0
    rec = json.loads(out)
    want = special.zeta(7, 1) * special.zeta(4, 1) / special.zeta(8, 1)
    assert abs(rec["Z"]["value"][0] - want) < 1e-13
    assert rec["agree"] and rec["Zstar"]["agree"]


def test_zeta_refuses_nonconvergent(capsys):
    code, _, err = run(capsys, "zeta", DATA / "shintani.form", 1, 1)
    assert code == 2 and "Re(w)" in err


def test_zeta_cache(capsys, tmp_path):
    cache = tmp_path / "counts.txt"
    try:
        run(capsys, "zeta", DATA / "shintani.form", 1, 4, "--cutoff", 50, "--cache", cache)
    finally:
        qfm.counter_for(cli.load_form(str(DATA / "shintani.form"))).cache = None
    assert cache.read_text().startswith("# A-digest:")


# --- maass ------------------------------------------------------------------------------

def test_maass(capsys):
    code, out, _ = run(capsys, "maass", DATA / "shintani.form", "--lambda", 0.9, "--ell", 1, "--z", "1i")
    assert code == 0
    rec = json.loads(out)
    assert rec["certified"] and abs(rec["value"][0] - 19.84709975042596) < 1e-9


def test_maass_errors(capsys):
    code, _, _ = run(capsys, "maass", DATA / "shintani.form", "--lambda", 0.9, "--ell", 0, "--z", "1i")
    assert code == 2
    code, _, _ = run(capsys, "maass", DATA / "shintani.form", "--lambda", 0.9, "--ell", 1, "--z=-1i")
    assert code == 2
    code, _, err = run(capsys, "maass", DATA / "shintani.form", "--lambda", 0.9, "--ell", 1,
                       "--z", "0.00001i")
    assert code == 3 and "budget" in err


# --- verify -------------------------------------------------------------------------------

def test_verify_report_schema_and_determinism(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    code, _, err = run(capsys, "verify", "theta", "--out", a)
    assert code == 0 and "PASS theta.multiplier" in err
    run(capsys, "verify", "theta", "--out", b)
    assert a.read_bytes() == b.read_bytes()
    rep = json.loads(a.read_text())
    assert rep["schema"] == 1 and rep["pass"]
    assert set(rep["checks"][0]) == {"name", "residual", "tol", "pass", "seconds"}


def test_verify_seed_changes_residuals_not_verdict(capsys):
    _, out0, _ = run(capsys, "verify", "theta", "--seed", 0)
    _, out1, _ = run(capsys, "verify", "theta", "--seed", 7)
    r0, r1 = json.loads(out0), json.loads(out1)
    assert r0["config_digest"] != r1["config_digest"]
    m0 = next(c for c in r0["checks"] if c["name"] == "theta.multiplier")
    m1 = next(c for c in r1["checks"] if c["name"] == "theta.multiplier")
    assert m0["residual"] != m1["residual"]
    assert [c["pass"] for c in r0["checks"]] == [c["pass"] for c in r1["checks"]]


def test_verify_threads_match_serial(capsys):
    _, a, _ = run(capsys, "verify", "gauss")
    _, b, _ = run(capsys, "verify", "gauss", "--threads", 3)
    assert a == b


def test_verify_failure_exit_code(capsys, tmp_path):
    cfg = tmp_path / "c.ini"
    cfg.write_text("[accept]\ntheta.slash_composition = 1e-30\n")
    code, out, err = run(capsys, "verify", "theta", "--config", cfg)
    assert code == 1 and "FAIL theta.slash_composition" in err
    assert not json.loads(out)["pass"]


def test_config_default_file_matches_builtin():
    cfg = cli.load_config(str(DATA / "default.ini"))
    base = cli.load_config(None)
    assert [s.label for s in cfg.systems] == ["shintani", "indefinite"]
    assert cfg.digest() == base.digest()
    cfg.settings.tolerances["maass.laplacian"] = 1e-4
    assert cfg.digest() != base.digest()


@pytest.mark.parametrize("text,needle", [
    ("[nonsense]\n", "unknown config section"),
    ("[run]\ncolour = red\n", "colour"),
    ("[system s]\nmatrix = 1\nlambda = 0.9\nell = 1\nlevel = 8\n", "level"),
    ("[system s]\nmatrix = 1 2\nlambda = 0.9\nell = 1\n", ""),
])
def test_config_errors(capsys, tmp_path, text, needle):
    cfg = tmp_path / "c.ini"
    cfg.write_text(text)
    code, _, err = run(capsys, "verify", "theta", "--config", cfg)
    assert code == 2 and needle in err


def test_config_relative_form_path(tmp_path):
    shutil.copy(DATA / "shintani.form", tmp_path / "s.form")
    cfg = tmp_path / "c.ini"
    cfg.write_text("[system one]\nform = s.form\nlambda = 0.9\nell = 1\nprimes = 3\n")
    got = cli.load_config(str(cfg))
    assert got.systems[0].form.N == 4 and got.systems[0].primes == (3,)


def test_cache_per_form(tmp_path):
    cfg = cli.load_config(None)
    cfg.cache = str(tmp_path / "counts.txt")
    caches = cli.attach_caches(cfg)
    try:
        assert sorted(Path(c.path).name for c in caches) == ["counts-indefinite.txt", "counts-shintani.txt"]
    finally:
        for s in cfg.systems:
            qfm.counter_for(s.form).cache = None


def test_console_script_entry_point():
    exe = shutil.which("metamaass")
    cmd = [exe] if exe else [sys.executable, "-m", "metamaass"]
    res = subprocess.run(cmd + ["analyze", str(DATA / "shintani.form"), "--json"],
                         capture_output=True, text=True, timeout=120)
    assert res.returncode == 0 and json.loads(res.stdout)["N"] == 4
