"""Builds the extension module and exercises it from Python.

    python3 python/smoke_test.py
"""

import shutil
import subprocess
import sys
import tempfile
from fractions import Fraction
from math import factorial
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def build() -> Path:
    subprocess.run(
        ["cargo", "build", "--release", "-p", "probstir-python", "--features", "extension-module"],
        cwd=ROOT,
        check=True,
    )
    lib = ROOT / "target" / "release" / "libprobstir_python.so"
    out = Path(tempfile.mkdtemp(prefix="probstir-py-"))
    shutil.copy(lib, out / "probstir.so")
    return out


def main() -> None:
    sys.path.insert(0, str(build()))
    import probstir as ps

    # signed S1(n,1) = (-1)^(n-1) (n-1)!
    s1 = ps.triangle("s1", 6)
    for n in range(1, 7):
        assert s1.get(n, 1) == (-1) ** (n - 1) * factorial(n - 1)
    assert isinstance(s1.get(4, 2), Fraction)

    # Bernoulli(p) scales the degenerate second kind by p^k
    lam = Fraction(1, 3)
    deg = ps.triangle("s2-deg", 6, lam)
    prob = ps.triangle("prob-s2", 6, lam, rv="bernoulli:p=1/2")
    for n in range(7):
        for k in range(n + 1):
            assert prob.get(n, k) == Fraction(1, 2) ** k * deg.get(n, k)

    # orthogonality of a probabilistic pair
    rv = ps.RandomVariable("geometric:p=1/3")
    t2 = ps.triangle("prob-s2", 8, "-1/3", rv=rv).rows()
    t1 = ps.triangle("prob-s1", 8, "-1/3", rv=rv).rows()
    for n in range(9):
        for m in range(n + 1):
            total = sum(t2[n][k] * t1[k][m] for k in range(m, n + 1))
            assert total == (1 if n == m else 0)

    # series engine: reversion and Lagrange inversion agree
    f = ps.Series.var(8).exp() - ps.Series([1] + [0] * 8)
    g = f.revert()
    assert g.egf_coeffs() == [0] + [(-1) ** (n - 1) * factorial(n - 1) for n in range(1, 9)]
    assert f.compose(g) == ps.Series.var(8)
    for n in range(1, 9):
        assert f.lagrange("C", n) == g.coeffs()[n]

    # Daehee numbers of Y = 1: log(1+t)/t
    d = ps.series("daehee", 5, rv="pointmass:c=1", gamma=1)
    assert d == [Fraction((-1) ** n * factorial(n), n + 1) for n in range(6)]

    assert rv.mean() == 3
    assert ps.sj_moment("poisson:alpha=2", 2, 3, lam=Fraction(1, 2)) == 88

    report = ps.verify_identities(rvs=[rv], lambdas=["1/2"], nmax=6)
    assert report["passed"], report

    est = ps.mc_check("poisson:alpha=2", 3, 2, samples=200_000, seed=7, lam="1/2")
    assert est["within_band"], est

    try:
        ps.triangle("prob-s1", 4, rv="custom:moments=0,1,0,3")
    except ValueError as e:
        assert "E[Y] = 0" in str(e)
    else:
        raise AssertionError("zero mean accepted")

    print("python smoke test passed")


if __name__ == "__main__":
    main()
