"""Smoke test for the kergin extension module.

Build and install first, e.g. `pip install ./crates/python --no-build-isolation`
or `maturin develop -m crates/python/Cargo.toml`.
"""

import json
import math
from fractions import Fraction

import kergin


def close(a, b, tol):
    return abs(complex(a) - complex(b)) <= tol


def main():
    # Reproduction of a quadratic from three nodes in the plane.
    p = kergin.Poly(2, [([2, 0], 1.0), ([1, 1], -3.0), ([0, 0], 0.5 + 1j)])
    f = kergin.Oracle.polynomial(p)
    nodes = [[0.1, 0.0], [0.0, 0.2], [-0.1, 0.05]]
    x = [0.3 + 0.1j, -0.2]
    value, terms = kergin.interpolate(f, nodes, x, 2, rule_degree=7)
    assert close(value, p(x), 1e-10), (value, p(x))
    assert len(terms) == 3

    # Coincident nodes give the Taylor polynomial.
    a = [0.2, -0.1]
    value, _ = kergin.interpolate(f, [a, a], x, 1, rule_degree=7)
    assert close(value, kergin.taylor_sum(p, a, x, 1), 1e-10)

    # One variable: Kergin agrees with Newton interpolation.
    g = kergin.Oracle.rational_pole([1.0])
    zs = [0.05, -0.02, 0.08j, 0.01]
    value, _ = kergin.interpolate(g, [[z] for z in zs], [0.03], 3, rule_degree=13)
    assert close(value, kergin.newton_1d(g, zs, 0.03), 1e-10)

    # Remainder identity.
    r, _, provenance = kergin.remainder(g, [[z] for z in zs], [0.03], 4, rule_degree=13)
    assert close(g([0.03]) - value, r, 1e-10), provenance

    # Derivatives of exp(<u, x>).
    e = kergin.Oracle.exp_linear([1.0, 2.0])
    for method in ["cauchy", "polarized", "fd"]:
        d = kergin.dk(e, [0.0, 0.0], [[1.0, 0.0], [0.0, 1.0]], method)
        assert close(d, 2.0, 1e-4), (method, d)

    assert Fraction(kergin.monomial_simplex_integral([1, 2])) == Fraction(2, 120)

    check = kergin.example1_check(0.1, 0.1)
    assert check["verdict"] == "pass" and math.isclose(check["ratio"], 4.5)
    bad = 1 / (math.e + 1)
    check = kergin.example1_check(bad, bad)
    assert check["verdict"] == "fail" and check["erratum"]

    rigorous, asymptotic = kergin.stirling_error_bound(50, 8.0, 1.0)
    assert rigorous <= asymptotic and rigorous / asymptotic > 0.99

    terms = kergin.divergence_terms(10, 8)
    assert terms[0] == "1" and terms[1:] == ["-2", "2"] * 4

    passed, text = kergin.run_experiment('experiment = "diverge"\ndimension = 10\nmax_degree = 8\n')
    assert passed and json.loads(text)["metadata"]["experiment"] == "diverge"

    try:
        g([2.0])
    except ValueError as exc:
        assert "domain violation" in str(exc)
    else:
        raise AssertionError("expected a domain violation")

    print("kergin smoke test passed")


if __name__ == "__main__":
    main()
