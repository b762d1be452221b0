"""Hand-transcribed event tables shared by the generator and acceptance tests."""

import sympy as sp

from sdemoments.polynomial import Polynomial


def n_poly(D, i):
    return Polynomial.variable(D, i)


def assert_symbolic_equal(p: Polynomial, q: Polynomial):
    assert p.dimension == q.dimension
    for k in set(p.terms) | set(q.terms):
        diff = sp.expand(p.terms.get(k, 0) - q.terms.get(k, 0))
        assert diff == 0, (k, p.terms.get(k), q.terms.get(k))


def vdp_table(eps, nu11, nu22, a, b):
    """Coefficients and displacements of the van der Pol events, transcribed row by row."""
    n1, n2 = n_poly(2, 0), n_poly(2, 1)
    half = sp.Rational(1, 2)
    return {
        (-2, 0): half * nu11**2 * n1 * (n1 - 1),
        (-1, 0): n1 * b,
        (-1, 1): n1 * 1,
        (0, -2): half * nu22**2 * n2 * (n2 - 1),
        (0, -1): n2 * (-a) + n2 * (-eps * a**2 * b) + n2 * (eps * b),
        (0, 0): n2 * (-eps * a**2) + n2 * eps,
        (1, -1): n2 * (-2 * eps * a * b) - n2,
        (1, 0): n2 * (-2 * eps * a),
        (2, -1): n2 * (-eps * b),
        (2, 0): n2 * (-eps),
    }


def ou_table(gam, sig, x0):
    n = n_poly(1, 0)
    return {
        (0,): n * (-gam),
        (-1,): n * (-gam * x0),
        (-2,): n * (n - 1) * (sig**2 / 2),
    }
