from math import factorial, prod

import numpy as np
import pytest
from numpy.polynomial import Chebyshev

from app.core.exceptions import JetError
from app.rtbp.dynamics import CanonicalState, PhaseState, hamiltonian, lagrangian
from app.rtbp.equilibria import refined_point
from app.rtbp.jets import (
    INDEX,
    MONOMIALS,
    SIZE,
    Jet4,
    atan2,
    equilibrium_momenta,
    expand_hamiltonian,
    expand_lagrangian,
    jet_f_functions,
)
from app.rtbp.params import make_params


def random_jet(rng, c0=None, scale=0.3):
    coeffs = rng.uniform(-scale, scale, SIZE)
    coeffs[0] = rng.uniform(0.5, 2.0) if c0 is None else c0
    return Jet4(coeffs)


def taylor_along(func, degree, h=0.2, deg=20):
    """Degree-k Taylor coefficient at 0 of a smooth scalar function of t."""
    cheb = Chebyshev.interpolate(func, deg, domain=[-h, h])
    return cheb.deriv(degree)(0.0) / factorial(degree) if degree else cheb(0.0)


def _binomials(alpha, count=5):
    """Generalized binomial coefficients C(alpha, k), k < count."""
    return [prod(alpha - j for j in range(k)) / factorial(k) for k in range(count)]


def _richardson(diff, h):
    """Central difference with its h^2 error term extrapolated away."""
    return (4.0 * diff(h / 2.0) - diff(h)) / 3.0


def _exponents(*axes):
    exps = [0, 0, 0, 0]
    for axis in axes:
        exps[axis] += 1
    return tuple(exps)


def fd_coefficients(func, z0, h1=1e-3, h2=1e-2):
    """Taylor coefficients of degree <= 2 at z0 by extrapolated central differences."""
    z0 = np.asarray(z0, dtype=float)
    unit = np.eye(4)

    def f(z):
        return float(func(z))

    coeffs = {_exponents(): f(z0)}
    for i in range(4):
        e = unit[i]

        def first(h, e=e):
            return (f(z0 + h * e) - f(z0 - h * e)) / (2.0 * h)

        def second(h, e=e):
            return (f(z0 + h * e) - 2.0 * f(z0) + f(z0 - h * e)) / h**2

        coeffs[_exponents(i)] = _richardson(first, h1)
        coeffs[_exponents(i, i)] = _richardson(second, h2) / 2.0
        for j in range(i + 1, 4):
            g = unit[j]

            def mixed(h, e=e, g=g):
                return (
                    f(z0 + h * e + h * g)
                    - f(z0 + h * e - h * g)
                    - f(z0 - h * e + h * g)
                    + f(z0 - h * e - h * g)
                ) / (4.0 * h**2)

            coeffs[_exponents(i, j)] = _richardson(mixed, h2)
    return coeffs


def homogeneous_part_from_directions(func, degree, rng, h=0.3, deg=24):
    """Least-squares recovery of the degree-k Taylor coefficients from directional ones."""
    monomials = [m for m in MONOMIALS if sum(m) == degree]
    directions = rng.normal(size=(3 * len(monomials), 4))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    design = np.array([[np.prod(d ** np.array(m)) for m in monomials] for d in directions])
    values = np.array(
        [taylor_along(lambda t, d=d: func(d, t), degree, h=h, deg=deg) for d in directions]
    )
    solution, *_ = np.linalg.lstsq(design, values, rcond=None)
    return dict(zip(monomials, solution))


def random_perturbed_params(rng):
    return make_params(
        rng.uniform(0.005, 0.45),
        q1=rng.uniform(0.99, 1.0),
        a2=rng.uniform(0.0, 1e-3),
        w1=rng.uniform(0.0, 1e-4),
    )


def test_monomials_are_graded():
    assert SIZE == 70 == len(MONOMIALS)
    degrees = [sum(m) for m in MONOMIALS]
    assert degrees == sorted(degrees)
    assert MONOMIALS[0] == (0, 0, 0, 0)
    assert INDEX[(4, 0, 0, 0)] < SIZE


def test_known_polynomial_accessors():
    x, y = Jet4.variable(0), Jet4.variable(1)
    p = 1.0 + 2.0 * x + 3.0 * x * y + x * x * y * y - 0.5 * y * y
    assert p.constant_term == 1.0
    assert p[(1, 0, 0, 0)] == 2.0
    assert p.coefficient((2, 2, 0, 0)) == 1.0
    np.testing.assert_array_equal(p.gradient(), [2.0, 0.0, 0.0, 0.0])
    hess = p.hessian()
    assert hess[0, 1] == 3.0 and hess[1, 0] == 3.0
    assert hess[1, 1] == -1.0
    assert p.evaluate([0.1, 0.2, 0.0, 0.0]) == pytest.approx(
        1.0 + 0.2 + 0.06 + 0.0004 - 0.02, abs=1e-15
    )
    assert p.degree_part(4).coefficient((2, 2, 0, 0)) == 1.0
    assert p.degree_part(4).constant_term == 0.0
    assert dict(p.terms())[(1, 1, 0, 0)] == 3.0


def test_products_beyond_degree_four_truncate():
    x = Jet4.variable(0)
    assert np.all((x * x * x * x * x).coeffs == 0.0)


def test_multiplication_commutative_and_associative(rng):
    for _ in range(10):
        a, b, c = (random_jet(rng) for _ in range(3))
        np.testing.assert_allclose((a * b).coeffs, (b * a).coeffs, atol=1e-14)
        np.testing.assert_allclose(((a * b) * c).coeffs, (a * (b * c)).coeffs, atol=1e-12)


@pytest.mark.parametrize("alpha", [2.0, 3.0, -1.0, -0.5])
def test_power_inverse_round_trip(rng, alpha):
    for _ in range(5):
        jet = random_jet(rng)
        back = jet.power(alpha).power(1.0 / alpha)
        np.testing.assert_allclose(back.coeffs, jet.coeffs, atol=1e-12)


def test_integer_power_matches_product(rng):
    jet = random_jet(rng)
    np.testing.assert_allclose((jet**3).coeffs, (jet * jet * jet).coeffs, atol=1e-12)


def test_binomial_series_inverse_sqrt():
    series = Jet4.variable(0, 1.0).power(-0.5)
    expected = [1.0, -0.5, 3.0 / 8.0, -5.0 / 16.0, 35.0 / 128.0]
    got = [series[(k, 0, 0, 0)] for k in range(5)]
    np.testing.assert_allclose(got, expected, atol=1e-15)


@pytest.mark.parametrize("alpha", [-1.0, -2.0, -3.0])
def test_negative_integer_power_is_finite(alpha):
    series = Jet4.variable(0, 2.0).power(alpha)
    assert np.all(np.isfinite(series.coeffs))
    got = [series[(k, 0, 0, 0)] for k in range(5)]
    expected = [binomial * 2.0 ** (alpha - k) for k, binomial in enumerate(_binomials(alpha))]
    np.testing.assert_allclose(got, expected, rtol=1e-14)


def test_reciprocal_series():
    series = 1.0 / Jet4.variable(0, 2.0)
    got = [series[(k, 0, 0, 0)] for k in range(5)]
    np.testing.assert_allclose(got, [0.5, -0.25, 0.125, -0.0625, 0.03125], rtol=1e-15)


def test_classical_hessian_is_finite(classical, classical_l4):
    hess = expand_hamiltonian(classical, classical_l4).hessian()
    assert np.all(np.isfinite(hess))
    assert hess[0, 0] == pytest.approx(0.25, abs=1e-12)


def test_power_of_negative_constant():
    jet = Jet4.variable(0, -2.0)
    assert (jet**2)[(0, 0, 0, 0)] == pytest.approx(4.0)
    assert (jet**2)[(1, 0, 0, 0)] == pytest.approx(-4.0)
    with pytest.raises(JetError):
        jet.power(0.5)


def test_power_needs_nonzero_constant():
    with pytest.raises(JetError):
        Jet4.variable(0).power(-1.0)


def test_division_round_trip(rng):
    a, b = random_jet(rng), random_jet(rng)
    np.testing.assert_allclose(((a / b) * b).coeffs, a.coeffs, atol=1e-12)
    np.testing.assert_allclose((1.0 / b * b).coeffs, Jet4.constant(1.0).coeffs, atol=1e-12)


def test_numpy_scalars_combine_with_jets():
    jet = Jet4.variable(1, 2.0)
    scaled = np.float64(3.0) * jet
    assert isinstance(scaled, Jet4)
    assert scaled.constant_term == 6.0


def test_wrong_shape_rejected():
    with pytest.raises(JetError):
        Jet4(np.zeros(5))


def test_atan2_jet_matches_arctan2(rng):
    x0, y0 = 0.51, 0.86
    jet = atan2(Jet4.variable(1, y0), Jet4.variable(0, x0))
    for _ in range(20):
        dx, dy = rng.uniform(-1e-3, 1e-3, 2)
        exact = np.arctan2(y0 + dy, x0 + dx)
        assert jet.evaluate([dx, dy, 0.0, 0.0]) == pytest.approx(exact, abs=1e-14)


def test_atan2_jet_second_quadrant():
    jet = atan2(Jet4.variable(1, 0.5), Jet4.variable(0, -0.4))
    assert jet.constant_term == pytest.approx(np.arctan2(0.5, -0.4))


def test_f_functions_constant_terms(perturbed, perturbed_l4):
    a = perturbed_l4.x_star + perturbed.mu
    b = perturbed_l4.y_star
    r1 = np.hypot(a, b)
    r2 = np.hypot(a - 1.0, b)
    f1, f2, f3, f4, f5 = jet_f_functions(perturbed, perturbed_l4)
    assert f1.constant_term == pytest.approx(1.0 / r1, rel=1e-15)
    assert f2.constant_term == pytest.approx(1.0 / r2, rel=1e-15)
    assert f3.constant_term == pytest.approx(1.0 / r1**2, rel=1e-15)
    assert f4.constant_term == pytest.approx(1.0 / r2**3, rel=1e-14)
    assert f5.constant_term == pytest.approx(np.arctan2(b, a), rel=1e-15)


@pytest.mark.parametrize("which", ["classical", "perturbed"])
def test_lagrangian_jet_matches_directional_taylor(request, rng, which):
    params = request.getfixturevalue(which)
    point = request.getfixturevalue(f"{which}_l4")
    jet = expand_lagrangian(params, point)
    for _ in range(12):
        d = rng.normal(size=4)
        d /= np.linalg.norm(d)

        def along(t, d=d):
            state = PhaseState(point.x_star + t * d[0], point.y_star + t * d[1], t * d[2], t * d[3])
            return lagrangian(params, state)

        for k in range(5):
            oracle = taylor_along(along, k)
            assert jet.directional(d, k) == pytest.approx(oracle, abs=1e-6 * max(1.0, abs(oracle)))


@pytest.mark.parametrize("which", ["classical", "perturbed"])
def test_hamiltonian_jet_matches_directional_taylor(request, rng, which):
    params = request.getfixturevalue(which)
    point = request.getfixturevalue(f"{which}_l4")
    jet = expand_hamiltonian(params, point)
    px0, py0 = equilibrium_momenta(params, point)
    for _ in range(12):
        d = rng.normal(size=4)
        d /= np.linalg.norm(d)

        def along(t, d=d):
            state = CanonicalState(
                point.x_star + t * d[0], point.y_star + t * d[1], px0 + t * d[2], py0 + t * d[3]
            )
            return hamiltonian(params, state)

        for k in range(5):
            oracle = taylor_along(along, k)
            assert jet.directional(d, k) == pytest.approx(oracle, abs=1e-6 * max(1.0, abs(oracle)))


def test_hamiltonian_constant_term_is_value_at_rest(perturbed, perturbed_l4):
    jet = expand_hamiltonian(perturbed, perturbed_l4)
    at_rest = hamiltonian(perturbed, PhaseState(perturbed_l4.x_star, perturbed_l4.y_star, 0.0, 0.0))
    assert jet.constant_term == pytest.approx(at_rest, abs=1e-14)


def test_hamiltonian_linear_part_vanishes(perturbed, perturbed_l4):
    gradient = expand_hamiltonian(perturbed, perturbed_l4).gradient()
    assert np.max(np.abs(gradient)) < 1e-10


def test_classical_quadratic_hamiltonian(classical, classical_l4):
    jet = expand_hamiltonian(classical, classical_l4)
    assert jet[(0, 0, 2, 0)] == pytest.approx(0.5, abs=1e-14)
    assert jet[(0, 0, 0, 2)] == pytest.approx(0.5, abs=1e-14)
    assert jet[(0, 1, 1, 0)] == pytest.approx(1.0, abs=1e-14)
    assert jet[(1, 0, 0, 1)] == pytest.approx(-1.0, abs=1e-14)
    assert jet[(2, 0, 0, 0)] == pytest.approx(1.0 / 8.0, abs=1e-12)
    assert jet[(0, 2, 0, 0)] == pytest.approx(-5.0 / 8.0, abs=1e-12)


def test_lagrangian_velocity_block_without_drag(classical, classical_l4):
    jet = expand_lagrangian(classical, classical_l4)
    assert jet[(0, 0, 2, 0)] == 0.5
    assert jet[(1, 0, 1, 0)] == 0.0
    assert jet[(0, 0, 1, 0)] == pytest.approx(-classical_l4.y_star, abs=1e-15)


def test_hamiltonian_quadratic_part_matches_finite_differences(rng):
    for _ in range(50):
        params = random_perturbed_params(rng)
        point = refined_point(params)
        jet = expand_hamiltonian(params, point)
        px0, py0 = equilibrium_momenta(params, point)
        center = [point.x_star, point.y_star, px0, py0]
        oracle = fd_coefficients(lambda z: hamiltonian(params, CanonicalState(*z)), center)
        assert len(oracle) == 15
        for exps, expected in oracle.items():
            assert jet[exps] == pytest.approx(expected, rel=1e-6, abs=1e-10), (params, exps)


def test_lagrangian_cubic_and_quartic_parts_match_directional_fits(rng):
    for _ in range(10):
        params = random_perturbed_params(rng)
        point = refined_point(params)
        jet = expand_lagrangian(params, point)

        def along(d, t):
            state = PhaseState(point.x_star + t * d[0], point.y_star + t * d[1], t * d[2], t * d[3])
            return lagrangian(params, state)

        for degree in (3, 4):
            fitted = homogeneous_part_from_directions(along, degree, rng)
            for exps, expected in fitted.items():
                assert jet[exps] == pytest.approx(expected, rel=1e-6, abs=1e-7), (params, exps)
