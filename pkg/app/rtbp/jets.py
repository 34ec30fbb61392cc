"""
Truncated multivariate Taylor polynomials (jets) in four variables up to
total degree four, and the expansions of the Lagrangian and Hamiltonian
around a triangular point built from them.

Variables are (x, y, x', y') for the Lagrangian and (x, y, px, py) for the
Hamiltonian, all measured from the equilibrium.
"""

import itertools
from typing import Dict, Iterator, Sequence, Tuple, Union

import numpy as np

from app.core.exceptions import JetError, SingularityError
from app.rtbp.params import SystemParams
from app.schemas.equilibrium import EquilibriumPoint

NVARS = 4
MAX_DEGREE = 4

Monomial = Tuple[int, int, int, int]


def _graded_monomials() -> Tuple[Monomial, ...]:
    out = []
    for degree in range(MAX_DEGREE + 1):
        for exps in itertools.product(range(degree + 1), repeat=NVARS):
            if sum(exps) == degree:
                out.append(exps)
    return tuple(out)


MONOMIALS: Tuple[Monomial, ...] = _graded_monomials()
INDEX: Dict[Monomial, int] = {m: i for i, m in enumerate(MONOMIALS)}
SIZE = len(MONOMIALS)  # C(8, 4) = 70
_EXPONENTS = np.array(MONOMIALS, dtype=int)
_DEGREES = _EXPONENTS.sum(axis=1)


def _product_table() -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    left, right, target = [], [], []
    for i, mi in enumerate(MONOMIALS):
        for j, mj in enumerate(MONOMIALS):
            m = tuple(a + b for a, b in zip(mi, mj))
            if sum(m) <= MAX_DEGREE:
                left.append(i)
                right.append(j)
                target.append(INDEX[m])
    return np.array(left), np.array(right), np.array(target)


_LEFT, _RIGHT, _TARGET = _product_table()


def _unit(k: int) -> Monomial:
    exps = [0] * NVARS
    exps[k] = 1
    return tuple(exps)  # type: ignore[return-value]


Scalar = Union[int, float, np.floating]


class Jet4:
    """Immutable truncated Taylor polynomial with 70 coefficient slots."""

    __slots__ = ("coeffs",)
    # numpy scalars defer to the reflected jet operators
    __array_ufunc__ = None

    def __init__(self, coeffs: Sequence[float]) -> None:
        arr = np.array(coeffs, dtype=float)
        if arr.shape != (SIZE,):
            raise JetError(f"expected {SIZE} coefficients, got shape {arr.shape}")
        arr.setflags(write=False)
        self.coeffs = arr

    # construction

    @classmethod
    def constant(cls, value: float) -> "Jet4":
        coeffs = np.zeros(SIZE)
        coeffs[0] = value
        return cls(coeffs)

    @classmethod
    def variable(cls, k: int, value: float = 0.0) -> "Jet4":
        """value + d_k, the jet of the k-th coordinate around `value`."""
        coeffs = np.zeros(SIZE)
        coeffs[0] = value
        coeffs[INDEX[_unit(k)]] = 1.0
        return cls(coeffs)

    # access

    @property
    def constant_term(self) -> float:
        return float(self.coeffs[0])

    def coefficient(self, exps: Sequence[int]) -> float:
        return float(self.coeffs[INDEX[tuple(exps)]])

    __getitem__ = coefficient

    def degree_part(self, degree: int) -> "Jet4":
        return Jet4(np.where(_DEGREES == degree, self.coeffs, 0.0))

    def terms(self, threshold: float = 0.0) -> Iterator[Tuple[Monomial, float]]:
        for m, c in zip(MONOMIALS, self.coeffs):
            if abs(c) > threshold:
                yield m, float(c)

    def gradient(self) -> np.ndarray:
        return np.array([self.coeffs[INDEX[_unit(k)]] for k in range(NVARS)])

    def hessian(self) -> np.ndarray:
        """Second derivatives at the expansion point from the degree-2 slice."""
        hess = np.zeros((NVARS, NVARS))
        for i in range(NVARS):
            for j in range(i, NVARS):
                exps = [0] * NVARS
                exps[i] += 1
                exps[j] += 1
                c = self.coeffs[INDEX[tuple(exps)]]
                if i == j:
                    hess[i, i] = 2.0 * c
                else:
                    hess[i, j] = hess[j, i] = c
        return hess

    def evaluate(self, z: Sequence[float]) -> float:
        """Polynomial value at displacement z from the expansion point."""
        powers = np.prod(np.asarray(z, dtype=float) ** _EXPONENTS, axis=1)
        return float(powers @ self.coeffs)

    def directional(self, direction: Sequence[float], degree: int) -> float:
        """Degree-k Taylor coefficient of t -> jet(t * direction)."""
        powers = np.prod(np.asarray(direction, dtype=float) ** _EXPONENTS, axis=1)
        return float(np.sum(np.where(_DEGREES == degree, powers * self.coeffs, 0.0)))

    # arithmetic

    @staticmethod
    def _coerce(other: Union["Jet4", Scalar]) -> "Jet4":
        if isinstance(other, Jet4):
            return other
        return Jet4.constant(float(other))

    def __add__(self, other):
        return Jet4(self.coeffs + self._coerce(other).coeffs)

    __radd__ = __add__

    def __sub__(self, other):
        return Jet4(self.coeffs - self._coerce(other).coeffs)

    def __rsub__(self, other):
        return Jet4(self._coerce(other).coeffs - self.coeffs)

    def __neg__(self):
        return Jet4(-self.coeffs)

    def __mul__(self, other):
        if not isinstance(other, Jet4):
            return Jet4(self.coeffs * float(other))
        weights = self.coeffs[_LEFT] * other.coeffs[_RIGHT]
        return Jet4(np.bincount(_TARGET, weights=weights, minlength=SIZE))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet4):
            return Jet4(self.coeffs / float(other))
        return self * other.power(-1.0)

    def __rtruediv__(self, other):
        return self._coerce(other) * self.power(-1.0)

    def __pow__(self, alpha):
        return self.power(alpha)

    def compose(self, series: Sequence[float]) -> "Jet4":
        """sum_k series[k] * (self - c0)^k, i.e. a univariate series about c0."""
        t = self - self.constant_term
        result = Jet4.constant(series[min(len(series), MAX_DEGREE + 1) - 1])
        for c in reversed(series[: min(len(series), MAX_DEGREE + 1) - 1]):
            result = result * t + c
        return result

    def power(self, alpha: float) -> "Jet4":
        """(c0 + t)^alpha by the binomial series; needs a nonzero constant term."""
        c0 = self.constant_term
        if c0 == 0.0:
            raise JetError("power of a jet with zero constant term")
        if c0 < 0.0 and float(alpha) != int(alpha):
            raise JetError("non-integer power of a jet with negative constant term")
        # generalized binomial coefficients; finite for negative integer alpha
        coef = 1.0
        series = []
        for k in range(MAX_DEGREE + 1):
            series.append(coef * c0 ** (alpha - k))
            coef *= (alpha - k) / (k + 1)
        return self.compose(series)

    def __repr__(self) -> str:
        shown = ", ".join(f"{m}: {c:.6g}" for m, c in self.terms())
        return f"Jet4({{{shown}}})"


def atan2(y: Jet4, x: Jet4) -> Jet4:
    """
    Jet of arctan(y/x) on the branch continuous at (x0, y0).

    Composes the arctan series about v0 = y0/x0 with v = y/x; the k-th
    derivative coefficient of 1/(1+v^2) is Im((-1)^k (v0 - i)^-(k+1)).
    """
    x0, y0 = x.constant_term, y.constant_term
    if x0 == 0.0:
        raise SingularityError("arctan jet centred on x + mu = 0")
    v0 = y0 / x0
    series = [float(np.arctan2(y0, x0))]
    for k in range(MAX_DEGREE):
        g_k = ((-1) ** k * (v0 - 1j) ** (-(k + 1))).imag
        series.append(g_k / (k + 1))
    return (y / x).compose(series)


def _center(params: SystemParams, point: EquilibriumPoint) -> Tuple[float, float]:
    a = point.x_star + params.mu
    b = point.y_star
    if a**2 + b**2 == 0.0 or (a - 1.0) ** 2 + b**2 == 0.0:
        raise SingularityError("expansion centred on a primary")
    return a, b


def jet_f_functions(
    params: SystemParams, point: EquilibriumPoint
) -> Tuple[Jet4, Jet4, Jet4, Jet4, Jet4]:
    """
    Jets of f1 = 1/r1, f2 = 1/r2, f3 = 1/r1^2, f4 = 1/r2^3 and
    f5 = arctan((y+b)/(x+a)), with a = x* + mu and b = y*.
    """
    a, b = _center(params, point)
    X1 = Jet4.variable(0, a)
    X2 = Jet4.variable(0, a - 1.0)
    Y = Jet4.variable(1, b)
    rho1 = X1 * X1 + Y * Y
    rho2 = X2 * X2 + Y * Y
    f1 = rho1.power(-0.5)
    f2 = rho2.power(-0.5)
    f3 = rho1.power(-1.0)
    f4 = rho2.power(-1.5)
    f5 = atan2(Y, X1)
    return f1, f2, f3, f4, f5


def _lagrangian_jet(
    params: SystemParams,
    point: EquilibriumPoint,
    vx: Jet4,
    vy: Jet4,
    fs: Tuple[Jet4, Jet4, Jet4, Jet4, Jet4],
) -> Jet4:
    """Lagrangian with the given velocity jets substituted."""
    mu, q1, a2, w1, n = params.mu, params.q1, params.a2, params.w1, params.n
    f1, f2, f3, f4, f5 = fs
    x = Jet4.variable(0, point.x_star)
    y = Jet4.variable(1, point.y_star)
    xa = x + mu
    return (
        0.5 * (vx * vx + vy * vy)
        + n * (x * vy - vx * y)
        + 0.5 * n**2 * (x * x + y * y)
        + (1.0 - mu) * q1 * f1
        + mu * f2
        + 0.5 * mu * a2 * f4
        + w1 * (0.5 * (xa * vx + y * vy) * f3 - n * f5)
    )


def expand_lagrangian(params: SystemParams, point: EquilibriumPoint) -> Jet4:
    """Lagrangian jet in (x, y, x', y') around the point at rest."""
    fs = jet_f_functions(params, point)
    return _lagrangian_jet(params, point, Jet4.variable(2), Jet4.variable(3), fs)


def equilibrium_momenta(params: SystemParams, point: EquilibriumPoint) -> Tuple[float, float]:
    """Momenta of the point at rest."""
    a, b = _center(params, point)
    w = params.w1 / (2.0 * (a**2 + b**2))
    return -params.n * b + w * a, params.n * point.x_star + w * b


def expand_hamiltonian(params: SystemParams, point: EquilibriumPoint) -> Jet4:
    """
    Hamiltonian jet in (x, y, px, py) measured from the point at rest.

    The momenta relation is affine in the velocities, so the Legendre
    transform H = -L + px x' + py y' is carried out inside jet arithmetic
    with the velocities written as jets of the canonical variables.
    """
    fs = jet_f_functions(params, point)
    f3 = fs[2]
    n, w1, mu = params.n, params.w1, params.mu
    px0, py0 = equilibrium_momenta(params, point)
    x = Jet4.variable(0, point.x_star)
    y = Jet4.variable(1, point.y_star)
    px = Jet4.variable(2, px0)
    py = Jet4.variable(3, py0)
    vx = px + n * y - 0.5 * w1 * f3 * (x + mu)
    vy = py - n * x - 0.5 * w1 * f3 * y
    lagrangian = _lagrangian_jet(params, point, vx, vy, fs)
    return -lagrangian + px * vx + py * vy
