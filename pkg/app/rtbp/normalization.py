"""
Quadratic part of the Hamiltonian at a triangular point, the characteristic
quartic and its spectrum, first-order normalization to action-angle form,
resonance detection and the stability verdict.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from app.core.config import settings
from app.core.exceptions import NormalizationError, ParameterError
from app.rtbp.dynamics import vector_field
from app.rtbp.equilibria import refined_point
from app.rtbp.jets import expand_hamiltonian
from app.rtbp.params import SystemParams
from app.schemas.equilibrium import Branch, EquilibriumPoint
from app.schemas.stability import ComplexValue, Resonance, StabilityReport, Verdict

logger = logging.getLogger(__name__)

# canonical symplectic form for (x, y, px, py)
J = np.block([[np.zeros((2, 2)), np.eye(2)], [-np.eye(2), np.zeros((2, 2))]])

Quartic = Tuple[float, float, float, float, float]


@dataclass(frozen=True)
class QuadraticHamiltonian:
    """
    H2 = 1/2 (px^2 + py^2) + n (y px - x py) + E x^2 + F y^2 + G x y.

    E, F, G follow the Hessian convention (E = 1/2 H_xx, F = 1/2 H_yy,
    G = H_xy). `full_matrix` is the complete Hessian in (x, y, px, py),
    including the position-momentum couplings that drag adds.
    """

    n: float
    E: float
    F: float
    G: float
    full_matrix: np.ndarray

    def coefficient_matrix(self) -> np.ndarray:
        n = self.n
        return np.array(
            [
                [2.0 * self.E, self.G, 0.0, -n],
                [self.G, 2.0 * self.F, n, 0.0],
                [0.0, n, 1.0, 0.0],
                [-n, 0.0, 0.0, 1.0],
            ]
        )

    @property
    def cross_terms(self) -> np.ndarray:
        """d2H / d(x, y) d(px, py)."""
        return self.full_matrix[:2, 2:]

    def evaluate(self, z: np.ndarray) -> float:
        z = np.asarray(z, dtype=float)
        return float(0.5 * z @ self.coefficient_matrix() @ z)


def _from_matrix(n: float, hess: np.ndarray) -> QuadraticHamiltonian:
    return QuadraticHamiltonian(
        n=n, E=0.5 * hess[0, 0], F=0.5 * hess[1, 1], G=hess[0, 1], full_matrix=hess
    )


def h2_from_hessian(params: SystemParams, point: EquilibriumPoint) -> QuadraticHamiltonian:
    """Quadratic Hamiltonian from the degree-2 slice of the Hamiltonian jet."""
    hess = expand_hamiltonian(params, point).hessian()
    if not np.all(np.isfinite(hess)):
        raise NormalizationError("quadratic Hamiltonian is not finite")
    return _from_matrix(params.n, hess)


def hessian_analytic(params: SystemParams, point: EquilibriumPoint) -> np.ndarray:
    """
    Closed-form Hessian of the canonical Hamiltonian at the point at rest.

    With u = px + n y - c X/rho and v = py - n x - c Y/rho (c = W1/2,
    X = x + mu, rho = r1^2) both zero at rest, the kinetic part contributes
    grad(u) grad(u)^T + grad(v) grad(v)^T.
    """
    mu, q1, a2, w1, n = params.mu, params.q1, params.a2, params.w1, params.n
    X = point.x_star + mu
    Y = point.y_star
    rho = X**2 + Y**2
    c = 0.5 * w1

    grad_u = np.array([-c * (Y**2 - X**2) / rho**2, n + 2.0 * c * X * Y / rho**2])
    grad_v = np.array([-n + 2.0 * c * X * Y / rho**2, -c * (X**2 - Y**2) / rho**2])

    def inverse_r(k: float, d: np.ndarray) -> np.ndarray:
        r2 = d @ d
        return k * (3.0 * np.outer(d, d) - r2 * np.eye(2)) / r2**2.5

    d1 = np.array([X, Y])
    d2 = np.array([X - 1.0, Y])
    r2sq = d2 @ d2
    potential = inverse_r((1.0 - mu) * q1, d1) + inverse_r(mu, d2)
    potential += 0.5 * mu * a2 * (
        15.0 * np.outer(d2, d2) / r2sq**3.5 - 3.0 * np.eye(2) / r2sq**2.5
    )
    arctan = np.array(
        [[2.0 * X * Y, Y**2 - X**2], [Y**2 - X**2, -2.0 * X * Y]]
    ) / rho**2

    position = (
        np.outer(grad_u, grad_u)
        + np.outer(grad_v, grad_v)
        - n**2 * np.eye(2)
        - potential
        + n * w1 * arctan
    )
    cross = np.column_stack([grad_u, grad_v])
    return np.block([[position, cross], [cross.T, np.eye(2)]])


def h2_analytic(params: SystemParams, point: EquilibriumPoint) -> QuadraticHamiltonian:
    return _from_matrix(params.n, hessian_analytic(params, point))


def characteristic_quartic(qh: QuadraticHamiltonian) -> Quartic:
    """lambda^4 + 2(E + F + n^2) lambda^2 + 4EF - G^2 + n^4 - 2n^2(E + F)."""
    E, F, G, n = qh.E, qh.F, qh.G, qh.n
    return (
        1.0,
        0.0,
        2.0 * (E + F + n**2),
        0.0,
        4.0 * E * F - G**2 + n**4 - 2.0 * n**2 * (E + F),
    )


@dataclass(frozen=True)
class Spectrum:
    discriminant: float
    s_roots: Tuple[complex, complex]
    roots: Tuple[complex, complex, complex, complex]
    omega1: Optional[float]
    omega2: Optional[float]
    verdict: Verdict


def spectrum(quartic: Sequence[float], marginal_tol: Optional[float] = None) -> Spectrum:
    """
    Solve the even quartic as a quadratic in s = lambda^2.

    D = b^2 - 4c; stable needs D > 0 with both s negative, |D| below
    `marginal_tol` is marginal.
    """
    marginal_tol = settings.MARGINAL_TOL if marginal_tol is None else marginal_tol
    lead, odd3, b, odd1, c = (float(v) for v in quartic)
    if lead != 1.0 or odd3 != 0.0 or odd1 != 0.0:
        raise ParameterError("spectrum expects a monic even quartic")

    D = b * b - 4.0 * c
    sqrt_d = np.sqrt(complex(D))
    q = -0.5 * (b + sqrt_d if b >= 0 else b - sqrt_d)
    if q == 0:
        s1 = s2 = 0j
    else:
        s1, s2 = complex(q), complex(c / q)
    if abs(s1) < abs(s2):
        s1, s2 = s2, s1

    l1, l2 = np.sqrt(s1), np.sqrt(s2)
    roots = (complex(l1), complex(-l1), complex(l2), complex(-l2))

    if abs(D) < marginal_tol:
        verdict = Verdict.MARGINAL
    elif D > 0 and s1.real < 0 and s2.real < 0:
        verdict = Verdict.STABLE
    else:
        verdict = Verdict.UNSTABLE

    omega1 = omega2 = None
    if verdict is not Verdict.UNSTABLE and s1.real < 0 and s2.real < 0:
        omega1, omega2 = sorted((float(np.sqrt(-s1.real)), float(np.sqrt(-s2.real))), reverse=True)

    return Spectrum(D, (s1, s2), roots, omega1, omega2, verdict)


@dataclass(frozen=True)
class Linearization:
    matrix: np.ndarray
    eigenvalues: np.ndarray
    characteristic_polynomial: np.ndarray

    @property
    def max_real_part(self) -> float:
        return float(np.max(self.eigenvalues.real))


def linearize_eom(
    params: SystemParams, point: EquilibriumPoint, step: Optional[float] = None
) -> Linearization:
    """Central-difference Jacobian of (x', y', x'', y'') at the point at rest."""
    step = settings.FD_STEP if step is None else step
    z0 = np.array([point.x_star, point.y_star, 0.0, 0.0])
    jac = np.empty((4, 4))
    for j in range(4):
        dz = np.zeros(4)
        dz[j] = step
        jac[:, j] = (vector_field(params, 0.0, z0 + dz) - vector_field(params, 0.0, z0 - dz)) / (
            2.0 * step
        )
    eigenvalues = np.sort_complex(np.linalg.eigvals(jac))
    return Linearization(jac, eigenvalues, np.poly(jac))


def hamiltonian_flow_eigenvalues(qh: QuadraticHamiltonian) -> np.ndarray:
    """Eigenvalues of J times the full Hessian (cross terms retained)."""
    return np.sort_complex(np.linalg.eigvals(J @ qh.full_matrix))


@dataclass(frozen=True)
class NormalForm:
    """z = T w with w = (Q1, Q2, P1, P2); H2(T w) = w1 (Q1^2+P1^2)/2 - w2 (Q2^2+P2^2)/2."""

    T: np.ndarray
    omega1: float
    omega2: float


def normal_form_transform(qh: QuadraticHamiltonian, tol: float = 1e-9) -> NormalForm:
    """
    Real symplectic T bringing H2 to w1 I1 - w2 I2.

    For the eigenvector u + i w of J S at i omega, u and w span an invariant
    plane on which H2 = omega k (Q^2 + P^2)/2 with k = u^T J w. Scaling by
    |k|^(-1/2) and flipping w when k < 0 makes the pair canonical; the sign
    of k is the signature of the mode.
    """
    S = qh.coefficient_matrix()
    values, vectors = np.linalg.eig(J @ S)
    if np.max(np.abs(values.real)) > tol * max(1.0, np.max(np.abs(values))):
        raise NormalizationError("spectrum is not purely imaginary; equilibrium is unstable")

    upper = sorted((i for i in range(4) if values[i].imag > 0), key=lambda i: -values[i].imag)
    if len(upper) != 2:
        raise NormalizationError("degenerate frequencies")
    omega1, omega2 = (float(values[i].imag) for i in upper)
    if omega1 - omega2 < tol:
        raise NormalizationError("degenerate frequencies")

    columns_e, columns_f, signature = [], [], []
    for i in upper:
        u, w = vectors[:, i].real, vectors[:, i].imag
        kappa = float(u @ J @ w)
        if kappa == 0.0:
            raise NormalizationError("eigenvector has vanishing symplectic norm")
        alpha = 1.0 / np.sqrt(abs(kappa))
        columns_e.append(alpha * u)
        columns_f.append(np.sign(kappa) * alpha * w)
        signature.append(int(np.sign(kappa)))

    if signature != [1, -1]:
        raise NormalizationError(f"unexpected mode signature {tuple(signature)}")

    T = np.column_stack(columns_e + columns_f)
    return NormalForm(T=T, omega1=omega1, omega2=omega2)


def action_angle_point(
    nf: NormalForm, phi: Sequence[float], actions: Sequence[float]
) -> np.ndarray:
    """Phase-space displacement for angles (phi1, phi2) and actions (I1, I2)."""
    phi = np.asarray(phi, dtype=float)
    radius = np.sqrt(2.0 * np.asarray(actions, dtype=float))
    w = np.concatenate([radius * np.sin(phi), radius * np.cos(phi)])
    return nf.T @ w


def detect_resonances(
    omega1: float,
    omega2: float,
    max_order: Optional[int] = None,
    tol: Optional[float] = None,
    exact_tol: Optional[float] = None,
) -> List[Resonance]:
    """
    Integer pairs with 0 < |k1| + |k2| <= max_order and |k1 w1 + k2 w2| < tol,
    one representative per +-(k1, k2).
    """
    max_order = settings.RESONANCE_MAX_ORDER if max_order is None else max_order
    tol = settings.RESONANCE_TOL if tol is None else tol
    exact_tol = settings.EXACT_RESONANCE_TOL if exact_tol is None else exact_tol
    if not (omega1 > 0 and omega2 > 0):
        raise ParameterError("frequencies must be positive")

    found = []
    for k1 in range(0, max_order + 1):
        for k2 in range(-max_order, max_order + 1):
            order = abs(k1) + abs(k2)
            if order == 0 or order > max_order or (k1 == 0 and k2 < 0):
                continue
            residual = abs(k1 * omega1 + k2 * omega2)
            if residual < tol:
                found.append(
                    Resonance(k1=k1, k2=k2, residual=residual, exact=residual < exact_tol)
                )
    found.sort(key=lambda r: (r.order, r.k1, r.k2))
    return found


def stability_verdict(
    params: SystemParams,
    branch: Branch = Branch.L4,
    marginal_tol: Optional[float] = None,
    resonance_tol: Optional[float] = None,
) -> StabilityReport:
    """Refined equilibrium -> H2 -> quartic -> spectrum -> resonances."""
    point = refined_point(params, branch)
    qh = h2_from_hessian(params, point)
    quartic = characteristic_quartic(qh)
    spec = spectrum(quartic, marginal_tol)

    resonances: List[Resonance] = []
    if spec.omega1 is not None and spec.omega2 is not None and spec.omega2 > 0:
        resonances = detect_resonances(spec.omega1, spec.omega2, tol=resonance_tol)

    linear = linearize_eom(params, point)
    logger.debug(
        f"mu={params.mu:.12g} D={spec.discriminant:.6e} verdict={spec.verdict.value}"
    )
    return StabilityReport(
        params=params.as_dict(),
        equilibrium=point,
        E=qh.E,
        F=qh.F,
        G=qh.G,
        quartic=list(quartic),
        roots=ComplexValue.list_of(spec.roots),
        omega1=spec.omega1,
        omega2=spec.omega2,
        discriminant_D=spec.discriminant,
        resonances=resonances,
        verdict=spec.verdict,
        eom_eigenvalues=ComplexValue.list_of(linear.eigenvalues),
        eom_max_real_part=linear.max_real_part,
        hamiltonian_eigenvalues=ComplexValue.list_of(hamiltonian_flow_eigenvalues(qh)),
    )
