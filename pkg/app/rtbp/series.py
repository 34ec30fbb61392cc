"""
The printed power-series expansion of the Lagrangian around a triangular
point (degrees 0 to 4) and the printed quadratic coefficients E, F, G,
evaluated as transcribed and audited against the jet expansion.

Transcription readings:
  - "(1 + mu) q1" in the degree-1 and degree-2 terms is read as (1 - mu) q1;
  - the prefixes of the cubic and quartic displays are read as 1/3! and 1/4!;
  - pieces following a monomial bracket belong to that monomial, and the
    1/2 brace of the quadratic display covers the x^2, 2xy and y^2 groups;
  - "[xyab + yxab]" is taken literally as 2ab xy;
  - unclosed braces in E and F close at the end of the display.
Velocity-coupled drag groups of degree 3 and 4 cannot be transcribed and are
reported as such.
"""

import logging
from collections import defaultdict
from typing import Dict, Optional, Tuple

import numpy as np

from app.core.exceptions import SingularityError
from app.rtbp.jets import MONOMIALS, Monomial, expand_lagrangian
from app.rtbp.normalization import h2_from_hessian
from app.rtbp.params import SystemParams
from app.schemas.audit import AuditEntry, SeriesAudit
from app.schemas.equilibrium import EquilibriumPoint

logger = logging.getLogger(__name__)

ABS_TOL = 1e-10
REL_TOL = 1e-8

VARIABLE_NAMES = ("x", "y", "xdot", "ydot")

UNTRANSCRIBED = [
    "degree-3 drag group W1 (a xdot + b ydot)/2 {...}: illegible factor 's' in the y^2 term",
    "degree-4 drag group W1 (a xdot + b ydot)/(2*3) {...}: last term has no monomial",
]

PrintedTable = Dict[Monomial, float]


def monomial_label(exps: Monomial) -> str:
    parts = []
    for name, power in zip(VARIABLE_NAMES, exps):
        if power == 1:
            parts.append(name)
        elif power > 1:
            parts.append(f"{name}^{power}")
    return " ".join(parts) if parts else "1"


def _distances(params: SystemParams, a: float, b: float) -> Tuple[float, float, float]:
    rho1 = a**2 + b**2
    rho2 = (a - 1.0) ** 2 + b**2
    if rho1 == 0.0 or rho2 == 0.0:
        raise SingularityError("printed series centred on a primary")
    return 1.0 / np.sqrt(rho1), 1.0 / np.sqrt(rho2), 1.0 / rho1


def printed_series(params: SystemParams, point: EquilibriumPoint) -> PrintedTable:
    """
    Printed L0..L4 coefficients keyed by exponents of (x, y, x', y').

    Values are Taylor coefficients (the multinomial 1/k! weights applied), so
    they compare directly with the jet coefficients.
    """
    mu, q1, a2, w1, n = params.mu, params.q1, params.a2, params.w1, params.n
    a = point.x_star + mu
    b = point.y_star
    f1, f2, f3 = _distances(params, a, b)
    am = a - 1.0
    g1 = (1.0 - mu) * q1
    obl = mu * a2 / 2.0
    nw = n * w1

    table: Dict[Monomial, float] = defaultdict(float)

    # L0
    table[(0, 0, 0, 0)] = (
        n**2 / 2.0 * (a**2 + b**2)
        + g1 * f1
        + mu * f2
        + obl * f2**3
        - nw * np.arctan(b / a)
    )

    # L1
    table[(0, 0, 0, 1)] += n * a + w1 * b * f3
    table[(0, 0, 1, 0)] += -n * b + w1 * a * f3
    table[(1, 0, 0, 0)] += (
        n**2 * a
        + g1 * (-(f1**3) * a)
        + mu * am * f2**3
        + obl * (-3.0 * f2**5 * am + nw * b * f3)
    )
    table[(0, 1, 0, 0)] += (
        n**2 * b
        + g1 * (-(f1**3) * b)
        + mu * (-(f2**3) * b)
        + obl * (-3.0 * f2**5 * b)
        + nw * f3 * a
    )

    # L2
    table[(0, 0, 2, 0)] += 0.5
    table[(0, 0, 0, 2)] += 0.5
    table[(1, 0, 0, 1)] += n
    table[(0, 1, 1, 0)] += -n
    table[(2, 0, 0, 0)] += n**2 / 2.0
    table[(0, 2, 0, 0)] += n**2 / 2.0
    table[(2, 0, 0, 0)] += 0.5 * (
        g1 * (3.0 * f1**2 * a**2 - 1.0) * f1**3
        + mu * (3.0 * f2**3 * am**2 - 1.0) * f2**3
        + obl * (15.0 * f2**7 * am**2 - 45.0 * f2**5)
        - nw * (2.0 * f3**2 * a * b)
    )
    table[(1, 1, 0, 0)] += 0.5 * 2.0 * (
        g1 * (6.0 * f1**5 * a * b)
        + mu * (6.0 * f2**5 * am * b)
        + obl * (15.0 * f2**7 * am * b)
        - nw / 2.0 * (2.0 * f3**2 * b**2 - 2.0 * f3**2 * a**2)
    )
    table[(0, 2, 0, 0)] += 0.5 * (
        g1 * (3.0 * f1**5 * b**2 - f1**3)
        + mu * (3.0 * f2**5 * b**2 - f2**3)
        + obl * (15.0 * f2**7 * b**2 - 45.0 * f2**5)
        + nw * (2.0 * f3**2 * a * b)
    )
    table[(1, 0, 1, 0)] += w1 * (f3 / 2.0 - a**2 * f3**3)
    table[(0, 1, 0, 1)] += w1 * (f3 / 2.0 - b**2 * f3**3)
    table[(1, 1, 0, 0)] += -w1 * 2.0 * a * b * f3**2

    # L3 = 1/3! {x^3 [.] + 3 x^2 y [.] + 3 x y^2 [.] + y^3 [.]}
    cubic = 1.0 / 6.0
    table[(3, 0, 0, 0)] += cubic * (
        g1 * (-15.0 * f1**7 * a**3 + 9.0 * f1**5 * a)
        + mu * (-15.0 * f2**7 * am**3 + 9.0 * f2**5 * am)
        + obl * (-105.0 * f2**9 * am**3 + 45.0 * am * f2**7)
        - nw * (-8.0 * f3**3 * a**2 * b**2 + 2.0 * f3**2 * b)
    )
    table[(2, 1, 0, 0)] += cubic * 3.0 * (
        g1 * (-15.0 * f1**7 * a**2 * b + 3.0 * f1**5 * b)
        + mu * (-15.0 * f2**7 * am**2 + 3.0 * f2**5 * b)
        + obl * (-105.0 * f2**9 * am**2 * b + 15.0 * b * f2**7)
        - nw / 3.0 * (-8.0 * f3**3 * a * b**2 - 2.0 * f3**2 * a)
    )
    table[(1, 2, 0, 0)] += cubic * 3.0 * (
        g1 * (-15.0 * f1**7 * a * b**2 + 3.0 * f1**5 * a)
        + mu * (-15.0 * f2**7 * b**2 + f2**5) * am
        + obl * (-105.0 * f2**9 * am * b**2 + 15.0 * am * f2**7)
        - nw / 3.0 * (-8.0 * f3**3 * b**2 + 16.0 * f3**3 * a**2 * b + 2.0 * f3**2 * b)
    )
    table[(0, 3, 0, 0)] += cubic * (
        g1 * (-15.0 * f1**7 * b**3 + 9.0 * f1**5 * b)
        + mu * (-15.0 * f2**7 * b**2 + 9.0 * f2**5) * b
        + obl * (-105.0 * f2**9 * b**3 + 45.0 * f2**7 * b)
        - nw * (8.0 * f3**3 * a * b**2 - 2.0 * f3**2 * a)
    )

    # L4 = 1/4! {x^4 [.] + 4 x^3 y [.] + 6 x^2 y^2 [.] + 4 x y^3 [.] + y^4 [.]}
    quartic = 1.0 / 24.0
    table[(4, 0, 0, 0)] += quartic * (
        (105.0 * f1**9 * a**4 - 90.0 * f1**7 * a**2 + 9.0 * f1**5) * g1
        + mu * (105.0 * f2**9 * am**4 - 90.0 * f2**7 * am**2 + 9.0 * f2**5)
        + obl * (945.0 * f2**11 * am**2 - 630.0 * f2**9 * am**2 + 45.0 * f2**7)
        - nw * (48.0 * f3**4 * a**3 * b - 24.0 * f3**3 * a * b)
    )
    table[(3, 1, 0, 0)] += quartic * 4.0 * (
        g1 * (105.0 * f1**9 * a**3 * b - 45.0 * f1**7 * a * b)
        + mu * (105.0 * f2**9 * am**3 * b - 45.0 * f2**7 * am * b)
        + obl * (945.0 * f2**11 * am**3 * b - 315.0 * f2**9 * am * b)
        - nw
        / 4.0
        * (
            -48.0 * f3**4 * a**4
            + 144.0 * f3**4 * a**2 * b**2
            + 48.0 * f3**3 * a**2
            - 24.0 * f3**2
        )
    )
    table[(2, 2, 0, 0)] += quartic * 6.0 * (
        g1 * (105.0 * f1**9 * a**2 * b**2 - 12.0 * f1**5)
        + mu * (105.0 * f2**9 * am**2 * b**2 - 12.0 * f2**5)
        + obl * (945.0 * f2**11 * am**2 * b**2 - 105.0 * f2**9 * am**2 * b**2 + 15.0 * f2**7)
        - nw / 4.0 * (144.0 * f3**4 * a * b**3 - 144.0 * f3**4 * a**3 * b - 48.0 * f3**3 * a * b)
    )
    table[(1, 3, 0, 0)] += quartic * 4.0 * (
        g1 * (105.0 * f1**9 * a * b**3 - 45.0 * f1**7 * a * b)
        + mu * (105.0 * f2**9 * am * b**3 - 45.0 * f2**7 * am * b)
        + obl * (945.0 * f2**11 * am * b**3 - 315.0 * f2**9 * am * b)
        - nw
        / 4.0
        * (
            48.0 * f3**4 * b**4
            - 48.0 * f3**3 * b**2
            - 144.0 * f3**4 * a**2 * b**2
            + 24.0 * f3**2
        )
    )
    table[(0, 4, 0, 0)] += quartic * (
        g1 * (105.0 * f1**9 * b**4 - 90.0 * f1**7 * b**2 + 9.0 * f1**5)
        + mu * (105.0 * f2**9 * b**4 - 90.0 * f2**7 * b**2 + 9.0 * f2**5)
        + obl * (945.0 * f2**11 * b**4 - 630.0 * f2**9 * b**2 + 45.0 * f2**7)
        - nw / 4.0 * (-48.0 * f3**4 * a * b**3 + 24.0 * f3**3 * a * b)
    )

    return {m: float(table[m]) for m in MONOMIALS if m in table}


def efg_printed(params: SystemParams, a: float, b: float) -> Tuple[float, float, float]:
    """Printed E, F, G at the shifted origin (a, b), evaluated as transcribed."""
    mu, q1, a2, w1, n = params.mu, params.q1, params.a2, params.w1, params.n
    f1, f2, f3 = _distances(params, a, b)
    am = a - 1.0
    g1 = (1.0 - mu) * q1

    E = -0.5 * (
        g1 * (2.0 * a**2 - b**2) * f1**5
        + mu * (2.0 * am**2 - b**2) * f2**5
        - 15.0 * mu * a2 / 2.0 * (2.0 * am**2 + 3.0 * b**2) * f2**7
        + 2.0 * n * w1 * f3**2 * a * b
    )
    F = -0.5 * (
        g1 * (2.0 * b**2 - a**2) * f1**5
        + mu * (2.0 * b**2 - am**2) * f2**5
        - 15.0 * mu * a2 / 2.0 * 2.0 * (b**2 + am**2) * f2**7
        + 2.0 * n * w1 * f3**2 * a * b
    )
    G = -(
        6.0 * g1 * f1**5 * a * b
        + 6.0 * mu * f2**5 * am * b
        + 15.0 * mu * a2 * am * b * f2**7
        - n * w1 * (b**2 - a**2) * f3**2
    )
    return float(E), float(F), float(G)


def _entry(printed: float, oracle: float, abs_tol: float, rel_tol: float) -> AuditEntry:
    abs_diff = abs(printed - oracle)
    scale = max(abs(printed), abs(oracle))
    rel_diff = abs_diff / scale if scale > 0.0 else 0.0
    return AuditEntry(
        printed=printed,
        oracle=oracle,
        abs_diff=abs_diff,
        rel_diff=rel_diff,
        match=abs_diff <= max(abs_tol, rel_tol * scale),
    )


def series_audit(
    params: SystemParams,
    point: EquilibriumPoint,
    abs_tol: Optional[float] = None,
    rel_tol: Optional[float] = None,
) -> SeriesAudit:
    """Diff the printed table and the printed E, F, G against the jet expansion."""
    abs_tol = ABS_TOL if abs_tol is None else abs_tol
    rel_tol = REL_TOL if rel_tol is None else rel_tol

    printed = printed_series(params, point)
    oracle = expand_lagrangian(params, point)

    entries: Dict[str, AuditEntry] = {}
    missing = []
    for m in MONOMIALS:
        label = monomial_label(m)
        if m in printed:
            entries[label] = _entry(printed[m], oracle.coefficient(m), abs_tol, rel_tol)
        elif abs(oracle.coefficient(m)) > abs_tol:
            missing.append(label)

    qh = h2_from_hessian(params, point)
    a = point.x_star + params.mu
    printed_efg = efg_printed(params, a, point.y_star)
    coefficients = {
        name: _entry(value, reference, abs_tol, rel_tol)
        for name, value, reference in zip("EFG", printed_efg, (qh.E, qh.F, qh.G))
    }

    matching = [label for label, e in entries.items() if e.match]
    mismatching = [label for label, e in entries.items() if not e.match]
    logger.info(
        f"series audit: {len(matching)} matching, {len(mismatching)} mismatching, "
        f"{len(missing)} oracle terms not printed"
    )
    return SeriesAudit(
        params=params.as_dict(),
        equilibrium=point,
        abs_tol=abs_tol,
        rel_tol=rel_tol,
        entries=entries,
        coefficients=coefficients,
        matching=matching,
        mismatching=mismatching,
        missing_from_printed=missing,
        untranscribed=list(UNTRANSCRIBED),
    )
