"""Constants ledger and the Picard iteration for (-Delta)^s u = |grad u|^q + omega.

The iteration u_{k+1} = I_{2s}(|grad u_k|^q dx) + I_{2s}(omega) contracts at
rate delta once the measure is small in the admissibility sense, and every
constant in that statement is computable from (n, s, q, theta).  The ledger
carries them all; delta collapses to theta algebraically when the operative
ratio bound is set to theta times its threshold, so the measured increment
ratios of a run can be compared directly against the requested theta.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .capacity import c1_threshold, wolff_ratio
from .core import Grid, GridField, Measure, Parameters, VectorGridField, total_mass
from .errors import Diverged, NotAdmissible, ThetaOutOfRange
from .fraclap import TestFunction, default_test_functions, weak_residual
from .riesz import (
    gradient_comparison_constant,
    riesz_gradient_field,
    riesz_gradient_measure,
    riesz_potential_field,
    riesz_potential_measure,
)


@dataclass(frozen=True)
class ConstantsLedger:
    """Every constant of the contraction argument, from (n, s, q, theta).

    c_grad bounds |grad I_{2s}(mu)| by c_grad * I_{2s-1}(mu); c1_threshold is
    the largest admissibility ratio the argument tolerates and c1 the
    operative value theta * c1_threshold.  c_grad_uniform bounds |grad u_k|
    uniformly, c_grad_step and c_step are the geometric prefactors of the
    gradient and value increments, contraction is the measured-able rate
    (equal to theta by construction), and a_limit is the fixed point of
    a -> c_grad (a^q c1 + 1).
    """

    theta: float
    c_grad: float
    c1_threshold: float
    c1: float
    c_grad_uniform: float
    c_grad_step: float
    c_step: float
    contraction: float
    a_limit: float

    def to_dict(self) -> dict:
        return {
            "theta": self.theta,
            "c_grad": self.c_grad,
            "c1_threshold": self.c1_threshold,
            "c1": self.c1,
            "c_grad_uniform": self.c_grad_uniform,
            "c_grad_step": self.c_grad_step,
            "c_step": self.c_step,
            "contraction": self.contraction,
            "a_limit": self.a_limit,
        }


def constants_ledger(params: Parameters, theta: float) -> ConstantsLedger:
    if not 0.0 < theta < 1.0:
        raise ThetaOutOfRange(f"theta {theta} outside (0, 1)")
    q = params.q
    qp = params.p
    c0 = gradient_comparison_constant(params.n, params.s)
    c1s = c1_threshold(params)
    c1 = theta * c1s
    c2 = c0 * qp
    c3 = c0 * c2**q * c1
    c4 = c2 ** (q - 1.0) * q * c3
    delta = c0 * c2 ** (q - 1.0) * q * c1

    a = c0
    for _ in range(100000):
        a_next = c0 * (a**q * c1 + 1.0)
        if abs(a_next - a) < 1e-12:
            a = a_next
            break
        a = a_next
    return ConstantsLedger(
        theta=theta,
        c_grad=c0,
        c1_threshold=c1s,
        c1=c1,
        c_grad_uniform=c2,
        c_grad_step=c3,
        c_step=c4,
        contraction=delta,
        a_limit=a,
    )


@dataclass
class SolveReport:
    converged: bool = False
    iterations: int = 0
    sup_u: list = field(default_factory=list)
    sup_increment: list = field(default_factory=list)
    sup_gradient_increment: list = field(default_factory=list)
    increment_ratios: list = field(default_factory=list)
    first_increment: float = 0.0
    representation_residual: float = float("nan")
    sandwich_lower_ok: bool = False
    sandwich_upper: float = float("nan")
    gradient_bound_ratio: float = float("nan")
    weak_residuals: list = field(default_factory=list)
    admissibility: dict = field(default_factory=dict)
    ledger: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "converged": self.converged,
            "iterations": self.iterations,
            "sup_u": list(self.sup_u),
            "sup_increment": list(self.sup_increment),
            "sup_gradient_increment": list(self.sup_gradient_increment),
            "increment_ratios": list(self.increment_ratios),
            "first_increment": self.first_increment,
            "representation_residual": self.representation_residual,
            "sandwich_lower_ok": self.sandwich_lower_ok,
            "sandwich_upper": self.sandwich_upper,
            "gradient_bound_ratio": self.gradient_bound_ratio,
            "weak_residuals": list(self.weak_residuals),
            "admissibility": dict(self.admissibility),
            "ledger": dict(self.ledger),
        }


def _grad_magnitude(g: VectorGridField) -> np.ndarray:
    return g.magnitude().values


def representation_residual(
    u: GridField, grad_u: VectorGridField, omega: Measure, params: Parameters
) -> float:
    """sup |u - I_2s(|grad u|^q) - I_2s(omega)| / sup |u|."""
    grid = u.grid
    sup_u = float(np.max(np.abs(u.values)))
    if sup_u == 0.0:
        return 0.0
    gq = GridField(grid, _grad_magnitude(grad_u) ** params.q)
    rhs = riesz_potential_field(gq, 2.0 * params.s, method="fft").values
    rhs = rhs + riesz_potential_measure(omega, 2.0 * params.s, grid).values
    return float(np.max(np.abs(u.values - rhs))) / sup_u


def sandwich_check(
    u: GridField, omega: Measure, params: Parameters
) -> tuple[bool, float]:
    """Lower bound u >= I_2s(omega) pointwise, and the measured upper ratio."""
    u0 = riesz_potential_measure(omega, 2.0 * params.s, u.grid).values
    lower_ok = bool(np.all(u.values >= u0 - 1e-10))
    keep = u0 >= 1e-14
    upper = float(np.max(u.values[keep] / u0[keep])) if keep.any() else 1.0
    return lower_ok, upper


def gradient_bound_check(
    grad_u: VectorGridField, omega: Measure, params: Parameters
) -> float:
    """max |grad u| / I_{2s-1}(omega) over points where the potential lives."""
    v = riesz_potential_measure(omega, 2.0 * params.s - 1.0, grad_u.grid).values
    mag = _grad_magnitude(grad_u)
    keep = v >= 1e-14
    return float(np.max(mag[keep] / v[keep])) if keep.any() else 0.0


def picard_solve(
    omega: Measure,
    params: Parameters,
    grid: Grid,
    theta: float = 0.5,
    tol: float = 1e-8,
    max_iter: int = 200,
    test_functions: list[TestFunction] | None = None,
) -> tuple[GridField, VectorGridField, SolveReport]:
    """Iterate u_{k+1} = I_2s(|grad u_k|^q dx) + I_2s(omega) to its fixed point.

    The gradient of each iterate comes from the vector kernel applied to the
    combined datum, never from finite differences, so the gradient bounds that
    drive the contraction argument hold discretely as well.  The measure must
    already satisfy the admissibility bound for the requested theta; scaling
    is deliberately not done here (see scale_measure_admissible).
    """
    ledger = constants_ledger(params, theta)
    report = SolveReport(ledger=ledger.to_dict())

    if total_mass(omega) == 0.0:
        u = grid.zeros()
        grad = VectorGridField(grid, tuple(grid.zeros() for _ in range(grid.n)))
        report.converged = True
        report.iterations = 1
        report.representation_residual = 0.0
        report.sandwich_lower_ok = True
        report.sandwich_upper = 1.0
        report.gradient_bound_ratio = 0.0
        report.weak_residuals = [0.0] * len(
            test_functions if test_functions is not None else default_test_functions(grid)
        )
        return u, grad, report

    adm = wolff_ratio(omega, params, grid)
    report.admissibility = adm.to_dict()
    if adm.c1_hat > ledger.c1 * (1.0 + 1e-12):
        raise NotAdmissible(
            f"measured ratio {adm.c1_hat:.3e} exceeds theta x threshold "
            f"{ledger.c1:.3e}; rescale with scale_measure_admissible first"
        )

    s2 = 2.0 * params.s
    u0 = riesz_potential_measure(omega, s2, grid)
    g0 = riesz_gradient_measure(omega, params.s, grid)
    g0_vals = [c.values for c in g0.components]

    u = u0.values.copy()
    grad = [v.copy() for v in g0_vals]
    first_inc = 0.0
    diverging = 0
    converged = False
    iterations = 0

    for k in range(max_iter):
        iterations = k + 1
        mag = np.sqrt(sum(g * g for g in grad))
        gq = GridField(grid, mag**params.q)
        u_next = riesz_potential_field(gq, s2, method="fft").values + u0.values
        g_next_field = riesz_gradient_field(gq, params.s, method="fft")
        g_next = [c.values + g0_vals[i] for i, c in enumerate(g_next_field.components)]

        inc = float(np.max(np.abs(u_next - u)))
        ginc = float(
            np.max(np.sqrt(sum((a - b) ** 2 for a, b in zip(g_next, grad))))
        )
        report.sup_u.append(float(np.max(np.abs(u_next))))
        report.sup_increment.append(inc)
        report.sup_gradient_increment.append(ginc)
        if k == 0:
            first_inc = inc
            report.first_increment = inc
        else:
            prev = report.sup_increment[-2]
            ratio = inc / prev if prev > 0.0 else 0.0
            report.increment_ratios.append(ratio)
            if ratio > 1.0:
                diverging += 1
                if diverging >= 5:
                    raise Diverged(
                        f"increment ratio above 1 for {diverging} consecutive steps"
                    )
            else:
                diverging = 0

        u = u_next
        grad = g_next
        if inc <= tol * first_inc:
            converged = True
            break

    u_field = GridField(grid, u)
    grad_field = VectorGridField(grid, tuple(GridField(grid, g) for g in grad))

    report.converged = converged
    report.iterations = iterations
    report.representation_residual = representation_residual(
        u_field, grad_field, omega, params
    )
    report.sandwich_lower_ok, report.sandwich_upper = sandwich_check(
        u_field, omega, params
    )
    report.gradient_bound_ratio = gradient_bound_check(grad_field, omega, params)
    family = test_functions if test_functions is not None else default_test_functions(grid)
    report.weak_residuals = [
        weak_residual(u_field, grad_field, omega, params, phi) for phi in family
    ]
    return u_field, grad_field, report
