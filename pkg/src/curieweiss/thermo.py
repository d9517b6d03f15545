"""Free-energy functionals of the mean-field magnet, per spin.

The magnet couples pair and quartet (optionally sextet and octet)
exchange through the alignment invariant

    A(m) = P(m)**2 + Q(m)**2,

where P and Q are the occupation averages of cos(2*pi*sigma/(2l+1)) and
sin(2*pi*sigma/(2l+1)), both affine in the moments.  The apparatus sector
s adds the bilinear coupling

    I_s(m) = -g * (cos(2*pi*s/(2l+1)) * P(m) + sin(2*pi*s/(2l+1)) * Q(m)),

which is minimal (equal to -g) exactly on the vertex m_k = s**k.  The
free energy per spin is F = E - T*S + I_s with the entropy S = -sum x ln x
of the occupation weights.  Everything here is exact in the moments:
energy and coupling are low-order polynomials, entropy pulls back through
the affine chart x(m), so gradients and Hessians are available in closed
form at interior points.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import InfeasibleMoments
from .order_params import (
    FEASIBILITY_TOL,
    MomentVector,
    _charts,
    moments_to_weights_array,
)
from .spectrum import SpinQuantum, spectrum, trig_poly

# Occupations below this count as exactly empty: their entropy share is the
# 0*ln(0) = 0 limit and they put the point on the simplex boundary.
_EMPTY = 1e-300


@dataclass(frozen=True)
class ModelParams:
    """Couplings and bath parameters of one model instance.

    ``sector`` is the apparatus eigenvalue s targeted by the measurement
    coupling; None runs the bare magnet.  ``h0`` is a level shift on the
    sigma = 0 state and is only meaningful for twice_l = 2.
    """

    l: SpinQuantum
    temperature: float
    j2: float = 0.0
    j4: float = 0.0
    j6: float = 0.0
    j8: float = 0.0
    g: float = 0.0
    sector: Fraction | None = None
    h0: float = 0.0

    def __post_init__(self):
        if not self.temperature > 0:
            raise ValueError(f"temperature must be > 0, got {self.temperature}")
        if self.g < 0:
            raise ValueError(f"g must be >= 0, got {self.g}")
        if self.g > 0 and self.sector is None:
            raise ValueError("a nonzero coupling g needs a sector")
        if self.sector is not None:
            s = Fraction(self.sector).limit_denominator(2)
            if abs(float(s) - float(self.sector)) > 1e-9 or s not in spectrum(self.l):
                raise ValueError(
                    f"sector {self.sector} is not in the spectrum of l = {self.l.spin}"
                )
            object.__setattr__(self, "sector", s)
        if self.h0 != 0.0 and self.l.twice_l != 2:
            raise ValueError("h0 is only supported for twice_l = 2")


@dataclass(frozen=True, eq=False)
class ThermoEval:
    """One free-energy evaluation; gradient/hessian are None on the boundary."""

    alignment: float
    energy: float
    entropy: float
    coupling: float
    free_energy: float
    gradient: np.ndarray | None
    hessian: np.ndarray | None
    interior: bool


def _values(l: SpinQuantum, m) -> np.ndarray:
    if isinstance(m, MomentVector):
        if m.l != l:
            raise ValueError(f"moment vector is for l = {m.l.spin}, params for {l.spin}")
        return m.values
    m = np.asarray(m, dtype=float)
    if m.shape != (l.twice_l,):
        raise ValueError(f"expected {l.twice_l} moments, got shape {m.shape}")
    return m


def _feasible_weights(l: SpinQuantum, mv: np.ndarray) -> np.ndarray:
    x = moments_to_weights_array(l, mv)
    if np.any(x < -FEASIBILITY_TOL):
        sigmas = spectrum(l)
        bad = np.nonzero(x < -FEASIBILITY_TOL)[0]
        detail = ", ".join(f"x[{sigmas[j]}] = {x[j]:.6e}" for j in bad)
        raise InfeasibleMoments(f"infeasible moments: {detail}",
                                [(sigmas[j], float(x[j])) for j in bad])
    return np.where(x < 0.0, 0.0, x)


def alignment(m: MomentVector) -> float:
    """The squared mean phase vector A = P**2 + Q**2, in [0, 1]."""
    mv = _values(m.l, m)
    _feasible_weights(m.l, mv)
    p, q = trig_poly(m.l).phase_parts(mv)
    return float(p * p + q * q)


def _exchange(params: ModelParams, a):
    return -(params.j2 / 2) * a - (params.j4 / 4) * a**2 \
        - (params.j6 / 6) * a**3 - (params.j8 / 8) * a**4


def energy(params: ModelParams, m) -> float:
    """Exchange energy per spin, plus the h0 level shift when set."""
    mv = _values(params.l, m)
    x = _feasible_weights(params.l, mv)
    p, q = trig_poly(params.l).phase_parts(mv)
    e = _exchange(params, p * p + q * q)
    if params.h0 != 0.0:
        e += params.h0 * x[params.l.twice_l // 2]
    return float(e)


def entropy(m: MomentVector) -> float:
    """Mixing entropy -sum x ln x of the occupation weights."""
    mv = _values(m.l, m)
    x = _feasible_weights(m.l, mv)
    live = x[x > _EMPTY]
    return float(-(live * np.log(live)).sum())


def coupling(params: ModelParams, m) -> float:
    """Measurement coupling I_s; requires params.sector to be set."""
    if params.sector is None:
        raise ValueError("coupling requires a sector")
    mv = _values(params.l, m)
    _feasible_weights(params.l, mv)
    poly = trig_poly(params.l)
    p, q = poly.phase_parts(mv)
    s = params.sector
    return float(-params.g * (poly.cos_at(s) * p + poly.sin_at(s) * q))


def coupling_two_outcome(g: float, s: int, m1: float) -> float:
    """Coupling of a three-state magnet read out by a two-outcome probe.

    The probe only resolves the sign of the magnetization, so its back
    action enters through m1 alone: (g/2)(1 - (3/2)s**2) - (3/2) g s m1.
    Valid for s in {-1, 0, 1} and |m1| <= 1/2.
    """
    if s not in (-1, 0, 1):
        raise ValueError(f"s must be one of -1, 0, 1, got {s}")
    if abs(m1) > 0.5 + 1e-12:
        raise ValueError(f"|m1| must be <= 1/2, got {m1}")
    return (g / 2) * (1 - 1.5 * s * s) - 1.5 * g * s * m1


def free_energy(params: ModelParams, m) -> ThermoEval:
    """Evaluate F = E - T*S + I_s with analytic first and second derivatives.

    On the simplex boundary (some weight exactly zero) the value is still
    returned but gradient and hessian are None.
    """
    l = params.l
    mv = _values(l, m)
    x = _feasible_weights(l, mv)
    return _eval_at(params, x, mv)


def free_energy_weights(params: ModelParams, weights) -> ThermoEval:
    """free_energy evaluated at explicit occupation weights.

    Recovering weights from moments cancels catastrophically once an
    occupation drops below about 1e-15; passing the weights directly keeps
    the entropy and its derivatives accurate down to 1e-300.  The weights
    must be nonnegative and sum to 1 within 1e-9 (they are renormalized).
    """
    l = params.l
    x = np.asarray(weights, dtype=float)
    if x.shape != (l.n_states,):
        raise ValueError(f"expected {l.n_states} weights, got shape {x.shape}")
    if np.any(x < -FEASIBILITY_TOL) or abs(x.sum() - 1.0) > 1e-9:
        raise InfeasibleMoments(
            "weights must be nonnegative and sum to 1", []
        )
    x = np.where(x < 0.0, 0.0, x)
    x = x / x.sum()
    powers, _ = _charts(l.twice_l)
    mv = x @ powers[:, 1:]
    return _eval_at(params, x, mv)


def _eval_at(params: ModelParams, x: np.ndarray, mv: np.ndarray) -> ThermoEval:
    l = params.l
    poly = trig_poly(l)
    c = poly.cos_coeffs[1:]
    d = poly.sin_coeffs[1:]
    p = poly.cos_coeffs[0] + c @ mv
    q = poly.sin_coeffs[0] + d @ mv
    a = p * p + q * q

    e = _exchange(params, a)
    zero_idx = l.twice_l // 2 if params.h0 != 0.0 else None
    if zero_idx is not None:
        e += params.h0 * x[zero_idx]

    live = x > _EMPTY
    s_mix = float(-(x[live] * np.log(x[live])).sum())

    if params.sector is not None:
        cos_s = poly.cos_at(params.sector)
        sin_s = poly.sin_at(params.sector)
        i_s = -params.g * (cos_s * p + sin_s * q)
    else:
        i_s = 0.0

    t = params.temperature
    f = float(e) - t * s_mix + float(i_s)

    interior = bool(np.all(live))
    grad = hess = None
    if interior:
        _, from_full = _charts(l.twice_l)
        w = from_full[:, 1:]          # d x_sigma / d m_k
        grad_a = 2.0 * (p * c + q * d)
        hess_a = 2.0 * (np.outer(c, c) + np.outer(d, d))
        e1 = -0.5 * (params.j2 + params.j4 * a + params.j6 * a**2 + params.j8 * a**3)
        e2 = -0.5 * (params.j4 + 2 * params.j6 * a + 3 * params.j8 * a**2)
        grad = e1 * grad_a + t * ((np.log(x) + 1.0) @ w)
        hess = e2 * np.outer(grad_a, grad_a) + e1 * hess_a \
            + t * (w.T @ (w / x[:, None]))
        if zero_idx is not None:
            grad = grad + params.h0 * w[zero_idx, :]
        if params.sector is not None:
            grad = grad - params.g * (cos_s * c + sin_s * d)
        hess = 0.5 * (hess + hess.T)

    return ThermoEval(
        alignment=float(a),
        energy=float(e),
        entropy=s_mix,
        coupling=float(i_s),
        free_energy=f,
        gradient=grad,
        hessian=hess,
        interior=interior,
    )


def free_energy_batch(params: ModelParams, m: np.ndarray):
    """Grid fast path: F for many moment vectors at once, no derivatives.

    m has shape (npts, 2l).  Returns (f, feasible); f is NaN where the
    point is infeasible.
    """
    l = params.l
    m = np.asarray(m, dtype=float)
    x = moments_to_weights_array(l, m)
    feasible = x.min(axis=-1) >= -FEASIBILITY_TOL
    x = np.clip(x, 0.0, None)

    poly = trig_poly(l)
    p, q = poly.phase_parts(m)
    a = p * p + q * q
    e = _exchange(params, a)
    if params.h0 != 0.0:
        e = e + params.h0 * x[..., l.twice_l // 2]

    safe = np.where(x > _EMPTY, x, 1.0)
    s_mix = -(safe * np.log(safe)).sum(axis=-1)

    f = e - params.temperature * s_mix
    if params.sector is not None:
        cos_s = poly.cos_at(params.sector)
        sin_s = poly.sin_at(params.sector)
        f = f - params.g * (cos_s * p + sin_s * q)
    return np.where(feasible, f, np.nan), feasible
