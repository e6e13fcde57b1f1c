"""Analytic energy pipeline: injection cost E_A, feedback packet energy
E_1, extracted energy E_B (regularized 4-D integral plus its
order-of-magnitude estimate), scaling-law fits, and the current to
energy-density conversion for channel U.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, asdict

import numpy as np

from . import params as P
from .chiral_field import CorrelatorKernel, WindowProfile, \
    quad_form_vacuum, window_derivative_l2
from .detector import delta_v, detector_from_params, measurement_coupling, \
    sense_window, signal_rms
from .quadrature import IntegrationSpec, integrate_nd


class SingularityWarning(UserWarning):
    """Regularized pole integral is sensitive to the regulator width."""


def feedback_window(params: P.ExperimentParams) -> WindowProfile:
    """Feedback profile: amplitude lambda_amp, sigma = b, centered b/2 - L
    (the packet is created a distance L upstream of the coupling region)."""
    return WindowProfile(center=0.5 * params.b - params.L, sigma=params.b,
                         amplitude=params.lambda_amp)


def gs_squared(params: P.ExperimentParams) -> float:
    """Vacuum variance of the dimensionless recorded-signal operator,
    (e v_g R / 2 dV)^2 <(int rho dw)^2>."""
    kernel = CorrelatorKernel(nu=params.nu_S, eps_uv=params.eps_uv)
    g = measurement_coupling(params)
    return quad_form_vacuum(kernel, sense_window(params), order=1, coupling=g)


def compute_EA(params: P.ExperimentParams) -> float:
    """Average energy injected into the sensed channel by one measurement:

        E_A = (hbar v_g nu_S / 4 pi) (e v_g R / 2 dV)^2 int (d^2 w)^2 dx
    """
    g = measurement_coupling(params)
    l2 = window_derivative_l2(sense_window(params), order=2)
    return P.HBAR * params.v_g * params.nu_S / (4.0 * math.pi) * g * g * l2


def compute_E1(params: P.ExperimentParams) -> float:
    """Average energy of the feedback packet before it reaches the
    coupling region:

        E_1 = (pi hbar v_g / nu_U) int (d lambda)^2 dy * (<G^2> + 1/4)
    """
    l2 = window_derivative_l2(feedback_window(params), order=1)
    return (math.pi * P.HBAR * params.v_g / params.nu_U * l2
            * (gs_squared(params) + 0.25))


def eb_order_estimate(params: P.ExperimentParams) -> float:
    """Literal order-of-magnitude product for the extracted energy:

        (e^2 lambda / 4 pi eps l) * (e v_g R / l dV) * (l / L)^5
    """
    dv = delta_v(detector_from_params(params))
    coulomb = (P.E_CHARGE ** 2 * params.lambda_amp
               / (4.0 * math.pi * params.epsilon * params.l))
    drive = P.E_CHARGE * params.v_g * params.R / (params.l * dv)
    return coulomb * drive * (params.l / params.L) ** 5


def _eb_prefactor(params: P.ExperimentParams) -> float:
    """e^3 v_g R nu_S / (16 pi^3 eps dV), the time-integral prefactor.

    Moving the two profile derivatives onto the correlator (valid when
    the interaction window is unrestricted) turns the cubic kernel into
    12x the quintic one, which reproduces the familiar
    3 e^3 v_g R nu_S / (4 pi^3 eps dV) quintic prefactor.
    """
    dv = delta_v(detector_from_params(params))
    return (P.E_CHARGE ** 3 * params.v_g * params.R * params.nu_S
            / (16.0 * math.pi ** 3 * params.epsilon * dv))


def _eb_integral(params: P.ExperimentParams, rel_tol: float,
                 eps: float, max_subdivisions: int = 20000,
                 causal: bool = True):
    """The 4-D weight integral of the extracted-energy formula.

    First-order response of the feedback-channel energy, written as a
    time integral: axes are the coupling-region coordinates x, y on
    [0, b], the elapsed distance tau = v_g*(t - T) >= 0 since the
    feedback packet was created, and the measured-window coordinate
    xbar.  The weight is the second derivative of the feedback profile
    evaluated where the packet sits at time t, and the kernel is the
    regularized cubic pole Re(u + i eps)^-3 at u = x + tau + v_g T
    - xbar, the distance the measured fluctuation has run since the
    measurement.  xbar is parameterized as xbar = c - eps*sinh(theta),
    c = x + tau + v_g T, which turns the pole into a smooth bounded
    function of theta.

    With ``causal=False`` the tau integral is extended to the left of
    the packet-creation time as well; on the unrestricted window this
    is identical to the quintic form carrying the undifferentiated
    profile (checked in the tests).
    """
    b = params.b
    vgt = params.v_g * params.T_delay
    w_a = sense_window(params)
    lam = feedback_window(params)
    span = 8.0 * w_a.sigma
    tau_hi = params.L + 0.5 * b + 8.0 * lam.sigma
    tau_lo = 0.0 if causal else -(0.5 * b + 8.0 * lam.sigma)
    c_min, c_max = tau_lo + vgt, b + tau_hi + vgt
    th_lo = -math.asinh(max(span - c_min, eps) / eps)
    th_hi = math.asinh(max(c_max + span, eps) / eps)

    inv_eps2 = eps ** -2.0

    def integrand(pts):
        x, y, tau, theta = pts[:, 0], pts[:, 1], pts[:, 2], pts[:, 3]
        sinh = np.sinh(theta)
        c = x + tau + vgt
        xbar = c - eps * sinh
        w = np.where(np.abs(xbar) <= span, w_a(xbar), 0.0)
        kern = inv_eps2 * ((sinh + 1j) ** -3.0).real * np.cosh(theta)
        coulomb = 1.0 / np.sqrt((x - y) ** 2 + params.d ** 2)
        return coulomb * lam.derivative(y - tau, order=2) * w * kern

    spec = IntegrationSpec(
        bounds=((0.0, b), (0.0, b), (tau_lo, tau_hi), (th_lo, th_hi)),
        rel_tol=rel_tol, abs_tol=0.0, max_subdivisions=max_subdivisions)
    return integrate_nd(integrand, spec)


def compute_EB(params: P.ExperimentParams, rel_tol: float = 1e-4,
               allow_short_separation: bool = False,
               check_regulator: bool = False, causal: bool = True) -> float:
    """Energy gained by the feedback channel, first order in the coupling.

    Evaluates the regularized 4-D integral; the sign convention is that
    a positive value means the stated feedback polarity extracts energy.
    The result changes sign with L: the underlying kernel (a Gaussian
    smoothed against an odd cubic pole) oscillates before settling onto
    its ~1/L^5 tail, so extraction at the default L = 2l turns into
    injection by L = 5l.

    Requires L >= 2l (where the pole regularization is demonstrably
    stable) unless ``allow_short_separation``.  With ``check_regulator``
    the integral is re-evaluated at twice the regulator width and a
    :class:`SingularityWarning` is emitted if the two differ by > 5%.
    """
    if params.L < 2.0 * params.l and not allow_short_separation:
        raise ValueError(
            f"L = {params.L:.3g} < 2l = {2 * params.l:.3g}: regularization "
            "validity not established (pass allow_short_separation=True to force)")
    res = _eb_integral(params, rel_tol, params.eps_uv, causal=causal)
    value = -_eb_prefactor(params) * res.value
    if check_regulator:
        res2 = _eb_integral(params, rel_tol, 2.0 * params.eps_uv, causal=causal)
        value2 = -_eb_prefactor(params) * res2.value
        if value != 0 and abs(value2 - value) > 0.05 * abs(value):
            warnings.warn(
                f"E_B changes by {abs(value2 - value) / abs(value):.1%} when "
                "the regulator is doubled; result is regulator-sensitive",
                SingularityWarning, stacklevel=2)
    return value


def fit_scaling_exponent(params: P.ExperimentParams, L_values,
                         rel_tol: float = 1e-4,
                         use_order_estimate: bool = False) -> float:
    """Least-squares slope of log |E_B| versus log L.

    The order estimate scales as exactly (l/L)^5; the full integral is
    fitted on magnitudes because it changes sign over the usual L grid.
    """
    L_values = sorted(set(float(L) for L in L_values))
    if len(L_values) < 4:
        raise ValueError("need at least 4 distinct L values")
    if min(L_values) < 2.0 * params.l:
        raise ValueError("all L values must be >= 2l")
    energies = []
    for L in L_values:
        p = params.replace(L=L)
        if use_order_estimate:
            energies.append(eb_order_estimate(p))
        else:
            energies.append(compute_EB(p, rel_tol=rel_tol))
    energies = np.abs(energies)
    if np.any(energies == 0.0):
        raise ValueError("E_B vanished at a grid point; slope undefined")
    slope = np.polyfit(np.log(L_values), np.log(energies), 1)[0]
    return float(slope)


def energy_density_from_current(j: float, params: P.ExperimentParams) -> float:
    """eps = pi hbar / (nu_U e^2 v_g) * j^2, J/m from amperes."""
    return (math.pi * P.HBAR / (params.nu_U * P.E_CHARGE ** 2 * params.v_g)
            * j * j)


def current_from_energy_density(eps: float, params: P.ExperimentParams) -> float:
    """Inverse of :func:`energy_density_from_current`."""
    if eps < 0:
        raise ValueError("energy density must be >= 0")
    return math.sqrt(eps * params.nu_U * P.E_CHARGE ** 2 * params.v_g
                     / (math.pi * P.HBAR))


@dataclass(frozen=True)
class EnergyBudget:
    """Every reportable scalar of the protocol, SI units."""

    delta_v: float              # V
    signal_rms: float           # V
    E_A: float                  # J
    E_1: float                  # J
    E_B: float                  # J
    E_B_order_estimate: float   # J
    thermal: float              # J
    detect_current: float       # A
    eps_uv: float               # m, regulator used
    omega_c: float              # rad/s, detector cutoff used
    rel_tol: float              # quadrature tolerance used

    def as_dict(self):
        return asdict(self)


def energy_budget(params: P.ExperimentParams, rel_tol: float = 1e-4,
                  check_regulator: bool = False) -> EnergyBudget:
    """One call producing the complete budget at the given parameters."""
    dv = delta_v(detector_from_params(params))
    rms = signal_rms(params)
    e_a = compute_EA(params)
    e_1 = compute_E1(params)
    e_b = compute_EB(params, rel_tol=rel_tol,
                     check_regulator=check_regulator)
    e_b_order = eb_order_estimate(params)
    # packet energy spread over the typical length scale sets the
    # detectable current
    j = current_from_energy_density(max(e_b, 0.0) / params.l, params)
    return EnergyBudget(
        delta_v=dv, signal_rms=rms, E_A=e_a, E_1=e_1, E_B=e_b,
        E_B_order_estimate=e_b_order,
        thermal=P.thermal_energy(params.temperature),
        detect_current=j, eps_uv=params.eps_uv, omega_c=params.omega_c,
        rel_tol=rel_tol)
