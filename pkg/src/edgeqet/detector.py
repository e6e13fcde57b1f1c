"""RC-circuit detector model: vacuum voltage noise, measured-signal RMS,
the dimensionless measurement coupling, and the Gaussian-pointer
measurement law.

The pointer conjugate momentum is eliminated analytically; only the
resulting Gaussian kernel (outcome law and conditioning width) is ever
represented.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import params as P
from .chiral_field import CorrelatorKernel, WindowProfile, quad_form_vacuum


@dataclass(frozen=True)
class RCDetector:
    R: float
    C: float
    omega_c: float

    def __post_init__(self):
        if min(self.R, self.C) <= 0 or self.omega_c < 0:
            raise ValueError("R, C must be > 0 and omega_c >= 0")


def delta_v(det: RCDetector) -> float:
    """Vacuum RMS of the detector voltage with spectral cutoff omega_c.

    The band integral int_0^wc w/(w^2 + (RC)^-2) dw is logarithmic, so
    the cutoff is an explicit knob:
        dV = sqrt( hbar/(2 pi R C^2) * ln(1 + (wc R C)^2) ).
    """
    x = det.omega_c * det.R * det.C
    return math.sqrt(P.HBAR / (2.0 * math.pi * det.R * det.C ** 2)
                     * math.log1p(x * x))


def detector_from_params(params: P.ExperimentParams) -> RCDetector:
    return RCDetector(R=params.R, C=params.C, omega_c=params.omega_c)


def sense_window(params: P.ExperimentParams) -> WindowProfile:
    """Unit-amplitude Gaussian window of the measured region, sigma = l."""
    return WindowProfile(center=0.0, sigma=params.l, amplitude=1.0)


def signal_rms(params: P.ExperimentParams,
               window: WindowProfile | None = None) -> float:
    """RMS of the voltage shift R*dQ/dt induced by vacuum charge noise.

    R dQ/dt at switch-on equals -e v_g R int rho(x) dw(x) dx, so the
    variance is the vacuum quadratic form with kernel dw.
    """
    if window is None:
        window = sense_window(params)
    kernel = CorrelatorKernel(nu=params.nu_S, eps_uv=params.eps_uv)
    qf = quad_form_vacuum(kernel, window, order=1)
    return P.E_CHARGE * params.v_g * params.R * math.sqrt(qf)


def measurement_coupling(params: P.ExperimentParams,
                         dv: float | None = None) -> float:
    """e v_g R / (2 dV), the length-dimension coupling of the pointer."""
    if dv is None:
        dv = delta_v(detector_from_params(params))
    if dv <= 0:
        raise ValueError("delta_v must be positive")
    return P.E_CHARGE * params.v_g * params.R / (2.0 * dv)


@dataclass(frozen=True)
class GaussianLaw:
    """Zero-mean-by-default normal law for the measurement outcome."""

    mean: float
    var: float

    @property
    def std(self):
        return math.sqrt(self.var)

    def pdf(self, v):
        v = np.asarray(v, dtype=float)
        return (np.exp(-0.5 * (v - self.mean) ** 2 / self.var)
                / math.sqrt(2.0 * math.pi * self.var))

    def sample(self, rng, n):
        return self.mean + self.std * rng.standard_normal(n)


@dataclass(frozen=True)
class MeasurementModel:
    """Gaussian-pointer model of one switch-on measurement."""

    delta_v: float        # pointer standard deviation, V
    signal_rms: float     # RMS of the measured observable, V
    coupling: float       # e v_g R / (2 dV), m

    def signal_kernel(self, params: P.ExperimentParams, x):
        """-e v_g R dw(x): volts per unit charge density."""
        w = sense_window(params)
        return -P.E_CHARGE * params.v_g * params.R * w.derivative(x, order=1)


def measurement_model(params: P.ExperimentParams) -> MeasurementModel:
    dv = delta_v(detector_from_params(params))
    return MeasurementModel(delta_v=dv, signal_rms=signal_rms(params),
                            coupling=measurement_coupling(params, dv))


def outcome_distribution(model: MeasurementModel) -> GaussianLaw:
    """Predictive law of the recorded outcome: pointer noise plus signal.

    Completeness of the Gaussian POVM is equivalent to this law being a
    normalized normal density, which it is by construction.
    """
    return GaussianLaw(mean=0.0, var=model.delta_v ** 2 + model.signal_rms ** 2)
