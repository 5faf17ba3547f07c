"""Model parameters for parametric down-conversion (PDC) coupled to cascaded
up-conversion (CUpC) in a finite nonlinear crystal.

Three second-order processes run simultaneously inside the crystal, pumped by
a strong classical wave: PDC into signal/idler modes, up-conversion of the
signal, and up-conversion of the idler.  Each process carries a complex
coupling constant (the effective susceptibility and pump amplitude are
absorbed into it) and a real wavevector mismatch:

    kappa   [cm^-1]  PDC coupling
    eta_s   [cm^-1]  signal up-conversion coupling
    eta_i   [cm^-1]  idler up-conversion coupling
    delta_tilde [cm^-1]  PDC mismatch        k_p - k_as - k_ai
    delta_s     [cm^-1]  signal CUpC mismatch k_bs - k_as - k_p
    delta_i     [cm^-1]  idler CUpC mismatch  k_bi - k_ai - k_p
    length      [cm]     crystal length

Units are fixed: cm^-1 for couplings and mismatches, cm for lengths.  There
is no unit-system abstraction.  The degenerate two-mode configuration is not
a separate type; it is the constraint eta_i = eta_s, delta_i = delta_s (see
:func:`degenerate_params`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace


def _finite(x: complex) -> bool:
    return math.isfinite(x.real) and math.isfinite(x.imag)


@dataclass(frozen=True)
class ModelParams:
    """Immutable coupling constants, mismatches and crystal length.

    Complex couplings are accepted with arbitrary phase; only magnitudes and
    relative phases affect the observables, but phases propagate exactly
    through the solvers.
    """

    kappa: complex
    eta_s: complex
    eta_i: complex
    delta_tilde: float
    delta_s: float
    delta_i: float
    length: float

    def swapped(self) -> "ModelParams":
        """Exchange the signal and idler roles: (eta_s, delta_s) <-> (eta_i, delta_i)."""
        return replace(self, eta_s=self.eta_i, eta_i=self.eta_s,
                       delta_s=self.delta_i, delta_i=self.delta_s)


@dataclass(frozen=True)
class DerivedParams:
    """Scalar quantities derived from :class:`ModelParams`.

    g_s_sq, g_i_sq [cm^-2]   g^2 = |eta|^2 + delta^2/4 per up-conversion arm
    phi            [cm^-1]   phi = delta_tilde - (delta_s + delta_i)/2
    p_coef         [cm^-2]   quartic coefficient P
    q_coef         [cm^-3]   real value Q; the characteristic equation is
                             lambda^4 + P lambda^2 + i Q lambda + R = 0
    r_coef         [cm^-4]   quartic coefficient R
    phi_cas_*      [cm^-1]   cascaded mismatches: a two-step process can be
                             phase matched even when each step is not
    """

    g_s_sq: float
    g_i_sq: float
    phi: float
    p_coef: float
    q_coef: float
    r_coef: float
    phi_cas_s: float
    phi_cas_i: float
    phi_cas_si: float


def validate(params: ModelParams) -> ModelParams:
    """Check invariants on raw input; return the params unchanged if valid.

    Raises ValueError naming the offending field for non-finite entries or a
    negative crystal length.
    """
    for name in ("kappa", "eta_s", "eta_i"):
        if not _finite(complex(getattr(params, name))):
            raise ValueError(f"non-finite parameter: {name}")
    for name in ("delta_tilde", "delta_s", "delta_i", "length"):
        if not math.isfinite(getattr(params, name)):
            raise ValueError(f"non-finite parameter: {name}")
    if params.length < 0:
        raise ValueError("length must be nonnegative")
    return params


def derive(params: ModelParams) -> DerivedParams:
    """Compute the characteristic-quartic coefficients and cascaded mismatches.

    P = g_s^2 + g_i^2 + phi^2/2 - |kappa|^2
    Q = phi (g_i^2 - g_s^2) - |kappa|^2 (delta_i - delta_s)/2
    R = (g_s^2 - phi^2/4)(g_i^2 - phi^2/4)
        - |kappa|^2/4 (phi - delta_s)(phi - delta_i)
    """
    a2 = abs(params.kappa) ** 2
    gs2 = abs(params.eta_s) ** 2 + params.delta_s**2 / 4
    gi2 = abs(params.eta_i) ** 2 + params.delta_i**2 / 4
    phi = params.delta_tilde - (params.delta_s + params.delta_i) / 2
    p = gs2 + gi2 + phi**2 / 2 - a2
    q = phi * (gi2 - gs2) - a2 * (params.delta_i - params.delta_s) / 2
    r = (gs2 - phi**2 / 4) * (gi2 - phi**2 / 4) \
        - a2 / 4 * (phi - params.delta_s) * (phi - params.delta_i)
    return DerivedParams(
        g_s_sq=gs2, g_i_sq=gi2, phi=phi,
        p_coef=p, q_coef=q, r_coef=r,
        phi_cas_s=params.delta_tilde - params.delta_s,
        phi_cas_i=params.delta_tilde - params.delta_i,
        phi_cas_si=params.delta_tilde - params.delta_s - params.delta_i,
    )


def degenerate_params(kappa: complex, eta: complex, delta_tilde: float,
                      delta_s: float, length: float) -> ModelParams:
    """Frequency-degenerate configuration: one PDC mode and one up-converted
    mode, realized by eta_i = eta_s and delta_i = delta_s."""
    return validate(ModelParams(kappa=complex(kappa), eta_s=complex(eta),
                                eta_i=complex(eta), delta_tilde=delta_tilde,
                                delta_s=delta_s, delta_i=delta_s, length=length))


def three_mode_params(kappa: complex, eta_s: complex, delta_tilde: float,
                      delta_s: float, length: float) -> ModelParams:
    """Three-mode configuration: only the signal is up-converted
    (eta_i = 0, delta_i = 0)."""
    return validate(ModelParams(kappa=complex(kappa), eta_s=complex(eta_s),
                                eta_i=0j, delta_tilde=delta_tilde,
                                delta_s=delta_s, delta_i=0.0, length=length))


def is_degenerate(params: ModelParams, tol: float = 1e-12) -> bool:
    """True when eta_i = eta_s and delta_i = delta_s within tolerance."""
    scale = max(1.0, abs(params.eta_s), abs(params.eta_i))
    dscale = max(1.0, abs(params.delta_s), abs(params.delta_i))
    return (abs(params.eta_i - params.eta_s) <= tol * scale
            and abs(params.delta_i - params.delta_s) <= tol * dscale)


def is_three_mode(params: ModelParams, tol: float = 1e-12) -> bool:
    """True when eta_i = 0 and delta_i = 0 within tolerance."""
    return (abs(params.eta_i) <= tol * max(1.0, abs(params.eta_s))
            and abs(params.delta_i) <= tol * max(1.0, abs(params.delta_s)))


# JSON wire format: complex numbers as [re, im] pairs, field names fixed.

def params_to_dict(params: ModelParams) -> dict:
    return {
        "kappa": [params.kappa.real, params.kappa.imag],
        "eta_s": [params.eta_s.real, params.eta_s.imag],
        "eta_i": [params.eta_i.real, params.eta_i.imag],
        "delta_tilde": params.delta_tilde,
        "delta_s": params.delta_s,
        "delta_i": params.delta_i,
        "length": params.length,
    }


def params_from_dict(data: dict) -> ModelParams:
    def _c(v) -> complex:
        if isinstance(v, (list, tuple)):
            return complex(v[0], v[1])
        return complex(v)

    return validate(ModelParams(
        kappa=_c(data["kappa"]),
        eta_s=_c(data["eta_s"]),
        eta_i=_c(data["eta_i"]),
        delta_tilde=float(data["delta_tilde"]),
        delta_s=float(data["delta_s"]),
        delta_i=float(data["delta_i"]),
        length=float(data["length"]),
    ))
