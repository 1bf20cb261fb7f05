"""Order-of-magnitude estimates for a microtubule acting as a dipole-quanta cavity.

Every report entry records its value, unit, formula tag, the inputs it was
computed from, the published target it is compared against and whether it
lands within the stated tolerance.

Angular frequencies are in rad/s throughout. The cavity volume and the
coherent count enter the coupling but have no published value, so they must
be supplied explicitly; ``calibrated_inputs`` fixes them by inverting the
published field and coupling targets.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields
from typing import Optional

from .cavity import rabi_coupling, vacuum_field_both
from .core import CONSTS
from .errors import DegenerateInput, MissingOpenParameter

# published targets: (value, unit, tolerance kind, tolerance)
PUBLISHED_TARGETS = {
    "d_dimer": (3e-28, "C*m", "relative", 0.05),  # 3e-18 C*Angstrom
    "E_c": (1e4, "V/m", "orders", 1.0),
    "lambda0": (None, "rad/s", None, None),
    "lambda_MT": (3e11, "rad/s", "factor", 3.0),
    "t_F": (5e-7, "s", "relative", 0.05),
    "Q_MT": (1e8, "1", "orders", 1.0),
    "t_collapse": ((1e-7, 1e-6), "s", "window", None),
}

# SI base-unit exponents (kg, m, s, A)
_DIMS = {
    "1": (0, 0, 0, 0),
    "m": (0, 1, 0, 0),
    "m^3": (0, 3, 0, 0),
    "s": (0, 0, 1, 0),
    "rad/s": (0, 0, -1, 0),
    "C": (0, 0, 1, 1),
    "C*m": (0, 1, 1, 1),
    "V/m": (1, 1, -3, -1),
    "J*s": (1, 2, -1, 0),
    "F/m": (-1, -3, 4, 2),
    "m/s": (0, 1, -1, 0),
    "J": (1, 2, -2, 0),
}

# formula signatures: (output unit, [(input unit, power), ...])
UNITS_TABLE = {
    "d = q e l / eps_r": ("C*m", [("1", 1), ("C", 1), ("m", 1), ("1", -1)]),
    "E = sqrt(hbar w / (2 eps0 eps_r V))": ("V/m", [("J*s", 0.5), ("rad/s", 0.5), ("F/m", -0.5), ("1", -0.5), ("m^3", -0.5)]),
    "lambda0 = E d / hbar": ("rad/s", [("V/m", 1), ("C*m", 1), ("J*s", -1)]),
    "lambda_MT = sqrt(N) lambda0": ("rad/s", [("1", 0.5), ("rad/s", 1)]),
    "t_F = L / v": ("s", [("m", 1), ("m/s", -1)]),
    "Q = w_c T_r": ("1", [("rad/s", 1), ("s", 1)]),
    "U_dd = d^2 / (4 pi eps0 eps_r r^3)": ("J", [("C*m", 2), ("F/m", -1), ("1", -1), ("m", -3)]),
}


def audit_units() -> dict:
    """Check each formula signature; returns {formula: bool}."""
    out = {}
    for name, (unit, terms) in UNITS_TABLE.items():
        total = [0.0, 0.0, 0.0, 0.0]
        for u, power in terms:
            for i, e in enumerate(_DIMS[u]):
                total[i] += power * e
        out[name] = all(abs(t - e) < 1e-12 for t, e in zip(total, _DIMS[unit]))
    return out


@dataclass(frozen=True)
class EstimateInputs:
    mobile_charges: float = 36.0
    dipole_length: float = 4e-9
    eps_rel: float = 80.0
    omega0: float = 1e12
    omega_c: float = 6e12
    cavity_volume: Optional[float] = None
    n_coherent: Optional[float] = None
    mt_length: float = 1e-6
    kink_speed: float = 2.0
    lifetime_Tr: float = 1e-4
    collapse_range: tuple = (1e-7, 1e-6)
    field_convention: str = "si"

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if f.name in ("collapse_range", "field_convention") or v is None:
                continue
            if f.name in ("mobile_charges", "mt_length"):
                if not v >= 0:
                    raise DegenerateInput(f"{f.name} must be non-negative")
            elif not v > 0:
                raise DegenerateInput(f"{f.name} must be positive")
        lo, hi = self.collapse_range
        if not 0 < lo <= hi:
            raise DegenerateInput("collapse_range must be an ordered pair of positive times")
        object.__setattr__(self, "collapse_range", (float(lo), float(hi)))
        if self.field_convention not in ("si", "paper-gaussian"):
            raise DegenerateInput("field_convention must be 'si' or 'paper-gaussian'")


def calibrated_inputs(**overrides) -> EstimateInputs:
    """Defaults plus the volume and coherent count fixed by inverting the targets.

    V = 4.4e-21 m^3 gives E ~ 1e4 V/m at eps_r = 80; N = round((3e11 / lambda0)^2).
    """
    base = EstimateInputs(**{"cavity_volume": 4.4e-21, **overrides})
    if "n_coherent" in overrides:
        return base
    lam0 = rabi_coupling(_field(base)["si"], dimer_dipole(base))
    return EstimateInputs(**{**asdict(base), "n_coherent": float(round((3e11 / lam0) ** 2))})


def dimer_dipole(inputs: EstimateInputs) -> float:
    """Screened dipole q e l / eps_r in C*m."""
    return inputs.mobile_charges * CONSTS.elem_charge * inputs.dipole_length / inputs.eps_rel


def transport_time(mt_length: float, kink_speed: float) -> float:
    if not (mt_length >= 0 and kink_speed > 0):
        raise DegenerateInput("need mt_length >= 0 and kink_speed > 0")
    return mt_length / kink_speed


def quality_factor(omega_c: float, lifetime_Tr: float) -> float:
    if not (omega_c > 0 and lifetime_Tr > 0):
        raise DegenerateInput("omega_c and lifetime_Tr must be positive")
    return omega_c * lifetime_Tr


def dipole_dipole_energy(d: float, eps_rel: float, r: float) -> float:
    """d^2 / (4 pi eps0 eps_r r^3) in J."""
    return d * d / (4.0 * math.pi * CONSTS.eps0 * eps_rel * r**3)


_FIELD_FORMULAS = {
    "si": "E = sqrt(hbar w / (2 eps0 eps_r V))",
    "paper-gaussian": "E = sqrt(2 pi hbar w / (eps V)) [gaussian, converted to V/m]",
}


def _field(inputs: EstimateInputs) -> dict:
    return vacuum_field_both(inputs.omega_c, inputs.eps_rel, inputs.cavity_volume)


def _within(name: str, value) -> Optional[bool]:
    target, _, kind, tol = PUBLISHED_TARGETS[name]
    if kind is None:
        return None
    if kind == "relative":
        return abs(value - target) <= tol * abs(target)
    if kind == "orders":
        return value > 0 and abs(math.log10(value / target)) <= tol
    if kind == "factor":
        return value > 0 and 1.0 / tol <= value / target <= tol
    lo, hi = target
    return tuple(value) == (lo, hi)


def _entry(name, value, formula, inputs):
    target, unit, _, _ = PUBLISHED_TARGETS[name]
    return {
        "value": value,
        "unit": unit,
        "formula": formula,
        "inputs": inputs,
        "paper_target": list(target) if isinstance(target, tuple) else target,
        "within_tolerance": _within(name, value),
    }


@dataclass
class EstimateReport:
    entries: dict
    flags: dict
    extras: dict

    def value(self, name: str):
        return self.entries[name]["value"]

    def to_dict(self) -> dict:
        return {"entries": self.entries, "flags": self.flags, "extras": self.extras}


def full_report(inputs: EstimateInputs, temperature: float = 310.0, separation: float = 8e-9) -> EstimateReport:
    """Chain every estimate; the volume and coherent count must be supplied."""
    missing = [k for k in ("cavity_volume", "n_coherent") if getattr(inputs, k) is None]
    if missing:
        raise MissingOpenParameter(f"missing open parameter(s): {', '.join(missing)}")

    d = dimer_dipole(inputs)
    fields_ = _field(inputs)
    E = fields_[inputs.field_convention]
    lam0 = rabi_coupling(E, d)
    lam_mt = math.sqrt(inputs.n_coherent) * lam0
    t_f = transport_time(inputs.mt_length, inputs.kink_speed)
    q = quality_factor(inputs.omega_c, inputs.lifetime_Tr)
    window = inputs.collapse_range

    entries = {
        "d_dimer": _entry(
            "d_dimer", d, "d = q e l / eps_r",
            {"mobile_charges": inputs.mobile_charges, "dipole_length": inputs.dipole_length, "eps_rel": inputs.eps_rel},
        ),
        "E_c": _entry(
            "E_c", E, _FIELD_FORMULAS[inputs.field_convention],
            {"omega_c": inputs.omega_c, "eps_rel": inputs.eps_rel, "cavity_volume": inputs.cavity_volume,
             "convention": inputs.field_convention},
        ),
        "lambda0": _entry("lambda0", lam0, "lambda0 = E d / hbar", {"E_c": E, "d_dimer": d}),
        "lambda_MT": _entry(
            "lambda_MT", lam_mt, "lambda_MT = sqrt(N) lambda0", {"n_coherent": inputs.n_coherent, "lambda0": lam0}
        ),
        "t_F": _entry("t_F", t_f, "t_F = L / v", {"mt_length": inputs.mt_length, "kink_speed": inputs.kink_speed}),
        "Q_MT": _entry("Q_MT", q, "Q = w_c T_r", {"omega_c": inputs.omega_c, "lifetime_Tr": inputs.lifetime_Tr}),
        "t_collapse": _entry("t_collapse", list(window), "published window", {"collapse_range": list(window)}),
    }
    entries["E_c"]["alternates"] = dict(sorted(fields_.items()))

    flags = {
        "lambda_MT_within_factor_3": bool(entries["lambda_MT"]["within_tolerance"]),
        "quantum_transport_feasible": bool(t_f <= window[1]),
        "collapse_lower_bound_exceeds_transport": bool(window[0] >= t_f),
        "units_consistent": all(audit_units().values()),
    }
    u_dd = dipole_dipole_energy(d, inputs.eps_rel, separation)
    extras = {
        "dipole_dipole_energy": {"value": u_dd, "unit": "J", "separation_m": separation},
        "thermal_energy": {"value": CONSTS.kB * temperature, "unit": "J", "temperature_K": temperature},
        "dipole_to_thermal_ratio": u_dd / (CONSTS.kB * temperature),
    }
    return EstimateReport(entries, flags, extras)
