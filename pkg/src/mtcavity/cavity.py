"""Vacuum-field Rabi splitting of N identical two-level emitters in a single
cavity mode.

In the single-excitation sector the Tavis-Cummings Hamiltonian couples the
one-photon state to the symmetric (bright) emitter combination with strength
lambda*sqrt(N); the remaining N-1 combinations are dark and stay at omega0.
Two routes are provided: the closed-form doublet and a dense diagonalisation
of the full (N+1)-dimensional matrix, which serves as the oracle.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from .core import CONSTS
from .errors import DegenerateInput, GridTooCoarse, ZeroSplitting

CONVENTIONS = ("paper", "standard")
MAX_DENSE_N = 4096
MIN_SAMPLES_PER_LINEWIDTH = 8
STATVOLT_PER_CM_IN_V_PER_M = CONSTS.c * 1e-4  # 1 statV/cm = 299.792458 V / 0.01 m


@dataclass(frozen=True)
class CavityParams:
    omega0: float
    omega_c: float
    lam: float
    n_emitters: int = 1
    quality: float = math.inf
    sign_convention: str = "paper"

    def __post_init__(self):
        if not (self.omega0 > 0 and self.omega_c > 0):
            raise DegenerateInput("omega0 and omega_c must be positive")
        if not self.lam >= 0:
            raise DegenerateInput("coupling must be non-negative")
        if int(self.n_emitters) != self.n_emitters or self.n_emitters < 1:
            raise DegenerateInput("n_emitters must be a positive integer")
        if not self.quality > 0:
            raise DegenerateInput("quality factor must be positive (or inf)")
        if self.sign_convention not in CONVENTIONS:
            raise DegenerateInput(f"sign_convention must be one of {CONVENTIONS}")
        object.__setattr__(self, "n_emitters", int(self.n_emitters))

    @property
    def detuning(self) -> float:
        return self.omega_c - self.omega0

    @property
    def linewidth(self) -> float:
        """Cavity decay rate kappa = omega_c / Q (zero for an ideal cavity)."""
        return 0.0 if math.isinf(self.quality) else self.omega_c / self.quality


@dataclass
class SpectrumResult:
    peaks: tuple
    weights: tuple
    linewidth: float
    convention: str = "standard"
    omega: Optional[np.ndarray] = None
    absorption: Optional[np.ndarray] = None
    eigenvalues: Optional[np.ndarray] = None
    photon_weights: Optional[np.ndarray] = None

    @property
    def splitting(self) -> float:
        return self.peaks[1] - self.peaks[0]


def rabi_peaks(params: CavityParams, convention: Optional[str] = None) -> SpectrumResult:
    """Closed-form doublet.

    ``paper``:    omega0 - Delta/2 +- sqrt(Delta^2 + 4 N lam^2) / 2.
    ``standard``: omega0 + Delta/2 +- sqrt(Delta^2 + 4 N lam^2) / 2, the
    eigenvalues of [[omega_c, lam sqrt N], [lam sqrt N, omega0]].
    The two coincide at zero detuning. Weights are photon fractions of the
    two dressed states; under ``paper`` the detuning enters mirrored.
    """
    conv = convention or params.sign_convention
    if conv not in CONVENTIONS:
        raise DegenerateInput(f"convention must be one of {CONVENTIONS}")
    delta = params.detuning
    rabi = math.sqrt(delta * delta + 4.0 * params.n_emitters * params.lam**2)
    centre = params.omega0 + (delta / 2.0 if conv == "standard" else -delta / 2.0)
    signed = delta if conv == "standard" else -delta
    if rabi == 0.0:
        w_minus = w_plus = 0.5
    else:
        w_minus = 0.5 * (1.0 - signed / rabi)
        w_plus = 0.5 * (1.0 + signed / rabi)
    return SpectrumResult(
        (centre - rabi / 2.0, centre + rabi / 2.0),
        (w_minus, w_plus),
        params.linewidth,
        conv,
    )


def single_excitation_hamiltonian(params: CavityParams) -> np.ndarray:
    """(N+1)x(N+1) matrix in the basis {photon, emitter 1..N}, shifted by -omega0."""
    n = params.n_emitters
    H = np.zeros((n + 1, n + 1))
    H[0, 0] = params.detuning
    H[0, 1:] = params.lam
    H[1:, 0] = params.lam
    return H


def lorentzian(omega, centre, hwhm):
    """Area-normalised Lorentzian with half width at half maximum ``hwhm``."""
    return (hwhm / math.pi) / ((omega - centre) ** 2 + hwhm**2)


def frequency_grid(params: CavityParams, n_points: int = 4001, span: float = 3.0) -> np.ndarray:
    """Uniform grid centred on the doublet, ``span`` times its half width each side."""
    ref = rabi_peaks(params, "standard")
    centre = 0.5 * (ref.peaks[0] + ref.peaks[1])
    half = max(0.5 * ref.splitting, params.linewidth, 1e-12 * params.omega0) * span
    return np.linspace(centre - half, centre + half, n_points)


def single_excitation_spectrum(params: CavityParams, grid=None) -> SpectrumResult:
    """Brute-force diagonalisation of the single-excitation sector.

    Eigenstates are weighted by their squared photon amplitude; the two
    brightest form the doublet. The absorption curve on ``grid`` is a sum of
    Lorentzians of half width kappa/2 at those eigenvalues. For an ideal
    cavity (Q = inf) the width defaults to 8 grid steps so the curve stays
    resolvable.
    """
    n = params.n_emitters
    if n > MAX_DENSE_N:
        raise DegenerateInput(f"n_emitters={n} exceeds the dense eigensolver budget {MAX_DENSE_N}")
    evals, evecs = np.linalg.eigh(single_excitation_hamiltonian(params))
    weights = evecs[0, :] ** 2
    bright = np.sort(np.argsort(weights, kind="stable")[-2:])
    peaks = tuple(float(params.omega0 + evals[i]) for i in bright)
    result = SpectrumResult(
        peaks,
        tuple(float(weights[i]) for i in bright),
        params.linewidth,
        "standard",
        eigenvalues=params.omega0 + evals,
        photon_weights=weights,
    )
    if grid is not None:
        omega = np.asarray(grid, dtype=float)
        if omega.size < 2:
            raise GridTooCoarse("frequency grid needs at least two points")
        dw = float(omega[1] - omega[0])
        kappa = params.linewidth if params.linewidth > 0 else MIN_SAMPLES_PER_LINEWIDTH * dw
        if kappa / dw < MIN_SAMPLES_PER_LINEWIDTH * (1 - 1e-12):
            raise GridTooCoarse(
                f"{kappa / dw:.2f} samples per linewidth; need at least {MIN_SAMPLES_PER_LINEWIDTH}"
            )
        curve = np.zeros_like(omega)
        for p, w in zip(peaks, result.weights):
            curve += w * lorentzian(omega, p, 0.5 * kappa)
        result.omega, result.absorption = omega, curve
        result.linewidth = kappa
    return result


def vacuum_field_both(omega_c: float, eps_rel: float, volume: float) -> dict:
    """Vacuum rms field (V/m) from the Gaussian-unit formula and the SI one.

    Gaussian: E = sqrt(2 pi hbar omega / (eps V)) with hbar in erg s and V in
    cm^3, giving statV/cm. SI: E = sqrt(hbar omega / (2 eps0 eps_r V)). The
    two are the same physics and agree after unit conversion.
    """
    if not (omega_c > 0 and eps_rel > 0 and volume > 0):
        raise DegenerateInput("omega_c, eps_rel and volume must be positive")
    hbar_cgs = CONSTS.hbar * 1e7
    volume_cm3 = volume * 1e6
    e_gauss = math.sqrt(2.0 * math.pi * hbar_cgs * omega_c / (eps_rel * volume_cm3))
    e_si = math.sqrt(CONSTS.hbar * omega_c / (2.0 * CONSTS.eps0 * eps_rel * volume))
    return {"paper-gaussian": e_gauss * STATVOLT_PER_CM_IN_V_PER_M, "si": e_si}


def vacuum_field_amplitude(omega_c: float, eps_rel: float, volume: float, convention: str = "si") -> float:
    both = vacuum_field_both(omega_c, eps_rel, volume)
    if convention not in both:
        raise DegenerateInput(f"convention must be one of {tuple(both)}")
    return both[convention]


def rabi_coupling(E_c: float, dipole: float, cos_angle: float = 1.0) -> float:
    """lambda = E_c * d * cos(angle) / hbar, in rad/s (sign kept)."""
    if E_c < 0 or dipole < 0:
        raise DegenerateInput("field amplitude and dipole must be non-negative")
    if not -1.0 <= cos_angle <= 1.0:
        raise DegenerateInput("cos_angle must lie in [-1, 1]")
    return E_c * dipole * cos_angle / CONSTS.hbar


@dataclass
class EnhancementScan:
    n_values: list
    splittings: list
    exponent: float
    intercept: float

    def rows(self):
        return list(zip(self.n_values, self.splittings))


def enhancement_scan(base: CavityParams, n_values: Sequence[int], workers: int = 1) -> EnhancementScan:
    """Resonant splitting versus N and the fitted power law splitting ~ N**exponent."""
    ns = sorted({int(n) for n in n_values})
    if len(ns) < 2:
        raise DegenerateInput("need at least two distinct N values to fit an exponent")
    if ns[0] < 1:
        raise DegenerateInput("N values must be >= 1")
    resonant = replace(base, omega_c=base.omega0)

    def split(n):
        return single_excitation_spectrum(replace(resonant, n_emitters=n)).splitting

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            splittings = list(pool.map(split, ns))
    else:
        splittings = [split(n) for n in ns]
    if any(s <= 0.0 for s in splittings):
        raise ZeroSplitting("zero splitting: cannot fit a power law (coupling vanishes)")
    slope, intercept = np.polyfit(np.log(ns), np.log(splittings), 1)
    return EnhancementScan(ns, splittings, float(slope), float(intercept))
