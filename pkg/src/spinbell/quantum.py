"""Coherent state of the maximally non-separable mode and its Fock structure.

The coherent amplitude is called ``amp`` throughout (``alpha`` is the wave
plate angle elsewhere in the package). Only the VV and HH modes are populated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analysis import BellResult, BellSettings
from .core import SpinOrbitState, concurrence, expand_rotated

DEFAULT_CUTOFF = 30


@dataclass(frozen=True)
class FockExpansion:
    """Truncated two-mode expansion; ``coeffs[n_vv, n_hh]`` is zero where n_vv + n_hh > cutoff."""

    amp: complex
    cutoff: int
    coeffs: np.ndarray

    def coeff(self, n_vv: int, n_hh: int) -> complex:
        if n_vv < 0 or n_hh < 0 or n_vv + n_hh > self.cutoff:
            return 0j
        return complex(self.coeffs[n_vv, n_hh])

    def total_probability(self) -> float:
        return float(np.sum(np.abs(self.coeffs) ** 2))

    def number_distribution(self) -> np.ndarray:
        """P(n) for total photon number n = 0..cutoff."""
        p = np.abs(self.coeffs) ** 2
        return np.array([np.trace(p[:, ::-1], offset=p.shape[0] - 1 - n) for n in range(self.cutoff + 1)])

    def rows(self):
        """(n_vv, n_hh, coefficient) over the truncated lattice, n_vv-major."""
        for q in range(self.cutoff + 1):
            for m in range(self.cutoff + 1 - q):
                yield q, m, complex(self.coeffs[q, m])


@dataclass(frozen=True)
class PostSelectedState:
    """Single-photon sector on (|1_HH 0_VV>, |0_HH 1_VV>), renormalized."""

    c_hh: complex
    c_vv: complex
    probability: float

    def to_spin_orbit(self) -> SpinOrbitState:
        return SpinOrbitState(self.c_vv, 0j, 0j, self.c_hh)


def coherent_mns(amp: complex, cutoff: int = DEFAULT_CUTOFF) -> FockExpansion:
    """Expand exp(-|amp|^2/2) sum_n amp^n (a+_MNS)^n / n! |0> with a+_MNS = (a+_VV + a+_HH)/sqrt(2).

    Each power is expanded binomially; (a+)^k |0> = sqrt(k!) |k>.
    """
    if cutoff < 0:
        raise ValueError("cutoff must be >= 0")
    amp = complex(amp)
    pref = math.exp(-abs(amp) ** 2 / 2)
    c = np.zeros((cutoff + 1, cutoff + 1), dtype=complex)
    for n in range(cutoff + 1):
        term = pref * amp**n / math.factorial(n) * 2 ** (-n / 2)
        for q in range(n + 1):
            m = n - q
            c[q, m] = term * math.comb(n, q) * math.sqrt(math.factorial(q) * math.factorial(m))
    return FockExpansion(amp, cutoff, c)


def coherent_coefficients(amp: complex, cutoff: int) -> np.ndarray:
    """Single-mode coherent state exp(-|amp|^2/2) amp^n / sqrt(n!), n = 0..cutoff."""
    amp = complex(amp)
    n = np.arange(cutoff + 1)
    logf = np.array([math.lgamma(k + 1) for k in n])
    out = np.exp(-abs(amp) ** 2 / 2 - 0.5 * logf).astype(complex)
    out *= np.array([amp**k for k in n])
    return out


def verify_factorization(amp: complex, cutoff: int = DEFAULT_CUTOFF) -> float:
    """Max |deviation| between the MNS expansion and |amp/sqrt2>_VV |amp/sqrt2>_HH."""
    exp = coherent_mns(amp, cutoff)
    single = coherent_coefficients(complex(amp) / math.sqrt(2), cutoff)
    prod = np.outer(single, single)
    q, m = np.indices(prod.shape)
    prod[q + m > cutoff] = 0
    return float(np.max(np.abs(exp.coeffs - prod)))


def post_select_single_photon(exp: FockExpansion) -> PostSelectedState:
    c_hh, c_vv = exp.coeff(0, 1), exp.coeff(1, 0)
    p = abs(c_hh) ** 2 + abs(c_vv) ** 2
    if p == 0:
        raise ValueError("zero single-photon weight; nothing to post-select")
    r = math.sqrt(p)
    return PostSelectedState(c_hh / r, c_vv / r, p)


def post_selected_concurrence(state: PostSelectedState) -> float:
    return concurrence(state.to_spin_orbit())


def quantum_chsh(state: PostSelectedState, settings: BellSettings | None = None) -> float:
    """CHSH value from photon-detection probabilities in the four analysis bases."""
    settings = settings or BellSettings.canonical()
    v = state.to_spin_orbit()
    m = []
    for s in settings:
        p_pp, p_pm, p_mp, p_mm = expand_rotated(v, s).probabilities()
        m.append(p_pp + p_mm - p_pm - p_mp)
    return BellResult.from_m(*m).s
