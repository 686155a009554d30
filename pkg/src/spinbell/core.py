"""Spin-orbit mode algebra.

A spin-orbit mode lives in the 4-dimensional product space of the first-order
Hermite-Gaussian doublet {psi_V, psi_H} and the linear polarization pair
{e_V, e_H}. Coordinates are ordered (VV, VH, HV, HH), first label transverse,
second label polarization.

Most functions accept either a :class:`SpinOrbitState` or any array whose last
axis has length 4, so batches of states can be processed in one call.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

NORM_TOL = 1e-12
MIN_NORM = 1e-9

LABELS = ("VV", "VH", "HV", "HH")


@dataclass(frozen=True)
class SpinOrbitState:
    """Four complex amplitudes (A1, A2, A3, A4) on (VV, VH, HV, HH)."""

    a_vv: complex
    a_vh: complex
    a_hv: complex
    a_hh: complex

    @classmethod
    def from_vector(cls, v) -> "SpinOrbitState":
        v = np.asarray(v, dtype=complex)
        if v.shape != (4,):
            raise ValueError(f"expected 4 amplitudes, got shape {v.shape}")
        return cls(*(complex(x) for x in v))

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.a_vv, self.a_vh, self.a_hv, self.a_hh], dtype=complex)

    def __array__(self, dtype=None, copy=None):
        v = self.vector
        return v if dtype is None else v.astype(dtype)

    def norm(self) -> float:
        return float(np.linalg.norm(self.vector))

    def is_normalized(self, tol: float = NORM_TOL) -> bool:
        return abs(self.norm() ** 2 - 1.0) <= tol

    def matrix(self) -> np.ndarray:
        """Coefficients as a 2x2 array indexed [transverse, polarization]."""
        return self.vector.reshape(2, 2)


@dataclass(frozen=True)
class SeparableSpec:
    """Product mode (b1 psi_V + b2 psi_H) (b3 e_V + b4 e_H)."""

    b1: complex
    b2: complex
    b3: complex
    b4: complex


@dataclass(frozen=True)
class MeasurementSetting:
    """Analysis basis: half-wave plate angle ``alpha`` and Dove prism angle ``beta``.

    Both angles are in radians and reduced modulo pi.
    """

    alpha: float
    beta: float

    def __post_init__(self):
        object.__setattr__(self, "alpha", float(self.alpha) % np.pi)
        object.__setattr__(self, "beta", float(self.beta) % np.pi)


@dataclass(frozen=True)
class RotatedExpansion:
    """Amplitudes on psi_{beta+-} e_{alpha+-}; first sign transverse, second polarization."""

    c_pp: complex
    c_pm: complex
    c_mp: complex
    c_mm: complex

    def __post_init__(self):
        for k in ("c_pp", "c_pm", "c_mp", "c_mm"):
            object.__setattr__(self, k, complex(getattr(self, k)))

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.c_pp, self.c_pm, self.c_mp, self.c_mm], dtype=complex)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.vector) ** 2


def as_vector(state) -> np.ndarray:
    return np.asarray(state, dtype=complex)


def _check_normalized(v: np.ndarray, what: str):
    n2 = np.sum(np.abs(v) ** 2, axis=-1)
    if np.any(np.abs(n2 - 1.0) > NORM_TOL):
        raise ValueError(f"{what} requires a normalized state (|A|^2 sum = {np.max(n2)!r})")


def normalize(state):
    v = as_vector(state)
    n = np.linalg.norm(v, axis=-1, keepdims=True)
    if np.any(n < MIN_NORM):
        raise ValueError("cannot normalize a state with norm below 1e-9")
    out = v / n
    if isinstance(state, SpinOrbitState):
        return SpinOrbitState.from_vector(out)
    return out


def basis_state(label: str) -> SpinOrbitState:
    """Basis element by label, e.g. ``basis_state("VH")`` is psi_V e_H."""
    v = np.zeros(4, dtype=complex)
    v[LABELS.index(label.upper())] = 1.0
    return SpinOrbitState.from_vector(v)


def make_mns() -> SpinOrbitState:
    """Maximally non-separable mode (psi_V e_V + psi_H e_H)/sqrt(2)."""
    r = 1 / np.sqrt(2)
    return SpinOrbitState(r, 0j, 0j, r)


def make_separable(spec: SeparableSpec) -> SpinOrbitState:
    t = np.array([spec.b1, spec.b2], dtype=complex)
    p = np.array([spec.b3, spec.b4], dtype=complex)
    if np.linalg.norm(t) < MIN_NORM or np.linalg.norm(p) < MIN_NORM:
        raise ValueError("degenerate separable spec")
    return normalize(SpinOrbitState.from_vector(np.kron(t, p)))


def random_states(n: int, rng: np.random.Generator) -> np.ndarray:
    """``n`` Haar-random normalized states, shape (n, 4)."""
    z = rng.standard_normal((n, 4)) + 1j * rng.standard_normal((n, 4))
    return normalize(z)


def random_separable(n: int, rng: np.random.Generator) -> np.ndarray:
    """``n`` random normalized product states, shape (n, 4)."""
    t = rng.standard_normal((n, 2)) + 1j * rng.standard_normal((n, 2))
    p = rng.standard_normal((n, 2)) + 1j * rng.standard_normal((n, 2))
    return normalize(np.einsum("ni,nj->nij", t, p).reshape(n, 4))


def inner(a, b) -> complex:
    """<a|b>, conjugate-linear in ``a``."""
    return np.sum(np.conj(as_vector(a)) * as_vector(b), axis=-1)


def concurrence(state):
    """2|A2 A3 - A1 A4|; in [0, 1] for normalized input."""
    v = as_vector(state)
    _check_normalized(v, "concurrence")
    c = 2 * np.abs(v[..., 1] * v[..., 2] - v[..., 0] * v[..., 3])
    return float(c) if c.ndim == 0 else c


def reflection_block(theta: float) -> np.ndarray:
    """2x2 block [[cos 2t, sin 2t], [sin 2t, -cos 2t]].

    Its columns are the rotated pair (x_{t+}, x_{t-}) written on (V, H), and it is
    its own inverse, so it also maps coordinates into the rotated pair.
    """
    c, s = np.cos(2 * theta), np.sin(2 * theta)
    return np.array([[c, s], [s, -c]], dtype=complex)


def rotated_basis(s: MeasurementSetting) -> dict[str, SpinOrbitState]:
    """The four product vectors psi_{beta+-} e_{alpha+-} keyed "pp", "pm", "mp", "mm"."""
    d = reflection_block(s.beta)
    h = reflection_block(s.alpha)
    out = {}
    for i, ts in enumerate("pm"):
        for j, ps in enumerate("pm"):
            out[ts + ps] = SpinOrbitState.from_vector(np.kron(d[:, i], h[:, j]))
    return out


def rotation_operator(s: MeasurementSetting) -> np.ndarray:
    """4x4 change of coordinates into the rotated basis."""
    return np.kron(reflection_block(s.beta), reflection_block(s.alpha))


def expand_rotated(state, s: MeasurementSetting) -> RotatedExpansion:
    v = as_vector(state)
    _check_normalized(v, "expand_rotated")
    return RotatedExpansion(*(rotation_operator(s) @ v))


def mns_rotated_coefficients(s: MeasurementSetting) -> tuple[float, float]:
    """(A_e, A_o) of the MNS mode written in the rotated basis (without the 1/sqrt(2))."""
    ca, sa = np.cos(2 * s.alpha), np.sin(2 * s.alpha)
    cb, sb = np.cos(2 * s.beta), np.sin(2 * s.beta)
    return ca * cb + sa * sb, ca * sb - sa * cb
