"""Bell quantities for spin-orbit modes: correlations M, the combination S,
the separable bound, chi-ramp traces and raw detector tables."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import MeasurementSetting, as_vector, random_separable, rotation_operator
from .optics import DetectorRecord, measure_intensities, measurement_stage

SQRT2 = np.sqrt(2.0)
SEPARABLE_BOUND = 2.0
BOUND_TOL = 1e-9

BASIS_KEYS = ("s11", "s12", "s21", "s22")
BASIS_SIGNS = (1.0, 1.0, -1.0, 1.0)


@dataclass(frozen=True)
class BellSettings:
    s11: MeasurementSetting
    s12: MeasurementSetting
    s21: MeasurementSetting
    s22: MeasurementSetting

    @classmethod
    def from_angles(cls, alpha1, alpha2, beta1, beta2) -> "BellSettings":
        m = MeasurementSetting
        return cls(m(alpha1, beta1), m(alpha1, beta2), m(alpha2, beta1), m(alpha2, beta2))

    @classmethod
    def canonical(cls) -> "BellSettings":
        return cls.from_angles(np.pi / 16, 3 * np.pi / 16, 0.0, np.pi / 8)

    def __iter__(self):
        return iter((self.s11, self.s12, self.s21, self.s22))

    def items(self):
        return zip(BASIS_KEYS, self)


@dataclass(frozen=True)
class BellResult:
    m11: float
    m12: float
    m21: float
    m22: float
    s: float

    @classmethod
    def from_m(cls, m11, m12, m21, m22) -> "BellResult":
        m = [float(x) for x in (m11, m12, m21, m22)]
        return cls(*m, s=m[0] + m[1] - m[2] + m[3])

    @property
    def m(self) -> tuple[float, float, float, float]:
        return self.m11, self.m12, self.m21, self.m22

    @property
    def violates(self) -> bool:
        return abs(self.s) > SEPARABLE_BOUND + BOUND_TOL


def correlation_m(rec: DetectorRecord) -> float:
    """(I++ + I-- - I+- - I-+)/I_tot with I3, I4 the even detectors."""
    tot = rec.i_tot
    if not tot > 0:
        raise ValueError("zero total intensity")
    return (rec.i3 + rec.i4 - rec.i1 - rec.i2) / tot


def _combine(records) -> BellResult:
    return BellResult.from_m(*(correlation_m(r) for r in records))


def bell_s(phi: float, chi: float, settings: BellSettings | None = None) -> BellResult:
    settings = settings or BellSettings.canonical()
    return _combine(measure_intensities(phi, s, chi) for s in settings)


def bell_s_state(state, chi: float = 0.0, settings: BellSettings | None = None) -> BellResult:
    """S for an arbitrary input mode sent through the element-by-element measurement stage."""
    settings = settings or BellSettings.canonical()
    return _combine(measurement_stage(state, s, chi) for s in settings)


def bell_s_batch(states, chi: float = 0.0, settings: BellSettings | None = None) -> np.ndarray:
    """Vectorized S for states of shape (n, 4)."""
    settings = settings or BellSettings.canonical()
    v = as_vector(states)
    total = np.zeros(v.shape[:-1])
    for sign, s in zip(BASIS_SIGNS, settings):
        p = np.abs(v @ rotation_operator(s).T) ** 2
        total += sign * (p[..., 0] + p[..., 3] - p[..., 1] - p[..., 2])
    # the MZIM mixes even and odd outputs, scaling every M by cos(chi)
    return np.cos(chi) * total / np.sum(np.abs(v) ** 2, axis=-1)


def closed_form_s(chi: float, phi: float) -> float:
    return SQRT2 * np.cos(chi) * (1 + np.cos(phi))


def sample_separable_bound(n: int, seed: int, chunk: int = 20_000, settings=None):
    """Draw ``n`` random separable modes and evaluate S at fixed settings.

    Returns (max |S| observed, number of draws with |S| > 2 + 1e-9). Each chunk
    uses its own stream spawned from ``seed``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    n_chunks = -(-n // chunk)
    streams = np.random.SeedSequence(seed).spawn(n_chunks)
    best, violations = 0.0, 0
    for k, ss in enumerate(streams):
        size = min(chunk, n - k * chunk)
        s = np.abs(bell_s_batch(random_separable(size, np.random.default_rng(ss)), 0.0, settings))
        best = max(best, float(s.max()))
        violations += int(np.count_nonzero(s > SEPARABLE_BOUND + BOUND_TOL))
    return best, violations


def chi_ramp_trace(phi: float, s: MeasurementSetting, chi_samples: int):
    """Detector intensities for chi swept uniformly over [0, 4 pi)."""
    if chi_samples < 2:
        raise ValueError("chi_samples must be >= 2")
    chis = np.linspace(0.0, 4 * np.pi, chi_samples, endpoint=False)
    return [(float(c), measure_intensities(phi, s, c)) for c in chis]


def find_peaks(values, periodic: bool = True) -> np.ndarray:
    """Indices of local maxima over a 3-point window."""
    y = np.asarray(values, dtype=float)
    if periodic:
        left, right = np.roll(y, 1), np.roll(y, -1)
    else:
        left = np.concatenate([[-np.inf], y[:-1]])
        right = np.concatenate([y[1:], [-np.inf]])
    return np.flatnonzero((y >= left) & (y > right))


def trace_peaks(trace) -> np.ndarray:
    """Peaks of I3 + I4, which sit at chi = 2 n pi."""
    return find_peaks([r.i3 + r.i4 for _, r in trace])


def visibility(values) -> float:
    y = np.asarray(values, dtype=float)
    hi, lo = y.max(), y.min()
    return 0.0 if hi + lo == 0 else float((hi - lo) / (hi + lo))


_ALIASES = {
    "s11": "s11", "a1b1": "s11", "(a1,b1)": "s11", "(alpha1,beta1)": "s11",
    "s12": "s12", "a1b2": "s12", "(a1,b2)": "s12", "(alpha1,beta2)": "s12",
    "s21": "s21", "a2b1": "s21", "(a2,b1)": "s21", "(alpha2,beta1)": "s21",
    "s22": "s22", "a2b2": "s22", "(a2,b2)": "s22", "(alpha2,beta2)": "s22",
}


def basis_key(label: str) -> str:
    key = _ALIASES.get("".join(str(label).lower().split()))
    if key is None:
        raise ValueError(f"unknown basis label {label!r}")
    return key


def analyze_raw_table(rows) -> BellResult:
    """rows: iterable of (basis label, i1, i2, i3, i4); one row per canonical basis.

    Each row is normalized by its own total.
    """
    by_key = {}
    for label, *vals in rows:
        if len(vals) != 4:
            raise ValueError(f"row {label!r}: expected 4 intensities, got {len(vals)}")
        vals = [float(v) for v in vals]
        if any(v < 0 for v in vals) or sum(vals) <= 0:
            raise ValueError(f"row {label!r}: intensities must be non-negative with positive total")
        key = basis_key(label)
        if key in by_key:
            raise ValueError(f"duplicate basis row {label!r}")
        by_key[key] = DetectorRecord(*vals)
    missing = [k for k in BASIS_KEYS if k not in by_key]
    if missing:
        raise ValueError(f"missing basis row(s): {', '.join(missing)}")
    return _combine(by_key[k] for k in BASIS_KEYS)


def synthetic_rows(m_values, labels=BASIS_KEYS):
    """Intensity rows reproducing given M values: I3 = I4 = (1+M)/4, I1 = I2 = (1-M)/4."""
    return [(lab, (1 - m) / 4, (1 - m) / 4, (1 + m) / 4, (1 + m) / 4)
            for lab, m in zip(labels, m_values)]
