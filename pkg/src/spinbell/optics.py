"""Optical elements and the two stages of the spin-orbit Bell experiment.

Elements are 4x4 operators on (VV, VH, HV, HH) coordinates. Two-arm
interferometers are simulated explicitly with a path index and ideal 50/50
beam splitters using the symmetric convention (reflection picks up ``i``).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import (
    MeasurementSetting,
    RotatedExpansion,
    SpinOrbitState,
    as_vector,
    basis_state,
    reflection_block,
)

TAU = 2 * np.pi
UNITARY_TOL = 1e-12

_I2 = np.eye(2, dtype=complex)
_BS = np.array([[1, 1j], [1j, 1]], dtype=complex) / np.sqrt(2)


@dataclass(frozen=True)
class OpticalOperator:
    m: np.ndarray = field(repr=False)
    name: str = ""
    unitary: bool = True

    def __post_init__(self):
        m = np.asarray(self.m, dtype=complex)
        if m.shape != (4, 4):
            raise ValueError(f"operator must be 4x4, got {m.shape}")
        object.__setattr__(self, "m", m)

    def __matmul__(self, other):
        if isinstance(other, OpticalOperator):
            name = f"{self.name}*{other.name}" if self.name and other.name else ""
            return OpticalOperator(self.m @ other.m, name, self.unitary and other.unitary)
        return self.apply(other)

    def apply(self, state):
        v = as_vector(state)
        out = v @ self.m.T
        if isinstance(state, SpinOrbitState):
            return SpinOrbitState.from_vector(out)
        return out

    def is_unitary(self, tol: float = UNITARY_TOL) -> bool:
        return bool(np.max(np.abs(self.m.conj().T @ self.m - np.eye(4))) < tol)


def polarization_element(block, name="") -> OpticalOperator:
    return OpticalOperator(np.kron(_I2, block), name)


def transverse_element(block, name="") -> OpticalOperator:
    return OpticalOperator(np.kron(block, _I2), name)


def identity() -> OpticalOperator:
    return OpticalOperator(np.eye(4), "id")


def half_wave_plate(theta: float) -> OpticalOperator:
    return polarization_element(reflection_block(theta), f"hwp({theta:g})")


def dove_prism(theta: float) -> OpticalOperator:
    return transverse_element(reflection_block(theta), f"dove({theta:g})")


def phase_shift(phi: float) -> OpticalOperator:
    return OpticalOperator(np.exp(1j * phi) * np.eye(4), f"phase({phi:g})")


def mirror() -> OpticalOperator:
    """Reflection about the horizontal plane: even modes +1, odd modes -1."""
    return OpticalOperator(np.diag([1, -1, -1, 1]).astype(complex), "mirror")


def polarizer_projection(pol: str) -> OpticalOperator:
    """One output of a polarizing beam splitter. Not unitary."""
    k = {"V": 0, "H": 1}[pol.upper()]
    block = np.zeros((2, 2), dtype=complex)
    block[k, k] = 1
    return OpticalOperator(np.kron(_I2, block), f"pbs[{pol}]", unitary=False)


def mach_zehnder(state, arm_a: OpticalOperator, arm_b: OpticalOperator):
    """Send ``state`` into port a of BS1 -> arms -> BS2; return both output ports."""
    v = as_vector(state)
    paths = np.kron(_BS[:, 0], v).reshape(2, 4)
    paths = np.stack([paths[0] @ arm_a.m.T, paths[1] @ arm_b.m.T])
    out = np.tensordot(_BS, paths, axes=1)
    return out[0], out[1]


@dataclass(frozen=True)
class PhaseConfig:
    phi: float = 0.0
    chi: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "phi", float(self.phi) % TAU)
        object.__setattr__(self, "chi", float(self.chi) % TAU)


@dataclass(frozen=True)
class DetectorRecord:
    i1: float
    i2: float
    i3: float
    i4: float

    def __post_init__(self):
        for k in ("i1", "i2", "i3", "i4"):
            v = float(getattr(self, k))
            if v < 0:
                # rounding noise from |amp|^2 differences is harmless; real negatives are not
                if v < -1e-12:
                    raise ValueError(f"negative intensity {k}={v}")
                v = 0.0
            object.__setattr__(self, k, v)

    @property
    def i_tot(self) -> float:
        return self.i1 + self.i2 + self.i3 + self.i4

    def as_tuple(self) -> tuple[float, float, float, float]:
        return self.i1, self.i2, self.i3, self.i4


MASK_OUTPUT = "VH"  # holographic mask: psi_V e_H at the first diffraction order


def prepare_mns(phi: float) -> SpinOrbitState:
    """Preparation interferometer: HWP@45 deg + phase phi in one arm, DP@45 deg in the other.

    Of the two BS2 outputs, the one feeding the measurement stage is returned,
    renormalized (each output carries half the power) and with the global phase
    fixed so that the HH amplitude is real and positive.
    """
    src = basis_state(MASK_OUTPUT)
    arm_a = phase_shift(phi) @ half_wave_plate(np.pi / 4)
    arm_b = dove_prism(np.pi / 4)
    _, out = mach_zehnder(src, arm_a, arm_b)
    out = out / np.linalg.norm(out)
    ref = out[3] if abs(out[3]) > 1e-12 else out[0]
    out = out * np.conj(ref) / abs(ref)
    return SpinOrbitState.from_vector(out)


def analysis_amplitudes(phi: float, s: MeasurementSetting) -> RotatedExpansion:
    """A^{++}, A^{+-}, A^{-+}, A^{--} for the prepared mode, scaled by 1/sqrt(2)."""
    ca, sa = np.cos(2 * s.alpha), np.sin(2 * s.alpha)
    cb, sb = np.cos(2 * s.beta), np.sin(2 * s.beta)
    e = np.exp(1j * phi)
    r = 1 / np.sqrt(2)
    return RotatedExpansion(
        r * (e * ca * cb + sa * sb),
        r * (e * sa * cb - ca * sb),
        r * (e * ca * sb - sa * cb),
        r * (e * sa * sb + ca * cb),
    )


def intensities_from_amplitudes(amps: RotatedExpansion, chi: float) -> DetectorRecord:
    p_pp, p_pm, p_mp, p_mm = amps.probabilities()
    c2, s2 = np.cos(chi / 2) ** 2, np.sin(chi / 2) ** 2
    return DetectorRecord(
        s2 * p_mm + c2 * p_pm,
        s2 * p_pp + c2 * p_mp,
        c2 * p_pp + s2 * p_mp,
        c2 * p_mm + s2 * p_pm,
    )


def measure_intensities(phi: float, s: MeasurementSetting, chi: float) -> DetectorRecord:
    """Normalized detector intensities I1..I4 in closed form."""
    return intensities_from_amplitudes(analysis_amplitudes(phi, s), chi)


def mzim(chi: float):
    """Arm operators of the parity-sorting interferometer: bare arm, mirror + phase chi arm."""
    return identity(), phase_shift(chi) @ mirror()


def mzim_split(state, chi: float):
    """(even_port, odd_port), unnormalized.

    At chi = 0 the even port carries the VV and HH components and the odd port
    the VH and HV components; at chi = pi they are swapped.
    """
    arm_a, arm_b = mzim(chi)
    odd, even = mach_zehnder(state, arm_a, arm_b)
    # port reference planes chosen so an ideal sorter passes components without extra phase
    even = -1j * even
    if isinstance(state, SpinOrbitState):
        return SpinOrbitState.from_vector(even), SpinOrbitState.from_vector(odd)
    return even, odd


def detect(state, chi: float) -> DetectorRecord:
    """MZIM(chi) followed by a PBS on each output, read by D1..D4."""
    even, odd = mzim_split(as_vector(state), chi)
    power = lambda v, pol: float(np.sum(np.abs(polarizer_projection(pol).apply(v)) ** 2))
    return DetectorRecord(power(odd, "H"), power(odd, "V"), power(even, "V"), power(even, "H"))


def measurement_stage(state, s: MeasurementSetting, chi: float) -> DetectorRecord:
    """DP@beta -> HWP@alpha -> MZIM(chi) -> two PBS, element by element."""
    v = (half_wave_plate(s.alpha) @ dove_prism(s.beta)).apply(as_vector(state))
    return detect(v, chi)


def simulate(phi: float, s: MeasurementSetting, chi: float) -> DetectorRecord:
    """Full pipeline: preparation then measurement."""
    return measurement_stage(prepare_mns(phi), s, chi)


def even_odd_probabilities(states, s: MeasurementSetting) -> np.ndarray:
    """Batch helper: |rotated amplitudes|^2 for states of shape (n, 4) at chi = 0."""
    d = np.kron(reflection_block(s.beta), reflection_block(s.alpha))
    return np.abs(as_vector(states) @ d.T) ** 2
