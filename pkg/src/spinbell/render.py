"""Transverse field maps of spin-orbit modes.

psi_V is the Hermite-Gaussian HG01 (lobes along y, odd under y -> -y) and psi_H
is HG10, both with unit waist at the waist plane. E_x is the H-polarized
component, E_y the V-polarized one.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .core import as_vector


def hg_first_order(x, y, w: float = 1.0):
    """(psi_V, psi_H) sampled on the grid, each normalized to unit power."""
    g = np.sqrt(2 / np.pi) / w * np.exp(-(x**2 + y**2) / w**2)
    return 2 * y / w * g, 2 * x / w * g


@dataclass
class FieldMap:
    x: np.ndarray
    y: np.ndarray
    ex: np.ndarray
    ey: np.ndarray

    @property
    def intensity(self) -> np.ndarray:
        return np.abs(self.ex) ** 2 + np.abs(self.ey) ** 2

    @property
    def pixel_area(self) -> float:
        return float((self.x[0, 1] - self.x[0, 0]) * (self.y[1, 0] - self.y[0, 0]))

    def total_power(self) -> float:
        return float(self.intensity.sum() * self.pixel_area)

    def stokes(self):
        s0 = self.intensity
        s1 = np.abs(self.ex) ** 2 - np.abs(self.ey) ** 2
        cross = np.conj(self.ex) * self.ey
        return s0, s1, 2 * cross.real, 2 * cross.imag

    def ellipse(self, floor: float = 1e-12):
        """(orientation, ellipticity) angles per pixel; NaN where the intensity is below ``floor``."""
        s0, s1, s2, s3 = self.stokes()
        dark = s0 <= floor
        with np.errstate(invalid="ignore", divide="ignore"):
            orient = 0.5 * np.arctan2(s2, s1)
            ellip = 0.5 * np.arcsin(np.clip(s3 / s0, -1, 1))
        orient[dark] = np.nan
        ellip[dark] = np.nan
        return orient, ellip


def render_field(state, resolution: int = 128, extent: float = 3.0) -> FieldMap:
    """Sample the mode on a ``resolution`` x ``resolution`` grid over [-extent, extent]^2."""
    if resolution < 2:
        raise ValueError("grid must be at least 2x2")
    if extent <= 0:
        raise ValueError("extent must be positive")
    a = as_vector(state)
    t = np.linspace(-extent, extent, resolution)
    x, y = np.meshgrid(t, t)
    psi_v, psi_h = hg_first_order(x, y)
    # a = (VV, VH, HV, HH); V polarization -> E_y, H polarization -> E_x
    ey = a[0] * psi_v + a[2] * psi_h
    ex = a[1] * psi_v + a[3] * psi_h
    return FieldMap(x, y, ex, ey)


def write_pixels_csv(fmap: FieldMap, path):
    orient, ellip = fmap.ellipse()
    inten = fmap.intensity
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "y", "intensity", "orientation", "ellipticity"])
        for idx in np.ndindex(inten.shape):
            w.writerow([f"{fmap.x[idx]:.9g}", f"{fmap.y[idx]:.9g}", f"{inten[idx]:.9g}",
                        "" if np.isnan(orient[idx]) else f"{orient[idx]:.9g}",
                        "" if np.isnan(ellip[idx]) else f"{ellip[idx]:.9g}"])


def write_pgm(fmap: FieldMap, path):
    """8-bit binary PGM of the intensity, row 0 at the top (largest y)."""
    inten = fmap.intensity[::-1]
    peak = inten.max()
    img = np.zeros_like(inten) if peak == 0 else inten / peak
    data = np.round(img * 255).astype(np.uint8)
    h, w = data.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(data.tobytes())
