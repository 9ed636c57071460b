"""Color spaces, perceptual distance, and size-dependent discriminability.

All conversions assume sRGB with a D65/2-degree white point. Everything here
is a pure function; the heavy batch math lives in ``_kernels``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._kernels import ciede2000_pairs
from .errors import InvalidArgumentError

_EPS = 216.0 / 24389.0
_KAPPA = 24389.0 / 27.0

# sRGB linear <-> XYZ (D65)
_RGB_TO_XYZ = np.array([
    [0.4124564, 0.3575761, 0.1804375],
    [0.2126729, 0.7151522, 0.0721750],
    [0.0193339, 0.1191920, 0.9503041],
])
# Exact inverse keeps rgb -> lab -> rgb consistent within the 1e-9 gamut tolerance.
_XYZ_TO_RGB = np.linalg.inv(_RGB_TO_XYZ)
# White point taken from the matrix itself so rgb(255,255,255) lands exactly
# on L=100, a=b=0 instead of drifting by the rounding in published constants.
_XN, _YN, _ZN = _RGB_TO_XYZ.sum(axis=1)


@dataclass(frozen=True)
class RgbColor:
    r: int
    g: int
    b: int

    def __post_init__(self):
        for name in ("r", "g", "b"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or not 0 <= v <= 255:
                raise InvalidArgumentError(f"channel {name}={v!r} outside [0, 255]")

    def to_hex(self) -> str:
        return f"#{self.r:02x}{self.g:02x}{self.b:02x}"

    @classmethod
    def from_hex(cls, text: str) -> "RgbColor":
        s = text.strip()
        if s.startswith("#"):
            s = s[1:]
        if len(s) != 6:
            raise InvalidArgumentError(f"hex color {text!r} is not #RRGGBB")
        try:
            return cls(int(s[0:2], 16), int(s[2:4], 16), int(s[4:6], 16))
        except ValueError as exc:
            raise InvalidArgumentError(f"hex color {text!r} is not #RRGGBB") from exc


@dataclass(frozen=True)
class LabColor:
    L: float
    a: float
    b: float

    def __post_init__(self):
        if not 0.0 <= self.L <= 100.0:
            raise InvalidArgumentError(f"L={self.L} outside [0, 100]")
        if not -128.0 <= self.a <= 127.0 or not -128.0 <= self.b <= 127.0:
            raise InvalidArgumentError(f"a/b ({self.a}, {self.b}) outside [-128, 127]")

    def as_array(self) -> np.ndarray:
        return np.array([self.L, self.a, self.b], dtype=np.float64)


@dataclass(frozen=True)
class LchColor:
    L: float
    C: float
    h: float

    def __post_init__(self):
        if self.C < 0.0:
            raise InvalidArgumentError(f"chroma {self.C} < 0")
        if not 0.0 <= self.h < 360.0:
            raise InvalidArgumentError(f"hue {self.h} outside [0, 360)")


@dataclass(frozen=True)
class JndParams:
    """Size-dependent per-axis discriminability threshold lines.

    Threshold for an axis at mark size s (pixels):
        t(s) = p * (intercept + slope / (s / px_per_degree))
    A pair is discriminable when at least one axis difference strictly
    exceeds its threshold. Defaults follow the published engineering model
    of size-dependent color difference; px_per_degree maps screen pixels to
    degrees of visual angle (~96 dpi at arm's length).
    """

    slopes: tuple[float, float, float] = (1.50, 3.08, 5.74)
    intercepts: tuple[float, float, float] = (10.16, 10.68, 10.70)
    p: float = 0.5
    px_per_degree: float = 60.0
    name: str = "engineering-model-default"

    def __post_init__(self):
        vals = (*self.slopes, *self.intercepts, self.p, self.px_per_degree)
        if not all(math.isfinite(v) for v in vals):
            raise InvalidArgumentError("JndParams coefficients must be finite")
        if any(s < 0.0 for s in self.slopes):
            raise InvalidArgumentError("JndParams slopes must be >= 0 (thresholds may not grow with size)")
        if any(i <= 0.0 for i in self.intercepts):
            raise InvalidArgumentError("JndParams intercepts must be > 0")
        if not 0.0 < self.p <= 1.0:
            raise InvalidArgumentError("JndParams p must be in (0, 1]")
        if self.px_per_degree <= 0.0:
            raise InvalidArgumentError("px_per_degree must be > 0")

    def thresholds(self, mark_size_px: float) -> np.ndarray:
        if mark_size_px <= 0:
            raise InvalidArgumentError(f"mark_size_px must be > 0, got {mark_size_px}")
        size_deg = mark_size_px / self.px_per_degree
        out = np.empty(3)
        for i in range(3):
            out[i] = self.p * (self.intercepts[i] + self.slopes[i] / size_deg)
        return out


# ---------------------------------------------------------------------------
# Conversions (array forms first; dataclass wrappers below)
# ---------------------------------------------------------------------------

def srgb_to_lab_array(rgb: np.ndarray) -> np.ndarray:
    """(n, 3) uint8-style sRGB values -> (n, 3) Lab."""
    c = np.asarray(rgb, dtype=np.float64) / 255.0
    lin = np.where(c <= 0.04045, c / 12.92, ((c + 0.055) / 1.055) ** 2.4)
    xyz = lin @ _RGB_TO_XYZ.T
    xr = xyz[..., 0] / _XN
    yr = xyz[..., 1] / _YN
    zr = xyz[..., 2] / _ZN

    def f(t):
        return np.where(t > _EPS, np.cbrt(t), (_KAPPA * t + 16.0) / 116.0)

    fx, fy, fz = f(xr), f(yr), f(zr)
    L = 116.0 * fy - 16.0
    a = 500.0 * (fx - fy)
    b = 200.0 * (fy - fz)
    return np.stack([L, a, b], axis=-1)


def lab_to_srgb_array(lab: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(n, 3) Lab -> (continuous 0..255 sRGB channels, in_gamut mask)."""
    lab = np.asarray(lab, dtype=np.float64)
    L, a, b = lab[..., 0], lab[..., 1], lab[..., 2]
    fy = (L + 16.0) / 116.0
    fx = fy + a / 500.0
    fz = fy - b / 200.0

    def finv(f):
        f3 = f ** 3
        return np.where(f3 > _EPS, f3, (116.0 * f - 16.0) / _KAPPA)

    xr = finv(fx)
    yr = np.where(L > _KAPPA * _EPS, fy ** 3, L / _KAPPA)
    zr = finv(fz)
    xyz = np.stack([xr * _XN, yr * _YN, zr * _ZN], axis=-1)
    lin = xyz @ _XYZ_TO_RGB.T
    in_gamut = ((lin >= -1e-9) & (lin <= 1.0 + 1e-9)).all(axis=-1)
    lin_c = np.clip(lin, 0.0, 1.0)
    srgb = np.where(lin_c <= 0.0031308, 12.92 * lin_c, 1.055 * lin_c ** (1.0 / 2.4) - 0.055)
    return srgb * 255.0, in_gamut


def lab_in_gamut_array(lab: np.ndarray) -> np.ndarray:
    return lab_to_srgb_array(lab)[1]


def srgb_to_lab(c: RgbColor) -> LabColor:
    L, a, b = srgb_to_lab_array(np.array([[c.r, c.g, c.b]]))[0]
    return LabColor(float(L), float(a), float(b))


def lab_to_srgb(c: LabColor) -> tuple[RgbColor, bool]:
    chans, gamut = lab_to_srgb_array(c.as_array()[None, :])
    r, g, b = np.clip(np.rint(chans[0]), 0, 255).astype(int)
    return RgbColor(int(r), int(g), int(b)), bool(gamut[0])


def lab_to_lch(c: LabColor) -> LchColor:
    C = math.hypot(c.a, c.b)
    if C == 0.0:
        h = 0.0
    else:
        h = math.degrees(math.atan2(c.b, c.a)) % 360.0
    return LchColor(c.L, C, h)


def ciede2000(c1: LabColor | np.ndarray, c2: LabColor | np.ndarray) -> float:
    a1 = c1.as_array() if isinstance(c1, LabColor) else np.asarray(c1, dtype=np.float64)
    a2 = c2.as_array() if isinstance(c2, LabColor) else np.asarray(c2, dtype=np.float64)
    return float(ciede2000_pairs(a1[None, :], a2[None, :])[0])


def ciede2000_matrix(labs: np.ndarray) -> np.ndarray:
    """Full symmetric pairwise CIEDE2000 matrix for (n, 3) Lab rows."""
    labs = np.asarray(labs, dtype=np.float64)
    n = len(labs)
    iu, ju = np.triu_indices(n, k=1)
    vals = ciede2000_pairs(labs[iu], labs[ju])
    out = np.zeros((n, n))
    out[iu, ju] = vals
    out[ju, iu] = vals
    return out


def jnd_discriminable(c1: LabColor | np.ndarray, c2: LabColor | np.ndarray,
                      mark_size_px: float, params: JndParams | None = None) -> bool:
    """True when at least one Lab axis difference strictly exceeds its threshold."""
    params = params or JndParams()
    t = params.thresholds(mark_size_px)
    a1 = c1.as_array() if isinstance(c1, LabColor) else np.asarray(c1, dtype=np.float64)
    a2 = c2.as_array() if isinstance(c2, LabColor) else np.asarray(c2, dtype=np.float64)
    return bool((np.abs(a1 - a2) > t).any())


def jnd_adjacency(labs: np.ndarray, mark_size_px: float,
                  params: JndParams | None = None) -> np.ndarray:
    """Boolean (n, n) matrix: pair discriminable at the given mark size."""
    params = params or JndParams()
    t = params.thresholds(mark_size_px)
    labs = np.asarray(labs, dtype=np.float64)
    diff = np.abs(labs[:, None, :] - labs[None, :, :])
    adj = (diff > t[None, None, :]).any(axis=-1)
    np.fill_diagonal(adj, False)
    return adj
