"""Hot numeric kernels with optional numba acceleration.

Every kernel has a pure-numpy implementation and, when numba is importable,
an @njit twin. Set PALETTEKIT_NO_NUMBA=1 to force the numpy path (used by the
benchmark and by CI environments without a working compiler). Both paths must
agree to floating-point noise; tests compare them directly.
"""

from __future__ import annotations

import math
import os

import numpy as np

_POW25_7 = 25.0 ** 7


def _numba_disabled() -> bool:
    return os.environ.get("PALETTEKIT_NO_NUMBA", "").strip().lower() in {"1", "true", "yes"}


# ---------------------------------------------------------------------------
# CIEDE2000
# ---------------------------------------------------------------------------

def ciede2000_pairs_np(lab1: np.ndarray, lab2: np.ndarray) -> np.ndarray:
    """CIEDE2000 for row-aligned (n, 3) Lab arrays (Sharma et al. formulation)."""
    lab1 = np.atleast_2d(np.asarray(lab1, dtype=np.float64))
    lab2 = np.atleast_2d(np.asarray(lab2, dtype=np.float64))
    L1, a1, b1 = lab1[:, 0], lab1[:, 1], lab1[:, 2]
    L2, a2, b2 = lab2[:, 0], lab2[:, 1], lab2[:, 2]

    C1 = np.hypot(a1, b1)
    C2 = np.hypot(a2, b2)
    Cbar = 0.5 * (C1 + C2)
    Cbar7 = Cbar ** 7
    G = 0.5 * (1.0 - np.sqrt(Cbar7 / (Cbar7 + _POW25_7)))
    a1p = (1.0 + G) * a1
    a2p = (1.0 + G) * a2
    C1p = np.hypot(a1p, b1)
    C2p = np.hypot(a2p, b2)

    h1p = np.degrees(np.arctan2(b1, a1p))
    h1p = np.where((b1 == 0.0) & (a1p == 0.0), 0.0, np.where(h1p < 0.0, h1p + 360.0, h1p))
    h2p = np.degrees(np.arctan2(b2, a2p))
    h2p = np.where((b2 == 0.0) & (a2p == 0.0), 0.0, np.where(h2p < 0.0, h2p + 360.0, h2p))

    dLp = L2 - L1
    dCp = C2p - C1p

    hdiff = h2p - h1p
    zero_chroma = (C1p * C2p) == 0.0
    dhp = np.where(hdiff > 180.0, hdiff - 360.0, np.where(hdiff < -180.0, hdiff + 360.0, hdiff))
    dhp = np.where(zero_chroma, 0.0, dhp)
    dHp = 2.0 * np.sqrt(C1p * C2p) * np.sin(np.radians(dhp) / 2.0)

    Lbp = 0.5 * (L1 + L2)
    Cbp = 0.5 * (C1p + C2p)

    hsum = h1p + h2p
    habs = np.abs(h1p - h2p)
    hbp = np.where(habs <= 180.0, 0.5 * hsum,
                   np.where(hsum < 360.0, 0.5 * (hsum + 360.0), 0.5 * (hsum - 360.0)))
    hbp = np.where(zero_chroma, hsum, hbp)

    T = (1.0
         - 0.17 * np.cos(np.radians(hbp - 30.0))
         + 0.24 * np.cos(np.radians(2.0 * hbp))
         + 0.32 * np.cos(np.radians(3.0 * hbp + 6.0))
         - 0.20 * np.cos(np.radians(4.0 * hbp - 63.0)))
    dtheta = 30.0 * np.exp(-(((hbp - 275.0) / 25.0) ** 2))
    Cbp7 = Cbp ** 7
    RC = 2.0 * np.sqrt(Cbp7 / (Cbp7 + _POW25_7))
    SL = 1.0 + 0.015 * (Lbp - 50.0) ** 2 / np.sqrt(20.0 + (Lbp - 50.0) ** 2)
    SC = 1.0 + 0.045 * Cbp
    SH = 1.0 + 0.015 * Cbp * T
    RT = -np.sin(np.radians(2.0 * dtheta)) * RC

    tL = dLp / SL
    tC = dCp / SC
    tH = dHp / SH
    return np.sqrt(tL * tL + tC * tC + tH * tH + RT * tC * tH)


def kmeans_assign_np(samples: np.ndarray, centroids: np.ndarray) -> tuple[np.ndarray, float]:
    """Nearest-centroid labels and total within-cluster squared distance."""
    # (n, k) distance matrix via the expanded quadratic form; samples stay (n, 3)
    s2 = np.einsum("ij,ij->i", samples, samples)
    c2 = np.einsum("ij,ij->i", centroids, centroids)
    d2 = s2[:, None] + c2[None, :] - 2.0 * samples @ centroids.T
    labels = np.argmin(d2, axis=1)
    inertia = float(np.maximum(d2[np.arange(len(samples)), labels], 0.0).sum())
    return labels.astype(np.int64), inertia


def subset_pair_mean_np(combos: np.ndarray, acc: np.ndarray) -> np.ndarray:
    """Mean pairwise matrix value for each row of item indices in `combos`."""
    combos = np.asarray(combos, dtype=np.int64)
    m, n = combos.shape
    total = np.zeros(m, dtype=np.float64)
    npairs = n * (n - 1) // 2
    for i in range(n - 1):
        for j in range(i + 1, n):
            total += acc[combos[:, i], combos[:, j]]
    return total / npairs


try:  # pragma: no cover - exercised indirectly through the public wrappers
    if _numba_disabled():
        raise ImportError("numba disabled by PALETTEKIT_NO_NUMBA")
    from numba import njit, prange

    @njit(cache=True)
    def _ciede2000_one(L1, a1, b1, L2, a2, b2):
        C1 = math.hypot(a1, b1)
        C2 = math.hypot(a2, b2)
        Cbar = 0.5 * (C1 + C2)
        Cbar7 = Cbar ** 7
        G = 0.5 * (1.0 - math.sqrt(Cbar7 / (Cbar7 + _POW25_7)))
        a1p = (1.0 + G) * a1
        a2p = (1.0 + G) * a2
        C1p = math.hypot(a1p, b1)
        C2p = math.hypot(a2p, b2)

        if b1 == 0.0 and a1p == 0.0:
            h1p = 0.0
        else:
            h1p = math.degrees(math.atan2(b1, a1p))
            if h1p < 0.0:
                h1p += 360.0
        if b2 == 0.0 and a2p == 0.0:
            h2p = 0.0
        else:
            h2p = math.degrees(math.atan2(b2, a2p))
            if h2p < 0.0:
                h2p += 360.0

        dLp = L2 - L1
        dCp = C2p - C1p

        if C1p * C2p == 0.0:
            dhp = 0.0
        else:
            dhp = h2p - h1p
            if dhp > 180.0:
                dhp -= 360.0
            elif dhp < -180.0:
                dhp += 360.0
        dHp = 2.0 * math.sqrt(C1p * C2p) * math.sin(math.radians(dhp) / 2.0)

        Lbp = 0.5 * (L1 + L2)
        Cbp = 0.5 * (C1p + C2p)

        hsum = h1p + h2p
        if C1p * C2p == 0.0:
            hbp = hsum
        elif abs(h1p - h2p) <= 180.0:
            hbp = 0.5 * hsum
        elif hsum < 360.0:
            hbp = 0.5 * (hsum + 360.0)
        else:
            hbp = 0.5 * (hsum - 360.0)

        T = (1.0
             - 0.17 * math.cos(math.radians(hbp - 30.0))
             + 0.24 * math.cos(math.radians(2.0 * hbp))
             + 0.32 * math.cos(math.radians(3.0 * hbp + 6.0))
             - 0.20 * math.cos(math.radians(4.0 * hbp - 63.0)))
        dtheta = 30.0 * math.exp(-(((hbp - 275.0) / 25.0) ** 2))
        Cbp7 = Cbp ** 7
        RC = 2.0 * math.sqrt(Cbp7 / (Cbp7 + _POW25_7))
        SL = 1.0 + 0.015 * (Lbp - 50.0) ** 2 / math.sqrt(20.0 + (Lbp - 50.0) ** 2)
        SC = 1.0 + 0.045 * Cbp
        SH = 1.0 + 0.015 * Cbp * T
        RT = -math.sin(math.radians(2.0 * dtheta)) * RC

        tL = dLp / SL
        tC = dCp / SC
        tH = dHp / SH
        return math.sqrt(tL * tL + tC * tC + tH * tH + RT * tC * tH)

    @njit(cache=True, parallel=True)
    def _ciede2000_pairs_nb(lab1, lab2):
        n = lab1.shape[0]
        out = np.empty(n, dtype=np.float64)
        for i in prange(n):
            out[i] = _ciede2000_one(lab1[i, 0], lab1[i, 1], lab1[i, 2],
                                    lab2[i, 0], lab2[i, 1], lab2[i, 2])
        return out

    @njit(cache=True, parallel=True)
    def _kmeans_assign_nb(samples, centroids):
        n = samples.shape[0]
        k = centroids.shape[0]
        labels = np.empty(n, dtype=np.int64)
        dists = np.empty(n, dtype=np.float64)
        for i in prange(n):
            best = -1
            bestd = 1e300
            for c in range(k):
                d = 0.0
                for j in range(3):
                    t = samples[i, j] - centroids[c, j]
                    d += t * t
                if d < bestd:
                    bestd = d
                    best = c
            labels[i] = best
            dists[i] = bestd
        return labels, dists.sum()

    @njit(cache=True, parallel=True)
    def _subset_pair_mean_nb(combos, acc):
        m, n = combos.shape
        npairs = n * (n - 1) // 2
        out = np.empty(m, dtype=np.float64)
        for r in prange(m):
            total = 0.0
            for i in range(n - 1):
                for j in range(i + 1, n):
                    total += acc[combos[r, i], combos[r, j]]
            out[r] = total / npairs
        return out

    def ciede2000_pairs(lab1, lab2):
        lab1 = np.ascontiguousarray(np.atleast_2d(lab1), dtype=np.float64)
        lab2 = np.ascontiguousarray(np.atleast_2d(lab2), dtype=np.float64)
        return _ciede2000_pairs_nb(lab1, lab2)

    def kmeans_assign(samples, centroids):
        labels, inertia = _kmeans_assign_nb(
            np.ascontiguousarray(samples, dtype=np.float64),
            np.ascontiguousarray(centroids, dtype=np.float64))
        return labels, float(inertia)

    def subset_pair_mean(combos, acc):
        return _subset_pair_mean_nb(
            np.ascontiguousarray(combos, dtype=np.int64),
            np.ascontiguousarray(acc, dtype=np.float64))

    USING_NUMBA = True
except ImportError:
    ciede2000_pairs = ciede2000_pairs_np
    kmeans_assign = kmeans_assign_np
    subset_pair_mean = subset_pair_mean_np
    USING_NUMBA = False
