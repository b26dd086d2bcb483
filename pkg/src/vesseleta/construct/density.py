"""Sample-restricted kernel density mode."""
from __future__ import annotations

import numpy as np

# relative slack under which two density values count as tied
TIE_RTOL = 1e-12
_CHUNK = 2048


def silverman_bandwidth(x: np.ndarray) -> float:
    """Rule-of-thumb bandwidth ``0.9 * min(sd, IQR/1.34) * n**-0.2``.

    Falls back to ``sd`` when the IQR is zero (over half the samples equal);
    returns 0.0 only when every sample is identical.
    """
    n = len(x)
    sd = float(np.std(x, ddof=1))
    q75, q25 = np.percentile(x, [75, 25])
    spread = min(sd, float(q75 - q25) / 1.34)
    if spread <= 0.0:
        spread = sd
    return 0.9 * spread * n ** -0.2


def kde_at_samples(x: np.ndarray, bandwidth: float) -> np.ndarray:
    """Unnormalised Gaussian KDE evaluated at every sample."""
    out = np.empty(len(x))
    for lo in range(0, len(x), _CHUNK):
        z = (x[lo:lo + _CHUNK, None] - x[None, :]) / bandwidth
        with np.errstate(over="ignore"):  # far-apart pairs contribute exp(-inf) = 0
            out[lo:lo + _CHUNK] = np.exp(-0.5 * z * z).sum(axis=1)
    return out


def density_mode(samples) -> float:
    """Return the sample with the highest kernel density.

    The answer is always one of the inputs. Ties go to the smallest value.
    With fewer than three samples, or zero spread, the lower median is used.
    """
    x = np.sort(np.asarray(samples, dtype=float).ravel())
    if x.size == 0:
        raise ValueError("density_mode needs at least one sample")
    if not np.all(np.isfinite(x)):
        raise ValueError("density_mode samples must be finite")
    if x.size < 3 or x[0] == x[-1]:
        return float(x[(x.size - 1) // 2])
    h = silverman_bandwidth(x)
    if not h > 0:
        return float(x[(x.size - 1) // 2])
    dens = kde_at_samples(x, h)
    # x is sorted, so the first near-maximal entry is the smallest value
    return float(x[np.argmax(dens >= dens.max() * (1.0 - TIE_RTOL))])
