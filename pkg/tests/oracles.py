"""Reference implementations used only by the tests.

Each one takes a different route to the same answer as the library code,
so agreement is evidence rather than tautology.
"""
from __future__ import annotations

import itertools
import math

import numpy as np

R_KM = 6371.0


def slc_angle(lat1, lon1, lat2, lon2) -> float:
    """Spherical law of cosines, evaluated in extended precision."""
    ld = np.longdouble
    lat1, lon1, lat2, lon2 = (ld(v) for v in (lat1, lon1, lat2, lon2))
    c = np.sin(lat1) * np.sin(lat2) + np.cos(lat1) * np.cos(lat2) * np.cos(lon2 - lon1)
    return float(np.arccos(np.clip(c, ld(-1), ld(1))))


def slc_distance(a, b, radius_km: float = R_KM) -> float:
    return radius_km * slc_angle(a[0], a[1], b[0], b[1])


def vector_angle(a, b) -> float:
    """Central angle from 3-D unit vectors, via atan2(|u x v|, u.v)."""
    def unit(p):
        return (math.cos(p[0]) * math.cos(p[1]), math.cos(p[0]) * math.sin(p[1]), math.sin(p[0]))
    u, v = unit(a), unit(b)
    cx = (u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0])
    return math.atan2(math.sqrt(sum(c * c for c in cx)), sum(p * q for p, q in zip(u, v)))


def explicit_remaining(xc, coords, radius_km: float = R_KM) -> float:
    """Offset to the nearest point plus the explicit sum of the legs after it."""
    dists = [radius_km * vector_angle(xc, p) for p in coords]
    best = min(dists)
    k = max(i for i, d in enumerate(dists) if d <= best * (1 + 1e-12))
    total = dists[k]
    for i in range(k, len(coords) - 1):
        total += radius_km * vector_angle(coords[i], coords[i + 1])
    return total


# --- density ----------------------------------------------------------------

def _mean(xs):
    return math.fsum(xs) / len(xs)


def _sample_sd(xs):
    m = _mean(xs)
    return math.sqrt(math.fsum((x - m) ** 2 for x in xs) / (len(xs) - 1))


def _percentile(sorted_xs, q):
    # linear interpolation between closest ranks
    pos = (len(sorted_xs) - 1) * q / 100.0
    lo = math.floor(pos)
    hi = min(lo + 1, len(sorted_xs) - 1)
    return sorted_xs[lo] + (sorted_xs[hi] - sorted_xs[lo]) * (pos - lo)


def brute_force_mode(samples) -> float:
    """Argmax of a Gaussian KDE over the samples, computed with plain loops."""
    xs = sorted(float(v) for v in samples)
    n = len(xs)
    if n < 3 or xs[0] == xs[-1]:
        return xs[(n - 1) // 2]
    sd = _sample_sd(xs)
    iqr = _percentile(xs, 75) - _percentile(xs, 25)
    spread = min(sd, iqr / 1.34)
    if spread <= 0:
        spread = sd
    h = 0.9 * spread * n ** -0.2
    dens = [math.fsum(math.exp(-0.5 * ((xi - xj) / h) ** 2) for xj in xs) for xi in xs]
    top = max(dens)
    return min(x for x, d in zip(xs, dens) if d >= top * (1 - 1e-12))


# --- ordering ---------------------------------------------------------------

def shortest_open_path(coords, start: int) -> tuple[int, ...]:
    """Minimum-length visiting order starting at ``start``, by exhaustion."""
    n = len(coords)
    d = [[vector_angle(coords[i], coords[j]) for j in range(n)] for i in range(n)]
    rest = [i for i in range(n) if i != start]
    best, best_path = math.inf, None
    for perm in itertools.permutations(rest):
        path = (start,) + perm
        length = sum(d[a][b] for a, b in zip(path, path[1:]))
        if length < best - 1e-15:
            best, best_path = length, path
    return best_path


# --- smoothing --------------------------------------------------------------

def batch_smoother(zs, q: float, r: float) -> np.ndarray:
    """Posterior mean of the constant-velocity model from one linear solve.

    Minimises the prior, process and measurement quadratic penalties jointly
    over all states. This is what a forward filter plus backward smoother
    should reproduce.
    """
    zs = np.asarray(zs, dtype=float)
    n = len(zs)
    F = np.array([[1, 0, 1, 0], [0, 1, 0, 1], [0, 0, 1, 0], [0, 0, 0, 1]], dtype=float)
    H = np.array([[1, 0, 0, 0], [0, 1, 0, 0]], dtype=float)
    Q = q * np.array([[1 / 3, 0, 1 / 2, 0], [0, 1 / 3, 0, 1 / 2], [1 / 2, 0, 1, 0], [0, 1 / 2, 0, 1]])
    Qi, Ri = np.linalg.inv(Q), np.eye(2) / r
    x0 = np.concatenate([zs[0], zs[1] - zs[0]])
    P0i = np.linalg.inv(np.diag([r, r, 2 * r, 2 * r]))
    A = np.zeros((4 * n, 4 * n))
    b = np.zeros(4 * n)
    A[:4, :4] += P0i
    b[:4] += P0i @ x0
    for k in range(n):
        s = slice(4 * k, 4 * k + 4)
        A[s, s] += H.T @ Ri @ H
        b[s] += H.T @ Ri @ zs[k]
        if k + 1 < n:
            t = slice(4 * k + 4, 4 * k + 8)
            A[s, s] += F.T @ Qi @ F
            A[t, t] += Qi
            A[s, t] -= F.T @ Qi
            A[t, s] -= Qi @ F
    return np.linalg.solve(A, b).reshape(n, 4)


# --- metrics ----------------------------------------------------------------

def metrics_by_hand(pairs):
    """The eight table statistics from (ata, eta) tuples, one loop each."""
    n = len(pairs)
    e = [eta - ata for ata, eta in pairs]
    mae = sum(abs(x) for x in e) / n
    mse = sum(x * x for x in e) / n
    mape = sum(abs(x) / ata for x, (ata, _) in zip(e, pairs)) / n
    mu = sum(e) / n
    sigma = math.sqrt(sum((x - mu) ** 2 for x in e) / n)
    abar = sum(a for a, _ in pairs) / n
    r2 = 1 - sum(x * x for x in e) / sum((a - abar) ** 2 for a, _ in pairs)
    return {"mae": mae, "mse": mse, "rmse": math.sqrt(mse), "mape": mape, "acc": 1 - mape,
            "r_squared": r2, "mu_e": mu, "sigma_e": sigma, "n": n}
