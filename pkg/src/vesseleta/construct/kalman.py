"""Constant-velocity Kalman filter with a Rauch-Tung-Striebel backward pass.

State is ``[lat, lon, dlat, dlon]`` in radians per step; the "time" axis is
the point index along the ordered scan chain, so every step has unit length.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ..geo import as_array, as_points


@dataclass(frozen=True)
class KalmanParams:
    process_noise: float = 1e-5      # rad^2 per step
    measurement_noise: float = 1e-4  # rad^2

    def __post_init__(self):
        if not (self.process_noise > 0 and self.measurement_noise > 0):
            raise ValueError("Kalman noise variances must be strictly positive")


class StateSpace(NamedTuple):
    F: np.ndarray
    H: np.ndarray
    Q: np.ndarray
    R: np.ndarray


class SmootherOutput(NamedTuple):
    means: np.ndarray           # (n, 4) smoothed
    covs: np.ndarray            # (n, 4, 4) smoothed
    filtered_means: np.ndarray
    filtered_covs: np.ndarray


def state_space(params: KalmanParams) -> StateSpace:
    I2 = np.eye(2)
    F = np.block([[I2, I2], [np.zeros((2, 2)), I2]])
    H = np.hstack([I2, np.zeros((2, 2))])
    # continuous white-noise acceleration integrated over dt = 1 (non-singular)
    Q = params.process_noise * np.kron(np.array([[1 / 3, 1 / 2], [1 / 2, 1.0]]), I2)
    R = params.measurement_noise * I2
    return StateSpace(F, H, Q, R)


def initial_state(zs: np.ndarray, params: KalmanParams) -> tuple[np.ndarray, np.ndarray]:
    """Start at the first measurement with the first difference as velocity."""
    r = params.measurement_noise
    x0 = np.concatenate([zs[0], zs[1] - zs[0]])
    P0 = np.diag([r, r, 2 * r, 2 * r])
    return x0, P0


def kalman_filter(zs: np.ndarray, params: KalmanParams):
    """Forward pass. Returns filtered means/covs and one-step predictions."""
    F, H, Q, R = state_space(params)
    n = len(zs)
    xs, Ps = np.empty((n, 4)), np.empty((n, 4, 4))
    x_pred, P_pred = np.empty((n, 4)), np.empty((n, 4, 4))
    x, P = initial_state(zs, params)
    I4 = np.eye(4)
    for k in range(n):
        if k > 0:
            x = F @ x
            P = F @ P @ F.T + Q
        x_pred[k], P_pred[k] = x, P
        S = H @ P @ H.T + R
        K = np.linalg.solve(S, H @ P).T
        x = x + K @ (zs[k] - H @ x)
        A = I4 - K @ H
        P = A @ P @ A.T + K @ R @ K.T
        xs[k], Ps[k] = x, P
    return xs, Ps, x_pred, P_pred


def rts_smoother(xs: np.ndarray, Ps: np.ndarray, params: KalmanParams) -> tuple[np.ndarray, np.ndarray]:
    F, _, Q, _ = state_space(params)
    x, P = xs.copy(), Ps.copy()
    for k in range(len(xs) - 2, -1, -1):
        P_pred = F @ Ps[k] @ F.T + Q
        C = np.linalg.solve(P_pred, F @ Ps[k]).T  # Ps[k] F^T P_pred^-1
        x[k] = xs[k] + C @ (x[k + 1] - F @ xs[k])
        P[k] = Ps[k] + C @ (P[k + 1] - P_pred) @ C.T
    return x, P


def smooth_coords(coords, params: KalmanParams = KalmanParams()) -> SmootherOutput:
    zs = as_array(coords)
    if len(zs) < 2:
        raise ValueError("Kalman smoothing needs at least two points")
    if not np.all(np.isfinite(zs)):
        raise ValueError("non-finite coordinate in Kalman input")
    xs, Ps, _, _ = kalman_filter(zs, params)
    sx, sP = rts_smoother(xs, Ps, params)
    return SmootherOutput(sx, sP, xs, Ps)


def kalman_smooth(ordered, params: KalmanParams = KalmanParams()):
    """Smooth an ordered point chain; first and last points are kept as given."""
    zs = as_array(ordered)
    out = smooth_coords(zs, params).means[:, :2].copy()
    out[0], out[-1] = zs[0], zs[-1]
    # clamp tiny overshoots so results stay valid coordinates
    out[:, 0] = np.clip(out[:, 0], -np.pi / 2, np.pi / 2)
    return as_points(out) if not isinstance(ordered, np.ndarray) else out
