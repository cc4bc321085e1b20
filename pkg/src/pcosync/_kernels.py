"""Array kernels on the simulator's hot path.

Every kernel exists twice: a plain numpy implementation and a numba
``@njit`` version compiled on first use.  The active backend is picked at
import time from the ``PCOSYNC_BACKEND`` environment variable:

* ``auto`` (default) - numba when importable, numpy otherwise
* ``numba``          - require numba, raise if unavailable
* ``numpy``          - force the pure-numpy path

Both paths evaluate the same formulas; ``benchmarks/bench_kernels.py``
times them against each other and reports the residual disagreement
(reduction order differs, so the last few ulps may too).
"""

from __future__ import annotations

import math
import os

import numpy as np

# Propagation constant shared by pathloss and flight-time math.  The
# textbook free-space constant (-147.56 dB at 1 Hz / 1 m) embeds the
# rounded 3e8 m/s, so the same value is used for time of flight.
SPEED_OF_LIGHT = 3.0e8

_FS_CONST_DB = 20.0 * math.log10(4.0 * math.pi / SPEED_OF_LIGHT)


def _resolve_backend() -> tuple[str, object]:
    mode = os.environ.get("PCOSYNC_BACKEND", "auto").lower()
    if mode not in ("auto", "numba", "numpy"):
        raise ValueError(f"PCOSYNC_BACKEND must be auto|numba|numpy, got {mode!r}")
    if mode == "numpy":
        return "numpy", None
    try:
        import numba
    except ImportError:
        if mode == "numba":
            raise
        return "numpy", None
    return "numba", numba


_BACKEND_NAME, _numba = _resolve_backend()


def active_backend() -> str:
    """Name of the kernel backend selected at import ('numba' or 'numpy')."""
    return _BACKEND_NAME


# =============================================================================
# numpy implementations
# =============================================================================

def pairwise_distances_np(pos: np.ndarray) -> np.ndarray:
    """Full n x n Euclidean distance matrix for (n, 2) positions."""
    dx = pos[:, 0:1] - pos[:, 0:1].T
    dy = pos[:, 1:2] - pos[:, 1:2].T
    return np.sqrt(dx * dx + dy * dy)


def freespace_db_np(d_m: np.ndarray, f_hz: float, exponent: float) -> np.ndarray:
    """Free-space loss generalized to a distance exponent.

    The frequency and geometry terms keep their exponent-2 form; only
    the distance power law scales with ``exponent``.
    """
    return (10.0 * exponent * np.log10(d_m)
            + 20.0 * np.log10(f_hz) + _FS_CONST_DB)


def hata_rural_db_np(d_m: np.ndarray, f_mhz: float, h_b: float, h_m: float) -> np.ndarray:
    """Hata open/rural-area loss in dB (small/medium-city mobile correction)."""
    lf = math.log10(f_mhz)
    a_hm = (1.1 * lf - 0.7) * h_m - (1.56 * lf - 0.8)
    rural = -4.78 * lf * lf + 18.33 * lf - 40.94
    fixed = 69.55 + 26.16 * lf - 13.82 * math.log10(h_b) - a_hm + rural
    slope = 44.9 - 6.55 * math.log10(h_b)
    return fixed + slope * np.log10(d_m / 1000.0)


def rx_power_matrix_np(tx_dbm: np.ndarray, loss_db: np.ndarray) -> np.ndarray:
    """Received power at j from i: tx_dbm[i] - loss_db[i, j]."""
    return tx_dbm[:, None] - loss_db


def repulsion_forces_np(pos: np.ndarray, r0: float, k_repel: float) -> np.ndarray:
    """Summed short-range inverse-square repulsion, per node, in m/s.

    Pairs closer than ``r0`` push each other apart along the joining
    line; coincident pairs are skipped (the caller's noise term
    separates them).
    """
    n = pos.shape[0]
    dx = pos[:, 0:1] - pos[:, 0:1].T
    dy = pos[:, 1:2] - pos[:, 1:2].T
    d2 = dx * dx + dy * dy
    d = np.sqrt(d2)
    d_eff = np.maximum(d, 1.0)  # force saturates below 1 m separation
    with np.errstate(divide="ignore", invalid="ignore"):
        w = np.where((d > 0.0) & (d < r0), k_repel / (d_eff * d_eff * d), 0.0)
    np.fill_diagonal(w, 0.0)
    out = np.empty_like(pos)
    out[:, 0] = (w * dx).sum(axis=1)
    out[:, 1] = (w * dy).sum(axis=1)
    return out


# =============================================================================
# numba implementations
# =============================================================================

if _BACKEND_NAME == "numba":
    _njit = _numba.njit

    @_njit(cache=True)
    def pairwise_distances_nb(pos):  # pragma: no cover - exercised via dispatch
        n = pos.shape[0]
        out = np.empty((n, n), dtype=np.float64)
        for i in range(n):
            out[i, i] = 0.0
            for j in range(i + 1, n):
                dx = pos[i, 0] - pos[j, 0]
                dy = pos[i, 1] - pos[j, 1]
                d = math.sqrt(dx * dx + dy * dy)
                out[i, j] = d
                out[j, i] = d
        return out

    @_njit(cache=True)
    def freespace_db_nb(d_m, f_hz, exponent):  # pragma: no cover
        out = np.empty_like(d_m)
        c1 = 20.0 * math.log10(f_hz) + _FS_CONST_DB
        flat_d = d_m.ravel()
        flat_o = out.ravel()
        for k in range(flat_d.size):
            flat_o[k] = 10.0 * exponent * math.log10(flat_d[k]) + c1
        return out

    @_njit(cache=True)
    def hata_rural_db_nb(d_m, f_mhz, h_b, h_m):  # pragma: no cover
        lf = math.log10(f_mhz)
        a_hm = (1.1 * lf - 0.7) * h_m - (1.56 * lf - 0.8)
        rural = -4.78 * lf * lf + 18.33 * lf - 40.94
        fixed = 69.55 + 26.16 * lf - 13.82 * math.log10(h_b) - a_hm + rural
        slope = 44.9 - 6.55 * math.log10(h_b)
        out = np.empty_like(d_m)
        flat_d = d_m.ravel()
        flat_o = out.ravel()
        for k in range(flat_d.size):
            flat_o[k] = fixed + slope * math.log10(flat_d[k] / 1000.0)
        return out

    @_njit(cache=True)
    def rx_power_matrix_nb(tx_dbm, loss_db):  # pragma: no cover
        n, m = loss_db.shape
        out = np.empty((n, m), dtype=np.float64)
        for i in range(n):
            for j in range(m):
                out[i, j] = tx_dbm[i] - loss_db[i, j]
        return out

    @_njit(cache=True)
    def repulsion_forces_nb(pos, r0, k_repel):  # pragma: no cover
        n = pos.shape[0]
        out = np.zeros((n, 2), dtype=np.float64)
        for i in range(n):
            fx = 0.0
            fy = 0.0
            for j in range(n):
                if j == i:
                    continue
                dx = pos[i, 0] - pos[j, 0]
                dy = pos[i, 1] - pos[j, 1]
                d2 = dx * dx + dy * dy
                d = math.sqrt(d2)
                if d > 0.0 and d < r0:
                    d_eff = d if d > 1.0 else 1.0
                    w = k_repel / (d_eff * d_eff * d)
                    fx += w * dx
                    fy += w * dy
            out[i, 0] = fx
            out[i, 1] = fy
        return out

    pairwise_distances = pairwise_distances_nb
    freespace_db = freespace_db_nb
    hata_rural_db = hata_rural_db_nb
    rx_power_matrix = rx_power_matrix_nb
    repulsion_forces = repulsion_forces_nb
else:
    pairwise_distances = pairwise_distances_np
    freespace_db = freespace_db_np
    hata_rural_db = hata_rural_db_np
    rx_power_matrix = rx_power_matrix_np
    repulsion_forces = repulsion_forces_np
