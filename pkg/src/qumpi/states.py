"""Gaussian states of n bosonic modes and the elementary operations on them.

A state is fully described by its quadrature mean vector d (length 2n) and
covariance matrix sigma (2n x 2n) with the vacuum normalised to sigma = I/2.
All operations are pure functions returning new states, so values can be
shared freely across threads and parameter grids.
"""

from dataclasses import dataclass, field

import numpy as np

from .symplectic import (
    embed,
    is_symplectic,
    omega,
    symplectic_eigenvalues,
)

HEISENBERG_TOL = 1e-10
SYMMETRY_RTOL = 1e-12

VACUUM_VARIANCE = 0.5


def _frozen_array(arr, dtype=float):
    out = np.array(arr, dtype=dtype)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class GaussianState:
    """Immutable displacement vector + covariance matrix of an n-mode state."""

    d: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        d = _frozen_array(self.d)
        sigma = _frozen_array(self.sigma)
        if d.ndim != 1 or d.size % 2:
            raise ValueError("displacement must be a length-2n vector")
        if sigma.shape != (d.size, d.size):
            raise ValueError("covariance shape does not match displacement")
        scale = max(1.0, np.max(np.abs(sigma)))
        if np.max(np.abs(sigma - sigma.T)) > SYMMETRY_RTOL * scale:
            raise ValueError("covariance matrix is not symmetric")
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "sigma", sigma)

    @property
    def n_modes(self):
        return self.d.size // 2

    def mode_block(self, mode):
        """2x2 covariance block of a single mode."""
        i = 2 * mode
        return self.sigma[i : i + 2, i : i + 2]

    def purity(self):
        n = self.n_modes
        return 2.0**-n / np.sqrt(np.linalg.det(self.sigma))

    def symplectic_spectrum(self):
        return symplectic_eigenvalues(self.sigma)

    def is_physical(self, tol=HEISENBERG_TOL):
        """Heisenberg condition: sigma + (i/2) Omega >= 0 within tol."""
        herm = self.sigma + 0.5j * omega(self.n_modes)
        return np.linalg.eigvalsh(herm).min() >= -tol


def _check_mode(state, mode):
    if mode < 0 or mode >= state.n_modes:
        raise ValueError(f"mode {mode} out of range for {state.n_modes} modes")


def vacuum_state(n_modes):
    return GaussianState(np.zeros(2 * n_modes), VACUUM_VARIANCE * np.eye(2 * n_modes))


def make_state(specs):
    """Build a product state from per-mode specs.

    Each spec is "vacuum", ("thermal", n_mean) or ("coherent", alpha) with
    alpha complex.  Thermal occupation must be non-negative.
    """
    specs = list(specs)
    n = len(specs)
    d = np.zeros(2 * n)
    sigma = VACUUM_VARIANCE * np.eye(2 * n)
    for m, spec in enumerate(specs):
        if spec == "vacuum" or spec == ("vacuum",):
            continue
        kind = spec[0]
        if kind == "thermal":
            n_mean = float(spec[1])
            if n_mean < 0:
                raise ValueError(f"thermal occupation must be >= 0, got {n_mean}")
            sigma[2 * m, 2 * m] = sigma[2 * m + 1, 2 * m + 1] = n_mean + 0.5
        elif kind == "coherent":
            alpha = complex(spec[1])
            d[2 * m] = np.sqrt(2.0) * alpha.real
            d[2 * m + 1] = np.sqrt(2.0) * alpha.imag
        else:
            raise ValueError(f"unknown mode spec {spec!r}")
    return GaussianState(d, sigma)


def apply_symplectic(state, s_mat, modes):
    """Apply a symplectic map to the given modes (identity elsewhere)."""
    s_mat = np.asarray(s_mat, dtype=float)
    if not is_symplectic(s_mat):
        raise ValueError("matrix is not symplectic (S Omega S^T != Omega)")
    full = embed(s_mat, modes, state.n_modes)
    sigma = full @ state.sigma @ full.T
    return GaussianState(full @ state.d, 0.5 * (sigma + sigma.T))


def displace(state, mode, alpha):
    """Shift one mode by the complex amplitude alpha; sigma is unchanged."""
    _check_mode(state, mode)
    alpha = complex(alpha)
    d = state.d.copy()
    d[2 * mode] += np.sqrt(2.0) * alpha.real
    d[2 * mode + 1] += np.sqrt(2.0) * alpha.imag
    return GaussianState(d, state.sigma)


def apply_loss(state, mode, eta, n_env=0.0):
    """Mix one mode with an environment mode of occupation n_env.

    The mode keeps a fraction eta of its power; cross correlations with
    other modes are scaled by sqrt(eta).
    """
    _check_mode(state, mode)
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"transmissivity out of range [0, 1]: {eta}")
    if n_env < 0:
        raise ValueError(f"environment occupation must be >= 0, got {n_env}")
    i = 2 * mode
    root = np.sqrt(eta)
    d = state.d.copy()
    d[i : i + 2] *= root
    sigma = state.sigma.copy()
    sigma[i : i + 2, :] *= root
    sigma[:, i : i + 2] *= root
    sigma[i : i + 2, i : i + 2] = eta * state.sigma[i : i + 2, i : i + 2] + (
        1.0 - eta
    ) * (n_env + 0.5) * np.eye(2)
    return GaussianState(d, sigma)


def add_isotropic_noise(state, mode, n_noise):
    """Add n_noise thermal photons of isotropic classical noise to one mode."""
    _check_mode(state, mode)
    if n_noise < 0:
        raise ValueError(f"noise photon number must be >= 0, got {n_noise}")
    sigma = state.sigma.copy()
    i = 2 * mode
    sigma[i, i] += n_noise
    sigma[i + 1, i + 1] += n_noise
    return GaussianState(state.d, sigma)


def photon_number(state, mode):
    """Mean occupation <a^dag a> of one mode."""
    _check_mode(state, mode)
    i = 2 * mode
    var_part = 0.5 * (state.sigma[i, i] + state.sigma[i + 1, i + 1] - 1.0)
    disp_part = 0.5 * (state.d[i] ** 2 + state.d[i + 1] ** 2)
    return var_part + disp_part


def total_photon_number(state):
    return sum(photon_number(state, m) for m in range(state.n_modes))


def marginal(state, modes):
    """Reduced state of a subset of modes (order follows `modes`)."""
    modes = list(modes)
    if not modes:
        raise ValueError("marginal requires a non-empty mode subset")
    for m in modes:
        _check_mode(state, m)
    idx = np.concatenate([[2 * m, 2 * m + 1] for m in modes])
    return GaussianState(state.d[idx], state.sigma[np.ix_(idx, idx)])
