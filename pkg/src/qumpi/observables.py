"""Scalar observables of Gaussian states.

Implements the ladder-operator moment bridge, second-order correlation
functions, the output balancing criterion, the quantum Fisher information
of Gaussian phase families, and the Gaussian interferometric power with its
standard-quantum-limit / Heisenberg-limit reference bounds.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .errors import ZeroDenominatorError
from .states import GaussianState, photon_number
from .symplectic import omega, williamson

PHOTON_EPS = 1e-9
_NU_FLOOR = 1.0 + 1e-9  # symplectic-eigenvalue regularisation, doubled units
_GENERATOR_DET_TOL = 1e-9


@dataclass(frozen=True)
class ModeMoments:
    """First and second ladder moments of one mode.

    alpha = <a>, n_fluct = <da^dag da>, m_fluct = <da da> with da = a - alpha.
    """

    alpha: complex
    n_fluct: float
    m_fluct: complex


@dataclass(frozen=True)
class PairMoments:
    """Single-mode moments of a mode pair plus their cross correlations.

    c_nd = <da1^dag da2>, c_dd = <da1 da2>.
    """

    mode1: ModeMoments
    mode2: ModeMoments
    c_nd: complex
    c_dd: complex


def mode_moments(state, mode):
    """Ladder moments of one mode from its (d, sigma) blocks."""
    i = 2 * mode
    dq, dp = state.d[i], state.d[i + 1]
    sqq = state.sigma[i, i]
    spp = state.sigma[i + 1, i + 1]
    sqp = state.sigma[i, i + 1]
    alpha = (dq + 1j * dp) / np.sqrt(2.0)
    n_fluct = 0.5 * (sqq + spp - 1.0)
    m_fluct = 0.5 * (sqq - spp) + 1j * sqp
    return ModeMoments(alpha, n_fluct, m_fluct)


def pair_moments(state, modes=(0, 1)):
    """Moments of two modes including their cross correlations."""
    i, j = (2 * m for m in modes)
    s = state.sigma
    qq, pp = s[i, j], s[i + 1, j + 1]
    qp, pq = s[i, j + 1], s[i + 1, j]
    c_nd = 0.5 * (qq + pp) + 0.5j * (qp - pq)
    c_dd = 0.5 * (qq - pp) + 0.5j * (qp + pq)
    return PairMoments(
        mode_moments(state, modes[0]), mode_moments(state, modes[1]), c_nd, c_dd
    )


def _auto_fourth_moment(mm):
    """Normal-ordered <a^dag a^dag a a> from Gaussian moments."""
    a2 = abs(mm.alpha) ** 2
    return (
        a2**2
        + 4.0 * a2 * mm.n_fluct
        + 2.0 * (np.conj(mm.alpha) ** 2 * mm.m_fluct).real
        + 2.0 * mm.n_fluct**2
        + abs(mm.m_fluct) ** 2
    )


def g2_auto(state, mode):
    """Zero-delay auto-correlation <n(n-1)> / <n>^2 of one mode."""
    n_mean = photon_number(state, mode)
    if n_mean <= PHOTON_EPS:
        raise ZeroDenominatorError(
            f"g2 undefined: mode {mode} photon number {n_mean:.2e} below {PHOTON_EPS}"
        )
    return _auto_fourth_moment(mode_moments(state, mode)) / n_mean**2


def g2_cross(state, modes=(0, 1)):
    """Zero-delay cross-correlation between two output modes.

    Values below 1 certify nonclassical (anti-bunched) intensity
    correlations between the outputs.
    """
    n1 = photon_number(state, modes[0])
    n2 = photon_number(state, modes[1])
    if n1 + n2 <= PHOTON_EPS:
        raise ZeroDenominatorError(
            f"cross g2 undefined: total photon number {n1 + n2:.2e} below {PHOTON_EPS}"
        )
    pm = pair_moments(state, modes)
    m1, m2 = pm.mode1, pm.mode2
    a1, a2 = m1.alpha, m2.alpha
    # Wick expansion of <n1 n2> in displaced fluctuation operators
    nn = (
        abs(a1) ** 2 * abs(a2) ** 2
        + abs(a1) ** 2 * m2.n_fluct
        + abs(a2) ** 2 * m1.n_fluct
        + m1.n_fluct * m2.n_fluct
        + abs(pm.c_nd) ** 2
        + abs(pm.c_dd) ** 2
        + 2.0 * (a1 * np.conj(a2) * pm.c_nd).real
        + 2.0 * (np.conj(a1) * np.conj(a2) * pm.c_dd).real
    )
    numer = _auto_fourth_moment(m1) + _auto_fourth_moment(m2) + 2.0 * nn
    return numer / (n1 + n2) ** 2


def balancing(state):
    """Product of squashed-to-amplified local variance ratios.

    Equals 1 for a perfectly balanced two-mode output and decreases as the
    local phase-space distributions become anisotropic.
    """
    out = 1.0
    for mode in range(2):
        evals = np.linalg.eigvalsh(state.mode_block(mode))
        out *= evals[0] / evals[1]
    return out


def sql_hl_bounds(n_probe):
    """Standard-quantum-limit and Heisenberg-limit bounds (N, N(N+1))."""
    if n_probe < 0:
        raise ValueError(f"probe photon number must be >= 0, got {n_probe}")
    return n_probe, n_probe * (n_probe + 1.0)


def phase_generator(w, psi=0.0):
    """Harmonic-spectrum generator R(psi) diag(w, 1/w) R(psi)^T, w >= 1."""
    if w < 1.0:
        raise ValueError(f"generator eigenvalue w must be >= 1, got {w}")
    c, s = np.cos(psi), np.sin(psi)
    rot = np.array([[c, -s], [s, c]])
    return rot @ np.diag([w, 1.0 / w]) @ rot.T


def _regularized_doubled_sigma(state):
    """2*sigma with symplectic eigenvalues floored just above purity."""
    s_mat, nu = williamson(state.sigma)
    nu2 = 2.0 * nu
    if nu2.min() >= _NU_FLOOR:
        return 2.0 * state.sigma
    nu2 = np.maximum(nu2, _NU_FLOOR)
    doubled = s_mat @ np.diag(np.repeat(nu2, 2)) @ s_mat.T
    return 0.5 * (doubled + doubled.T)


def _qfi_quadratic_solver(state):
    """Eigendecomposition of M = st (x) st - Om (x) Om for st = 2*sigma."""
    n = state.n_modes
    st = _regularized_doubled_sigma(state)
    om = omega(n)
    m_mat = np.kron(st, st) - np.kron(om, om)
    evals, evecs = np.linalg.eigh(m_mat)
    evals = np.maximum(evals, 1e-14 * evals.max())
    return st, evals, evecs


def _generator_embedding(g_mat, mode, n_modes):
    a_full = np.zeros((2 * n_modes, 2 * n_modes))
    i = 2 * mode
    a_full[i : i + 2, i : i + 2] = omega(1) @ g_mat
    return a_full


def gaussian_qfi(state, g_mat, mode=0):
    """Quantum Fisher information of the phase family generated on one mode.

    The family is sigma(t) = S_t sigma S_t^T, d(t) = S_t d with
    S_t = exp(t * Omega G) acting on `mode` only.  G must be symmetric with
    det G = 1 (harmonic spectrum).

    Uses the vectorised second-moment formula in doubled covariance units
    with a displacement term; near-pure states are handled by flooring the
    symplectic eigenvalues.
    """
    g_mat = np.asarray(g_mat, dtype=float)
    if g_mat.shape != (2, 2) or abs(g_mat[0, 1] - g_mat[1, 0]) > 1e-12:
        raise ValueError("generator must be a symmetric 2x2 matrix")
    if abs(np.linalg.det(g_mat) - 1.0) > _GENERATOR_DET_TOL:
        raise ValueError(f"generator must have det 1, got det {np.linalg.det(g_mat)}")
    st, evals, evecs = _qfi_quadratic_solver(state)
    a_full = _generator_embedding(g_mat, mode, state.n_modes)
    dsig = a_full @ st + st @ a_full.T
    proj = evecs.T @ dsig.reshape(-1)
    f_quad = 0.5 * np.sum(proj**2 / evals)
    dd = a_full @ state.d
    f_disp = 2.0 * dd @ np.linalg.solve(st, dd)
    return float(f_quad + f_disp)


def _power_objective_form(state, mode):
    """3x3 quadratic form Q with F(G) = c^T Q c over generator components.

    c = (g_qq, g_pp, g_qp); valid for the centred state, where the QFI is
    quadratic in the generator because M does not depend on it.
    """
    st, evals, evecs = _qfi_quadratic_solver(state)
    basis = (
        np.array([[1.0, 0.0], [0.0, 0.0]]),
        np.array([[0.0, 0.0], [0.0, 1.0]]),
        np.array([[0.0, 1.0], [1.0, 0.0]]),
    )
    proj = np.empty((3, evals.size))
    for k, e_mat in enumerate(basis):
        a_full = _generator_embedding(e_mat, mode, state.n_modes)
        dsig = a_full @ st + st @ a_full.T
        proj[k] = evecs.T @ dsig.reshape(-1)
    return 0.5 * np.einsum("ik,jk,k->ij", proj, proj, 1.0 / evals)


def _generator_components(w, psi):
    c2, s2 = np.cos(psi) ** 2, np.sin(psi) ** 2
    cs = np.cos(psi) * np.sin(psi)
    winv = 1.0 / w
    return np.stack([w * c2 + winv * s2, w * s2 + winv * c2, cs * (w - winv)])


def interferometric_power(
    state, probe=0, w_max=20.0, grid_shape=(64, 64), rel_tol=1e-4
):
    """Worst-case phase-estimation QFI / 4 over local harmonic generators.

    Minimises the Gaussian QFI over generators R(psi) diag(w, 1/w) R(psi)^T
    applied to the probe mode, by a coarse (w, psi) grid followed by local
    refinement.  The displacement of the state does not contribute: the
    harmonic-spectrum Hamiltonians include a displaced-centre freedom whose
    optimum removes the first-moment term, so only the covariance matters.

    Args:
        state: two-mode Gaussian state.
        probe: index of the probed subsystem mode.
        w_max: largest generator eigenvalue in the search grid.
        grid_shape: coarse grid resolution in (w, psi).
        rel_tol: relative function tolerance of the local refinement.
    """
    if state.n_modes != 2:
        raise ValueError("interferometric power is defined for two-mode states")
    centred = GaussianState(np.zeros_like(state.d), state.sigma)
    q_form = _power_objective_form(centred, probe)

    n_w, n_psi = grid_shape
    log_w = np.linspace(0.0, np.log(w_max), n_w)
    psis = np.linspace(0.0, np.pi, n_psi, endpoint=False)
    wg, pg = np.meshgrid(np.exp(log_w), psis, indexing="ij")
    comps = _generator_components(wg.ravel(), pg.ravel())
    values = np.einsum("ik,ij,jk->k", comps, q_form, comps)
    best = int(np.argmin(values))

    def objective(x):
        c = _generator_components(np.exp(x[0]), x[1])
        return float(c @ q_form @ c)

    x0 = np.array([np.log(wg.ravel()[best]), pg.ravel()[best]])
    res = minimize(
        objective,
        x0,
        method="Powell",
        bounds=[(0.0, np.log(w_max)), (None, None)],
        options={"ftol": rel_tol, "xtol": 1e-6},
    )
    f_min = min(float(values[best]), float(res.fun))
    return max(0.25 * f_min, 0.0)
