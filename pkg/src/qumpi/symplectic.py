"""Symplectic linear algebra for quadrature phase space.

Quadratures are ordered (q1, p1, q2, p2, ...) and the symplectic form is
block diagonal with [[0, 1], [-1, 0]] per mode.  All lossless Gaussian
components are represented by real symplectic matrices acting on this
ordering.
"""

import numpy as np
from scipy.linalg import schur

SYMPLECTIC_TOL = 1e-10


def omega(n_modes):
    """Return the 2n x 2n symplectic form matrix."""
    block = np.array([[0.0, 1.0], [-1.0, 0.0]])
    out = np.zeros((2 * n_modes, 2 * n_modes))
    for m in range(n_modes):
        out[2 * m : 2 * m + 2, 2 * m : 2 * m + 2] = block
    return out


def rotation_matrix(phi):
    """Single-mode quadrature rotation; maps a -> exp(i*phi) a."""
    c, s = np.cos(phi), np.sin(phi)
    return np.array([[c, -s], [s, c]])


def squeeze_matrix(r, gamma=0.0):
    """Single-mode squeezer amplifying the quadrature along angle gamma.

    Args:
        r: squeezing parameter, must be >= 0.  The amplified quadrature
            variance grows by exp(2r).
        gamma: direction of the amplified quadrature in radians.

    Returns:
        2x2 symplectic matrix R(gamma) diag(e^r, e^-r) R(gamma)^T.
    """
    if r < 0:
        raise ValueError(f"squeezing parameter must be non-negative, got {r}")
    rot = rotation_matrix(gamma)
    return rot @ np.diag([np.exp(r), np.exp(-r)]) @ rot.T


def hybrid_ring_matrix():
    """Balanced 50:50 splitter producing sum and difference outputs.

    Maps (a1, a2) -> ((a1 + a2)/sqrt2, (a1 - a2)/sqrt2); it is its own
    inverse, so two rings in series give the identity.
    """
    eye2 = np.eye(2)
    return np.block([[eye2, eye2], [eye2, -eye2]]) / np.sqrt(2.0)


def is_symplectic(s_mat, tol=SYMPLECTIC_TOL):
    """Check S Omega S^T = Omega entrywise within tol."""
    s_mat = np.asarray(s_mat, dtype=float)
    if s_mat.ndim != 2 or s_mat.shape[0] != s_mat.shape[1] or s_mat.shape[0] % 2:
        return False
    om = omega(s_mat.shape[0] // 2)
    return np.max(np.abs(s_mat @ om @ s_mat.T - om)) <= tol


def embed(s_mat, modes, n_modes):
    """Embed a 2k x 2k symplectic acting on `modes` into 2n x 2n.

    Identity on all other modes.  `modes` gives the order in which the
    global modes are wired to the rows/columns of s_mat.
    """
    modes = list(modes)
    if len(set(modes)) != len(modes):
        raise ValueError("modes must be distinct")
    if any(m < 0 or m >= n_modes for m in modes):
        raise ValueError(f"mode index out of range for {n_modes} modes")
    if s_mat.shape != (2 * len(modes), 2 * len(modes)):
        raise ValueError("matrix size does not match number of target modes")
    out = np.eye(2 * n_modes)
    for a, ma in enumerate(modes):
        for b, mb in enumerate(modes):
            out[2 * ma : 2 * ma + 2, 2 * mb : 2 * mb + 2] = s_mat[
                2 * a : 2 * a + 2, 2 * b : 2 * b + 2
            ]
    return out


def _sqrtm_psd(mat):
    """Symmetric PSD square root via eigendecomposition."""
    vals, vecs = np.linalg.eigh(mat)
    vals = np.clip(vals, 0.0, None)
    return (vecs * np.sqrt(vals)) @ vecs.T


def symplectic_eigenvalues(sigma):
    """Williamson eigenvalues of a covariance matrix, sorted ascending.

    Physical states have all values >= 1/2 in the vacuum = I/2 convention.
    """
    sigma = np.asarray(sigma, dtype=float)
    n = sigma.shape[0] // 2
    ev = np.linalg.eigvals(1j * omega(n) @ sigma)
    nu = np.sort(np.abs(ev.real) + np.abs(ev.imag))  # eigenvalues come as +-nu
    # they appear in +- pairs; keep one of each
    return nu.reshape(n, 2).mean(axis=1)


def williamson(sigma):
    """Williamson decomposition sigma = S diag(nu1, nu1, ..., nun, nun) S^T.

    Args:
        sigma: real symmetric positive-definite 2n x 2n matrix.

    Returns:
        (s_mat, nu): symplectic s_mat and the length-n array of symplectic
        eigenvalues (one per mode, unsorted).
    """
    sigma = np.asarray(sigma, dtype=float)
    n = sigma.shape[0] // 2
    root = _sqrtm_psd(sigma)
    anti = root @ omega(n) @ root
    anti = 0.5 * (anti - anti.T)  # enforce antisymmetry against roundoff
    t_mat, q_mat = schur(anti, output="real")
    q_mat = q_mat.copy()
    nu = np.empty(n)
    for j in range(n):
        t = t_mat[2 * j, 2 * j + 1]
        if t < 0:
            q_mat[:, [2 * j, 2 * j + 1]] = q_mat[:, [2 * j + 1, 2 * j]]
            t = -t
        nu[j] = t
    scale = np.repeat(1.0 / np.sqrt(nu), 2)
    s_mat = root @ q_mat * scale[np.newaxis, :]
    return s_mat, nu
