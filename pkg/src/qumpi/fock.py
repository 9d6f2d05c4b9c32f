"""Brute-force oracle in a truncated Fock basis.

Rebuilds the same circuits as the Gaussian path by explicit density-matrix
evolution: matrix exponentials of the quadratic generators for the unitary
elements, and exact Kraus sets (the Stinespring dilation blocks of the
beamsplitter-to-ancilla construction) for loss, amplification and added
noise.  Everything here trades speed and memory for directness; it exists
to certify the Gaussian formulas, not to be fast.

Supports one or two system modes; loss needs no explicit ancilla mode.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sp
from scipy.linalg import expm

from .circuit import compile_ops, run_qumpi
from .errors import TruncationError, ZeroDenominatorError
from .observables import g2_auto, g2_cross, gaussian_qfi
from .states import photon_number

DEFAULT_TAIL_BUDGET = 1e-6
# Kraus terms whose weight on the populated levels is below this bound are
# dropped; the cut is far beneath double-precision resolution.
_KRAUS_WEIGHT_CUT = 1e-18


@dataclass(frozen=True)
class FockDensity:
    """Truncated Fock-basis density matrix over one or two modes."""

    rho: np.ndarray
    cutoff: int
    n_modes: int

    @property
    def trace(self):
        return float(np.trace(self.rho).real)

    @property
    def tail(self):
        """Probability mass lost to truncation, 1 - trace."""
        return 1.0 - self.trace

    def tensor(self):
        shape = (self.cutoff,) * (2 * self.n_modes)
        return self.rho.reshape(shape)


def ladder(cutoff):
    """Annihilation operator on a cutoff-dimensional Fock space."""
    return np.diag(np.sqrt(np.arange(1.0, cutoff)), 1)


def number_op(cutoff):
    return np.diag(np.arange(float(cutoff)))


def squeeze_gate(cutoff, r, gamma=0.0):
    """Unitary with Heisenberg action a -> cosh(r) a + e^{2i gamma} sinh(r) a^dag."""
    a = ladder(cutoff)
    z = -r * np.exp(2j * gamma)
    return expm(0.5 * (np.conj(z) * (a @ a) - z * (a.T @ a.T)))


def rotation_gate(cutoff, phi):
    """Unitary with Heisenberg action a -> e^{i phi} a."""
    return np.diag(np.exp(1j * phi * np.arange(cutoff)))


def displace_gate(cutoff, alpha):
    a = ladder(cutoff)
    return expm(alpha * a.T - np.conj(alpha) * a)


def quadratic_gate(cutoff, g_mat, theta):
    """exp(-i theta H) for H = (g_qq q^2 + g_pp p^2 + g_qp {q, p}) / 2."""
    a = ladder(cutoff)
    q = (a + a.T) / np.sqrt(2.0)
    p = (a - a.T) / (1j * np.sqrt(2.0))
    h = 0.5 * (g_mat[0, 0] * q @ q + g_mat[1, 1] * p @ p) + 0.5 * g_mat[0, 1] * (
        q @ p + p @ q
    )
    return expm(-1j * theta * h)


@lru_cache(maxsize=4)
def hybrid_gate(cutoff):
    """Sparse two-mode unitary for the sum/difference splitter.

    Assembled block-by-block in the total-photon-number sectors of the
    beamsplitter generator, then combined with a pi phase on mode 2 so the
    Heisenberg map is a1 -> (a1+a2)/sqrt2, a2 -> (a1-a2)/sqrt2.
    """
    rows, cols, data = [], [], []
    for total in range(2 * cutoff - 1):
        levels = [n1 for n1 in range(cutoff) if 0 <= total - n1 < cutoff]
        size = len(levels)
        gen = np.zeros((size, size))
        for idx, n1 in enumerate(levels):
            n2 = total - n1
            if n1 + 1 < cutoff and n2 - 1 >= 0:
                jdx = levels.index(n1 + 1)
                gen[jdx, idx] += math.sqrt((n1 + 1) * n2)
            if n1 - 1 >= 0 and n2 + 1 < cutoff:
                jdx = levels.index(n1 - 1)
                gen[jdx, idx] -= math.sqrt(n1 * (n2 + 1))
        block = expm((np.pi / 4.0) * gen)
        for idx, n1 in enumerate(levels):
            col = n1 * cutoff + (total - n1)
            for jdx, m1 in enumerate(levels):
                m2 = total - m1
                val = block[jdx, idx] * (-1.0) ** m2  # mode-2 pi phase
                if val != 0.0:
                    rows.append(m1 * cutoff + m2)
                    cols.append(col)
                    data.append(val)
    dim = cutoff * cutoff
    return sp.csr_matrix((data, (rows, cols)), shape=(dim, dim))


def loss_kraus(cutoff, eta, k_max=None):
    """Kraus operators of the pure-loss channel with transmissivity eta."""
    if k_max is None:
        k_max = cutoff - 1
    n = np.arange(cutoff)
    out = []
    for k in range(k_max + 1):
        diag = np.zeros(cutoff - k)
        for m in range(cutoff - k):
            nn = m + k
            diag[m] = math.sqrt(
                math.comb(nn, k) * eta ** (nn - k) * (1.0 - eta) ** k
            )
        out.append(np.diag(diag, k).T.copy() if False else _shifted_diag(diag, -k, cutoff))
    return out


def _shifted_diag(values, offset, cutoff):
    """Matrix with `values` on the given diagonal (offset < 0 lowers)."""
    mat = np.zeros((cutoff, cutoff))
    if offset <= 0:
        for i, v in enumerate(values):
            mat[i, i - offset] = v
    else:
        for i, v in enumerate(values):
            mat[i + offset, i] = v
    return mat


def amp_kraus(cutoff, gain, l_max=None):
    """Kraus operators of the quantum-limited amplifier with gain >= 1."""
    if gain < 1.0:
        raise ValueError(f"amplifier gain must be >= 1, got {gain}")
    lam = math.sqrt((gain - 1.0) / gain)
    mu = math.sqrt(1.0 / gain)
    if l_max is None:
        if lam == 0.0:
            l_max = 0
        else:
            l_max = min(
                cutoff - 1,
                int(math.ceil(math.log(_KRAUS_WEIGHT_CUT) / (2.0 * math.log(lam)))),
            )
    out = []
    for l in range(l_max + 1):
        vals = np.array(
            [
                math.sqrt(math.comb(n + l, l)) * lam**l * mu ** (n + 1)
                for n in range(cutoff - l)
            ]
        )
        out.append(_shifted_diag(vals, l, cutoff))
    return out


def _apply_unitary(rho_t, u_mat, mode, n_modes):
    """U rho U^dag with a single-mode unitary on tensor-shaped rho."""
    uc = u_mat.conj()
    if n_modes == 1:
        return u_mat @ rho_t @ uc.T
    if mode == 0:
        t = np.tensordot(u_mat, rho_t, axes=([1], [0]))  # a,u,y,v
        out = np.tensordot(t, uc, axes=([2], [1]))  # a,u,v,b
        return out.transpose(0, 1, 3, 2)
    t = np.tensordot(u_mat, rho_t, axes=([1], [1]))  # b(mode1 row),a,y,v
    t = t.transpose(1, 0, 2, 3)  # a,b,y,v
    out = np.tensordot(t, uc, axes=([3], [1]))  # a,b,y,d
    return out


def _apply_kraus(rho_t, kraus, mode, n_modes):
    out = None
    for k_mat in kraus:
        term = _apply_unitary(rho_t, k_mat, mode, n_modes)
        out = term if out is None else out + term
    return out


def _apply_two_mode(rho, u_sparse):
    return u_sparse @ rho @ u_sparse.conj().T.tocsr()


def _mode_populations(rho_t, mode, n_modes):
    if n_modes == 1:
        return np.diag(rho_t).real
    if mode == 0:
        return np.einsum("auav->a", rho_t).real
    return np.einsum("auay->u", rho_t).real


def _occupied_top_level(populations):
    """Highest level whose upper-tail mass is numerically significant."""
    tail = np.cumsum(populations[::-1])[::-1]
    keep = np.nonzero(tail > _KRAUS_WEIGHT_CUT)[0]
    return int(keep[-1]) if keep.size else 0


def _coherent_vector(cutoff, alpha):
    v = np.empty(cutoff, dtype=complex)
    v[0] = 1.0
    for n in range(1, cutoff):
        v[n] = v[n - 1] * alpha / math.sqrt(n)
    return v * math.exp(-0.5 * abs(alpha) ** 2)


def _prep_single(cutoff, spec):
    if spec == "vacuum" or spec == ("vacuum",):
        rho = np.zeros((cutoff, cutoff), dtype=complex)
        rho[0, 0] = 1.0
        return rho
    kind = spec[0]
    if kind == "thermal":
        n_mean = float(spec[1])
        if n_mean == 0.0:
            return _prep_single(cutoff, "vacuum")
        ratio = n_mean / (n_mean + 1.0)
        probs = (ratio ** np.arange(cutoff)) / (n_mean + 1.0)
        return np.diag(probs).astype(complex)
    if kind == "coherent":
        v = _coherent_vector(cutoff, complex(spec[1]))
        return np.outer(v, v.conj())
    raise ValueError(f"unknown mode spec {spec!r}")


def build_fock(input_specs, ops, cutoff, tail_budget=DEFAULT_TAIL_BUDGET):
    """Evolve the product of `input_specs` through a compiled op list.

    Raises TruncationError when the missing probability mass exceeds the
    budget, which usually means the cutoff is too small for the circuit.
    """
    input_specs = list(input_specs)
    n_modes = len(input_specs)
    if n_modes not in (1, 2):
        raise ValueError("the oracle supports one or two modes")
    rho = _prep_single(cutoff, input_specs[0])
    if n_modes == 2:
        rho = np.kron(rho, _prep_single(cutoff, input_specs[1]))
    shape = (cutoff,) * (2 * n_modes)
    rho_t = rho.reshape(shape)

    for op in ops:
        name = op[0]
        if name == "hybrid":
            if n_modes != 2:
                raise ValueError("hybrid op needs two modes")
            dim = cutoff * cutoff
            rho_t = np.asarray(
                _apply_two_mode(rho_t.reshape(dim, dim), hybrid_gate(cutoff))
            ).reshape(shape)
        elif name == "rotate":
            rho_t = _apply_unitary(rho_t, rotation_gate(cutoff, op[2]), op[1], n_modes)
        elif name == "squeeze":
            rho_t = _apply_unitary(
                rho_t, squeeze_gate(cutoff, op[2], op[3]), op[1], n_modes
            )
        elif name == "displace":
            rho_t = _apply_unitary(rho_t, displace_gate(cutoff, op[2]), op[1], n_modes)
        elif name == "loss":
            _, mode, eta, n_env = op
            gain2 = 1.0 + (1.0 - eta) * n_env
            eta2 = eta / gain2
            rho_t = _lossy_step(rho_t, mode, n_modes, cutoff, eta2, gain2)
        elif name == "noise":
            _, mode, n_noise = op
            if n_noise > 0.0:
                rho_t = _lossy_step(
                    rho_t, mode, n_modes, cutoff, 1.0 / (1.0 + n_noise), 1.0 + n_noise
                )
        else:
            raise ValueError(f"unknown op {name!r}")

    dim = cutoff**n_modes
    fd = FockDensity(rho_t.reshape(dim, dim), cutoff, n_modes)
    if fd.tail > tail_budget:
        raise TruncationError(fd.tail, tail_budget, cutoff)
    return fd


def _lossy_step(rho_t, mode, n_modes, cutoff, eta, gain):
    """Pure loss followed by quantum-limited amplification on one mode."""
    if eta < 1.0:
        top = _occupied_top_level(_mode_populations(rho_t, mode, n_modes))
        rho_t = _apply_kraus(rho_t, loss_kraus(cutoff, eta, k_max=top), mode, n_modes)
    if gain > 1.0:
        rho_t = _apply_kraus(rho_t, amp_kraus(cutoff, gain), mode, n_modes)
    return rho_t


def expectation_of(fd, word):
    """Expectation of an operator word over {a_i, a_i^dag}.

    `word` is a sequence of (mode, dagger) pairs in left-to-right operator
    order, e.g. ((0, True), (0, True), (0, False), (0, False)) for
    <a0^dag a0^dag a0 a0>.
    """
    a = ladder(fd.cutoff)
    per_mode = [np.eye(fd.cutoff, dtype=complex) for _ in range(fd.n_modes)]
    for mode, dag in word:
        if mode < 0 or mode >= fd.n_modes:
            raise ValueError(f"mode {mode} out of range")
        per_mode[mode] = per_mode[mode] @ (a.T if dag else a)
    rho_t = fd.tensor()
    if fd.n_modes == 1:
        return complex(np.einsum("xy,yx->", rho_t, per_mode[0]))
    return complex(np.einsum("abcd,ca,db->", rho_t, per_mode[0], per_mode[1]))


def photon_number_fock(fd, mode):
    return expectation_of(fd, ((mode, True), (mode, False))).real


def g2_auto_fock(fd, mode):
    n_mean = photon_number_fock(fd, mode)
    if n_mean <= 1e-9:
        raise ZeroDenominatorError(f"g2 undefined at photon number {n_mean:.2e}")
    numer = expectation_of(
        fd, ((mode, True), (mode, True), (mode, False), (mode, False))
    ).real
    return numer / n_mean**2


def g2_cross_fock(fd):
    n1 = photon_number_fock(fd, 0)
    n2 = photon_number_fock(fd, 1)
    if n1 + n2 <= 1e-9:
        raise ZeroDenominatorError(f"cross g2 undefined at photon number {n1 + n2:.2e}")
    auto1 = expectation_of(fd, ((0, True), (0, True), (0, False), (0, False))).real
    auto2 = expectation_of(fd, ((1, True), (1, True), (1, False), (1, False))).real
    cross = expectation_of(fd, ((0, True), (0, False), (1, True), (1, False))).real
    return (auto1 + auto2 + 2.0 * cross) / (n1 + n2) ** 2


def fidelity(fd1, fd2):
    """Uhlmann fidelity (Tr sqrt(sqrt(rho1) rho2 sqrt(rho1)))^2."""
    vals, vecs = np.linalg.eigh(fd1.rho)
    vals = np.clip(vals, 0.0, None)
    root = (vecs * np.sqrt(vals)) @ vecs.conj().T
    inner = root @ fd2.rho @ root
    ev = np.clip(np.linalg.eigvalsh(inner), 0.0, None)
    return float(np.sum(np.sqrt(ev)) ** 2)


def qfi_fidelity(fd, g_mat, mode, delta=5e-3):
    """QFI from the Bures response to the phase unitary exp(-i theta H).

    Builds rho(+-delta) by conjugating with the quadratic gate and uses the
    symmetric finite difference 2 (1 - sqrt(F)) / delta^2.
    """
    gate = quadratic_gate(fd.cutoff, np.asarray(g_mat, dtype=float), delta)
    rho_t = fd.tensor()
    plus = _apply_unitary(rho_t, gate, mode, fd.n_modes)
    minus = _apply_unitary(rho_t, gate.conj().T, mode, fd.n_modes)
    dim = fd.cutoff**fd.n_modes
    fid = fidelity(
        FockDensity(minus.reshape(dim, dim), fd.cutoff, fd.n_modes),
        FockDensity(plus.reshape(dim, dim), fd.cutoff, fd.n_modes),
    )
    return 2.0 * (1.0 - math.sqrt(min(fid, 1.0))) / delta**2


@dataclass(frozen=True)
class CrossCheckRow:
    name: str
    gaussian: float
    fock: float
    rel_diff: float
    within_tol: bool


@dataclass(frozen=True)
class CrossCheckReport:
    rows: tuple
    cutoff: int
    tail: float

    @property
    def flagged(self):
        return any(not row.within_tol for row in self.rows)

    def to_text(self):
        lines = [f"{'observable':<10} {'gaussian':>18} {'fock':>18} {'rel diff':>12}  ok"]
        for row in self.rows:
            lines.append(
                f"{row.name:<10} {row.gaussian:>18.12g} {row.fock:>18.12g} "
                f"{row.rel_diff:>12.3e}  {'yes' if row.within_tol else 'NO'}"
            )
        lines.append(f"truncation tail: {self.tail:.3e} at cutoff {self.cutoff}")
        return "\n".join(lines)


def _rel_diff(x, y):
    return abs(x - y) / max(abs(x), abs(y), 1e-9)


def cross_check(
    config,
    cutoff=40,
    tail_budget=DEFAULT_TAIL_BUDGET,
    include_qfi=False,
    moment_tol=1e-5,
    qfi_tol=1e-3,
    gaussian_observables=None,
):
    """Tabulate Gaussian-formalism vs Fock-oracle observables for a config.

    Photon numbers and correlation functions are compared at `moment_tol`
    relative; the fidelity-based QFI row (optional, slower) at `qfi_tol`,
    which absorbs the finite-difference bias.  `gaussian_observables` can
    override the Gaussian-side functions (used by negative-control tests).
    """
    funcs = {
        "photon_number": photon_number,
        "g2_auto": g2_auto,
        "g2_cross": g2_cross,
        "gaussian_qfi": gaussian_qfi,
    }
    if gaussian_observables:
        funcs.update(gaussian_observables)
    state = run_qumpi(config)
    specs, ops = compile_ops(config)
    fd = build_fock(specs, ops, cutoff, tail_budget)

    rows = []

    def add(name, g_val, f_val, tol):
        diff = _rel_diff(g_val, f_val)
        rows.append(CrossCheckRow(name, float(g_val), float(f_val), diff, diff <= tol))

    n_g = [funcs["photon_number"](state, m) for m in range(2)]
    for m in range(2):
        add(f"N{m + 1}", n_g[m], photon_number_fock(fd, m), moment_tol)
    for m in range(2):
        if n_g[m] > 1e-6:
            add(f"g2_{m + 1}", funcs["g2_auto"](state, m), g2_auto_fock(fd, m), moment_tol)
    if n_g[0] + n_g[1] > 1e-6:
        add("g2_C", funcs["g2_cross"](state), g2_cross_fock(fd), moment_tol)
    if include_qfi:
        gen = np.eye(2)
        add(
            "qfi",
            funcs["gaussian_qfi"](state, gen, 0),
            qfi_fidelity(fd, gen, 0),
            qfi_tol,
        )
    return CrossCheckReport(tuple(rows), cutoff, fd.tail)
