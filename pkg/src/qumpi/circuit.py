"""Circuit model of the two-ring / two-JPA parametric interferometer.

The network is: inputs -> hybrid ring -> per-arm path phase and JPAs ->
hybrid ring -> outputs.  Arm 0 carries the sum port of the first ring and
feeds JPA1, arm 1 carries the difference port and feeds JPA2.  Each JPA is
modelled as input loss, isotropic input-referred added noise, and a
phase-sensitive squeezer of gain G = 10^(dB/10) = exp(2r).

Configurations are plain JSON and round-trip exactly through
parse_config / serialize_config.
"""

import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigFieldError, ConfigSyntaxError
from .states import (
    GaussianState,
    add_isotropic_noise,
    apply_loss,
    apply_symplectic,
    make_state,
)
from .symplectic import hybrid_ring_matrix, rotation_matrix, squeeze_matrix

INPUT_KINDS = ("vacuum", "thermal", "coherent")


def gain_db_to_r(gain_db):
    """Squeezing parameter from power gain in dB: G = 10^(dB/10) = exp(2r)."""
    if gain_db < 0:
        raise ValueError(f"gain must be >= 0 dB, got {gain_db}")
    return gain_db * math.log(10.0) / 20.0


def r_to_gain_db(r):
    return 20.0 * r / math.log(10.0)


@dataclass(frozen=True)
class JpaParams:
    """Gain (dB), amplification angle (rad), added noise and input loss."""

    gain_db: float = 0.0
    gamma: float = 0.0
    n_added: float = 0.0
    eta_in: float = 1.0

    def __post_init__(self):
        if self.gain_db < 0:
            raise ConfigFieldError("gain_db", f"must be >= 0, got {self.gain_db}")
        if self.n_added < 0:
            raise ConfigFieldError("n_added", f"must be >= 0, got {self.n_added}")
        if not 0.0 <= self.eta_in <= 1.0:
            raise ConfigFieldError(
                "eta_in", f"transmissivity out of range [0, 1]: {self.eta_in}"
            )

    @property
    def r(self):
        return gain_db_to_r(self.gain_db)


@dataclass(frozen=True)
class InputSpec:
    """Input state of one port: vacuum, thermal(n_mean) or coherent(|alpha|, theta)."""

    kind: str = "vacuum"
    n_mean: float = 0.0
    alpha_mag: float = 0.0
    theta: float = 0.0

    def __post_init__(self):
        if self.kind not in INPUT_KINDS:
            raise ConfigFieldError("kind", f"must be one of {INPUT_KINDS}, got {self.kind!r}")
        if self.n_mean < 0:
            raise ConfigFieldError("n_mean", f"must be >= 0, got {self.n_mean}")
        if self.alpha_mag < 0:
            raise ConfigFieldError("alpha_mag", f"must be >= 0, got {self.alpha_mag}")

    def mode_spec(self):
        if self.kind == "thermal":
            return ("thermal", self.n_mean)
        if self.kind == "coherent":
            return ("coherent", self.alpha_mag * np.exp(1j * self.theta))
        return "vacuum"


@dataclass(frozen=True)
class CircuitConfig:
    """Full interferometer configuration; lossless and vacuum-fed by default."""

    jpa1: JpaParams = field(default_factory=JpaParams)
    jpa2: JpaParams = field(default_factory=JpaParams)
    path_phase: float = 0.0
    eta_hr1: float = 1.0
    eta_hr2: float = 1.0
    input1: InputSpec = field(default_factory=InputSpec)
    input2: InputSpec = field(default_factory=InputSpec)
    env_n: float = 0.0

    def __post_init__(self):
        for name in ("eta_hr1", "eta_hr2"):
            val = getattr(self, name)
            if not 0.0 <= val <= 1.0:
                raise ConfigFieldError(name, f"transmissivity out of range [0, 1]: {val}")
        if self.env_n < 0:
            raise ConfigFieldError("env_n", f"must be >= 0, got {self.env_n}")


_JPA_FIELDS = ("gain_db", "gamma", "n_added", "eta_in")
_INPUT_FIELDS = ("kind", "n_mean", "alpha_mag", "theta")
_TOP_FIELDS = ("jpa1", "jpa2", "path_phase", "eta_hr1", "eta_hr2", "input1", "input2", "env_n")


def _parse_block(name, data, fields, builder):
    if not isinstance(data, dict):
        raise ConfigFieldError(name, f"expected an object, got {type(data).__name__}")
    unknown = set(data) - set(fields)
    if unknown:
        raise ConfigFieldError(f"{name}.{sorted(unknown)[0]}", "unknown field")
    return builder(**data)


def parse_config(text):
    """Parse JSON config text into a validated CircuitConfig.

    Unknown keys are rejected; omitted loss fields default to the lossless
    values (all transmissivities 1, env_n 0).
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigSyntaxError(exc.msg, exc.lineno, exc.colno) from None
    if not isinstance(data, dict):
        raise ConfigFieldError("<root>", "top level must be an object")
    unknown = set(data) - set(_TOP_FIELDS)
    if unknown:
        raise ConfigFieldError(sorted(unknown)[0], "unknown field")
    for req in ("jpa1", "jpa2"):
        if req not in data:
            raise ConfigFieldError(req, "required block is missing")
    kwargs = {}
    kwargs["jpa1"] = _parse_block("jpa1", data["jpa1"], _JPA_FIELDS, JpaParams)
    kwargs["jpa2"] = _parse_block("jpa2", data["jpa2"], _JPA_FIELDS, JpaParams)
    for name in ("input1", "input2"):
        if name in data:
            kwargs[name] = _parse_block(name, data[name], _INPUT_FIELDS, InputSpec)
    for name in ("path_phase", "eta_hr1", "eta_hr2", "env_n"):
        if name in data:
            value = data[name]
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise ConfigFieldError(name, "expected a number")
            kwargs[name] = float(value)
    return CircuitConfig(**kwargs)


def serialize_config(config):
    """Inverse of parse_config; parse(serialize(c)) == c."""
    data = {
        "jpa1": {f: getattr(config.jpa1, f) for f in _JPA_FIELDS},
        "jpa2": {f: getattr(config.jpa2, f) for f in _JPA_FIELDS},
        "path_phase": config.path_phase,
        "eta_hr1": config.eta_hr1,
        "eta_hr2": config.eta_hr2,
        "input1": {f: getattr(config.input1, f) for f in _INPUT_FIELDS},
        "input2": {f: getattr(config.input2, f) for f in _INPUT_FIELDS},
        "env_n": config.env_n,
    }
    return json.dumps(data, indent=2) + "\n"


def load_config(path):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


def config_hash(config):
    """Stable hex digest identifying a configuration."""
    return hashlib.sha256(serialize_config(config).encode("utf-8")).hexdigest()


def compile_ops(config):
    """Lower a config to (input_specs, primitive op list).

    The op list uses elementary instructions shared by the Gaussian and
    Fock executors:

        ("hybrid", i, j)             sum/difference splitter on modes i, j
        ("rotate", mode, phi)        quadrature rotation
        ("squeeze", mode, r, gamma)  phase-sensitive amplification
        ("loss", mode, eta, n_env)   beamsplitter coupling to an environment
        ("noise", mode, n)           isotropic added-noise injection
    """
    specs = (config.input1.mode_spec(), config.input2.mode_spec())
    ops = [("hybrid", 0, 1)]
    if config.eta_hr1 < 1.0:
        ops += [("loss", 0, config.eta_hr1, config.env_n), ("loss", 1, config.eta_hr1, config.env_n)]
    if config.path_phase != 0.0:
        ops.append(("rotate", 0, config.path_phase))
    for mode, jpa in ((0, config.jpa1), (1, config.jpa2)):
        if jpa.eta_in < 1.0:
            ops.append(("loss", mode, jpa.eta_in, config.env_n))
        if jpa.n_added > 0.0:
            ops.append(("noise", mode, jpa.n_added))
        if jpa.gain_db > 0.0:
            ops.append(("squeeze", mode, jpa.r, jpa.gamma))
    ops.append(("hybrid", 0, 1))
    if config.eta_hr2 < 1.0:
        ops += [("loss", 0, config.eta_hr2, config.env_n), ("loss", 1, config.eta_hr2, config.env_n)]
    return specs, ops


def execute_gaussian(input_specs, ops):
    """Run a compiled op list through the Gaussian-state primitives."""
    state = make_state(input_specs)
    for op in ops:
        name = op[0]
        if name == "hybrid":
            state = apply_symplectic(state, hybrid_ring_matrix(), (op[1], op[2]))
        elif name == "rotate":
            state = apply_symplectic(state, rotation_matrix(op[2]), (op[1],))
        elif name == "squeeze":
            state = apply_symplectic(state, squeeze_matrix(op[2], op[3]), (op[1],))
        elif name == "loss":
            state = apply_loss(state, op[1], op[2], op[3])
        elif name == "noise":
            state = add_isotropic_noise(state, op[1], op[2])
        else:
            raise ValueError(f"unknown op {name!r}")
    return state


def apply_jpa(state, mode, params, env_n=0.0):
    """Input loss, then isotropic added noise, then phase-sensitive gain."""
    out = state
    if params.eta_in < 1.0:
        out = apply_loss(out, mode, params.eta_in, env_n)
    if params.n_added > 0.0:
        out = add_isotropic_noise(out, mode, params.n_added)
    if params.gain_db > 0.0:
        out = apply_symplectic(out, squeeze_matrix(params.r, params.gamma), (mode,))
    return out


def run_qumpi(config):
    """Propagate the configured inputs through the interferometer.

    Returns the two-mode Gaussian state at (Out1, Out2).
    """
    specs, ops = compile_ops(config)
    return execute_gaussian(specs, ops)


def mixer_reference(g_eff):
    """Two-mode squeezed vacuum of a phase-conjugating mixer on vacuum inputs.

    The mixer maps b1 = sqrt(g) a1 + sqrt(g-1) a2^dag (and 1 <-> 2), which the
    interferometer reproduces for equal gains and orthogonal amplification
    angles; sqrt(g_eff) = cosh(r).
    """
    if g_eff < 1.0:
        raise ValueError(f"effective gain must be >= 1, got {g_eff}")
    local = (g_eff - 0.5) * np.eye(2)
    c = math.sqrt(g_eff * (g_eff - 1.0))
    cross = np.diag([c, -c])
    sigma = np.block([[local, cross], [cross, local]])
    return GaussianState(np.zeros(4), sigma)
