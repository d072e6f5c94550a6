"""Physical parameters and their translation into Hamiltonians, dissipator
channels, the square-wave pulse schedule, and the initial state.

Unit system
-----------
Frequencies are configured as nu = omega/2pi in GHz (the form experimental
values are quoted in); internally everything angular is omega = 2pi*nu in
rad/ns and times are in ns, which keeps magnitudes O(1..100).

Sign conventions
----------------
The signed qubit-mode detuning is ``Delta = omega_D - omega_q`` (negative
for the shipped presets).  The dispersive shift ``chi`` and the pulse-
induced Rabi rate ``Omega_R`` that enter the effective walk Hamiltonian,
the drive-frequency condition and the step timings are computed with the
qubit-minus-mode detuning ``omega_q - omega_D = -Delta``:

    chi     = eta^2 / (omega_q - omega_D)
    Omega_R = 2 eta eps0 / (omega_q - omega_D)

With this signing the canonical transformation generated by
``S = (eta / (omega_q - omega_D)) (lower c^dag - raise c)`` removes the
qubit-boson coupling at first order and reproduces the effective
Hamiltonian below with the written signs (verified numerically by the
``algebra`` module).  For the presets both chi and Omega_R are positive,
so magnitudes and signed values coincide.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np

from . import operators as ops
from .errors import (
    DispersiveRegimeWarning,
    InvalidParameterError,
    ScheduleInfeasibleError,
    TruncationWarning,
)

__all__ = [
    "TWO_PI",
    "PhysicalParams",
    "DerivedParams",
    "DissipatorSpec",
    "Segment",
    "PulseSchedule",
    "derive",
    "hamiltonian_rotframe",
    "hamiltonian_effective",
    "coin_hamiltonian",
    "dissipators",
    "pulse_schedule",
    "initial_state",
    "preset",
    "PRESET_NAMES",
]

TWO_PI = 2.0 * math.pi

# Detuning-to-coupling ratio below which the dispersive picture is dubious.
DISPERSIVE_RATIO_MIN = 10.0


@dataclass(frozen=True)
class PhysicalParams:
    """Model frequencies/rates (all as nu = omega/2pi in GHz) plus walk geometry.

    nu_q:      flux-qubit gap frequency
    nu_D:      zero-field splitting of the collective mode
    nu_eta:    qubit-mode coupling strength
    nu_eps0:   square-pulse drive amplitude
    gamma1:    qubit relaxation rate
    gamma_phi: qubit dephasing rate
    Gamma:     collective-mode decay rate
    alpha:     initial coherent amplitude of the mode
    d_sites:   number of sites on the phase-space cycle
    fock_dim:  bosonic Fock-space truncation
    n_steps:   number of walk steps to simulate
    m_phase:   phase-grid size for the phase distribution
    """

    nu_q: float
    nu_D: float
    nu_eta: float
    nu_eps0: float
    gamma1: float
    gamma_phi: float
    Gamma: float
    alpha: complex
    d_sites: int
    fock_dim: int
    n_steps: int
    m_phase: int

    def __post_init__(self):
        for name in ("gamma1", "gamma_phi", "Gamma"):
            if getattr(self, name) < 0:
                raise InvalidParameterError(f"rate {name} must be >= 0")
        if self.fock_dim < 2:
            raise InvalidParameterError("fock_dim must be >= 2")
        if self.d_sites < 2:
            raise InvalidParameterError("d_sites must be >= 2")
        if self.n_steps < 0:
            raise InvalidParameterError("n_steps must be >= 0")
        if self.m_phase < 1:
            raise InvalidParameterError("m_phase must be >= 1")
        # Truncation adequacy: |alpha|^2 within half the Fock space (rounded
        # up, so the stock alpha=3 / dim=17 combination is admitted).
        if abs(self.alpha) ** 2 > math.ceil(self.fock_dim / 2):
            raise InvalidParameterError(
                f"|alpha|^2 = {abs(self.alpha) ** 2:.3g} exceeds half the "
                f"Fock space (fock_dim = {self.fock_dim}); raise fock_dim"
            )
        if abs(self.alpha) ** 2 > self.fock_dim / 2:
            warnings.warn(
                "coherent amplitude sits at the edge of the truncation"
                f" budget (|alpha|^2 = {abs(self.alpha) ** 2:.3g},"
                f" fock_dim = {self.fock_dim})",
                TruncationWarning,
                stacklevel=2,
            )


@dataclass(frozen=True)
class DerivedParams:
    """Quantities computed from :class:`PhysicalParams`.

    Angular frequencies (Delta, chi, Omega_R, omega_d, delta_c, delta_d)
    are in rad/ns; nu_d is in GHz; t_H and t_p in ns.
    """

    Delta: float      # signed omega_D - omega_q
    chi: float        # dispersive shift, eta^2 / (omega_q - omega_D)
    Omega_R: float    # coin Rabi rate, 2 eta eps0 / (omega_q - omega_D)
    nu_d: float       # drive frequency omega_d / 2pi
    omega_d: float
    delta_c: float    # omega_d - omega_D
    delta_d: float    # omega_d - omega_q
    t_H: float        # coin-pulse duration
    t_p: float        # walk-step period 2pi / (|chi| d)
    n_bar: float      # |alpha|^2


def derive(p: PhysicalParams, use_omega_r0: bool = False) -> DerivedParams:
    """Compute the walk parameters from the physical ones.

    ``use_omega_r0`` switches the pulse-duration convention to the nominal
    Omega_R0 = 2pi*eps0/|Delta| instead of the coin-term coefficient
    2*eta*eps0/|Delta|; the latter is the default because it is the
    coefficient that actually multiplies sigma_x in the effective
    Hamiltonian.
    """
    w = TWO_PI
    omega_q = w * p.nu_q
    omega_D = w * p.nu_D
    eta = w * p.nu_eta
    eps0 = w * p.nu_eps0

    delta_qm = omega_q - omega_D
    if delta_qm == 0:
        raise InvalidParameterError("qubit and mode are resonant; no dispersive regime")
    Delta = -delta_qm
    if abs(Delta) < DISPERSIVE_RATIO_MIN * eta:
        warnings.warn(
            f"|Delta|/eta = {abs(Delta) / eta:.2f} < {DISPERSIVE_RATIO_MIN:g}: "
            "dispersive approximation is marginal",
            DispersiveRegimeWarning,
            stacklevel=2,
        )

    chi = eta**2 / delta_qm
    Omega_R = 2.0 * eta * eps0 / delta_qm

    n_bar = abs(p.alpha) ** 2
    omega_d = (2.0 * n_bar + 1.0) * chi + omega_q - Omega_R
    delta_c = omega_d - omega_D
    delta_d = omega_d - omega_q

    omega_p = abs(chi) * p.d_sites
    t_p = TWO_PI / omega_p
    rabi = TWO_PI * eps0 / abs(Delta) if use_omega_r0 else abs(Omega_R)
    if rabi == 0:
        raise ScheduleInfeasibleError("zero drive amplitude gives an infinite pulse")
    t_H = math.pi / (math.sqrt(2.0) * rabi)
    if t_H >= t_p:
        raise ScheduleInfeasibleError(
            f"coin pulse t_H = {t_H:.4g} ns does not fit in the step "
            f"period t_p = {t_p:.4g} ns"
        )

    return DerivedParams(
        Delta=Delta,
        chi=chi,
        Omega_R=Omega_R,
        nu_d=omega_d / w,
        omega_d=omega_d,
        delta_c=delta_c,
        delta_d=delta_d,
        t_H=t_H,
        t_p=t_p,
        n_bar=n_bar,
    )


def _composite_parts(fock_dim: int):
    c = ops.annihilation(fock_dim)
    idq = ops.identity(2)
    idb = ops.identity(fock_dim)
    q = ops.qubit_operators()
    raise_op, lower_op = ops.qubit_ladder()
    return c, idq, idb, q, raise_op, lower_op


def hamiltonian_rotframe(
    p: PhysicalParams, d: DerivedParams, drive_on: bool
) -> np.ndarray:
    """Rotating-frame Hamiltonian on the qubit (x) boson space.

    H = -delta_c c^dag c - (delta_d/2) sigma_z
        + eta (c^dag lower + c raise) + eps (c + c^dag)

    with eps = eps0 while the pulse is on and 0 otherwise.  This is the
    Hamiltonian propagated for all production dynamics.
    """
    c, idq, idb, q, raise_op, lower_op = _composite_parts(p.fock_dim)
    eta = TWO_PI * p.nu_eta
    eps = TWO_PI * p.nu_eps0 if drive_on else 0.0
    n_b = c.conj().T @ c
    h = (
        -d.delta_c * ops.tensor(idq, n_b)
        - 0.5 * d.delta_d * ops.tensor(q.sigma_z, idb)
        + eta * (ops.tensor(lower_op, c.conj().T) + ops.tensor(raise_op, c))
        + eps * ops.tensor(idq, c + c.conj().T)
    )
    return h


def hamiltonian_effective(
    p: PhysicalParams, d: DerivedParams, drive_on: bool
) -> np.ndarray:
    """Effective walk Hamiltonian after the dispersive transformation.

    H_eff = chi c^dag c sigma_z + (Omega_R/2) sigma_x + eps (c + c^dag)
            - delta_c c^dag c - (delta_d/2) sigma_z + (chi/2)(1 + sigma_z)

    Used for interpretation and for the canonical-transformation residual
    check only; production dynamics always use the rotating-frame form.
    The coin term and the drive are gated together by ``drive_on`` since
    both are proportional to the pulse amplitude.
    """
    c, idq, idb, q, _, _ = _composite_parts(p.fock_dim)
    eps = TWO_PI * p.nu_eps0 if drive_on else 0.0
    omega_r = d.Omega_R if drive_on else 0.0
    n_b = c.conj().T @ c
    h = (
        d.chi * ops.tensor(q.sigma_z, n_b)
        + 0.5 * omega_r * ops.tensor(q.sigma_x, idb)
        + eps * ops.tensor(idq, c + c.conj().T)
        - d.delta_c * ops.tensor(idq, n_b)
        - 0.5 * d.delta_d * ops.tensor(q.sigma_z, idb)
        + 0.5 * d.chi * (ops.tensor(idq, idb) + ops.tensor(q.sigma_z, idb))
    )
    return h


def coin_hamiltonian(d: DerivedParams) -> np.ndarray:
    """Coin generator (Omega_R/2)(sigma_x + sigma_z); a Hadamard at t = t_H."""
    q = ops.qubit_operators()
    return 0.5 * d.Omega_R * (q.sigma_x + q.sigma_z)


@dataclass(frozen=True)
class DissipatorSpec:
    """Lindblad channels as (rate, collapse operator) pairs.

    Rates are angular (rad/ns) and each multiplies
    D[x] rho = (2 x rho x^dag - x^dag x rho - rho x^dag x)/2; channels act
    on the composite qubit (x) boson space.
    """

    channels: tuple[tuple[float, np.ndarray], ...]


def dissipators(p: PhysicalParams) -> DissipatorSpec:
    """The three decay channels: mode decay, qubit relaxation, qubit dephasing."""
    for name in ("gamma1", "gamma_phi", "Gamma"):
        if getattr(p, name) < 0:
            raise InvalidParameterError(f"rate {name} must be >= 0")
    c, idq, idb, q, _, lower_op = _composite_parts(p.fock_dim)
    return DissipatorSpec(
        channels=(
            (TWO_PI * p.Gamma, ops.tensor(idq, c)),
            (TWO_PI * p.gamma1, ops.tensor(lower_op, idb)),
            (0.5 * TWO_PI * p.gamma_phi, ops.tensor(q.sigma_z, idb)),
        )
    )


@dataclass(frozen=True)
class Segment:
    step: int        # walk step this segment belongs to, 1-based
    t_start: float   # ns
    duration: float  # ns
    drive_on: bool


@dataclass(frozen=True)
class PulseSchedule:
    segments: tuple[Segment, ...]

    @property
    def total_duration(self) -> float:
        return sum(s.duration for s in self.segments)

    @property
    def n_steps(self) -> int:
        return max((s.step for s in self.segments), default=0)


def pulse_schedule(
    p: PhysicalParams, d: DerivedParams, drive_first: bool = True
) -> PulseSchedule:
    """Square-wave schedule: each step is a drive-on stretch of t_H and a
    drive-off stretch of t_p - t_H, coin toss first by default."""
    if d.t_H >= d.t_p:
        raise ScheduleInfeasibleError("t_H >= t_p")
    segments = []
    for k in range(p.n_steps):
        t0 = k * d.t_p
        on = Segment(k + 1, t0, d.t_H, True)
        off = Segment(k + 1, t0 + d.t_H, d.t_p - d.t_H, False)
        if drive_first:
            segments.extend([on, off])
        else:
            segments.extend(
                [
                    Segment(k + 1, t0, d.t_p - d.t_H, False),
                    Segment(k + 1, t0 + d.t_p - d.t_H, d.t_H, True),
                ]
            )
    return PulseSchedule(tuple(segments))


def initial_state(p: PhysicalParams) -> np.ndarray:
    """Pure initial density matrix: mode coherent, qubit in (|g> + i|e>)/sqrt(2)."""
    qubit = (ops.basis_state(2, 1) + 1j * ops.basis_state(2, 0)) / math.sqrt(2.0)
    psi = np.kron(qubit, ops.coherent_state(p.alpha, p.fock_dim))
    return np.outer(psi, psi.conj())


_BASE = PhysicalParams(
    nu_q=7.0,
    nu_D=2.87,
    nu_eta=0.1,
    nu_eps0=1.0,
    gamma1=0.02e-3,
    gamma_phi=0.31e-3,
    Gamma=0.1e-3,
    alpha=3.0 + 0.0j,
    d_sites=16,
    fock_dim=17,
    n_steps=8,
    m_phase=256,
)

# base:            weak-dissipation benchmark set.
# realistic:       collectively enhanced mode decay, compensated by a 10x
#                  stronger drive; qubit relaxation as in base.
# realistic_gamma1: same but with the qubit relaxation raised to the
#                  dephasing level.
_PRESETS: dict[str, PhysicalParams] = {
    "base": _BASE,
    "realistic": replace(_BASE, Gamma=2.78e-3, nu_eps0=10.0),
    "realistic_gamma1": replace(_BASE, Gamma=2.78e-3, nu_eps0=10.0, gamma1=0.31e-3),
}

PRESET_NAMES = tuple(_PRESETS)


def preset(name: str, **overrides) -> PhysicalParams:
    """Look up a named parameter set, optionally overriding fields."""
    try:
        base = _PRESETS[name]
    except KeyError:
        raise InvalidParameterError(
            f"unknown preset {name!r}; available: {', '.join(_PRESETS)}"
        ) from None
    return replace(base, **overrides) if overrides else base
