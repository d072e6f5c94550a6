"""Lindblad master-equation propagation through the piecewise-constant
pulse schedule.

Vectorization convention
------------------------
Density matrices are column-stacked: vec(A rho B) = (B^T kron A) vec(rho).
The Liouvillian for dρ/dt = -i[H, rho] + sum_k gamma_k D[x_k] rho is then

    L = -i (1 kron H - H^T kron 1)
        + sum_k gamma_k [ conj(x_k) kron x_k
                          - 1/2 (1 kron x_k^dag x_k + (x_k^dag x_k)^T kron 1) ]

Within one schedule segment the Hamiltonian is constant (square-wave
drive), so exp(L dt) propagates exactly up to floating point; this is the
default method.  A fixed-step RK4 integrator is provided as an
independent cross-check.  For a linear constant-coefficient system RK4
reduces to multiplying by the degree-4 Taylor polynomial of exp(L h),
which preserves the trace identically because vec(1)^T L = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.linalg import expm

from .errors import DimensionError, NumericalFailureError
from .model import DissipatorSpec, PulseSchedule
from .observables import mean_number, qubit_populations

__all__ = [
    "DT_MAX_DEFAULT",
    "liouvillian",
    "vec",
    "unvec",
    "propagator",
    "propagate",
    "Trajectory",
    "evolve",
]

# RK4 sub-step ceiling (ns).  The spectral radius of the Liouvillians here
# is a few hundred rad/ns, and RK4's imaginary-axis stability interval is
# 2*sqrt(2), so sub-steps must stay around 1e-3 ns.
DT_MAX_DEFAULT = 1e-3

TRACE_RENORM_THRESHOLD = 1e-10
POSITIVITY_FLOOR = -1e-5


def vec(rho: np.ndarray) -> np.ndarray:
    """Column-stack a matrix."""
    return rho.reshape(-1, order="F")


def unvec(v: np.ndarray, dim: int) -> np.ndarray:
    return v.reshape((dim, dim), order="F")


def liouvillian(H: np.ndarray, diss: DissipatorSpec) -> sp.csr_matrix:
    """Sparse Liouvillian acting on column-vectorized density matrices."""
    dim = H.shape[0]
    if H.shape != (dim, dim):
        raise DimensionError("Hamiltonian must be square")
    eye = sp.identity(dim, dtype=complex, format="csr")
    Hs = sp.csr_matrix(H)
    L = -1j * (sp.kron(eye, Hs) - sp.kron(Hs.T, eye))
    for rate, x in diss.channels:
        if x.shape != (dim, dim):
            raise DimensionError(
                f"dissipator channel shape {x.shape} does not match dim {dim}"
            )
        if rate == 0.0:
            continue
        xs = sp.csr_matrix(x)
        xdx = sp.csr_matrix(x.conj().T @ x)
        L = L + rate * (
            sp.kron(xs.conjugate(), xs)
            - 0.5 * (sp.kron(eye, xdx) + sp.kron(xdx.T, eye))
        )
    return sp.csr_matrix(L)


def propagator(L, dt: float) -> np.ndarray:
    """Dense exp(L dt) by scaling and squaring."""
    Ld = L.toarray() if sp.issparse(L) else np.asarray(L)
    return expm(Ld * dt)


def _rk4_advance(v: np.ndarray, L, dt: float, dt_max: float) -> np.ndarray:
    n_sub = max(1, math.ceil(dt / dt_max))
    h = dt / n_sub
    for _ in range(n_sub):
        k1 = L @ v
        k2 = L @ (v + 0.5 * h * k1)
        k3 = L @ (v + 0.5 * h * k2)
        k4 = L @ (v + h * k3)
        v = v + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return v


def _condition(rho: np.ndarray) -> np.ndarray:
    """Re-hermitize, renormalize drifting trace, and police positivity."""
    rho = 0.5 * (rho + rho.conj().T)
    tr = np.trace(rho).real
    if abs(tr - 1.0) > TRACE_RENORM_THRESHOLD:
        if abs(tr) < 1e-6:
            raise NumericalFailureError(f"state trace collapsed to {tr:.3e}")
        rho = rho / tr
    min_eig = np.linalg.eigvalsh(rho)[0]
    if min_eig < POSITIVITY_FLOOR:
        raise NumericalFailureError(
            f"density matrix lost positivity (min eigenvalue {min_eig:.3e})"
        )
    return rho


def propagate(
    rho: np.ndarray,
    L,
    dt: float,
    method: str = "expm",
    dt_max: float = DT_MAX_DEFAULT,
) -> np.ndarray:
    """Advance a density matrix by dt under a constant Liouvillian."""
    if dt < 0:
        raise ValueError(f"dt must be >= 0, got {dt}")
    if dt == 0:
        return rho.copy()
    dim = rho.shape[0]
    v = vec(rho.astype(complex))
    if method == "expm":
        v = propagator(L, dt) @ v
    elif method == "rk4":
        v = _rk4_advance(v, L, dt, dt_max)
    else:
        raise ValueError(f"unknown method {method!r}; use 'expm' or 'rk4'")
    return _condition(unvec(v, dim))


@dataclass
class Trajectory:
    """Sampled observables plus per-step state snapshots.

    ``times`` are strictly increasing and include the t=0 sample;
    ``snapshots`` holds one (step, time, rho) triple per completed walk
    step when snapshots are enabled.
    """

    times: np.ndarray
    n_c: np.ndarray
    p_e: np.ndarray
    p_g: np.ndarray
    drive_on: np.ndarray  # bool per sample
    trace_err: np.ndarray
    snapshots: list[tuple[int, float, np.ndarray]] = field(default_factory=list)


def evolve(
    schedule: PulseSchedule,
    rho0: np.ndarray,
    H_on: np.ndarray,
    H_off: np.ndarray,
    diss: DissipatorSpec,
    samples_per_segment: int = 10,
    method: str = "expm",
    dt_max: float = DT_MAX_DEFAULT,
    keep_snapshots: bool = True,
) -> Trajectory:
    """Propagate through the schedule, sampling observables on the way.

    Each segment uses the Liouvillian built from H_on or H_off and is
    subdivided into ``samples_per_segment`` equal sub-intervals; the state
    is recorded after each one.  exp(L dt) propagators are cached per
    (drive flag, sub-interval) pair, so a run costs two matrix
    exponentials regardless of step count.
    """
    if samples_per_segment < 1:
        raise ValueError("samples_per_segment must be >= 1")
    liouvillians = {True: None, False: None}

    def get_liouvillian(flag: bool):
        if liouvillians[flag] is None:
            liouvillians[flag] = liouvillian(H_on if flag else H_off, diss)
        return liouvillians[flag]

    propagators: dict[tuple[bool, float], np.ndarray] = {}
    dim = rho0.shape[0]
    rho = _condition(rho0.astype(complex))

    first_flag = schedule.segments[0].drive_on if schedule.segments else False
    times = [0.0]
    n_c = [mean_number(rho)]
    p_e_list, p_g_list = [], []
    pe, pg = qubit_populations(rho)
    p_e_list.append(pe)
    p_g_list.append(pg)
    flags = [first_flag]
    trace_err = [abs(np.trace(rho).real - 1.0)]
    snapshots: list[tuple[int, float, np.ndarray]] = []

    n_segments = len(schedule.segments)
    for i, seg in enumerate(schedule.segments):
        dt_sub = seg.duration / samples_per_segment
        L = get_liouvillian(seg.drive_on)
        if method == "expm":
            key = (seg.drive_on, dt_sub)
            if key not in propagators:
                propagators[key] = propagator(L, dt_sub)
            P = propagators[key]
        for j in range(samples_per_segment):
            try:
                if method == "expm":
                    rho = _condition(unvec(P @ vec(rho), dim))
                else:
                    rho = propagate(rho, L, dt_sub, method=method, dt_max=dt_max)
            except NumericalFailureError as exc:
                raise NumericalFailureError(
                    f"propagation failed in segment {i} (step {seg.step}): {exc}"
                ) from exc
            times.append(seg.t_start + (j + 1) * dt_sub)
            n_c.append(mean_number(rho))
            pe, pg = qubit_populations(rho)
            p_e_list.append(pe)
            p_g_list.append(pg)
            flags.append(seg.drive_on)
            trace_err.append(abs(np.trace(rho).real - 1.0))
        last_of_step = i + 1 == n_segments or schedule.segments[i + 1].step != seg.step
        if keep_snapshots and last_of_step:
            snapshots.append((seg.step, seg.t_start + seg.duration, rho.copy()))

    return Trajectory(
        times=np.asarray(times),
        n_c=np.asarray(n_c),
        p_e=np.asarray(p_e_list),
        p_g=np.asarray(p_g_list),
        drive_on=np.asarray(flags, dtype=bool),
        trace_err=np.asarray(trace_err),
        snapshots=snapshots,
    )
