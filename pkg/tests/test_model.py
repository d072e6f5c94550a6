import math

import numpy as np
import numpy.testing as npt
import pytest
from scipy.linalg import expm

from magnonwalk import model
from magnonwalk import operators as ops
from magnonwalk.errors import (
    DispersiveRegimeWarning,
    InvalidParameterError,
    ScheduleInfeasibleError,
    TruncationWarning,
)

TWO_PI = 2 * math.pi

pytestmark = pytest.mark.filterwarnings("ignore::magnonwalk.errors.TruncationWarning")


@pytest.fixture(scope="module")
def base():
    p = model.preset("base")
    return p, model.derive(p)


class TestDerive:
    def test_detuning_magnitude(self, base):
        _, d = base
        assert abs(d.Delta) / TWO_PI == pytest.approx(4.13, abs=1e-12)
        assert d.Delta < 0

    def test_dispersive_parameters(self, base):
        # hand-recomputed: chi = eta^2/(omega_q - omega_D), t_p = 1/(d |nu_chi|),
        # t_H = 1/(2 sqrt(2) nu_OmegaR)
        _, d = base
        assert d.chi / TWO_PI * 1e3 == pytest.approx(2.4213, abs=5e-4)
        assert d.t_p == pytest.approx(25.8125, abs=5e-3)
        assert d.t_H == pytest.approx(7.30, abs=5e-3)

    def test_drive_frequency_condition(self, base):
        # nu_d = (2*9+1)*nu_chi + nu_q - nu_OmegaR with positive chi, Omega_R
        _, d = base
        assert d.nu_d == pytest.approx(6.9976, abs=5e-5)
        assert d.n_bar == pytest.approx(9.0)

    def test_scale_consistency(self):
        p = model.preset("base")
        d1 = model.derive(p)
        d2 = model.derive(model.preset("base", nu_eps0=2 * p.nu_eps0))
        assert d2.Omega_R == pytest.approx(2 * d1.Omega_R)
        assert d2.t_H == pytest.approx(d1.t_H / 2)
        assert d2.t_p == d1.t_p

    def test_omega_r0_convention_flag(self, base):
        p, d = base
        d_alt = model.derive(p, use_omega_r0=True)
        expected = 1.0 / (2 * math.sqrt(2) * p.nu_eps0 / 4.13)
        assert d_alt.t_H == pytest.approx(expected, rel=1e-12)
        assert d_alt.chi == d.chi

    def test_dispersive_warning(self):
        # eta large enough to break |Delta| >= 10 eta, drive raised to keep
        # the pulse inside the shrunken step period
        p = model.preset("base", nu_eta=0.5, nu_eps0=2.0)
        with pytest.warns(DispersiveRegimeWarning):
            model.derive(p)

    def test_infeasible_schedule(self):
        with pytest.raises(ScheduleInfeasibleError):
            model.derive(model.preset("base", nu_eps0=1e-4))


class TestPhysicalParams:
    def test_negative_rate_rejected(self):
        with pytest.raises(InvalidParameterError):
            model.preset("base", Gamma=-1e-4)

    def test_truncation_budget_rejected(self):
        with pytest.raises(InvalidParameterError):
            model.preset("base", alpha=4.0)

    def test_tight_truncation_warns(self):
        with pytest.warns(TruncationWarning):
            model.PhysicalParams(
                nu_q=7.0, nu_D=2.87, nu_eta=0.1, nu_eps0=1.0,
                gamma1=0.0, gamma_phi=0.0, Gamma=0.0,
                alpha=3.0, d_sites=16, fock_dim=17, n_steps=1, m_phase=256,
            )

    def test_unknown_preset(self):
        with pytest.raises(InvalidParameterError):
            model.preset("nonsense")

    def test_realistic_preset_values(self):
        p = model.preset("realistic")
        assert p.Gamma == pytest.approx(2.78e-3)
        assert p.nu_eps0 == pytest.approx(10.0)
        assert p.gamma1 == pytest.approx(0.02e-3)
        alt = model.preset("realistic_gamma1")
        assert alt.gamma1 == pytest.approx(0.31e-3)


class TestRotatingFrameHamiltonian:
    def test_decoupled_limit_is_diagonal(self, base):
        p, d = base
        p0 = model.preset("base", nu_eta=1e-9)  # eta ~ 0 keeps derive finite
        h = model.hamiltonian_rotframe(p0, d, drive_on=False)
        off_diag = h - np.diag(np.diag(h))
        assert np.linalg.norm(off_diag) < 1e-6
        # eigenvalues -delta_c n -+ delta_d / 2
        n = np.arange(p.fock_dim)
        expected = np.concatenate(
            [-d.delta_c * n - d.delta_d / 2, -d.delta_c * n + d.delta_d / 2]
        )
        npt.assert_allclose(np.sort(np.diag(h).real), np.sort(expected), atol=1e-6)

    def test_excitation_conservation_drive_off(self, base):
        p, d = base
        h = model.hamiltonian_rotframe(p, d, drive_on=False)
        q = ops.qubit_operators()
        n_tot = ops.tensor(ops.identity(2), ops.number_op(p.fock_dim)) + 0.5 * (
            ops.tensor(q.sigma_z, ops.identity(p.fock_dim))
        )
        npt.assert_allclose(h @ n_tot - n_tot @ h, 0, atol=1e-10)

    def test_hermitian(self, base):
        p, d = base
        for flag in (True, False):
            h = model.hamiltonian_rotframe(p, d, flag)
            assert ops.is_hermitian(h, tol=1e-12)
            assert np.isfinite(np.linalg.norm(h))

    def test_drive_gating(self, base):
        p, d = base
        diff = model.hamiltonian_rotframe(p, d, True) - model.hamiltonian_rotframe(
            p, d, False
        )
        c = ops.annihilation(p.fock_dim)
        expected = TWO_PI * p.nu_eps0 * ops.tensor(ops.identity(2), c + c.conj().T)
        npt.assert_allclose(diff, expected, atol=1e-12)


class TestEffectiveHamiltonian:
    def test_number_conservation_without_drive_and_detunings(self, base):
        p, d = base
        d0 = model.DerivedParams(
            Delta=d.Delta, chi=d.chi, Omega_R=0.0, nu_d=0.0, omega_d=0.0,
            delta_c=0.0, delta_d=0.0, t_H=d.t_H, t_p=d.t_p, n_bar=d.n_bar,
        )
        h = model.hamiltonian_effective(p, d0, drive_on=False)
        n_b = ops.tensor(ops.identity(2), ops.number_op(p.fock_dim))
        npt.assert_allclose(h @ n_b - n_b @ h, 0, atol=1e-12)

    def test_coin_block_gap(self, base):
        # at Omega_R = 0 the qubit splitting at Fock level n is
        # 2|chi n + chi/2 - delta_d/2|
        p, d = base
        d0 = model.DerivedParams(
            Delta=d.Delta, chi=d.chi, Omega_R=0.0, nu_d=d.nu_d, omega_d=d.omega_d,
            delta_c=0.0, delta_d=d.delta_d, t_H=d.t_H, t_p=d.t_p, n_bar=d.n_bar,
        )
        h = model.hamiltonian_effective(p, d0, drive_on=False)
        for n in (0, 3, 9):
            gap = abs(h[n, n] - h[p.fock_dim + n, p.fock_dim + n]).real
            expected = 2 * abs(d.chi * n + d.chi / 2 - d.delta_d / 2)
            assert gap == pytest.approx(expected, rel=1e-10)

    def test_hermitian(self, base):
        p, d = base
        assert ops.is_hermitian(model.hamiltonian_effective(p, d, True), 1e-12)


class TestCoinHamiltonian:
    def test_eigenvalues(self, base):
        _, d = base
        evals = np.linalg.eigvalsh(model.coin_hamiltonian(d))
        npt.assert_allclose(
            evals, [-d.Omega_R / math.sqrt(2), d.Omega_R / math.sqrt(2)], rtol=1e-12
        )

    def test_hadamard_gate_at_t_h(self, base):
        _, d = base
        u = expm(-1j * model.coin_hamiltonian(d) * d.t_H)
        hadamard = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
        fidelity = abs(np.trace(u.conj().T @ hadamard)) / 2
        assert fidelity > 1 - 1e-6

    def test_zero_rabi_is_identity(self, base):
        _, d = base
        d0 = model.DerivedParams(
            Delta=d.Delta, chi=d.chi, Omega_R=0.0, nu_d=d.nu_d, omega_d=d.omega_d,
            delta_c=d.delta_c, delta_d=d.delta_d, t_H=d.t_H, t_p=d.t_p, n_bar=d.n_bar,
        )
        u = expm(-1j * model.coin_hamiltonian(d0) * 12.3)
        npt.assert_allclose(u, np.eye(2), atol=1e-14)


class TestDissipators:
    def test_base_rates(self, base):
        p, _ = base
        spec = model.dissipators(p)
        rates = [r for r, _ in spec.channels]
        assert rates[0] == pytest.approx(TWO_PI * 0.1e-3)   # mode decay
        assert rates[1] == pytest.approx(TWO_PI * 0.02e-3)  # qubit relaxation
        assert rates[2] == pytest.approx(TWO_PI * 0.31e-3 / 2)  # dephasing / 2

    def test_channels_annihilate_targets(self, base):
        p, _ = base
        spec = model.dissipators(p)
        vac = np.kron(ops.basis_state(2, 1), ops.basis_state(p.fock_dim, 0))
        for _, x in spec.channels[:2]:
            assert np.linalg.norm(x @ vac) < 1e-14

    def test_zero_rates_allowed(self):
        p = model.preset("base", gamma1=0.0, gamma_phi=0.0, Gamma=0.0)
        spec = model.dissipators(p)
        assert all(r == 0 for r, _ in spec.channels)


class TestPulseSchedule:
    def test_eight_steps_contract(self, base):
        p, d = base
        sched = model.pulse_schedule(p, d)
        assert len(sched.segments) == 16
        assert sched.total_duration == pytest.approx(8 * d.t_p, rel=1e-12)
        assert round(sched.total_duration, 1) == 206.5
        assert sched.segments[0].drive_on
        assert sched.segments[0].t_start == 0.0

    def test_segments_tile_without_gaps(self, base):
        p, d = base
        sched = model.pulse_schedule(p, d)
        t = 0.0
        for seg in sched.segments:
            assert seg.t_start == pytest.approx(t, rel=1e-12, abs=1e-12)
            t = seg.t_start + seg.duration
        assert t == pytest.approx(8 * d.t_p, rel=1e-12)

    def test_realistic_pulse_scales_inversely_with_drive(self):
        d = model.derive(model.preset("realistic"))
        assert d.t_H == pytest.approx(0.73, abs=5e-4)

    def test_zero_steps(self, base):
        p, d = base
        sched = model.pulse_schedule(model.preset("base", n_steps=0), d)
        assert sched.segments == ()
        assert sched.n_steps == 0

    def test_shift_first_ordering(self, base):
        p, d = base
        sched = model.pulse_schedule(p, d, drive_first=False)
        assert not sched.segments[0].drive_on
        assert sched.segments[1].drive_on
        assert sched.total_duration == pytest.approx(8 * d.t_p, rel=1e-12)


class TestInitialState:
    def test_pure_unit_trace(self, base):
        p, _ = base
        rho = model.initial_state(p)
        assert np.trace(rho).real == pytest.approx(1.0, abs=1e-12)
        assert np.trace(rho @ rho).real == pytest.approx(1.0, abs=1e-12)

    def test_equal_qubit_populations(self, base):
        p, _ = base
        rho = model.initial_state(p)
        f = p.fock_dim
        p_e = np.trace(rho[:f, :f]).real
        p_g = np.trace(rho[f:, f:]).real
        assert p_e == pytest.approx(0.5, abs=1e-12)
        assert p_g == pytest.approx(0.5, abs=1e-12)

    def test_vacuum_amplitude_gives_zero_occupation(self):
        p = model.preset("base", alpha=0.0)
        rho = model.initial_state(p)
        n_op = ops.tensor(ops.identity(2), ops.number_op(p.fock_dim))
        assert abs(np.trace(rho @ n_op)) < 1e-14
