import numpy as np
import pytest

import itoalg as ia
from itoalg.core import rel_residual
from itoalg.focksim import (
    MemoryCapError,
    UnsupportedModelError,
    classical_paths,
    fit_loglog_slope,
    ito_product_check,
    slot_increment,
    vacuum_moments,
)
from itoalg.gns import build_representation


def dense_moments(rep, a, t, n_slots):
    """Oracle: moments from the full Kronecker tensor product of slot spaces."""
    d = rep.hdim
    M = slot_increment(rep, a, t / n_slots).matrix
    Ms = slot_increment(rep, a.star(), t / n_slots).matrix
    dim = (1 + d) ** n_slots
    lam = np.zeros((dim, dim), dtype=complex)
    lam_star = np.zeros((dim, dim), dtype=complex)
    for j in range(n_slots):
        op, ops = np.eye(1), np.eye(1)
        for k in range(n_slots):
            op = np.kron(op, M if k == j else np.eye(1 + d))
            ops = np.kron(ops, Ms if k == j else np.eye(1 + d))
        lam += op
        lam_star += ops
    vac = np.zeros(dim, dtype=complex)
    vac[0] = 1.0
    psi1 = lam @ vac
    psi2 = lam_star @ psi1
    return complex(vac @ psi1), float(np.vdot(psi1, psi1).real), float(np.vdot(psi2, psi2).real)


class TestSlotIncrement:
    def test_death_slot_is_corner_only(self):
        p = ia.poisson()
        rep = build_representation(p)
        si = slot_increment(rep, p.death_element(), 0.25)
        expect = np.zeros((2, 2))
        expect[0, 0] = 0.25
        assert rel_residual(si.matrix, expect) <= 1e-12
        assert si.vacuum_expectation == pytest.approx(0.25)

    def test_wiener_scaling(self):
        w = ia.wiener()
        rep = build_representation(w)
        si = slot_increment(rep, w.basis_element("dw"), 0.01)
        assert abs(si.matrix[0, 1]) == pytest.approx(0.1)
        assert abs(si.matrix[1, 0]) == pytest.approx(0.1)
        assert si.matrix[0, 0] == 0 and si.matrix[1, 1] == 0

    def test_adjoint_covariance(self):
        h = ia.hp(1)
        rep = build_representation(h)
        si_minus = slot_increment(rep, h.basis_element("e-"), 0.5)
        si_plus = slot_increment(rep, h.basis_element("e+"), 0.5)
        assert rel_residual(si_minus.adjoint().matrix, si_plus.matrix) <= 1e-12

    def test_adjoint_covariance_random(self, faithful_catalog):
        rng = np.random.default_rng(4)
        for alg in faithful_catalog.values():
            rep = build_representation(alg)
            a = ia.core.random_element(alg, rng)
            lhs = slot_increment(rep, a, 0.1).matrix.conj().T
            rhs = slot_increment(rep, a.star(), 0.1).matrix
            assert rel_residual(lhs, rhs) <= 1e-10

    def test_linearity(self):
        w = ia.wiener()
        rep = build_representation(w)
        a, b = w.basis_element("dt"), w.basis_element("dw")
        lhs = slot_increment(rep, a + 2 * b, 0.3).matrix
        rhs = slot_increment(rep, a, 0.3).matrix + 2 * slot_increment(rep, b, 0.3).matrix
        assert rel_residual(lhs, rhs) <= 1e-12


class TestItoProductCheck:
    DTS = [2.0**-k for k in range(4, 11)]

    def test_wiener_corner_exact(self):
        w = ia.wiener()
        rep = build_representation(w)
        dw = w.basis_element("dw")
        rpt = ito_product_check(rep, dw, dw, self.DTS)
        for est in rpt.estimates:
            # l(dw) = 0 kills the corner and both field-block mismatches;
            # only the exchange block records its dt-order term
            if est.name.startswith("exchange"):
                assert est.value == pytest.approx(est.target, abs=1e-14)
            else:
                assert est.value == pytest.approx(0.0, abs=1e-14)
        assert "corner" not in rpt.slopes
        assert rpt.slopes["exchange"] == pytest.approx(1.0, abs=1e-6)

    def test_hp_exchange_idempotent(self):
        h = ia.hp(1)
        rep = build_representation(h)
        e = h.basis_element("e")
        rpt = ito_product_check(rep, e, e, self.DTS)
        assert all(est.value == pytest.approx(0.0, abs=1e-14) for est in rpt.estimates)
        assert rpt.slopes == {}  # every block matches exactly

    def test_poisson_slopes_for_shifted_element(self):
        p = ia.poisson()
        rep = build_representation(p)
        a = p.basis_element("dt") + p.basis_element("dm")
        rpt = ito_product_check(rep, a, a, self.DTS)
        assert 1.8 <= rpt.slopes["corner"] <= 2.2
        assert rpt.slopes["creation"] == pytest.approx(1.5, abs=1e-6)
        assert rpt.slopes["annihilation"] == pytest.approx(1.5, abs=1e-6)
        assert rpt.slopes["exchange"] == pytest.approx(1.0, abs=1e-6)

    def test_poisson_zero_mean_has_zero_corner(self):
        p = ia.poisson()
        rep = build_representation(p)
        dm = p.basis_element("dm")
        rpt = ito_product_check(rep, dm, dm, self.DTS)
        assert rpt.estimates[0].value == pytest.approx(0.0, abs=1e-14)

    def test_requires_decreasing_dts(self):
        p = ia.poisson()
        rep = build_representation(p)
        dm = p.basis_element("dm")
        with pytest.raises(ia.AlgebraError):
            ito_product_check(rep, dm, dm, [0.1, 0.2])


class TestVacuumMoments:
    def test_death_deterministic(self):
        w = ia.wiener()
        rep = build_representation(w)
        for N in (1, 2, 7, 64):
            rpt = vacuum_moments(rep, w.death_element(), 2.0, N)
            assert rpt.estimate("mean").value == pytest.approx(2.0, abs=1e-12)
            assert rpt.estimate("second_moment").value == pytest.approx(4.0, abs=1e-12)

    def test_wiener_second_moment_exact_every_n(self):
        w = ia.wiener()
        rep = build_representation(w)
        for N in (2, 4, 8, 16, 32, 64):
            rpt = vacuum_moments(rep, w.basis_element("dw"), 1.0, N)
            assert rpt.estimate("second_moment").value == pytest.approx(1.0, abs=1e-13)

    def test_poisson_second_moment_exact_every_n(self):
        # the slot model reproduces l(a*.a) t exactly; only the fourth moment
        # carries discretization error
        p = ia.poisson()
        rep = build_representation(p)
        for N in (2, 8, 64):
            rpt = vacuum_moments(rep, p.basis_element("dm"), 1.0, N)
            assert rpt.estimate("second_moment").value == pytest.approx(1.0, abs=1e-13)
            assert abs(rpt.estimate("second_moment_deviation").value) <= 1e-13

    def test_mean_identity_exact_all_builtins(self, faithful_catalog):
        for alg in faithful_catalog.values():
            rep = build_representation(alg)
            for i in range(alg.dim):
                a = alg.basis_element(i)
                target = ia.state_of(a) * 1.3
                for N in (2, 5, 64):
                    rpt = vacuum_moments(rep, a, 1.3, N)
                    assert abs(rpt.estimate("mean").value - target) <= 1e-12

    @pytest.mark.parametrize("n_slots", [2, 3, 4])
    def test_matches_dense_oracle_poisson(self, n_slots):
        p = ia.poisson()
        rep = build_representation(p)
        a = p.element_from({"dt": 0.5, "dm": 1.0})
        mean, second, fourth = dense_moments(rep, a, 1.0, n_slots)
        rpt = vacuum_moments(rep, a, 1.0, n_slots)
        assert rpt.estimate("mean").value == pytest.approx(mean, abs=1e-12)
        assert rpt.estimate("second_moment").value == pytest.approx(second, abs=1e-12)
        assert rpt.estimate("fourth_moment").value == pytest.approx(fourth, abs=1e-12)

    @pytest.mark.parametrize("n_slots", [2, 3])
    def test_matches_dense_oracle_hp(self, n_slots):
        h = ia.hp(1)
        rep = build_representation(h)
        rng = np.random.default_rng(8)
        a = ia.core.random_element(h, rng)
        mean, second, fourth = dense_moments(rep, a, 0.7, n_slots)
        rpt = vacuum_moments(rep, a, 0.7, n_slots)
        assert rpt.estimate("mean").value == pytest.approx(mean, abs=1e-10)
        assert rpt.estimate("second_moment").value == pytest.approx(second, abs=1e-10)
        assert rpt.estimate("fourth_moment").value == pytest.approx(fourth, abs=1e-10)

    def test_fourth_moment_poisson_closed_form(self):
        # compensated Poisson at t=1 has E[m^4] = 3t^2 + t = 4; the N-slot
        # model gives 4 - 2/N (classical moment identity as the oracle)
        p = ia.poisson()
        rep = build_representation(p)
        for N in (2, 4, 8, 32):
            rpt = vacuum_moments(rep, p.basis_element("dm"), 1.0, N)
            assert rpt.estimate("fourth_moment").value == pytest.approx(4.0 - 2.0 / N, abs=1e-12)
            assert rpt.estimate("fourth_moment").target == pytest.approx(4.0, abs=1e-12)

    def test_fourth_moment_wiener_closed_form(self):
        # E[w^4] = 3 t^2 at t = 1
        w = ia.wiener()
        rep = build_representation(w)
        for N in (2, 8, 32):
            rpt = vacuum_moments(rep, w.basis_element("dw"), 1.0, N)
            assert rpt.estimate("fourth_moment").value == pytest.approx(3.0 - 2.0 / N, abs=1e-12)
            assert rpt.estimate("fourth_moment").target == pytest.approx(3.0, abs=1e-12)

    def test_fourth_moment_converges_at_first_order(self):
        p = ia.poisson()
        rep = build_representation(p)
        ns = np.array([4, 8, 16, 32, 64])
        devs = []
        for N in ns:
            rpt = vacuum_moments(rep, p.basis_element("dm"), 1.0, int(N))
            devs.append(abs(rpt.estimate("fourth_moment_deviation").value))
        slope = fit_loglog_slope(1.0 / ns, devs)
        assert 0.9 <= slope <= 1.1

    def test_memory_cap(self):
        h = ia.hp(3)
        rep = build_representation(h)
        with pytest.raises(MemoryCapError):
            vacuum_moments(rep, h.basis_element("e+_1"), 1.0, 10**6)


class TestClassicalPaths:
    def test_wiener_variance(self):
        rpt = classical_paths(ia.wiener(), t=1.0, dt=0.01, n_paths=20000, seed=123)
        var = rpt.estimate("var[dw]")
        assert abs(var.value - 1.0) <= 3 * var.stderr

    def test_poisson_compensated_mean(self):
        rpt = classical_paths(ia.poisson(), t=1.0, dt=0.01, n_paths=20000, seed=5)
        mean = rpt.estimate("mean[dm]")
        assert abs(mean.value) <= 3 * mean.stderr
        var = rpt.estimate("var[dm]")
        assert abs(var.value - 1.0) <= 3 * var.stderr

    def test_cross_moment_vanishes_on_sum(self):
        s = ia.orthogonal_sum(ia.wiener(), ia.poisson())
        rpt = classical_paths(s, t=1.0, dt=0.01, n_paths=20000, seed=7)
        cov = rpt.estimate("cov[dw,dm]")
        assert abs(cov.value) <= 3 * cov.stderr
        auto = rpt.estimate("cov[dw,dw]")
        assert abs(auto.value - 1.0) <= 3 * auto.stderr

    def test_noncommutative_rejected(self):
        with pytest.raises(UnsupportedModelError):
            classical_paths(ia.hp(1), 1.0, 0.01, 100, 0)

    def test_thermal_matrix_rejected(self):
        # commutative check fails first for n >= 2; n = 1 has a Levy component
        with pytest.raises(UnsupportedModelError):
            classical_paths(ia.thermal_matrix(2, (0.5, 0.5)), 1.0, 0.01, 100, 0)

    def test_newton_smooth_only(self):
        rpt = classical_paths(ia.newton(), t=1.0, dt=0.1, n_paths=100, seed=0)
        assert rpt.estimates == []

    def test_reproducible_with_seed(self):
        r1 = classical_paths(ia.wiener(), 1.0, 0.05, 500, seed=11)
        r2 = classical_paths(ia.wiener(), 1.0, 0.05, 500, seed=11)
        assert [e.value for e in r1.estimates] == [e.value for e in r2.estimates]
        assert r1.seed == 11

    def test_monte_carlo_rate(self):
        # stderr of the variance estimate shrinks like 1/sqrt(n_paths)
        ns = [1000, 10000, 100000]
        ses = []
        for n in ns:
            rpt = classical_paths(ia.wiener(), 1.0, 0.1, n, seed=3)
            ses.append(rpt.estimate("var[dw]").stderr)
        slope = fit_loglog_slope(ns, ses)
        assert -0.6 <= slope <= -0.4

    def test_report_json_fields(self):
        rpt = classical_paths(ia.wiener(), 1.0, 0.1, 200, seed=1)
        d = rpt.to_dict()
        assert set(d) == {"kind", "inputs", "seed", "estimates", "slopes", "runtime_ms"}
        assert all(set(e) == {"name", "value", "stderr", "target"} for e in d["estimates"])
