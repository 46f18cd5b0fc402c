import math

import numpy as np
import pytest

from qfdiv import convex_core as cc
from qfdiv import fisher_info as fi
from qfdiv.matrix_calc import DensityOperator


def jet(family, eta, h=1e-6):
    rho = family(eta)
    drho = (family(eta + h) - family(eta - h)) / (2 * h)
    return fi.StatePair1Jet(DensityOperator(rho), drho)


def test_sld_solves_defining_equation():
    j = jet(fi.rank2_in_3d, 0.2)
    lmat = fi.sld(j)
    rho = j.rho.matrix
    assert np.allclose(0.5 * (lmat @ rho + rho @ lmat), j.drho, atol=1e-8)
    assert np.allclose(lmat, lmat.conj().T)


def test_binary_mixture_fisher():
    c = fi.sld_components(jet(fi.binary_mixture, 0.3))
    assert c.J_S == pytest.approx(1 / 0.3 + 1 / 0.7, rel=1e-8)
    assert c.J2 == 0.0


def test_pure_qubit_fisher():
    # |phi_eta> = cos eta |0> + sin eta |1> has SLD Fisher information 4.
    c = fi.sld_components(jet(fi.rotating_qubit(1.0), 0.4))
    assert c.J1 == pytest.approx(0.0, abs=1e-8)
    assert c.J2 == pytest.approx(4.0, rel=1e-7)
    assert c.J_S == pytest.approx(c.J1 + c.J2, rel=1e-10)


def test_literal_j2_vanishes():
    c = fi.sld_components(jet(fi.rank2_in_3d, 0.1))
    assert abs(c.J2_literal) < 1e-12
    assert c.J2 > 0.1
    assert c.J_S == pytest.approx(c.J1 + c.J2, rel=1e-10)


def test_rank_change_rejected():
    rho = DensityOperator(np.diag([1.0, 0.0]))
    with pytest.raises(fi.RankChangeError):
        fi.sld(fi.StatePair1Jet(rho, np.diag([-1.0, 1.0])))


def test_drho_must_be_traceless():
    with pytest.raises(Exception, match="traceless"):
        fi.StatePair1Jet(DensityOperator(np.eye(2) / 2), np.eye(2))


def test_full_rank_expansion_mixed_qubit():
    rep = fi.second_order_check(cc.renyi(2.0), fi.BUILTIN_FAMILIES["mixed-rotating-qubit"], 0.3)
    assert rep.lhs == pytest.approx(rep.rhs, rel=1e-4)
    assert rep.rhs == pytest.approx(0.5 * 2.0 * rep.J_S, rel=1e-12)


def test_rank_deficient_expansion_beats_naive_prediction():
    rep = fi.second_order_check(cc.renyi(0.3), fi.rank2_in_3d, 0.2)
    assert rep.gap <= 1e-4 * abs(rep.rhs)
    assert abs(rep.naive - rep.rhs) >= 0.1 * abs(rep.rhs)


def test_pure_family_expansion_uses_kernel_term():
    f = cc.renyi(0.3)
    rep = fi.second_order_check(f, fi.rotating_qubit(1.0), 0.5)
    # J1 = 0 and J2 = 4, so the bracket is (f'(1) - f(1) + f(0)) / 4 * 4
    c2 = float(f.f_prime_right_at(1.0)) - float(f.f_at(1.0)) + f.f_at_zero
    assert rep.rhs == pytest.approx(c2, rel=1e-6)
    assert rep.lhs == pytest.approx(rep.rhs, rel=1e-4)


def test_fb_full_rank_and_rejected_on_pure_family():
    rep = fi.second_order_check(cc.fb(), fi.BUILTIN_FAMILIES["mixed-rotating-qubit"], 0.3)
    assert rep.lhs == pytest.approx(rep.rhs, rel=1e-4)
    with pytest.raises(fi.HypothesisError):
        fi.second_order_check(cc.fb(), fi.rotating_qubit(1.0), 0.5)


def test_hypothesis_errors():
    with pytest.raises(fi.HypothesisError):
        fi.second_order_check(cc.kl(), fi.rotating_qubit(1.0), 0.3)
    with pytest.raises(fi.HypothesisError):
        fi.second_order_check(cc.tv(), fi.binary_mixture, 0.3)


def test_samples_variant_matches_family_variant():
    fam = fi.rank2_in_3d
    h = 1e-3
    a = fi.second_order_from_samples(cc.renyi(0.3), fam(0.2 - h), fam(0.2), fam(0.2 + h), h)
    b = fi.second_order_check(cc.renyi(0.3), fam, 0.2)
    assert a.rhs == pytest.approx(b.rhs, rel=1e-5)
    assert a.lhs == pytest.approx(b.lhs, rel=1e-4)


def test_builtin_families_are_states():
    for fam in fi.BUILTIN_FAMILIES.values():
        rho = fam(0.25)
        assert np.trace(rho).real == pytest.approx(1.0)
        assert np.linalg.eigvalsh(rho)[0] >= -1e-12
    assert math.isclose(fi.rank2_in_3d(0.0)[2, 2].real, 0.0, abs_tol=1e-15)
