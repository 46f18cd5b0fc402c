import math

import numpy as np
import pytest
import scipy.linalg as sla
from hypothesis import given
from hypothesis import strategies as st

from qfdiv import convex_core as cc
from qfdiv import dmin_solver as ds
from qfdiv.matrix_calc import DensityOperator, MatrixError
from qfdiv.measurement_oracle import Measurement, measured_value
from qfdiv.sampling import apply_channel, random_channel, random_density, random_pure, random_unitary

seeds = st.integers(0, 2**32 - 1)

SOLVABLE = {
    "chi2": cc.renyi(2.0),
    "fidelity": cc.renyi(0.5),
    "renyi.3": cc.renyi(0.3),
    "renyi.7": cc.renyi(0.7),
    "renyi1.5": cc.renyi(1.5),
    "renyi-1": cc.renyi(-1.0),
    "renyi-.5": cc.renyi(-0.5),
    "kl": cc.kl(),
    "tv": cc.tv(),
    "fb": cc.fb(),
}


def dual_objective(f, rho1, rho2, t):
    w, v = np.linalg.eigh(t)
    ft = (v * np.asarray(f.conj_at(w), dtype=float)) @ v.conj().T
    return np.trace(rho1 @ t).real - np.trace(rho2 @ ft).real


# --- routing ---------------------------------------------------------------


def test_routes(rng):
    r1, r2 = random_density(3, rng), random_density(3, rng)
    assert ds.solve(cc.renyi(2.0), r1, r2).path == ds.CLOSED_FORM_F2
    assert ds.solve(cc.renyi(-1.0), r1, r2).path == ds.CLOSED_FORM_F2
    assert ds.solve(cc.renyi(0.5), r1, r2).path == ds.CLOSED_FORM_FIDELITY
    assert ds.solve(cc.tv(), r1, r2).path == ds.CLOSED_FORM_TV
    assert ds.solve(cc.renyi(0.3), r1, r2).path == ds.GENERIC_GRADIENT
    assert ds.solve(cc.kl(), r1, r2).path == ds.SWAPPED_GENERIC
    assert ds.solve(cc.renyi(0.7), r1, r2).path == ds.SWAPPED_GENERIC
    d = np.diag([0.2, 0.3, 0.5])
    assert ds.solve(cc.kl(), d, np.diag([0.5, 0.25, 0.25])).path == ds.COMMUTING_CLASSICAL
    phi = random_pure(3, rng)
    assert ds.solve(cc.renyi(0.3), np.outer(phi, phi.conj()), r2).path == ds.PURE_STATE
    assert ds.solve(cc.kl(), r1, np.outer(phi, phi.conj())).path == ds.INFINITE


def test_unsupported_family(rng):
    base = cc.renyi(1.5)
    f = cc.from_function("odd", base.f_at, f_prime_right=base.f_prime_right_at, f_second=base.f_second_at,
                         conj=base.conj_at, conj_prime=base.conj_prime_at, conj_domain=base.conj_domain,
                         cond_I=False, cond_II=False, canonical=True)
    with pytest.raises(ds.UnsupportedFamilyError):
        ds.solve(f, random_density(2, rng), random_density(2, rng))


def test_input_errors(rng):
    with pytest.raises(MatrixError, match="dimension"):
        ds.solve(cc.kl(), random_density(2, rng), random_density(3, rng))
    with pytest.raises(ds.SolverError, match="unknown path"):
        ds.solve(cc.kl(), random_density(2, rng), random_density(2, rng), force_path="nope")
    with pytest.raises(ds.SolverError, match="operator convex"):
        ds.solve(cc.kl(), random_density(2, rng), random_density(2, rng), force_path=ds.GENERIC_GRADIENT)
    with pytest.raises(ds.SolverError, match="rank one"):
        ds.solve(cc.renyi(0.3), random_density(2, rng), random_density(2, rng), force_path=ds.PURE_STATE)


# --- closed forms against independent formulas -----------------------------


@given(seeds, st.sampled_from([2, 3, 4]))
def test_chi2_closed_form_matches_scipy_sylvester(seed, d):
    rng = np.random.default_rng(seed)
    r1, r2 = random_density(d, rng), random_density(d, rng)
    t0 = sla.solve_sylvester(r2, r2, 4 * r1)
    assert ds.solve(cc.renyi(2.0), r1, r2).value == pytest.approx(0.5 * np.trace(r1 @ t0).real, rel=1e-10)


@given(seeds)
def test_fidelity_closed_form_matches_sqrtm(seed):
    rng = np.random.default_rng(seed)
    r1, r2 = random_density(3, rng), random_density(3, rng)
    s = sla.sqrtm(r2)
    ref = -np.trace(sla.sqrtm(s @ r1 @ s)).real
    assert ds.solve(cc.renyi(0.5), r1, r2).value == pytest.approx(ref, abs=1e-8)


@pytest.mark.parametrize("name", ["chi2", "fidelity", "tv"])
def test_generic_path_agrees_with_closed_form(name, rng):
    f = SOLVABLE[name]
    for _ in range(5):
        r1, r2 = random_density(3, rng), random_density(3, rng)
        fast = ds.solve(f, r1, r2)
        slow = ds.solve(f, r1, r2, force_path=ds.GENERIC_GRADIENT)
        assert slow.converged
        assert slow.value == pytest.approx(fast.value, rel=1e-8, abs=1e-10)


# --- structural properties --------------------------------------------------


@pytest.mark.parametrize("name", sorted(SOLVABLE))
def test_optimal_value_dominates_dual_feasible_points(name, rng):
    f = SOLVABLE[name]
    if not f.cond_I:
        pytest.skip("dual formula applies to cond_I generators")
    r1, r2 = random_density(3, rng), random_density(3, rng)
    res = ds.solve(f, r1, r2)
    dom = f.conj_domain
    for _ in range(30):
        lo = max(dom.lower, -4.0) + 1e-3
        hi = min(dom.upper, 4.0) - 1e-3
        u = random_unitary(3, rng)
        t = u @ np.diag(rng.uniform(lo, hi, 3)) @ u.conj().T
        assert dual_objective(f, r1, r2, t) <= res.value + 1e-9


@pytest.mark.parametrize("name", sorted(SOLVABLE))
def test_no_measurement_beats_the_minimum(name, rng):
    f = SOLVABLE[name]
    r1, r2 = random_density(3, rng), random_density(3, rng)
    res = ds.solve(f, r1, r2)
    for _ in range(30):
        m = Measurement.from_basis(random_unitary(3, rng))
        assert measured_value(f, m, r1, r2) <= res.value + 1e-9
    # the reported basis attains the value
    m = Measurement.from_basis(res.measurement_basis)
    assert measured_value(f, m, r1, r2) == pytest.approx(res.value, rel=1e-6, abs=1e-8)


@given(seeds, st.floats(0.1, 5.0))
def test_positive_homogeneity(seed, c):
    rng = np.random.default_rng(seed)
    r1, r2 = random_density(2, rng), random_density(2, rng)
    for f in (SOLVABLE["renyi.3"], SOLVABLE["kl"], SOLVABLE["chi2"]):
        a = ds.solve(f, c * r1, c * r2).value
        b = c * ds.solve(f, r1, r2).value
        assert a == pytest.approx(b, rel=1e-7, abs=1e-9)


@given(seeds)
def test_unitary_invariance(seed):
    rng = np.random.default_rng(seed)
    r1, r2 = random_density(3, rng), random_density(3, rng)
    u = random_unitary(3, rng)
    for f in (SOLVABLE["renyi.3"], SOLVABLE["kl"]):
        a = ds.solve(f, u @ r1 @ u.conj().T, u @ r2 @ u.conj().T).value
        assert a == pytest.approx(ds.solve(f, r1, r2).value, rel=1e-7, abs=1e-9)


@pytest.mark.parametrize("name", ["renyi.3", "renyi-.5", "chi2", "fidelity", "tv", "fb", "renyi-1"])
def test_reversal_consistency(name, rng):
    f = SOLVABLE[name]
    if not f.cond_II:
        pytest.skip("reversed generic route needs cond_II")
    for _ in range(4):
        r1, r2 = random_density(3, rng), random_density(3, rng)
        a = ds.solve(f, r1, r2, force_path=ds.GENERIC_GRADIENT).value
        b = ds.solve(f, r1, r2, force_path=ds.SWAPPED_GENERIC).value
        assert a == pytest.approx(b, rel=1e-7, abs=1e-9)


@pytest.mark.parametrize("name", ["renyi.3", "kl", "chi2", "fidelity", "tv", "renyi1.5"])
def test_data_processing(name, rng):
    f = SOLVABLE[name]
    for _ in range(6):
        r1, r2 = random_density(3, rng), random_density(3, rng)
        k = random_channel(3, 2, rng)
        before = ds.solve(f, r1, r2).value
        after = ds.solve(f, apply_channel(k, r1), apply_channel(k, r2)).value
        assert after <= before + 1e-7


def test_minimum_at_least_f_one(rng):
    for f in SOLVABLE.values():
        r1, r2 = random_density(3, rng), random_density(3, rng)
        assert ds.solve(f, r1, r2).value >= float(f.f_at(1.0)) - 1e-9
        assert ds.solve(f, r1, r1).value == pytest.approx(float(f.f_at(1.0)), abs=1e-7)


# --- spectral bounds ---------------------------------------------------------


def _bisect_b(r1, r2, least=True):
    """least b with b r2 - r1 >= 0, or largest b with r1 - b r2 >= 0."""
    lo, hi = 0.0, 1e4
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        m = mid * r2 - r1 if least else r1 - mid * r2
        ok = np.linalg.eigvalsh(m)[0] >= -1e-13
        if least:
            hi, lo = (mid, lo) if ok else (hi, mid)
        else:
            lo, hi = (mid, hi) if ok else (lo, mid)
    return hi if least else lo


def test_spectral_bounds_full_rank(rng):
    for _ in range(10):
        r1, r2 = random_density(3, rng), random_density(3, rng)
        b = ds.spectral_bounds(cc.renyi(2.0), r1, r2)
        assert b.b_star == pytest.approx(_bisect_b(r1, r2, True), rel=1e-8)
        assert b.b_star_prime == pytest.approx(_bisect_b(r1, r2, False), rel=1e-8)
        assert b.t_star == pytest.approx(2 * b.b_star)


def test_spectral_bound_with_rank_deficient_rho2():
    r1 = np.array([[1.0, 0.9], [0.9, 1.0]])
    r2 = np.diag([1.0, 0.0])
    b = ds.spectral_bounds(cc.renyi(2.0), r1, r2)
    assert b.b_star == math.inf
    assert b.b_star_prime == pytest.approx(_bisect_b(r1, r2, False), rel=1e-8)
    assert b.b_star_prime == pytest.approx(0.19)


# --- finiteness and reductions -----------------------------------------------


def test_support_relations():
    e0, e01 = np.diag([1.0, 0, 0]), np.diag([0.5, 0.5, 0])
    plus = np.zeros((3, 3))
    plus[1:, 1:] = 0.5
    assert ds.support_relation(e01, e01) == "equal"
    assert ds.support_relation(e0, e01) == "one_in_two"
    assert ds.support_relation(e01, e0) == "two_in_one"
    assert ds.support_relation(e01, plus) == "incomparable"


@pytest.mark.parametrize(
    "name,expected",
    [("kl", (True, True, False, False)), ("renyi.3", (True, True, True, True)),
     ("chi2", (True, True, False, False)), ("renyi-1", (True, False, True, False)),
     ("tv", (True, True, True, True)), ("fb", (True, True, False, False))],
)
def test_finiteness_table(name, expected):
    f = SOLVABLE[name]
    e0, e01 = np.diag([1.0, 0, 0]), np.diag([0.5, 0.5, 0])
    plus = np.zeros((3, 3))
    plus[1:, 1:] = 0.5
    cases = [(e01, e01), (e0, e01), (e01, e0), (e01, plus)]
    got = tuple(ds.finiteness_check(f, a, b) for a, b in cases)
    assert got == expected
    for (a, b), fin in zip(cases, got):
        assert math.isfinite(ds.solve(f, a, b).value) == fin


def test_kernel_reduce_constant():
    red = ds.kernel_reduce(cc.fb(), np.diag([1.0, 0.0]), np.eye(2) / 2, force=True)
    assert red.constant == pytest.approx(0.5)
    assert red.rho1.dim == 1
    with pytest.raises(ds.HypothesisError):
        ds.kernel_reduce(cc.fb(), np.diag([1.0, 0.0]), np.eye(2) / 2)


def test_rank_deficient_rho1_generic(rng):
    f = cc.renyi(0.3)
    r1 = random_density(3, rng, rank=2)
    r2 = random_density(3, rng)
    res = ds.solve(f, r1, r2)
    assert res.converged
    m = Measurement.from_basis(res.measurement_basis)
    assert measured_value(f, m, r1, r2) == pytest.approx(res.value, abs=1e-7)


def test_pure_state_formula(rng):
    phi = random_pure(3, rng)
    r2 = random_density(3, rng)
    q = np.vdot(phi, r2 @ phi).real
    for a in (0.1, 0.3, 0.5):
        res = ds.solve(cc.renyi(a), np.outer(phi, phi.conj()), r2)
        assert res.value == pytest.approx(-q ** (1 - a), abs=1e-12)


def test_rank_one_rho2_uses_reversal(rng):
    phi = random_pure(3, rng)
    r1 = random_density(3, rng)
    res = ds.solve(cc.renyi(0.7), r1, np.outer(phi, phi.conj()))
    q = np.vdot(phi, r1 @ phi).real
    assert res.path == ds.PURE_STATE
    assert res.value == pytest.approx(-q ** 0.7, abs=1e-12)


def test_commuting_rotated_pair(rng):
    u = random_unitary(4, rng)
    p, q = np.array([0.1, 0.2, 0.3, 0.4]), np.array([0.4, 0.3, 0.2, 0.1])
    r1 = u @ np.diag(p) @ u.conj().T
    r2 = u @ np.diag(q) @ u.conj().T
    for f in SOLVABLE.values():
        res = ds.solve(f, r1, r2)
        assert res.path == ds.COMMUTING_CLASSICAL
        assert res.value == pytest.approx(cc.classical_df(f, p, q), abs=1e-12)


def test_density_operator_inputs_accepted(rng):
    r1, r2 = DensityOperator(random_density(2, rng)), DensityOperator(random_density(2, rng))
    assert math.isfinite(ds.solve(cc.kl(), r1, r2).value)
