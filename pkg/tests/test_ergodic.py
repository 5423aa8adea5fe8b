import numpy as np
import pytest

from qmet import groups, io
from qmet.algebra import Functional, StarAlgebra, normalized_trace, random_state, state_spanning_family
from qmet.dynamics import (
    gns,
    induced_invariant_state,
    permutation_action,
    transfer_operator,
    translation_action,
    trivial_action,
)
from qmet.ergodic import (
    complement_space,
    correlation_defect,
    cyclic_vector_check,
    decomposition_check,
    ergodic_average_experiment,
    ergodicity_test,
    fixed_space,
    mean_projection,
    spectral_report,
)
from qmet.errors import InconsistentVerdict
from qmet.quantum_group import build_function_algebra, build_group_algebra, cesaro_net, constant_haar_net, haar_state

TWO_ORBITS = [[0, 1, 2, 3], [1, 0, 3, 2]]

# sup_n n·dev(n) for the lazy walk (δ_0 + δ_1)/2 on ℤ_3, from direct matrix powers
Z3_LAZY_CONSTANT = 5 / 12


def system(act, omega=None):
    omega = omega or normalized_trace(act.source)
    return act, gns(act.source, omega), state_spanning_family(act.group.algebra)


def cyclic(n):
    return build_function_algebra(groups.cyclic(n))


def lazy(qg):
    v = np.zeros(qg.algebra.dim, dtype=complex)
    v[0] = v[1] = 0.5
    return Functional(qg.algebra, v)


def test_fixed_space_trivial_action():
    qg = cyclic(3)
    act, g, thetas = system(trivial_action(qg, StarAlgebra.full([1, 2])))
    assert fixed_space(act, g, thetas).shape[1] == g.dim
    assert np.allclose(mean_projection(act, g, thetas), np.eye(g.dim))


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_fixed_space_translation_is_constants(n):
    act, g, thetas = system(translation_action(cyclic(n)))
    v = fixed_space(act, g, thetas)
    assert v.shape[1] == 1
    assert np.isclose(abs(np.vdot(v[:, 0], g.omega_vector)), 1.0)


def test_fixed_space_two_orbits():
    qg = cyclic(2)
    act, g, thetas = system(permutation_action(qg, groups.cyclic(2), TWO_ORBITS))
    assert fixed_space(act, g, thetas).shape[1] == 2


def test_projection_translation_z2():
    act, g, thetas = system(translation_action(cyclic(2)))
    p = mean_projection(act, g, thetas)
    w = g.omega_vector
    assert np.allclose(p, np.outer(w, w.conj()))
    assert np.allclose(p @ p, p, atol=1e-10)
    assert np.allclose(p, p.conj().T, atol=1e-10)


def _builtin_actions():
    out = []
    for spec in ["cyclic:2", "cyclic:3", "cyclic:6", "klein4", "symmetric:3"]:
        table, irreps = groups.builtin_group(spec)
        out.append(translation_action(build_function_algebra(table)))
        out.append(translation_action(build_group_algebra(table, irreps)))
    kp = io.kac_paljutkin()
    out += [translation_action(kp), trivial_action(kp, StarAlgebra.full([2]))]
    out.append(permutation_action(cyclic(2), groups.cyclic(2), TWO_ORBITS))
    out.append(permutation_action(cyclic(3), groups.cyclic(3), [[0, 1, 2], [1, 2, 0], [2, 0, 1]]))
    return out


@pytest.mark.parametrize("act", _builtin_actions(), ids=repr)
def test_haar_operator_is_the_projection(act):
    omega = induced_invariant_state(act, random_state(act.source, np.random.default_rng(3)))
    act, g, thetas = system(act, omega)
    p = mean_projection(act, g, thetas)
    k = transfer_operator(haar_state(act.group), act, g).matrix
    assert np.abs(k - p).max() <= 1e-8
    check = decomposition_check(act, g, thetas)
    assert check["complementary"]
    assert check["orthogonality_defect"] <= 1e-9
    assert cyclic_vector_check(act, g, thetas) <= 1e-9


def test_constant_haar_net_deviation():
    qg = io.kac_paljutkin()
    act, g, thetas = system(translation_action(qg), qg.haar)
    report = ergodic_average_experiment(constant_haar_net(qg, 5), act, g, thetas)
    assert max(report.deviations()) <= 1e-8
    assert report.converged


def test_z2_alternating_deviation_law():
    qg = cyclic(2)
    act, g, thetas = system(translation_action(qg))
    d1 = Functional(qg.algebra, np.array([0, 1], dtype=complex))
    report = ergodic_average_experiment(cesaro_net(d1, 1000, qg), act, g, thetas)
    for row in report.rows:
        n = row["n"]
        # the alternating remainder of the average is (1/n)·[[−1, 1], [1, −1]]/2 in GNS coordinates
        expected = 0.0 if n % 2 == 0 else 1 / (2 * n)
        assert abs(row["dev"] - expected) <= 1e-12
        amen = 0.0 if n % 2 == 0 else 2 / n
        assert abs(row["amenability_defect"] - amen) <= 1e-12
    assert report.rows[998]["dev"] <= 2e-3


def test_z2_alternating_operator_norm():
    qg = cyclic(2)
    act, g, thetas = system(translation_action(qg))
    p = mean_projection(act, g, thetas)
    net = cesaro_net(Functional(qg.algebra, np.array([0, 1], dtype=complex)), 9, qg)
    for n, phi in enumerate(net.states(), start=1):
        gap = np.linalg.norm(transfer_operator(phi, act, g).matrix - p, 2)
        assert gap == pytest.approx(0.0 if n % 2 == 0 else 1 / n, abs=1e-12)


def test_z3_lazy_rate_against_matrix_powers():
    qg = cyclic(3)
    act, g, thetas = system(translation_action(qg))
    report = ergodic_average_experiment(cesaro_net(lazy(qg), 300, qg), act, g, thetas)
    devs = report.deviations()
    n = np.arange(1, len(devs) + 1)
    assert (n * devs).max() <= Z3_LAZY_CONSTANT + 1e-9
    assert Z3_LAZY_CONSTANT <= 4
    # independent oracle: Koopman averages of the lazy walk, in point masses
    m = 0.5 * (np.eye(3) + np.roll(np.eye(3), 1, axis=1))
    power, total = np.eye(3), np.zeros((3, 3))
    for k in range(1, 11):
        power = power @ m
        total += power
        assert abs(devs[k - 1] - np.abs(total / k - 1 / 3).max()) <= 1e-12


def test_annihilation_on_complement():
    qg = cyclic(6)
    act, g, thetas = system(translation_action(qg))
    report = ergodic_average_experiment(cesaro_net(lazy(qg), 1000, qg), act, g, thetas)
    assert report.dim_N == 5
    assert report.converged
    assert report.annihilation <= report.tolerance
    assert complement_space(act, g, thetas).shape[1] == 5


def test_ergodic_verdict_translation():
    qg = cyclic(4)
    act, g, thetas = system(translation_action(qg))
    net = cesaro_net(lazy(qg), 600, qg)
    verdict = ergodicity_test(act, g, net, thetas=thetas)
    assert verdict.ergodic and verdict.dim_V == 1
    assert verdict.final_correlation_defect <= 5e-3


def test_ergodic_verdict_trivial():
    qg = cyclic(3)
    act, g, thetas = system(trivial_action(qg, StarAlgebra.full([1, 2])))
    verdict = ergodicity_test(act, g, cesaro_net(lazy(qg), 10, qg), thetas=thetas)
    assert not verdict.ergodic
    assert verdict.dim_V == g.dim


def test_ergodic_verdict_two_orbits():
    qg = cyclic(2)
    act, g, thetas = system(permutation_action(qg, groups.cyclic(2), TWO_ORBITS))
    net = cesaro_net(Functional(qg.algebra, np.array([0, 1], dtype=complex)), 200, qg)
    orbit = act.source.element([1, 1, 0, 0])
    verdict = ergodicity_test(act, g, net, test_elements=[(orbit, orbit)], thetas=thetas)
    assert verdict.dim_V == 2 and not verdict.ergodic
    assert min(d for _, d in verdict.correlation_defects) >= 0.1
    assert verdict.final_correlation_defect == pytest.approx(0.25)


def test_inconsistent_verdict_is_flagged():
    # a net that never mixes: the counit leaves correlations unfactored
    qg = cyclic(3)
    act, g, thetas = system(translation_action(qg))
    eps = Functional(qg.algebra, np.array([1, 0, 0], dtype=complex))
    with pytest.raises(InconsistentVerdict):
        ergodicity_test(act, g, cesaro_net(eps, 5, qg), thetas=thetas)


def test_correlation_defect_haar_factorizes():
    qg = cyclic(5)
    act, g, thetas = system(translation_action(qg))
    assert correlation_defect(haar_state(qg), act, g.omega) <= 1e-12


def test_cyclic_vector_examples():
    act, g, thetas = system(translation_action(cyclic(3)))
    assert cyclic_vector_check(act, g, thetas) <= 1e-12
    qg = cyclic(2)
    act, g, thetas = system(trivial_action(qg, StarAlgebra.full([2])))
    assert cyclic_vector_check(act, g, thetas) <= 1e-15


def test_spectral_report_haar():
    qg = cyclic(4)
    act, g, thetas = system(translation_action(qg))
    p = mean_projection(act, g, thetas)
    rep = spectral_report(transfer_operator(haar_state(qg), act, g).matrix, p)
    assert np.allclose(sorted(rep["singular_values"]), [0, 0, 0, 1])
    assert rep["spectral_radius"] == pytest.approx(1.0)
    assert max(rep["peripheral_distance_to_V"]) <= 1e-9
