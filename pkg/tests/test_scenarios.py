import itertools
import time
from fractions import Fraction

import numpy as np
import pytest
from numpy.testing import assert_allclose

from quantum.histories import assign_probabilities, decoherence_matrix
from quantum.tsvf import abl_over_family
from scenarios.builtin import (
    HM_LABELS,
    get_scenario,
    hm_closed_forms,
    hm_scenario,
    hm_sweep,
)
from utils.errors import DegenerateDimensionError, NotConsistentError, SpecError

D_VALUES = [2, 3, 4, 5, 6]


# --------------------------
# spin
# --------------------------

def test_spin_packages_both_readings(spin):
    assert spin.params["variant"] == "pre_post"
    assert spin.family.labels == ["up", "down"]
    ch = spin.ch_view()
    assert ch.params["variant"] == "two_slot"
    assert ch.family.labels == ["up,plus", "up,minus", "down,plus", "down,minus"]
    assert spin.closed_form() is None


# --------------------------
# hm
# --------------------------

@pytest.mark.parametrize("d", D_VALUES)
def test_hm_normalization_contract(d):
    s = hm_scenario(d)
    assert np.trace(s.rho_i @ s.rho_f).real == pytest.approx(1.0, abs=1e-9)
    assert np.trace(s.rho_i).real == pytest.approx(1.0, abs=1e-12)
    assert s.params["rho_f_scale"] == pytest.approx(d ** 2)
    assert s.space.labels == list(HM_LABELS)
    assert s.space.total_dim == d ** 4


@pytest.mark.parametrize("d", D_VALUES)
def test_hm_matches_closed_forms(d):
    s = hm_scenario(d)
    closed = s.closed_form()
    assert closed is not None and closed.d == d

    dist = abl_over_family(s.family, s.rho_i, s.rho_f)
    assert dist.labels == ["1", "2", "3", "4"]
    assert_allclose(dist.probabilities, closed.probabilities, atol=1e-9)
    assert np.sum(dist.probabilities) == pytest.approx(1.0, abs=1e-10)

    D = decoherence_matrix(s.family, s.rho_i, s.rho_f)
    assert D.entry("1", "2").real == pytest.approx(1 / d ** 2 - 1 / d ** 4, abs=1e-9)

    with pytest.raises(NotConsistentError) as exc:
        assign_probabilities(D)
    assert exc.value.verdict.max_violation >= closed.offdiag_12 - 1e-9


def test_hm_closed_forms_are_exact_at_d2():
    closed = hm_closed_forms(2)
    assert closed.exact_probabilities == (Fraction(1, 28), Fraction(9, 28), Fraction(9, 28), Fraction(9, 28))
    assert closed.exact_offdiag_12 == Fraction(3, 16)
    assert sum(closed.exact_probabilities) == 1
    assert closed.offdiag_12 == 0.1875


@pytest.mark.parametrize("d", [1, 0, 2.5])
def test_hm_rejects_degenerate_dimensions(d):
    with pytest.raises(DegenerateDimensionError):
        hm_scenario(d)
    with pytest.raises(DegenerateDimensionError):
        hm_closed_forms(d)


def test_hm_swap_order_is_a_different_family():
    s = hm_scenario(2, swap_order=True)
    assert s.closed_form() is None
    assert s.family.labels[0] == "Pi[b_tilde,b],Pi[r_b,b]"
    assert s.params["swap_order"] is True

    dist = abl_over_family(s.family, s.rho_i, s.rho_f)
    assert np.sum(dist.probabilities) == pytest.approx(1.0, abs=1e-10)


def test_get_scenario_registry():
    assert get_scenario("hm", d=3).params["d"] == 3
    assert get_scenario("spin").name == "spin"
    with pytest.raises(SpecError, match="unknown scenario"):
        get_scenario("wormhole")


def test_hm_closed_forms_approach_one_third():
    closed = [hm_closed_forms(d) for d in range(2, 11)]
    p1 = [c.exact_probabilities[0] for c in closed]
    offdiag = [c.exact_offdiag_12 for c in closed]
    assert all(a > b for a, b in zip(p1, p1[1:]))
    assert all(a > b for a, b in zip(offdiag, offdiag[1:]))
    for k in (1, 2, 3):
        pk = [c.exact_probabilities[k] for c in closed]
        assert all(a < b < Fraction(1, 3) for a, b in zip(pk, pk[1:]))
    assert closed[-1].probabilities[1] == pytest.approx(1 / 3, abs=1e-4)


def test_off_diagonal_for_d_up_to_6_within_five_seconds():
    started = time.perf_counter()
    for d in D_VALUES:
        s = hm_scenario(d)
        D = decoherence_matrix(s.family, s.rho_i, s.rho_f)
        assert D.entry("1", "2").real == pytest.approx(1 / d ** 2 - 1 / d ** 4, abs=1e-9)
    assert time.perf_counter() - started < 5.0


def test_hm_sweep_approaches_one_third():
    table = hm_sweep(range(2, 6))
    assert list(table["d"]) == [2, 3, 4, 5]
    assert (table["max_abs_deviation"] <= 1e-9).all()
    assert table["p1"].is_monotonic_decreasing
    assert table["p2"].is_monotonic_increasing
    assert table["p2"].iloc[-1] == pytest.approx(1 / 3, abs=0.01)


# --------------------------
# Independent oracle at d = 2
# --------------------------

def _oracle_embed(op, targets, dims=(2, 2, 2, 2)):
    """Conjugate op (x) I by a permutation matrix built from explicit index loops."""
    n_sub = len(dims)
    order = list(targets) + [i for i in range(n_sub) if i not in targets]
    n = int(np.prod(dims))

    perm = np.zeros((n, n))
    for multi in itertools.product(*(range(k) for k in dims)):
        src = 0
        for i, k in zip(multi, dims):
            src = src * k + i
        dst = 0
        for pos in order:
            dst = dst * dims[pos] + multi[pos]
        perm[dst, src] = 1.0

    rest = n // op.shape[0]
    return perm.T @ np.kron(op, np.eye(rest)) @ perm


def test_decoherence_matrix_matches_brute_force_oracle(hm2):
    phi = np.zeros(4)
    phi[0] = phi[3] = 1 / np.sqrt(2)
    phi_proj = np.outer(phi, phi)
    eye = np.eye(16)

    # subsystem order: r_b_tilde=0, r_b=1, b_tilde=2, b=3
    rho_i = _oracle_embed(phi_proj, [0, 1]) @ _oracle_embed(phi_proj, [2, 3])
    rho_f = _oracle_embed(phi_proj, [0, 2])
    rho_f = rho_f / np.trace(rho_i @ rho_f)

    pi_rb_b = _oracle_embed(phi_proj, [1, 3])
    pi_bt_b = _oracle_embed(phi_proj, [2, 3])
    class_ops = [
        pi_bt_b @ pi_rb_b,
        (eye - pi_bt_b) @ pi_rb_b,
        pi_bt_b @ (eye - pi_rb_b),
        (eye - pi_bt_b) @ (eye - pi_rb_b),
    ]
    expected = np.array([
        [np.trace(rho_f @ ca @ rho_i @ cb.conj().T) for cb in class_ops]
        for ca in class_ops
    ])

    D = decoherence_matrix(hm2.family, hm2.rho_i, hm2.rho_f)
    assert_allclose(D.entries, expected, atol=1e-10)
    assert expected[0, 1].real == pytest.approx(3 / 16, abs=1e-12)
