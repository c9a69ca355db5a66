import logging

import numpy as np
from numpy.testing import assert_allclose

from generator.random_families import MIN_OVERLAP, family_summary, random_scenarios, random_slot, random_unitary
from quantum.linalg_core import SpaceDescriptor


def test_same_seed_same_scenarios():
    a = random_scenarios(5, seed=99)
    b = random_scenarios(5, seed=99)
    for x, y in zip(a, b):
        assert x.space == y.space
        assert x.family.labels == y.family.labels
        assert_allclose(x.rho_i, y.rho_i)


def test_generated_scenarios_respect_bounds():
    scenarios = random_scenarios(50, seed=1, max_dim=12)
    table = family_summary(scenarios)
    assert list(table.columns) == ["dim", "slots", "chains", "overlap"]
    assert (table["dim"] <= 12).all()
    assert (table["overlap"] > MIN_OVERLAP).all()
    assert table["slots"].between(1, 3).all()


def test_single_slot_sizes_are_honored():
    for s in random_scenarios(10, seed=2, slot_sizes=[2]):
        assert s.family.shape == (2,)


def test_random_unitary_is_unitary(rng):
    u = random_unitary(rng, 5)
    assert_allclose(u.conj().T @ u, np.eye(5), atol=1e-12)


def test_debug_log_carries_a_family_summary(caplog):
    with caplog.at_level(logging.DEBUG, logger="generator.random_families"):
        random_scenarios(3, seed=4)
    assert "generated 3 random scenarios (seed 4)" in caplog.text
    assert "overlap" in caplog.text


def test_slots_cut_from_a_shared_basis_commute(rng):
    space = SpaceDescriptor.of(("a", 2), ("b", 2))
    basis = random_unitary(rng, 4)
    first = random_slot(rng, space, "x", basis=basis)
    second = random_slot(rng, space, "y", basis=basis)
    for p in first:
        for q in second:
            assert_allclose(p.op @ q.op, q.op @ p.op, atol=1e-12)
