import json

import numpy as np
import pytest
from numpy.testing import assert_allclose
from pydantic import ValidationError

from models.models import ScenarioSpec
from quantum.histories import assign_probabilities, decoherence_matrix
from quantum.tsvf import abl_over_family
from scenarios.spec_loader import build_scenario, collect_diagnostics, load_spec, malformed_diagnostics
from utils.errors import SlotNotExhaustiveError, SpecError, UnknownLabelError


def _qubit_spec(**overrides):
    spec = {
        "name": "t",
        "subsystems": [{"label": "q", "dim": 2}],
        "rho_i": {"factors": [{"kind": "basis", "labels": ["q"], "index": [0]}]},
        "rho_f": {"factors": []},
        "slots": [[
            {"kind": "state", "state": {"kind": "basis", "labels": ["q"], "index": [0]}, "label": "q0"},
            {"kind": "state", "state": {"kind": "basis", "labels": ["q"], "index": [1]}, "label": "q1"},
        ]],
    }
    spec.update(overrides)
    return ScenarioSpec.model_validate(spec)


def test_hm_spec_file_reproduces_builtin(spec_path, hm2):
    scenario = build_scenario(load_spec(spec_path("hm_d2.json")))
    assert scenario.space.labels == hm2.space.labels
    assert_allclose(scenario.rho_i, hm2.rho_i, atol=1e-12)
    assert_allclose(scenario.rho_f, hm2.rho_f, atol=1e-12)

    D = decoherence_matrix(scenario.family, scenario.rho_i, scenario.rho_f)
    expected = decoherence_matrix(hm2.family, hm2.rho_i, hm2.rho_f)
    assert D.labels == ["1", "2", "3", "4"]
    assert_allclose(D.entries, expected.entries, atol=1e-10)

    dist = abl_over_family(scenario.family, scenario.rho_i, scenario.rho_f)
    assert_allclose(dist.probabilities, [1 / 28, 9 / 28, 9 / 28, 9 / 28], atol=1e-12)
    assert scenario.closed_form() is None


def test_born_spec_file(spec_path):
    scenario = build_scenario(load_spec(spec_path("born_qutrit.json")))
    D = decoherence_matrix(scenario.family, scenario.rho_i, scenario.rho_f)
    assert assign_probabilities(D) == pytest.approx({"q0": 0.36, "q1": 0.2304, "q2": 0.4096}, abs=1e-12)
    abl = abl_over_family(scenario.family, scenario.rho_i, scenario.rho_f)
    assert abl.as_dict() == pytest.approx({"q0": 0.36, "q1": 0.2304, "q2": 0.4096}, abs=1e-12)


def test_spin_spec_file_matches_two_slot_reading(spec_path, spin):
    scenario = build_scenario(load_spec(spec_path("spin_two_slot.json")))
    ch = spin.ch_view()
    D = decoherence_matrix(scenario.family, scenario.rho_i, scenario.rho_f)
    expected = decoherence_matrix(ch.family, ch.rho_i, ch.rho_f)
    assert D.labels == expected.labels
    assert_allclose(D.entries, expected.entries, atol=1e-12)


@pytest.mark.parametrize("name", ["hm_d2.json", "born_qutrit.json", "spin_two_slot.json"])
def test_sample_files_have_no_diagnostics(spec_path, name):
    assert collect_diagnostics(load_spec(spec_path(name))) == []


def test_double_identity_slot_is_not_exhaustive(spec_path):
    spec = load_spec(spec_path("invalid_double_identity.json"))
    diagnostics = collect_diagnostics(spec)
    assert [(d.code, d.location) for d in diagnostics] == [("SlotNotExhaustive", "slots[0]")]
    with pytest.raises(SlotNotExhaustiveError):
        build_scenario(spec)


def test_unknown_labels_are_all_reported(spec_path):
    spec = load_spec(spec_path("invalid_unknown_label.json"))
    diagnostics = collect_diagnostics(spec)
    assert [(d.code, d.location) for d in diagnostics] == [
        ("UnknownLabel", "slots[0][0].state"),
        ("UnknownLabel", "slots[0][1].of.state"),
    ]
    with pytest.raises(UnknownLabelError):
        build_scenario(spec)


def test_non_orthogonal_pair_fails_the_slot_check():
    plus = {"kind": "amplitudes", "labels": ["q"], "amplitudes": [[0.6, 0.0], [0.8, 0.0]]}
    spec = _qubit_spec(slots=[[
        {"kind": "state", "state": {"kind": "basis", "labels": ["q"], "index": [0]}},
        {"kind": "state", "state": plus},
    ]])
    codes = [d.code for d in collect_diagnostics(spec)]
    assert codes == ["SlotNotExhaustive"]


def test_type_errors_are_located():
    spec = _qubit_spec(
        subsystems=[{"label": "q", "dim": 2}, {"label": "r", "dim": 3}],
        rho_i={"factors": [
            {"kind": "amplitudes", "labels": ["q"], "amplitudes": [[1.0, 0.0], [1.0, 0.0]]},
            {"kind": "max_entangled", "labels": ["q", "r"]},
        ]},
        rho_f={"factors": [{"kind": "basis", "labels": ["r", "r"], "index": [0, 0]}]},
    )
    found = {(d.code, d.location) for d in collect_diagnostics(spec)}
    assert ("NotNormalized", "rho_i.factors[0]") in found
    assert ("DimensionMismatch", "rho_i.factors[1]") in found
    assert ("DuplicateLabel", "rho_f.factors[0]") in found


def test_duplicate_subsystems():
    spec = _qubit_spec(subsystems=[{"label": "q", "dim": 2}, {"label": "q", "dim": 2}])
    assert [(d.code, d.location) for d in collect_diagnostics(spec)] == [("DuplicateLabel", "subsystems")]


def test_chain_label_count_is_checked():
    spec = _qubit_spec(chain_labels=["a", "b", "c"])
    assert [d.location for d in collect_diagnostics(spec)] == ["chain_labels"]


def test_initial_state_trace_is_checked():
    spec = _qubit_spec(rho_i={"factors": [], "scale": 1.0})
    diagnostics = collect_diagnostics(spec)
    assert [(d.code, d.location) for d in diagnostics] == [("NotNormalized", "rho_i")]


def test_malformed_spec_is_a_spec_error(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"name": "x", "subsystems": [], "rho_i": {}, "rho_f": {},
                               "slots": [[{"kind": "bogus"}]]}))
    with pytest.raises(SpecError, match="malformed"):
        load_spec(bad)
    with pytest.raises(SpecError, match="cannot read"):
        load_spec(tmp_path / "missing.json")

    with pytest.raises(ValidationError) as exc:
        ScenarioSpec.model_validate_json(bad.read_text())
    diagnostics = malformed_diagnostics(exc.value)
    assert diagnostics and all(d.code == "Malformed" for d in diagnostics)
    assert any(d.location.startswith("slots") for d in diagnostics)


def test_density_scale_multiplies_every_entry():
    spec = _qubit_spec(rho_f={"factors": [{"kind": "basis", "labels": ["q"], "index": [0]}], "scale": 2.5})
    scenario = build_scenario(spec)
    assert_allclose(scenario.rho_f, np.diag([2.5, 0.0]), atol=1e-15)
