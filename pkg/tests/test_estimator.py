import math

import pytest

from mtcavity.errors import DegenerateInput, MissingOpenParameter
from mtcavity.estimator import (
    PUBLISHED_TARGETS,
    EstimateInputs,
    audit_units,
    calibrated_inputs,
    dimer_dipole,
    full_report,
    quality_factor,
    transport_time,
)
from mtcavity.io import dumps_json


def test_dimer_dipole():
    assert dimer_dipole(EstimateInputs()) == pytest.approx(2.884e-28, rel=1e-3)
    assert dimer_dipole(EstimateInputs()) == pytest.approx(3e-28, rel=0.05)
    assert dimer_dipole(EstimateInputs(eps_rel=1.0)) == pytest.approx(2.307e-26, rel=1e-3)
    assert dimer_dipole(EstimateInputs(mobile_charges=0.0)) == 0.0


def test_transport_time():
    assert transport_time(1e-6, 2.0) == 5e-7
    assert transport_time(1e-6, 20.0) == pytest.approx(5e-8, rel=1e-15)
    assert transport_time(0.0, 2.0) == 0.0
    with pytest.raises(DegenerateInput):
        transport_time(1e-6, 0.0)


def test_quality_factor():
    q = quality_factor(6e12, 1e-4)
    assert q == pytest.approx(6e8)
    assert abs(math.log10(q / 1e8)) <= 1
    assert quality_factor(6e12, 1e-3) == pytest.approx(6e9)
    with pytest.raises(DegenerateInput):
        quality_factor(0.0, 1e-4)


def test_inputs_validation():
    with pytest.raises(DegenerateInput):
        EstimateInputs(eps_rel=0.0)
    with pytest.raises(DegenerateInput):
        EstimateInputs(collapse_range=(1e-6, 1e-7))
    with pytest.raises(DegenerateInput):
        EstimateInputs(field_convention="cgs")


def test_missing_open_parameters():
    with pytest.raises(MissingOpenParameter):
        full_report(EstimateInputs(n_coherent=100.0))
    with pytest.raises(MissingOpenParameter):
        full_report(EstimateInputs(cavity_volume=1e-21))


def test_calibrated_report():
    inputs = calibrated_inputs()
    assert inputs.cavity_volume == 4.4e-21
    assert inputs.n_coherent == 119.0
    rep = full_report(inputs)
    assert rep.value("d_dimer") == pytest.approx(2.88e-28, rel=2e-3)
    assert rep.value("E_c") == pytest.approx(1e4, rel=1e-2)
    assert rep.value("lambda_MT") == pytest.approx(3e11, rel=1e-2)
    assert rep.value("t_F") == 5e-7
    assert rep.value("Q_MT") == pytest.approx(6e8)
    assert rep.value("t_collapse") == [1e-7, 1e-6]
    for name, entry in rep.entries.items():
        assert {"value", "unit", "formula", "inputs", "paper_target", "within_tolerance"} <= set(entry)
        if PUBLISHED_TARGETS[name][2] is not None:
            assert entry["within_tolerance"] is True, name
    assert rep.flags["quantum_transport_feasible"] is True
    assert rep.flags["lambda_MT_within_factor_3"] is True
    assert rep.flags["units_consistent"] is True


def test_field_conventions_agree():
    si = full_report(calibrated_inputs())
    gauss = full_report(calibrated_inputs(field_convention="paper-gaussian"))
    assert gauss.value("E_c") == pytest.approx(si.value("E_c"), rel=1e-8)
    assert gauss.entries["E_c"]["formula"] != si.entries["E_c"]["formula"]


def test_fast_kink_feasibility():
    rep = full_report(calibrated_inputs(kink_speed=20.0))
    assert rep.value("t_F") == pytest.approx(5e-8)
    assert rep.flags["collapse_lower_bound_exceeds_transport"] is True


def test_report_determinism():
    a = dumps_json(full_report(calibrated_inputs()).to_dict())
    b = dumps_json(full_report(calibrated_inputs()).to_dict())
    assert a == b


def test_units_audit():
    audit = audit_units()
    assert len(audit) == 7 and all(audit.values())


def test_thermal_extra_is_informational():
    rep = full_report(calibrated_inputs())
    assert rep.extras["thermal_energy"]["value"] == pytest.approx(1.380649e-23 * 310)
    assert rep.extras["dipole_to_thermal_ratio"] > 0
