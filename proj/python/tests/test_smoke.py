import math

import pytest

import msol

GOLDEN = 0.6180339887498949

ROTATION = {
    "solenoid": {
        "transversal": {"kind": "circle"},
        "map": {"kind": "rotation", "real": GOLDEN},
    },
    "measure": {"kind": "lebesgue"},
}


def test_version_and_commands():
    assert msol.__version__ == "0.1.0"
    assert "homology" in msol.command_names()


def test_homology_of_golden_rotation():
    value, err = msol.homology_class(ROTATION)
    assert abs(value[0] - 1.0) <= 1e-9
    assert abs(value[1] - GOLDEN) <= 1e-9
    assert max(err) < 1e-9


def test_pairing_with_exact_form_vanishes():
    eta = {"degree": 0, "terms": [{"k": [2, 1], "phase": "sin", "c": 1.0}]}
    value, _ = msol.pair_current(ROTATION, {"d": eta})
    assert abs(value) <= 1e-9


def test_asymptotic_cycle():
    a = msol.asymptotic_cycle(ROTATION, 1e4)
    assert abs(a[1] - GOLDEN) <= 2e-4


def test_forms_roundtrip():
    s = {"degree": 0, "terms": [{"k": [1, 0], "phase": "sin", "c": 1.0}]}
    ds = msol.exterior_d(s, 2)
    (term,) = ds["terms"]
    assert term["I"] == [1] and term["phase"] == "cos"
    assert math.isclose(term["c"], 2 * math.pi)
    area = msol.wedge({"dtheta": 1}, {"dtheta": 2}, 2)
    assert msol.integrate_torus(area, 2) == 1.0


def test_run_command_is_deterministic():
    r1, f1 = msol.run("homology", ROTATION)
    r2, f2 = msol.run("homology", ROTATION)
    assert r1 == r2 and f1 == f2
    assert r1["command"] == "homology"
    assert f1["homology.csv"].startswith(b"component,value,quad_error\r\n")


def test_config_errors_carry_the_path():
    bad = {"solenoid": {"transversal": {"kind": "cantor", "p": 1, "depth": 3},
                        "map": {"kind": "odometer", "p": 2}}}
    with pytest.raises(msol.ConfigError, match="transversal.p"):
        msol.echo(bad)


def test_acceptance_subset():
    (res,) = msol.acceptance([9])
    assert res["id"] == 9 and res["pass"], res["detail"]
