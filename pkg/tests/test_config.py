import math

import pytest

from dronenet.config import (
    ConfigError,
    ScenarioConfig,
    SweepSpec,
    apply_sweep_value,
    config_from_text,
    config_to_text,
)


def test_default_parameter_values():
    c = ScenarioConfig()
    assert (c.region.width, c.region.height) == (5000.0, 5000.0)
    assert c.rsu_density_per_m2 == 5e-6
    assert c.rsu_min_distance_m == 200.0
    assert c.drone_count == 6
    assert c.drone_altitude_m == 200.0
    assert c.environment.carrier_wavelength == 0.15
    assert c.environment.alpha == 9.61
    assert c.environment.beta == 0.16
    assert c.environment.excess_los_db == 1.0
    assert c.environment.excess_nlos_db == 20.0
    assert c.environment.noise_power_db == -125.0
    assert c.environment.fading_floor_db == -10.0
    assert c.policy.per_drone_power == 1.5
    assert c.policy.max_power == 1.5
    assert c.demand_rates_bps == (5e6, 10e6, 15e6, 20e6, 25e6)
    assert c.constraints.bandwidth_per_drone == 400e6
    assert c.constraints.max_links_per_drone == 20
    assert c.constraints.backhaul_rate == 1.4e9
    assert c.energy.pa_inefficiency == 0.20
    assert c.energy.circuit_power_per_link == 0.1
    assert c.block_gas_limit == 6_000_000


def test_text_round_trip_is_identity():
    c = ScenarioConfig()
    text = config_to_text(c)
    again = config_from_text(text)
    assert again == c
    assert config_to_text(again) == text


def test_round_trip_preserves_overrides_and_inf():
    text = config_to_text(ScenarioConfig())
    text = text.replace("constraints.backhaul_rate_bps = 1400000000.0",
                        "constraints.backhaul_rate_bps = inf")
    text = text.replace("geometry.drone_count = 6", "geometry.drone_count = 4")
    c = config_from_text(text)
    assert math.isinf(c.constraints.backhaul_rate)
    assert c.drone_count == 4
    assert "constraints.backhaul_rate_bps = inf" in config_to_text(c)


def test_comments_and_blank_lines_are_ignored():
    text = "# a comment\n\ngeometry.drone_count = 3  # trailing\n"
    c = config_from_text(text)
    assert c.drone_count == 3


def test_unknown_key_and_bad_value_are_reported_by_name():
    with pytest.raises(ConfigError) as err:
        config_from_text("geometry.rsu_speed = 7\n")
    assert "geometry.rsu_speed" in str(err.value)

    with pytest.raises(ConfigError) as err:
        config_from_text("geometry.drone_count = many\n")
    assert "geometry.drone_count" in str(err.value)


def test_validation_names_offending_fields():
    c = ScenarioConfig(drone_count=0, sv_count=-1)
    problems = c.validate()
    assert any("geometry.drone_count" in p for p in problems)
    assert any("ledger.sv_count" in p for p in problems)

    with pytest.raises(ConfigError):
        config_from_text("geometry.rsu_process = hexgrid\n")


def test_sweep_spec_validation_and_application():
    with pytest.raises(ValueError):
        SweepSpec("tilt_angle", (1, 2))
    with pytest.raises(ValueError):
        SweepSpec("drone_count", ())
    c = apply_sweep_value(ScenarioConfig(), "bandwidth_per_drone_hz", 2e8)
    assert c.constraints.bandwidth_per_drone == 2e8
    c = apply_sweep_value(ScenarioConfig(), "backhaul_rate_bps", math.inf)
    assert math.isinf(c.constraints.backhaul_rate)
